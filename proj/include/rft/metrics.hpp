#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rft/errors.hpp"
#include "rft/graph.hpp"

namespace rft {

/// Performance-index constants and recovery-detection rule.
struct MetricsConfig {
    double vartheta = 10.0;
    double alpha = 5.0;
    double recovery_epsilon = 0.01;  // recovered when I >= 1 - epsilon ...
    double recovery_hold = 1.0;      // ... sustained this long

    void validate() const {
        if (vartheta <= 0.0 || alpha <= 0.0) {
            throw ConfigError("performance-index constants must be positive");
        }
        if (recovery_epsilon <= 0.0 || recovery_epsilon >= 1.0 || recovery_hold < 0.0) {
            throw ConfigError("recovery detection needs epsilon in (0,1) and hold >= 0");
        }
    }
};

/// Formation tracking performance index
///   I = (vartheta + sum_i |ebar_i|) / (vartheta + sum_i |ebar_i| + alpha sum_i |xtilde_i|)
/// where ebar_i averages the unit-weight local errors e_i^1 = sum_j (xtilde_i - xtilde_j)
/// over agent i's neighbor count. Always in (0, 1], and 1 exactly when every
/// global tracking error vanishes.
inline double performance_index(const std::vector<Vec>& xtilde, const SensoryGraph& graph,
                                const MetricsConfig& cfg) {
    const int n = graph.agent_count();
    if (static_cast<int>(xtilde.size()) != n) {
        throw std::invalid_argument("one tracking error per agent required");
    }
    double sum_local = 0.0;
    double sum_global = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& nbrs = graph.neighbors(i);
        Vec e1 = Vec::Zero(xtilde[static_cast<std::size_t>(i)].size());
        for (int j : nbrs) {
            e1 += xtilde[static_cast<std::size_t>(i)] - xtilde[static_cast<std::size_t>(j)];
        }
        if (!nbrs.empty()) {
            sum_local += e1.norm() / static_cast<double>(nbrs.size());
        }
        sum_global += xtilde[static_cast<std::size_t>(i)].norm();
    }
    return (cfg.vartheta + sum_local) / (cfg.vartheta + sum_local + cfg.alpha * sum_global);
}

/// Unit-weight mean local error |ebar_i^1| of a single agent, as logged.
inline double mean_local_error(const std::vector<Vec>& xtilde, const SensoryGraph& graph, int i) {
    const auto& nbrs = graph.neighbors(i);
    if (nbrs.empty()) return 0.0;
    Vec e1 = Vec::Zero(xtilde[static_cast<std::size_t>(i)].size());
    for (int j : nbrs) {
        e1 += xtilde[static_cast<std::size_t>(i)] - xtilde[static_cast<std::size_t>(j)];
    }
    return e1.norm() / static_cast<double>(nbrs.size());
}

/// Restoration result. When the index never recovers, `recovered` is false and
/// `restoration` carries an infinity sentinel.
struct RestorationResult {
    bool recovered = false;
    double restoration = std::numeric_limits<double>::infinity();  // R_s
    std::optional<double> recovery_time;                           // t_r
};

namespace detail {

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                        std::size_t first, std::size_t last) {
    double area = 0.0;
    for (std::size_t k = first; k < last; ++k) {
        area += 0.5 * (y[k] + y[k + 1]) * (t[k + 1] - t[k]);
    }
    return area;
}

inline std::size_t index_at(const std::vector<double>& t, double value, const char* what) {
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (std::abs(t[k] - value) <= 1e-9) return k;
    }
    throw std::invalid_argument(std::string(what) + " does not lie on the series grid");
}

}  // namespace detail

/// Restoration R_s = integral of (1 - I) from the attack time t_a to the
/// recovery time t_r, the first instant from which I >= 1 - epsilon holds for
/// the full hold duration. Trapezoidal integration on the series grid.
inline RestorationResult restoration(const std::vector<double>& t, const std::vector<double>& index,
                                     double t_a, const MetricsConfig& cfg) {
    if (t.size() != index.size() || t.size() < 2) {
        throw std::invalid_argument("time and index series must have equal length >= 2");
    }
    if (t_a < t.front() - 1e-9 || t_a > t.back() + 1e-9) {
        throw std::invalid_argument("attack time t_a lies outside the series");
    }
    const std::size_t start = detail::index_at(t, t_a, "t_a");
    const double threshold = 1.0 - cfg.recovery_epsilon;

    for (std::size_t k = start; k < t.size(); ++k) {
        if (index[k] < threshold) continue;
        // Require the full hold window inside the series.
        const double hold_end = t[k] + cfg.recovery_hold;
        if (hold_end > t.back() + 1e-9) break;
        bool sustained = true;
        for (std::size_t m = k; m < t.size() && t[m] <= hold_end + 1e-9; ++m) {
            if (index[m] < threshold) {
                sustained = false;
                break;
            }
        }
        if (!sustained) continue;
        std::vector<double> one_minus(index.size());
        for (std::size_t m = 0; m < index.size(); ++m) one_minus[m] = 1.0 - index[m];
        RestorationResult res;
        res.recovered = true;
        res.recovery_time = t[k];
        res.restoration = detail::trapezoid(t, one_minus, start, k);
        return res;
    }
    return {};
}

/// Modified restoration comparing an attacked run against an attack-free
/// reference on the same grid:
///   Rbar = integral(Nor - Att) / integral(Nor) over [t_a, t_s].
/// Zero means no degradation.
inline double modified_restoration(const std::vector<double>& t, const std::vector<double>& nor,
                                   const std::vector<double>& att, double t_a, double t_s) {
    if (t.size() != nor.size() || t.size() != att.size() || t.size() < 2) {
        throw std::invalid_argument("reference and attacked series must share the grid");
    }
    if (t_s <= t_a) {
        throw std::invalid_argument("window must satisfy t_a < t_s");
    }
    const std::size_t first = detail::index_at(t, t_a, "t_a");
    const std::size_t last = detail::index_at(t, t_s, "t_s");
    std::vector<double> diff(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) diff[k] = nor[k] - att[k];
    const double denom = detail::trapezoid(t, nor, first, last);
    if (denom <= 0.0) {
        throw std::invalid_argument("reference index integrates to zero over the window");
    }
    return detail::trapezoid(t, diff, first, last) / denom;
}

}  // namespace rft
