#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <map>
#include <random>
#include <vector>

#include "rft/errors.hpp"
#include "rft/graph.hpp"

namespace rft {

/// Ground-truth state of one double-integrator agent.
struct AgentState {
    Vec position;
    Vec velocity;
};

/// What one agent senses in one step: its own velocity, the raw (pre-attack)
/// global position, and relative displacement/velocity to each neighbor,
/// keyed by neighbor index. r_ji = x_i - x_j as seen by agent i.
struct Measurements {
    Vec velocity;
    Vec gps;
    std::map<int, Vec> rel_disp;
    std::map<int, Vec> rel_vel;
};

/// Additive zero-mean Gaussian noise per measurement channel. A covariance of
/// exactly zero disables the channel's noise (and its RNG draws).
struct NoiseConfig {
    Mat velocity_cov;  // own-velocity measurement, feeds controller and estimator motion model
    Mat gps_cov;       // global positioning measurement
    Mat relative_cov;  // relative displacement and relative velocity, independent draws

    static NoiseConfig zero(int dimension) {
        return {Mat::Zero(dimension, dimension), Mat::Zero(dimension, dimension),
                Mat::Zero(dimension, dimension)};
    }

    static NoiseConfig isotropic(int dimension, double velocity_std, double gps_std,
                                 double relative_std) {
        const Mat eye = Mat::Identity(dimension, dimension);
        return {velocity_std * velocity_std * eye, gps_std * gps_std * eye,
                relative_std * relative_std * eye};
    }
};

namespace detail {

/// Cached Cholesky factor for drawing correlated Gaussian vectors.
class GaussianChannel {
public:
    explicit GaussianChannel(const Mat& cov) : dim_(static_cast<int>(cov.rows())) {
        if (cov.rows() != cov.cols()) {
            throw ConfigError("noise covariance must be square");
        }
        if (!cov.isApprox(cov.transpose(), 1e-12)) {
            throw ConfigError("noise covariance must be symmetric");
        }
        if (cov.isZero(0.0)) {
            active_ = false;
            return;
        }
        Eigen::LLT<Mat> llt(cov);
        if (llt.info() != Eigen::Success) {
            // PSD but singular covariances still need a factor; fall back to
            // an eigendecomposition-based square root.
            Eigen::SelfAdjointEigenSolver<Mat> es(cov);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-12) {
                throw ConfigError("noise covariance must be positive semidefinite");
            }
            factor_ = es.eigenvectors() *
                      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        } else {
            factor_ = llt.matrixL();
        }
        active_ = true;
    }

    bool active() const { return active_; }

    template <typename Rng>
    Vec draw(Rng& rng, std::normal_distribution<double>& unit) const {
        Vec z(dim_);
        for (int d = 0; d < dim_; ++d) z(d) = unit(rng);
        return factor_ * z;
    }

private:
    int dim_;
    bool active_ = false;
    Mat factor_;
};

}  // namespace detail

/// Advances all agents by one fixed step of classical RK4 applied to
/// \ddot x = u with the input held constant over the step. For this system the
/// RK4 update is exact: x += v dt + u dt^2/2, v += u dt.
inline std::vector<AgentState> step(const std::vector<AgentState>& states,
                                    const std::vector<Vec>& inputs, double dt, double t = 0.0) {
    if (dt <= 0.0) {
        throw ConfigError("integration step must be positive");
    }
    if (inputs.size() != states.size()) {
        throw ConfigError("one control input per agent required");
    }
    std::vector<AgentState> next(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        const auto& u = inputs[i];
        if (!s.position.allFinite() || !s.velocity.allFinite()) {
            throw SimulationDivergedError(static_cast<int>(i), t, "non-finite state");
        }
        if (!u.allFinite()) {
            throw SimulationDivergedError(static_cast<int>(i), t, "non-finite control input");
        }
        // RK4 stages for [x; v]' = [v; u], u constant.
        const Vec k1x = s.velocity;
        const Vec k2x = s.velocity + 0.5 * dt * u;
        const Vec k3x = k2x;
        const Vec k4x = s.velocity + dt * u;
        next[i].position = s.position + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        next[i].velocity = s.velocity + dt * u;
    }
    return next;
}

/// Produces per-agent sensor measurements from the true states. With zero
/// noise, mutuality r_ji = -r_ij holds bit-exactly. Draw order is fixed
/// (agents ascending, per agent: velocity, gps, then neighbors ascending with
/// displacement before velocity) so runs are reproducible for a given seed.
template <typename Rng>
std::vector<Measurements> measure(const std::vector<AgentState>& states,
                                  const SensoryGraph& graph, const NoiseConfig& noise,
                                  Rng& rng) {
    const int n_agents = graph.agent_count();
    if (static_cast<int>(states.size()) != n_agents) {
        throw ConfigError("state count does not match graph agent count");
    }
    detail::GaussianChannel vel_ch(noise.velocity_cov);
    detail::GaussianChannel gps_ch(noise.gps_cov);
    detail::GaussianChannel rel_ch(noise.relative_cov);
    std::normal_distribution<double> unit(0.0, 1.0);

    std::vector<Measurements> out(static_cast<std::size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) {
        auto& m = out[static_cast<std::size_t>(i)];
        m.velocity = states[static_cast<std::size_t>(i)].velocity;
        if (vel_ch.active()) m.velocity += vel_ch.draw(rng, unit);
        m.gps = states[static_cast<std::size_t>(i)].position;
        if (gps_ch.active()) m.gps += gps_ch.draw(rng, unit);
        for (int j : graph.neighbors(i)) {
            Vec disp = states[static_cast<std::size_t>(i)].position -
                       states[static_cast<std::size_t>(j)].position;
            Vec relv = states[static_cast<std::size_t>(i)].velocity -
                       states[static_cast<std::size_t>(j)].velocity;
            if (rel_ch.active()) {
                disp += rel_ch.draw(rng, unit);
                relv += rel_ch.draw(rng, unit);
            }
            m.rel_disp.emplace(j, std::move(disp));
            m.rel_vel.emplace(j, std::move(relv));
        }
    }
    return out;
}

}  // namespace rft
