#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rft/errors.hpp"
#include "rft/graph.hpp"

namespace rft {

/// Logged quantities for one agent at one step.
struct AgentRecord {
    Vec position;
    Vec velocity;
    Vec input;
    Vec positioning;   // estimator output when enabled, else the signal fed to the controller
    Vec cov_diagonal;  // diag P of the estimate; zeros when the estimator is off
    double beta = 1.0;
    double d_kl = 0.0;
    double kappa_g = 0.0;
    int estimator_mode = 3;  // UpdateMode numeric value
    double tracking_error = 0.0;    // |xtilde_i|
    double mean_local_error = 0.0;  // |ebar_i^1|
};

struct StepRecord {
    double t = 0.0;
    std::vector<AgentRecord> agents;
    double perf_index = 1.0;
};

/// Complete per-step record of one simulation run.
struct RunLog {
    std::string config_hash;
    std::uint64_t seed = 0;
    int agent_count = 0;
    int dimension = 0;
    std::vector<StepRecord> steps;

    std::vector<double> times() const {
        std::vector<double> t;
        t.reserve(steps.size());
        for (const auto& s : steps) t.push_back(s.t);
        return t;
    }

    std::vector<double> perf_series() const {
        std::vector<double> p;
        p.reserve(steps.size());
        for (const auto& s : steps) p.push_back(s.perf_index);
        return p;
    }
};

namespace detail {

inline void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

}  // namespace detail

/// Column layout, per agent i and axis d:
///   t, then for each agent: x{i}_{d}, v{i}_{d}, u{i}_{d}, xhat{i}_{d},
///   beta{i}, dkl{i}, kappag{i}, estmode{i}, xerr{i}, ebar1{i},
///   and finally perf_index.
inline std::vector<std::string> csv_columns(int agent_count, int dimension) {
    std::vector<std::string> cols{"t"};
    for (int i = 0; i < agent_count; ++i) {
        const std::string n = std::to_string(i);
        for (int d = 0; d < dimension; ++d) cols.push_back("x" + n + "_" + std::to_string(d));
        for (int d = 0; d < dimension; ++d) cols.push_back("v" + n + "_" + std::to_string(d));
        for (int d = 0; d < dimension; ++d) cols.push_back("u" + n + "_" + std::to_string(d));
        for (int d = 0; d < dimension; ++d) cols.push_back("xhat" + n + "_" + std::to_string(d));
        for (int d = 0; d < dimension; ++d) cols.push_back("pdiag" + n + "_" + std::to_string(d));
        cols.push_back("beta" + n);
        cols.push_back("dkl" + n);
        cols.push_back("kappag" + n);
        cols.push_back("estmode" + n);
        cols.push_back("xerr" + n);
        cols.push_back("ebar1" + n);
    }
    cols.push_back("perf_index");
    return cols;
}

inline void write_csv(const RunLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    std::string text;
    text += "# config_hash=" + log.config_hash + " seed=" + std::to_string(log.seed) + "\n";
    const auto cols = csv_columns(log.agent_count, log.dimension);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) text += ',';
        text += cols[c];
    }
    text += '\n';

    for (const auto& s : log.steps) {
        detail::append_number(text, s.t);
        for (const auto& a : s.agents) {
            auto push_vec = [&](const Vec& v) {
                for (Eigen::Index d = 0; d < v.size(); ++d) {
                    text += ',';
                    detail::append_number(text, v(d));
                }
            };
            push_vec(a.position);
            push_vec(a.velocity);
            push_vec(a.input);
            push_vec(a.positioning);
            push_vec(a.cov_diagonal);
            text += ',';
            detail::append_number(text, a.beta);
            text += ',';
            detail::append_number(text, a.d_kl);
            text += ',';
            detail::append_number(text, a.kappa_g);
            text += ',';
            text += std::to_string(a.estimator_mode);
            text += ',';
            detail::append_number(text, a.tracking_error);
            text += ',';
            detail::append_number(text, a.mean_local_error);
        }
        text += ',';
        detail::append_number(text, s.perf_index);
        text += '\n';
    }
    out << text;
    if (!out) throw IoError("failed to write '" + path + "'");
}

/// Column-addressable view of a run CSV, for recomputing metrics offline.
class CsvLog {
public:
    static CsvLog read(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open '" + path + "' for reading");
        CsvLog log;
        std::string line;
        bool header_done = false;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line[0] == '#') {
                log.parse_meta(line);
                continue;
            }
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (!header_done) {
                for (std::size_t c = 0; c < cells.size(); ++c) {
                    log.column_index_[cells[c]] = c;
                }
                log.columns_ = cells;
                header_done = true;
                continue;
            }
            std::vector<double> row(cells.size());
            for (std::size_t c = 0; c < cells.size(); ++c) {
                try {
                    row[c] = std::stod(cells[c]);
                } catch (const std::exception&) {
                    throw IoError("non-numeric cell in '" + path + "'");
                }
            }
            log.rows_.push_back(std::move(row));
        }
        if (!header_done) throw IoError("'" + path + "' has no header row");
        return log;
    }

    const std::string& config_hash() const { return config_hash_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t row_count() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    bool has_column(const std::string& name) const { return column_index_.count(name) > 0; }

    std::vector<double> column(const std::string& name) const {
        const auto it = column_index_.find(name);
        if (it == column_index_.end()) {
            throw std::invalid_argument("CSV has no column '" + name + "'");
        }
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r.at(it->second));
        return out;
    }

    /// Number of agents inferred from the per-agent beta columns.
    int agent_count() const {
        int n = 0;
        while (has_column("beta" + std::to_string(n))) ++n;
        return n;
    }

private:
    void parse_meta(const std::string& line) {
        const auto hash_pos = line.find("config_hash=");
        if (hash_pos != std::string::npos) {
            const auto end = line.find(' ', hash_pos);
            config_hash_ = line.substr(hash_pos + 12, end - hash_pos - 12);
        }
        const auto seed_pos = line.find("seed=");
        if (seed_pos != std::string::npos) {
            seed_ = std::stoull(line.substr(seed_pos + 5));
        }
    }

    std::string config_hash_;
    std::uint64_t seed_ = 0;
    std::vector<std::string> columns_;
    std::map<std::string, std::size_t> column_index_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace rft
