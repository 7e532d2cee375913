#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rft/attacks.hpp"
#include "rft/control.hpp"
#include "rft/dynamics.hpp"
#include "rft/errors.hpp"
#include "rft/estimation.hpp"
#include "rft/formation.hpp"
#include "rft/graph.hpp"
#include "rft/metrics.hpp"

namespace rft {

using Json = nlohmann::json;

enum class PositioningSource { kRaw = 0, kEstimator = 1 };

struct EstimatorConfig {
    bool enabled = false;
    double process_std = 0.02;
    double gps_std = 5e-4;
    double relative_std = 5e-4;
    double chi = 5.0;
    double initial_cov = 1e-4;
};

struct TuningConfig {
    bool enabled = false;
    TuningParams params;
    double activation_time = 0.0;
};

struct NoiseStdConfig {
    double velocity = 0.0;
    double gps = 0.0;
    double relative = 0.0;
};

struct InitialConditions {
    std::optional<std::vector<Vec>> positions;
    std::optional<std::vector<Vec>> velocities;
};

namespace detail {

inline void reject_unknown_keys(const Json& obj, const std::set<std::string>& allowed,
                                const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + path + key + "'");
        }
    }
}

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) {
        throw ConfigError("missing required key '" + path + key + "'");
    }
    return obj.at(key);
}

inline double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError("'" + path + "' must be a number");
    return j.get<double>();
}

inline int as_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
    return j.get<int>();
}

inline bool as_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError("'" + path + "' must be a boolean");
    return j.get<bool>();
}

inline std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError("'" + path + "' must be a string");
    return j.get<std::string>();
}

inline Vec as_vector(const Json& j, int dim, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) {
        throw ConfigError("'" + path + "' must be an array of " + std::to_string(dim) +
                          " numbers");
    }
    Vec v(dim);
    for (int d = 0; d < dim; ++d) v(d) = as_number(j.at(d), path);
    return v;
}

inline bool on_grid(double t, double dt) {
    if (std::isinf(t)) return true;
    const double steps = t / dt;
    return std::abs(steps - std::round(steps)) * dt <= 1e-9;
}

inline std::vector<SinusoidTerm> parse_sinusoids(const Json& arr, int dim,
                                                 const std::string& path) {
    std::vector<SinusoidTerm> terms;
    if (!arr.is_array()) throw ConfigError("'" + path + "' must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto& j = arr.at(k);
        const std::string p = path + "[" + std::to_string(k) + "].";
        reject_unknown_keys(j, {"axis", "amplitude", "omega", "phase"}, p);
        SinusoidTerm s;
        s.axis = as_int(require(j, "axis", p), p + "axis");
        s.amplitude = as_number(require(j, "amplitude", p), p + "amplitude");
        s.omega = as_number(require(j, "omega", p), p + "omega");
        s.phase = j.contains("phase") ? as_number(j.at("phase"), p + "phase") : 0.0;
        if (s.axis < 0 || s.axis >= dim) {
            throw ConfigError("'" + p + "axis' out of range");
        }
        terms.push_back(s);
    }
    return terms;
}

inline Json sinusoids_to_json(const std::vector<SinusoidTerm>& terms) {
    Json arr = Json::array();
    for (const auto& s : terms) {
        arr.push_back({{"axis", s.axis},
                       {"amplitude", s.amplitude},
                       {"omega", s.omega},
                       {"phase", s.phase}});
    }
    return arr;
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

/// Fully parsed and validated scenario description. Unknown keys anywhere in
/// the document are rejected; event times must lie on the dt grid.
class ScenarioConfig {
public:
    std::string name;
    int dimension = 2;
    double duration = 0.0;
    double dt = 0.01;
    std::uint64_t seed = 0;

    int agent_count = 0;
    std::vector<WeightedEdge> edges;

    GlobalTrajectory global_trajectory;
    std::vector<AgentOffsetSchedule> offsets;
    double transition_window = 5.0;

    ControllerGains gains;
    TuningConfig tuning;
    std::vector<AttackSpec> attacks;
    EstimatorConfig estimator;
    NoiseStdConfig noise;
    PositioningSource positioning = PositioningSource::kRaw;
    MetricsConfig metrics;
    InitialConditions initial_conditions;

    static ScenarioConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path + "'");
        Json j;
        try {
            in >> j;
        } catch (const Json::exception& e) {
            throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
        }
        return from_json(j);
    }

    static ScenarioConfig from_json(const Json& root);

    /// Normalized semantic content (defaults materialized, cosmetic name
    /// dropped) used for hashing and reproducibility records.
    Json to_canonical_json() const;

    std::uint64_t hash() const { return detail::fnv1a(to_canonical_json().dump()); }

    std::string hash_hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
        return buf;
    }

    int step_count() const { return static_cast<int>(std::llround(duration / dt)); }

    SensoryGraph make_graph() const { return SensoryGraph(agent_count, edges); }

    FormationPlan make_plan() const {
        return FormationPlan(dimension, global_trajectory, offsets, transition_window);
    }

    NoiseConfig make_noise() const {
        return NoiseConfig::isotropic(dimension, noise.velocity, noise.gps, noise.relative);
    }

    MeasurementModels make_models() const {
        MeasurementModels m;
        const Mat eye = Mat::Identity(dimension, dimension);
        m.process_cov = estimator.process_std * estimator.process_std * eye;
        m.gps_cov = estimator.gps_std * estimator.gps_std * eye;
        m.relative_cov = estimator.relative_std * estimator.relative_std * eye;
        m.dt = dt;
        m.chi = estimator.chi;
        return m;
    }

private:
    void validate() const;
};

inline ScenarioConfig ScenarioConfig::from_json(const Json& root) {
    using namespace detail;
    if (!root.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(root,
                        {"name", "dimension", "duration", "dt", "seed", "graph", "formation",
                         "gains", "tuning", "attacks", "estimator", "noise",
                         "positioning_source", "metrics", "initial_conditions"},
                        "");

    ScenarioConfig cfg;
    cfg.name = root.contains("name") ? as_string(root.at("name"), "name") : "";
    cfg.dimension = as_int(require(root, "dimension", ""), "dimension");
    cfg.duration = as_number(require(root, "duration", ""), "duration");
    cfg.dt = as_number(require(root, "dt", ""), "dt");
    if (root.contains("seed")) {
        const Json& s = root.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
            throw ConfigError("'seed' must be a non-negative integer");
        }
        cfg.seed = s.get<std::uint64_t>();
    }

    // Formation (parsed first: the agent list fixes N).
    {
        const Json& f = require(root, "formation", "");
        reject_unknown_keys(f, {"transition_window", "global_trajectory", "agents"},
                            "formation.");
        cfg.transition_window = f.contains("transition_window")
                                    ? as_number(f.at("transition_window"),
                                                "formation.transition_window")
                                    : 5.0;

        const Json& g = require(f, "global_trajectory", "formation.");
        const std::string type =
            as_string(require(g, "type", "formation.global_trajectory."),
                      "formation.global_trajectory.type");
        if (type == "constant") {
            reject_unknown_keys(g, {"type", "point"}, "formation.global_trajectory.");
            cfg.global_trajectory = ConstantTrajectory{
                as_vector(require(g, "point", "formation.global_trajectory."), cfg.dimension,
                          "formation.global_trajectory.point")};
        } else if (type == "lemniscate") {
            reject_unknown_keys(g, {"type", "omega", "ax", "ay", "denom_offset", "az", "z_offset"},
                                "formation.global_trajectory.");
            LemniscateTrajectory lem;
            lem.dimension = cfg.dimension;
            lem.omega = as_number(require(g, "omega", "formation.global_trajectory."),
                                  "formation.global_trajectory.omega");
            lem.ax = as_number(require(g, "ax", "formation.global_trajectory."),
                               "formation.global_trajectory.ax");
            lem.ay = as_number(require(g, "ay", "formation.global_trajectory."),
                               "formation.global_trajectory.ay");
            lem.denom_offset =
                g.contains("denom_offset")
                    ? as_number(g.at("denom_offset"), "formation.global_trajectory.denom_offset")
                    : 3.0;
            lem.az = g.contains("az")
                         ? as_number(g.at("az"), "formation.global_trajectory.az")
                         : 0.0;
            lem.z_offset = g.contains("z_offset") ? as_number(g.at("z_offset"),
                                                              "formation.global_trajectory.z_offset")
                                                  : 0.0;
            cfg.global_trajectory = lem;
        } else if (type == "sinusoid") {
            reject_unknown_keys(g, {"type", "offset", "terms"}, "formation.global_trajectory.");
            SinusoidTrajectory s;
            s.offset = as_vector(require(g, "offset", "formation.global_trajectory."),
                                 cfg.dimension, "formation.global_trajectory.offset");
            s.terms = g.contains("terms")
                          ? parse_sinusoids(g.at("terms"), cfg.dimension,
                                            "formation.global_trajectory.terms")
                          : std::vector<SinusoidTerm>{};
            cfg.global_trajectory = s;
        } else {
            throw ConfigError("unknown global trajectory type '" + type + "'");
        }

        const Json& agents = require(f, "agents", "formation.");
        if (!agents.is_array() || agents.size() < 3) {
            throw ConfigError("'formation.agents' must list at least 3 agents");
        }
        cfg.agent_count = static_cast<int>(agents.size());
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const std::string p = "formation.agents[" + std::to_string(i) + "].";
            const Json& a = agents.at(i);
            reject_unknown_keys(a, {"keyframes", "sinusoids"}, p);
            AgentOffsetSchedule sched;
            const Json& kfs = require(a, "keyframes", p);
            if (!kfs.is_array() || kfs.empty()) {
                throw ConfigError("'" + p + "keyframes' must be a non-empty array");
            }
            for (std::size_t k = 0; k < kfs.size(); ++k) {
                const std::string kp = p + "keyframes[" + std::to_string(k) + "].";
                reject_unknown_keys(kfs.at(k), {"t", "offset"}, kp);
                OffsetKeyframe kf;
                kf.t = as_number(require(kfs.at(k), "t", kp), kp + "t");
                kf.offset = as_vector(require(kfs.at(k), "offset", kp), cfg.dimension,
                                      kp + "offset");
                sched.keyframes.push_back(std::move(kf));
            }
            if (a.contains("sinusoids")) {
                sched.sinusoids = parse_sinusoids(a.at("sinusoids"), cfg.dimension,
                                                  p + "sinusoids");
            }
            cfg.offsets.push_back(std::move(sched));
        }
    }

    // Graph.
    {
        const Json& g = require(root, "graph", "");
        reject_unknown_keys(g, {"edges"}, "graph.");
        const Json& edges = require(g, "edges", "graph.");
        if (!edges.is_array()) throw ConfigError("'graph.edges' must be an array");
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& e = edges.at(k);
            const std::string p = "graph.edges[" + std::to_string(k) + "]";
            if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
                throw ConfigError("'" + p + "' must be [i, j] or [i, j, weight]");
            }
            WeightedEdge we;
            we.i = as_int(e.at(0), p);
            we.j = as_int(e.at(1), p);
            we.weight = e.size() == 3 ? as_number(e.at(2), p) : 1.0;
            cfg.edges.push_back(we);
        }
    }

    // Gains.
    {
        const Json& g = require(root, "gains", "");
        reject_unknown_keys(g, {"kappa_f", "kappa_g", "sigma_f", "kappa_g_lower", "kappa_g_upper"},
                            "gains.");
        cfg.gains.kappa_f = as_number(require(g, "kappa_f", "gains."), "gains.kappa_f");

        const Json& kg = require(g, "kappa_g", "gains.");
        cfg.gains.kappa_g = Vec(cfg.agent_count);
        if (kg.is_number()) {
            cfg.gains.kappa_g.setConstant(kg.get<double>());
        } else if (kg.is_array() && static_cast<int>(kg.size()) == cfg.agent_count) {
            for (int i = 0; i < cfg.agent_count; ++i) {
                cfg.gains.kappa_g(i) = as_number(kg.at(i), "gains.kappa_g");
            }
        } else {
            throw ConfigError("'gains.kappa_g' must be a number or one number per agent");
        }

        const Json& sf = require(g, "sigma_f", "gains.");
        const Mat eye = Mat::Identity(cfg.dimension, cfg.dimension);
        if (sf.is_number()) {
            cfg.gains.sigma_f.assign(static_cast<std::size_t>(cfg.agent_count),
                                     sf.get<double>() * eye);
        } else if (sf.is_array() && static_cast<int>(sf.size()) == cfg.agent_count &&
                   !sf.empty() && sf.at(0).is_number()) {
            for (int i = 0; i < cfg.agent_count; ++i) {
                cfg.gains.sigma_f.push_back(as_number(sf.at(i), "gains.sigma_f") * eye);
            }
        } else if (sf.is_array() && static_cast<int>(sf.size()) == cfg.dimension) {
            Mat m(cfg.dimension, cfg.dimension);
            for (int r = 0; r < cfg.dimension; ++r) {
                m.row(r) = as_vector(sf.at(r), cfg.dimension, "gains.sigma_f").transpose();
            }
            cfg.gains.sigma_f.assign(static_cast<std::size_t>(cfg.agent_count), m);
        } else {
            throw ConfigError(
                "'gains.sigma_f' must be a scalar, one scalar per agent, or an n x n matrix");
        }

        cfg.gains.kappa_g_lower =
            g.contains("kappa_g_lower") ? as_number(g.at("kappa_g_lower"), "gains.kappa_g_lower")
                                        : 0.0;
        cfg.gains.kappa_g_upper = g.contains("kappa_g_upper")
                                      ? as_number(g.at("kappa_g_upper"), "gains.kappa_g_upper")
                                      : cfg.gains.kappa_g.maxCoeff();
    }

    // Tuning.
    if (root.contains("tuning")) {
        const Json& t = root.at("tuning");
        reject_unknown_keys(t, {"enabled", "gamma", "sigma_beta", "chi_beta", "activation_time"},
                            "tuning.");
        cfg.tuning.enabled =
            t.contains("enabled") ? as_bool(t.at("enabled"), "tuning.enabled") : true;
        if (t.contains("gamma")) cfg.tuning.params.gamma = as_number(t.at("gamma"), "tuning.gamma");
        if (t.contains("sigma_beta")) {
            cfg.tuning.params.sigma_beta = as_number(t.at("sigma_beta"), "tuning.sigma_beta");
        }
        if (t.contains("chi_beta")) {
            cfg.tuning.params.chi_beta = as_number(t.at("chi_beta"), "tuning.chi_beta");
        }
        if (t.contains("activation_time")) {
            cfg.tuning.activation_time = as_number(t.at("activation_time"),
                                                   "tuning.activation_time");
        }
    }

    // Attacks.
    if (root.contains("attacks")) {
        const Json& arr = root.at("attacks");
        if (!arr.is_array()) throw ConfigError("'attacks' must be an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string p = "attacks[" + std::to_string(k) + "].";
            const Json& a = arr.at(k);
            reject_unknown_keys(
                a, {"agent", "mode", "delta", "bias", "bias_sinusoids", "c_a", "t_start", "t_end"},
                p);
            AttackSpec spec;
            spec.agent = as_int(require(a, "agent", p), p + "agent");
            const std::string mode = as_string(require(a, "mode", p), p + "mode");
            if (mode == "none") {
                spec.mode = AttackMode::kNone;
            } else if (mode == "additive") {
                spec.mode = AttackMode::kAdditive;
            } else if (mode == "hybrid") {
                spec.mode = AttackMode::kHybrid;
            } else if (mode == "unstable") {
                spec.mode = AttackMode::kUnstable;
            } else {
                throw ConfigError("'" + p + "mode' must be none/additive/hybrid/unstable");
            }
            if (a.contains("delta")) spec.delta = as_number(a.at("delta"), p + "delta");
            spec.bias.constant = a.contains("bias")
                                     ? as_vector(a.at("bias"), cfg.dimension, p + "bias")
                                     : Vec::Zero(cfg.dimension);
            if (a.contains("bias_sinusoids")) {
                spec.bias.sinusoids =
                    parse_sinusoids(a.at("bias_sinusoids"), cfg.dimension, p + "bias_sinusoids");
            }
            if (a.contains("c_a")) spec.c_a = as_number(a.at("c_a"), p + "c_a");
            spec.t_start = as_number(require(a, "t_start", p), p + "t_start");
            spec.t_end = a.contains("t_end") ? as_number(a.at("t_end"), p + "t_end")
                                             : std::numeric_limits<double>::infinity();
            cfg.attacks.push_back(std::move(spec));
        }
    }

    // Estimator.
    if (root.contains("estimator")) {
        const Json& e = root.at("estimator");
        reject_unknown_keys(
            e, {"enabled", "process_std", "gps_std", "relative_std", "chi", "initial_cov"},
            "estimator.");
        cfg.estimator.enabled =
            e.contains("enabled") ? as_bool(e.at("enabled"), "estimator.enabled") : true;
        if (e.contains("process_std")) {
            cfg.estimator.process_std = as_number(e.at("process_std"), "estimator.process_std");
        }
        if (e.contains("gps_std")) {
            cfg.estimator.gps_std = as_number(e.at("gps_std"), "estimator.gps_std");
        }
        if (e.contains("relative_std")) {
            cfg.estimator.relative_std =
                as_number(e.at("relative_std"), "estimator.relative_std");
        }
        if (e.contains("chi")) cfg.estimator.chi = as_number(e.at("chi"), "estimator.chi");
        if (e.contains("initial_cov")) {
            cfg.estimator.initial_cov = as_number(e.at("initial_cov"), "estimator.initial_cov");
        }
    }

    // Noise.
    if (root.contains("noise")) {
        const Json& n = root.at("noise");
        reject_unknown_keys(n, {"velocity_std", "gps_std", "relative_std"}, "noise.");
        if (n.contains("velocity_std")) {
            cfg.noise.velocity = as_number(n.at("velocity_std"), "noise.velocity_std");
        }
        if (n.contains("gps_std")) cfg.noise.gps = as_number(n.at("gps_std"), "noise.gps_std");
        if (n.contains("relative_std")) {
            cfg.noise.relative = as_number(n.at("relative_std"), "noise.relative_std");
        }
    }

    if (root.contains("positioning_source")) {
        const std::string s = as_string(root.at("positioning_source"), "positioning_source");
        if (s == "raw") {
            cfg.positioning = PositioningSource::kRaw;
        } else if (s == "estimator") {
            cfg.positioning = PositioningSource::kEstimator;
        } else {
            throw ConfigError("'positioning_source' must be 'raw' or 'estimator'");
        }
    }

    // Metrics.
    if (root.contains("metrics")) {
        const Json& m = root.at("metrics");
        reject_unknown_keys(m, {"vartheta", "alpha", "recovery_epsilon", "recovery_hold"},
                            "metrics.");
        if (m.contains("vartheta")) {
            cfg.metrics.vartheta = as_number(m.at("vartheta"), "metrics.vartheta");
        }
        if (m.contains("alpha")) cfg.metrics.alpha = as_number(m.at("alpha"), "metrics.alpha");
        if (m.contains("recovery_epsilon")) {
            cfg.metrics.recovery_epsilon =
                as_number(m.at("recovery_epsilon"), "metrics.recovery_epsilon");
        }
        if (m.contains("recovery_hold")) {
            cfg.metrics.recovery_hold = as_number(m.at("recovery_hold"), "metrics.recovery_hold");
        }
    }

    // Initial-condition overrides.
    if (root.contains("initial_conditions")) {
        const Json& ic = root.at("initial_conditions");
        reject_unknown_keys(ic, {"positions", "velocities"}, "initial_conditions.");
        auto parse_list = [&](const Json& arr, const char* what) {
            if (!arr.is_array() || static_cast<int>(arr.size()) != cfg.agent_count) {
                throw ConfigError(std::string("'initial_conditions.") + what +
                                  "' must list one vector per agent");
            }
            std::vector<Vec> out;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                out.push_back(as_vector(arr.at(i), cfg.dimension,
                                        std::string("initial_conditions.") + what));
            }
            return out;
        };
        if (ic.contains("positions")) {
            cfg.initial_conditions.positions = parse_list(ic.at("positions"), "positions");
        }
        if (ic.contains("velocities")) {
            cfg.initial_conditions.velocities = parse_list(ic.at("velocities"), "velocities");
        }
    }

    cfg.validate();
    return cfg;
}

inline void ScenarioConfig::validate() const {
    using detail::on_grid;
    if (dimension != 2 && dimension != 3) throw ConfigError("'dimension' must be 2 or 3");
    if (dt <= 0.0) throw ConfigError("'dt' must be positive");
    if (duration <= 0.0) throw ConfigError("'duration' must be positive");
    if (!on_grid(duration, dt)) throw ConfigError("'duration' must be a multiple of dt");

    for (const auto& e : edges) {
        if (e.i >= agent_count || e.j >= agent_count) {
            throw ConfigError("graph edge references agent index out of range");
        }
    }
    make_graph();  // connectivity and weight validation
    make_plan();   // keyframe/sinusoid validation
    gains.validate();
    if (static_cast<int>(gains.kappa_g.size()) != agent_count) {
        throw ConfigError("gains must cover every agent");
    }

    for (const auto& sched : offsets) {
        for (const auto& kf : sched.keyframes) {
            if (!on_grid(kf.t, dt)) {
                throw ConfigError("offset keyframe times must lie on the dt grid");
            }
        }
    }

    validate_attack_list(attacks, agent_count, dimension);
    for (const auto& a : attacks) {
        if (!on_grid(a.t_start, dt) || !on_grid(a.t_end, dt)) {
            throw ConfigError("attack windows must lie on the dt grid");
        }
    }

    if (tuning.enabled) {
        tuning.params.validate();
        if (!estimator.enabled) {
            throw ConfigError("gain tuning requires the estimator (beta source) to be enabled");
        }
        if (tuning.activation_time < 0.0 || !on_grid(tuning.activation_time, dt)) {
            throw ConfigError("tuning activation time must be non-negative and on the dt grid");
        }
    }
    if (positioning == PositioningSource::kEstimator && !estimator.enabled) {
        throw ConfigError("positioning_source 'estimator' requires the estimator to be enabled");
    }
    if (estimator.enabled) {
        make_models().validate();
        if (estimator.initial_cov <= 0.0) {
            throw ConfigError("estimator initial covariance must be positive");
        }
    }
    if (noise.velocity < 0.0 || noise.gps < 0.0 || noise.relative < 0.0) {
        throw ConfigError("noise standard deviations must be non-negative");
    }
    metrics.validate();
}

inline Json ScenarioConfig::to_canonical_json() const {
    Json root;
    root["dimension"] = dimension;
    root["duration"] = duration;
    root["dt"] = dt;
    root["seed"] = seed;

    Json edge_arr = Json::array();
    for (const auto& e : edges) edge_arr.push_back({e.i, e.j, e.weight});
    root["graph"] = {{"edges", edge_arr}};

    Json traj;
    if (const auto* c = std::get_if<ConstantTrajectory>(&global_trajectory)) {
        traj = {{"type", "constant"}, {"point", std::vector<double>(c->point.begin(), c->point.end())}};
    } else if (const auto* lem = std::get_if<LemniscateTrajectory>(&global_trajectory)) {
        traj = {{"type", "lemniscate"}, {"omega", lem->omega},       {"ax", lem->ax},
                {"ay", lem->ay},        {"denom_offset", lem->denom_offset},
                {"az", lem->az},        {"z_offset", lem->z_offset}};
    } else {
        const auto& s = std::get<SinusoidTrajectory>(global_trajectory);
        traj = {{"type", "sinusoid"},
                {"offset", std::vector<double>(s.offset.begin(), s.offset.end())},
                {"terms", detail::sinusoids_to_json(s.terms)}};
    }
    Json agents = Json::array();
    for (const auto& sched : offsets) {
        Json kfs = Json::array();
        for (const auto& kf : sched.keyframes) {
            kfs.push_back({{"t", kf.t},
                           {"offset", std::vector<double>(kf.offset.begin(), kf.offset.end())}});
        }
        agents.push_back({{"keyframes", kfs},
                          {"sinusoids", detail::sinusoids_to_json(sched.sinusoids)}});
    }
    root["formation"] = {{"transition_window", transition_window},
                         {"global_trajectory", traj},
                         {"agents", agents}};

    Json sigma_arr = Json::array();
    for (const auto& m : gains.sigma_f) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
        }
        sigma_arr.push_back(rows);
    }
    root["gains"] = {{"kappa_f", gains.kappa_f},
                     {"kappa_g", std::vector<double>(gains.kappa_g.begin(), gains.kappa_g.end())},
                     {"sigma_f", sigma_arr},
                     {"kappa_g_lower", gains.kappa_g_lower},
                     {"kappa_g_upper", gains.kappa_g_upper}};

    root["tuning"] = {{"enabled", tuning.enabled},
                      {"gamma", tuning.params.gamma},
                      {"sigma_beta", tuning.params.sigma_beta},
                      {"chi_beta", tuning.params.chi_beta},
                      {"activation_time", tuning.activation_time}};

    Json attack_arr = Json::array();
    for (const auto& a : attacks) {
        const char* mode = a.mode == AttackMode::kNone       ? "none"
                           : a.mode == AttackMode::kAdditive ? "additive"
                           : a.mode == AttackMode::kHybrid   ? "hybrid"
                                                             : "unstable";
        Json aj = {{"agent", a.agent},
                   {"mode", mode},
                   {"delta", a.delta},
                   {"bias", std::vector<double>(a.bias.constant.begin(), a.bias.constant.end())},
                   {"bias_sinusoids", detail::sinusoids_to_json(a.bias.sinusoids)},
                   {"c_a", a.c_a},
                   {"t_start", a.t_start}};
        if (!std::isinf(a.t_end)) aj["t_end"] = a.t_end;
        attack_arr.push_back(aj);
    }
    root["attacks"] = attack_arr;

    root["estimator"] = {{"enabled", estimator.enabled},
                         {"process_std", estimator.process_std},
                         {"gps_std", estimator.gps_std},
                         {"relative_std", estimator.relative_std},
                         {"chi", estimator.chi},
                         {"initial_cov", estimator.initial_cov}};
    root["noise"] = {{"velocity_std", noise.velocity},
                     {"gps_std", noise.gps},
                     {"relative_std", noise.relative}};
    root["positioning_source"] =
        positioning == PositioningSource::kRaw ? "raw" : "estimator";
    root["metrics"] = {{"vartheta", metrics.vartheta},
                       {"alpha", metrics.alpha},
                       {"recovery_epsilon", metrics.recovery_epsilon},
                       {"recovery_hold", metrics.recovery_hold}};

    if (initial_conditions.positions) {
        Json arr = Json::array();
        for (const auto& v : *initial_conditions.positions) {
            arr.push_back(std::vector<double>(v.begin(), v.end()));
        }
        root["initial_conditions"]["positions"] = arr;
    }
    if (initial_conditions.velocities) {
        Json arr = Json::array();
        for (const auto& v : *initial_conditions.velocities) {
            arr.push_back(std::vector<double>(v.begin(), v.end()));
        }
        root["initial_conditions"]["velocities"] = arr;
    }
    return root;
}

}  // namespace rft
