#pragma once

#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rft/attacks.hpp"
#include "rft/config.hpp"
#include "rft/control.hpp"
#include "rft/dynamics.hpp"
#include "rft/errors.hpp"
#include "rft/estimation.hpp"
#include "rft/formation.hpp"
#include "rft/graph.hpp"
#include "rft/metrics.hpp"
#include "rft/run_log.hpp"

namespace rft {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic per-run stream for parameter sweeps.
inline std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
    return detail::splitmix64(base_seed ^ detail::splitmix64(run_index + 1));
}

/// Executes one scenario with the single-rate pipeline
///   measure -> attack -> estimate -> resolve positioning -> gain-tune ->
///   control -> integrate -> metrics
/// at the configured dt. Deterministic for a given config and seed.
inline RunLog run_scenario(const ScenarioConfig& cfg) {
    const SensoryGraph graph = cfg.make_graph();
    const FormationPlan plan = cfg.make_plan();
    const NoiseConfig noise = cfg.make_noise();
    const int n = cfg.agent_count;
    const int dim = cfg.dimension;
    const int steps = cfg.step_count();

    ControllerGains gains = cfg.gains;
    std::mt19937_64 rng(cfg.seed);

    // Initial conditions default to the desired formation state.
    std::vector<AgentState> states(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto d = plan.desired_state(i, 0.0);
        states[static_cast<std::size_t>(i)] = {d.pos, d.vel};
    }
    if (cfg.initial_conditions.positions) {
        for (int i = 0; i < n; ++i) {
            states[static_cast<std::size_t>(i)].position =
                (*cfg.initial_conditions.positions)[static_cast<std::size_t>(i)];
        }
    }
    if (cfg.initial_conditions.velocities) {
        for (int i = 0; i < n; ++i) {
            states[static_cast<std::size_t>(i)].velocity =
                (*cfg.initial_conditions.velocities)[static_cast<std::size_t>(i)];
        }
    }

    std::vector<ResilientEstimator> estimators;
    if (cfg.estimator.enabled) {
        const MeasurementModels models = cfg.make_models();
        const Mat p0 = cfg.estimator.initial_cov * Mat::Identity(dim, dim);
        estimators.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            estimators.emplace_back(states[static_cast<std::size_t>(i)].position, p0, models);
        }
    }

    RunLog log;
    log.config_hash = cfg.hash_hex();
    log.seed = cfg.seed;
    log.agent_count = n;
    log.dimension = dim;
    log.steps.reserve(static_cast<std::size_t>(steps) + 1);

    // Event times snap to the step grid; gating by index keeps half-open
    // windows exact even where k * dt rounds across the boundary.
    auto step_of = [&](double t_event) {
        return std::isinf(t_event) ? std::numeric_limits<long long>::max()
                                   : std::llround(t_event / cfg.dt);
    };
    struct AttackWindow {
        const AttackSpec* spec;
        long long first, last;  // [first, last)
    };
    std::vector<AttackWindow> attack_windows;
    for (const auto& attack : cfg.attacks) {
        attack_windows.push_back({&attack, step_of(attack.t_start), step_of(attack.t_end)});
    }
    const long long tuning_step = step_of(cfg.tuning.activation_time);

    for (int k = 0; k <= steps; ++k) {
        const double t = k * cfg.dt;

        const auto meas = measure(states, graph, noise, rng);
        const auto errors = compute_tracking_errors(states, plan, graph, gains, t);

        // Deliver the (possibly compromised) positioning signal per agent.
        std::vector<Vec> delivered(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            delivered[static_cast<std::size_t>(i)] = meas[static_cast<std::size_t>(i)].gps;
        }
        for (const auto& w : attack_windows) {
            if (k < w.first || k >= w.last) continue;
            auto& signal = delivered[static_cast<std::size_t>(w.spec->agent)];
            signal = attack_formula(*w.spec, signal,
                                    errors[static_cast<std::size_t>(w.spec->agent)].xi, t);
        }

        // Estimation (Algorithm-1 step per agent; step 0 is initialization only).
        std::vector<EstimatorStepResult> est_results(static_cast<std::size_t>(n));
        if (cfg.estimator.enabled && k > 0) {
            for (int i = 0; i < n; ++i) {
                const auto& m = meas[static_cast<std::size_t>(i)];
                std::map<int, Vec> rel, desired;
                for (int j : graph.neighbors(i)) {
                    rel.emplace(j, Vec(-m.rel_disp.at(j)));  // s_ij = x_j - x_i
                    desired.emplace(j, plan.desired_state(j, t).pos);
                }
                est_results[static_cast<std::size_t>(i)] =
                    estimators[static_cast<std::size_t>(i)].step(m.velocity, delivered[static_cast<std::size_t>(i)],
                                                                 rel, desired);
            }
        }

        // Resolve what feeds the controller.
        std::vector<Vec> positioning(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            positioning[static_cast<std::size_t>(i)] =
                cfg.positioning == PositioningSource::kEstimator
                    ? estimators[static_cast<std::size_t>(i)].state().xhat
                    : delivered[static_cast<std::size_t>(i)];
        }

        // Gain-tuning resilient operation.
        if (cfg.tuning.enabled && k >= tuning_step) {
            for (int i = 0; i < n; ++i) {
                gains.kappa_g(i) =
                    tune_gain(gains.kappa_g(i), est_results[static_cast<std::size_t>(i)].beta,
                              cfg.tuning.params, gains.kappa_g_lower, gains.kappa_g_upper,
                              cfg.dt);
            }
        }

        // Control.
        std::vector<Vec> inputs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            inputs[static_cast<std::size_t>(i)] =
                control_input(i, t, meas[static_cast<std::size_t>(i)],
                              positioning[static_cast<std::size_t>(i)], plan, graph, gains);
        }

        // Metrics and logging from ground truth.
        std::vector<Vec> xtilde(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            xtilde[static_cast<std::size_t>(i)] = errors[static_cast<std::size_t>(i)].xtilde;
        }
        StepRecord rec;
        rec.t = t;
        rec.perf_index = performance_index(xtilde, graph, cfg.metrics);
        rec.agents.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto& a = rec.agents[static_cast<std::size_t>(i)];
            a.position = states[static_cast<std::size_t>(i)].position;
            a.velocity = states[static_cast<std::size_t>(i)].velocity;
            a.input = inputs[static_cast<std::size_t>(i)];
            a.positioning = cfg.estimator.enabled
                                ? estimators[static_cast<std::size_t>(i)].state().xhat
                                : positioning[static_cast<std::size_t>(i)];
            a.cov_diagonal =
                cfg.estimator.enabled
                    ? Vec(estimators[static_cast<std::size_t>(i)].state().covariance().diagonal())
                    : Vec(Vec::Zero(dim));
            a.beta = est_results[static_cast<std::size_t>(i)].beta;
            a.d_kl = est_results[static_cast<std::size_t>(i)].d_kl;
            a.kappa_g = gains.kappa_g(i);
            a.estimator_mode = static_cast<int>(est_results[static_cast<std::size_t>(i)].mode);
            a.tracking_error = xtilde[static_cast<std::size_t>(i)].norm();
            a.mean_local_error = mean_local_error(xtilde, graph, i);
        }
        log.steps.push_back(std::move(rec));

        if (k < steps) {
            states = step(states, inputs, cfg.dt, t);
        }
    }
    return log;
}

/// Per-run summary with the headline metrics.
inline Json summarize_run(const RunLog& log, const ScenarioConfig& cfg) {
    Json s;
    s["name"] = cfg.name;
    s["config_hash"] = log.config_hash;
    s["seed"] = log.seed;
    s["agent_count"] = log.agent_count;
    s["duration"] = cfg.duration;
    s["dt"] = cfg.dt;

    const auto perf = log.perf_series();
    double min_i = perf.empty() ? 1.0 : perf.front();
    for (double v : perf) min_i = std::min(min_i, v);
    s["final_perf_index"] = perf.empty() ? 1.0 : perf.back();
    s["min_perf_index"] = min_i;

    double max_err = 0.0;
    for (const auto& rec : log.steps) {
        for (const auto& a : rec.agents) max_err = std::max(max_err, a.tracking_error);
    }
    s["max_tracking_error"] = max_err;

    double first_attack = std::numeric_limits<double>::infinity();
    for (const auto& a : cfg.attacks) {
        if (a.mode != AttackMode::kNone) first_attack = std::min(first_attack, a.t_start);
    }
    if (std::isfinite(first_attack)) {
        s["attack_onset"] = first_attack;
        if (!log.steps.empty() && first_attack <= log.steps.back().t + 1e-9) {
            const auto res = restoration(log.times(), perf, first_attack, cfg.metrics);
            s["restoration"] = {{"recovered", res.recovered}};
            if (res.recovered) {
                s["restoration"]["R_s"] = res.restoration;
                s["restoration"]["t_r"] = *res.recovery_time;
            } else {
                s["restoration"]["R_s"] = nullptr;
                s["restoration"]["t_r"] = nullptr;
            }
        }
    }
    return s;
}

/// One override set applied to a base config document.
struct SweepOverride {
    std::string name;
    Json set;  // dotted.path -> value
};

namespace detail {

inline void apply_override_path(Json& doc, const std::string& dotted, const Json& value) {
    Json* node = &doc;
    std::string rest = dotted;
    while (true) {
        const auto dot = rest.find('.');
        const std::string key = rest.substr(0, dot);
        const bool last = dot == std::string::npos;
        Json* next = nullptr;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(key);
            } catch (const std::exception&) {
                throw ConfigError("override path '" + dotted + "' indexes an array with '" +
                                  key + "'");
            }
            if (idx >= node->size()) {
                throw ConfigError("override path '" + dotted + "' is out of range");
            }
            next = &(*node)[idx];
        } else if (node->is_object()) {
            next = &(*node)[key];  // creates the key when absent
        } else {
            throw ConfigError("override path '" + dotted + "' descends into a scalar");
        }
        if (last) {
            *next = value;
            return;
        }
        node = next;
        rest = rest.substr(dot + 1);
    }
}

}  // namespace detail

/// Parses the sweep spec: {"runs": [{"name": ..., "set": {path: value}}, ...]}.
inline std::vector<SweepOverride> parse_sweep_spec(const Json& spec) {
    if (!spec.is_object() || !spec.contains("runs") || !spec.at("runs").is_array()) {
        throw ConfigError("sweep spec must be an object with a 'runs' array");
    }
    std::vector<SweepOverride> out;
    std::size_t k = 0;
    for (const auto& r : spec.at("runs")) {
        detail::reject_unknown_keys(r, {"name", "set"}, "runs[" + std::to_string(k) + "].");
        SweepOverride o;
        o.name = r.contains("name") ? r.at("name").get<std::string>()
                                    : "run" + std::to_string(k);
        o.set = r.contains("set") ? r.at("set") : Json::object();
        out.push_back(std::move(o));
        ++k;
    }
    return out;
}

/// Runs every override set against the base document. Empty list = one base
/// run. Each run gets an RNG stream derived from (base seed, run index) unless
/// the override pins the seed itself. Per-run failures are collected into the
/// summaries, not propagated. When a run contains attacks and shares the base
/// run's grid, its summary also carries the modified restoration against the
/// base run as the attack-free reference.
inline std::vector<Json> run_sweep(const Json& base_doc,
                                   const std::vector<SweepOverride>& overrides, int jobs = 1) {
    std::vector<SweepOverride> runs = overrides;
    if (runs.empty()) runs.push_back({"base", Json::object()});

    const std::uint64_t base_seed =
        base_doc.contains("seed") ? base_doc.at("seed").get<std::uint64_t>() : 0;

    // Reference series for the degradation measure: the base config as-is.
    std::vector<double> ref_t, ref_perf;
    try {
        const auto base_cfg = ScenarioConfig::from_json(base_doc);
        const auto base_log = run_scenario(base_cfg);
        ref_t = base_log.times();
        ref_perf = base_log.perf_series();
    } catch (const std::exception&) {
        // No reference; summaries simply omit the comparison.
    }

    std::vector<Json> summaries(runs.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= runs.size()) return;
            Json doc = base_doc;
            try {
                for (const auto& [path, value] : runs[idx].set.items()) {
                    detail::apply_override_path(doc, path, value);
                }
                if (!runs[idx].set.contains("seed") && overrides.size() > 1) {
                    doc["seed"] = derive_run_seed(base_seed, idx);
                }
                ScenarioConfig cfg = ScenarioConfig::from_json(doc);
                if (cfg.name.empty()) cfg.name = runs[idx].name;
                const RunLog log = run_scenario(cfg);
                summaries[idx] = summarize_run(log, cfg);
                summaries[idx]["name"] = runs[idx].name;

                if (!ref_t.empty() && summaries[idx].contains("attack_onset")) {
                    const auto t = log.times();
                    const double onset = summaries[idx]["attack_onset"].get<double>();
                    if (t.size() == ref_t.size() && onset < t.back()) {
                        summaries[idx]["modified_restoration"] = modified_restoration(
                            t, ref_perf, log.perf_series(), onset, t.back());
                    }
                }
            } catch (const std::exception& e) {
                summaries[idx] = {{"name", runs[idx].name}, {"error", e.what()}};
            }
        }
    };

    if (jobs <= 1 || runs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int threads = std::min<int>(jobs, static_cast<int>(runs.size()));
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return summaries;
}

}  // namespace rft
