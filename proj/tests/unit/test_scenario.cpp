#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "rft/run_log.hpp"
#include "rft/scenario.hpp"

using namespace rft;

namespace {

std::string scenario_path(const std::string& name) {
    return std::string(RFT_SCENARIO_DIR) + "/" + name;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    Json j;
    in >> j;
    return j;
}

/// Bundled resilient scenario shortened for unit-test runtimes.
ScenarioConfig short_resilient_config(double duration) {
    auto doc = load_json(scenario_path("sim_resilient_gain_tuning.json"));
    doc["duration"] = duration;
    return ScenarioConfig::from_json(doc);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("runner produces the declared record count with monotone time") {
    auto cfg = short_resilient_config(2.0);
    const auto log = run_scenario(cfg);
    CHECK(log.steps.size() == 201);  // duration / dt + 1
    for (std::size_t k = 1; k < log.steps.size(); ++k) {
        CHECK(log.steps[k].t > log.steps[k - 1].t);
    }
    CHECK(log.agent_count == 6);
    CHECK(log.steps.back().t == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("identical config and seed give identical logs, different seeds differ") {
    auto cfg = short_resilient_config(1.5);
    const auto a = run_scenario(cfg);
    const auto b = run_scenario(cfg);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        for (int i = 0; i < 6; ++i) {
            CHECK(a.steps[k].agents[i].position == b.steps[k].agents[i].position);
            CHECK(a.steps[k].agents[i].input == b.steps[k].agents[i].input);
            CHECK(a.steps[k].agents[i].d_kl == b.steps[k].agents[i].d_kl);
        }
    }

    auto other = cfg;
    other.seed = cfg.seed + 1;
    const auto c = run_scenario(other);
    bool any_diff = false;
    for (std::size_t k = 0; k < a.steps.size() && !any_diff; ++k) {
        for (int i = 0; i < 6; ++i) {
            if (a.steps[k].agents[i].position != c.steps[k].agents[i].position) {
                any_diff = true;
                break;
            }
        }
    }
    CHECK(any_diff);
}

TEST_CASE("csv round trip preserves the log") {
    auto cfg = short_resilient_config(0.5);
    const auto log = run_scenario(cfg);
    const auto path = std::filesystem::temp_directory_path() / "rft_test_log.csv";
    write_csv(log, path.string());

    const auto csv = CsvLog::read(path.string());
    CHECK(csv.config_hash() == log.config_hash);
    CHECK(csv.seed() == log.seed);
    CHECK(csv.row_count() == log.steps.size());
    CHECK(csv.agent_count() == 6);

    const auto t = csv.column("t");
    const auto perf = csv.column("perf_index");
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(t[k] == Catch::Approx(log.steps[k].t).margin(1e-9));
        CHECK(perf[k] == Catch::Approx(log.steps[k].perf_index).epsilon(1e-10));
    }
    CHECK(csv.column("x0_0").size() == log.steps.size());
    CHECK_THROWS_AS(csv.column("no_such_column"), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("csv writing is byte-stable across runs") {
    auto cfg = short_resilient_config(0.5);
    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = dir / "rft_bytes_a.csv";
    const auto p2 = dir / "rft_bytes_b.csv";
    write_csv(run_scenario(cfg), p1.string());
    write_csv(run_scenario(cfg), p2.string());
    CHECK(read_file(p1.string()) == read_file(p2.string()));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("controller at step k consumes step-k measurements and estimates") {
    // Noiseless run with the estimator feeding the controller: rebuilding the
    // control input from the logged state, estimate, and gains of the same
    // step must reproduce the logged input exactly.
    auto doc = load_json(scenario_path("sim_resilient_cl_recovery.json"));
    doc["duration"] = 1.0;
    doc["noise"] = {{"velocity_std", 0.0}, {"gps_std", 0.0}, {"relative_std", 0.0}};
    const auto cfg = ScenarioConfig::from_json(doc);
    const auto log = run_scenario(cfg);

    const auto graph = cfg.make_graph();
    const auto plan = cfg.make_plan();
    ControllerGains gains = cfg.gains;
    NoiseConfig no_noise = NoiseConfig::zero(cfg.dimension);
    std::mt19937_64 rng(0);

    for (std::size_t k : {std::size_t(10), std::size_t(55), std::size_t(99)}) {
        const auto& rec = log.steps[k];
        std::vector<AgentState> states;
        for (const auto& a : rec.agents) states.push_back({a.position, a.velocity});
        const auto meas = measure(states, graph, no_noise, rng);
        for (int i = 0; i < 6; ++i) {
            gains.kappa_g(i) = rec.agents[i].kappa_g;
        }
        for (int i = 0; i < 6; ++i) {
            const Vec u = control_input(i, rec.t, meas[i], rec.agents[i].positioning, plan,
                                        graph, gains);
            CHECK((u - rec.agents[i].input).norm() <= 1e-12);
        }
    }
}

TEST_CASE("per-step invariants hold along a resilient run") {
    auto cfg = short_resilient_config(20.0);  // covers tuning activation and first attack
    const auto log = run_scenario(cfg);
    for (const auto& s : log.steps) {
        CHECK(s.perf_index > 0.0);
        CHECK(s.perf_index <= 1.0);
        for (const auto& a : s.agents) {
            // Projection bounds hold for all time.
            CHECK(a.kappa_g >= cfg.gains.kappa_g_lower);
            CHECK(a.kappa_g <= cfg.gains.kappa_g_upper);
            CHECK(a.beta >= 0.0);
            CHECK(a.beta <= 1.0);
            CHECK(a.d_kl >= 0.0);
            CHECK((a.estimator_mode >= 0 && a.estimator_mode <= 3));
            CHECK(a.cov_diagonal.minCoeff() > 0.0);
        }
    }
}

TEST_CASE("non-finite inputs surface as a diverged error with context") {
    auto doc = load_json(scenario_path("sim_tracking_noattack.json"));
    doc["duration"] = 1.0;
    doc["initial_conditions"] = {
        {"positions", Json::array({Json::array({1e308, 1e308}), Json::array({0.0, 0.0}),
                                   Json::array({0.0, 0.0}), Json::array({0.0, 0.0}),
                                   Json::array({0.0, 0.0}), Json::array({0.0, 0.0})})}};
    const auto cfg = ScenarioConfig::from_json(doc);
    CHECK_THROWS_AS(run_scenario(cfg), SimulationDivergedError);
}

TEST_CASE("event windows are gated by grid step even on coarse grids") {
    // dt = 0.3 with an attack at t = 0.9: step 3's time rounds to
    // 0.8999999999999999, below the parsed window start, so a raw float
    // comparison would delay the attack by one step.
    auto doc = load_json(scenario_path("sim_tracking_noattack.json"));
    doc["duration"] = 3.0;
    doc["dt"] = 0.3;
    for (auto& agent : doc["formation"]["agents"]) {
        agent["keyframes"] = Json::array({agent["keyframes"][0]});
    }
    doc["attacks"] = Json::array({Json{{"agent", 0},
                                       {"mode", "additive"},
                                       {"bias", {5.0, 5.0}},
                                       {"t_start", 0.9},
                                       {"t_end", 1.8}}});
    const auto cfg = ScenarioConfig::from_json(doc);
    const auto log = run_scenario(cfg);

    auto attacked_positioning = [&](std::size_t k) {
        const auto& a = log.steps[k].agents[0];
        return (a.positioning - a.position).norm() > 1.0;
    };
    CHECK_FALSE(attacked_positioning(2));  // t = 0.6
    CHECK(attacked_positioning(3));        // t = 0.9, window opens here
    CHECK(attacked_positioning(5));        // t = 1.5, last attacked step
    CHECK_FALSE(attacked_positioning(6));  // t = 1.8, half-open end
}

TEST_CASE("every bundled scenario runs to completion") {
    for (const auto& entry : std::filesystem::directory_iterator(RFT_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().string());
        const auto cfg = ScenarioConfig::from_file(entry.path().string());
        const auto log = run_scenario(cfg);
        CHECK(log.steps.size() == static_cast<std::size_t>(cfg.step_count()) + 1);
        const auto summary = summarize_run(log, cfg);
        CHECK(summary.at("min_perf_index").get<double>() > 0.0);
        CHECK(summary.at("final_perf_index").get<double>() <= 1.0);
    }
}

TEST_CASE("summary reports the headline metrics") {
    auto cfg = short_resilient_config(2.0);
    const auto log = run_scenario(cfg);
    const auto s = summarize_run(log, cfg);
    CHECK(s.at("config_hash") == log.config_hash);
    CHECK(s.at("seed") == cfg.seed);
    CHECK(s.contains("final_perf_index"));
    CHECK(s.contains("min_perf_index"));
    CHECK(s.at("attack_onset") == 15.0);
    // Onset lies beyond this shortened horizon, so no restoration record.
    CHECK_FALSE(s.contains("restoration"));

    auto full = short_resilient_config(35.0);
    const auto full_summary = summarize_run(run_scenario(full), full);
    CHECK(full_summary.contains("restoration"));
}

TEST_CASE("sweep applies overrides and isolates per-run failures") {
    auto base = load_json(scenario_path("sim_tracking_noattack.json"));
    base["duration"] = 0.5;

    std::vector<SweepOverride> overrides;
    overrides.push_back({"baseline", Json::object()});
    overrides.push_back({"stiffer", Json{{"gains.kappa_f", 3.0}}});
    overrides.push_back({"broken", Json{{"gains.kappa_f", -1.0}}});

    const auto summaries = run_sweep(base, overrides, 2);
    REQUIRE(summaries.size() == 3);
    CHECK(summaries[0].at("name") == "baseline");
    CHECK_FALSE(summaries[0].contains("error"));
    CHECK_FALSE(summaries[1].contains("error"));
    CHECK(summaries[2].contains("error"));

    // Empty override list runs the base config once with its own seed.
    const auto single = run_sweep(base, {}, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].at("seed") == base.at("seed"));
}

TEST_CASE("sweep summaries compare attacked runs against the base run") {
    auto base = load_json(scenario_path("sim_tracking_noattack.json"));
    base["duration"] = 10.0;

    Json attack = Json::array({Json{{"agent", 0},
                                    {"mode", "additive"},
                                    {"bias", {-2.0, -2.0}},
                                    {"t_start", 5.0}}});
    std::vector<SweepOverride> overrides;
    overrides.push_back({"attack-free", Json{{"seed", 1}}});
    overrides.push_back({"attacked", Json{{"attacks", attack}, {"seed", 1}}});

    const auto summaries = run_sweep(base, overrides, 1);
    REQUIRE(summaries.size() == 2);
    CHECK_FALSE(summaries[0].contains("modified_restoration"));  // no attacks
    REQUIRE(summaries[1].contains("modified_restoration"));
    CHECK(summaries[1].at("modified_restoration").get<double>() > 0.0);
}

TEST_CASE("sweep seeds derive deterministically from the base seed") {
    CHECK(derive_run_seed(1, 0) == derive_run_seed(1, 0));
    CHECK(derive_run_seed(1, 0) != derive_run_seed(1, 1));
    CHECK(derive_run_seed(1, 0) != derive_run_seed(2, 0));
}
