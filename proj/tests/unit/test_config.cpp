#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "rft/config.hpp"

using namespace rft;

namespace {

Json minimal_config() {
    Json j;
    j["dimension"] = 2;
    j["duration"] = 1.0;
    j["dt"] = 0.01;
    j["seed"] = 3;
    j["graph"] = {{"edges", Json::array({Json::array({0, 1, 1.0}), Json::array({1, 2, 1.0}),
                                         Json::array({2, 0, 1.0})})}};
    Json agents = Json::array();
    for (int i = 0; i < 3; ++i) {
        agents.push_back({{"keyframes", Json::array({Json{{"t", 0.0},
                                                          {"offset", {1.0 * i, 0.0}}}})}});
    }
    j["formation"] = {{"global_trajectory", {{"type", "constant"}, {"point", {0.0, 0.0}}}},
                      {"agents", agents}};
    j["gains"] = {{"kappa_f", 2.0}, {"kappa_g", 2.0}, {"sigma_f", 1.0}};
    return j;
}

std::string scenario_path(const std::string& name) {
    return std::string(RFT_SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("all bundled scenarios parse and validate") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(RFT_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().string());
        const auto cfg = ScenarioConfig::from_file(entry.path().string());
        CHECK(cfg.agent_count == 6);
        CHECK(cfg.dt == 0.01);
        ++count;
    }
    CHECK(count >= 14);
}

TEST_CASE("minimal config round-trips") {
    const auto cfg = ScenarioConfig::from_json(minimal_config());
    CHECK(cfg.agent_count == 3);
    CHECK(cfg.gains.kappa_g == Vec::Constant(3, 2.0));
    CHECK(cfg.gains.sigma_f.size() == 3);
    CHECK_FALSE(cfg.estimator.enabled);
    CHECK_FALSE(cfg.tuning.enabled);
    CHECK(cfg.positioning == PositioningSource::kRaw);
    CHECK(cfg.step_count() == 100);
}

TEST_CASE("unknown keys are rejected with their path") {
    auto j = minimal_config();
    j["grains"] = 1;
    CHECK_THROWS_WITH(ScenarioConfig::from_json(j), Catch::Matchers::ContainsSubstring("grains"));

    j = minimal_config();
    j["gains"]["kappa_q"] = 1.0;
    CHECK_THROWS_WITH(ScenarioConfig::from_json(j),
                      Catch::Matchers::ContainsSubstring("gains.kappa_q"));

    j = minimal_config();
    j["formation"]["agents"][0]["keyframes"][0]["offsets"] = Json::array({0.0, 0.0});
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
}

TEST_CASE("grid-aligned event times are accepted") {
    auto j = minimal_config();
    j["attacks"] = Json::array({Json{{"agent", 0},
                                     {"mode", "additive"},
                                     {"bias", {1.0, 0.0}},
                                     {"t_start", 0.51}}});
    CHECK_NOTHROW(ScenarioConfig::from_json(j));
}

TEST_CASE("off-grid event times are rejected") {
    auto j = minimal_config();
    j["attacks"] = Json::array({Json{{"agent", 0},
                                     {"mode", "additive"},
                                     {"bias", {1.0, 0.0}},
                                     {"t_start", 0.5053}}});
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

    j = minimal_config();
    j["duration"] = 1.0037;
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

    j = minimal_config();
    j["tuning"] = {{"enabled", true}, {"activation_time", 0.123456}};
    j["estimator"] = {{"enabled", true}};
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
}

TEST_CASE("cross-field requirements") {
    auto j = minimal_config();
    j["positioning_source"] = "estimator";  // but no estimator section
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

    j = minimal_config();
    j["tuning"] = {{"enabled", true}};  // tuning needs the estimator's beta
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

    j = minimal_config();
    j["graph"]["edges"].push_back(Json::array({0, 9, 1.0}));
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

    j = minimal_config();
    j["attacks"] = Json::array({Json{{"agent", 0},
                                     {"mode", "additive"},
                                     {"delta", 2.0},  // additive must keep delta = 1
                                     {"bias", {1.0, 0.0}},
                                     {"t_start", 0.5}}});
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
}

TEST_CASE("config hash tracks semantic fields only") {
    const auto base = ScenarioConfig::from_json(minimal_config());

    auto renamed = minimal_config();
    renamed["name"] = "some cosmetic label";
    CHECK(ScenarioConfig::from_json(renamed).hash() == base.hash());

    auto changed = minimal_config();
    changed["gains"]["kappa_f"] = 2.5;
    CHECK(ScenarioConfig::from_json(changed).hash() != base.hash());

    auto seeded = minimal_config();
    seeded["seed"] = 4;
    CHECK(ScenarioConfig::from_json(seeded).hash() != base.hash());

    // Defaults materialize identically whether written out or omitted.
    auto explicit_defaults = minimal_config();
    explicit_defaults["noise"] = {{"velocity_std", 0.0}};
    explicit_defaults["positioning_source"] = "raw";
    CHECK(ScenarioConfig::from_json(explicit_defaults).hash() == base.hash());
}

TEST_CASE("bundled scenario values match their sources") {
    const auto cfg = ScenarioConfig::from_file(scenario_path("sim_tracking_noattack.json"));
    CHECK(cfg.gains.kappa_f == 2.0);
    CHECK(cfg.gains.kappa_g == Vec::Constant(6, 2.0));
    CHECK(cfg.metrics.vartheta == 10.0);
    CHECK(cfg.metrics.alpha == 5.0);
    CHECK(cfg.duration == 45.0);

    const auto resilient =
        ScenarioConfig::from_file(scenario_path("sim_resilient_gain_tuning.json"));
    CHECK(resilient.estimator.chi == 5.0);
    CHECK(resilient.tuning.params.gamma == 1.0);
    CHECK(resilient.tuning.params.sigma_beta == 3.0);
    CHECK(resilient.tuning.params.chi_beta == 0.5);
    CHECK(resilient.tuning.activation_time == 10.0);
    CHECK(resilient.attacks.size() == 2);
    CHECK(resilient.attacks[0].t_start == 15.0);
    CHECK(resilient.attacks[0].t_end == 30.0);
    CHECK(resilient.attacks[1].t_start == 25.0);
    CHECK(resilient.attacks[1].t_end == 40.0);

    const auto stationary =
        ScenarioConfig::from_file(scenario_path("exp_stationary_noattack.json"));
    CHECK(stationary.dimension == 3);
    CHECK(stationary.estimator.chi == 4000.0);
    CHECK(stationary.estimator.process_std == 0.02);
    CHECK(stationary.estimator.gps_std == 5e-4);
    CHECK(stationary.gains.kappa_g == Vec::Constant(6, 0.8));
    CHECK(stationary.metrics.vartheta == 20.0);
    CHECK(stationary.metrics.alpha == 3.0);
}

TEST_CASE("sigma_f accepts scalars, per-agent scalars, and full matrices") {
    auto j = minimal_config();
    j["gains"]["sigma_f"] = Json::array({0.5, 1.0, 2.0});
    auto cfg = ScenarioConfig::from_json(j);
    CHECK(cfg.gains.sigma_f[0] == 0.5 * Mat::Identity(2, 2));
    CHECK(cfg.gains.sigma_f[2] == 2.0 * Mat::Identity(2, 2));

    j["gains"]["sigma_f"] = Json::array({Json::array({2.0, 0.5}), Json::array({0.5, 1.0})});
    cfg = ScenarioConfig::from_json(j);
    Mat expected(2, 2);
    expected << 2.0, 0.5, 0.5, 1.0;
    CHECK(cfg.gains.sigma_f[1] == expected);

    // Asymmetric or indefinite matrices are rejected.
    j["gains"]["sigma_f"] = Json::array({Json::array({1.0, 0.5}), Json::array({0.0, 1.0})});
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j["gains"]["sigma_f"] = Json::array({Json::array({1.0, 2.0}), Json::array({2.0, 1.0})});
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
}

TEST_CASE("negative seeds are rejected") {
    auto j = minimal_config();
    j["seed"] = -5;
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
}

TEST_CASE("missing file raises an io error") {
    CHECK_THROWS_AS(ScenarioConfig::from_file("/nonexistent/nope.json"), IoError);
}
