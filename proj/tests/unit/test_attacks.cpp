#include <catch2/catch_amalgamated.hpp>

#include "rft/attacks.hpp"

using namespace rft;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

}  // namespace

TEST_CASE("no attack passes the signal through") {
    AttackSpec spec;
    spec.mode = AttackMode::kNone;
    const Vec x = v2(1.5, -0.5);
    CHECK(apply_attack(spec, x, v2(9, 9), 12.0) == x);
}

TEST_CASE("additive attack adds the configured bias inside its window") {
    AttackSpec spec;
    spec.agent = 0;
    spec.mode = AttackMode::kAdditive;
    spec.bias.constant = v3(-1.5, -2.5, -1.0);
    spec.t_start = 15.0;
    spec.validate(6, 3);

    const Vec x = v3(0.2, 0.1, 0.9);
    CHECK(apply_attack(spec, x, Vec::Zero(3), 14.999) == x);
    CHECK((apply_attack(spec, x, Vec::Zero(3), 15.0) - (x + spec.bias.constant)).norm() == 0.0);
    CHECK((apply_attack(spec, x, Vec::Zero(3), 300.0) - (x + spec.bias.constant)).norm() == 0.0);
}

TEST_CASE("hybrid attack applies delta x + Delta") {
    AttackSpec spec;
    spec.mode = AttackMode::kHybrid;
    spec.delta = 2.0;
    spec.bias.constant = v2(-2.0, -2.0);
    spec.t_start = 15.0;
    spec.validate(6, 2);

    // delta = 2, Delta = [-2,-2], x = [1,1]  ->  [0,0].
    CHECK(apply_attack(spec, v2(1.0, 1.0), Vec::Zero(2), 20.0).norm() == 0.0);
}

TEST_CASE("unstable attack is inert at exact equilibrium") {
    AttackSpec spec;
    spec.mode = AttackMode::kUnstable;
    spec.c_a = 5.0;
    spec.t_start = 0.0;
    spec.validate(6, 2);

    const Vec x = v2(0.4, 0.4);
    CHECK(apply_attack(spec, x, Vec::Zero(2), 1.0) == x);
    CHECK((apply_attack(spec, x, v2(0.1, 0.0), 1.0) - (x - v2(0.5, 0.0))).norm() <= 1e-15);
}

TEST_CASE("windows are half-open") {
    AttackSpec spec;
    spec.mode = AttackMode::kAdditive;
    spec.bias.constant = v2(1.0, 0.0);
    spec.t_start = 15.0;
    spec.t_end = 30.0;

    const Vec x = v2(0.0, 0.0);
    CHECK(apply_attack(spec, x, x, 15.0) == v2(1.0, 0.0));
    CHECK(apply_attack(spec, x, x, 29.999999) == v2(1.0, 0.0));
    CHECK(apply_attack(spec, x, x, 30.0) == x);
}

TEST_CASE("time-varying bias supports sinusoids") {
    AttackSpec spec;
    spec.mode = AttackMode::kAdditive;
    spec.bias.constant = v2(1.0, 0.0);
    spec.bias.sinusoids.push_back({1, 2.0, M_PI, 0.0});
    spec.t_start = 0.0;
    spec.validate(3, 2);

    const Vec got = apply_attack(spec, Vec::Zero(2), Vec::Zero(2), 0.5);
    CHECK(got(0) == 1.0);
    CHECK(got(1) == Catch::Approx(2.0 * std::sin(M_PI * 0.5)).margin(1e-15));
}

TEST_CASE("attack validation enforces the taxonomy") {
    AttackSpec additive;
    additive.mode = AttackMode::kAdditive;
    additive.delta = 2.0;  // additive requires delta = 1
    additive.bias.constant = v2(0, 0);
    CHECK_THROWS_AS(additive.validate(6, 2), ConfigError);

    AttackSpec hybrid;
    hybrid.mode = AttackMode::kHybrid;
    hybrid.delta = 1.0;  // hybrid requires delta != 1
    hybrid.bias.constant = v2(0, 0);
    CHECK_THROWS_AS(hybrid.validate(6, 2), ConfigError);

    AttackSpec bad_window;
    bad_window.mode = AttackMode::kAdditive;
    bad_window.bias.constant = v2(0, 0);
    bad_window.t_start = 10.0;
    bad_window.t_end = 10.0;
    CHECK_THROWS_AS(bad_window.validate(6, 2), ConfigError);

    AttackSpec bad_agent;
    bad_agent.agent = 6;
    bad_agent.mode = AttackMode::kUnstable;
    bad_agent.c_a = 1.0;
    CHECK_THROWS_AS(bad_agent.validate(6, 2), ConfigError);
}

TEST_CASE("overlapping windows on one agent are rejected") {
    AttackSpec a;
    a.agent = 1;
    a.mode = AttackMode::kAdditive;
    a.bias.constant = v2(1, 1);
    a.t_start = 10.0;
    a.t_end = 20.0;
    AttackSpec b = a;
    b.t_start = 19.0;
    b.t_end = 25.0;
    CHECK_THROWS_AS(validate_attack_list({a, b}, 6, 2), ConfigError);

    b.t_start = 20.0;  // touching windows are fine (half-open)
    CHECK_NOTHROW(validate_attack_list({a, b}, 6, 2));

    b.agent = 2;  // different agents may overlap
    b.t_start = 15.0;
    CHECK_NOTHROW(validate_attack_list({a, b}, 6, 2));
}
