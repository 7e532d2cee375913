#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "rft/errors.hpp"
#include "rft/formation.hpp"
#include "rft/graph.hpp"

namespace rft {

enum class AttackMode { kNone, kAdditive, kHybrid, kUnstable };

/// Additive bias signal Delta_x(t): a constant vector plus optional sinusoids.
struct BiasSignal {
    Vec constant;
    std::vector<SinusoidTerm> sinusoids;

    Vec at(double t) const {
        Vec v = constant;
        for (const auto& s : sinusoids) {
            v(s.axis) += s.amplitude * std::sin(s.omega * t + s.phase);
        }
        return v;
    }
};

/// One deception attack on one agent's global positioning channel, active on
/// the half-open window [t_start, t_end).
///
///   additive:  xhat^g = x + Delta(t)          (delta fixed at 1)
///   hybrid:    xhat^g = delta x + Delta(t)    (delta != 1)
///   unstable:  xhat^g = x - c_a xi            (xi from ground truth)
struct AttackSpec {
    int agent = 0;
    AttackMode mode = AttackMode::kNone;
    double delta = 1.0;
    BiasSignal bias;
    double c_a = 0.0;
    double t_start = 0.0;
    double t_end = std::numeric_limits<double>::infinity();

    void validate(int agent_count, int dimension) const {
        if (agent < 0 || agent >= agent_count) {
            throw ConfigError("attack references agent index out of range");
        }
        if (t_start < 0.0 || t_end <= t_start) {
            throw ConfigError("attack window must satisfy 0 <= t_start < t_end");
        }
        if (mode == AttackMode::kAdditive && delta != 1.0) {
            throw ConfigError("additive attack requires delta = 1");
        }
        if (mode == AttackMode::kHybrid && delta == 1.0) {
            throw ConfigError("hybrid attack requires delta != 1");
        }
        if ((mode == AttackMode::kAdditive || mode == AttackMode::kHybrid) &&
            bias.constant.size() != dimension) {
            throw ConfigError("attack bias dimension mismatch");
        }
        for (const auto& s : bias.sinusoids) {
            if (s.axis < 0 || s.axis >= dimension) {
                throw ConfigError("attack bias sinusoid axis out of range");
            }
        }
    }

    bool active(double t) const {
        return mode != AttackMode::kNone && t >= t_start && t < t_end;
    }
};

/// The attack formula alone, with no window gating. xi is the target's
/// composite tracking error, supplied from ground truth (the attacker is
/// modeled as omniscient).
inline Vec attack_formula(const AttackSpec& spec, const Vec& x, const Vec& xi, double t) {
    switch (spec.mode) {
        case AttackMode::kAdditive:
            return x + spec.bias.at(t);
        case AttackMode::kHybrid:
            return spec.delta * x + spec.bias.at(t);
        case AttackMode::kUnstable:
            return x - spec.c_a * xi;
        case AttackMode::kNone:
            break;
    }
    return x;
}

/// Applies one attack to the positioning signal of its target agent. Outside
/// the active window the signal passes through unchanged. The simulation loop
/// gates windows by step index instead, so coarse grids cannot shift an event
/// by one step through rounding.
inline Vec apply_attack(const AttackSpec& spec, const Vec& x, const Vec& xi, double t) {
    return spec.active(t) ? attack_formula(spec, x, xi, t) : x;
}

/// Validates that no two attacks on the same agent have overlapping windows.
inline void validate_attack_list(const std::vector<AttackSpec>& attacks, int agent_count,
                                 int dimension) {
    for (const auto& a : attacks) {
        a.validate(agent_count, dimension);
    }
    for (std::size_t i = 0; i < attacks.size(); ++i) {
        for (std::size_t j = i + 1; j < attacks.size(); ++j) {
            if (attacks[i].agent != attacks[j].agent) continue;
            const bool disjoint = attacks[i].t_end <= attacks[j].t_start ||
                                  attacks[j].t_end <= attacks[i].t_start;
            if (!disjoint) {
                throw ConfigError("attack windows on agent " + std::to_string(attacks[i].agent) +
                                  " overlap");
            }
        }
    }
}

}  // namespace rft
