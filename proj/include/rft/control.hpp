#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "rft/dynamics.hpp"
#include "rft/errors.hpp"
#include "rft/formation.hpp"
#include "rft/graph.hpp"

namespace rft {

/// Formation tracking gains. kappa_g is per agent and may be regulated online
/// within [kappa_g_lower, kappa_g_upper]; sigma_f is one SPD matrix per agent.
struct ControllerGains {
    double kappa_f = 0.0;
    Vec kappa_g;
    std::vector<Mat> sigma_f;
    double kappa_g_lower = 0.0;
    double kappa_g_upper = 0.0;

    static ControllerGains uniform(int agent_count, int dimension, double kappa_f,
                                   double kappa_g, double sigma_f_scale,
                                   double kappa_g_lower = 0.0, double kappa_g_upper = -1.0) {
        ControllerGains g;
        g.kappa_f = kappa_f;
        g.kappa_g = Vec::Constant(agent_count, kappa_g);
        g.sigma_f.assign(static_cast<std::size_t>(agent_count),
                         sigma_f_scale * Mat::Identity(dimension, dimension));
        g.kappa_g_lower = kappa_g_lower;
        g.kappa_g_upper = kappa_g_upper < 0.0 ? kappa_g : kappa_g_upper;
        g.validate();
        return g;
    }

    void validate() const {
        if (kappa_f < 0.0) {
            throw ConfigError("kappa_f must be non-negative");
        }
        if ((kappa_g.array() < 0.0).any()) {
            throw ConfigError("kappa_g must be non-negative");
        }
        if (kappa_g_lower < 0.0 || kappa_g_upper < kappa_g_lower) {
            throw ConfigError("kappa_g projection bounds must satisfy 0 <= lower <= upper");
        }
        for (Eigen::Index i = 0; i < kappa_g.size(); ++i) {
            if (kappa_g(i) < kappa_g_lower || kappa_g(i) > kappa_g_upper) {
                throw ConfigError("kappa_g outside projection bounds");
            }
        }
        if (static_cast<Eigen::Index>(sigma_f.size()) != kappa_g.size()) {
            throw ConfigError("one sigma_f matrix per agent required");
        }
        for (const auto& s : sigma_f) {
            if (!s.isApprox(s.transpose(), 1e-12)) {
                throw ConfigError("sigma_f must be symmetric");
            }
            Eigen::LLT<Mat> llt(s);
            if (llt.info() != Eigen::Success) {
                throw ConfigError("sigma_f must be positive definite");
            }
        }
    }
};

/// Gain-tuning law parameters: kappa_g rate gamma, sharpness sigma_beta, and
/// trigger threshold chi_beta in (0, 1].
struct TuningParams {
    double gamma = 1.0;
    double sigma_beta = 3.0;
    double chi_beta = 0.5;

    void validate() const {
        if (gamma <= 0.0 || sigma_beta <= 0.0 || chi_beta <= 0.0 || chi_beta > 1.0) {
            throw ConfigError("tuning parameters must be positive with chi_beta in (0, 1]");
        }
    }
};

/// Ground-truth tracking diagnostics for one agent.
struct TrackingErrors {
    Vec xtilde;      // x_i - h_i^d
    Vec xtilde_dot;  // \dot x_i - \dot h_i^d
    Vec e;           // sum_j w_ji (xtilde_i - xtilde_j)
    Vec xi;          // xtilde_dot + kappa_g,i xtilde + kappa_f e
};

/// Tracking errors for all agents from true states.
inline std::vector<TrackingErrors> compute_tracking_errors(const std::vector<AgentState>& states,
                                                           const FormationPlan& plan,
                                                           const SensoryGraph& graph,
                                                           const ControllerGains& gains,
                                                           double t) {
    const int n = graph.agent_count();
    std::vector<TrackingErrors> errs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto d = plan.desired_state(i, t);
        errs[static_cast<std::size_t>(i)].xtilde = states[static_cast<std::size_t>(i)].position - d.pos;
        errs[static_cast<std::size_t>(i)].xtilde_dot =
            states[static_cast<std::size_t>(i)].velocity - d.vel;
    }
    for (int i = 0; i < n; ++i) {
        auto& ei = errs[static_cast<std::size_t>(i)];
        ei.e = Vec::Zero(plan.dimension());
        for (int j : graph.neighbors(i)) {
            ei.e += graph.weight(j, i) * (ei.xtilde - errs[static_cast<std::size_t>(j)].xtilde);
        }
        ei.xi = ei.xtilde_dot + gains.kappa_g(i) * ei.xtilde + gains.kappa_f * ei.e;
    }
    return errs;
}

/// Local formation tracking command
///   f_i^l = sum_j w_ji (rdot_ji - hdot_ji^d) + sigma_f,i sum_j w_ji (r_ji - h_ji^d)
/// built from this agent's relative measurements.
inline Vec local_term(const Measurements& meas, const FormationPlan& plan,
                      const SensoryGraph& graph, const ControllerGains& gains, int i, double t) {
    Vec vel_sum = Vec::Zero(plan.dimension());
    Vec pos_sum = Vec::Zero(plan.dimension());
    for (int j : graph.neighbors(i)) {
        const auto disp_it = meas.rel_disp.find(j);
        const auto vel_it = meas.rel_vel.find(j);
        if (disp_it == meas.rel_disp.end() || vel_it == meas.rel_vel.end()) {
            throw ConfigError("missing relative measurement for neighbor " + std::to_string(j));
        }
        const auto desired = plan.desired_displacement(i, j, t);
        const double w = graph.weight(j, i);
        vel_sum += w * (vel_it->second - desired.vel);
        pos_sum += w * (disp_it->second - desired.pos);
    }
    return vel_sum + gains.sigma_f[static_cast<std::size_t>(i)] * pos_sum;
}

/// Global tracking command f_i^g = (xdot_i - hdot_i^d) + sigma_f,i (x_i^used - h_i^d),
/// where x_i^used is whatever positioning source feeds the controller.
inline Vec global_term(const Vec& measured_velocity, const Vec& positioning,
                       const FormationPlan& plan, const ControllerGains& gains, int i, double t) {
    const auto d = plan.desired_state(i, t);
    return (measured_velocity - d.vel) +
           gains.sigma_f[static_cast<std::size_t>(i)] * (positioning - d.pos);
}

/// Full control input
///   u_i = hddot_i^d - sigma_f,i (xdot_i - hdot_i^d) - kappa_g,i f_i^g - kappa_f f_i^l.
inline Vec control_input(int i, double t, const Measurements& meas, const Vec& positioning,
                         const FormationPlan& plan, const SensoryGraph& graph,
                         const ControllerGains& gains) {
    const auto d = plan.desired_state(i, t);
    const Vec f_l = local_term(meas, plan, graph, gains, i, t);
    const Vec f_g = global_term(meas.velocity, positioning, plan, gains, i, t);
    return d.acc - gains.sigma_f[static_cast<std::size_t>(i)] * (meas.velocity - d.vel) -
           gains.kappa_g(i) * f_g - gains.kappa_f * f_l;
}

/// One explicit-Euler step of kappa_g' = gamma tanh(sigma_beta (beta - chi_beta)),
/// projected onto [kappa_g_lower, kappa_g_upper].
inline double tune_gain(double kappa_g, double beta, const TuningParams& params,
                        double kappa_g_lower, double kappa_g_upper, double dt) {
    const double rate = params.gamma * std::tanh(params.sigma_beta * (beta - params.chi_beta));
    return std::clamp(kappa_g + rate * dt, kappa_g_lower, kappa_g_upper);
}

/// Per-agent Lyapunov value V_i = xi^T sigma_f,i^{-1} xi / 2.
inline double lyapunov_value(const Vec& xi, const Mat& sigma_f) {
    return 0.5 * xi.dot(sigma_f.llt().solve(xi));
}

}  // namespace rft
