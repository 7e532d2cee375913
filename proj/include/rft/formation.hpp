#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <utility>
#include <variant>
#include <vector>

#include "rft/errors.hpp"
#include "rft/graph.hpp"
#include "rft/jet.hpp"

namespace rft {

/// Position/velocity/acceleration triple of one desired trajectory at one instant.
struct TrajectoryPoint {
    Vec pos;
    Vec vel;
    Vec acc;

    TrajectoryPoint operator+(const TrajectoryPoint& o) const {
        return {pos + o.pos, vel + o.vel, acc + o.acc};
    }
    TrajectoryPoint operator-(const TrajectoryPoint& o) const {
        return {pos - o.pos, vel - o.vel, acc - o.acc};
    }
};

/// A sinusoid acting on a single axis: amplitude * sin(omega*t + phase).
struct SinusoidTerm {
    int axis = 0;
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

/// Fixed point in space; velocity and acceleration are exactly zero.
struct ConstantTrajectory {
    Vec point;
};

/// Figure-eight path of the form
///   x = ax * sin(omega t) / (cos(omega t) - denom_offset)
///   y = ay * cos(omega t / 2) / (cos(omega t) - denom_offset)
///   z = az * cos(omega t) + z_offset            (3-D only)
struct LemniscateTrajectory {
    int dimension = 2;
    double omega = 0.0;
    double ax = 0.0;
    double ay = 0.0;
    double denom_offset = 3.0;
    double az = 0.0;
    double z_offset = 0.0;
};

/// Constant offset plus per-axis sinusoid terms.
struct SinusoidTrajectory {
    Vec offset;
    std::vector<SinusoidTerm> terms;
};

using GlobalTrajectory = std::variant<ConstantTrajectory, LemniscateTrajectory, SinusoidTrajectory>;

/// Offset vector an agent should hold from the given time onward.
struct OffsetKeyframe {
    double t = 0.0;
    Vec offset;
};

/// One agent's time-varying offset from the formation center: a keyframe
/// schedule (blended with a quintic smoothstep so the result stays C2) plus
/// optional sinusoid terms.
struct AgentOffsetSchedule {
    std::vector<OffsetKeyframe> keyframes;  // sorted by t ascending
    std::vector<SinusoidTerm> sinusoids;
};

namespace detail {

inline Jet quintic_smoothstep(const Jet& tau) {
    // 6 tau^5 - 15 tau^4 + 10 tau^3; first and second derivatives vanish at both ends.
    return tau * tau * tau * (Jet(10.0) + tau * (Jet(-15.0) + tau * Jet(6.0)));
}

inline TrajectoryPoint from_jets(const std::vector<Jet>& jets) {
    const auto n = static_cast<Eigen::Index>(jets.size());
    TrajectoryPoint p{Vec(n), Vec(n), Vec(n)};
    for (Eigen::Index d = 0; d < n; ++d) {
        const auto& j = jets[static_cast<std::size_t>(d)];
        p.pos(d) = j.v;
        p.vel(d) = j.d1;
        p.acc(d) = j.d2;
    }
    return p;
}

inline void add_sinusoids(std::vector<Jet>& jets, const std::vector<SinusoidTerm>& terms,
                          const Jet& t) {
    for (const auto& s : terms) {
        jets.at(static_cast<std::size_t>(s.axis)) =
            jets.at(static_cast<std::size_t>(s.axis)) +
            Jet(s.amplitude) * sin(Jet(s.omega) * t + Jet(s.phase));
    }
}

}  // namespace detail

inline TrajectoryPoint evaluate_global(const GlobalTrajectory& traj, int dimension, double t) {
    const Jet tj = Jet::time(t);
    std::vector<Jet> jets(static_cast<std::size_t>(dimension));

    if (const auto* c = std::get_if<ConstantTrajectory>(&traj)) {
        for (int d = 0; d < dimension; ++d) jets[static_cast<std::size_t>(d)] = Jet(c->point(d));
    } else if (const auto* lem = std::get_if<LemniscateTrajectory>(&traj)) {
        const Jet cw = cos(Jet(lem->omega) * tj);
        const Jet denom = cw - Jet(lem->denom_offset);
        jets[0] = Jet(lem->ax) * sin(Jet(lem->omega) * tj) / denom;
        jets[1] = Jet(lem->ay) * cos(Jet(lem->omega * 0.5) * tj) / denom;
        if (dimension == 3) {
            jets[2] = Jet(lem->az) * cw + Jet(lem->z_offset);
        }
    } else {
        const auto& s = std::get<SinusoidTrajectory>(traj);
        for (int d = 0; d < dimension; ++d) jets[static_cast<std::size_t>(d)] = Jet(s.offset(d));
        detail::add_sinusoids(jets, s.terms, tj);
    }
    return detail::from_jets(jets);
}

/// Time-varying desired formation: a global center trajectory h^d(t) and one
/// offset schedule per agent. Immutable after construction.
class FormationPlan {
public:
    FormationPlan(int dimension, GlobalTrajectory global,
                  std::vector<AgentOffsetSchedule> offsets, double transition_window = 5.0)
        : dimension_(dimension),
          global_(std::move(global)),
          offsets_(std::move(offsets)),
          transition_window_(transition_window) {
        if (dimension_ != 2 && dimension_ != 3) {
            throw ConfigError("formation dimension must be 2 or 3");
        }
        if (transition_window_ <= 0.0) {
            throw ConfigError("transition window must be positive");
        }
        for (const auto& sched : offsets_) {
            if (sched.keyframes.empty()) {
                throw ConfigError("every agent needs at least one offset keyframe");
            }
            for (std::size_t k = 0; k < sched.keyframes.size(); ++k) {
                if (sched.keyframes[k].offset.size() != dimension_) {
                    throw ConfigError("offset keyframe dimension mismatch");
                }
                if (k > 0 && sched.keyframes[k].t <= sched.keyframes[k - 1].t) {
                    throw ConfigError("offset keyframes must have strictly increasing times");
                }
            }
            for (const auto& s : sched.sinusoids) {
                if (s.axis < 0 || s.axis >= dimension_) {
                    throw ConfigError("sinusoid axis out of range");
                }
            }
        }
    }

    int dimension() const { return dimension_; }
    int agent_count() const { return static_cast<int>(offsets_.size()); }
    double transition_window() const { return transition_window_; }

    /// Formation center h^d with first and second derivatives.
    TrajectoryPoint center(double t) const { return evaluate_global(global_, dimension_, t); }

    /// Per-agent offset \bar h_i^d with derivatives.
    TrajectoryPoint offset(int agent, double t) const {
        const auto& sched = offsets_.at(static_cast<std::size_t>(agent));
        std::vector<Jet> jets(static_cast<std::size_t>(dimension_));
        offset_jets(sched, t, jets);
        return detail::from_jets(jets);
    }

    /// Desired state h_i^d = h^d + \bar h_i^d of one agent.
    TrajectoryPoint desired_state(int agent, double t) const {
        return center(t) + offset(agent, t);
    }

    /// Desired displacement h_ji^d = h_i^d - h_j^d; antisymmetric in (i, j).
    /// The center trajectory cancels, so only offsets enter.
    TrajectoryPoint desired_displacement(int i, int j, double t) const {
        if (i == j) {
            throw ConfigError("desired displacement requires two distinct agents");
        }
        return offset(i, t) - offset(j, t);
    }

private:
    void offset_jets(const AgentOffsetSchedule& sched, double t, std::vector<Jet>& jets) const {
        const auto& kf = sched.keyframes;
        // Hold the first keyframe before its time; afterwards hold each
        // keyframe value and blend into the next one over the window that
        // ends exactly at the next keyframe's time.
        std::size_t seg = 0;
        while (seg + 1 < kf.size() && t >= kf[seg + 1].t) ++seg;

        const Vec* from = &kf[seg].offset;
        if (seg + 1 < kf.size()) {
            const auto& next = kf[seg + 1];
            const double window = std::min(transition_window_, next.t - kf[seg].t);
            const double blend_start = next.t - window;
            if (t > blend_start) {
                const Jet tau = (Jet::time(t) - Jet(blend_start)) / Jet(window);
                const Jet s = detail::quintic_smoothstep(tau);
                for (int d = 0; d < dimension_; ++d) {
                    jets[static_cast<std::size_t>(d)] =
                        Jet((*from)(d)) + s * Jet(next.offset(d) - (*from)(d));
                }
                detail::add_sinusoids(jets, sched.sinusoids, Jet::time(t));
                return;
            }
        }
        for (int d = 0; d < dimension_; ++d) {
            jets[static_cast<std::size_t>(d)] = Jet((*from)(d));
        }
        detail::add_sinusoids(jets, sched.sinusoids, Jet::time(t));
    }

    int dimension_;
    GlobalTrajectory global_;
    std::vector<AgentOffsetSchedule> offsets_;
    double transition_window_;
};

}  // namespace rft
