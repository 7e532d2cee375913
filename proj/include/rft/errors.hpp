#pragma once

#include <stdexcept>
#include <string>

namespace rft {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration: bad schema, unknown keys, violated invariants.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Graph failed the connectivity requirement (algebraic connectivity <= tolerance).
class DisconnectedGraphError : public ConfigError {
public:
    explicit DisconnectedGraphError(const std::string& msg) : ConfigError(msg) {}
};

/// A state or control input became non-finite during integration.
class SimulationDivergedError : public Error {
public:
    SimulationDivergedError(int agent, double t, const std::string& what)
        : Error("simulation diverged at t=" + std::to_string(t) + " s, agent " +
                std::to_string(agent) + ": " + what),
          agent_(agent), time_(t) {}

    int agent() const noexcept { return agent_; }
    double time() const noexcept { return time_; }

private:
    int agent_;
    double time_;
};

/// Information matrix or covariance lost positive definiteness.
class EstimatorDegenerateError : public Error {
public:
    explicit EstimatorDegenerateError(const std::string& msg) : Error(msg) {}
};

/// File read/write failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace rft
