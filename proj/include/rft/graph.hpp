#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <string>
#include <tuple>
#include <vector>

#include "rft/errors.hpp"

namespace rft {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Tolerance below which the second-smallest Laplacian eigenvalue is treated
/// as zero, i.e. the graph is declared disconnected. Well above eigensolver
/// noise for the problem sizes handled here (N <= 100).
inline constexpr double kConnectivityTol = 1e-8;

struct WeightedEdge {
    int i = 0;
    int j = 0;
    double weight = 1.0;
};

inline Mat build_laplacian(const Mat& weights) {
    const auto n = weights.rows();
    Mat lap = -weights;
    for (Eigen::Index i = 0; i < n; ++i) {
        lap(i, i) = weights.row(i).sum();
    }
    return lap;
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
inline Vec symmetric_eigenvalues(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    return solver.eigenvalues();
}

/// Second-smallest Laplacian eigenvalue. Throws if the graph it describes is
/// disconnected (lambda_2 below tolerance).
inline double algebraic_connectivity(const Mat& laplacian) {
    const Vec eig = symmetric_eigenvalues(laplacian);
    if (eig.size() < 2) {
        throw ConfigError("Laplacian must be at least 2x2");
    }
    const double lambda2 = eig(1);
    if (lambda2 <= kConnectivityTol) {
        throw DisconnectedGraphError("graph is disconnected (lambda_2 = " +
                                     std::to_string(lambda2) + ")");
    }
    return lambda2;
}

/// Undirected weighted measurement topology between agents.
///
/// Immutable after construction; construction validates symmetry, zero
/// diagonal, non-negative weights, and connectivity.
class SensoryGraph {
public:
    SensoryGraph(int agent_count, const std::vector<WeightedEdge>& edges)
        : SensoryGraph(weights_from_edges(agent_count, edges)) {}

    explicit SensoryGraph(Mat weights) : weights_(std::move(weights)) {
        const auto n = weights_.rows();
        if (n < 3 || weights_.cols() != n) {
            throw ConfigError("sensory graph needs a square weight matrix with N >= 3");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (weights_(i, i) != 0.0) {
                throw ConfigError("sensory graph weight matrix must have zero diagonal");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (weights_(i, j) < 0.0) {
                    throw ConfigError("sensory graph weights must be non-negative");
                }
                if (weights_(i, j) != weights_(j, i)) {
                    throw ConfigError("sensory graph weights must be symmetric");
                }
            }
        }
        laplacian_ = build_laplacian(weights_);
        lambda2_ = algebraic_connectivity(laplacian_);  // throws if disconnected

        neighbors_.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && weights_(i, j) > 0.0) {
                    neighbors_[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
                }
            }
        }
    }

    int agent_count() const { return static_cast<int>(weights_.rows()); }
    const Mat& weights() const { return weights_; }
    const Mat& laplacian() const { return laplacian_; }
    double lambda2() const { return lambda2_; }

    /// Neighbor indices of agent i, ascending.
    const std::vector<int>& neighbors(int i) const {
        return neighbors_.at(static_cast<std::size_t>(i));
    }

    double weight(int i, int j) const { return weights_(i, j); }

private:
    static Mat weights_from_edges(int agent_count, const std::vector<WeightedEdge>& edges) {
        if (agent_count < 3) {
            throw ConfigError("sensory graph needs at least 3 agents");
        }
        Mat w = Mat::Zero(agent_count, agent_count);
        for (const auto& e : edges) {
            if (e.i < 0 || e.j < 0 || e.i >= agent_count || e.j >= agent_count) {
                throw ConfigError("graph edge references agent index out of range");
            }
            if (e.i == e.j) {
                throw ConfigError("graph edge connects an agent to itself");
            }
            if (e.weight <= 0.0) {
                throw ConfigError("graph edge weight must be positive");
            }
            w(e.i, e.j) = e.weight;
            w(e.j, e.i) = e.weight;
        }
        return w;
    }

    Mat weights_;
    Mat laplacian_;
    double lambda2_ = 0.0;
    std::vector<std::vector<int>> neighbors_;
};

/// Convenience builder: N agents on a cycle with uniform edge weight.
inline SensoryGraph make_ring_graph(int agent_count, double weight = 1.0) {
    std::vector<WeightedEdge> edges;
    edges.reserve(static_cast<std::size_t>(agent_count));
    for (int i = 0; i < agent_count; ++i) {
        edges.push_back({i, (i + 1) % agent_count, weight});
    }
    return SensoryGraph(agent_count, edges);
}

}  // namespace rft
