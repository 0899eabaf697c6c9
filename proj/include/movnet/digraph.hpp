#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace movnet {

/// Fixed weighted digraph the agents walk on. Arc (i, j) exists iff
/// weights(i, j) > 0; self-loops are allowed.
class WeightedDigraph {
public:
    /// Throws InvalidArgument unless `weights` is a non-empty square matrix of
    /// finite non-negative entries. Zero out-degree nodes are accepted here and
    /// only rejected when a transition matrix is requested.
    explicit WeightedDigraph(Eigen::MatrixXd weights);

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    bool has_arc(std::size_t from, std::size_t to) const {
        return weights_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) > 0.0;
    }

private:
    Eigen::MatrixXd weights_;
};

/// Row sums d_i of the weight matrix. Throws ZeroOutDegree on the first empty row.
Eigen::VectorXd out_degrees(const WeightedDigraph& g);

bool is_strongly_connected(const WeightedDigraph& g);

/// Period of the graph: gcd of all directed cycle lengths, found from a BFS
/// depth labelling as gcd over arcs (u, v) of |depth(u) + 1 - depth(v)|.
/// Throws NotStronglyConnected, or Degenerate for a single node without a loop.
std::size_t cycle_gcd(const WeightedDigraph& g);

/// Random-walk transition matrix q_ij = w_ij / d_i.
Eigen::MatrixXd transition_matrix(const WeightedDigraph& g);

}  // namespace movnet
