#pragma once

#include "movnet/markov.hpp"
#include "movnet/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace movnet {

/// How arcs between co-located agents are drawn.
///  - Symmetric: one coin per unordered pair {i, j}; both arcs or neither.
///    Requires B and P symmetric, and then every snapshot is balanced.
///  - Independent: one coin per ordered pair. Snapshots are generally not
///    balanced, so conservation of the state sum is not guaranteed.
enum class ArcMode { Symmetric, Independent };

std::string_view to_string(ArcMode mode);
ArcMode arc_mode_from_string(std::string_view name);

/// Weighting factors B and linkage probabilities P of the moving network.
class LinkageSpec {
public:
    /// Throws ShapeMismatch / InvalidArgument on malformed B or P and
    /// ModeMismatch if `mode` is Symmetric but B or P is not.
    LinkageSpec(Eigen::MatrixXd weighting, Eigen::MatrixXd probability,
                ArcMode mode = ArcMode::Symmetric);

    /// b_ij = b and p_ij = p for every i != j.
    static LinkageSpec uniform(std::size_t n, double b, double p,
                               ArcMode mode = ArcMode::Symmetric);

    std::size_t size() const noexcept { return static_cast<std::size_t>(weighting_.rows()); }
    const Eigen::MatrixXd& weighting() const noexcept { return weighting_; }
    const Eigen::MatrixXd& probability() const noexcept { return probability_; }
    ArcMode mode() const noexcept { return mode_; }
    /// max_i sum_j b_ij.
    double max_weighted_degree() const noexcept { return delta_; }

private:
    Eigen::MatrixXd weighting_;
    Eigen::MatrixXd probability_;
    ArcMode mode_;
    double delta_;
};

/// Node occupied by each agent (0-based node indices).
struct AgentPositions {
    std::vector<std::size_t> nodes;

    std::size_t size() const noexcept { return nodes.size(); }
    /// Throws InvalidArgument if any node index is >= node_count.
    void validate(std::size_t node_count) const;

    static AgentPositions uniform(std::size_t agents, std::size_t node_count, Rng& rng);
};

struct Arc {
    std::size_t from;
    std::size_t to;
    double weight;
};

/// One realisation of the moving neighbourhood graph.
struct NeighborhoodSnapshot {
    std::size_t t = 0;
    Eigen::MatrixXd adjacency;
    /// Diagonal of the out-degree matrix D.
    Eigen::VectorXd out_degree;
    Eigen::MatrixXd laplacian;
    /// Support of the adjacency matrix in row-major order.
    std::vector<Arc> arcs;

    std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency.rows()); }
    Eigen::MatrixXd degree_matrix() const { return out_degree.asDiagonal(); }

    /// Builds D, L and the arc list from A.
    static NeighborhoodSnapshot from_adjacency(Eigen::MatrixXd adjacency, std::size_t t = 0);
};

/// Every agent independently moves to a node drawn from its row of Q.
AgentPositions step_walks(const AgentPositions& pos, const Eigen::MatrixXd& q, Rng& rng);

/// Draws arcs among co-located agents. Coins are consumed only for co-located
/// pairs, in row-major pair order (i < j for Symmetric, i != j for Independent).
NeighborhoodSnapshot sample_neighborhood(const AgentPositions& pos, const LinkageSpec& spec,
                                         Rng& rng, std::size_t t = 0);

/// |sum_j a_ij - sum_j a_ji| <= tol for every agent.
bool is_balanced(const NeighborhoodSnapshot& s, double tol = 0.0);

/// E(a_ij(t)) = b_ij p_ij sum_k pi_ik(t) pi_jk(t), where row i of `dists` is the
/// position distribution of agent i at time t.
Eigen::MatrixXd expected_adjacency(const Eigen::MatrixXd& dists, const LinkageSpec& spec);

/// (sum_k pi_k^2) (B o P).
Eigen::MatrixXd ergodic_adjacency(const StationaryDistribution& pi, const LinkageSpec& spec);

/// (sum_k pi_k^2) (diag(sum_j b_ij p_ij) - B o P).
Eigen::MatrixXd ergodic_laplacian(const StationaryDistribution& pi, const LinkageSpec& spec);

/// Entrywise (Hadamard) product. Throws ShapeMismatch.
Eigen::MatrixXd schur_product(const Eigen::MatrixXd& c, const Eigen::MatrixXd& e);

/// One JSON line: {"t":..,"positions":[..],"arcs":[[i,j,b_ij],..]}.
void write_snapshot_record(std::ostream& out, const AgentPositions& pos,
                           const NeighborhoodSnapshot& s);

}  // namespace movnet
