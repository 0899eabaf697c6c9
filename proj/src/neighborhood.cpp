#include "movnet/neighborhood.hpp"

#include "movnet/error.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

namespace movnet {

std::string_view to_string(ArcMode mode) {
    return mode == ArcMode::Symmetric ? "symmetric" : "independent";
}

ArcMode arc_mode_from_string(std::string_view name) {
    if (name == "symmetric") return ArcMode::Symmetric;
    if (name == "independent") return ArcMode::Independent;
    throw InvalidArgument("unknown arc mode '" + std::string(name) +
                          "' (expected symmetric or independent)");
}

LinkageSpec::LinkageSpec(Eigen::MatrixXd weighting, Eigen::MatrixXd probability, ArcMode mode)
    : weighting_(std::move(weighting)), probability_(std::move(probability)), mode_(mode) {
    const Eigen::Index n = weighting_.rows();
    if (n == 0 || weighting_.cols() != n)
        throw ShapeMismatch("weighting matrix B must be square and non-empty");
    if (probability_.rows() != n || probability_.cols() != n)
        throw ShapeMismatch("linkage probability matrix P must match the shape of B");

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double b = weighting_(i, j);
            const double p = probability_(i, j);
            const std::string where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
            if (i == j) {
                if (b != 0.0) throw InvalidArgument("b" + where + " must be 0 on the diagonal");
                if (p != 0.0) throw InvalidArgument("p" + where + " must be 0 on the diagonal");
                continue;
            }
            if (!std::isfinite(b) || !(b > 0.0))
                throw InvalidArgument("b" + where + " must be finite and positive");
            if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p" + where + " must lie in (0, 1]");
        }

    if (mode_ == ArcMode::Symmetric &&
        (weighting_ != weighting_.transpose() || probability_ != probability_.transpose()))
        throw ModeMismatch("symmetric arc mode requires B and P to be symmetric");

    delta_ = weighting_.rowwise().sum().maxCoeff();
}

LinkageSpec LinkageSpec::uniform(std::size_t n, double b, double p, ArcMode mode) {
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd bm = Eigen::MatrixXd::Constant(size, size, b);
    Eigen::MatrixXd pm = Eigen::MatrixXd::Constant(size, size, p);
    bm.diagonal().setZero();
    pm.diagonal().setZero();
    return LinkageSpec(std::move(bm), std::move(pm), mode);
}

void AgentPositions::validate(std::size_t node_count) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] >= node_count)
            throw InvalidArgument("agent " + std::to_string(i) + " is at node " +
                                  std::to_string(nodes[i]) + " outside [0, " +
                                  std::to_string(node_count) + ")");
}

AgentPositions AgentPositions::uniform(std::size_t agents, std::size_t node_count, Rng& rng) {
    AgentPositions pos;
    pos.nodes.reserve(agents);
    for (std::size_t i = 0; i < agents; ++i) {
        auto node = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(node_count));
        pos.nodes.push_back(std::min(node, node_count - 1));
    }
    return pos;
}

NeighborhoodSnapshot NeighborhoodSnapshot::from_adjacency(Eigen::MatrixXd adjacency, std::size_t t) {
    NeighborhoodSnapshot s;
    s.t = t;
    s.out_degree = adjacency.rowwise().sum();
    s.laplacian = -adjacency;
    s.laplacian.diagonal() += s.out_degree;
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
        for (Eigen::Index j = 0; j < adjacency.cols(); ++j)
            if (adjacency(i, j) != 0.0)
                s.arcs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                  adjacency(i, j)});
    s.adjacency = std::move(adjacency);
    return s;
}

AgentPositions step_walks(const AgentPositions& pos, const Eigen::MatrixXd& q, Rng& rng) {
    AgentPositions next;
    next.nodes.reserve(pos.size());
    const Eigen::Index m = q.cols();
    for (const std::size_t here : pos.nodes) {
        const auto row = static_cast<Eigen::Index>(here);
        const double u = unit_uniform(rng);
        double cumulative = 0.0;
        Eigen::Index chosen = -1;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (q(row, j) <= 0.0) continue;
            cumulative += q(row, j);
            chosen = j;
            if (u < cumulative) break;
        }
        next.nodes.push_back(static_cast<std::size_t>(chosen));
    }
    return next;
}

NeighborhoodSnapshot sample_neighborhood(const AgentPositions& pos, const LinkageSpec& spec,
                                         Rng& rng, std::size_t t) {
    const std::size_t n = spec.size();
    if (pos.size() != n) throw DimensionMismatch("position count differs from agent count");
    const Eigen::MatrixXd& b = spec.weighting();
    const Eigen::MatrixXd& p = spec.probability();

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = spec.mode() == ArcMode::Symmetric ? i + 1 : 0; j < n; ++j) {
            if (i == j || pos.nodes[i] != pos.nodes[j]) continue;
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            if (!bernoulli(rng, p(ii, jj))) continue;
            a(ii, jj) = b(ii, jj);
            if (spec.mode() == ArcMode::Symmetric) a(jj, ii) = b(jj, ii);
        }
    return NeighborhoodSnapshot::from_adjacency(std::move(a), t);
}

bool is_balanced(const NeighborhoodSnapshot& s, double tol) {
    const Eigen::VectorXd out = s.adjacency.rowwise().sum();
    const Eigen::VectorXd in = s.adjacency.colwise().sum().transpose();
    return ((out - in).cwiseAbs().array() <= tol).all();
}

Eigen::MatrixXd expected_adjacency(const Eigen::MatrixXd& dists, const LinkageSpec& spec) {
    if (static_cast<std::size_t>(dists.rows()) != spec.size())
        throw DimensionMismatch("need one position distribution per agent");
    Eigen::MatrixXd colocation = dists * dists.transpose();
    colocation.diagonal().setZero();
    return schur_product(schur_product(spec.weighting(), spec.probability()), colocation);
}

Eigen::MatrixXd ergodic_adjacency(const StationaryDistribution& pi, const LinkageSpec& spec) {
    return pi.collision_probability() * schur_product(spec.weighting(), spec.probability());
}

Eigen::MatrixXd ergodic_laplacian(const StationaryDistribution& pi, const LinkageSpec& spec) {
    const Eigen::MatrixXd bp = schur_product(spec.weighting(), spec.probability());
    Eigen::MatrixXd l = -bp;
    l.diagonal() += bp.rowwise().sum();
    return pi.collision_probability() * l;
}

Eigen::MatrixXd schur_product(const Eigen::MatrixXd& c, const Eigen::MatrixXd& e) {
    if (c.rows() != e.rows() || c.cols() != e.cols())
        throw ShapeMismatch("Schur product needs equal shapes");
    return c.cwiseProduct(e);
}

void write_snapshot_record(std::ostream& out, const AgentPositions& pos,
                           const NeighborhoodSnapshot& s) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const Arc& arc : s.arcs) arcs.push_back({arc.from, arc.to, arc.weight});
    out << nlohmann::json{{"t", s.t}, {"positions", pos.nodes}, {"arcs", std::move(arcs)}}.dump()
        << '\n';
}

}  // namespace movnet
