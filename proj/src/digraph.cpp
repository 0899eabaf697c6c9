#include "movnet/digraph.hpp"

#include "movnet/error.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace movnet {

namespace {

std::vector<bool> reachable_from(const Eigen::MatrixXd& w, Eigen::Index root, bool reverse) {
    const Eigen::Index m = w.rows();
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    std::vector<Eigen::Index> stack{root};
    seen[static_cast<std::size_t>(root)] = true;
    while (!stack.empty()) {
        const Eigen::Index u = stack.back();
        stack.pop_back();
        for (Eigen::Index v = 0; v < m; ++v) {
            const double weight = reverse ? w(v, u) : w(u, v);
            if (weight > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

WeightedDigraph::WeightedDigraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() == 0 || weights_.rows() != weights_.cols())
        throw InvalidArgument("weight matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < weights_.rows(); ++i)
        for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0)
                throw InvalidArgument("weight (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") must be finite and non-negative");
        }
}

Eigen::VectorXd out_degrees(const WeightedDigraph& g) {
    Eigen::VectorXd d = g.weights().rowwise().sum();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d(i) > 0.0)) throw ZeroOutDegree(static_cast<std::size_t>(i));
    return d;
}

bool is_strongly_connected(const WeightedDigraph& g) {
    const auto forward = reachable_from(g.weights(), 0, false);
    const auto backward = reachable_from(g.weights(), 0, true);
    for (std::size_t i = 0; i < forward.size(); ++i)
        if (!forward[i] || !backward[i]) return false;
    return true;
}

std::size_t cycle_gcd(const WeightedDigraph& g) {
    if (!is_strongly_connected(g)) throw NotStronglyConnected();
    const Eigen::MatrixXd& w = g.weights();
    const Eigen::Index m = w.rows();

    std::vector<long> depth(static_cast<std::size_t>(m), -1);
    std::queue<Eigen::Index> frontier;
    depth[0] = 0;
    frontier.push(0);
    while (!frontier.empty()) {
        const Eigen::Index u = frontier.front();
        frontier.pop();
        for (Eigen::Index v = 0; v < m; ++v)
            if (w(u, v) > 0.0 && depth[static_cast<std::size_t>(v)] < 0) {
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                frontier.push(v);
            }
    }

    long period = 0;
    for (Eigen::Index u = 0; u < m; ++u)
        for (Eigen::Index v = 0; v < m; ++v)
            if (w(u, v) > 0.0)
                period = std::gcd(period, std::labs(depth[static_cast<std::size_t>(u)] + 1 -
                                                    depth[static_cast<std::size_t>(v)]));
    if (period == 0) throw Degenerate("graph has no directed cycles");
    return static_cast<std::size_t>(period);
}

Eigen::MatrixXd transition_matrix(const WeightedDigraph& g) {
    const Eigen::VectorXd d = out_degrees(g);
    return d.cwiseInverse().asDiagonal() * g.weights();
}

}  // namespace movnet
