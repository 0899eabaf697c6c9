#include "movnet/consensus.hpp"

#include "movnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace movnet {

ProtocolParams::ProtocolParams(double epsilon, double delta, bool force)
    : epsilon_(epsilon), delta_(delta), forced_(force) {
    if (!std::isfinite(delta) || delta < 0.0) throw InvalidEpsilon("delta must be finite and >= 0");
    if (!std::isfinite(epsilon) || !(epsilon > 0.0))
        throw InvalidEpsilon("epsilon must be finite and positive, got " + std::to_string(epsilon));
    if (!force && !in_stable_range())
        throw InvalidEpsilon("epsilon = " + std::to_string(epsilon) + " outside (0, 1/Delta) with Delta = " +
                             std::to_string(delta));
}

bool ProtocolParams::in_stable_range() const noexcept {
    return epsilon_ > 0.0 && epsilon_ * delta_ < 1.0;
}

StateVector step_protocol(const StateVector& x, const NeighborhoodSnapshot& s,
                          const ProtocolParams& params) {
    if (static_cast<std::size_t>(x.size()) != s.size())
        throw DimensionMismatch("state has " + std::to_string(x.size()) + " entries, snapshot " +
                                std::to_string(s.size()));
    StateVector next = x;
    std::size_t k = 0;
    while (k < s.arcs.size()) {
        const std::size_t i = s.arcs[k].from;
        const double xi = x(static_cast<Eigen::Index>(i));
        double pull = 0.0;
        for (; k < s.arcs.size() && s.arcs[k].from == i; ++k)
            pull += s.arcs[k].weight * (x(static_cast<Eigen::Index>(s.arcs[k].to)) - xi);
        next(static_cast<Eigen::Index>(i)) = xi + params.epsilon() * pull;
    }
    return next;
}

StateVector step_protocol_dense(const StateVector& x, const NeighborhoodSnapshot& s,
                                const ProtocolParams& params) {
    if (static_cast<std::size_t>(x.size()) != s.size())
        throw DimensionMismatch("state and snapshot sizes differ");
    return x - params.epsilon() * (s.laplacian * x);
}

double disagreement(const StateVector& x) {
    if (x.size() == 0) return 0.0;
    const double mean = x.mean();
    return std::max(0.0, (x.array() - mean).square().sum());
}

Decomposition decompose(const StateVector& x) {
    const double mean = x.size() == 0 ? 0.0 : x.mean();
    StateVector parallel = StateVector::Constant(x.size(), mean);
    StateVector perpendicular = x - parallel;
    return {std::move(parallel), std::move(perpendicular)};
}

void check_assumptions(const WeightedDigraph& g, const LinkageSpec& spec) {
    if (!is_strongly_connected(g)) throw AssumptionViolated(Assumption::StronglyConnected, "");
    if (const auto period = cycle_gcd(g); period != 1)
        throw AssumptionViolated(Assumption::Aperiodic, "cycle gcd " + std::to_string(period));
    if (spec.mode() != ArcMode::Symmetric)
        throw AssumptionViolated(Assumption::BalancedSnapshots, "independent arc mode");
}

ConsensusTrace run_trial(const WeightedDigraph& g, const LinkageSpec& spec,
                         const ProtocolParams& params, const StateVector& x0,
                         const AgentPositions& pos0, std::size_t t_max, double threshold,
                         std::uint64_t seed, const TrialOptions& options) {
    if (!options.skip_assumption_checks) check_assumptions(g, spec);
    if (static_cast<std::size_t>(x0.size()) != spec.size() || pos0.size() != spec.size())
        throw DimensionMismatch("initial state and positions must have one entry per agent");
    if (!x0.allFinite()) throw InvalidArgument("initial state must be finite");
    pos0.validate(g.size());

    const Eigen::MatrixXd q = transition_matrix(g);
    Rng rng(seed);

    ConsensusTrace trace;
    trace.seed = seed;
    trace.xi.reserve(t_max + 1);
    trace.conservation_residual.reserve(t_max + 1);

    const double total = x0.sum();
    StateVector x = x0;
    AgentPositions pos = pos0;
    trace.xi.push_back(disagreement(x));
    trace.conservation_residual.push_back(0.0);
    if (trace.xi.back() < threshold) trace.consensus_time = 0;

    for (std::size_t t = 0; t < t_max; ++t) {
        const NeighborhoodSnapshot snapshot = sample_neighborhood(pos, spec, rng, t);
        StateVector next = step_protocol(x, snapshot, params);
        if (options.observer) options.observer(StepView{t, pos, snapshot, x, next});
        x = std::move(next);
        pos = step_walks(pos, q, rng);

        if (!x.allFinite()) {
            trace.finite = false;
            break;
        }
        trace.xi.push_back(disagreement(x));
        trace.conservation_residual.push_back(std::abs(x.sum() - total));
        if (!trace.consensus_time && trace.xi.back() < threshold) trace.consensus_time = t + 1;
    }
    trace.final_state = std::move(x);
    return trace;
}

}  // namespace movnet
