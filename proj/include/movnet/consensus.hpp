#pragma once

#include "movnet/digraph.hpp"
#include "movnet/neighborhood.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace movnet {

/// Scalar state of each agent.
using StateVector = Eigen::VectorXd;

inline constexpr double kConsensusThreshold = 1e-8;

/// Step size of the averaging protocol together with the Delta it was
/// validated against.
class ProtocolParams {
public:
    /// Throws InvalidEpsilon unless 0 < epsilon < 1/delta. `force` skips the
    /// upper bound (epsilon must still be finite and positive) so unstable step
    /// sizes can be explored deliberately.
    ProtocolParams(double epsilon, double delta, bool force = false);

    double epsilon() const noexcept { return epsilon_; }
    double delta() const noexcept { return delta_; }
    bool forced() const noexcept { return forced_; }
    /// True when epsilon lies in (0, 1/delta).
    bool in_stable_range() const noexcept;

private:
    double epsilon_;
    double delta_;
    bool forced_;
};

/// x_i + eps * sum_{j in N_i} b_ij (x_j - x_i), iterating only over the arcs
/// present in the snapshot. Throws DimensionMismatch.
StateVector step_protocol(const StateVector& x, const NeighborhoodSnapshot& s,
                          const ProtocolParams& params);

/// (I - eps L) x computed densely.
StateVector step_protocol_dense(const StateVector& x, const NeighborhoodSnapshot& s,
                                const ProtocolParams& params);

/// Squared distance to the consensus line, x^T x - n mean(x)^2, evaluated as
/// sum_i (x_i - mean)^2 to avoid cancellation and clipped at zero.
double disagreement(const StateVector& x);

struct Decomposition {
    StateVector parallel;
    StateVector perpendicular;
};

/// Orthogonal split into mean(x) * 1 and the remainder.
Decomposition decompose(const StateVector& x);

struct ConsensusTrace {
    std::uint64_t seed = 0;
    /// xi[t] for t = 0..steps.
    std::vector<double> xi;
    /// |sum x(t) - sum x(0)| for t = 0..steps.
    std::vector<double> conservation_residual;
    /// First t with xi[t] < threshold.
    std::optional<std::size_t> consensus_time;
    StateVector final_state;
    /// False if the state overflowed and the run stopped early.
    bool finite = true;

    std::size_t steps() const noexcept { return xi.empty() ? 0 : xi.size() - 1; }
};

/// Everything visible to a trial observer at one protocol step.
struct StepView {
    std::size_t t;
    const AgentPositions& positions;
    const NeighborhoodSnapshot& snapshot;
    const StateVector& before;
    const StateVector& after;
};

struct TrialOptions {
    /// Run even if the graph is not strongly connected and aperiodic, or the
    /// arc mode does not guarantee balanced snapshots.
    bool skip_assumption_checks = false;
    std::function<void(const StepView&)> observer;
};

/// Throws AssumptionViolated if `g` is not strongly connected and aperiodic or
/// `spec` is not in symmetric mode.
void check_assumptions(const WeightedDigraph& g, const LinkageSpec& spec);

/// One trajectory. Each step t = 0..t_max-1 samples G(t) at the current
/// positions (arc coins first), applies the protocol, then moves every walker
/// (one draw per agent). All randomness comes from one engine seeded by `seed`.
ConsensusTrace run_trial(const WeightedDigraph& g, const LinkageSpec& spec,
                         const ProtocolParams& params, const StateVector& x0,
                         const AgentPositions& pos0, std::size_t t_max, double threshold,
                         std::uint64_t seed, const TrialOptions& options = {});

}  // namespace movnet
