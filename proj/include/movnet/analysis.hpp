#pragma once

#include "movnet/consensus.hpp"
#include "movnet/digraph.hpp"
#include "movnet/markov.hpp"
#include "movnet/neighborhood.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace movnet {

/// Initial agent states: an explicit vector, the spread (0, 1, ..., n-1), or
/// independent uniform draws on [lo, hi).
struct InitialStates {
    enum class Kind { Explicit, Spread, Uniform };
    Kind kind = Kind::Spread;
    std::vector<double> values;
    double lo = 0.0;
    double hi = 1.0;

    StateVector realize(std::size_t n, Rng& rng) const;
    bool operator==(const InitialStates&) const = default;
};

/// Initial agent nodes: explicit, or independent uniform over the graph.
struct InitialPositions {
    enum class Kind { Explicit, Uniform };
    Kind kind = Kind::Uniform;
    std::vector<std::size_t> nodes;

    AgentPositions realize(std::size_t n, std::size_t m, Rng& rng) const;
    bool operator==(const InitialPositions&) const = default;
};

/// A fully resolved trial configuration.
struct TrialSetup {
    WeightedDigraph graph;
    LinkageSpec linkage;
    ProtocolParams params;
    InitialStates x0;
    InitialPositions pos0;
    std::size_t t_max = 20000;
    double threshold = kConsensusThreshold;
    bool skip_assumption_checks = false;
};

/// Trial with initial conditions realised from `seed`. Initial positions then
/// states are drawn from an engine seeded with splitmix64(seed); the dynamics
/// use an engine seeded with `seed` itself.
ConsensusTrace run_seeded_trial(const TrialSetup& setup, std::uint64_t seed,
                                const TrialOptions& options = {});

/// Least-squares geometric rate exp(slope) of xi(t) over the window
/// 10 * threshold <= xi <= xi(0) / 10. NaN if the window has fewer than two points.
double fit_decay_rate(const ConsensusTrace& trace, double threshold);

/// 2 eps (sum_k pi_k^2) (eps Delta - 1) Delta.
double contraction_coefficient(const StationaryDistribution& pi, const LinkageSpec& spec,
                               const ProtocolParams& params);

struct DriftSample {
    std::size_t trial;
    std::size_t t;
    double xi;
    double xi_next;
};

struct TrialOutcome {
    std::uint64_t seed = 0;
    std::optional<std::size_t> consensus_time;
    double final_xi = 0.0;
    double decay_rate = 0.0;
    double max_conservation_residual = 0.0;
    std::size_t steps = 0;
};

struct CampaignSummary {
    std::size_t trials = 0;
    std::uint64_t master_seed = 0;
    double threshold = kConsensusThreshold;
    double consensus_fraction = 0.0;
    /// Median across trials of the fitted per-step geometric rate of xi.
    double decay_rate = 0.0;
    double max_conservation_residual = 0.0;
    /// Asymptotic drift coefficient of the configuration (see contraction_coefficient).
    double contraction_coefficient = 0.0;
    /// Drift samples are kept only where xi(t) >= drift_cutoff = 10 * threshold.
    double drift_cutoff = 0.0;
    std::vector<DriftSample> drift_samples;
    std::vector<TrialOutcome> outcomes;
};

/// Runs `trials` independent trials with seeds trial_seed(master_seed, i) on
/// `jobs` threads (0 = hardware concurrency). The result does not depend on
/// `jobs`. Trial errors are rethrown as Error with the trial index attached.
CampaignSummary run_campaign(const TrialSetup& setup, std::size_t trials,
                             std::uint64_t master_seed, std::size_t jobs = 0);

struct DriftReport {
    double asymptotic_coefficient = 0.0;
    /// Mean of (xi(t+1) - xi(t)) / xi(t) over samples with t >= t_min.
    double empirical_drift_ratio = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
    /// First t from which the per-t mean ratio is negative for every later t.
    std::optional<std::size_t> t0_estimate;
    /// empirical_drift_ratio <= asymptotic_coefficient + 3 standard errors.
    bool within_bound = false;
};

/// Throws InsufficientSamples if no drift sample has t >= t_min.
DriftReport empirical_drift(const CampaignSummary& campaign, std::size_t t_min);

struct ErgodicComparison {
    Eigen::MatrixXd time_average;
    Eigen::MatrixXd ergodic;
    /// Batch-means standard error of each time-average entry.
    Eigen::MatrixXd standard_error;
    double max_deviation = 0.0;
    std::size_t samples = 0;
};

/// Time average of L(t) over t in [burn_in, t_max) along one trajectory
/// started from uniform random positions, against ergodic_laplacian.
/// Throws AssumptionViolated if the graph is not strongly connected and aperiodic.
ErgodicComparison empirical_vs_ergodic(const WeightedDigraph& g, const LinkageSpec& spec,
                                       std::size_t t_max, std::size_t burn_in, std::uint64_t seed,
                                       std::size_t batches = 50);

}  // namespace movnet
