#include "movnet/analysis.hpp"

#include "movnet/error.hpp"
#include "movnet/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>

namespace movnet {

StateVector InitialStates::realize(std::size_t n, Rng& rng) const {
    const auto size = static_cast<Eigen::Index>(n);
    switch (kind) {
        case Kind::Explicit:
            if (values.size() != n)
                throw DimensionMismatch("explicit x0 has " + std::to_string(values.size()) +
                                        " entries for " + std::to_string(n) + " agents");
            return Eigen::Map<const Eigen::VectorXd>(values.data(), size);
        case Kind::Spread:
            return Eigen::VectorXd::LinSpaced(size, 0.0, static_cast<double>(n) - 1.0);
        case Kind::Uniform: {
            StateVector x(size);
            for (Eigen::Index i = 0; i < size; ++i) x(i) = lo + (hi - lo) * unit_uniform(rng);
            return x;
        }
    }
    return {};
}

AgentPositions InitialPositions::realize(std::size_t n, std::size_t m, Rng& rng) const {
    if (kind == Kind::Uniform) return AgentPositions::uniform(n, m, rng);
    if (nodes.size() != n)
        throw DimensionMismatch("explicit pos0 has " + std::to_string(nodes.size()) +
                                " entries for " + std::to_string(n) + " agents");
    AgentPositions pos{nodes};
    pos.validate(m);
    return pos;
}

ConsensusTrace run_seeded_trial(const TrialSetup& setup, std::uint64_t seed,
                                const TrialOptions& options) {
    const std::size_t n = setup.linkage.size();
    Rng init(splitmix64(seed));
    const AgentPositions pos0 = setup.pos0.realize(n, setup.graph.size(), init);
    const StateVector x0 = setup.x0.realize(n, init);
    TrialOptions opts = options;
    opts.skip_assumption_checks = opts.skip_assumption_checks || setup.skip_assumption_checks;
    return run_trial(setup.graph, setup.linkage, setup.params, x0, pos0, setup.t_max,
                     setup.threshold, seed, opts);
}

double fit_decay_rate(const ConsensusTrace& trace, double threshold) {
    if (trace.xi.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double lo = 10.0 * threshold;
    const double hi = trace.xi.front() / 10.0;
    std::vector<double> t, y;
    for (std::size_t k = 0; k < trace.xi.size(); ++k)
        if (trace.xi[k] >= lo && trace.xi[k] <= hi) {
            t.push_back(static_cast<double>(k));
            y.push_back(trace.xi[k]);
        }
    const LogLinearFit fit = fit_log_linear(t, y);
    if (fit.points < 2) return std::numeric_limits<double>::quiet_NaN();
    return std::exp(fit.slope);
}

double contraction_coefficient(const StationaryDistribution& pi, const LinkageSpec& spec,
                               const ProtocolParams& params) {
    const double eps = params.epsilon();
    const double delta = spec.max_weighted_degree();
    return 2.0 * eps * pi.collision_probability() * (eps * delta - 1.0) * delta;
}

namespace {

struct TrialResult {
    TrialOutcome outcome;
    std::vector<DriftSample> drift;
};

TrialResult summarize_trial(const ConsensusTrace& trace, std::size_t index, double threshold,
                            double cutoff) {
    TrialResult r;
    r.outcome.seed = trace.seed;
    r.outcome.consensus_time = trace.consensus_time;
    r.outcome.final_xi = trace.finite ? trace.xi.back() : std::numeric_limits<double>::infinity();
    r.outcome.decay_rate = fit_decay_rate(trace, threshold);
    r.outcome.steps = trace.steps();
    for (const double res : trace.conservation_residual)
        r.outcome.max_conservation_residual = std::max(r.outcome.max_conservation_residual, res);
    for (std::size_t t = 0; t + 1 < trace.xi.size(); ++t)
        if (trace.xi[t] >= cutoff) r.drift.push_back({index, t, trace.xi[t], trace.xi[t + 1]});
    return r;
}

}  // namespace

CampaignSummary run_campaign(const TrialSetup& setup, std::size_t trials,
                             std::uint64_t master_seed, std::size_t jobs) {
    if (trials == 0) throw InvalidArgument("a campaign needs at least one trial");
    if (!setup.skip_assumption_checks) check_assumptions(setup.graph, setup.linkage);
    if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
    jobs = std::min(jobs, trials);

    CampaignSummary summary;
    summary.trials = trials;
    summary.master_seed = master_seed;
    summary.threshold = setup.threshold;
    summary.drift_cutoff = 10.0 * setup.threshold;

    std::vector<TrialResult> results(trials);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t failed_index = 0;

    auto worker = [&] {
        for (std::size_t i = next++; i < trials; i = next++) {
            try {
                const ConsensusTrace trace = run_seeded_trial(setup, trial_seed(master_seed, i));
                results[i] = summarize_trial(trace, i, setup.threshold, summary.drift_cutoff);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!first_error || i < failed_index) {
                    first_error = std::current_exception();
                    failed_index = i;
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            throw Error("trial " + std::to_string(failed_index) + ": " + e.what());
        }
    }

    std::size_t reached = 0;
    std::vector<double> rates;
    for (TrialResult& r : results) {
        if (r.outcome.consensus_time) ++reached;
        rates.push_back(r.outcome.decay_rate);
        summary.max_conservation_residual =
            std::max(summary.max_conservation_residual, r.outcome.max_conservation_residual);
        summary.drift_samples.insert(summary.drift_samples.end(), r.drift.begin(), r.drift.end());
        summary.outcomes.push_back(r.outcome);
    }
    summary.consensus_fraction = static_cast<double>(reached) / static_cast<double>(trials);
    summary.decay_rate = median(std::move(rates));

    if (!setup.skip_assumption_checks || is_strongly_connected(setup.graph)) {
        try {
            const auto pi = stationary_distribution(transition_matrix(setup.graph));
            summary.contraction_coefficient = contraction_coefficient(pi, setup.linkage, setup.params);
        } catch (const Error&) {
            summary.contraction_coefficient = std::numeric_limits<double>::quiet_NaN();
        }
    } else {
        summary.contraction_coefficient = std::numeric_limits<double>::quiet_NaN();
    }
    return summary;
}

DriftReport empirical_drift(const CampaignSummary& campaign, std::size_t t_min) {
    RunningStats overall;
    std::map<std::size_t, RunningStats> by_time;
    for (const DriftSample& s : campaign.drift_samples) {
        if (s.xi < campaign.drift_cutoff || !(s.xi > 0.0)) continue;
        const double ratio = (s.xi_next - s.xi) / s.xi;
        by_time[s.t].add(ratio);
        if (s.t >= t_min) overall.add(ratio);
    }
    if (overall.count() == 0)
        throw InsufficientSamples("no drift samples with t >= " + std::to_string(t_min) +
                                  " and xi >= " + std::to_string(campaign.drift_cutoff));

    DriftReport report;
    report.asymptotic_coefficient = campaign.contraction_coefficient;
    report.empirical_drift_ratio = overall.mean();
    report.standard_error = overall.standard_error();
    report.samples = overall.count();
    report.within_bound =
        report.empirical_drift_ratio <= report.asymptotic_coefficient + 3.0 * report.standard_error;

    for (auto it = by_time.rbegin(); it != by_time.rend(); ++it) {
        if (it->second.mean() >= 0.0) break;
        report.t0_estimate = it->first;
    }
    return report;
}

ErgodicComparison empirical_vs_ergodic(const WeightedDigraph& g, const LinkageSpec& spec,
                                       std::size_t t_max, std::size_t burn_in, std::uint64_t seed,
                                       std::size_t batches) {
    if (!is_strongly_connected(g)) throw AssumptionViolated(Assumption::StronglyConnected, "");
    if (const auto period = cycle_gcd(g); period != 1)
        throw AssumptionViolated(Assumption::Aperiodic, "cycle gcd " + std::to_string(period));
    if (burn_in >= t_max) throw InvalidArgument("t_max must exceed burn_in");
    const std::size_t samples = t_max - burn_in;
    batches = std::clamp<std::size_t>(batches, 1, samples);

    const Eigen::MatrixXd q = transition_matrix(g);
    const auto n = static_cast<Eigen::Index>(spec.size());
    Rng rng(seed);
    AgentPositions pos = AgentPositions::uniform(spec.size(), g.size(), rng);

    // Batch b covers samples [b * samples / batches, (b + 1) * samples / batches).
    std::vector<Eigen::MatrixXd> batch_means;
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd batch = Eigen::MatrixXd::Zero(n, n);
    std::size_t batch_index = 0, batch_count = 0;
    for (std::size_t t = 0; t < t_max; ++t) {
        const NeighborhoodSnapshot s = sample_neighborhood(pos, spec, rng, t);
        pos = step_walks(pos, q, rng);
        if (t < burn_in) continue;
        total += s.laplacian;
        batch += s.laplacian;
        ++batch_count;
        const std::size_t k = t - burn_in + 1;
        if (k == (batch_index + 1) * samples / batches) {
            batch_means.push_back(batch / static_cast<double>(batch_count));
            batch.setZero();
            batch_count = 0;
            ++batch_index;
        }
    }

    ErgodicComparison out;
    out.samples = samples;
    out.time_average = total / static_cast<double>(samples);
    out.ergodic = ergodic_laplacian(stationary_distribution(q), spec);
    out.max_deviation = (out.time_average - out.ergodic).cwiseAbs().maxCoeff();
    out.standard_error = Eigen::MatrixXd::Zero(n, n);
    if (batch_means.size() >= 2) {
        const auto b = static_cast<double>(batch_means.size());
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
        for (const auto& m : batch_means) mean += m;
        mean /= b;
        Eigen::MatrixXd var = Eigen::MatrixXd::Zero(n, n);
        for (const auto& m : batch_means) var += (m - mean).cwiseAbs2();
        var /= (b - 1.0);
        out.standard_error = (var / b).cwiseSqrt();
    }
    return out;
}

}  // namespace movnet
