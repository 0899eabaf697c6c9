#include "movnet/cli.hpp"

#include "movnet/analysis.hpp"
#include "movnet/config.hpp"
#include "movnet/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

namespace movnet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string fixture;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> t_max;
    std::size_t jobs = 0;
    std::string out_dir = ".";
    bool force_epsilon = false;
    std::size_t drift_t_min = 50;
    std::string dump_snapshots;
};

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

ExperimentConfig resolve_config(const CommonOptions& opts) {
    if (opts.config_path.empty() == opts.fixture.empty())
        throw ConfigError("give exactly one of --config <path> or --fixture <name>");
    ExperimentConfig c =
        opts.fixture.empty() ? load_config(opts.config_path) : named_fixture(opts.fixture);
    if (opts.seed) {
        c.master_seed = *opts.seed;
    } else if (!c.master_seed) {
        c.master_seed = 0;
        if (const char* env = std::getenv("MOVNET_SEED")) {
            try {
                c.master_seed = std::stoull(env);
            } catch (const std::exception&) {
                throw ConfigError("MOVNET_SEED is not an unsigned integer: " + std::string(env));
            }
        }
    }
    if (opts.trials) c.trials = *opts.trials;
    if (opts.t_max) c.t_max = *opts.t_max;
    if (opts.force_epsilon) c.force_epsilon = true;
    if (c.trials == 0) throw ConfigError("trials must be at least 1");
    return c;
}

void require_linkage(const ExperimentConfig& c) {
    if (!c.has_linkage()) throw ConfigError("config field 'linkage': missing");
}

fs::path prepare_out(const CommonOptions& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream f(path);
    f << doc.dump(2) << '\n';
}

int analyze_graph(const ExperimentConfig& c, const CommonOptions& opts, std::ostream& out) {
    const WeightedDigraph g = c.graph();
    json report;
    report["command"] = "analyze-graph";
    report["config"] = to_json(c);

    const bool connected = is_strongly_connected(g);
    report["strongly_connected"] = connected;
    out << "strongly connected: " << (connected ? "yes" : "no") << '\n';

    std::optional<std::size_t> period;
    if (connected) {
        try {
            period = cycle_gcd(g);
        } catch (const Degenerate& e) {
            out << "cycle gcd: undefined (" << e.what() << ")\n";
        }
    }
    report["cycle_gcd"] = period ? json(*period) : json(nullptr);
    const bool ergodic = connected && period == 1;
    report["assumption_1"] = ergodic;

    std::string verdict;
    if (!connected) verdict = "not strongly connected: Assumption 1 fails";
    else if (!period) verdict = "no cycles: Assumption 1 fails";
    else if (*period != 1)
        verdict = "periodic (gcd " + std::to_string(*period) + "): Assumption 1 fails";
    else verdict = "aperiodic (gcd 1): Assumption 1 holds";
    report["verdict"] = verdict;
    if (period) out << "cycle gcd: " << *period << '\n';
    out << verdict << '\n';

    std::optional<StationaryDistribution> pi;
    if (ergodic) {
        const Eigen::MatrixXd q = transition_matrix(g);
        pi = stationary_distribution(q);
        const double rho = slem(q);
        report["stationary"] = vector_json(pi->pi);
        report["stationary_residual"] = pi->residual;
        report["slem"] = rho;
        report["collision_probability"] = pi->collision_probability();
        out << std::setprecision(10) << "stationary distribution:";
        for (const double v : pi->pi) out << ' ' << v;
        out << "\nslem (rho): " << rho << "\nsum pi_k^2: " << pi->collision_probability() << '\n';
    }

    if (c.has_linkage()) {
        const LinkageSpec spec = c.linkage();
        const double delta = spec.max_weighted_degree();
        report["delta"] = delta;
        report["epsilon_interval"] = {0.0, 1.0 / delta};
        out << "Delta: " << delta << "\nvalid epsilon interval: (0, " << 1.0 / delta << ")\n";
        if (pi) {
            try {
                const ProtocolParams params(c.epsilon, delta, c.force_epsilon);
                const double coeff = contraction_coefficient(*pi, spec, params);
                report["contraction_coefficient"] = coeff;
                out << "contraction coefficient (epsilon = " << c.epsilon << "): " << coeff << '\n';
            } catch (const InvalidEpsilon& e) {
                out << "contraction coefficient: n/a (" << e.what() << ")\n";
            }
        }
    }

    write_json(prepare_out(opts) / "analyze_graph.json", report);
    return ergodic ? kExitOk : kExitAssumption;
}

json outcome_json(std::size_t index, const TrialOutcome& o) {
    return {{"trial", index},
            {"seed", o.seed},
            {"consensus_time", o.consensus_time ? json(*o.consensus_time) : json(nullptr)},
            {"final_xi", o.final_xi},
            {"decay_rate", o.decay_rate},
            {"max_conservation_residual", o.max_conservation_residual},
            {"steps", o.steps}};
}

int simulate(const ExperimentConfig& c, const CommonOptions& opts, std::ostream& out) {
    require_linkage(c);
    const TrialSetup setup = c.setup();
    const std::uint64_t seed = trial_seed(*c.master_seed, 0);
    const fs::path dir = prepare_out(opts);

    TrialOptions trial_opts;
    std::ofstream dump;
    if (!opts.dump_snapshots.empty()) {
        dump.open(opts.dump_snapshots);
        if (!dump) throw ConfigError("cannot open snapshot dump " + opts.dump_snapshots);
        trial_opts.observer = [&dump](const StepView& v) {
            write_snapshot_record(dump, v.positions, v.snapshot);
        };
    }
    const ConsensusTrace trace = run_seeded_trial(setup, seed, trial_opts);

    std::ofstream csv(dir / "trace.csv");
    csv << "t,xi,conservation_residual\n" << std::setprecision(17);
    for (std::size_t t = 0; t < trace.xi.size(); ++t)
        csv << t << ',' << trace.xi[t] << ',' << trace.conservation_residual[t] << '\n';

    json summary;
    summary["command"] = "simulate";
    summary["config"] = to_json(c);
    summary["master_seed"] = *c.master_seed;
    summary["seed"] = seed;
    summary["consensus_time"] = trace.consensus_time ? json(*trace.consensus_time) : json(nullptr);
    summary["final_state"] = vector_json(trace.final_state);
    summary["final_xi"] = trace.finite ? json(trace.xi.back()) : json(nullptr);
    summary["finite"] = trace.finite;
    summary["steps"] = trace.steps();
    summary["decay_rate"] = fit_decay_rate(trace, c.threshold);
    if (!setup.params.in_stable_range()) summary["warning"] = "epsilon forced outside (0, 1/Delta)";
    if (setup.linkage.mode() == ArcMode::Independent)
        summary["warning_arc_mode"] =
            "independent arc mode: snapshots need not be balanced and the state sum may drift";
    write_json(dir / "simulate_summary.json", summary);

    if (trace.consensus_time) {
        out << "consensus reached at t = " << *trace.consensus_time << '\n';
        return kExitOk;
    }
    out << "no consensus by t_max = " << c.t_max << " (final xi = "
        << (trace.finite ? trace.xi.back() : std::numeric_limits<double>::infinity()) << ")\n";
    return kExitNoConsensus;
}

int monte_carlo(const ExperimentConfig& c, const CommonOptions& opts, std::ostream& out) {
    require_linkage(c);
    const TrialSetup setup = c.setup();
    const CampaignSummary campaign = run_campaign(setup, c.trials, *c.master_seed, opts.jobs);
    const fs::path dir = prepare_out(opts);

    json doc;
    doc["command"] = "monte-carlo";
    doc["config"] = to_json(c);
    doc["master_seed"] = campaign.master_seed;
    doc["trials"] = campaign.trials;
    doc["threshold"] = campaign.threshold;
    doc["consensus_fraction"] = campaign.consensus_fraction;
    doc["decay_rate"] = campaign.decay_rate;
    doc["max_conservation_residual"] = campaign.max_conservation_residual;
    doc["contraction_coefficient"] = campaign.contraction_coefficient;
    doc["drift_cutoff"] = campaign.drift_cutoff;
    doc["drift_sample_count"] = campaign.drift_samples.size();
    doc["drift_samples_file"] = "drift_samples.csv";
    doc["drift_t_min"] = opts.drift_t_min;

    out << std::setprecision(10) << "trials: " << campaign.trials
        << "\nconsensus fraction: " << campaign.consensus_fraction
        << "\nmedian decay rate: " << campaign.decay_rate << '\n';
    try {
        const DriftReport r = empirical_drift(campaign, opts.drift_t_min);
        doc["drift"] = {{"asymptotic_coefficient", r.asymptotic_coefficient},
                        {"empirical_drift_ratio", r.empirical_drift_ratio},
                        {"standard_error", r.standard_error},
                        {"samples", r.samples},
                        {"t0_estimate", r.t0_estimate ? json(*r.t0_estimate) : json(nullptr)},
                        {"within_bound", r.within_bound}};
        out << "drift ratio (t >= " << opts.drift_t_min << "): " << r.empirical_drift_ratio
            << " +/- " << r.standard_error << " (asymptotic coefficient "
            << r.asymptotic_coefficient << ")\n";
    } catch (const InsufficientSamples& e) {
        doc["drift"] = {{"error", e.what()}};
        out << "drift ratio: n/a (" << e.what() << ")\n";
    }

    json trials = json::array();
    for (std::size_t i = 0; i < campaign.outcomes.size(); ++i)
        trials.push_back(outcome_json(i, campaign.outcomes[i]));
    doc["trial_outcomes"] = std::move(trials);
    write_json(dir / "monte_carlo_summary.json", doc);

    std::ofstream csv(dir / "drift_samples.csv");
    csv << "trial,t,xi,xi_next\n" << std::setprecision(17);
    for (const DriftSample& s : campaign.drift_samples)
        csv << s.trial << ',' << s.t << ',' << s.xi << ',' << s.xi_next << '\n';

    return campaign.consensus_fraction == 1.0 ? kExitOk : kExitNoConsensus;
}

int ergodic(const ExperimentConfig& c, const CommonOptions& opts, std::ostream& out) {
    require_linkage(c);
    const WeightedDigraph g = c.graph();
    const LinkageSpec spec = c.linkage();
    if (!is_strongly_connected(g)) throw AssumptionViolated(Assumption::StronglyConnected, "");
    if (const auto period = cycle_gcd(g); period != 1)
        throw AssumptionViolated(Assumption::Aperiodic, "cycle gcd " + std::to_string(period));

    const StationaryDistribution pi = stationary_distribution(transition_matrix(g));
    const Eigen::MatrixXd ea = ergodic_adjacency(pi, spec);
    const Eigen::MatrixXd el = ergodic_laplacian(pi, spec);

    json doc;
    doc["command"] = "ergodic";
    doc["config"] = to_json(c);
    doc["stationary"] = vector_json(pi.pi);
    doc["collision_probability"] = pi.collision_probability();
    doc["ergodic_adjacency"] = matrix_json(ea);
    doc["ergodic_laplacian"] = matrix_json(el);
    doc["ergodic_laplacian_row_sums"] = vector_json(el.rowwise().sum());

    const Eigen::IOFormat fmt(10, 0, " ", "\n", "  ");
    out << "E*(A) =\n" << ea.format(fmt) << "\nE*(L) =\n" << el.format(fmt) << '\n';

    if (opts.t_max) {
        const std::size_t burn_in = *opts.t_max / 10;
        const ErgodicComparison cmp =
            empirical_vs_ergodic(g, spec, *opts.t_max, burn_in, *c.master_seed);
        doc["empirical"] = {{"t_max", *opts.t_max},
                            {"burn_in", burn_in},
                            {"seed", *c.master_seed},
                            {"time_average_laplacian", matrix_json(cmp.time_average)},
                            {"standard_error", matrix_json(cmp.standard_error)},
                            {"max_deviation", cmp.max_deviation}};
        out << "time-average deviation over " << cmp.samples << " steps: " << cmp.max_deviation
            << '\n';
    }
    write_json(prepare_out(opts) / "ergodic.json", doc);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Consensus over moving-neighbourhood random networks", "movnet"};
    app.require_subcommand(1);
    CommonOptions opts;

    auto add_common = [&opts](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Experiment configuration (JSON)");
        sub->add_option("--fixture", opts.fixture, "Built-in fixture: default or pair");
        sub->add_option("--seed", opts.seed, "Master seed (fallback: config, then MOVNET_SEED)");
        sub->add_option("--trials", opts.trials, "Number of trials");
        sub->add_option("--t-max", opts.t_max, "Steps per trial");
        sub->add_option("--jobs", opts.jobs, "Worker threads (0 = all processors)");
        sub->add_option("--out", opts.out_dir, "Output directory");
        sub->add_flag("--force-epsilon", opts.force_epsilon, "Allow epsilon outside (0, 1/Delta)");
    };
    CLI::App* analyze = app.add_subcommand("analyze-graph", "Connectivity, period, stationary law, SLEM");
    CLI::App* sim = app.add_subcommand("simulate", "Run one trial and write its trace");
    CLI::App* mc = app.add_subcommand("monte-carlo", "Run a seeded campaign of trials");
    CLI::App* erg = app.add_subcommand("ergodic", "Ergodic-limit adjacency and Laplacian");
    for (CLI::App* sub : {analyze, sim, mc, erg}) add_common(sub);
    sim->add_option("--dump-snapshots", opts.dump_snapshots, "Write one JSON line per snapshot");
    mc->add_option("--drift-t-min", opts.drift_t_min, "First step used for the drift estimate");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const ExperimentConfig config = resolve_config(opts);
        if (analyze->parsed()) return analyze_graph(config, opts, out);
        if (sim->parsed()) return simulate(config, opts, out);
        if (mc->parsed()) return monte_carlo(config, opts, out);
        return ergodic(config, opts, out);
    } catch (const AssumptionViolated& e) {
        err << "error: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace movnet
