#include "movnet/analysis.hpp"
#include "movnet/config.hpp"
#include "movnet/consensus.hpp"
#include "movnet/digraph.hpp"
#include "movnet/error.hpp"
#include "movnet/markov.hpp"
#include "movnet/neighborhood.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace movnet;

namespace {

StationaryDistribution as_stationary(const Eigen::VectorXd& pi) { return {pi, 0.0}; }

LinkageSpec make_spec(const Eigen::MatrixXd& b, const Eigen::MatrixXd& p, const std::string& mode) {
    return LinkageSpec(b, p, arc_mode_from_string(mode));
}

py::dict trace_dict(const ConsensusTrace& trace) {
    py::dict d;
    d["seed"] = trace.seed;
    d["xi"] = trace.xi;
    d["conservation_residual"] = trace.conservation_residual;
    d["consensus_time"] = trace.consensus_time;
    d["final_state"] = Eigen::VectorXd(trace.final_state);
    d["finite"] = trace.finite;
    return d;
}

ExperimentConfig config_from(const std::optional<std::string>& config_json,
                             const std::optional<std::string>& fixture) {
    if (config_json.has_value() == fixture.has_value())
        throw ConfigError("give exactly one of config or fixture");
    return fixture ? named_fixture(*fixture) : parse_config_text(*config_json);
}

}  // namespace

PYBIND11_MODULE(_movnet, m) {
    m.doc() = "Consensus over moving-neighbourhood random networks (C++ core).";

    py::register_exception<Error>(m, "MovnetError");

    m.def("out_degrees", [](const Eigen::MatrixXd& w) { return out_degrees(WeightedDigraph(w)); },
          py::arg("weights"));
    m.def("is_strongly_connected",
          [](const Eigen::MatrixXd& w) { return is_strongly_connected(WeightedDigraph(w)); },
          py::arg("weights"));
    m.def("cycle_gcd", [](const Eigen::MatrixXd& w) { return cycle_gcd(WeightedDigraph(w)); },
          py::arg("weights"));
    m.def("transition_matrix",
          [](const Eigen::MatrixXd& w) { return transition_matrix(WeightedDigraph(w)); },
          py::arg("weights"));

    m.def("stationary_distribution",
          [](const Eigen::MatrixXd& q, double tol) {
              const auto s = stationary_distribution(q, tol);
              return py::make_tuple(s.pi, s.residual);
          },
          py::arg("q"), py::arg("tol") = kStationaryTolerance,
          "Returns (pi, residual) with residual = ||pi^T Q - pi^T||_inf.");
    m.def("slem", &slem, py::arg("q"));
    m.def("mixing_curve",
          [](const Eigen::MatrixXd& q, std::size_t t_max) {
              const auto profile = mixing_curve(q, stationary_distribution(q), t_max);
              return py::make_tuple(profile.rho, profile.tv_curve);
          },
          py::arg("q"), py::arg("t_max"));

    m.def("schur_product", &schur_product, py::arg("c"), py::arg("e"));
    m.def("expected_adjacency",
          [](const Eigen::MatrixXd& dists, const Eigen::MatrixXd& b, const Eigen::MatrixXd& p,
             const std::string& mode) { return expected_adjacency(dists, make_spec(b, p, mode)); },
          py::arg("dists"), py::arg("b"), py::arg("p"), py::arg("mode") = "symmetric");
    m.def("ergodic_adjacency",
          [](const Eigen::VectorXd& pi, const Eigen::MatrixXd& b, const Eigen::MatrixXd& p,
             const std::string& mode) {
              return ergodic_adjacency(as_stationary(pi), make_spec(b, p, mode));
          },
          py::arg("pi"), py::arg("b"), py::arg("p"), py::arg("mode") = "symmetric");
    m.def("ergodic_laplacian",
          [](const Eigen::VectorXd& pi, const Eigen::MatrixXd& b, const Eigen::MatrixXd& p,
             const std::string& mode) {
              return ergodic_laplacian(as_stationary(pi), make_spec(b, p, mode));
          },
          py::arg("pi"), py::arg("b"), py::arg("p"), py::arg("mode") = "symmetric");

    m.def("disagreement", [](const Eigen::VectorXd& x) { return disagreement(x); }, py::arg("x"));
    m.def("decompose",
          [](const Eigen::VectorXd& x) {
              auto d = decompose(x);
              return py::make_tuple(d.parallel, d.perpendicular);
          },
          py::arg("x"));
    m.def("contraction_coefficient",
          [](const Eigen::VectorXd& pi, const Eigen::MatrixXd& b, const Eigen::MatrixXd& p,
             double epsilon) {
              const LinkageSpec spec = make_spec(b, p, "symmetric");
              return contraction_coefficient(as_stationary(pi), spec,
                                             ProtocolParams(epsilon, spec.max_weighted_degree()));
          },
          py::arg("pi"), py::arg("b"), py::arg("p"), py::arg("epsilon"));

    m.def("run_trial",
          [](const Eigen::MatrixXd& w, const Eigen::MatrixXd& b, const Eigen::MatrixXd& p,
             double epsilon, const Eigen::VectorXd& x0, const std::vector<std::size_t>& pos0,
             std::size_t t_max, double threshold, std::uint64_t seed, const std::string& mode,
             bool force_epsilon, bool skip_assumption_checks) {
              const LinkageSpec spec = make_spec(b, p, mode);
              const ProtocolParams params(epsilon, spec.max_weighted_degree(), force_epsilon);
              TrialOptions options;
              options.skip_assumption_checks = skip_assumption_checks;
              ConsensusTrace trace;
              {
                  py::gil_scoped_release release;
                  trace = run_trial(WeightedDigraph(w), spec, params, x0, AgentPositions{pos0},
                                    t_max, threshold, seed, options);
              }
              return trace_dict(trace);
          },
          py::arg("weights"), py::arg("b"), py::arg("p"), py::arg("epsilon"), py::arg("x0"),
          py::arg("pos0"), py::arg("t_max"), py::arg("threshold") = kConsensusThreshold,
          py::arg("seed") = 0, py::arg("mode") = "symmetric", py::arg("force_epsilon") = false,
          py::arg("skip_assumption_checks") = false);

    m.def("fixture_config",
          [](const std::string& name) { return to_json(named_fixture(name)).dump(); },
          py::arg("name"), "JSON text of a built-in fixture configuration.");

    m.def("run_campaign",
          [](std::optional<std::string> config_json, std::optional<std::string> fixture,
             std::optional<std::size_t> trials, std::uint64_t master_seed, std::size_t jobs,
             std::size_t drift_t_min) {
              ExperimentConfig c = config_from(config_json, fixture);
              const std::size_t count = trials.value_or(c.trials);
              const TrialSetup setup = c.setup();
              CampaignSummary s;
              {
                  py::gil_scoped_release release;
                  s = run_campaign(setup, count, master_seed, jobs);
              }
              py::dict d;
              d["trials"] = s.trials;
              d["master_seed"] = s.master_seed;
              d["consensus_fraction"] = s.consensus_fraction;
              d["decay_rate"] = s.decay_rate;
              d["max_conservation_residual"] = s.max_conservation_residual;
              d["contraction_coefficient"] = s.contraction_coefficient;
              d["drift_sample_count"] = s.drift_samples.size();
              try {
                  const DriftReport r = empirical_drift(s, drift_t_min);
                  d["drift_ratio"] = r.empirical_drift_ratio;
                  d["drift_standard_error"] = r.standard_error;
                  d["t0_estimate"] = r.t0_estimate;
              } catch (const InsufficientSamples&) {
                  d["drift_ratio"] = py::none();
              }
              return d;
          },
          py::arg("config") = py::none(), py::arg("fixture") = py::none(),
          py::arg("trials") = py::none(), py::arg("master_seed") = 0, py::arg("jobs") = 0,
          py::arg("drift_t_min") = 50);
}
