#pragma once

#include "movnet/analysis.hpp"
#include "movnet/neighborhood.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace movnet {

/// Experiment description as read from a JSON document:
///
///   {
///     "graph":   {"m": 2, "weights": [0, 1, 1, 1]},           // row-major m*m
///     "linkage": {"n": 2, "B": [...], "P": [...],             // row-major n*n
///                 "mode": "symmetric"},                       // or "b"/"p" scalars
///     "epsilon": 0.1, "t_max": 20000, "trials": 500,
///     "master_seed": 42, "threshold": 1e-8,
///     "x0": [0, 1] | "spread" | "uniform(lo,hi)",
///     "pos0": [0, 1] | "uniform",
///     "overrides": {"force_epsilon": false, "skip_assumption_checks": false}
///   }
///
/// Everything except "graph" has a default. Node indices are 0-based.
struct ExperimentConfig {
    Eigen::MatrixXd weights;
    Eigen::MatrixXd b;
    Eigen::MatrixXd p;
    ArcMode mode = ArcMode::Symmetric;
    double epsilon = 0.1;
    std::size_t t_max = 20000;
    std::size_t trials = 500;
    std::optional<std::uint64_t> master_seed;
    double threshold = kConsensusThreshold;
    InitialStates x0;
    InitialPositions pos0;
    bool force_epsilon = false;
    bool skip_assumption_checks = false;

    bool has_linkage() const noexcept { return b.size() > 0; }
    WeightedDigraph graph() const;
    LinkageSpec linkage() const;
    /// Validates epsilon (unless forced) and assembles the trial setup.
    TrialSetup setup() const;

    bool operator==(const ExperimentConfig& other) const;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Parses text; JSON syntax errors are reported with line and column.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

/// Built-in fixtures:
///  - "default": m = 5 aperiodic digraph, n = 4 agents, b = 1, p = 0.5,
///    eps = 0.1, x0 = (0, 1, 2, 3).
///  - "pair": a single node with two always-linked agents, b = 1, p = 1,
///    eps = 0.25, x0 = (1, -1); xi shrinks by (1 - 2 eps)^2 every step.
/// Throws ConfigError for unknown names.
ExperimentConfig named_fixture(std::string_view name);

}  // namespace movnet
