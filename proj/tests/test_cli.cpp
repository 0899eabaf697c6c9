#include "movnet/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = movnet::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("movnet_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump();
    return p;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors") {
        CHECK(cli({}).code == movnet::kExitUsage);
        CHECK(cli({"frobnicate"}).code == movnet::kExitUsage);
        CHECK(cli({"simulate"}).code == movnet::kExitUsage);
        const fs::path dir = scratch("usage");
        CHECK(cli({"simulate", "--fixture", "default", "--config", "x.json"}).code == movnet::kExitUsage);
        CHECK(cli({"simulate", "--fixture", "nope", "--out", dir.string()}).code == movnet::kExitUsage);
        CHECK(cli({"simulate", "--config", (dir / "missing.json").string()}).code == movnet::kExitUsage);
        CHECK(cli({"monte-carlo", "--fixture", "pair", "--trials", "0", "--out", dir.string()}).code ==
              movnet::kExitUsage);
        CHECK(cli({"simulate", "--fixture", "pair", "--seed", "abc"}).code == movnet::kExitUsage);
        std::ofstream(dir / "bad.json") << "{\"graph\": ";
        const Run bad = cli({"analyze-graph", "--config", (dir / "bad.json").string()});
        CHECK(bad.code == movnet::kExitUsage);
        CHECK(bad.err.find("JSON") != std::string::npos);
        CHECK(cli({"--help"}).code == movnet::kExitOk);
    }

    TEST_CASE("analyze-graph on the default fixture") {
        const fs::path dir = scratch("analyze");
        const Run r = cli({"analyze-graph", "--fixture", "default", "--out", dir.string()});
        CHECK(r.code == movnet::kExitOk);
        const json doc = json::parse(slurp(dir / "analyze_graph.json"));
        CHECK(doc["strongly_connected"] == true);
        CHECK(doc["cycle_gcd"] == 1);
        CHECK(doc["delta"] == 3.0);
        double total = 0.0;
        for (const double v : doc["stationary"]) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(doc["slem"].get<double>() < 1.0);
        CHECK(doc["contraction_coefficient"].get<double>() < 0.0);
    }

    TEST_CASE("analyze-graph on a directed 3-cycle") {
        const fs::path dir = scratch("cycle");
        const fs::path config = write_config(dir, {{"graph", {{"m", 3}, {"weights", {0, 1, 0, 0, 0, 1, 1, 0, 0}}}}});
        const Run r = cli({"analyze-graph", "--config", config.string(), "--out", dir.string()});
        CHECK(r.code == movnet::kExitAssumption);
        CHECK(r.out.find("periodic (gcd 3)") != std::string::npos);
        const json doc = json::parse(slurp(dir / "analyze_graph.json"));
        CHECK(doc["cycle_gcd"] == 3);
        CHECK(doc["assumption_1"] == false);

        const fs::path with_agents = write_config(
            dir, {{"graph", {{"m", 3}, {"weights", {0, 1, 0, 0, 0, 1, 1, 0, 0}}}},
                  {"linkage", {{"n", 2}, {"b", 1.0}, {"p", 0.5}}}});
        CHECK(cli({"simulate", "--config", with_agents.string(), "--out", dir.string()}).code ==
              movnet::kExitAssumption);
        CHECK(cli({"monte-carlo", "--config", with_agents.string(), "--trials", "2", "--out", dir.string()})
                  .code == movnet::kExitAssumption);
        CHECK(cli({"ergodic", "--config", with_agents.string(), "--out", dir.string()}).code ==
              movnet::kExitAssumption);
    }

    TEST_CASE("simulate writes a trace") {
        const fs::path dir = scratch("simulate");
        const fs::path dump = dir / "snapshots.jsonl";
        const Run r = cli({"simulate", "--fixture", "default", "--seed", "3", "--t-max", "3000", "--out",
                           dir.string(), "--dump-snapshots", dump.string()});
        CHECK(r.code == movnet::kExitOk);
        const json summary = json::parse(slurp(dir / "simulate_summary.json"));
        CHECK(summary["master_seed"] == 3);
        CHECK(summary["consensus_time"].is_number());
        std::istringstream trace(slurp(dir / "trace.csv"));
        std::string line;
        std::getline(trace, line);
        CHECK(line == "t,xi,conservation_residual");
        std::size_t rows = 0;
        while (std::getline(trace, line)) ++rows;
        CHECK(rows == 3001);
        std::istringstream records(slurp(dump));
        std::size_t snapshots = 0;
        while (std::getline(records, line)) {
            const json rec = json::parse(line);
            CHECK(rec.contains("arcs"));
            CHECK(rec["positions"].size() == 4);
            ++snapshots;
        }
        CHECK(snapshots == 3000);
    }

    TEST_CASE("seed precedence") {
        const fs::path a = scratch("seed_a");
        const fs::path b = scratch("seed_b");
        const fs::path c = scratch("seed_c");
        ::setenv("MOVNET_SEED", "17", 1);
        CHECK(cli({"simulate", "--fixture", "default", "--t-max", "50", "--out", a.string()}).code ==
              movnet::kExitNoConsensus);
        CHECK(cli({"simulate", "--fixture", "default", "--t-max", "50", "--seed", "17", "--out", b.string()})
                  .code == movnet::kExitNoConsensus);
        CHECK(cli({"simulate", "--fixture", "default", "--t-max", "50", "--seed", "18", "--out", c.string()})
                  .code == movnet::kExitNoConsensus);
        ::unsetenv("MOVNET_SEED");
        CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
        CHECK(slurp(a / "trace.csv") != slurp(c / "trace.csv"));
        CHECK(json::parse(slurp(a / "simulate_summary.json"))["master_seed"] == 17);

        ::setenv("MOVNET_SEED", "not-a-number", 1);
        CHECK(cli({"simulate", "--fixture", "pair", "--out", a.string()}).code == movnet::kExitUsage);
        ::unsetenv("MOVNET_SEED");
    }

    TEST_CASE("monte-carlo summaries are reproducible") {
        const fs::path a = scratch("mc_a");
        const fs::path b = scratch("mc_b");
        const std::vector<std::string> common{"monte-carlo", "--fixture", "default", "--seed", "42",
                                              "--trials", "8", "--t-max", "2000"};
        auto with_out = [&](const fs::path& dir, const char* jobs) {
            auto args = common;
            args.insert(args.end(), {"--jobs", jobs, "--out", dir.string()});
            return cli(args);
        };
        CHECK(with_out(a, "1").code == movnet::kExitOk);
        CHECK(with_out(b, "4").code == movnet::kExitOk);
        CHECK(slurp(a / "monte_carlo_summary.json") == slurp(b / "monte_carlo_summary.json"));
        CHECK(slurp(a / "drift_samples.csv") == slurp(b / "drift_samples.csv"));
        const json doc = json::parse(slurp(a / "monte_carlo_summary.json"));
        CHECK(doc["consensus_fraction"] == 1.0);
        CHECK(doc["trial_outcomes"].size() == 8);
        CHECK(doc["drift"]["empirical_drift_ratio"].get<double>() < 0.0);
    }

    TEST_CASE("forced epsilon diverges") {
        const fs::path dir = scratch("forced");
        const fs::path config = write_config(dir, {{"graph", {{"m", 1}, {"weights", {1}}}},
                                                   {"linkage", {{"n", 2}, {"b", 1.0}, {"p", 1.0}}},
                                                   {"epsilon", 3.0},
                                                   {"x0", {1.0, -1.0}},
                                                   {"t_max", 100}});
        CHECK(cli({"simulate", "--config", config.string(), "--out", dir.string()}).code == movnet::kExitUsage);
        const Run r = cli({"simulate", "--config", config.string(), "--force-epsilon", "--out", dir.string()});
        CHECK(r.code == movnet::kExitNoConsensus);
        const json summary = json::parse(slurp(dir / "simulate_summary.json"));
        CHECK(summary.contains("warning"));
        CHECK(summary["consensus_time"].is_null());
    }

    TEST_CASE("ergodic") {
        const fs::path dir = scratch("ergodic");
        CHECK(cli({"ergodic", "--fixture", "default", "--t-max", "20000", "--seed", "1", "--out", dir.string()})
                  .code == movnet::kExitOk);
        const json doc = json::parse(slurp(dir / "ergodic.json"));
        for (const double s : doc["ergodic_laplacian_row_sums"]) CHECK(std::abs(s) <= 1e-12);
        CHECK(doc["empirical"]["max_deviation"].get<double>() < 0.05);
    }
}
