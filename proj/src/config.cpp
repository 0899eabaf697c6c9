#include "movnet/config.hpp"

#include "movnet/error.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

namespace movnet {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) fail(path + key, "missing");
    return obj.at(key);
}

template <typename T>
T read(const json& value, const std::string& field) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        fail(field, e.what());
    }
}

std::size_t read_count(const json& value, const std::string& field) {
    if (!value.is_number_integer() || value.get<long long>() < 0)
        fail(field, "expected a non-negative integer");
    return value.get<std::size_t>();
}

Eigen::MatrixXd read_matrix(const json& value, std::size_t dim, const std::string& field) {
    if (!value.is_array()) fail(field, "expected a row-major list of numbers");
    if (value.size() != dim * dim)
        fail(field, "expected " + std::to_string(dim * dim) + " entries, got " +
                        std::to_string(value.size()));
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const json& entry = value[static_cast<std::size_t>(i * d + j)];
            if (!entry.is_number()) fail(field, "entry " + std::to_string(i * d + j) + " is not a number");
            out(i, j) = entry.get<double>();
        }
    return out;
}

json write_matrix(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

Eigen::MatrixXd off_diagonal(std::size_t n, double value) {
    const auto d = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, value);
    m.diagonal().setZero();
    return m;
}

InitialStates read_x0(const json& value) {
    InitialStates x0;
    if (value.is_array()) {
        x0.kind = InitialStates::Kind::Explicit;
        x0.values = read<std::vector<double>>(value, "x0");
        return x0;
    }
    if (!value.is_string()) fail("x0", "expected a list, \"spread\" or \"uniform(lo,hi)\"");
    const std::string text = value.get<std::string>();
    if (text == "spread") {
        x0.kind = InitialStates::Kind::Spread;
        return x0;
    }
    static const std::regex uniform(R"(\s*uniform\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*)");
    std::smatch match;
    if (!std::regex_match(text, match, uniform)) fail("x0", "unrecognised generator '" + text + "'");
    x0.kind = InitialStates::Kind::Uniform;
    try {
        x0.lo = std::stod(match[1].str());
        x0.hi = std::stod(match[2].str());
    } catch (const std::exception&) {
        fail("x0", "bad bounds in '" + text + "'");
    }
    if (!(x0.lo < x0.hi)) fail("x0", "uniform bounds need lo < hi");
    return x0;
}

json write_x0(const InitialStates& x0) {
    switch (x0.kind) {
        case InitialStates::Kind::Explicit: return x0.values;
        case InitialStates::Kind::Spread: return "spread";
        case InitialStates::Kind::Uniform: {
            std::ostringstream s;
            s.precision(17);
            s << "uniform(" << x0.lo << "," << x0.hi << ")";
            return s.str();
        }
    }
    return nullptr;
}

}  // namespace

WeightedDigraph ExperimentConfig::graph() const { return WeightedDigraph(weights); }

LinkageSpec ExperimentConfig::linkage() const { return LinkageSpec(b, p, mode); }

TrialSetup ExperimentConfig::setup() const {
    LinkageSpec spec = linkage();
    ProtocolParams params(epsilon, spec.max_weighted_degree(), force_epsilon);
    return TrialSetup{graph(), std::move(spec), params, x0, pos0, t_max, threshold,
                      skip_assumption_checks};
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
        return a.rows() == c.rows() && a.cols() == c.cols() && a == c;
    };
    return same(weights, o.weights) && same(b, o.b) && same(p, o.p) && mode == o.mode &&
           epsilon == o.epsilon && t_max == o.t_max && trials == o.trials &&
           master_seed == o.master_seed && threshold == o.threshold && x0 == o.x0 &&
           pos0 == o.pos0 && force_epsilon == o.force_epsilon &&
           skip_assumption_checks == o.skip_assumption_checks;
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected an object");
    ExperimentConfig c;

    const json& graph = require(doc, "graph", "");
    const std::size_t m = read_count(require(graph, "m", "graph."), "graph.m");
    if (m == 0) fail("graph.m", "must be positive");
    c.weights = read_matrix(require(graph, "weights", "graph."), m, "graph.weights");
    try {
        (void)c.graph();
    } catch (const Error& e) {
        fail("graph.weights", e.what());
    }

    if (doc.contains("linkage")) {
        const json& link = doc.at("linkage");
        const std::size_t n = read_count(require(link, "n", "linkage."), "linkage.n");
        if (n == 0) fail("linkage.n", "must be positive");
        if (link.contains("mode"))
            try {
                c.mode = arc_mode_from_string(read<std::string>(link.at("mode"), "linkage.mode"));
            } catch (const InvalidArgument& e) {
                fail("linkage.mode", e.what());
            }
        if (link.contains("B")) c.b = read_matrix(link.at("B"), n, "linkage.B");
        else if (link.contains("b")) c.b = off_diagonal(n, read<double>(link.at("b"), "linkage.b"));
        else fail("linkage.B", "missing (give B as a list or b as a scalar)");
        if (link.contains("P")) c.p = read_matrix(link.at("P"), n, "linkage.P");
        else if (link.contains("p")) c.p = off_diagonal(n, read<double>(link.at("p"), "linkage.p"));
        else fail("linkage.P", "missing (give P as a list or p as a scalar)");
        try {
            (void)c.linkage();
        } catch (const Error& e) {
            fail("linkage", e.what());
        }
    }

    if (doc.contains("epsilon")) c.epsilon = read<double>(doc.at("epsilon"), "epsilon");
    if (doc.contains("t_max")) c.t_max = read_count(doc.at("t_max"), "t_max");
    if (doc.contains("trials")) c.trials = read_count(doc.at("trials"), "trials");
    if (doc.contains("master_seed") && !doc.at("master_seed").is_null())
        c.master_seed = read<std::uint64_t>(doc.at("master_seed"), "master_seed");
    if (doc.contains("threshold")) c.threshold = read<double>(doc.at("threshold"), "threshold");
    if (!(c.threshold > 0.0)) fail("threshold", "must be positive");
    if (doc.contains("x0")) c.x0 = read_x0(doc.at("x0"));
    if (doc.contains("pos0")) {
        const json& pos = doc.at("pos0");
        if (pos.is_string() && pos.get<std::string>() == "uniform") {
            c.pos0.kind = InitialPositions::Kind::Uniform;
        } else if (pos.is_array()) {
            c.pos0.kind = InitialPositions::Kind::Explicit;
            c.pos0.nodes = read<std::vector<std::size_t>>(pos, "pos0");
            for (const std::size_t node : c.pos0.nodes)
                if (node >= m) fail("pos0", "node " + std::to_string(node) + " outside the graph");
        } else {
            fail("pos0", "expected a list of nodes or \"uniform\"");
        }
    }
    if (doc.contains("overrides")) {
        const json& o = doc.at("overrides");
        if (o.contains("force_epsilon"))
            c.force_epsilon = read<bool>(o.at("force_epsilon"), "overrides.force_epsilon");
        if (o.contains("skip_assumption_checks"))
            c.skip_assumption_checks =
                read<bool>(o.at("skip_assumption_checks"), "overrides.skip_assumption_checks");
    }

    if (c.has_linkage()) {
        const auto n = static_cast<std::size_t>(c.b.rows());
        if (c.x0.kind == InitialStates::Kind::Explicit && c.x0.values.size() != n)
            fail("x0", "expected " + std::to_string(n) + " entries");
        if (c.pos0.kind == InitialPositions::Kind::Explicit && c.pos0.nodes.size() != n)
            fail("pos0", "expected " + std::to_string(n) + " entries");
    }
    return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

json to_json(const ExperimentConfig& c) {
    json doc;
    doc["graph"] = {{"m", c.weights.rows()}, {"weights", write_matrix(c.weights)}};
    if (c.has_linkage())
        doc["linkage"] = {{"n", c.b.rows()},
                          {"B", write_matrix(c.b)},
                          {"P", write_matrix(c.p)},
                          {"mode", std::string(to_string(c.mode))}};
    doc["epsilon"] = c.epsilon;
    doc["t_max"] = c.t_max;
    doc["trials"] = c.trials;
    doc["master_seed"] = c.master_seed ? json(*c.master_seed) : json(nullptr);
    doc["threshold"] = c.threshold;
    doc["x0"] = write_x0(c.x0);
    doc["pos0"] = c.pos0.kind == InitialPositions::Kind::Uniform ? json("uniform") : json(c.pos0.nodes);
    doc["overrides"] = {{"force_epsilon", c.force_epsilon},
                        {"skip_assumption_checks", c.skip_assumption_checks}};
    return doc;
}

ExperimentConfig named_fixture(std::string_view name) {
    ExperimentConfig c;
    if (name == "default") {
        // Ring 0->1->2->3->4->0 with chords 1->3, 2->0, 4->2 and a loop at 0.
        c.weights = Eigen::MatrixXd::Zero(5, 5);
        c.weights(0, 0) = 1.0;
        c.weights(0, 1) = 2.0;
        c.weights(1, 2) = 1.0;
        c.weights(1, 3) = 2.0;
        c.weights(2, 3) = 3.0;
        c.weights(2, 0) = 1.0;
        c.weights(3, 4) = 1.5;
        c.weights(4, 0) = 1.0;
        c.weights(4, 2) = 0.5;
        c.b = off_diagonal(4, 1.0);
        c.p = off_diagonal(4, 0.5);
        c.epsilon = 0.1;
        c.x0.kind = InitialStates::Kind::Explicit;
        c.x0.values = {0.0, 1.0, 2.0, 3.0};
        c.t_max = 20000;
        c.trials = 500;
        c.threshold = kConsensusThreshold;
        return c;
    }
    if (name == "pair") {
        c.weights = Eigen::MatrixXd::Ones(1, 1);
        c.b = off_diagonal(2, 1.0);
        c.p = off_diagonal(2, 1.0);
        c.epsilon = 0.25;
        c.x0.kind = InitialStates::Kind::Explicit;
        c.x0.values = {1.0, -1.0};
        c.t_max = 200;
        c.trials = 1;
        return c;
    }
    throw ConfigError("unknown fixture '" + std::string(name) + "' (known: default, pair)");
}

}  // namespace movnet
