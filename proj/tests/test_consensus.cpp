#include "movnet/config.hpp"
#include "movnet/consensus.hpp"
#include "movnet/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

using movnet::AgentPositions;
using movnet::LinkageSpec;
using movnet::ProtocolParams;
using movnet::StateVector;
using movnet::WeightedDigraph;

namespace {

StateVector vec(std::initializer_list<double> v) {
    StateVector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double d : v) x(i++) = d;
    return x;
}

movnet::NeighborhoodSnapshot linked_pair() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 1) = a(1, 0) = 1.0;
    return movnet::NeighborhoodSnapshot::from_adjacency(a);
}

movnet::NeighborhoodSnapshot random_snapshot(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j && u(rng) < 0.4) a(i, j) = 0.1 + u(rng);
    return movnet::NeighborhoodSnapshot::from_adjacency(a);
}

}  // namespace

TEST_SUITE("consensus") {
    TEST_CASE("protocol parameters") {
        CHECK_NOTHROW(ProtocolParams(0.1, 3.0));
        CHECK_THROWS_AS(ProtocolParams(0.0, 3.0), movnet::InvalidEpsilon);
        CHECK_THROWS_AS(ProtocolParams(-0.1, 3.0), movnet::InvalidEpsilon);
        CHECK_THROWS_AS(ProtocolParams(1.0 / 3.0, 3.0), movnet::InvalidEpsilon);
        CHECK_THROWS_AS(ProtocolParams(1.0, 3.0), movnet::InvalidEpsilon);
        const ProtocolParams forced(1.0, 3.0, true);
        CHECK(forced.forced());
        CHECK_FALSE(forced.in_stable_range());
        CHECK_THROWS_AS(ProtocolParams(std::nan(""), 3.0, true), movnet::InvalidEpsilon);
        CHECK(ProtocolParams(5.0, 0.0).in_stable_range());
    }

    TEST_CASE("step_protocol examples") {
        const ProtocolParams params(0.25, 1.0);
        const auto empty = movnet::NeighborhoodSnapshot::from_adjacency(Eigen::MatrixXd::Zero(3, 3));
        const StateVector x = vec({1.0, 5.0, -2.0});
        CHECK(movnet::step_protocol(x, empty, params) == x);

        std::mt19937_64 rng(1);
        const StateVector flat = StateVector::Constant(5, 2.5);
        for (int k = 0; k < 20; ++k)
            CHECK(movnet::step_protocol(flat, random_snapshot(5, rng), ProtocolParams(0.1, 5.0, true)) == flat);

        const StateVector next = movnet::step_protocol(vec({1.0, 0.0}), linked_pair(), params);
        CHECK(next(0) == 0.75);
        CHECK(next(1) == 0.25);

        CHECK_THROWS_AS(movnet::step_protocol(vec({1.0, 2.0, 3.0}), linked_pair(), params),
                        movnet::DimensionMismatch);
    }

    TEST_CASE("sparse and dense updates agree") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> g;
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t n = 2 + trial % 9;
            const auto snap = random_snapshot(n, rng);
            StateVector x(static_cast<Eigen::Index>(n));
            for (auto& v : x) v = g(rng);
            const ProtocolParams params(0.05, 1.0);
            const StateVector sparse = movnet::step_protocol(x, snap, params);
            const StateVector dense = movnet::step_protocol_dense(x, snap, params);
            CHECK((sparse - dense).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }

    TEST_CASE("disagreement") {
        CHECK(movnet::disagreement(StateVector::Constant(4, 3.0)) == 0.0);
        CHECK(movnet::disagreement(vec({1.0, -1.0})) == 2.0);
        CHECK(movnet::disagreement(StateVector()) == 0.0);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        for (int trial = 0; trial < 100; ++trial) {
            StateVector x(1 + trial % 7);
            for (auto& v : x) v = g(rng);
            const double xi = movnet::disagreement(x);
            CHECK(xi >= 0.0);
            CHECK(xi == doctest::Approx(movnet::oracle::xi_direct(x)).epsilon(1e-9).scale(1.0));
            CHECK(movnet::disagreement((x.array() + 17.0).matrix()) == doctest::Approx(xi).epsilon(1e-10));
        }
    }

    TEST_CASE("decompose") {
        const auto same = movnet::decompose(vec({3, 3, 3}));
        CHECK(same.parallel == vec({3, 3, 3}));
        CHECK(same.perpendicular.isZero(0.0));
        const auto opposite = movnet::decompose(vec({1, -1}));
        CHECK(opposite.parallel.isZero(0.0));
        CHECK(opposite.perpendicular == vec({1, -1}));

        std::mt19937_64 rng(4);
        std::normal_distribution<double> g(1.0, 3.0);
        for (int trial = 0; trial < 100; ++trial) {
            StateVector x(1 + trial % 9);
            for (auto& v : x) v = g(rng);
            const auto d = movnet::decompose(x);
            const double n = static_cast<double>(x.size());
            CHECK(std::abs(d.perpendicular.sum()) <= 1e-12 * std::max(1.0, x.cwiseAbs().sum()));
            CHECK(x.squaredNorm() ==
                  doctest::Approx(d.parallel.squaredNorm() + d.perpendicular.squaredNorm()).epsilon(1e-12));
            CHECK(d.parallel.norm() == doctest::Approx(std::sqrt(n) * std::abs(x.mean())).epsilon(1e-12));
            CHECK(movnet::disagreement(x) == doctest::Approx(d.perpendicular.squaredNorm()).epsilon(1e-12));
        }
    }

    TEST_CASE("trial with consensual start stays at zero") {
        const auto c = movnet::named_fixture("default");
        const auto spec = c.linkage();
        const auto trace = movnet::run_trial(c.graph(), spec, ProtocolParams(0.1, 3.0),
                                             StateVector::Constant(4, 1.25), AgentPositions{{0, 1, 2, 3}},
                                             500, 1e-8, 99);
        CHECK(trace.consensus_time == 0u);
        for (const double xi : trace.xi) CHECK(xi == 0.0);
        CHECK(trace.xi.size() == 501);
    }

    TEST_CASE("pair on a single node decays geometrically") {
        const WeightedDigraph single(Eigen::MatrixXd::Ones(1, 1));
        const auto spec = LinkageSpec::uniform(2, 1.0, 1.0);
        for (const double eps : {0.1, 0.25, 0.4, 0.7}) {
            const auto trace = movnet::run_trial(single, spec, ProtocolParams(eps, 1.0), vec({1.0, -1.0}),
                                                 AgentPositions{{0, 0}}, 40, 1e-30, 5);
            const double factor = (1 - 2 * eps) * (1 - 2 * eps);
            for (std::size_t t = 0; t + 1 < trace.xi.size(); ++t)
                CHECK(trace.xi[t + 1] == doctest::Approx(factor * trace.xi[t]).epsilon(1e-12));
        }
    }

    TEST_CASE("trial invariants on the default fixture") {
        const auto c = movnet::named_fixture("default");
        const auto setup = c.setup();
        const double eps = setup.params.epsilon();
        const double delta = setup.params.delta();
        const double n = 4.0;
        const double scale = 3.0;  // max |x0|
        std::size_t steps = 0;
        movnet::TrialOptions options;
        options.observer = [&](const movnet::StepView& v) {
            ++steps;
            CHECK(movnet::is_balanced(v.snapshot, 0.0));
            CHECK(std::abs(v.after.sum() - v.before.sum()) <= 1e-12 * n * scale);
            const double before = movnet::disagreement(v.before);
            CHECK(movnet::disagreement(v.after) <= (1 + eps * delta) * (1 + eps * delta) * before * n + 1e-300);

            // the update only sees x through its perpendicular part
            const StateVector shifted = (v.before.array() + 7.0).matrix();
            CHECK(movnet::disagreement(movnet::step_protocol(shifted, v.snapshot, setup.params)) ==
                  doctest::Approx(movnet::disagreement(v.after)).epsilon(1e-6).scale(1e-12));

            if (v.t % 97 == 0) {
                const Eigen::MatrixXd f =
                    Eigen::MatrixXd::Identity(4, 4) - eps * v.snapshot.laplacian;
                const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(f, false).eigenvalues();
                for (Eigen::Index k = 0; k < ev.size(); ++k) {
                    CHECK(std::abs(ev(k)) <= 1.0 + 1e-9);
                    CHECK(ev(k).real() >= 1.0 - 2 * eps * delta - 1e-9);
                }
            }
        };
        const auto trace = movnet::run_seeded_trial(setup, 2024, options);
        CHECK(steps == c.t_max);
        CHECK(trace.consensus_time.has_value());
        for (const double r : trace.conservation_residual) CHECK(r <= 1e-9 * n * scale);
        for (const double xi : trace.xi) CHECK(xi >= -1e-10);
        CHECK(trace.xi.back() < 1e-8);
    }

    TEST_CASE("trials are reproducible from their seed") {
        const auto setup = movnet::named_fixture("default").setup();
        auto first = movnet::run_seeded_trial(setup, 77);
        auto second = movnet::run_seeded_trial(setup, 77);
        CHECK(first.xi == second.xi);
        CHECK(first.final_state == second.final_state);
        auto other = movnet::run_seeded_trial(setup, 78);
        CHECK(first.xi != other.xi);
    }

    TEST_CASE("assumption checks") {
        const auto spec = LinkageSpec::uniform(2, 1.0, 0.5);
        const ProtocolParams params(0.2, 1.0);
        Eigen::MatrixXd cycle = Eigen::MatrixXd::Zero(3, 3);
        cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 1.0;
        const AgentPositions pos{{0, 1}};
        try {
            movnet::run_trial(WeightedDigraph(cycle), spec, params, vec({0, 1}), pos, 10, 1e-8, 1);
            FAIL("expected AssumptionViolated");
        } catch (const movnet::AssumptionViolated& e) {
            CHECK(e.which() == movnet::Assumption::Aperiodic);
        }
        Eigen::MatrixXd split = Eigen::MatrixXd::Identity(2, 2);
        split(0, 1) = 1.0;
        CHECK_THROWS_AS(movnet::run_trial(WeightedDigraph(split), spec, params, vec({0, 1}), pos, 10, 1e-8, 1),
                        movnet::AssumptionViolated);

        const auto directed = LinkageSpec::uniform(2, 1.0, 0.5, movnet::ArcMode::Independent);
        const WeightedDigraph single(Eigen::MatrixXd::Ones(1, 1));
        CHECK_THROWS_AS(movnet::run_trial(single, directed, params, vec({0, 1}), AgentPositions{{0, 0}}, 10,
                                          1e-8, 1),
                        movnet::AssumptionViolated);

        movnet::TrialOptions override_checks;
        override_checks.skip_assumption_checks = true;
        const auto trace = movnet::run_trial(WeightedDigraph(cycle), spec, params, vec({0, 1}), pos, 10,
                                             1e-8, 1, override_checks);
        CHECK(trace.steps() == 10);
        CHECK_THROWS_AS(movnet::run_trial(single, spec, params, vec({0, 1, 2}), AgentPositions{{0, 0}}, 10,
                                          1e-8, 1),
                        movnet::DimensionMismatch);
        CHECK_THROWS_AS(movnet::run_trial(single, spec, params, vec({0, 1}), AgentPositions{{0, 4}}, 10, 1e-8,
                                          1),
                        movnet::InvalidArgument);
    }

    TEST_CASE("forced epsilon above 1/Delta diverges") {
        const WeightedDigraph single(Eigen::MatrixXd::Ones(1, 1));
        const auto spec = LinkageSpec::uniform(2, 1.0, 1.0);
        const auto trace = movnet::run_trial(single, spec, ProtocolParams(3.0, 1.0, true), vec({1.0, -1.0}),
                                             AgentPositions{{0, 0}}, 50, 1e-8, 1);
        CHECK_FALSE(trace.consensus_time.has_value());
        for (std::size_t t = 0; t + 1 < trace.xi.size(); ++t)
            CHECK(trace.xi[t + 1] == doctest::Approx(25.0 * trace.xi[t]).epsilon(1e-12));

        const auto overflow = movnet::run_trial(single, spec, ProtocolParams(3.0, 1.0, true), vec({1.0, -1.0}),
                                                AgentPositions{{0, 0}}, 5000, 1e-8, 1);
        CHECK_FALSE(overflow.finite);
        CHECK(overflow.steps() < 5000);
    }
}
