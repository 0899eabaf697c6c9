#include "movnet/markov.hpp"

#include "movnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace movnet {

namespace {

void require_square(const Eigen::MatrixXd& q) {
    if (q.rows() == 0 || q.rows() != q.cols())
        throw ShapeMismatch("transition matrix must be square and non-empty");
}

double stationarity_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& pi) {
    return (q.transpose() * pi - pi).lpNorm<Eigen::Infinity>();
}

}  // namespace

StationaryDistribution stationary_distribution(const Eigen::MatrixXd& q, double tol) {
    require_square(q);
    const Eigen::Index m = q.rows();

    Eigen::MatrixXd system = q.transpose() - Eigen::MatrixXd::Identity(m, m);
    system.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
        throw SingularSystem("stationary system is singular; chain is not ergodic");

    Eigen::VectorXd pi = lu.solve(rhs);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();

    StationaryDistribution out{pi, stationarity_residual(q, pi)};
    if (out.residual <= tol) return out;
    return stationary_by_power_iteration(q, tol);
}

StationaryDistribution stationary_by_power_iteration(const Eigen::MatrixXd& q, double tol,
                                                     std::size_t max_iterations) {
    require_square(q);
    const Eigen::Index m = q.rows();
    const Eigen::MatrixXd qt = q.transpose();
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd next = qt * pi;
        next /= next.sum();
        const double change = (next - pi).lpNorm<Eigen::Infinity>();
        pi = std::move(next);
        if (change < tol) return {pi, stationarity_residual(q, pi)};
    }
    throw NotConverged("power iteration did not converge within " +
                       std::to_string(max_iterations) + " iterations");
}

double slem(const Eigen::MatrixXd& q) {
    require_square(q);
    if (q.rows() == 1) {
        if (std::abs(q(0, 0) - 1.0) > 1e-9) throw Degenerate("1x1 matrix is not stochastic");
        return 0.0;
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(q, false);
    const Eigen::VectorXcd values = solver.eigenvalues();

    Eigen::Index unit = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i)
        if (std::abs(values(i) - 1.0) < std::abs(values(unit) - 1.0)) unit = i;
    if (std::abs(values(unit) - 1.0) > 1e-9)
        throw Degenerate("no eigenvalue within 1e-9 of 1; matrix is not stochastic");

    double rho = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (i != unit) rho = std::max(rho, std::abs(values(i)));
    if (rho >= 1.0 - 1e-9)
        throw Degenerate("second eigenvalue has unit modulus; chain is reducible or periodic");
    return rho;
}

MixingProfile mixing_curve(const Eigen::MatrixXd& q, const StationaryDistribution& pi,
                           std::size_t t_max) {
    require_square(q);
    if (t_max == 0) throw InvalidArgument("t_max must be at least 1");
    if (pi.pi.size() != q.rows()) throw DimensionMismatch("stationary vector size differs from Q");

    MixingProfile profile;
    profile.rho = slem(q);
    profile.tv_curve.reserve(t_max);
    const Eigen::RowVectorXd target = pi.pi.transpose();
    Eigen::MatrixXd power = q;
    for (std::size_t t = 1; t <= t_max; ++t) {
        profile.tv_curve.push_back((power.rowwise() - target).cwiseAbs().maxCoeff());
        power = power * q;
    }
    return profile;
}

LogLinearFit fit_mixing_tail(const MixingProfile& profile) {
    const std::size_t n = profile.tv_curve.size();
    const std::size_t start = n / 2;
    std::vector<double> t;
    for (std::size_t i = start; i < n; ++i) t.push_back(static_cast<double>(i + 1));
    return fit_log_linear(t, std::span(profile.tv_curve).subspan(start));
}

Eigen::VectorXd propagate(const Eigen::VectorXd& initial, const Eigen::MatrixXd& q,
                          std::size_t steps) {
    if (initial.size() != q.rows()) throw DimensionMismatch("distribution size differs from Q");
    Eigen::RowVectorXd dist = initial.transpose();
    for (std::size_t s = 0; s < steps; ++s) dist = dist * q;
    return dist.transpose();
}

}  // namespace movnet
