#pragma once

#include "movnet/stats.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace movnet {

inline constexpr double kStationaryTolerance = 1e-10;
inline constexpr std::size_t kPowerIterationCap = 1'000'000;

struct StationaryDistribution {
    Eigen::VectorXd pi;
    /// Achieved ||pi^T Q - pi^T||_inf.
    double residual = 0.0;

    /// sum_k pi_k^2, the probability that two independent stationary walkers
    /// share a node.
    double collision_probability() const { return pi.squaredNorm(); }
};

/// Solves (Q^T - I) pi = 0 with sum(pi) = 1 replacing the last equation, falling
/// back to power iteration if the direct answer misses `tol`.
/// Throws SingularSystem for a degenerate (non-ergodic) system and NotConverged
/// if the fallback exhausts its iteration cap.
StationaryDistribution stationary_distribution(const Eigen::MatrixXd& q,
                                               double tol = kStationaryTolerance);

/// Power iteration pi <- Q^T pi from the uniform vector until successive
/// iterates differ by less than `tol` in the infinity norm.
StationaryDistribution stationary_by_power_iteration(const Eigen::MatrixXd& q,
                                                     double tol = kStationaryTolerance,
                                                     std::size_t max_iterations = kPowerIterationCap);

/// Second-largest eigenvalue modulus of a row-stochastic matrix. Throws
/// Degenerate if no eigenvalue lies within 1e-9 of 1 or if another eigenvalue
/// has modulus within 1e-9 of 1 (reducible or periodic chain).
double slem(const Eigen::MatrixXd& q);

struct MixingProfile {
    double rho = 0.0;
    /// tv_curve[t - 1] = max_{j,i} |(Q^t)_{ji} - pi_i| for t = 1..t_max.
    std::vector<double> tv_curve;
};

MixingProfile mixing_curve(const Eigen::MatrixXd& q, const StationaryDistribution& pi,
                           std::size_t t_max);

/// Log-linear fit over the second half of the curve. exp(intercept) is the
/// fitted geometric prefactor; it is an empirical constant, not a bound.
LogLinearFit fit_mixing_tail(const MixingProfile& profile);

/// Distribution of a walker after `steps` moves: initial^T Q^steps.
Eigen::VectorXd propagate(const Eigen::VectorXd& initial, const Eigen::MatrixXd& q,
                          std::size_t steps);

}  // namespace movnet
