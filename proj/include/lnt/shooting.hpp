#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lnt/singular.hpp"

namespace lnt {

enum class ShotStatus { Ok, NonPositive, Failed };

std::string to_string(ShotStatus s);

struct ShootOptions {
    Tolerances tol{1e-11, 1e-11};
    std::size_t stop_after_critical = 0;
    std::vector<double> stops;
};

struct ShootingResult {
    double gamma = 1.0;
    ProblemParams params;
    RadialTrajectory trajectory;
    CriticalRadii critical_radii;
    ShotStatus status = ShotStatus::Ok;
    std::string message;
    double h_start = 0.0;  // radius of the Taylor start

    bool ok() const { return status == ShotStatus::Ok; }
};

/// State at r = h from the series u = gamma + g h^2/(2N) + b h^4, g = gamma - gamma^p.
/// h is the largest radius with |b| h^4 <= tol * max(1, gamma), capped at h_cap.
RadialState taylor_start(double gamma, const ProblemParams& params, const Tolerances& tol, double h_cap);

/// Regular solution with u(0) = gamma, u'(0) = 0, integrated to r_end.
/// A solution reaching u <= 0 is returned with status NonPositive.
ShootingResult shoot(double gamma, const ProblemParams& params, double r_end, const ShootOptions& options = {});

/// Shoots with r_end doubled (up to 2^10 times) until i critical points exist.
/// Returns the last attempt; its critical_radii may still hold fewer than i.
ShootingResult shoot_until_critical(double gamma, const ProblemParams& params, std::size_t i, double r_end,
                                    const ShootOptions& options = {});

struct ConvergenceReport {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> gammas;
    /// sup over the grid of |u_gamma - U*|, computed from the difference
    /// equation; empty optional for excluded (non-positive or failed) shots.
    std::vector<std::optional<double>> distances;
    /// The same distance by direct subtraction of two separate solves. It is
    /// bounded below by the solvers' own error and saturates near tol * |U*|.
    std::vector<std::optional<double>> naive_distances;
    std::vector<double> switch_radii;
    std::size_t grid_points = 0;
    bool decreasing = false;  // strictly, over all supplied gammas
    bool passed = false;      // == decreasing, all shots usable
    std::vector<std::string> notes;

    /// d(last) < d(first) / 2 when both exist.
    bool halves() const;
};

struct ConvergenceOptions {
    Tolerances tol{1e-11, 1e-11};
    std::size_t grid_points = 512;
    SolverOptions singular;
};

/// Distance between u_gamma and the singular solution on [a, b].
///
/// u_gamma is shot out to a switch radius r_s well inside the origin region;
/// from there U* (seeded at r_s) and delta = u_gamma - U* are integrated as
/// one system with delta'' = -(N-1)/r delta' + delta - ((U+delta)^p - U^p),
/// so delta keeps full relative accuracy even when it is far below |U*| * eps.
ConvergenceReport convergence_to_singular(const ProblemParams& params, const std::vector<double>& gammas, double a,
                                          double b, const ConvergenceOptions& options = {});

struct BranchSample {
    double gamma = 0.0;
    std::size_t i = 0;
    double R = 0.0;
    double p = 0.0;
    double r_i = 0.0;  // i-th critical radius at the returned p
    double residual = 0.0;
    std::size_t evaluations = 0;
};

/// Bisection on p in `bracket` for r^i_{p,gamma} = R.
/// Throws NumericalError without a sign change or if the i-th critical point
/// is missing at an evaluated p.
BranchSample branch_sample(std::size_t i, double R, int N, double gamma, PRange bracket,
                           const ShootOptions& options = {}, double residual_tol = 1e-8);

}  // namespace lnt
