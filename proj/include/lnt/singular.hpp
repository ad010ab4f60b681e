#pragma once

#include <optional>
#include <vector>

#include "lnt/params.hpp"
#include "lnt/radial_ode.hpp"

namespace lnt {

struct CriticalRadii {
    std::vector<double> radii;
    std::vector<CriticalKind> kinds;

    std::size_t size() const { return radii.size(); }
    /// 1-based access matching the usual R^1 < R^2 < ... numbering.
    double operator()(std::size_t i) const { return radii.at(i - 1); }
};

CriticalRadii critical_radii_of(const RadialTrajectory& traj);

/// Thrown when two seeds disagree beyond the allowed tolerance.
class SeedSensitivityError : public NumericalError {
public:
    SeedSensitivityError(const std::string& what, double u_seed, double u_half_seed)
        : NumericalError(what), u_seed(u_seed), u_half_seed(u_half_seed) {}
    double u_seed;
    double u_half_seed;
};

struct SolverOptions {
    Tolerances tol{1e-11, 1e-11};
    /// Origin-region constant; chosen by choose_ctilde(N, [p, p]) when absent.
    std::optional<double> ctilde;
    /// Seed radius; rtilde_p / 16 when absent. Must not exceed rtilde_p.
    std::optional<double> seed_radius;
    bool check_seed_sensitivity = true;
    /// Stop after this many critical points (0 = integrate to r_end).
    std::size_t stop_after_critical = 0;
    bool one_term_seed = false;
    /// Extra radii to land on exactly, for callers that read the solution there.
    std::vector<double> stops;
};

struct SeedSensitivity {
    bool checked = false;
    double u_seed = 0.0;       // u(rtilde) from the run seeded at r0
    double u_half_seed = 0.0;  // u(rtilde) from the run seeded at r0/2
    double allowed = 0.0;
    bool passed() const { return !checked || std::abs(u_seed - u_half_seed) <= allowed; }
};

struct SingularSolution {
    ProblemParams params;
    DerivedConstants constants;
    double ctilde = 0.0;
    double rtilde = 0.0;  // ctilde / sqrt(p)
    double seed_radius = 0.0;
    Tolerances tol;
    RadialTrajectory trajectory;
    std::optional<double> r_p;  // first unit crossing
    CriticalRadii critical_radii;
    SeedSensitivity sensitivity;
    IntegrationStatus status = IntegrationStatus::Completed;
};

/// Two-term expansion u = A r^{-theta}(1 + D_p r^2) at the seed radius (or
/// the one-term lower bound A r^{-theta} when `one_term`).
RadialState seed_at_origin(const DerivedConstants& c, double r0, double rtilde, bool one_term = false);

/// Integrates the singular solution from its origin expansion out to r_end.
/// Throws SeedSensitivityError, NumericalError on integration failure.
SingularSolution solve_singular(const ProblemParams& params, double r_end, const SolverOptions& options = {});

/// First unit crossing r_p; throws NumericalError if none was reached.
double first_unit_crossing(const SingularSolution& sol);

/// R_p^i, doubling r_end (up to 2^10 times the initial value) until i
/// critical points are found.
double critical_radius(const ProblemParams& params, std::size_t i, double r_end, const SolverOptions& options = {});

/// Singular solution integrated until its i-th critical point, extending
/// r_end as critical_radius does.
SingularSolution solve_until_critical(const ProblemParams& params, std::size_t i, double r_end,
                                      const SolverOptions& options = {});

struct OriginBoundsReport {
    std::size_t samples = 0;
    double tolerance = 0.0;            // relative
    double worst_lower_margin = 0.0;   // min (u - lower)/lower, should be >= -tol
    double worst_upper_margin = 0.0;   // max (u - upper)/upper, should be <= +tol
    double r_worst_lower = 0.0;
    double r_worst_upper = 0.0;
    bool passed = false;
};

/// Checks A r^{-theta} <= u(r) <= A r^{-theta}(1 + D_p r^2) at log-spaced radii
/// in (r0, rtilde]. Margins are relative to the bound; the default tolerance
/// is 10x the integrator's relative tolerance.
OriginBoundsReport verify_origin_bounds(const SingularSolution& sol, std::size_t n_samples,
                                        std::optional<double> tolerance = std::nullopt);

struct DerivativeBoundReport {
    double p = 0.0;
    double du_at_rtilde = 0.0;           // |u'(rtilde)|
    double scaled_du = 0.0;              // |u'(rtilde)| sqrt(p)
    double max_correction_ratio = 0.0;   // max |u' + theta A r^{-1-theta}| / r^{1-theta}
    double u_at_rtilde = 0.0;
};

DerivativeBoundReport derivative_bound_check(const SingularSolution& sol, std::size_t n_samples = 64);

struct DerivativeSweepReport {
    std::vector<DerivativeBoundReport> points;
    double max_scaled_du = 0.0;
    double min_scaled_du = 0.0;
    bool bounded = false;        // |u'(rtilde)| sqrt(p) does not grow along the sweep
    bool u_tends_to_one = false;  // |u(rtilde) - 1| decreasing along the sweep
};

/// Runs derivative_bound_check over an increasing exponent list with one
/// common ctilde chosen for the whole range.
DerivativeSweepReport derivative_bound_sweep(int N, const std::vector<double>& ps, const SolverOptions& options = {});

}  // namespace lnt
