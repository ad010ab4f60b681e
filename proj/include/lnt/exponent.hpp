#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lnt/singular.hpp"

namespace lnt {

/// Smallest i with R_p^i > R for the singular solution at params.p.
std::size_t find_istar(const ProblemParams& params, double R, const SolverOptions& options = {});

struct ExponentOptions {
    SolverOptions solver;
    double p_cap = 1e4;
    double residual_rel = 1e-6;   // accept when |R_p^i - R| < residual_rel * R
    double width_rel = 1e-10;     // and the p bracket is narrower than width_rel * p
    int max_retries = 2;          // tolerance tightenings after a crossing-count mismatch
};

struct ExponentSolution {
    std::size_t i = 0;
    double R = 0.0;
    double p = 0.0;
    double R_at_p = 0.0;     // R_p^i at the returned p
    double residual = 0.0;   // |R_p^i - R|
    std::size_t crossings = 0;  // unit crossings on (0, R]
    double du_at_R = 0.0;    // U'(R), zero up to the residual
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::size_t evaluations = 0;
    int retries = 0;
    Tolerances tol;

    bool crossings_match() const { return crossings == i; }
};

/// p with R_p^i = R. Expands p geometrically (x2) from p_lo until R_p^i < R,
/// then bisects. The crossing count on (0, R] must equal i; on mismatch the
/// search is repeated with the ODE tolerance divided by 10.
/// Throws NumericalError when no bracket exists below p_cap or the count
/// still disagrees after the retries.
ExponentSolution find_exponent(std::size_t i, double R, int N, double p_lo, const ExponentOptions& options = {});

struct ContinuityReport {
    std::size_t i = 0;
    std::vector<double> coarse_p, coarse_R;
    std::vector<double> fine_p, fine_R;
    double coarse_modulus = 0.0;  // max |R(p_{k+1}) - R(p_k)|
    double fine_modulus = 0.0;
    double ratio = 0.0;           // fine / coarse
    double worst_jump_ratio = 0.0;  // max |dR_k| / max(|dR_{k-1}|, |dR_{k+1}|) on the fine grid
    bool jump_free = false;       // worst_jump_ratio <= 10
    bool passed = false;          // ratio in [1/3, 2/3] and jump_free
};

/// R_p^i at each grid point (in grid order).
std::vector<double> critical_radii_on_grid(std::size_t i, int N, const std::vector<double>& ps,
                                           const SolverOptions& options = {}, double r_end = 4.0);

/// Largest adjacent difference of a sampled function.
double modulus_of(const std::vector<double>& values);

/// Continuity diagnostic for p -> R_p^i. The fine grid defaults to the
/// midpoint refinement of the coarse one.
ContinuityReport continuity_scan(std::size_t i, int N, const std::vector<double>& coarse,
                                 std::optional<std::vector<double>> fine = std::nullopt,
                                 const SolverOptions& options = {});

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> midpoint_refinement(const std::vector<double>& grid);

}  // namespace lnt
