#pragma once

// Radial linearized operator L = -phi'' - (N-1)/r phi' - q(r) phi with
// q = p u^{p-1} - 1, discretized as a symmetric tridiagonal pencil (A, M) on
// [delta, R]: Dirichlet at delta, Neumann at R. The quadratic form is
// phi^T A phi ~ int (phi'^2 - q phi^2) r^{N-1} dr, M is the lumped r^{N-1} mass.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lnt/params.hpp"
#include "lnt/radial_ode.hpp"

namespace lnt {

/// q(r) stored through r^2 q(r), which stays bounded at the origin for the
/// singular solution and can be evaluated in log form.
struct Potential {
    std::function<double(double)> scaled;  // r -> r^2 q(r)
    double operator()(double r) const { return scaled(r) / (r * r); }
};

/// q = p u^{p-1} - 1 along a trajectory; r^2 q = p exp((p-1) ln u + 2 ln r) - r^2.
/// Holds a reference to `traj`, which must outlive the potential.
Potential potential_from_trajectory(const RadialTrajectory& traj, double p);
/// q = p u0^{p-1} - 1 for the constant function u0.
Potential constant_potential(double u0, double p);
/// Potential of the problem rescaled by r = L s: qhat(s) = L^2 q(L s).
Potential rescaled_potential(const Potential& q, double L);

struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // size diag.size() - 1
    std::size_t size() const { return diag.size(); }
};

enum class GridKind { Uniform, Geometric };
std::string to_string(GridKind kind);

enum class InnerBc { Dirichlet };
enum class OuterBc { Neumann };

struct EigenProblemSpec {
    std::vector<double> grid;       // nodes delta = grid[0] < ... < grid[n] = R
    std::vector<double> potential;  // q at every node
    double delta = 0.0;
    double R = 0.0;
    InnerBc inner_bc = InnerBc::Dirichlet;
    OuterBc outer_bc = OuterBc::Neumann;
    int weight_exponent = 0;        // N - 1
};

/// Unknowns are the values at grid[1..n]; grid[0] carries the Dirichlet zero.
struct DiscreteOperator {
    EigenProblemSpec spec;
    SymTridiagonal A;
    std::vector<double> mass;
};

std::vector<double> make_grid(double delta, double R, std::size_t intervals, GridKind kind);

/// Finite-volume assembly on `intervals` cells (>= 32). Off-diagonals are
/// -r_{k+1/2}^{N-1}/h_k, the outer node gets a half cell (the mirrored-ghost
/// Neumann row after symmetrization).
DiscreteOperator assemble_operator(const Potential& q, int N, double delta, double R, std::size_t intervals,
                                   GridKind kind = GridKind::Uniform);

/// Same, on a caller-supplied grid.
DiscreteOperator assemble_on_grid(const Potential& q, int N, std::vector<double> grid);

/// Assembly along a computed solution; throws DomainError unless the
/// trajectory covers [delta, R].
DiscreteOperator assemble_from_trajectory(const RadialTrajectory& traj, const ProblemParams& params, double delta,
                                          double R, std::size_t intervals, GridKind kind = GridKind::Uniform);

/// Number of eigenvalues of A x = lambda M x below `shift`, from the signs of
/// the LDL^T pivots of A - shift M. A zero pivot moves the shift by
/// 1e-12 * scale (up to three times) before giving up with NumericalError.
std::size_t negative_count(const SymTridiagonal& A, const std::vector<double>& mass, double shift = 0.0);
std::size_t negative_count(const DiscreteOperator& op, double shift = 0.0);

/// The k smallest eigenvalues of the pencil by Sturm bisection.
std::vector<double> smallest_eigenvalues(const SymTridiagonal& A, const std::vector<double>& mass, std::size_t k,
                                         double rel_tol = 1e-12);

/// phi^T A phi / phi^T M phi for nodal values at grid[1..n].
double discrete_rayleigh(const DiscreteOperator& op, const std::vector<double>& phi);

struct SpectrumReport {
    std::size_t negative_count = 0;
    std::vector<double> smallest_eigenvalues;
    double cutoff = 0.0;
    double R = 0.0;
    std::size_t grid_size = 0;
    GridKind grid_kind = GridKind::Uniform;
};

SpectrumReport spectrum(const DiscreteOperator& op, std::size_t n_eigs = 4);

enum class MorseClass { StableTail, Unbounded, Inconclusive };
std::string to_string(MorseClass c);  // SUPERCRITICAL-STABLE-TAIL / UNBOUNDED / INCONCLUSIVE

struct MorseScan {
    std::vector<double> deltas;
    std::vector<std::size_t> grid_sizes;
    std::vector<SpectrumReport> reports;     // delta-major, grid-minor
    std::vector<std::size_t> counts;         // count on the finest grid per delta
    std::vector<bool> grid_converged;        // finest two grids agree per delta
    MorseClass classification = MorseClass::Inconclusive;
};

struct MorseOptions {
    GridKind grid_kind = GridKind::Uniform;
    std::size_t n_eigs = 4;
};

/// Counts per (delta, grid). A delta trend is classified only when every
/// delta is grid-converged: strictly increasing counts give UNBOUNDED,
/// non-decreasing counts whose last two agree give SUPERCRITICAL-STABLE-TAIL.
MorseScan morse_scan(const RadialTrajectory& traj, const ProblemParams& params, double R,
                     const std::vector<double>& deltas, const std::vector<std::size_t>& grid_sizes,
                     const MorseOptions& options = {});

/// Radial function phi = r^{-c} v with r phi' = r^{-c} w, sampled on an
/// increasing grid. The scale exponent c keeps functions like r^{-(N-2)/2}
/// representable near the origin.
struct RadialSample {
    std::vector<double> r;
    std::vector<double> v;
    std::vector<double> w;
    double c = 0.0;

    double value(std::size_t k) const;       // phi(r_k), may overflow for large c
    double derivative(std::size_t k) const;  // phi'(r_k)
};

/// int (phi'^2 - q phi^2) r^{N-1} dr by the composite trapezoid rule on the
/// sample grid (the sphere area factor is omitted). Evaluated as
/// int (w^2 - r^2 q v^2) r^{N-3-2c} dr so no power of r is formed on its own.
double rayleigh_quotient(const RadialSample& phi, const Potential& q, int N);

/// f_j = r^{-(N-2)/2} sin(eps0 ln(r)/2) on [r_{j+1}, r_j], r_j = exp(-2 pi j/eps0),
/// sampled at `points` geometrically spaced radii (>= 256).
RadialSample hardy_test_function(int j, double eps0, int N, std::size_t points = 4096);

double hardy_radius(int j, double eps0);

struct HardyCertificate {
    int j = 0;
    double r_lo = 0.0;
    double r_hi = 0.0;
    double J = 0.0;           // continuous form by quadrature
    double J_model = 0.0;     // (L/2)(eps0^2/4 + c^2 - K) with K = p theta(N-2-theta), L = 2 pi/eps0
    double discrete = 0.0;    // discrete Rayleigh quotient of the projection (rescaled by r_j)
    bool negative() const { return J < 0.0 && discrete < 0.0; }
};

/// Both negativity certificates for f_j. The discrete one is computed on the
/// rescaled interval s = r/r_j in [r_{j+1}/r_j, 1] with a geometric grid,
/// where the form equals r_j^{N-2} times the original.
HardyCertificate hardy_certificate(int j, double eps0, const Potential& q, const DerivedConstants& c,
                                   std::size_t points = 4096);

struct ThresholdReport {
    double hardy_constant = 0.0;    // (N-2)^2/4
    double limit = 0.0;             // p theta (N-2-theta)
    double observed = 0.0;          // r^2 q at the smallest sampled radius
    double limit_rel_error = 0.0;   // |observed - limit| / limit
    double margin = 0.0;            // limit - hardy_constant
    double min_scaled = 0.0;        // min of r^2 q over (r0, rtilde]
    double max_scaled = 0.0;
    bool above = false;             // limit > hardy constant (infinite-index side)
    double eps_margin = 0.0;        // above: limit - (c^2 + eps0^2); below: c^2 (1 - eps0^2) - limit
};

/// r^2 (p u^{p-1} - 1) on log-spaced radii in (r0, rtilde] against (N-2)^2/4.
ThresholdReport potential_threshold_check(const RadialTrajectory& traj, const DerivedConstants& c, double r0,
                                          double rtilde, double eps0, std::size_t samples = 64);

}  // namespace lnt
