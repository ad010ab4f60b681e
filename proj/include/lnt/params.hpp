#pragma once

// Closed-form constants of the supercritical radial problem
//   -u'' - (N-1)/r u' + u = u^p
// together with the scalar kernels used by the origin analysis.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lnt {

/// Raised when an input lies outside the admissible parameter region.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot deliver its contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemParams {
    int N = 3;
    double p = 6.0;
    std::optional<double> R;  // ball radius; only some operations need it
};

/// Throws DomainError unless N >= 3, p > (N+2)/(N-2) and R > 0 (when present).
void validate(const ProblemParams& params);

enum class Regime { Oscillatory, NonOscillatory, Degenerate };

std::string_view to_string(Regime regime);

struct DerivedConstants {
    int N = 0;
    double p = 0.0;
    double theta = 0.0;  // 2/(p-1)
    double A = 0.0;      // [theta(N-2-theta)]^{1/(p-1)}
    double m = 0.0;      // [theta(N-2-theta)]^{-1/2}
    double alpha = 0.0;  // m(N-2-2 theta)
    double beta = 0.0;   // sqrt|p-1-(alpha/2)^2|
    double Dp = 0.0;     // m^2/(4m^2+2 alpha m+(p-1))
    double pS = 0.0;     // Sobolev exponent (N+2)/(N-2)
    double pJL = 0.0;    // +infinity for N <= 10
    Regime regime = Regime::Oscillatory;

    /// Limit of r^2 p u^{p-1} at the origin for the singular solution.
    double hardy_limit() const { return p * theta * (N - 2 - theta); }
};

double critical_exponent(int N);

/// Joseph-Lundgren exponent. Returns +infinity (never a large finite value)
/// for 3 <= N <= 10.
double joseph_lundgren(int N);

DerivedConstants derive_constants(const ProblemParams& params);

/// Limits of the rescaled constants as p -> infinity at fixed N.
struct AsymptoticLimits {
    double beta_over_sqrt_p;   // sqrt|1-(N-2)/8|; zero at N = 10 where the scaling differs
    double p_theta;            // 2
    double A;                  // 1
    double alpha_over_sqrt_p;  // sqrt((N-2)/2)
    double m_over_sqrt_p;      // 1/sqrt(2(N-2))
    double Dp;                 // 1/(4(N-1))
};

AsymptoticLimits asymptotic_limits(int N);

/// Closed form of beta valid only at N = 10: sqrt((3(p-1)-1)/(4(p-1)-1)).
/// Kept as an independent cross-check of the generic formula.
double beta_dimension_ten(double p);

/// One-dimensional kernel of eta'' - alpha eta' + (p-1) eta, zero for x < 0.
double green_kernel(double x, const DerivedConstants& c);

/// phi(eta) = -((1+eta)^p - 1 - p eta). Uses the binomial series when p*eta is
/// small so the quadratic leading term is not lost to cancellation.
double phi_nonlinearity(double eta, double p);

/// f(zeta) = D_p exp(-2 m zeta).
double f_envelope(double zeta, const DerivedConstants& c);

struct PNResult {
    double PN;
    double threshold;
    double margin() const { return threshold - PN; }
};

PNResult compute_PN(const DerivedConstants& c, double ctilde);

struct OriginRegionConstants {
    double ctilde;
    double rtilde_p;     // ctilde / sqrt(p)
    double zetatilde_p;  // -ln(rtilde_p)/m
    double PN;
    double PN_threshold;
};

OriginRegionConstants origin_region_constants(const DerivedConstants& c, double ctilde);

struct PRange {
    double lo;
    double hi;
};

/// Largest ctilde in {2^-1, ..., 2^-20} with P_N below its threshold at 32
/// log-spaced exponents of `range`. Results are cached per (N, range).
double choose_ctilde(int N, PRange range);

}  // namespace lnt
