#include "lnt/params.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace lnt {

namespace {

void require_dimension(int N) {
    if (N < 3) throw DomainError("dimension N must be at least 3, got " + std::to_string(N));
}

}  // namespace

void validate(const ProblemParams& params) {
    require_dimension(params.N);
    if (!std::isfinite(params.p) || params.p <= critical_exponent(params.N))
        throw DomainError("exponent p = " + std::to_string(params.p) +
                          " is not above the critical exponent " +
                          std::to_string(critical_exponent(params.N)));
    if (params.R && !(*params.R > 0.0))
        throw DomainError("ball radius must be positive");
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Oscillatory: return "OSCILLATORY";
        case Regime::NonOscillatory: return "NON_OSCILLATORY";
        case Regime::Degenerate: return "DEGENERATE";
    }
    return "UNKNOWN";
}

double critical_exponent(int N) {
    require_dimension(N);
    return static_cast<double>(N + 2) / static_cast<double>(N - 2);
}

double joseph_lundgren(int N) {
    require_dimension(N);
    if (N <= 10) return std::numeric_limits<double>::infinity();
    const double n = N;
    return 1.0 + 4.0 / (n - 4.0 - 2.0 * std::sqrt(n - 1.0));
}

DerivedConstants derive_constants(const ProblemParams& params) {
    // The closed forms need only theta(N-2-theta) > 0; the solvers call validate().
    require_dimension(params.N);
    if (!std::isfinite(params.p) || !(params.p > 1.0)) throw DomainError("exponent must be finite and > 1");
    DerivedConstants c;
    c.N = params.N;
    c.p = params.p;
    const double n2 = params.N - 2.0;
    c.theta = 2.0 / (params.p - 1.0);
    if (c.theta >= n2) throw DomainError("theta >= N-2: A_{p,N} undefined");
    const double base = c.theta * (n2 - c.theta);
    c.A = std::pow(base, 1.0 / (params.p - 1.0));
    c.m = 1.0 / std::sqrt(base);
    c.alpha = c.m * (n2 - 2.0 * c.theta);
    const double half_alpha_sq = 0.25 * c.alpha * c.alpha;
    const double disc = (params.p - 1.0) - half_alpha_sq;
    c.beta = std::sqrt(std::abs(disc));
    c.Dp = c.m * c.m / (4.0 * c.m * c.m + 2.0 * c.alpha * c.m + (params.p - 1.0));
    c.pS = critical_exponent(params.N);
    c.pJL = joseph_lundgren(params.N);
    if (disc > 0.0)
        c.regime = Regime::Oscillatory;
    else if (disc < 0.0)
        c.regime = Regime::NonOscillatory;
    else
        c.regime = Regime::Degenerate;
    return c;
}

AsymptoticLimits asymptotic_limits(int N) {
    require_dimension(N);
    const double n = N;
    return AsymptoticLimits{
        .beta_over_sqrt_p = std::sqrt(std::abs(1.0 - (n - 2.0) / 8.0)),
        .p_theta = 2.0,
        .A = 1.0,
        .alpha_over_sqrt_p = std::sqrt((n - 2.0) / 2.0),
        .m_over_sqrt_p = 1.0 / std::sqrt(2.0 * (n - 2.0)),
        .Dp = 1.0 / (4.0 * (n - 1.0)),
    };
}

double beta_dimension_ten(double p) {
    const double q = p - 1.0;
    return std::sqrt((3.0 * q - 1.0) / (4.0 * q - 1.0));
}

double green_kernel(double x, const DerivedConstants& c) {
    if (x < 0.0) return 0.0;
    const double decay = std::exp(-0.5 * c.alpha * x);
    switch (c.regime) {
        case Regime::Degenerate: return x * decay;
        case Regime::Oscillatory:
            if (c.beta == 0.0) throw DomainError("green_kernel: beta = 0 outside the degenerate regime");
            return decay * std::sin(c.beta * x) / c.beta;
        case Regime::NonOscillatory:
            if (c.beta == 0.0) throw DomainError("green_kernel: beta = 0 outside the degenerate regime");
            return decay * std::sinh(c.beta * x) / c.beta;
    }
    return 0.0;
}

double phi_nonlinearity(double eta, double p) {
    if (!(1.0 + eta > 0.0)) throw DomainError("phi_nonlinearity requires 1 + eta > 0");
    if (eta == 0.0) return 0.0;
    if (std::abs(eta) < 0.1 && std::abs(p * eta) < 0.1) {
        // -sum_{k>=2} binom(p,k) eta^k
        double coeff = p * (p - 1.0) / 2.0;
        double power = eta * eta;
        double sum = 0.0;
        for (int k = 2; k < 80; ++k) {
            const double term = coeff * power;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
            coeff *= (p - k) / (k + 1.0);
            power *= eta;
        }
        return -sum;
    }
    return -(std::expm1(p * std::log1p(eta)) - p * eta);
}

double f_envelope(double zeta, const DerivedConstants& c) {
    return c.Dp * std::exp(-2.0 * c.m * zeta);
}

PNResult compute_PN(const DerivedConstants& c, double ctilde) {
    if (!(ctilde > 0.0 && ctilde < 1.0)) throw DomainError("ctilde must lie in (0,1)");
    const double p = c.p;
    const double f_tilde = c.Dp * ctilde * ctilde / p;
    const double ratio = std::abs(phi_nonlinearity(f_tilde, p)) / f_tilde;
    const double a8m = c.alpha + 8.0 * c.m;
    if (c.N < 10) {
        // exp(-x) with x = (alpha+8m)pi/(2 beta); beta = 0 sends it to 0
        const double e = c.beta > 0.0 ? std::exp(-a8m * std::numbers::pi / (2.0 * c.beta)) : 0.0;
        const double bracket = 4.0 / (a8m * a8m + 4.0 * c.beta * c.beta) * (1.0 + e);
        return {ratio * bracket, 0.5 * (1.0 - e) / (1.0 + e)};
    }
    const double denom = 2.0 * c.beta * (0.5 * c.alpha + 4.0 * c.m - c.beta);
    const double bracket = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
    return {ratio * bracket, 0.5};
}

OriginRegionConstants origin_region_constants(const DerivedConstants& c, double ctilde) {
    const PNResult pn = compute_PN(c, ctilde);
    const double rtilde = ctilde / std::sqrt(c.p);
    return OriginRegionConstants{
        .ctilde = ctilde,
        .rtilde_p = rtilde,
        .zetatilde_p = -std::log(rtilde) / c.m,
        .PN = pn.PN,
        .PN_threshold = pn.threshold,
    };
}

double choose_ctilde(int N, PRange range) {
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, double> cache;

    if (!(range.lo <= range.hi)) throw DomainError("choose_ctilde: empty exponent range");
    const double pS = critical_exponent(N);
    if (!(range.lo > pS)) throw DomainError("choose_ctilde: exponent range must lie above (N+2)/(N-2)");
    const auto key = std::make_tuple(N, range.lo, range.hi);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    constexpr int kSamples = 32;
    std::vector<DerivedConstants> samples;
    samples.reserve(kSamples);
    const double log_lo = std::log(range.lo);
    const double log_hi = std::log(range.hi);
    for (int k = 0; k < kSamples; ++k) {
        const double t = kSamples == 1 ? 0.0 : static_cast<double>(k) / (kSamples - 1);
        double p = std::exp(log_lo + t * (log_hi - log_lo));
        if (k == 0) p = range.lo;
        if (k == kSamples - 1) p = range.hi;
        samples.push_back(derive_constants({N, p, std::nullopt}));
    }

    double chosen = 0.0;
    for (int e = 1; e <= 20 && chosen == 0.0; ++e) {
        const double ct = std::ldexp(1.0, -e);
        bool ok = true;
        for (const auto& c : samples) {
            if (c.Dp * ct * ct > 1.0 || !(compute_PN(c, ct).margin() > 0.0)) {
                ok = false;
                break;
            }
        }
        if (ok) chosen = ct;
    }
    if (chosen == 0.0)
        throw NumericalError("choose_ctilde: no ctilde in {2^-1..2^-20} satisfies the P_N bound on [" +
                             std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
    std::lock_guard lock(mutex);
    cache.emplace(key, chosen);
    return chosen;
}

}  // namespace lnt
