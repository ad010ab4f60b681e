#include "lnt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lnt {

Potential potential_from_trajectory(const RadialTrajectory& traj, double p) {
    const RadialTrajectory* t = &traj;
    return {[t, p](double r) {
        const double u = t->at(r).u;
        if (!(u > 0.0)) throw DomainError("potential needs a positive solution");
        return p * std::exp((p - 1.0) * std::log(u) + 2.0 * std::log(r)) - r * r;
    }};
}

Potential constant_potential(double u0, double p) {
    const double q = p * std::pow(u0, p - 1.0) - 1.0;
    return {[q](double r) { return q * r * r; }};
}

Potential rescaled_potential(const Potential& q, double L) {
    return {[q, L](double s) { return q.scaled(L * s); }};
}

std::string to_string(GridKind kind) { return kind == GridKind::Uniform ? "uniform" : "geometric"; }

std::vector<double> make_grid(double delta, double R, std::size_t intervals, GridKind kind) {
    if (!(delta > 0.0 && delta < R)) throw DomainError("grid needs 0 < delta < R");
    if (intervals < 1) throw DomainError("grid needs at least one interval");
    std::vector<double> g(intervals + 1);
    const double n = static_cast<double>(intervals);
    if (kind == GridKind::Uniform) {
        for (std::size_t k = 0; k <= intervals; ++k) g[k] = delta + (R - delta) * (static_cast<double>(k) / n);
    } else {
        const double a = std::log(delta), b = std::log(R);
        for (std::size_t k = 0; k <= intervals; ++k) g[k] = std::exp(a + (b - a) * (static_cast<double>(k) / n));
    }
    g.front() = delta;
    g.back() = R;
    return g;
}

DiscreteOperator assemble_on_grid(const Potential& q, int N, std::vector<double> grid) {
    const std::size_t n = grid.size() - 1;
    if (grid.size() < 2) throw DomainError("grid needs at least two nodes");
    for (std::size_t k = 1; k <= n; ++k)
        if (!(grid[k] > grid[k - 1])) throw DomainError("grid must be strictly increasing");
    DiscreteOperator op;
    auto& spec = op.spec;
    spec.delta = grid.front();
    spec.R = grid.back();
    spec.weight_exponent = N - 1;
    spec.potential.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) spec.potential[k] = q(grid[k]);

    const double e = N - 1.0;
    std::vector<double> h(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
        h[k] = grid[k + 1] - grid[k];
        w[k] = std::pow(0.5 * (grid[k] + grid[k + 1]), e) / h[k];
    }
    op.A.diag.resize(n);
    op.A.off.resize(n - 1);
    op.mass.resize(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double cell = j < n ? 0.5 * (h[j - 1] + h[j]) : 0.5 * h[j - 1];
        const double m = std::pow(grid[j], e) * cell;
        op.mass[j - 1] = m;
        op.A.diag[j - 1] = w[j - 1] + (j < n ? w[j] : 0.0) - spec.potential[j] * m;
        if (j < n) op.A.off[j - 1] = -w[j];
    }
    spec.grid = std::move(grid);
    return op;
}

DiscreteOperator assemble_operator(const Potential& q, int N, double delta, double R, std::size_t intervals,
                                   GridKind kind) {
    if (intervals < 32) throw DomainError("grid_size must be at least 32");
    return assemble_on_grid(q, N, make_grid(delta, R, intervals, kind));
}

DiscreteOperator assemble_from_trajectory(const RadialTrajectory& traj, const ProblemParams& params, double delta,
                                          double R, std::size_t intervals, GridKind kind) {
    if (!traj.covers(delta, R))
        throw DomainError("trajectory does not cover [" + std::to_string(delta) + ", " + std::to_string(R) + "]");
    return assemble_operator(potential_from_trajectory(traj, params.p), params.N, delta, R, intervals, kind);
}

namespace {

// Spectral radius bound of M^{-1/2} A M^{-1/2} (Gershgorin).
std::pair<double, double> gershgorin(const SymTridiagonal& A, const std::vector<double>& mass) {
    const std::size_t n = A.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
        double rad = 0.0;
        if (k > 0) rad += std::abs(A.off[k - 1]) / std::sqrt(mass[k] * mass[k - 1]);
        if (k + 1 < n) rad += std::abs(A.off[k]) / std::sqrt(mass[k] * mass[k + 1]);
        const double c = A.diag[k] / mass[k];
        lo = std::min(lo, c - rad);
        hi = std::max(hi, c + rad);
    }
    return {lo, hi};
}

// Negative pivots of A - shift M, or nullopt on an exactly zero pivot.
std::optional<std::size_t> pivot_signs(const SymTridiagonal& A, const std::vector<double>& mass, double shift) {
    std::size_t neg = 0;
    double d = 1.0;
    for (std::size_t k = 0; k < A.size(); ++k) {
        d = A.diag[k] - shift * mass[k] - (k > 0 ? A.off[k - 1] * (A.off[k - 1] / d) : 0.0);
        if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
        if (d < 0.0) ++neg;
    }
    return neg;
}

}  // namespace

std::size_t negative_count(const SymTridiagonal& A, const std::vector<double>& mass, double shift) {
    if (A.size() == 0) return 0;
    if (mass.size() != A.size() || A.off.size() + 1 != A.size()) throw DomainError("inconsistent pencil sizes");
    if (auto c = pivot_signs(A, mass, shift)) return *c;
    const auto [lo, hi] = gershgorin(A, mass);
    const double scale = std::max({std::abs(lo), std::abs(hi), std::abs(shift), 1.0});
    for (int attempt = 1; attempt <= 3; ++attempt) {
        if (auto c = pivot_signs(A, mass, shift + attempt * 1e-12 * scale)) return *c;
    }
    throw NumericalError("inertia recurrence broke down at shift " + std::to_string(shift));
}

std::size_t negative_count(const DiscreteOperator& op, double shift) { return negative_count(op.A, op.mass, shift); }

std::vector<double> smallest_eigenvalues(const SymTridiagonal& A, const std::vector<double>& mass, std::size_t k,
                                         double rel_tol) {
    std::vector<double> out;
    k = std::min(k, A.size());
    if (k == 0) return out;
    const auto [lo0, hi0] = gershgorin(A, mass);
    double floor = lo0;
    for (std::size_t idx = 0; idx < k; ++idx) {
        double lo = floor, hi = hi0;
        for (int it = 0; it < 200 && hi - lo > rel_tol * std::max(std::abs(0.5 * (lo + hi)), 1.0); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (negative_count(A, mass, mid) >= idx + 1) hi = mid;
            else lo = mid;
        }
        out.push_back(0.5 * (lo + hi));
        floor = lo;
    }
    return out;
}

double discrete_rayleigh(const DiscreteOperator& op, const std::vector<double>& phi) {
    const std::size_t n = op.A.size();
    if (phi.size() != n) throw DomainError("nodal vector has the wrong size");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        num += op.A.diag[k] * phi[k] * phi[k];
        if (k + 1 < n) num += 2.0 * op.A.off[k] * phi[k] * phi[k + 1];
        den += op.mass[k] * phi[k] * phi[k];
    }
    if (!(den > 0.0)) throw DomainError("zero vector has no Rayleigh quotient");
    return num / den;
}

SpectrumReport spectrum(const DiscreteOperator& op, std::size_t n_eigs) {
    SpectrumReport rep;
    rep.negative_count = negative_count(op);
    rep.smallest_eigenvalues = smallest_eigenvalues(op.A, op.mass, n_eigs);
    rep.cutoff = op.spec.delta;
    rep.R = op.spec.R;
    rep.grid_size = op.spec.grid.size() - 1;
    return rep;
}

std::string to_string(MorseClass c) {
    switch (c) {
        case MorseClass::StableTail: return "SUPERCRITICAL-STABLE-TAIL";
        case MorseClass::Unbounded: return "UNBOUNDED";
        case MorseClass::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

MorseScan morse_scan(const RadialTrajectory& traj, const ProblemParams& params, double R,
                     const std::vector<double>& deltas, const std::vector<std::size_t>& grid_sizes,
                     const MorseOptions& options) {
    if (deltas.empty() || grid_sizes.empty()) throw DomainError("morse scan needs deltas and grid sizes");
    for (std::size_t k = 1; k < deltas.size(); ++k)
        if (!(deltas[k] < deltas[k - 1])) throw DomainError("deltas must be decreasing");
    for (std::size_t k = 1; k < grid_sizes.size(); ++k)
        if (!(grid_sizes[k] > grid_sizes[k - 1])) throw DomainError("grid sizes must be increasing");
    MorseScan scan;
    scan.deltas = deltas;
    scan.grid_sizes = grid_sizes;
    const auto q = potential_from_trajectory(traj, params.p);
    if (!traj.covers(deltas.back(), R)) throw DomainError("trajectory does not cover the smallest cutoff and R");
    for (double delta : deltas) {
        std::vector<std::size_t> per_grid;
        for (std::size_t n : grid_sizes) {
            const auto op = assemble_operator(q, params.N, delta, R, n, options.grid_kind);
            auto rep = spectrum(op, options.n_eigs);
            rep.grid_kind = options.grid_kind;
            per_grid.push_back(rep.negative_count);
            scan.reports.push_back(std::move(rep));
        }
        scan.counts.push_back(per_grid.back());
        scan.grid_converged.push_back(per_grid.size() >= 2 && per_grid[per_grid.size() - 1] == per_grid[per_grid.size() - 2]);
    }
    const bool converged = std::all_of(scan.grid_converged.begin(), scan.grid_converged.end(), [](bool b) { return b; });
    if (!converged || scan.counts.size() < 2) return scan;
    bool strict = true, monotone = true;
    for (std::size_t k = 1; k < scan.counts.size(); ++k) {
        if (!(scan.counts[k] > scan.counts[k - 1])) strict = false;
        if (scan.counts[k] < scan.counts[k - 1]) monotone = false;
    }
    const bool plateau = monotone && scan.counts[scan.counts.size() - 1] == scan.counts[scan.counts.size() - 2];
    if (strict) scan.classification = MorseClass::Unbounded;
    else if (plateau) scan.classification = MorseClass::StableTail;
    return scan;
}

double RadialSample::value(std::size_t k) const { return std::exp(-c * std::log(r[k])) * v[k]; }
double RadialSample::derivative(std::size_t k) const { return std::exp(-(c + 1.0) * std::log(r[k])) * w[k]; }

double rayleigh_quotient(const RadialSample& phi, const Potential& q, int N) {
    const std::size_t n = phi.r.size();
    if (phi.v.size() != n || phi.w.size() != n) throw DomainError("sample arrays differ in length");
    if (n < 2) return 0.0;
    const double e = N - 3.0 - 2.0 * phi.c;
    auto integrand = [&](std::size_t k) {
        const double r = phi.r[k];
        if (phi.v[k] == 0.0 && phi.w[k] == 0.0) return 0.0;
        const double body = phi.w[k] * phi.w[k] - q.scaled(r) * phi.v[k] * phi.v[k];
        return body * std::exp(e * std::log(r));
    };
    double sum = 0.0;
    double prev = integrand(0);
    for (std::size_t k = 1; k < n; ++k) {
        if (!(phi.r[k] > phi.r[k - 1])) throw DomainError("sample radii must increase");
        const double cur = integrand(k);
        sum += 0.5 * (phi.r[k] - phi.r[k - 1]) * (prev + cur);
        prev = cur;
    }
    return sum;
}

double hardy_radius(int j, double eps0) { return std::exp(-2.0 * std::numbers::pi * j / eps0); }

RadialSample hardy_test_function(int j, double eps0, int N, std::size_t points) {
    if (j < 1) throw DomainError("j must be >= 1");
    if (!(eps0 > 0.0)) throw DomainError("eps0 must be positive");
    if (points < 256) throw DomainError("at least 256 samples per support");
    RadialSample f;
    f.c = 0.5 * (N - 2.0);
    const double t_lo = -2.0 * std::numbers::pi * (j + 1) / eps0;
    const double t_hi = -2.0 * std::numbers::pi * j / eps0;
    f.r.resize(points);
    f.v.resize(points);
    f.w.resize(points);
    const double k = 0.5 * eps0;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        f.r[i] = std::exp(t);
        // sin(k t) vanishes at both ends; pin the endpoints exactly
        const double s = (i == 0 || i + 1 == points) ? 0.0 : std::sin(k * t);
        f.v[i] = s;
        f.w[i] = -f.c * s + k * std::cos(k * t);
    }
    return f;
}

HardyCertificate hardy_certificate(int j, double eps0, const Potential& q, const DerivedConstants& c,
                                   std::size_t points) {
    HardyCertificate cert;
    cert.j = j;
    cert.r_lo = hardy_radius(j + 1, eps0);
    cert.r_hi = hardy_radius(j, eps0);
    const auto f = hardy_test_function(j, eps0, c.N, points);
    cert.J = rayleigh_quotient(f, q, c.N);
    const double L = 2.0 * std::numbers::pi / eps0;
    cert.J_model = 0.5 * L * (0.25 * eps0 * eps0 + f.c * f.c - c.hardy_limit());

    const auto qhat = rescaled_potential(q, cert.r_hi);
    const double s_lo = cert.r_lo / cert.r_hi;
    const auto op = assemble_on_grid(qhat, c.N, make_grid(s_lo, 1.0, points - 1, GridKind::Geometric));
    std::vector<double> phi(op.A.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double s = op.spec.grid[k + 1];
        phi[k] = k + 1 == phi.size() ? 0.0 : std::exp(-f.c * std::log(s)) * std::sin(0.5 * eps0 * std::log(s));
    }
    cert.discrete = discrete_rayleigh(op, phi);
    return cert;
}

ThresholdReport potential_threshold_check(const RadialTrajectory& traj, const DerivedConstants& c, double r0,
                                          double rtilde, double eps0, std::size_t samples) {
    ThresholdReport rep;
    rep.hardy_constant = 0.25 * (c.N - 2.0) * (c.N - 2.0);
    rep.limit = c.hardy_limit();
    rep.margin = rep.limit - rep.hardy_constant;
    rep.above = rep.margin > 0.0;
    rep.eps_margin = rep.above ? rep.limit - (rep.hardy_constant + eps0 * eps0)
                               : rep.hardy_constant * (1.0 - eps0 * eps0) - rep.limit;
    const auto q = potential_from_trajectory(traj, c.p);
    const double a = std::log(r0), b = std::log(rtilde);
    rep.min_scaled = std::numeric_limits<double>::infinity();
    rep.max_scaled = -rep.min_scaled;
    for (std::size_t k = 1; k <= samples; ++k) {
        const double r = std::min(rtilde, std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(samples)));
        const double v = q.scaled(r);
        if (k == 1) rep.observed = v;
        rep.min_scaled = std::min(rep.min_scaled, v);
        rep.max_scaled = std::max(rep.max_scaled, v);
    }
    rep.limit_rel_error = std::abs(rep.observed - rep.limit) / rep.limit;
    return rep;
}

}  // namespace lnt
