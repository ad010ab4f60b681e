#include "lnt/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lnt {

std::string to_string(ShotStatus s) {
    switch (s) {
        case ShotStatus::Ok: return "OK";
        case ShotStatus::NonPositive: return "NONPOSITIVE";
        case ShotStatus::Failed: return "FAILED";
    }
    return "?";
}

RadialState taylor_start(double gamma, const ProblemParams& params, const Tolerances& tol, double h_cap) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    const double N = params.N, p = params.p;
    // u^p along the shot stays below gamma^p; keep a margin under ln(DBL_MAX)
    if (p * std::log(gamma) > 690.0)
        throw DomainError("gamma^p exceeds the double range (p ln gamma = " + std::to_string(p * std::log(gamma)) + ")");
    const double g = gamma - std::pow(gamma, p);
    const double dg = 1.0 - p * std::pow(gamma, p - 1.0);
    const double a = g / (2.0 * N);
    double h = h_cap;
    if (a != 0.0 && dg != 0.0) {
        // |b| = |dg a| / (4(N+2)) in logs, since the product can overflow
        const double log_b = std::log(std::abs(dg)) + std::log(std::abs(a)) - std::log(4.0 * (N + 2.0));
        h = std::min(h_cap, std::exp(0.25 * (std::log(tol.rel * std::max(1.0, gamma)) - log_b)));
    }
    return {h, gamma + a * h * h, 2.0 * a * h};
}

ShootingResult shoot(double gamma, const ProblemParams& params, double r_end, const ShootOptions& options) {
    ShootingResult res;
    res.gamma = gamma;
    res.params = params;
    const auto start = taylor_start(gamma, params, options.tol, std::min(1e-2, 1e-3 * r_end));
    res.h_start = start.r;

    RadialIntegrationConfig cfg;
    cfg.tol = options.tol;
    cfg.stop_after_critical = options.stop_after_critical;
    cfg.stops = options.stops;
    auto run = integrate_radial(params, start, r_end, cfg);
    res.trajectory = std::move(run.trajectory);
    res.critical_radii = critical_radii_of(res.trajectory);
    res.message = run.message;
    if (!run.ok()) {
        const auto& last = res.trajectory.samples().back();
        // the only domain the radial rhs enforces is u > 0
        const bool nonpositive = run.status == IntegrationStatus::DomainViolation && last.du < 0.0;
        res.status = nonpositive ? ShotStatus::NonPositive : ShotStatus::Failed;
    }
    return res;
}

ShootingResult shoot_until_critical(double gamma, const ProblemParams& params, std::size_t i, double r_end,
                                    const ShootOptions& options) {
    ShootOptions opt = options;
    opt.stop_after_critical = i;
    const double cap = std::ldexp(r_end, 10);
    ShootingResult res;
    for (double re = r_end; re <= cap; re *= 2.0) {
        res = shoot(gamma, params, re, opt);
        if (!res.ok() || res.critical_radii.size() >= i) break;
    }
    return res;
}

bool ConvergenceReport::halves() const {
    if (distances.empty() || !distances.front() || !distances.back()) return false;
    return *distances.back() < 0.5 * *distances.front();
}

namespace {

// Radius where u_gamma ~ A r^{-theta} would equal gamma.
double core_radius(double gamma, const DerivedConstants& c) { return std::pow(c.A / gamma, 1.0 / c.theta); }

struct DifferenceRun {
    std::optional<double> distance;
    std::optional<double> naive;
    double switch_radius = 0.0;
    std::string note;
};

DifferenceRun difference_run(const ProblemParams& params, double gamma, const std::vector<double>& grid,
                             const SingularSolution& reference, const ConvergenceOptions& options) {
    DifferenceRun out;
    const auto& c = reference.constants;
    const double r_s = std::min(reference.rtilde / 16.0, 100.0 * core_radius(gamma, c));
    out.switch_radius = r_s;

    // direct solve for the naive comparison; its grid values are step ends
    ShootOptions so;
    so.tol = options.tol;
    so.stops = grid;
    const auto full = shoot(gamma, params, grid.back(), so);
    if (!full.ok()) {
        out.note = "gamma=" + std::to_string(gamma) + ": shot " + to_string(full.status) + " (" + full.message + ")";
        return out;
    }
    double naive = 0.0;
    for (double r : grid) naive = std::max(naive, std::abs(full.trajectory.at(r).u - reference.trajectory.at(r).u));
    out.naive = naive;

    ShootOptions inner;
    inner.tol = options.tol;
    const auto head = shoot(gamma, params, r_s, inner);
    if (!head.ok() || head.h_start >= r_s) {
        out.note = "gamma=" + std::to_string(gamma) + ": origin segment failed";
        return out;
    }
    const auto us = head.trajectory.samples().back();
    const auto U0 = seed_at_origin(c, r_s, reference.rtilde);

    const double p = params.p, n1 = params.N - 1.0;
    auto rhs = [&](double r, const Vec<4>& y) -> Vec<4> {
        const double U = y[0], d = y[2];
        if (!(U > 0.0) || !(U + d > 0.0)) throw DomainError("non-positive state in difference system");
        const double Up = std::pow(U, p);
        const double diff = Up * std::expm1(p * std::log1p(d / U));
        return {y[1], -n1 / r * y[1] + U - Up, y[3], -n1 / r * y[3] + d - diff};
    };
    IntegratorOptions<4> opt;
    opt.tol = options.tol;
    opt.stops = grid;
    const double abs_u = options.tol.abs;
    const double rel = options.tol.rel;
    opt.abs_scale = [abs_u, rel](double r, const Vec<4>& y) -> Vec<4> {
        const double w = std::max(std::abs(y[2]), std::abs(y[3]) * r / (1.0 + r));
        const double s = std::max(rel * w, std::numeric_limits<double>::min());
        return {abs_u, abs_u, s, s};
    };
    double dist = 0.0;
    std::size_t next = 0;
    auto on_step = [&](const Step<4>& st) {
        while (next < grid.size() && grid[next] <= st.r1) {
            if (grid[next] == st.r1) dist = std::max(dist, std::abs(st.y1[2]));
            else if (grid[next] >= st.r0) dist = std::max(dist, std::abs(st.value(2, grid[next])));
            ++next;
        }
    };
    auto outcome = integrate_adaptive<4>(rhs, r_s, Vec<4>{U0.u, U0.du, us.u - U0.u, us.du - U0.du}, grid.back(), opt,
                                         {}, on_step, [](const EventHit<4>&) { return false; });
    if (!outcome.ok()) {
        out.note = "gamma=" + std::to_string(gamma) + ": difference system " + to_string(outcome.status);
        return out;
    }
    out.distance = dist;
    return out;
}

}  // namespace

ConvergenceReport convergence_to_singular(const ProblemParams& params, const std::vector<double>& gammas, double a,
                                          double b, const ConvergenceOptions& options) {
    if (!(a > 0.0 && a < b)) throw DomainError("interval must satisfy 0 < a < b");
    if (options.grid_points < 2) throw DomainError("at least two grid points required");
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        if (!(gammas[k] > 0.0)) throw DomainError("gammas must be positive");
        if (k > 0 && !(gammas[k] > gammas[k - 1])) throw DomainError("gammas must be increasing");
    }
    ConvergenceReport rep;
    rep.a = a;
    rep.b = b;
    rep.gammas = gammas;
    rep.grid_points = options.grid_points;
    std::vector<double> grid(options.grid_points);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(grid.size() - 1);

    SolverOptions so = options.singular;
    so.tol = options.tol;
    so.stops = grid;  // the reference is read at grid radii only
    const auto reference = solve_singular(params, b, so);

    bool usable = true;
    for (double g : gammas) {
        auto run = difference_run(params, g, grid, reference, options);
        rep.distances.push_back(run.distance);
        rep.naive_distances.push_back(run.naive);
        rep.switch_radii.push_back(run.switch_radius);
        if (!run.note.empty()) rep.notes.push_back(run.note);
        if (!run.distance) usable = false;
    }
    rep.decreasing = usable && !rep.distances.empty();
    for (std::size_t k = 1; rep.decreasing && k < rep.distances.size(); ++k)
        if (!(*rep.distances[k] < *rep.distances[k - 1])) rep.decreasing = false;
    rep.passed = rep.decreasing;
    return rep;
}

BranchSample branch_sample(std::size_t i, double R, int N, double gamma, PRange bracket, const ShootOptions& options,
                           double residual_tol) {
    if (i < 1) throw DomainError("critical point index must be >= 1");
    if (!(bracket.lo > critical_exponent(N) && bracket.hi > bracket.lo))
        throw DomainError("p bracket must lie above the Sobolev exponent");
    BranchSample out;
    out.gamma = gamma;
    out.i = i;
    out.R = R;
    auto radius = [&](double p) {
        ++out.evaluations;
        const auto res = shoot_until_critical(gamma, {N, p, std::nullopt}, i, 2.0 * R, options);
        if (!res.ok() || res.critical_radii.size() < i)
            throw NumericalError("critical point " + std::to_string(i) + " missing at p = " + std::to_string(p));
        return res.critical_radii(i);
    };
    double lo = bracket.lo, hi = bracket.hi;
    double f_lo = radius(lo) - R, f_hi = radius(hi) - R;
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw NumericalError("no sign change of r^i - R over the p bracket");
    double p_best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double f_best = std::min(std::abs(f_lo), std::abs(f_hi));
    double r_best = R + (std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi);
    while (f_best >= residual_tol && hi - lo > 1e-14 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = radius(mid) - R;
        if (std::abs(fm) < f_best) {
            f_best = std::abs(fm);
            p_best = mid;
            r_best = R + fm;
        }
        if ((fm > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    out.p = p_best;
    out.residual = f_best;
    out.r_i = r_best;
    return out;
}

}  // namespace lnt
