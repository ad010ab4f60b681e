#include "lnt/exponent.hpp"

#include <algorithm>
#include <cmath>

namespace lnt {

std::size_t find_istar(const ProblemParams& params, double R, const SolverOptions& options) {
    if (!(R > 0.0)) throw DomainError("R must be positive");
    SolverOptions opt = options;
    opt.stop_after_critical = 0;
    const double start = std::max(2.0 * R, 2.0 * choose_ctilde(params.N, {params.p, params.p}) / std::sqrt(params.p));
    const double cap = std::ldexp(start, 10);
    for (double re = start; re <= cap; re *= 2.0) {
        const auto sol = solve_singular(params, re, opt);
        const auto& radii = sol.critical_radii.radii;
        const auto it = std::upper_bound(radii.begin(), radii.end(), R);
        if (it != radii.end()) return static_cast<std::size_t>(it - radii.begin()) + 1;
    }
    throw NumericalError("no critical radius above R below r = " + std::to_string(cap));
}

namespace {

struct Probe {
    double R_i;
    SingularSolution sol;
};

Probe probe(std::size_t i, double R, int N, double p, const SolverOptions& opt) {
    auto sol = solve_until_critical({N, p, std::nullopt}, i, 2.0 * R, opt);
    const double r_i = sol.critical_radii(i);
    return {r_i, std::move(sol)};
}

ExponentSolution search(std::size_t i, double R, int N, double p_lo, const ExponentOptions& options,
                        const SolverOptions& solver) {
    ExponentSolution out;
    out.i = i;
    out.R = R;
    out.tol = solver.tol;
    auto g = [&](double p) {
        ++out.evaluations;
        return probe(i, R, N, p, solver).R_i - R;
    };

    double lo = p_lo;
    const double g_lo0 = g(lo);
    if (!(g_lo0 > 0.0))
        throw DomainError("R_p^i <= R already at p_lo; i is below i*(p_lo, R) or R is too large");
    double hi = lo;
    double g_hi = g_lo0;
    while (g_hi > 0.0) {
        lo = hi;
        if (hi >= options.p_cap) throw NumericalError("no bracket for R_p^i < R below p_cap");
        hi = std::min(2.0 * hi, options.p_cap);
        g_hi = g(hi);
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;

    double p_best = hi, g_best = g_hi;
    while (true) {
        const bool residual_ok = std::abs(g_best) < options.residual_rel * R;
        if (residual_ok && hi - lo <= options.width_rel * hi) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm > 0.0) lo = mid;
        else hi = mid;
        if (std::abs(gm) <= std::abs(g_best)) {
            g_best = gm;
            p_best = mid;
        }
    }
    if (!(std::abs(g_best) < options.residual_rel * R))
        throw NumericalError("bisection stalled above the residual tolerance");

    auto final_probe = probe(i, R, N, p_best, solver);
    out.p = p_best;
    out.R_at_p = final_probe.R_i;
    out.residual = std::abs(final_probe.R_i - R);
    const auto& traj = final_probe.sol.trajectory;
    out.crossings = traj.crossings_up_to(R);
    if (R <= traj.r_max()) {
        out.du_at_R = traj.at(R).du;
    } else {
        const double u = traj.samples().back().u;
        out.du_at_R = (u - std::pow(u, p_best)) * (R - traj.r_max());
    }
    return out;
}

}  // namespace

ExponentSolution find_exponent(std::size_t i, double R, int N, double p_lo, const ExponentOptions& options) {
    if (i < 1) throw DomainError("critical point index must be >= 1");
    if (!(R > 0.0)) throw DomainError("R must be positive");
    if (!(p_lo > critical_exponent(N))) throw DomainError("p_lo must exceed the Sobolev exponent");
    SolverOptions solver = options.solver;
    for (int attempt = 0;; ++attempt) {
        auto sol = search(i, R, N, p_lo, options, solver);
        sol.retries = attempt;
        if (sol.crossings_match()) return sol;
        if (attempt >= options.max_retries)
            throw NumericalError("crossing count " + std::to_string(sol.crossings) + " != " + std::to_string(i) +
                                 " after tolerance tightening");
        solver.tol.abs /= 10.0;
        solver.tol.rel /= 10.0;
    }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) out[0] = a;
    for (std::size_t k = 0; n > 1 && k < n; ++k)
        out[k] = k + 1 == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

std::vector<double> midpoint_refinement(const std::vector<double>& grid) {
    std::vector<double> out;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0) out.push_back(0.5 * (grid[k - 1] + grid[k]));
        out.push_back(grid[k]);
    }
    return out;
}

std::vector<double> critical_radii_on_grid(std::size_t i, int N, const std::vector<double>& ps,
                                           const SolverOptions& options, double r_end) {
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(critical_radius({N, p, std::nullopt}, i, r_end, options));
    return out;
}

double modulus_of(const std::vector<double>& values) {
    double m = 0.0;
    for (std::size_t k = 1; k < values.size(); ++k) m = std::max(m, std::abs(values[k] - values[k - 1]));
    return m;
}

ContinuityReport continuity_scan(std::size_t i, int N, const std::vector<double>& coarse,
                                 std::optional<std::vector<double>> fine, const SolverOptions& options) {
    for (std::size_t k = 1; k < coarse.size(); ++k)
        if (!(coarse[k] > coarse[k - 1])) throw DomainError("p grid must be increasing");
    if (!coarse.empty() && !(coarse.front() > critical_exponent(N)))
        throw DomainError("p grid must lie above the Sobolev exponent");
    ContinuityReport rep;
    rep.i = i;
    rep.coarse_p = coarse;
    rep.fine_p = fine ? *fine : midpoint_refinement(coarse);
    rep.coarse_R = critical_radii_on_grid(i, N, rep.coarse_p, options);
    rep.fine_R = critical_radii_on_grid(i, N, rep.fine_p, options);
    rep.coarse_modulus = modulus_of(rep.coarse_R);
    rep.fine_modulus = modulus_of(rep.fine_R);
    rep.ratio = rep.coarse_modulus > 0.0 ? rep.fine_modulus / rep.coarse_modulus : 0.0;

    std::vector<double> d;
    for (std::size_t k = 1; k < rep.fine_R.size(); ++k) d.push_back(std::abs(rep.fine_R[k] - rep.fine_R[k - 1]));
    for (std::size_t k = 0; k < d.size(); ++k) {
        double local = 0.0;
        if (k > 0) local = std::max(local, d[k - 1]);
        if (k + 1 < d.size()) local = std::max(local, d[k + 1]);
        if (local > 0.0) rep.worst_jump_ratio = std::max(rep.worst_jump_ratio, d[k] / local);
    }
    rep.jump_free = rep.worst_jump_ratio <= 10.0;
    const bool single = rep.coarse_p.size() < 2;
    rep.passed = rep.jump_free && (single || (rep.ratio >= 1.0 / 3.0 && rep.ratio <= 2.0 / 3.0));
    return rep;
}

}  // namespace lnt
