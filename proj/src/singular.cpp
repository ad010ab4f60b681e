#include "lnt/singular.hpp"

#include <algorithm>
#include <cmath>

namespace lnt {

CriticalRadii critical_radii_of(const RadialTrajectory& traj) {
    CriticalRadii out;
    for (const auto& cp : traj.critical_points()) {
        out.radii.push_back(cp.r);
        out.kinds.push_back(cp.kind);
    }
    return out;
}

RadialState seed_at_origin(const DerivedConstants& c, double r0, double rtilde, bool one_term) {
    if (!(r0 > 0.0)) throw DomainError("seed radius must be positive");
    if (r0 > rtilde) throw DomainError("seed radius exceeds ctilde/sqrt(p), where the expansion is not validated");
    const double lead = c.A * std::pow(r0, -c.theta);
    if (one_term) return {r0, lead, -c.theta * lead / r0};
    const double corr = c.Dp * r0 * r0;
    return {r0, lead * (1.0 + corr), lead / r0 * (-c.theta + (2.0 - c.theta) * corr)};
}

namespace {

double resolve_ctilde(const ProblemParams& params, const SolverOptions& options) {
    if (options.ctilde) {
        if (!(*options.ctilde > 0.0 && *options.ctilde < 1.0)) throw DomainError("ctilde must lie in (0,1)");
        return *options.ctilde;
    }
    return choose_ctilde(params.N, {params.p, params.p});
}

RadialIntegrationResult run_from_seed(const ProblemParams& params, const DerivedConstants& c, double r0,
                                      double rtilde, double r_end, const SolverOptions& options,
                                      std::size_t stop_after) {
    RadialIntegrationConfig cfg;
    cfg.tol = options.tol;
    cfg.stop_after_critical = stop_after;
    for (double r : options.stops)
        if (r > r0 && r < r_end) cfg.stops.push_back(r);
    if (rtilde < r_end) cfg.stops.push_back(rtilde);
    std::sort(cfg.stops.begin(), cfg.stops.end());
    return integrate_radial(params, seed_at_origin(c, r0, rtilde, options.one_term_seed), r_end, cfg);
}

}  // namespace

SingularSolution solve_singular(const ProblemParams& params, double r_end, const SolverOptions& options) {
    validate(params);
    SingularSolution sol;
    sol.params = params;
    sol.constants = derive_constants(params);
    sol.ctilde = resolve_ctilde(params, options);
    sol.rtilde = sol.ctilde / std::sqrt(params.p);
    sol.seed_radius = options.seed_radius.value_or(sol.rtilde / 16.0);
    sol.tol = options.tol;
    if (!(r_end > sol.rtilde)) throw DomainError("r_end must exceed ctilde/sqrt(p)");

    auto run = run_from_seed(params, sol.constants, sol.seed_radius, sol.rtilde, r_end, options,
                             options.stop_after_critical);
    sol.status = run.status;
    if (!run.ok())
        throw NumericalError("singular solve failed (" + to_string(run.status) + "): " + run.message);
    sol.trajectory = std::move(run.trajectory);

    if (options.check_seed_sensitivity) {
        SolverOptions half = options;
        auto ref = run_from_seed(params, sol.constants, 0.5 * sol.seed_radius, sol.rtilde, sol.rtilde, half, 0);
        if (!ref.ok()) throw NumericalError("seed-sensitivity reference run failed: " + ref.message);
        sol.sensitivity.checked = true;
        sol.sensitivity.u_seed = sol.trajectory.at(sol.rtilde).u;
        sol.sensitivity.u_half_seed = ref.trajectory.samples().back().u;
        sol.sensitivity.allowed =
            10.0 * (options.tol.abs + options.tol.rel * std::abs(sol.sensitivity.u_seed));
        if (!sol.sensitivity.passed())
            throw SeedSensitivityError("seeds r0 and r0/2 disagree at ctilde/sqrt(p)", sol.sensitivity.u_seed,
                                       sol.sensitivity.u_half_seed);
    }

    if (!sol.trajectory.unit_crossings().empty()) sol.r_p = sol.trajectory.unit_crossings().front();
    sol.critical_radii = critical_radii_of(sol.trajectory);
    return sol;
}

double first_unit_crossing(const SingularSolution& sol) {
    if (!sol.r_p) throw NumericalError("no unit crossing before r_end");
    return *sol.r_p;
}

SingularSolution solve_until_critical(const ProblemParams& params, std::size_t i, double r_end,
                                      const SolverOptions& options) {
    if (i < 1) throw DomainError("critical point index must be >= 1");
    SolverOptions opt = options;
    opt.stop_after_critical = i;
    const double cap = std::ldexp(r_end, 10);
    for (double re = r_end; re <= cap; re *= 2.0) {
        auto sol = solve_singular(params, re, opt);
        if (sol.critical_radii.size() >= i) return sol;
    }
    throw NumericalError("critical point " + std::to_string(i) + " not found below r = " + std::to_string(cap));
}

double critical_radius(const ProblemParams& params, std::size_t i, double r_end, const SolverOptions& options) {
    return solve_until_critical(params, i, r_end, options).critical_radii(i);
}

OriginBoundsReport verify_origin_bounds(const SingularSolution& sol, std::size_t n_samples,
                                        std::optional<double> tolerance) {
    OriginBoundsReport rep;
    rep.samples = n_samples;
    rep.tolerance = tolerance.value_or(10.0 * sol.tol.rel);
    const auto& c = sol.constants;
    const double a = std::log(sol.seed_radius), b = std::log(sol.rtilde);
    rep.worst_lower_margin = std::numeric_limits<double>::infinity();
    rep.worst_upper_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n_samples; ++k) {
        const double r = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n_samples));
        const double rr = std::min(r, sol.rtilde);
        const double u = sol.trajectory.at(rr).u;
        const double lower = c.A * std::pow(rr, -c.theta);
        const double upper = lower * (1.0 + c.Dp * rr * rr);
        const double lo_margin = (u - lower) / lower;
        const double up_margin = (u - upper) / upper;
        if (lo_margin < rep.worst_lower_margin) {
            rep.worst_lower_margin = lo_margin;
            rep.r_worst_lower = rr;
        }
        if (up_margin > rep.worst_upper_margin) {
            rep.worst_upper_margin = up_margin;
            rep.r_worst_upper = rr;
        }
    }
    rep.passed = rep.worst_lower_margin >= -rep.tolerance && rep.worst_upper_margin <= rep.tolerance;
    return rep;
}

DerivativeBoundReport derivative_bound_check(const SingularSolution& sol, std::size_t n_samples) {
    const auto& c = sol.constants;
    DerivativeBoundReport rep;
    rep.p = c.p;
    const auto at_tilde = sol.trajectory.at(sol.rtilde);
    rep.du_at_rtilde = std::abs(at_tilde.du);
    rep.scaled_du = rep.du_at_rtilde * std::sqrt(c.p);
    rep.u_at_rtilde = at_tilde.u;
    const double a = std::log(sol.seed_radius), b = std::log(sol.rtilde);
    for (std::size_t k = 1; k <= n_samples; ++k) {
        const double r = std::min(sol.rtilde, std::exp(a + (b - a) * static_cast<double>(k) / n_samples));
        const auto s = sol.trajectory.at(r);
        const double corr = std::abs(s.du + c.theta * c.A * std::pow(r, -1.0 - c.theta));
        rep.max_correction_ratio = std::max(rep.max_correction_ratio, corr / std::pow(r, 1.0 - c.theta));
    }
    return rep;
}

DerivativeSweepReport derivative_bound_sweep(int N, const std::vector<double>& ps, const SolverOptions& options) {
    DerivativeSweepReport rep;
    if (ps.empty()) return rep;
    SolverOptions opt = options;
    if (!opt.ctilde) opt.ctilde = choose_ctilde(N, {ps.front(), ps.back()});
    for (double p : ps) {
        ProblemParams params{N, p, std::nullopt};
        const double rtilde = *opt.ctilde / std::sqrt(p);
        auto sol = solve_singular(params, 2.0 * rtilde, opt);
        rep.points.push_back(derivative_bound_check(sol));
    }
    rep.max_scaled_du = 0.0;
    rep.min_scaled_du = std::numeric_limits<double>::infinity();
    for (const auto& pt : rep.points) {
        rep.max_scaled_du = std::max(rep.max_scaled_du, pt.scaled_du);
        rep.min_scaled_du = std::min(rep.min_scaled_du, pt.scaled_du);
    }
    // bounded: the scaled derivative never exceeds its first value by more than 2x
    rep.bounded = rep.max_scaled_du <= 2.0 * rep.points.front().scaled_du;
    rep.u_tends_to_one = true;
    for (std::size_t k = 1; k < rep.points.size(); ++k)
        if (std::abs(rep.points[k].u_at_rtilde - 1.0) >= std::abs(rep.points[k - 1].u_at_rtilde - 1.0))
            rep.u_tends_to_one = false;
    return rep;
}

}  // namespace lnt
