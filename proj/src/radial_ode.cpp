#include "lnt/radial_ode.hpp"

#include <algorithm>
#include <cmath>

namespace lnt {

SecondOrderRhs rhs_original(const RadialState& s, const ProblemParams& params) {
    if (!(s.u > 0.0)) throw PositivityError("solution left the positive cone at r = " + std::to_string(s.r));
    const double up = std::pow(s.u, params.p);
    return {s.du, -(params.N - 1.0) / s.r * s.du + s.u - up};
}

SecondOrderRhs rhs_eta(const EtaState& s, const DerivedConstants& c) {
    const double one_eta = 1.0 + s.eta;
    if (!(one_eta > 0.0)) throw PositivityError("1 + eta left the positive cone");
    const double p = c.p;
    const double lift = c.m * c.m * std::exp(-2.0 * c.m * s.zeta) * one_eta;
    const double dd = c.alpha * s.deta - (p - 1.0) * s.eta - std::pow(one_eta, p) + 1.0 + p * s.eta + lift;
    return {s.deta, dd};
}

double w_potential_ratio(double u, double p) {
    if (std::abs(u - 1.0) < 1e-8) return p - 1.0;
    return (std::pow(u, p) - u) / (u - 1.0);
}

SecondOrderRhs rhs_w(double r, double u, double w, double dw, const ProblemParams& params) {
    const double n = params.N;
    const double coeff = w_potential_ratio(u, params.p) - (n - 1.0) * (n - 3.0) / (4.0 * r * r);
    return {dw, -coeff * w};
}

double energy(const RadialState& s, double p) {
    return 0.5 * s.du * s.du - 0.5 * s.u * s.u + std::pow(s.u, p + 1.0) / (p + 1.0);
}

RadialState transform_eta_to_u(const EtaState& s, const DerivedConstants& c) {
    const double r = std::exp(-c.m * s.zeta);
    const double scale = c.A * std::pow(r, -c.theta);
    return {r, scale * (1.0 + s.eta), scale / r * (-c.theta * (1.0 + s.eta) - s.deta / c.m)};
}

EtaState transform_u_to_eta(const RadialState& s, const DerivedConstants& c) {
    const double zeta = -std::log(s.r) / c.m;
    const double rt = std::pow(s.r, c.theta) / c.A;
    const double eta = s.u * rt - 1.0;
    const double deta = -c.m * (s.du * s.r * rt + c.theta * (1.0 + eta));
    return {zeta, eta, deta};
}

RadialState RadialTrajectory::at(double r) const {
    if (empty() || r < r_min() || r > r_max())
        throw DomainError("trajectory does not cover r = " + std::to_string(r));
    auto it = std::lower_bound(samples_.begin(), samples_.end(), r,
                               [](const RadialState& s, double x) { return s.r < x; });
    std::size_t k = static_cast<std::size_t>(it - samples_.begin());
    if (k < samples_.size() && samples_[k].r == r) return samples_[k];
    if (k == 0) return samples_.front();
    const RadialState& a = samples_[k - 1];
    const RadialState& b = samples_[k];
    Step<2> step{a.r, b.r, {a.u, a.du}, {b.u, b.du}, {a.du, ddu_[k - 1]}, {b.du, ddu_[k]}};
    return {r, step.value(0, r), step.value(1, r)};
}

void RadialTrajectory::append(const RadialState& s, double ddu, double p) {
    samples_.push_back(s);
    ddu_.push_back(ddu);
    energy_.push_back(lnt::energy(s, p));
}

std::size_t RadialTrajectory::crossings_up_to(double r) const {
    return static_cast<std::size_t>(std::upper_bound(unit_crossings_.begin(), unit_crossings_.end(), r) -
                                    unit_crossings_.begin());
}

RadialIntegrationResult integrate_radial(const ProblemParams& params, const RadialState& start, double r_end,
                                         const RadialIntegrationConfig& config) {
    RadialIntegrationResult result;
    auto& traj = result.trajectory;
    const double p = params.p;

    auto rhs = [&](double r, const Vec<2>& y) -> Vec<2> {
        const auto d = rhs_original({r, y[0], y[1]}, params);
        return {d.d1, d.d2};
    };

    constexpr int kUnit = 1, kCritical = 2;
    std::vector<EventSpec> events;
    if (config.track_unit_crossings) events.push_back({0, 1.0, kUnit});
    if (config.track_critical_points) events.push_back({1, 0.0, kCritical});

    IntegratorOptions<2> opt;
    opt.tol = config.tol;
    opt.stops = config.stops;

    {
        const auto d0 = rhs_original(start, params);
        traj.append(start, d0.d2, p);
    }
    auto on_step = [&](const Step<2>& step) { traj.append({step.r1, step.y1[0], step.y1[1]}, step.f1[1], p); };
    std::size_t n_critical = 0;
    auto on_event = [&](const EventHit<2>& hit) {
        if (hit.id == kUnit) {
            traj.add_unit_crossing(hit.r);
            return false;
        }
        const double u = hit.y[0];
        const double udd = u - std::pow(u, p);  // u'' at a critical point
        traj.add_critical_point({hit.r, udd > 0.0 ? CriticalKind::Min : CriticalKind::Max, u});
        ++n_critical;
        return config.stop_after_critical > 0 && n_critical >= config.stop_after_critical;
    };

    const auto outcome =
        integrate_adaptive<2>(rhs, start.r, Vec<2>{start.u, start.du}, r_end, opt, events, on_step, on_event);
    result.status = outcome.status;
    result.message = outcome.message;
    return result;
}

EnergyAudit audit_energy(const RadialTrajectory& traj, const ProblemParams& params, const Tolerances& tol,
                         double smooth_floor) {
    EnergyAudit audit;
    const auto& s = traj.samples();
    const auto& e = traj.energy();
    const auto& dd = traj.second_derivatives();
    const double n1 = params.N - 1.0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double allowance = 10.0 * (tol.abs + tol.rel * std::max(std::abs(e[k]), std::abs(e[k + 1])));
        const double increase = e[k + 1] - e[k];
        audit.worst_increase = std::max(audit.worst_increase, increase - allowance);
        if (increase > allowance) audit.monotone = false;

        const double ra = s[k].r, rb = s[k + 1].r, rm = 0.5 * (ra + rb);
        Step<2> step{ra, rb, {s[k].u, s[k].du}, {s[k + 1].u, s[k + 1].du}, {s[k].du, dd[k]}, {s[k + 1].du, dd[k + 1]}};
        const double dum = step.value(1, rm);
        const double diss = -(rb - ra) / 6.0 *
                            (n1 * s[k].du * s[k].du / ra + 4.0 * n1 * dum * dum / rm + n1 * s[k + 1].du * s[k + 1].du / rb);
        const double scale = 1.0 + std::max(std::abs(e[k]), std::abs(e[k + 1]));
        if (std::abs(diss) < smooth_floor * scale) continue;
        ++audit.smooth_steps;
        audit.worst_dissipation_mismatch =
            std::max(audit.worst_dissipation_mismatch, std::abs(increase - diss) / std::abs(diss));
    }
    return audit;
}

}  // namespace lnt
