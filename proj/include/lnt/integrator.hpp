#pragma once

// Explicit Dormand-Prince 5(4) pair with PI step-size control, cubic Hermite
// dense output and sign-change event location.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lnt/params.hpp"

namespace lnt {

struct Tolerances {
    double abs = 1e-10;
    double rel = 1e-10;
};

template <std::size_t Dim>
using Vec = std::array<double, Dim>;

/// One accepted step. Each component is interpolated by the cubic Hermite
/// polynomial through its endpoint values and derivatives.
template <std::size_t Dim>
struct Step {
    double r0 = 0.0, r1 = 0.0;
    Vec<Dim> y0{}, y1{}, f0{}, f1{};

    double width() const { return r1 - r0; }

    double value(std::size_t k, double r) const {
        const double h = r1 - r0;
        const double t = (r - r0) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k];
    }

    double slope(std::size_t k, double r) const {
        const double h = r1 - r0;
        const double t = (r - r0) / h;
        const double t2 = t * t;
        const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
        const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
        return d00 * y0[k] + d10 * f0[k] + d01 * y1[k] + d11 * f1[k];
    }

    Vec<Dim> state(double r) const {
        Vec<Dim> y;
        for (std::size_t k = 0; k < Dim; ++k) y[k] = value(k, r);
        return y;
    }
};

/// Event g(r) = y[component](r) - level; fires on a sign change.
struct EventSpec {
    std::size_t component = 0;
    double level = 0.0;
    int id = 0;
};

template <std::size_t Dim>
struct EventHit {
    int id = 0;
    double r = 0.0;
    Vec<Dim> y{};
    Vec<Dim> dy{};
};

enum class IntegrationStatus {
    Completed,      // reached r_end
    Stopped,        // a terminal event requested the stop
    StepUnderflow,  // step size fell below the minimum
    DomainViolation,  // the right-hand side rejected every trial near the last state
    DegenerateEvent,  // two events at the same radius
    MaxSteps,
};

inline std::string to_string(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::Completed: return "completed";
        case IntegrationStatus::Stopped: return "stopped";
        case IntegrationStatus::StepUnderflow: return "step-underflow";
        case IntegrationStatus::DomainViolation: return "domain-violation";
        case IntegrationStatus::DegenerateEvent: return "degenerate-event";
        case IntegrationStatus::MaxSteps: return "max-steps";
    }
    return "unknown";
}

template <std::size_t Dim>
struct IntegrationOutcome {
    IntegrationStatus status = IntegrationStatus::Completed;
    double r_last = 0.0;
    Vec<Dim> y_last{};
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::string message;

    bool ok() const {
        return status == IntegrationStatus::Completed || status == IntegrationStatus::Stopped;
    }
};

template <std::size_t Dim>
struct IntegratorOptions {
    Tolerances tol;
    double initial_step = 0.0;       // 0 selects a step from the local scales
    double min_step_factor = 1e-13;  // minimum step relative to |r|
    std::size_t max_steps = 20'000'000;
    /// Optional replacement of the absolute tolerance, per component, as a
    /// function of the state at the start of the step.
    std::function<Vec<Dim>(double, const Vec<Dim>&)> abs_scale;
    double event_tol = 1e-12;
    /// Ties closer than this (relative to r) are reported as degenerate.
    double event_tie_tol = 1e-12;
    /// Radii inside (r_start, r_end) that must coincide with step ends, so
    /// the state there is a step value rather than an interpolant. Sorted.
    std::vector<double> stops;
};

/// Integrates y' = rhs(r, y) on [r_start, r_end]. The rhs may throw
/// DomainError for states outside its domain; such trials are rejected and
/// retried with a smaller step.
///
/// `on_step(step)` is called for every accepted step. `on_event(hit)` is
/// called for every located event in increasing r and returns true to stop
/// the integration at that event.
template <std::size_t Dim, class Rhs, class OnStep, class OnEvent>
IntegrationOutcome<Dim> integrate_adaptive(Rhs&& rhs, double r_start, const Vec<Dim>& y_start, double r_end,
                                           const IntegratorOptions<Dim>& opt,
                                           const std::vector<EventSpec>& events, OnStep&& on_step,
                                           OnEvent&& on_event) {
    // Dormand-Prince tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    using V = Vec<Dim>;
    IntegrationOutcome<Dim> out;
    out.r_last = r_start;
    out.y_last = y_start;

    auto eval = [&](double r, const V& y, V& f) -> bool {
        try {
            f = rhs(r, y);
        } catch (const DomainError&) {
            return false;
        }
        for (double v : f)
            if (!std::isfinite(v)) return false;
        return true;
    };

    double r = r_start;
    V y = y_start;
    V f{};
    if (!eval(r, y, f)) {
        out.status = IntegrationStatus::DomainViolation;
        out.message = "right-hand side rejected the initial state";
        return out;
    }

    // Fifth-order solution of a single step of width hh (no error estimate).
    auto dp_step = [&](double r0, const V& y0, const V& f0, double hh, V& y1) -> bool {
        if (hh == 0.0) {
            y1 = y0;
            return true;
        }
        V s2, s3, s4, s5, s6, t;
        auto put = [&](auto&& combine) {
            for (std::size_t i = 0; i < Dim; ++i) t[i] = y0[i] + hh * combine(i);
        };
        put([&](std::size_t i) { return a21 * f0[i]; });
        if (!eval(r0 + c2 * hh, t, s2)) return false;
        put([&](std::size_t i) { return a31 * f0[i] + a32 * s2[i]; });
        if (!eval(r0 + c3 * hh, t, s3)) return false;
        put([&](std::size_t i) { return a41 * f0[i] + a42 * s2[i] + a43 * s3[i]; });
        if (!eval(r0 + c4 * hh, t, s4)) return false;
        put([&](std::size_t i) { return a51 * f0[i] + a52 * s2[i] + a53 * s3[i] + a54 * s4[i]; });
        if (!eval(r0 + c5 * hh, t, s5)) return false;
        put([&](std::size_t i) { return a61 * f0[i] + a62 * s2[i] + a63 * s3[i] + a64 * s4[i] + a65 * s5[i]; });
        if (!eval(r0 + hh, t, s6)) return false;
        for (std::size_t i = 0; i < Dim; ++i)
            y1[i] = y0[i] + hh * (b1 * f0[i] + b3 * s3[i] + b4 * s4[i] + b5 * s5[i] + b6 * s6[i]);
        for (double v : y1)
            if (!std::isfinite(v)) return false;
        return true;
    };

    auto scale_of = [&](double rr, const V& ya, const V& yb) {
        V sc;
        std::optional<V> custom;
        if (opt.abs_scale) custom = opt.abs_scale(rr, ya);
        for (std::size_t k = 0; k < Dim; ++k) {
            const double a = custom ? (*custom)[k] : opt.tol.abs;
            sc[k] = a + opt.tol.rel * std::max(std::abs(ya[k]), std::abs(yb[k]));
            if (!(sc[k] > 0.0)) sc[k] = std::numeric_limits<double>::min();
        }
        return sc;
    };

    // Starting step (Hairer-Norsett-Wanner heuristic)
    double h = opt.initial_step;
    if (!(h > 0.0)) {
        const V sc = scale_of(r, y, y);
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < Dim; ++k) {
            d0 = std::max(d0, std::abs(y[k]) / sc[k]);
            d1 = std::max(d1, std::abs(f[k]) / sc[k]);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * std::max(std::abs(r), 1e-300) : 0.01 * d0 / d1;
        h0 = std::min(h0, r_end - r);
        V y1, f1;
        for (std::size_t k = 0; k < Dim; ++k) y1[k] = y[k] + h0 * f[k];
        double d2 = 0.0;
        if (eval(r + h0, y1, f1)) {
            for (std::size_t k = 0; k < Dim; ++k) d2 = std::max(d2, std::abs(f1[k] - f[k]) / sc[k]);
            d2 /= h0;
        }
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6 * std::abs(r), h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min(100.0 * h0, h1);
    }

    constexpr double kBeta = 0.04;
    constexpr double kExpo = 0.2 - kBeta * 0.75;
    constexpr double kSafe = 0.9, kFacMin = 0.2, kFacMax = 10.0;
    double err_prev = 1e-4;
    bool last_rejected = false;

    std::vector<EventHit<Dim>> hits;
    std::size_t next_stop = 0;
    while (r < r_end) {
        if (out.accepted >= opt.max_steps) {
            out.status = IntegrationStatus::MaxSteps;
            out.message = "maximum number of steps reached";
            break;
        }
        const double h_min = opt.min_step_factor * std::max(std::abs(r), 1e-300);
        bool final_step = false;
        double r_next = 0.0;
        const double h_proposed = h;
        while (next_stop < opt.stops.size() && opt.stops[next_stop] <= r) ++next_stop;
        const double target = next_stop < opt.stops.size() && opt.stops[next_stop] < r_end ? opt.stops[next_stop] : r_end;
        if (r + h >= target || target - (r + h) < 1e-12 * std::abs(target)) {
            h = target - r;
            final_step = true;
            r_next = target;
        }
        if (h < h_min) {
            out.status = IntegrationStatus::StepUnderflow;
            out.message = "step size underflow at r = " + std::to_string(r);
            break;
        }

        V k2, k3, k4, k5, k6, k7, yt, ynew;
        auto stage = [&](V& k_out, double rc, auto&& combine) -> bool {
            for (std::size_t i = 0; i < Dim; ++i) yt[i] = y[i] + h * combine(i);
            return eval(rc, yt, k_out);
        };
        bool ok = stage(k2, r + c2 * h, [&](std::size_t i) { return a21 * f[i]; }) &&
                  stage(k3, r + c3 * h, [&](std::size_t i) { return a31 * f[i] + a32 * k2[i]; }) &&
                  stage(k4, r + c4 * h,
                        [&](std::size_t i) { return a41 * f[i] + a42 * k2[i] + a43 * k3[i]; }) &&
                  stage(k5, r + c5 * h,
                        [&](std::size_t i) {
                            return a51 * f[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                        }) &&
                  stage(k6, r + h, [&](std::size_t i) {
                      return a61 * f[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
                  });
        double err = 0.0;
        if (ok) {
            for (std::size_t i = 0; i < Dim; ++i)
                ynew[i] = y[i] + h * (b1 * f[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            ok = eval(r + h, ynew, k7);
        }
        if (ok) {
            const V sc = scale_of(r, y, ynew);
            for (std::size_t i = 0; i < Dim; ++i) {
                const double e = h * (e1 * f[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                      e7 * k7[i]);
                err = std::max(err, std::abs(e) / sc[i]);
            }
            if (!std::isfinite(err)) ok = false;
        }
        if (!ok) {
            ++out.rejected;
            h *= 0.25;
            last_rejected = true;
            if (h < h_min) {
                out.status = IntegrationStatus::DomainViolation;
                out.message = "right-hand side domain violated near r = " + std::to_string(r);
                break;
            }
            continue;
        }
        if (err > 1.0) {
            ++out.rejected;
            h *= std::max(kFacMin, kSafe * std::pow(err, -kExpo));
            last_rejected = true;
            continue;
        }

        Step<Dim> step{r, final_step ? r_next : r + h, y, ynew, f, k7};

        // Event detection: scan the Hermite interpolant on sub-intervals.
        hits.clear();
        for (const auto& ev : events) {
            constexpr int kSub = 4;
            double ra = step.r0;
            double ga = step.y0[ev.component] - ev.level;
            for (int s = 1; s <= kSub; ++s) {
                const double rb = s == kSub ? step.r1 : step.r0 + step.width() * s / kSub;
                const double gb = (s == kSub ? step.y1[ev.component] : step.value(ev.component, rb)) - ev.level;
                if ((ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0)) {
                    double lo = ra, hi = rb, glo = ga;
                    for (int it = 0; it < 200 && hi - lo > opt.event_tol * std::max(1.0, std::abs(hi)); ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double gm = step.value(ev.component, mid) - ev.level;
                        if (gm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        if ((gm < 0.0) == (glo < 0.0)) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    double root = 0.5 * (lo + hi);
                    EventHit<Dim> hit;
                    hit.id = ev.id;
                    for (std::size_t k = 0; k < Dim; ++k) {
                        hit.y[k] = step.value(k, root);
                        hit.dy[k] = step.slope(k, root);
                    }
                    // Newton polish with states from genuine steps out of r0;
                    // the interpolant alone is only fourth-order accurate.
                    for (int it = 0; it < 4; ++it) {
                        V ys, fs;
                        if (!dp_step(step.r0, step.y0, step.f0, root - step.r0, ys) || !eval(root, ys, fs)) break;
                        hit.y = ys;
                        hit.dy = fs;
                        const double g = ys[ev.component] - ev.level;
                        const double dg = fs[ev.component];
                        if (dg == 0.0) break;
                        const double cand = std::clamp(root - g / dg, ra, rb);
                        const double moved = std::abs(cand - root);
                        root = cand;
                        if (moved <= opt.event_tol * std::max(1.0, std::abs(root))) break;
                    }
                    hit.r = root;
                    hit.y[ev.component] = ev.level;
                    hits.push_back(hit);
                }
                ra = rb;
                ga = gb;
            }
        }
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.r < b.r; });

        for (std::size_t k = 1; k < hits.size(); ++k) {
            if (hits[k].id != hits[k - 1].id &&
                hits[k].r - hits[k - 1].r <= opt.event_tie_tol * std::max(1.0, std::abs(hits[k].r))) {
                out.status = IntegrationStatus::DegenerateEvent;
                out.message = "simultaneous events at r = " + std::to_string(hits[k].r);
                out.r_last = r;
                out.y_last = y;
                return out;
            }
        }

        bool stop = false;
        double stop_r = 0.0;
        for (const auto& hit : hits) {
            if (on_event(hit)) {
                stop = true;
                stop_r = hit.r;
                break;
            }
        }
        if (stop) {
            Step<Dim> partial = step;
            partial.r1 = stop_r;
            for (const auto& hit : hits)
                if (hit.r == stop_r) {
                    partial.y1 = hit.y;
                    partial.f1 = hit.dy;
                }
            // re-evaluate with the event component pinned to its level
            V fstop;
            if (eval(stop_r, partial.y1, fstop)) partial.f1 = fstop;
            if (partial.r1 > partial.r0) on_step(partial);
            ++out.accepted;
            out.status = IntegrationStatus::Stopped;
            out.r_last = stop_r;
            out.y_last = partial.y1;
            return out;
        }

        on_step(step);
        ++out.accepted;
        r = step.r1;
        y = ynew;
        f = k7;
        out.r_last = r;
        out.y_last = y;

        double fac = kSafe * std::pow(err, -kExpo) * std::pow(err_prev, kBeta);
        if (!std::isfinite(fac)) fac = kFacMax;
        fac = std::clamp(fac, kFacMin, kFacMax);
        if (last_rejected) fac = std::min(fac, 1.0);
        err_prev = std::max(err, 1e-4);
        last_rejected = false;
        h *= fac;
        // a step shortened to land on a stop says little about the next one
        if (final_step && r < r_end) h = std::max(h, h_proposed);
    }
    return out;
}

}  // namespace lnt
