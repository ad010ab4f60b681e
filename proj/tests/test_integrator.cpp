#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lnt/integrator.hpp"

using namespace lnt;

namespace {

using V2 = Vec<2>;

// y'' = -y with y(0) = 0, y'(0) = 1
V2 oscillator(double, const V2& y) { return {y[1], -y[0]}; }

struct Run {
    IntegrationOutcome<2> outcome;
    std::vector<Step<2>> steps;
    std::vector<EventHit<2>> hits;
};

Run run(double r_end, const IntegratorOptions<2>& opt, std::vector<EventSpec> events = {}, int stop_at = -1) {
    Run res;
    res.outcome = integrate_adaptive<2>(
        oscillator, 0.0, V2{0.0, 1.0}, r_end, opt, events, [&](const Step<2>& s) { res.steps.push_back(s); },
        [&](const EventHit<2>& h) {
            res.hits.push_back(h);
            return static_cast<int>(res.hits.size()) == stop_at;
        });
    return res;
}

double global_error(double tol) {
    IntegratorOptions<2> opt;
    opt.tol = {tol, tol};
    const auto r = run(20.0, opt);
    return std::abs(r.outcome.y_last[0] - std::sin(20.0));
}

}  // namespace

TEST_CASE("harmonic oscillator end value") {
    IntegratorOptions<2> opt;
    opt.tol = {1e-12, 1e-12};
    const auto r = run(10.0, opt);
    REQUIRE(r.outcome.ok());
    CHECK(r.outcome.r_last == 10.0);
    CHECK(std::abs(r.outcome.y_last[0] - std::sin(10.0)) < 1e-10);
    CHECK(std::abs(r.outcome.y_last[1] - std::cos(10.0)) < 1e-10);
}

TEST_CASE("global error shrinks with the tolerance") {
    // tolerance-proportional control: 100x tighter tolerance gives at least 30x smaller error
    const double e6 = global_error(1e-6), e8 = global_error(1e-8), e10 = global_error(1e-10);
    CHECK(e8 < e6 / 30.0);
    CHECK(e10 < e8 / 30.0);
}

TEST_CASE("steps are contiguous and the interpolant is accurate") {
    IntegratorOptions<2> opt;
    opt.tol = {1e-10, 1e-10};
    const auto r = run(6.0, opt);
    for (std::size_t k = 1; k < r.steps.size(); ++k) CHECK(r.steps[k].r0 == r.steps[k - 1].r1);
    double worst = 0.0;
    for (const auto& s : r.steps) {
        const double mid = 0.5 * (s.r0 + s.r1);
        worst = std::max(worst, std::abs(s.value(0, mid) - std::sin(mid)));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("zero crossings are located at multiples of pi") {
    IntegratorOptions<2> opt;
    opt.tol = {1e-11, 1e-11};
    const auto r = run(10.0, opt, {EventSpec{0, 0.0, 7}});
    REQUIRE(r.hits.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(r.hits[k].id == 7);
        CHECK(std::abs(r.hits[k].r - (k + 1) * std::numbers::pi) < 1e-10);
    }
}

TEST_CASE("terminal event stops the integration at the event") {
    IntegratorOptions<2> opt;
    opt.tol = {1e-11, 1e-11};
    const auto r = run(10.0, opt, {EventSpec{1, 0.0, 1}}, 1);  // first zero of y' at pi/2
    CHECK(r.outcome.status == IntegrationStatus::Stopped);
    CHECK(std::abs(r.outcome.r_last - std::numbers::pi / 2) < 1e-10);
    CHECK(r.steps.back().r1 == r.outcome.r_last);
}

TEST_CASE("stops are step ends") {
    IntegratorOptions<2> opt;
    opt.tol = {1e-8, 1e-8};
    opt.stops = {0.123456789, 1.0, 3.3};
    const auto r = run(5.0, opt);
    for (double s : opt.stops) {
        bool found = false;
        for (const auto& st : r.steps) found = found || st.r1 == s;
        CHECK(found);
    }
}

TEST_CASE("a rhs that rejects the state ends with a domain violation") {
    IntegratorOptions<1> opt;
    const auto out = integrate_adaptive<1>(
        [](double, const Vec<1>& y) -> Vec<1> {
            if (y[0] < 0.0) throw DomainError("negative");
            return {-1.0 / std::max(y[0], 1e-300)};
        },
        0.0, Vec<1>{1.0}, 2.0, opt, {}, [](const Step<1>&) {}, [](const EventHit<1>&) { return false; });
    CHECK_FALSE(out.ok());
    CHECK(out.r_last < 0.5 + 1e-6);  // y = sqrt(1 - 2r) reaches 0 at r = 1/2
}
