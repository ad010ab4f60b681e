#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "lnt/params.hpp"

using namespace lnt;
using doctest::Approx;

namespace {

// 1 + 4/(N - 4 - 2 sqrt(N-1)) with 50 decimal digits
double jl_oracle(int N) {
    using boost::multiprecision::cpp_bin_float_50;
    const cpp_bin_float_50 n = N;
    const cpp_bin_float_50 v = 1 + 4 / (n - 4 - 2 * sqrt(n - 1));
    return static_cast<double>(v);
}

}  // namespace

TEST_CASE("critical exponent") {
    CHECK(critical_exponent(3) == 5.0);
    CHECK(critical_exponent(4) == 3.0);
    CHECK(critical_exponent(6) == 2.0);
    CHECK_THROWS_AS(critical_exponent(2), DomainError);
}

TEST_CASE("Joseph-Lundgren exponent") {
    for (int N = 3; N <= 10; ++N) CHECK(std::isinf(joseph_lundgren(N)));
    CHECK(joseph_lundgren(11) == Approx(6.92195).epsilon(1e-5));
    CHECK(joseph_lundgren(12) == Approx(3.92666).epsilon(1e-5));
    for (int N = 11; N <= 40; ++N) CHECK(std::abs(joseph_lundgren(N) - jl_oracle(N)) <= 1e-13 * jl_oracle(N));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(ProblemParams{2, 5.0, {}}), DomainError);
    CHECK_THROWS_AS(validate(ProblemParams{5, 2.0, {}}), DomainError);  // not supercritical
    CHECK_THROWS_AS(validate(ProblemParams{5, 20.0, -1.0}), DomainError);
    CHECK_NOTHROW(validate(ProblemParams{5, 20.0, 1.0}));
}

TEST_CASE("constants at N=4, p=3 by hand") {
    const auto c = derive_constants({4, 3.0, {}});
    CHECK(c.theta == Approx(1.0));
    CHECK(c.A == Approx(1.0));
    CHECK(c.m == Approx(1.0));
    CHECK(std::abs(c.alpha) < 1e-15);
    CHECK(c.beta == Approx(std::sqrt(2.0)));
    CHECK(c.Dp == Approx(1.0 / 6.0));
    CHECK(c.regime == Regime::Oscillatory);
}

TEST_CASE("constants at N=12, p=5 are non-oscillatory") {
    const auto c = derive_constants({12, 5.0, {}});
    CHECK(c.theta == Approx(0.5));
    CHECK(c.alpha == Approx(4.1295).epsilon(1e-4));
    CHECK(c.alpha * c.alpha / 4.0 == Approx(4.263).epsilon(1e-3));
    CHECK(c.regime == Regime::NonOscillatory);
    CHECK(c.hardy_limit() == Approx(23.75));
}

TEST_CASE("regime for large p follows the dimension") {
    CHECK(derive_constants({10, 1e4, {}}).regime == Regime::Oscillatory);
    CHECK(derive_constants({12, 1e4, {}}).regime == Regime::NonOscillatory);
    CHECK(derive_constants({5, 1e4, {}}).regime == Regime::Oscillatory);
}

TEST_CASE("random instances satisfy A^(p-1) m^2 = 1") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> Nd(3, 30);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const int N = Nd(rng);
        const double p = critical_exponent(N) * (1.0 + 1e-3) + std::exp(8.0 * ud(rng)) - 1.0;
        const auto c = derive_constants({N, p, {}});
        CHECK(std::pow(c.A, p - 1.0) * c.m * c.m == Approx(1.0).epsilon(1e-12));
        const double disc = p - 1.0 - c.alpha * c.alpha / 4.0;
        const Regime expect = disc > 0 ? Regime::Oscillatory : disc < 0 ? Regime::NonOscillatory : Regime::Degenerate;
        CHECK(c.regime == expect);
    }
}

TEST_CASE("asymptotic limits") {
    CHECK(asymptotic_limits(5).Dp == Approx(1.0 / 16.0));
    CHECK(asymptotic_limits(10).alpha_over_sqrt_p == Approx(2.0));
    for (int N : {3, 5, 9, 12, 20}) {
        const auto L = asymptotic_limits(N);
        CHECK(L.p_theta == 2.0);
        const double p = 1e6;
        const auto c = derive_constants({N, p, {}});
        CHECK(p * c.theta == Approx(L.p_theta).epsilon(1e-3));
        CHECK(c.A == Approx(L.A).epsilon(1e-3));
        CHECK(c.alpha / std::sqrt(p) == Approx(L.alpha_over_sqrt_p).epsilon(1e-3));
        CHECK(c.m / std::sqrt(p) == Approx(L.m_over_sqrt_p).epsilon(1e-3));
        CHECK(c.Dp == Approx(L.Dp).epsilon(1e-3));
        if (N != 10) CHECK(c.beta / std::sqrt(p) == Approx(L.beta_over_sqrt_p).epsilon(1e-3));
    }
}

TEST_CASE("beta at N = 10 matches the closed form") {
    for (double p : {3.0, 10.0, 100.0, 1e4}) CHECK(derive_constants({10, p, {}}).beta == Approx(beta_dimension_ten(p)));
}

TEST_CASE("green kernel") {
    const auto c = derive_constants({4, 3.0, {}});
    CHECK(green_kernel(-1.0, c) == 0.0);
    CHECK(green_kernel(0.0, c) == 0.0);
    CHECK(green_kernel(std::numbers::pi / (2.0 * c.beta), c) == Approx(1.0 / std::sqrt(2.0)));
    const auto n = derive_constants({12, 5.0, {}});
    CHECK(green_kernel(0.0, n) == 0.0);
    CHECK(green_kernel(1.0, n) > 0.0);
}

TEST_CASE("phi nonlinearity") {
    CHECK(phi_nonlinearity(0.0, 7.0) == 0.0);
    CHECK(phi_nonlinearity(0.1, 3.0) == Approx(-0.031));
    for (double p : {5.0, 20.0, 100.0, 1000.0})
        for (double k : {0.1, 0.5, 1.0}) CHECK(std::abs(phi_nonlinearity(k / p, p)) <= std::exp(k) - k - 1.0);
    // series branch against the direct formula
    CHECK(phi_nonlinearity(1e-3, 20.0) == Approx(-(std::pow(1.001, 20.0) - 1.0 - 0.02)).epsilon(1e-10));
    CHECK_THROWS_AS(phi_nonlinearity(-1.0, 3.0), DomainError);
}

TEST_CASE("envelope") {
    const auto c = derive_constants({4, 3.0, {}});
    CHECK(f_envelope(0.0, c) == Approx(1.0 / 6.0));
    CHECK(f_envelope(200.0, c) < 1e-80);
    const auto d = derive_constants({5, 50.0, {}});
    const auto L = origin_region_constants(d, 0.5);
    CHECK(f_envelope(L.zetatilde_p, d) == Approx(d.Dp * 0.25 / 50.0));
}

TEST_CASE("P_N bound") {
    for (int N : {3, 5, 9, 10, 12, 20})
        for (double p : {critical_exponent(N) + 1.0, 50.0, 1e3}) {
            const auto c = derive_constants({N, p, {}});
            CHECK(compute_PN(c, 0.5).threshold <= 0.5);
            CHECK(compute_PN(c, 0.25).PN < 0.5 * compute_PN(c, 0.5).PN);
        }
    const auto c = derive_constants({5, 50.0, {}});
    const double ct = choose_ctilde(5, {50.0, 50.0});
    const auto pn = compute_PN(c, ct);
    CHECK(ct == 0.5);
    CHECK(pn.margin() > 0.0);
    CHECK(pn.PN == Approx(1.40517e-3).epsilon(1e-4));
    CHECK(pn.threshold == Approx(0.499851).epsilon(1e-5));
    CHECK_THROWS_AS(compute_PN(c, 1.0), DomainError);
}

TEST_CASE("ctilde search") {
    const double ct = choose_ctilde(5, {20.0, 1e4});
    CHECK(ct > 0.0);
    CHECK(ct < 1.0);
    CHECK(ct == 0.5);
    for (int N : {3, 5, 12})
        CHECK(choose_ctilde(N, {critical_exponent(N) + 0.5, 100.0}) <= choose_ctilde(N, {10.0, 100.0}));
}
