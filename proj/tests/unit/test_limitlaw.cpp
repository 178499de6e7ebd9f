#include "rankspectra/error.hpp"
#include "rankspectra/kernels.hpp"
#include "rankspectra/limitlaw.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace rankspectra;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

template <class F>
double integrate(F f, double a, double b) {
    double err = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 30, 1e-13, &err);
}

// Endpoint singularities of the semicircle density need tanh-sinh.
template <class F>
double integrate_edge(F f, double a, double b) {
    tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-13);
}

// Single Gauss-Kronrod panel; exact for the piecewise quadratic g once split at
// its kink. Adaptive refinement would chase a relative tolerance around zero.
template <class F>
double integrate_panel(F f, double a, double b, double* err) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, err);
}

} // namespace

TEST_CASE("semicircle density") {
    CHECK(sc_density(2.0, 2.0) == 0.0);
    CHECK(sc_density(-2.0, 2.0) == 0.0);
    CHECK(sc_density(3.0, 2.0) == 0.0);
    CHECK(sc_density(0.0, 1.5) == Catch::Approx(2.0 / (kPi * 1.5)));
    const double mass = integrate_edge([](double x) { return sc_density(x, 2.0); }, -2.0, 2.0);
    CHECK(std::abs(mass - 1.0) <= 1e-10);
    const double second = integrate_edge([](double x) { return x * x * sc_density(x, 1.7); }, -1.7, 1.7);
    CHECK(std::abs(second - 1.7 * 1.7 / 4.0) <= 1e-10);
    CHECK(SemicircleLaw(1.7).second_moment() == Catch::Approx(1.7 * 1.7 / 4.0));
    CHECK_THROWS_AS(sc_density(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(sc_density(0.0, -1.0), DomainError);
    CHECK_THROWS_AS(SemicircleLaw(std::nan("")), DomainError);
}

TEST_CASE("semicircle cdf") {
    for (double r : {0.5, 1.0, 3.0}) {
        CHECK(sc_cdf(0.0, r) == Catch::Approx(0.5));
        CHECK(sc_cdf(r, r) == 1.0);
        CHECK(sc_cdf(-r, r) == 0.0);
        CHECK(sc_cdf(-2 * r, r) == 0.0);
        CHECK(sc_cdf(2 * r, r) == 1.0);
    }
    const double num = integrate_edge([](double x) { return sc_density(x, 2.0); }, -2.0, 1.0);
    CHECK(std::abs(sc_cdf(1.0, 2.0) - num) <= 1e-10);
    CHECK_THROWS_AS(sc_cdf(0.0, 0.0), DomainError);

    // Nondecreasing, and its derivative is the density away from the edges.
    const double r = 1.3, h = 1e-6;
    double prev = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double x = -r + 2 * r * k / 2000.0;
        const double f = sc_cdf(x, r);
        REQUIRE(f >= prev);
        prev = f;
        if (std::abs(std::abs(x) - r) > 1e-3) {
            const double deriv = (sc_cdf(x + h, r) - sc_cdf(x - h, r)) / (2 * h);
            REQUIRE(std::abs(deriv - sc_density(x, r)) <= 1e-6);
        }
    }
}

TEST_CASE("semicircle Stieltjes transform") {
    const auto m = sc_stieltjes({0.0, 1.0}, 2.0);
    CHECK(m.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(m.imag() == Catch::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));

    const std::complex<double> far(0.0, 1e4);
    const auto mf = sc_stieltjes(far, 1.0);
    CHECK(std::abs(mf + 1.0 / far) <= 1e-6 * std::abs(1.0 / far));

    const std::complex<double> z(0.3, 0.7);
    const double r = 1.5;
    const double re = integrate_edge([&](double x) { return (sc_density(x, r) / (x - z)).real(); }, -r, r);
    const double im = integrate_edge([&](double x) { return (sc_density(x, r) / (x - z)).imag(); }, -r, r);
    const auto mz = sc_stieltjes(z, r);
    CHECK(std::abs(mz - std::complex<double>(re, im)) <= 1e-8);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(-5.0, 5.0), ui(1e-6, 5.0), rr(1e-3, 4.0);
    for (int t = 0; t < 1000; ++t) {
        const std::complex<double> zt(ur(rng), ui(rng));
        const double rt = rr(rng);
        const auto s = sc_stieltjes(zt, rt);
        REQUIRE(s.imag() > 0.0);
        const auto residual = rt * rt / 4.0 * s * s + zt * s + 1.0;
        REQUIRE(std::abs(residual) <= 1e-12 * std::max(1.0, std::abs(zt * s)));
    }
    CHECK_THROWS_AS(sc_stieltjes({0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(sc_stieltjes({1.0, -1.0}, 1.0), DomainError);
}

TEST_CASE("radius formulas") {
    CHECK(radius_theta(5, 1.0, 1.0 / 30.0) == Catch::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-15));
    CHECK(radius_theta(6, 1.0, 2.0 / 30.0) == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(radius_theta(4, 1.0, 3.0 / 30.0) == Catch::Approx(6.0 * std::sqrt(2.0) / 5.0).epsilon(1e-15));
    CHECK_THROWS_AS(radius_theta(1, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(radius_theta(5, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(radius_theta(5, 1.0, -0.1), DomainError);

    CHECK(corollary_radius(KernelId::HoeffdingD, 4.0 / 3.0) ==
          Catch::Approx(2.0 * std::sqrt(8.0 / 3.0) / 3.0).epsilon(1e-15));
    CHECK(corollary_radius(KernelId::HoeffdingD, 4.0 / 3.0) == Catch::Approx(1.08866).epsilon(1e-5));
    CHECK(corollary_radius(KernelId::BkrR, 0.5) == Catch::Approx(2.0).epsilon(1e-15));
    for (double g : {0.1, 0.7, 1.0, 3.3, 9.0})
        CHECK(corollary_radius(KernelId::BdyTauStar, g) / corollary_radius(KernelId::HoeffdingD, g) ==
              Catch::Approx(9.0 / 5.0).epsilon(1e-14));
    CHECK_THROWS_AS(corollary_radius(KernelId::BkrR, -1.0), DomainError);
}

TEST_CASE("eigen-system of g") {
    CHECK(HoeffdingEigenSystem::lambda(1) == Catch::Approx(kSqrt3 / (kPi * kPi)));
    for (int r = 1; r < 50; ++r) REQUIRE(HoeffdingEigenSystem::lambda(r + 1) < HoeffdingEigenSystem::lambda(r));
    CHECK(HoeffdingEigenSystem::psi(2, 0.25) == Catch::Approx(0.0).margin(1e-15));
    CHECK(HoeffdingEigenSystem::psi(1, 0.0) == Catch::Approx(std::sqrt(2.0)));

    for (int r = 1; r <= 6; ++r)
        for (int s = 1; s <= 6; ++s) {
            const double ip = integrate(
                [&](double x) { return HoeffdingEigenSystem::psi(r, x) * HoeffdingEigenSystem::psi(s, x); }, 0.0, 1.0);
            REQUIRE(std::abs(ip - (r == s ? 1.0 : 0.0)) <= 1e-10);
        }

    const double zeta4 = boost::math::zeta(4.0);
    CHECK(HoeffdingEigenSystem::kSumLambdaSq == Catch::Approx(3.0 * zeta4 / std::pow(kPi, 4)).epsilon(1e-15));
    CHECK(HoeffdingEigenSystem::sum_lambda() == Catch::Approx(kSqrt3 / 6.0).epsilon(1e-15));
    for (int T : {1, 10, 100, 2000}) {
        const double partial = HoeffdingEigenSystem::sum_lambda_sq(T);
        const double tail = 1.0 / 30.0 - partial;
        REQUIRE(tail >= 0.0);
        REQUIRE(tail <= HoeffdingEigenSystem::sum_lambda_sq_tail_bound(T));
    }
    CHECK(HoeffdingEigenSystem::sum_lambda_sq(1) == Catch::Approx(3.0 / std::pow(kPi, 4)));
}

TEST_CASE("g closed form") {
    CHECK(g_closed(0.0, 0.0) == Catch::Approx(kSqrt3 / 3.0));
    CHECK(g_closed(1.0, 0.0) == Catch::Approx(-kSqrt3 / 6.0));
    CHECK(g_closed(0.2, 0.9) == g_closed(0.9, 0.2));
    CHECK_THROWS_AS(g_closed(-0.1, 0.5), DomainError);
    CHECK_THROWS_AS(g_closed(0.5, 1.1), DomainError);

    double worst = 0.0;
    for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b) {
            const double x = a / 100.0, y = b / 100.0;
            worst = std::max(worst, std::abs(g_closed(x, y) - HoeffdingEigenSystem::g_series(x, y, 2000)));
        }
    // lambda_r ~ r^-2, so the diagonal tail is sum_{r>T} 2 lambda_r, attained at x = y = 0.
    const double tail = 2.0 * kSqrt3 / (kPi * kPi) * boost::math::trigamma(2001.0);
    CHECK(worst <= tail * (1.0 + 1e-9));
    CHECK(std::abs(g_closed(0.0, 0.0) - HoeffdingEigenSystem::g_series(0.0, 0.0, 2000) - tail) <= 1e-12);
    double off_diag = 0.0;
    for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b)
            if (std::abs(a - b) >= 10) {
                const double x = a / 100.0, y = b / 100.0;
                off_diag = std::max(off_diag, std::abs(g_closed(x, y) - HoeffdingEigenSystem::g_series(x, y, 2000)));
            }
    CHECK(off_diag <= 1e-5);

    const double diag = integrate([](double x) { return g_closed(x, x); }, 0.0, 1.0);
    CHECK(std::abs(diag - kSqrt3 / 6.0) <= 1e-8);
    // Split at the kink x = y.
    double inner_err = 0.0, outer_err = 0.0;
    const double total = integrate_panel(
        [&inner_err](double x) {
            double e1 = 0.0, e2 = 0.0;
            const double v = integrate_panel([x](double y) { return g_closed(x, y); }, 0.0, x, &e1) +
                             integrate_panel([x](double y) { return g_closed(x, y); }, x, 1.0, &e2);
            inner_err = std::max(inner_err, e1 + e2);
            return v;
        },
        0.0, 1.0, &outer_err);
    CHECK(inner_err <= 1e-13);
    CHECK(outer_err <= 1e-13);
    CHECK(std::abs(total) <= 1e-10);
}
