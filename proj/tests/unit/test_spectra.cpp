#include "rankspectra/error.hpp"
#include "rankspectra/limitlaw.hpp"
#include "rankspectra/spectra.hpp"

#include <Eigen/Dense>
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace rankspectra;

namespace {

std::vector<double> random_symmetric(std::mt19937_64& rng, std::size_t p, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> a(p * p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) a[j * p + k] = a[k * p + j] = g(rng);
    return a;
}

// Uniform point in the unit disk; its first coordinate times r is W(r).
std::vector<double> semicircle_draws(std::mt19937_64& rng, std::size_t count, double r) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(count);
    for (auto& v : out) v = r * std::sqrt(u(rng)) * std::cos(2.0 * std::numbers::pi * u(rng));
    return out;
}

} // namespace

TEST_CASE("sym_eigenvalues small cases") {
    CHECK(sym_eigenvalues(std::vector<double>(16, 0.0), 4) == std::vector<double>(4, 0.0));
    const std::vector<double> d{3, 0, 0, 0, 1, 0, 0, 0, 2};
    const auto e = sym_eigenvalues(d, 3);
    REQUIRE(e.size() == 3);
    CHECK(e[0] == Catch::Approx(3.0));
    CHECK(e[1] == Catch::Approx(2.0));
    CHECK(e[2] == Catch::Approx(1.0));
    const std::vector<double> two{2, 1, 1, 2};
    const auto t = sym_eigenvalues(two, 2);
    CHECK(t[0] == Catch::Approx(3.0));
    CHECK(t[1] == Catch::Approx(1.0));
    CHECK(sym_eigenvalues(std::vector<double>{-4.0}, 1) == std::vector<double>{-4.0});
}

TEST_CASE("sym_eigenvalues agrees with Eigen and conserves trace and Frobenius norm") {
    std::mt19937_64 rng(1);
    for (std::size_t p : {2u, 3u, 10u, 50u, 200u}) {
        const auto a = random_symmetric(rng, p);
        const auto e = sym_eigenvalues(a, p);
        REQUIRE(std::is_sorted(e.rbegin(), e.rend()));

        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
            a.data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ref = solver.eigenvalues().reverse();
        for (std::size_t i = 0; i < p; ++i) REQUIRE(std::abs(e[i] - ref(static_cast<Eigen::Index>(i))) <= 1e-9 * std::sqrt(double(p)));

        double trace = 0, frob = 0, s1 = 0, s2 = 0;
        for (std::size_t j = 0; j < p; ++j) trace += a[j * p + j];
        for (double v : a) frob += v * v;
        for (double v : e) {
            s1 += v;
            s2 += v * v;
        }
        CHECK(std::abs(s1 - trace) <= 1e-8 * (1.0 + std::abs(trace)));
        CHECK(std::abs(s2 - frob) <= 1e-8 * (1.0 + frob));
    }
}

TEST_CASE("sym_eigenvalues handles clustered spectra") {
    // Rank-one update of the identity: eigenvalues 1 (p - 1 times) and 1 + p.
    const std::size_t p = 60;
    std::vector<double> a(p * p, 1.0);
    for (std::size_t j = 0; j < p; ++j) a[j * p + j] = 2.0;
    const auto e = sym_eigenvalues(a, p);
    CHECK(e[0] == Catch::Approx(1.0 + p));
    for (std::size_t i = 1; i < p; ++i) REQUIRE(e[i] == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("sym_eigenvalues validation") {
    const std::vector<double> asym{1, 2, 2.1, 1};
    CHECK_THROWS_AS(sym_eigenvalues(asym, 2), SymmetryError);
    CHECK_THROWS_AS(sym_eigenvalues(std::vector<double>(3, 0.0), 2), ValidationError);
}

TEST_CASE("esd_histogram") {
    const std::vector<double> zeros(3, 0.0);
    const auto h = esd_histogram(zeros, 1, -1.0, 1.0);
    CHECK(h.counts == std::vector<std::size_t>{3});
    CHECK(h.mass(0) == 1.0);
    CHECK(h.density[0] == Catch::Approx(0.5));

    const std::vector<double> out{-5.0, 0.1, 7.0, 0.2};
    const auto o = esd_histogram(out, 4, -1.0, 1.0);
    CHECK(o.underflow == 1);
    CHECK(o.overflow == 1);
    CHECK(o.total == 4);
    double mass = static_cast<double>(o.underflow + o.overflow) / o.total;
    for (std::size_t i = 0; i < o.bins(); ++i) mass += o.mass(i);
    CHECK(std::abs(mass - 1.0) <= 1e-12);

    CHECK_THROWS_AS(esd_histogram(zeros, 0, -1.0, 1.0), RangeError);
    CHECK_THROWS_AS(esd_histogram(zeros, 5, 1.0, 1.0), RangeError);
}

TEST_CASE("esd_histogram reflection") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.3, 1.3);
    std::vector<double> e(501), neg(501);
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = u(rng);
        neg[i] = -e[i];
    }
    const auto a = esd_histogram(e, 20, -1.5, 1.5);
    const auto b = esd_histogram(neg, 20, -1.5, 1.5);
    auto rev = b.counts;
    std::reverse(rev.begin(), rev.end());
    CHECK(a.counts == rev);
}

TEST_CASE("esd_histogram of semicircle draws tracks the density") {
    std::mt19937_64 rng(4);
    const auto draws = semicircle_draws(rng, 100000, 2.0);
    const auto h = esd_histogram(draws, 50, -2.0, 2.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double mid = 0.5 * (h.edges[i] + h.edges[i + 1]);
        worst = std::max(worst, std::abs(h.density[i] - sc_density(mid, 2.0)));
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("empirical_stieltjes") {
    const std::complex<double> i(0.0, 1.0);
    const std::vector<double> zeros(5, 0.0);
    const auto s0 = empirical_stieltjes(zeros, i);
    CHECK(s0.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(s0.imag() == Catch::Approx(1.0));
    const std::vector<double> one{1.0};
    const auto s1 = empirical_stieltjes(one, {1.0, 1.0});
    CHECK(s1.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(s1.imag() == Catch::Approx(1.0));
    CHECK_THROWS_AS(empirical_stieltjes(one, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(empirical_stieltjes(one, {0.0, -1.0}), DomainError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3), v(0.01, 2);
    for (int t = 0; t < 200; ++t) {
        const std::vector<double> e{u(rng), u(rng), u(rng)};
        REQUIRE(empirical_stieltjes(e, {u(rng), v(rng)}).imag() > 0.0);
    }
}

TEST_CASE("resolvent perturbation bound") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> v(0.2, 2.0), re(-2.0, 2.0);
    int violations = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t p = 20;
        const auto a = random_symmetric(rng, p, 0.3);
        auto b = a;
        const auto noise = random_symmetric(rng, p, 0.05);
        for (std::size_t k = 0; k < b.size(); ++k) b[k] += noise[k];
        double frob = 0;
        for (double x : noise) frob += x * x;
        const std::complex<double> z(re(rng), v(rng));
        const double gap = std::abs(empirical_stieltjes(sym_eigenvalues(a, p), z) -
                                    empirical_stieltjes(sym_eigenvalues(b, p), z));
        if (gap > std::sqrt(frob) / (std::sqrt(double(p)) * z.imag() * z.imag())) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("ks_distance") {
    const SemicircleLaw law(2.0);
    SECTION("quantile-aligned sample") {
        const std::size_t p = 200;
        std::vector<double> q(p);
        for (std::size_t i = 0; i < p; ++i) {
            const double level = (i + 0.5) / p;
            double lo = -2, hi = 2;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (law.cdf(mid) < level ? lo : hi) = mid;
            }
            q[i] = 0.5 * (lo + hi);
        }
        CHECK(ks_distance(q, law) <= 0.5 / p + 1e-12);
    }
    SECTION("mass at the edge") {
        const std::vector<double> edge(10, 2.0);
        CHECK(ks_distance(edge, law) >= 0.5);
        CHECK(ks_distance(edge, law) == Catch::Approx(1.0));
    }
    SECTION("semicircle draws") {
        std::mt19937_64 rng(7);
        auto draws = semicircle_draws(rng, 10000, 2.0);
        const double d = ks_distance(draws, law);
        CHECK(d <= 0.03);
        std::shuffle(draws.begin(), draws.end(), rng);
        CHECK(ks_distance(draws, law) == d);
        CHECK(ks_distance(draws, [](double x) { return sc_cdf(x, 2.0); }) == d);
        CHECK(ks_distance(draws, SemicircleLaw(3.0)) > 0.1);
    }
}

TEST_CASE("summarize_spectrum") {
    std::mt19937_64 rng(8);
    const std::size_t p = 300;
    // Wigner matrix scaled to W(2).
    auto a = random_symmetric(rng, p, 1.0 / std::sqrt(double(p)));
    for (std::size_t j = 0; j < p; ++j) a[j * p + j] = 0.0;
    const std::complex<double> probes[] = {{0.0, 1.0}, {0.5, 0.3}};
    const auto s = summarize_spectrum(a, p, SemicircleLaw(2.0), 40, -3.0, 3.0, probes);
    CHECK(s.eigenvalues.size() == p);
    CHECK(s.ks_to_law < 0.06);
    CHECK(s.second_moment == Catch::Approx(1.0).epsilon(0.05));
    REQUIRE(s.stieltjes_samples.size() == 2);
    CHECK(std::abs(s.stieltjes_samples[0].s - sc_stieltjes(probes[0], 2.0)) < 0.02);
    CHECK(s.histogram.bins() == 40);
    for (const auto& st : s.stieltjes_samples) CHECK(st.s.imag() > 0.0);
}
