#include "rankspectra/error.hpp"
#include "rankspectra/kernels.hpp"
#include "rankspectra/limitlaw.hpp"
#include "rankspectra/summation.hpp"

#include "oracle.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace rankspectra;

namespace {

constexpr KernelId kAll[] = {KernelId::HoeffdingD, KernelId::BkrR, KernelId::BdyTauStar};

double brute(KernelId id, const std::vector<double>& x, const std::vector<double>& y) {
    switch (id) {
    case KernelId::HoeffdingD: return oracle::h_d(x, y);
    case KernelId::BkrR: return oracle::h_r(x, y);
    case KernelId::BdyTauStar: return oracle::h_tau(x, y);
    }
    return 0.0;
}

} // namespace

TEST_CASE("kernel ids") {
    CHECK(kernel_order(KernelId::HoeffdingD) == 5);
    CHECK(kernel_order(KernelId::BkrR) == 6);
    CHECK(kernel_order(KernelId::BdyTauStar) == 4);
    for (KernelId id : kAll) CHECK(parse_kernel(to_string(id)) == id);
    CHECK(to_string(KernelId::BdyTauStar) == "bdy-taustar");
    CHECK_THROWS_AS(parse_kernel("spearman"), ValidationError);
}

TEST_CASE("kernel_eval matches the written-out formulas") {
    std::mt19937_64 rng(17);
    for (KernelId id : kAll) {
        const auto m = static_cast<std::size_t>(kernel_order(id));
        for (int rep = 0; rep < 25; ++rep) {
            const auto x = oracle::uniform(rng, m), y = oracle::uniform(rng, m);
            REQUIRE(kernel_eval(id, x, y) == brute(id, x, y));
        }
    }
}

TEST_CASE("kernel_eval is symmetric under point permutations") {
    std::mt19937_64 rng(3);
    for (KernelId id : kAll) {
        const auto m = static_cast<std::size_t>(kernel_order(id));
        const auto x = oracle::uniform(rng, m), y = oracle::uniform(rng, m);
        const double base = kernel_eval(id, x, y);
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<double> px(m), py(m);
            for (std::size_t i = 0; i < m; ++i) {
                px[i] = x[perm[i]];
                py[i] = y[perm[i]];
            }
            REQUIRE(kernel_eval(id, px, py) == base);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("kernel_eval depends only on ranks") {
    std::mt19937_64 rng(5);
    for (KernelId id : kAll) {
        const auto m = static_cast<std::size_t>(kernel_order(id));
        for (int rep = 0; rep < 20; ++rep) {
            auto x = oracle::uniform(rng, m), y = oracle::uniform(rng, m);
            const double base = kernel_eval(id, x, y);
            for (auto& v : x) v = v * v * v;
            for (auto& v : y) v = std::exp(v);
            REQUIRE(kernel_eval(id, x, y) == base);
        }
    }
}

TEST_CASE("comonotone regression constants") {
    const std::vector<double> z5{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(kernel_eval(KernelId::HoeffdingD, z5, z5) == 1.0);
    const std::vector<double> z6{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    CHECK(kernel_eval(KernelId::BkrR, z6, z6) == 1.0);
    const std::vector<double> z4{0.1, 0.2, 0.3, 0.4};
    CHECK(kernel_eval(KernelId::BdyTauStar, z4, z4) == 1.0);
}

TEST_CASE("kernel bounds come from rank-pattern enumeration") {
    for (KernelId id : kAll) CHECK(kernel_bound(id) == 1.0);
    std::mt19937_64 rng(8);
    for (KernelId id : kAll) {
        const auto m = static_cast<std::size_t>(kernel_order(id));
        for (int rep = 0; rep < 50; ++rep) {
            const auto x = oracle::uniform(rng, m), y = oracle::uniform(rng, m);
            REQUIRE(std::abs(kernel_eval(id, x, y)) <= kernel_bound(id));
        }
    }
}

TEST_CASE("kernel_eval validation") {
    const std::vector<double> four{0.1, 0.2, 0.3, 0.4}, five{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THROWS_AS(kernel_eval(KernelId::HoeffdingD, four, four), ArityError);
    CHECK_THROWS_AS(kernel_eval(KernelId::HoeffdingD, five, four), ArityError);
    const std::vector<double> tied{0.1, 0.2, 0.2, 0.4, 0.5};
    CHECK_THROWS_AS(kernel_eval(KernelId::HoeffdingD, tied, five), TiesError);
    CHECK_THROWS_AS(kernel_eval(KernelId::HoeffdingD, five, tied), TiesError);
}

TEST_CASE("u_statistic_naive") {
    std::mt19937_64 rng(23);
    SECTION("single subset equals the kernel") {
        for (KernelId id : kAll) {
            const auto m = static_cast<std::size_t>(kernel_order(id));
            const auto x = oracle::uniform(rng, m), y = oracle::uniform(rng, m);
            CHECK(u_statistic_naive(id, x, y) == kernel_eval(id, x, y));
        }
    }
    SECTION("average over subsets") {
        const auto x = oracle::uniform(rng, 7), y = oracle::uniform(rng, 7);
        double sum = 0.0;
        int count = 0;
        for (int a = 0; a < 7; ++a)
            for (int b = a + 1; b < 7; ++b) {
                std::vector<double> sx, sy;
                for (int i = 0; i < 7; ++i)
                    if (i != a && i != b) {
                        sx.push_back(x[i]);
                        sy.push_back(y[i]);
                    }
                sum += oracle::h_d(sx, sy);
                ++count;
            }
        CHECK(u_statistic_naive(KernelId::HoeffdingD, x, y) == Catch::Approx(sum / count).epsilon(1e-13));
    }
    SECTION("symmetric in the two coordinates") {
        for (KernelId id : kAll) {
            const auto x = oracle::uniform(rng, 9), y = oracle::uniform(rng, 9);
            CHECK(u_statistic_naive(id, x, y) == Catch::Approx(u_statistic_naive(id, y, x)).epsilon(1e-13));
        }
    }
    SECTION("errors") {
        const auto x = oracle::uniform(rng, 4);
        CHECK_THROWS_AS(u_statistic_naive(KernelId::HoeffdingD, x, x), SizeError);
        const auto big = oracle::uniform(rng, 40);
        CHECK_THROWS_AS(u_statistic_naive(KernelId::BkrR, big, big), ComplexityGuardError);
        const auto twelve = oracle::uniform(rng, 12);
        CHECK_NOTHROW(u_statistic_naive(KernelId::BkrR, twelve, twelve));
    }
}

TEST_CASE("u_statistic_naive is centred under independence") {
    std::mt19937_64 rng(99);
    MeanAccumulator acc;
    for (int t = 0; t < 200; ++t) {
        const auto x = oracle::uniform(rng, 8), y = oracle::uniform(rng, 8);
        acc.add(u_statistic_naive(KernelId::HoeffdingD, x, y));
    }
    CHECK(std::abs(acc.mean()) <= 4.0 * acc.standard_error());
}

TEST_CASE("u_statistic_naive detects comonotone dependence") {
    std::mt19937_64 rng(100);
    for (KernelId id : kAll) {
        MeanAccumulator acc;
        for (int t = 0; t < 500; ++t) {
            const auto x = oracle::uniform(rng, 10);
            acc.add(u_statistic_naive(id, x, x));
        }
        CHECK(acc.mean() > 0.0);
        CHECK(acc.mean() > 4.0 * acc.standard_error());
    }
}

TEST_CASE("first-order projections vanish") {
    const auto d = project_h1(KernelId::HoeffdingD, {0.3, 0.8}, 100000, 1);
    CHECK(std::abs(d.estimate) <= 4.0 * d.standard_error);
    const auto r = project_h1(KernelId::BkrR, {0.5, 0.5}, 100000, 2);
    CHECK(std::abs(r.estimate) <= 4.0 * r.standard_error);
    const auto t = project_h1(KernelId::BdyTauStar, {0.2, 0.6}, 100000, 3);
    CHECK(std::abs(t.estimate) <= 4.0 * t.standard_error);

    const auto small = project_h1(KernelId::HoeffdingD, {0.3, 0.8}, 20000, 4);
    const auto large = project_h1(KernelId::HoeffdingD, {0.3, 0.8}, 40000, 4);
    const double ratio = large.standard_error / small.standard_error;
    CHECK(ratio >= 0.6);
    CHECK(ratio <= 0.82);

    CHECK_THROWS_AS(project_h1(KernelId::HoeffdingD, {0.3, 0.8}, 999, 1), ValidationError);
}

TEST_CASE("second-order projections factor through g") {
    const BivariatePoint z1{0.2, 0.3}, z2{0.7, 0.9};
    const double gg = g_closed(z1.x, z2.x) * g_closed(z1.y, z2.y);
    const auto d = project_h2(KernelId::HoeffdingD, z1, z2, 100000, 11);
    CHECK(std::abs(d.estimate - gg) <= 4.0 * d.standard_error);
    const auto r = project_h2(KernelId::BkrR, z1, z2, 100000, 12);
    CHECK(std::abs(r.estimate - 2.0 * gg) <= 4.0 * r.standard_error);
    const auto t = project_h2(KernelId::BdyTauStar, z1, z2, 100000, 13);
    CHECK(std::abs(t.estimate - 3.0 * gg) <= 4.0 * t.standard_error);
    CHECK(std::abs(r.estimate - 2.0 * d.estimate) <=
          4.0 * std::hypot(r.standard_error, 2.0 * d.standard_error));
}
