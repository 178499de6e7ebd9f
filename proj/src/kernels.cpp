#include "rankspectra/kernels.hpp"

#include "rankspectra/data.hpp"
#include "rankspectra/error.hpp"
#include "rankspectra/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace rankspectra {

std::string_view to_string(KernelId id) {
    switch (id) {
    case KernelId::HoeffdingD: return "hoeffding-d";
    case KernelId::BkrR: return "bkr-r";
    case KernelId::BdyTauStar: return "bdy-taustar";
    }
    return "unknown";
}

KernelId parse_kernel(std::string_view name) {
    for (KernelId id : {KernelId::HoeffdingD, KernelId::BkrR, KernelId::BdyTauStar})
        if (to_string(id) == name) return id;
    throw ValidationError("unknown statistic '" + std::string(name) + "'");
}

int kernel_order(KernelId id) noexcept {
    switch (id) {
    case KernelId::HoeffdingD: return 5;
    case KernelId::BkrR: return 6;
    case KernelId::BdyTauStar: return 4;
    }
    return 0;
}

double h2_scale(KernelId id) noexcept {
    switch (id) {
    case KernelId::HoeffdingD: return 1.0;
    case KernelId::BkrR: return 2.0;
    case KernelId::BdyTauStar: return 3.0;
    }
    return 0.0;
}

namespace {

constexpr int kMaxOrder = 6;

using Perm = std::array<std::uint8_t, kMaxOrder>;

const std::vector<Perm>& permutations(int m) {
    static const auto table = [] {
        std::array<std::vector<Perm>, kMaxOrder + 1> t;
        for (int k = 1; k <= kMaxOrder; ++k) {
            Perm p{};
            std::iota(p.begin(), p.begin() + k, std::uint8_t{0});
            do {
                t[k].push_back(p);
            } while (std::next_permutation(p.begin(), p.begin() + k));
        }
        return t;
    }();
    return table[m];
}

// Pairwise comparison tables for one coordinate of an m-point tuple.
struct Comparisons {
    std::array<std::array<int, kMaxOrder>, kMaxOrder> le{}; // 1(z_a <= z_b)
    std::array<std::array<int, kMaxOrder>, kMaxOrder> lt{}; // 1(z_a <  z_b)

    Comparisons(const double* z, int m) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                le[a][b] = z[a] <= z[b];
                lt[a][b] = z[a] < z[b];
            }
    }
};

// [1(z_i1 <= z_t) - 1(z_i2 <= z_t)] [1(z_i3 <= z_t) - 1(z_i4 <= z_t)]
inline int hoeffding_factor(const Comparisons& c, const Perm& p, int t) {
    return (c.le[p[0]][t] - c.le[p[1]][t]) * (c.le[p[2]][t] - c.le[p[3]][t]);
}

// 1(z_a, z_b < z_c, z_d): both of a, b strictly below both of c, d.
inline int below(const Comparisons& c, int a, int b, int cc, int d) {
    return c.lt[a][cc] & c.lt[a][d] & c.lt[b][cc] & c.lt[b][d];
}

inline int taustar_factor(const Comparisons& c, const Perm& p) {
    return below(c, p[0], p[2], p[1], p[3]) + below(c, p[1], p[3], p[0], p[2]) -
           below(c, p[0], p[3], p[1], p[2]) - below(c, p[1], p[2], p[0], p[3]);
}

// Literal permutation sum; assumes arity and tie-freedom were checked.
double kernel_unchecked(KernelId id, const double* x, const double* y) {
    const int m = kernel_order(id);
    const Comparisons cx(x, m);
    const Comparisons cy(y, m);
    long long total = 0;
    switch (id) {
    case KernelId::HoeffdingD:
        for (const Perm& p : permutations(m))
            total += hoeffding_factor(cx, p, p[4]) * hoeffding_factor(cy, p, p[4]);
        return static_cast<double>(total) / 16.0;
    case KernelId::BkrR:
        for (const Perm& p : permutations(m))
            total += hoeffding_factor(cx, p, p[4]) * hoeffding_factor(cy, p, p[5]);
        return static_cast<double>(total) / 32.0;
    case KernelId::BdyTauStar:
        for (const Perm& p : permutations(m))
            total += taustar_factor(cx, p) * taustar_factor(cy, p);
        return static_cast<double>(total) / 16.0;
    }
    return 0.0;
}

void require_distinct(std::span<const double> z, const char* what) {
    std::vector<double> s(z.begin(), z.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw TiesError(std::string("tied values in ") + what);
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// Evaluate with point 0..fixed-1 given, the rest drawn uniformly.
McEstimate project(KernelId id, std::span<const BivariatePoint> fixed, std::size_t mc_draws,
                   std::uint64_t seed) {
    if (mc_draws < 1000) throw ValidationError("Monte Carlo projections require mc_draws >= 1000");
    const int m = kernel_order(id);
    std::array<double, kMaxOrder> x{}, y{};
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        x[i] = fixed[i].x;
        y[i] = fixed[i].y;
        if (!(x[i] >= 0.0 && x[i] <= 1.0 && y[i] >= 0.0 && y[i] <= 1.0))
            throw DomainError("projection points must lie in [0,1]^2");
    }
    require_distinct(std::span<const double>(x.data(), fixed.size()), "projection x coordinates");
    require_distinct(std::span<const double>(y.data(), fixed.size()), "projection y coordinates");

    UniformStream stream(derive_seed(seed, 0x6b65726e656cULL));
    auto fresh = [&](std::array<double, kMaxOrder>& z, std::size_t i) {
        for (;;) {
            const double u = stream.next();
            bool clash = false;
            for (std::size_t k = 0; k < i; ++k) clash |= (z[k] == u);
            if (!clash) {
                z[i] = u;
                return;
            }
        }
    };

    MeanAccumulator acc;
    for (std::size_t draw = 0; draw < mc_draws; ++draw) {
        for (std::size_t i = fixed.size(); i < static_cast<std::size_t>(m); ++i) {
            fresh(x, i);
            fresh(y, i);
        }
        acc.add(kernel_unchecked(id, x.data(), y.data()));
    }
    return {acc.mean(), acc.standard_error()};
}

} // namespace

double kernel_bound(KernelId id) {
    static const auto bounds = [] {
        std::array<double, 3> b{};
        for (KernelId k : {KernelId::HoeffdingD, KernelId::BkrR, KernelId::BdyTauStar}) {
            const int m = kernel_order(k);
            std::array<double, kMaxOrder> x{}, y{};
            std::iota(x.begin(), x.begin() + m, 0.0);
            std::iota(y.begin(), y.begin() + m, 0.0);
            double worst = 0.0;
            do {
                worst = std::max(worst, std::abs(kernel_unchecked(k, x.data(), y.data())));
            } while (std::next_permutation(y.begin(), y.begin() + m));
            b[static_cast<int>(k)] = worst;
        }
        return b;
    }();
    return bounds[static_cast<int>(id)];
}

double kernel_eval(KernelId id, std::span<const double> x, std::span<const double> y) {
    const auto m = static_cast<std::size_t>(kernel_order(id));
    if (x.size() != m || y.size() != m)
        throw ArityError(std::string(to_string(id)) + " expects exactly " + std::to_string(m) +
                         " points");
    require_distinct(x, "first coordinate");
    require_distinct(y, "second coordinate");
    return kernel_unchecked(id, x.data(), y.data());
}

double u_statistic_naive(KernelId id, std::span<const double> x, std::span<const double> y,
                         double max_terms) {
    const auto m = static_cast<std::size_t>(kernel_order(id));
    const std::size_t n = x.size();
    if (y.size() != n) throw SizeError("u_statistic_naive: x and y differ in length");
    if (n < m) throw SizeError("u_statistic_naive: need n >= " + std::to_string(m));
    const double subsets = binomial(n, m);
    if (subsets * factorial(static_cast<int>(m)) > max_terms)
        throw ComplexityGuardError("u_statistic_naive: C(n,m)*m! exceeds the term budget");
    require_distinct(x, "x");
    require_distinct(y, "y");

    std::array<std::size_t, kMaxOrder> idx{};
    std::iota(idx.begin(), idx.begin() + m, std::size_t{0});
    std::array<double, kMaxOrder> xs{}, ys{};
    CompensatedSum sum;
    for (;;) {
        for (std::size_t k = 0; k < m; ++k) {
            xs[k] = x[idx[k]];
            ys[k] = y[idx[k]];
        }
        sum.add(kernel_unchecked(id, xs.data(), ys.data()));

        // Next combination in lexicographic order.
        std::size_t k = m;
        while (k > 0 && idx[k - 1] == n - m + (k - 1)) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
    return sum.value() / subsets;
}

McEstimate project_h1(KernelId id, BivariatePoint z, std::size_t mc_draws, std::uint64_t seed) {
    const BivariatePoint fixed[] = {z};
    return project(id, fixed, mc_draws, seed);
}

McEstimate project_h2(KernelId id, BivariatePoint z1, BivariatePoint z2, std::size_t mc_draws,
                      std::uint64_t seed) {
    const BivariatePoint fixed[] = {z1, z2};
    return project(id, fixed, mc_draws, seed);
}

} // namespace rankspectra
