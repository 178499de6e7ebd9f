#include "rankspectra/faststats.hpp"

#include "rankspectra/error.hpp"
#include "rankspectra/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace rankspectra {

namespace {

using i128 = __int128;

i128 binomial_exact(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    i128 r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<i128>(n - k + i) / static_cast<i128>(i);
    return r;
}

double ratio(i128 num, i128 den) {
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

// Rank-space view of a pair: y_rank_of[r] is the (0-based) y-rank of the
// point whose x-rank is r; x_rank_of is the inverse permutation.
struct PairPermutation {
    std::vector<std::uint32_t> y_rank_of;
    std::vector<std::uint32_t> x_rank_of;

    void assign(const RankVector& rx, const RankVector& ry) {
        const std::size_t n = rx.size();
        y_rank_of.resize(n);
        x_rank_of.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_rank_of[rx[i] - 1] = ry[i] - 1;
            x_rank_of[ry[i] - 1] = rx[i] - 1;
        }
    }
    std::size_t size() const noexcept { return y_rank_of.size(); }
};

struct Workspace {
    PairPermutation perm;
    std::vector<std::int64_t> fenwick;
    std::vector<double> a, b, c;
    std::vector<std::int32_t> ia, ix, is;
};

// Textbook Hoeffding D_n via bivariate rank counts c_i = #{j : x_j < x_i, y_j < y_i}.
i128 hoeffding_numerator(const PairPermutation& pp, Workspace& ws) {
    const std::size_t n = pp.size();
    ws.fenwick.assign(n + 1, 0);
    i128 q = 0, r_sum = 0, s_sum = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = pp.y_rank_of[r];
        std::int64_t below = 0;
        for (std::size_t i = t; i > 0; i -= i & (~i + 1)) below += ws.fenwick[i];
        for (std::size_t i = t + 1; i <= n; i += i & (~i + 1)) ++ws.fenwick[i];

        const i128 R = static_cast<i128>(r) + 1;
        const i128 S = static_cast<i128>(t) + 1;
        q += (R - 1) * (R - 2) * (S - 1) * (S - 2);
        r_sum += (R - 2) * (S - 2) * below;
        s_sum += static_cast<i128>(below) * (below - 1);
    }
    const i128 nn = static_cast<i128>(n);
    return q - 2 * (nn - 2) * r_sum + (nn - 2) * (nn - 3) * s_sum;
}

i128 falling5(std::size_t n) {
    const i128 nn = static_cast<i128>(n);
    return nn * (nn - 1) * (nn - 2) * (nn - 3) * (nn - 4);
}

// Sum over ordered 6-tuples of distinct indices of the BKR indicator product.
// For thresholds (x_{i5}, y_{i6}) the remaining points fall into four cells;
// the sum over ordered (i1..i4) of (u1-u2)(u3-u4)(w1-w2)(w3-w4) is
// 4[(P-Q)^2 - P(n00+n11-1) - Q(n10+n01-1)] with P = n11 n00, Q = n10 n01.
template <typename Cell>
i128 bkr_total(const PairPermutation& pp, Workspace& ws);

// int32 lanes: exact while P (n00 + n11) <= (n-2)^3 / 4 < 2^31.
template <>
i128 bkr_total<std::int32_t>(const PairPermutation& pp, Workspace& ws) {
    const std::size_t n = pp.size();
    const auto ni = static_cast<std::int32_t>(n);
    ws.ia.assign(n, 0); // A[s] = #{x-rank <= r, y-rank <= s}
    ws.ix.resize(n);    // x-rank of the point with y-rank s
    ws.is.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        ws.ix[s] = static_cast<std::int32_t>(pp.x_rank_of[s]);
        ws.is[s] = static_cast<std::int32_t>(s);
    }
    std::int32_t* A = ws.ia.data();
    const std::int32_t* xr = ws.ix.data();
    const std::int32_t* S = ws.is.data();

    i128 total = 0;
    for (std::int32_t r = 0; r < ni; ++r) {
        const auto t = static_cast<std::int32_t>(pp.y_rank_of[r]);
        for (std::int32_t s = t; s < ni; ++s) ++A[s];
        const std::int32_t c00 = ni - r - 2;

        std::int64_t row = 0;
#pragma omp simd reduction(+ : row)
        for (std::int32_t s = 0; s < ni; ++s) {
            const std::int32_t b5 = S[s] >= t;
            const std::int32_t b6 = xr[s] <= r;
            const std::int32_t a = A[s];
            const std::int32_t n11 = a - b5 - b6;
            const std::int32_t n10 = r - a + b5;
            const std::int32_t n01 = S[s] - a + b6;
            const std::int32_t n00 = a + c00 - S[s];
            const std::int32_t P = n11 * n00;
            const std::int32_t Q = n10 * n01;
            const std::int32_t d = P - Q;
            const std::int64_t f = static_cast<std::int64_t>(d) * d -
                                   static_cast<std::int64_t>(P * (n00 + n11 - 1) + Q * (n10 + n01 - 1));
            row += S[s] == t ? 0 : f;
        }
        total += row;
    }
    return 4 * total;
}

template <>
i128 bkr_total<i128>(const PairPermutation& pp, Workspace&) {
    const std::size_t n = pp.size();
    std::vector<std::int64_t> A(n, 0);
    i128 total = 0;
    const i128 nn = static_cast<i128>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = pp.y_rank_of[r];
        for (std::size_t s = t; s < n; ++s) ++A[s];
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) continue;
            const i128 b5 = s >= t;
            const i128 b6 = pp.x_rank_of[s] <= r;
            const i128 a = A[s];
            const i128 n11 = a - b5 - b6;
            const i128 n10 = static_cast<i128>(r + 1) - a - (1 - b5);
            const i128 n01 = static_cast<i128>(s + 1) - a - (1 - b6);
            const i128 n00 = nn - static_cast<i128>(r + 1) - static_cast<i128>(s + 1) + a;
            const i128 P = n11 * n00;
            const i128 Q = n10 * n01;
            total += (P - Q) * (P - Q) - P * (n00 + n11 - 1) - Q * (n10 + n01 - 1);
        }
    }
    return 4 * total;
}

constexpr std::size_t kBkrInt32PathMaxN = 2000;

i128 bkr_ordered_sum(const PairPermutation& pp, Workspace& ws) {
    return pp.size() <= kBkrInt32PathMaxN ? bkr_total<std::int32_t>(pp, ws) : bkr_total<i128>(pp, ws);
}

// Number of 4-subsets whose bottom pair by x equals the bottom or the top pair
// by y. For a pair {i, j} with x-corner cx = max rank, this is the number of
// pairs of points beyond cx that lie above max(y) or below min(y).
std::int64_t taustar_same_split(const PairPermutation& pp, Workspace& ws) {
    const std::size_t n = pp.size();
    ws.a.resize(n); // points with x-rank > r and y-rank > s
    ws.b.resize(n); // points with x-rank > r and y-rank < s
    ws.c.assign(n, 0.0); // 1 if the point with y-rank s has x-rank < r
    for (std::size_t s = 0; s < n; ++s) {
        ws.a[s] = static_cast<double>(n - 1 - s);
        ws.b[s] = static_cast<double>(s);
    }
    double* up = ws.a.data();
    double* down = ws.b.data();
    double* active = ws.c.data();

    std::int64_t total = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = pp.y_rank_of[r];
        for (std::size_t s = 0; s < t; ++s) up[s] -= 1.0;
        for (std::size_t s = t + 1; s < n; ++s) down[s] -= 1.0;

        double lower_active = 0.0, lower_sum = 0.0;
#pragma omp simd reduction(+ : lower_active, lower_sum)
        for (std::size_t s = 0; s < t; ++s) {
            lower_active += active[s];
            lower_sum += active[s] * down[s] * (down[s] - 1.0);
        }
        double upper_active = 0.0, upper_sum = 0.0;
#pragma omp simd reduction(+ : upper_active, upper_sum)
        for (std::size_t s = t + 1; s < n; ++s) {
            upper_active += active[s];
            upper_sum += active[s] * up[s] * (up[s] - 1.0);
        }
        const double ut = up[t], dt = down[t];
        const double row = lower_active * ut * (ut - 1.0) + upper_sum +
                           upper_active * dt * (dt - 1.0) + lower_sum;
        total += static_cast<std::int64_t>(row) / 2;
        active[t] = 1.0;
    }
    return total;
}

void check_size(KernelId id, std::size_t n) {
    const auto m = static_cast<std::size_t>(kernel_order(id));
    if (n < m)
        throw SizeError(std::string(to_string(id)) + " needs n >= " + std::to_string(m));
    if (n > kMaxFastN) throw SizeError("fast path supports n <= " + std::to_string(kMaxFastN));
}

// Exact U-statistic as numerator / denominator before the frozen scale.
struct Fraction {
    i128 num;
    i128 den;
};

Fraction raw_fraction(KernelId id, const PairPermutation& pp, Workspace& ws) {
    const std::size_t n = pp.size();
    switch (id) {
    case KernelId::HoeffdingD: return {hoeffding_numerator(pp, ws), falling5(n)};
    case KernelId::BkrR: return {bkr_ordered_sum(pp, ws), binomial_exact(n, 6)};
    case KernelId::BdyTauStar: {
        const i128 subsets = binomial_exact(n, 4);
        // N/C - 1/3 = (3N - C) / (3C)
        return {3 * static_cast<i128>(taustar_same_split(pp, ws)) - subsets, 3 * subsets};
    }
    }
    return {0, 1};
}

static_assert(kHoeffdingFastScale == 30.0);
static_assert(kBkrFastScale * 32.0 == 1.0);
static_assert(kTauStarFastScale * 2.0 == 3.0);

// Applies the frozen scale in integer arithmetic before the final division.
double scaled(KernelId id, const Fraction& f) {
    switch (id) {
    case KernelId::HoeffdingD: return ratio(30 * f.num, f.den);
    case KernelId::BkrR: return ratio(f.num, 32 * f.den);
    case KernelId::BdyTauStar: return ratio(3 * f.num, 2 * f.den);
    }
    return 0.0;
}

double pair_stat_impl(KernelId id, const RankVector& rx, const RankVector& ry, Workspace& ws) {
    ws.perm.assign(rx, ry);
    return scaled(id, raw_fraction(id, ws.perm, ws));
}

} // namespace

double fast_path_scale(KernelId id) noexcept {
    switch (id) {
    case KernelId::HoeffdingD: return kHoeffdingFastScale;
    case KernelId::BkrR: return kBkrFastScale;
    case KernelId::BdyTauStar: return kTauStarFastScale;
    }
    return 0.0;
}

double fast_raw_statistic(KernelId id, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw SizeError("fast_raw_statistic: x and y differ in length");
    check_size(id, x.size());
    Workspace ws;
    ws.perm.assign(column_ranks(x), column_ranks(y));
    const Fraction f = raw_fraction(id, ws.perm, ws);
    return ratio(f.num, f.den);
}

double pair_stat_ranks(KernelId id, const RankVector& rx, const RankVector& ry) {
    if (rx.size() != ry.size()) throw SizeError("pair_stat: x and y differ in length");
    check_size(id, rx.size());
    Workspace ws;
    return pair_stat_impl(id, rx, ry, ws);
}

double pair_stat(KernelId id, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw SizeError("pair_stat: x and y differ in length");
    check_size(id, x.size());
    return pair_stat_ranks(id, column_ranks(x), column_ranks(y));
}

CorrMatrix correlation_matrix(KernelId id, const SampleMatrix& m, unsigned threads) {
    const std::size_t n = m.n();
    const std::size_t p = m.p();
    check_size(id, n);
    const unsigned workers = resolve_threads(threads);

    std::vector<RankVector> ranks(p);
    parallel_for(p, workers, [&](std::size_t j) {
        try {
            ranks[j] = column_ranks(m.column(j));
        } catch (const TiesError& e) {
            throw TiesError("column " + std::to_string(j) + ": " + e.what());
        }
    });

    CorrMatrix out{p, n, id, std::vector<double>(p * p, 0.0)};
    for (std::size_t j = 0; j < p; ++j) out.entries[j * p + j] = 1.0;

    // Upper-triangle pairs in row-major order; each writes two disjoint slots.
    std::vector<std::size_t> row_start(p + 1, 0);
    for (std::size_t j = 0; j < p; ++j) row_start[j + 1] = row_start[j] + (p - 1 - j);
    const std::size_t pairs = row_start[p];

    parallel_blocks(pairs, workers, [&](std::size_t begin, std::size_t end) {
        Workspace ws;
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(row_start.begin(), row_start.end(), begin) - row_start.begin() - 1);
        for (std::size_t idx = begin; idx < end; ++idx) {
            while (idx >= row_start[j + 1]) ++j;
            const std::size_t k = j + 1 + (idx - row_start[j]);
            double value = 0.0;
            try {
                value = pair_stat_impl(id, ranks[j], ranks[k], ws);
            } catch (const Error& e) {
                throw ComputationError("pair (" + std::to_string(j) + ", " + std::to_string(k) +
                                       "): " + e.what());
            }
            out.entries[j * p + k] = value;
            out.entries[k * p + j] = value;
        }
    });
    return out;
}

WMatrix standardize(const CorrMatrix& r) {
    WMatrix w{r.p, r.n, static_cast<double>(r.p) / static_cast<double>(r.n),
              std::vector<double>(r.p * r.p, 0.0)};
    const double scale = std::sqrt(static_cast<double>(r.n));
    for (std::size_t j = 0; j < r.p; ++j)
        for (std::size_t k = 0; k < r.p; ++k)
            w.entries[j * r.p + k] = j == k ? 0.0 : scale * r.entries[j * r.p + k];
    return w;
}

} // namespace rankspectra
