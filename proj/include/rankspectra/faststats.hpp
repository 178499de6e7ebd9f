#pragma once

#include "rankspectra/data.hpp"
#include "rankspectra/kernels.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rankspectra {

/// Symmetric p x p rank-correlation matrix with unit diagonal (row-major).
struct CorrMatrix {
    std::size_t p = 0;
    std::size_t n = 0;
    KernelId statistic = KernelId::HoeffdingD;
    std::vector<double> entries;

    double at(std::size_t j, std::size_t k) const noexcept { return entries[j * p + k]; }
    bool operator==(const CorrMatrix&) const = default;
};

/// sqrt(n) (R - I): symmetric, zero diagonal, gamma = p / n.
struct WMatrix {
    std::size_t p = 0;
    std::size_t n = 0;
    double gamma = 0.0;
    std::vector<double> entries;

    double at(std::size_t j, std::size_t k) const noexcept { return entries[j * p + k]; }
};

// The fast paths evaluate a raw count statistic and multiply by a frozen
// scale. Each scale was fitted against u_statistic_naive on small samples and
// is pinned by a regression test.
//
//   hoeffding-d : raw = textbook D_n (Q - 2(n-2)R + (n-2)(n-3)S) / (n)_5
//   bkr-r       : raw = (sum over ordered 6-tuples of the indicator product) / C(n,6)
//   bdy-taustar : raw = N_same / C(n,4) - 1/3, N_same = #4-subsets whose x- and
//                 y-orderings split them into the same pair of pairs
inline constexpr double kHoeffdingFastScale = 30.0;
inline constexpr double kBkrFastScale = 1.0 / 32.0;
inline constexpr double kTauStarFastScale = 1.5;

/// Largest n accepted by the fast paths; keeps every integer count in range.
inline constexpr std::size_t kMaxFastN = 100000;

double fast_path_scale(KernelId id) noexcept;

/// Uncalibrated count statistic (see above). Same preconditions as pair_stat.
double fast_raw_statistic(KernelId id, std::span<const double> x, std::span<const double> y);

/// Complete U-statistic for one pair of variables in o(n^3): O(n log n) for
/// Hoeffding's D, O(n^2) for R and tau*. Agrees with u_statistic_naive.
double pair_stat(KernelId id, std::span<const double> x, std::span<const double> y);

/// Same, from precomputed ranks.
double pair_stat_ranks(KernelId id, const RankVector& rx, const RankVector& ry);

/// Assembles R-hat. Each unordered pair is computed once; the result does not
/// depend on `threads` (0 = auto).
CorrMatrix correlation_matrix(KernelId id, const SampleMatrix& m, unsigned threads = 0);

WMatrix standardize(const CorrMatrix& r);

} // namespace rankspectra
