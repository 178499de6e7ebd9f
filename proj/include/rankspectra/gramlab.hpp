#pragma once

#include "rankspectra/data.hpp"
#include "rankspectra/faststats.hpp"
#include "rankspectra/kernels.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rankspectra {

// Finite-sample laboratory for the second-order (Gram) approximation of
// R-hat. Everything uses the Hoeffding eigen-system; R and tau* enter through
// their h_2 multiplier c (2 and 3), applied as sqrt(c) inside each g-factor.
//
// Inputs are mapped to [0,1] first: uniform01 samples are used as-is (and
// must lie in [0,1], else MarginError); other margins are replaced by
// rank / (n + 1).

struct TruncationConfig {
    int T = 1;
    KernelId id = KernelId::HoeffdingD;
};

/// Pair index (i1, i2), 1-based, i1 < i2.
using SamplePair = std::pair<std::uint32_t, std::uint32_t>;

/// Row index of pair (i1, i2) in the lexicographic order
/// (1,2), (1,3), ..., (1,n), (2,3), ...
std::size_t pair_row(std::size_t n, SamplePair pair) noexcept;
SamplePair row_pair(std::size_t n, std::size_t row) noexcept;

/// Normalized features A~[(i1,i2), k] = sigma_T^{-1} sqrt(c) sum_{r<=T} lambda_r
/// psi_r(X_{i1,k}) psi_r(X_{i2,k}), stored column-major (M x p).
struct FeatureMatrix {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t M = 0;      // n (n - 1) / 2
    double sigma_T = 0.0;   // sqrt(c sum_{r<=T} lambda_r^2)
    std::vector<double> entries;

    double at(std::size_t row, std::size_t k) const noexcept { return entries[k * M + row]; }
    std::span<const double> column(std::size_t k) const noexcept { return {entries.data() + k * M, M}; }
    SamplePair pair(std::size_t row) const noexcept { return row_pair(n, row); }
};

/// sup |A~| <= sigma_T^{-1} (sup ||psi||_inf)^2 sum |lambda_r| sqrt(c).
double feature_bound(const TruncationConfig& cfg);

/// sigma_T for a configuration.
double truncation_sigma(const TruncationConfig& cfg);

/// Leading Hoeffding term: c m(m-1)/(n(n-1)) sum_{i1<i2} g(.,.) g(.,.), unit diagonal.
CorrMatrix leading_matrix(const SampleMatrix& m, KernelId id, unsigned threads = 0);

/// Same with g replaced by its T-term eigen-expansion.
CorrMatrix truncated_matrix(const SampleMatrix& m, const TruncationConfig& cfg, unsigned threads = 0);

FeatureMatrix build_feature_matrix(const SampleMatrix& m, const TruncationConfig& cfg,
                                   unsigned threads = 0);

/// Max entrywise gap between sqrt(n)(R_T - I) and its Gram form
/// m(m-1) sqrt(pM) sigma_T^2 / (sqrt(n)(n-1)) * G, G = sqrt(M/p) D_0(A~^T A~ / M).
/// `feature_scale` multiplies A~ before forming G (a broken-scaling control).
double gram_identity_residual(const SampleMatrix& m, const TruncationConfig& cfg,
                              double feature_scale = 1.0);

/// E[prod_q A~_{pair_q, 1}] over fresh uniform samples. Throws IndexError
/// for pairs with a zero index or i1 == i2.
McEstimate cross_moment_mc(std::span<const SamplePair> tuples, const TruncationConfig& cfg,
                                 std::size_t trials, std::uint64_t seed);

struct FrobeniusEstimate {
    double estimate = 0.0;        // E ||S - I||_F^2, S = A~^T A~ / M
    double standard_error = 0.0;
    double diagonal = 0.0;        // E sum_k (S_kk - 1)^2
    double off_diagonal = 0.0;    // E sum_{j != k} S_jk^2
};

/// Throws ValidationError if trials < 30.
FrobeniusEstimate s_minus_identity_frobenius(std::size_t n, std::size_t p,
                                             const TruncationConfig& cfg, std::size_t trials,
                                             std::uint64_t seed);

enum class FeatureSource {
    Kernel,     // A~ from uniform samples
    Rademacher, // independent +-1 entries (classical control)
};

inline constexpr std::size_t kMaxResolventRows = 5000;

/// (1 / (p^3 M^2)) E|a_k^T B_k a_k - tr B_k|^2 with B_k = A~_{-k} Q_k A~_{-k}^T,
/// Q_k = (y^{-1/2} D_0(S_{-k}) - z)^{-1}, y = p / M. Each trial averages the
/// squared gap over all columns k. Throws MemoryGuardError if M > 5000.
McEstimate resolvent_quadratic_gap(std::size_t n, std::size_t p, const TruncationConfig& cfg,
                                         std::complex<double> z, std::size_t trials,
                                         std::uint64_t seed,
                                         FeatureSource source = FeatureSource::Kernel);

} // namespace rankspectra
