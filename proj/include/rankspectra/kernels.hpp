#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace rankspectra {

/// The three consistent rank correlations.
enum class KernelId { HoeffdingD, BkrR, BdyTauStar };

std::string_view to_string(KernelId id);
KernelId parse_kernel(std::string_view name);

/// Kernel order m: 5 for Hoeffding's D, 6 for BKR's R, 4 for tau*.
int kernel_order(KernelId id) noexcept;

/// Multiplier c with h_2 = c * g(x1,x2) g(y1,y2) for the Hoeffding g:
/// 1 for D, 2 for R, 3 for tau*.
double h2_scale(KernelId id) noexcept;

/// Largest |h| over all rank patterns of m points (finite enumeration, cached).
double kernel_bound(KernelId id);

/// Literal kernel value: the prefactor times the sum over all m! orderings of
/// the indicator products. x[i], y[i] are the two coordinates of point i.
/// Throws ArityError unless |x| = |y| = m, TiesError on a tied coordinate.
double kernel_eval(KernelId id, std::span<const double> x, std::span<const double> y);

inline constexpr double kDefaultTermBudget = 1e9;

/// Complete U-statistic: mean of kernel_eval over all C(n, m) subsets.
/// Throws SizeError if n < m and ComplexityGuardError if C(n,m) * m! exceeds
/// max_terms.
double u_statistic_naive(KernelId id, std::span<const double> x, std::span<const double> y,
                         double max_terms = kDefaultTermBudget);

struct BivariatePoint {
    double x;
    double y;
};

struct McEstimate {
    double estimate;
    double standard_error;
};

/// Monte Carlo estimate of h_1(z) under the uniform product law, drawing the
/// remaining m - 1 points fresh for each of mc_draws evaluations.
McEstimate project_h1(KernelId id, BivariatePoint z, std::size_t mc_draws, std::uint64_t seed);

/// Monte Carlo estimate of h_2(z1, z2) under the uniform product law.
McEstimate project_h2(KernelId id, BivariatePoint z1, BivariatePoint z2, std::size_t mc_draws,
                      std::uint64_t seed);

} // namespace rankspectra
