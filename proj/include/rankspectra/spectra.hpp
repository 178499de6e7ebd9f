#pragma once

#include "rankspectra/limitlaw.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace rankspectra {

/// Off-diagonal deflation tolerance (relative) and total QL sweep budget per
/// matrix dimension.
inline constexpr double kEigenTolerance = 1e-12;
inline constexpr std::size_t kEigenIterationsPerDim = 50;

/// All eigenvalues of a real symmetric p x p matrix (row-major), sorted
/// descending. Householder tridiagonalization followed by implicit QL.
/// Throws SymmetryError if |a_jk - a_kj| > 1e-12 and ConvergenceError if the
/// QL sweeps exceed 50 p iterations.
std::vector<double> sym_eigenvalues(std::span<const double> a, std::size_t p);

/// Equal-width histogram of an eigenvalue sample on [lo, hi]. Values outside
/// the range are tallied in underflow / overflow rather than clamped.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> edges;        // bins + 1 entries
    std::vector<std::size_t> counts;  // per bin
    std::vector<double> density;      // count / (total * width)
    std::size_t underflow = 0;
    std::size_t overflow = 0;
    std::size_t total = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    double width() const noexcept { return (hi - lo) / static_cast<double>(counts.size()); }
    /// Fraction of the sample in bin i.
    double mass(std::size_t i) const noexcept {
        return static_cast<double>(counts[i]) / static_cast<double>(total);
    }
};

/// Throws RangeError unless bins >= 1 and lo < hi.
Histogram esd_histogram(std::span<const double> eigs, std::size_t bins, double lo, double hi);

/// (1/p) sum_i 1 / (lambda_i - z). Throws DomainError if Im z <= 0.
std::complex<double> empirical_stieltjes(std::span<const double> eigs, std::complex<double> z);

/// Kolmogorov distance between the empirical CDF of eigs and `cdf`, using
/// both one-sided limits at every sample point.
double ks_distance(std::span<const double> eigs, const std::function<double(double)>& cdf);
double ks_distance(std::span<const double> eigs, const SemicircleLaw& law);

struct StieltjesSample {
    std::complex<double> z;
    std::complex<double> s;
};

struct SpectralSummary {
    std::vector<double> eigenvalues; // descending
    Histogram histogram;
    double ks_to_law = 0.0;
    double second_moment = 0.0;      // (1/p) sum lambda_i^2
    std::vector<StieltjesSample> stieltjes_samples;
};

SpectralSummary summarize_spectrum(std::span<const double> a, std::size_t p,
                                   const SemicircleLaw& law, std::size_t bins, double lo,
                                   double hi, std::span<const std::complex<double>> z_probes);

} // namespace rankspectra
