#include "rankspectra/spectra.hpp"

#include "rankspectra/error.hpp"
#include "rankspectra/summation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace rankspectra {

namespace {

// Householder reduction of the symmetric matrix held in `a` (row-major, only
// the lower triangle is read) to tridiagonal form: diagonal d, sub-diagonal
// e[1..p-1]. Eigenvectors are not accumulated.
void tridiagonalize(std::vector<double>& a, std::size_t p, std::vector<double>& d,
                    std::vector<double>& e) {
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * p + j]; };
    d.assign(p, 0.0);
    e.assign(p, 0.0);
    for (std::size_t i = p - 1; i > 0; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = A(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i < p; ++i) d[i] = A(i, i);
}

// Implicit QL with Wilkinson-type shifts on (d, e). On entry e[i] couples
// d[i-1] and d[i]; it is shifted so that e[i] couples d[i] and d[i+1].
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
    const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(d.size());
    for (std::ptrdiff_t i = 1; i < p; ++i) e[i - 1] = e[i];
    e[p - 1] = 0.0;

    const std::size_t budget = kEigenIterationsPerDim * d.size();
    std::size_t iterations = 0;
    for (std::ptrdiff_t l = 0; l < p; ++l) {
        std::ptrdiff_t m;
        do {
            for (m = l; m < p - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= kEigenTolerance * dd) break;
            }
            if (m == l) break;
            if (++iterations > budget)
                throw ConvergenceError("implicit QL did not converge: eigenvalue " +
                                       std::to_string(l) + " after " + std::to_string(iterations) +
                                       " iterations, residual |e| = " + std::to_string(std::abs(e[l])));

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, shift = 0.0;
            std::ptrdiff_t i;
            for (i = m - 1; i >= l; --i) {
                const double f = s * e[i];
                const double b = c * e[i];
                e[i + 1] = r = std::hypot(f, g);
                if (r == 0.0) {
                    d[i + 1] -= shift;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - shift;
                r = (d[i] - g) * s + 2.0 * c * b;
                shift = s * r;
                d[i + 1] = g + shift;
                g = c * r - b;
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= shift;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
}

} // namespace

std::vector<double> sym_eigenvalues(std::span<const double> a, std::size_t p) {
    if (a.size() != p * p) throw SizeError("sym_eigenvalues: storage does not match p*p");
    if (p == 0) return {};
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < j; ++k) {
            if (!std::isfinite(a[j * p + k]) || !std::isfinite(a[k * p + j]))
                throw DomainError("sym_eigenvalues: non-finite entry");
            if (std::abs(a[j * p + k] - a[k * p + j]) > 1e-12)
                throw SymmetryError("sym_eigenvalues: matrix is not symmetric at (" +
                                    std::to_string(j) + ", " + std::to_string(k) + ")");
        }

    std::vector<double> work(a.begin(), a.end());
    std::vector<double> d, e;
    tridiagonalize(work, p, d, e);
    if (p > 1) tridiagonal_ql(d, e);
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
}

Histogram esd_histogram(std::span<const double> eigs, std::size_t bins, double lo, double hi) {
    if (bins < 1) throw RangeError("esd_histogram: need at least one bin");
    if (!(lo < hi)) throw RangeError("esd_histogram: need lo < hi");
    if (eigs.empty()) throw RangeError("esd_histogram: empty sample");

    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.total = eigs.size();
    h.counts.assign(bins, 0);
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges[bins] = hi;

    for (double x : eigs) {
        if (x < lo) {
            ++h.underflow;
        } else if (x > hi) {
            ++h.overflow;
        } else {
            auto bin = static_cast<std::size_t>((x - lo) / width);
            bin = std::min(bin, bins - 1);
            // Floating division can land one bin off near an edge.
            while (bin > 0 && x < h.edges[bin]) --bin;
            while (bin + 1 < bins && x >= h.edges[bin + 1]) ++bin;
            ++h.counts[bin];
        }
    }
    h.density.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        h.density[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(h.total) * width);
    return h;
}

std::complex<double> empirical_stieltjes(std::span<const double> eigs, std::complex<double> z) {
    if (!(z.imag() > 0.0)) throw DomainError("empirical_stieltjes requires Im z > 0");
    if (eigs.empty()) throw SizeError("empirical_stieltjes: empty sample");
    ComplexCompensatedSum sum;
    for (double lambda : eigs) sum.add(1.0 / (lambda - z));
    return sum.value() / static_cast<double>(eigs.size());
}

double ks_distance(std::span<const double> eigs, const std::function<double(double)>& cdf) {
    if (eigs.empty()) throw SizeError("ks_distance: empty sample");
    std::vector<double> sorted(eigs.begin(), eigs.end());
    std::sort(sorted.begin(), sorted.end());
    const double p = static_cast<double>(sorted.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double right = static_cast<double>(i + 1) / p;
        const double left = static_cast<double>(i) / p;
        worst = std::max({worst, std::abs(right - f), std::abs(left - f)});
    }
    return worst;
}

double ks_distance(std::span<const double> eigs, const SemicircleLaw& law) {
    return ks_distance(eigs, [&](double x) { return law.cdf(x); });
}

SpectralSummary summarize_spectrum(std::span<const double> a, std::size_t p,
                                   const SemicircleLaw& law, std::size_t bins, double lo,
                                   double hi, std::span<const std::complex<double>> z_probes) {
    SpectralSummary out;
    out.eigenvalues = sym_eigenvalues(a, p);
    out.histogram = esd_histogram(out.eigenvalues, bins, lo, hi);
    out.ks_to_law = ks_distance(out.eigenvalues, law);
    CompensatedSum sq;
    for (double x : out.eigenvalues) sq.add(x * x);
    out.second_moment = sq.value() / static_cast<double>(p);
    for (auto z : z_probes) out.stieltjes_samples.push_back({z, empirical_stieltjes(out.eigenvalues, z)});
    return out;
}

} // namespace rankspectra
