#pragma once

#include "rankspectra/kernels.hpp"

#include <complex>

namespace rankspectra {

/// Wigner semicircle law W(r): density (2 / (pi r^2)) sqrt((r^2 - x^2)_+).
class SemicircleLaw {
public:
    /// Throws DomainError unless radius is finite and positive.
    explicit SemicircleLaw(double radius);

    double radius() const noexcept { return radius_; }
    double density(double x) const noexcept;
    double cdf(double x) const noexcept;
    /// Stieltjes transform on the upper half-plane; Im z <= 0 is a DomainError.
    std::complex<double> stieltjes(std::complex<double> z) const;
    double second_moment() const noexcept { return radius_ * radius_ / 4.0; }

private:
    double radius_;
};

double sc_density(double x, double r);
double sc_cdf(double x, double r);
std::complex<double> sc_stieltjes(std::complex<double> z, double r);

/// m (m - 1) sqrt(2 gamma) * sum_lambda_sq.
double radius_theta(int m_order, double gamma, double sum_lambda_sq);

/// Closed-form limiting radius of sqrt(n)(R-hat - I) for each statistic:
/// 2 sqrt(2 gamma) / 3, 2 sqrt(2 gamma), 6 sqrt(2 gamma) / 5.
double corollary_radius(KernelId id, double gamma);

/// Hoeffding's g(x, y) = (sqrt 3 / 6)(3x^2 + 3y^2 - 6 max(x, y) + 2) on [0,1]^2.
double g_closed(double x, double y);

inline constexpr int kDefaultSeriesTerms = 2000;

/// Eigen-system of g: lambda_r = sqrt 3 / (pi^2 r^2), psi_r(x) = sqrt 2 cos(pi r x).
struct HoeffdingEigenSystem {
    /// sum_r lambda_r^2 = 3 zeta(4) / pi^4.
    static constexpr double kSumLambdaSq = 1.0 / 30.0;
    /// sum_r lambda_r = sqrt 3 / 6.
    static double sum_lambda() noexcept;

    static double lambda(int r) noexcept;
    static double psi(int r, double x) noexcept;
    /// sum_{r <= T} lambda_r^2.
    static double sum_lambda_sq(int T) noexcept;
    /// Upper bound on sum_{r > T} lambda_r^2, namely 1 / (pi^4 T^3).
    static double sum_lambda_sq_tail_bound(int T) noexcept;
    /// sum_{r <= T} lambda_r psi_r(x) psi_r(y).
    static double g_series(double x, double y, int T = kDefaultSeriesTerms) noexcept;
};

} // namespace rankspectra
