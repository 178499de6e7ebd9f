#include "rankspectra/limitlaw.hpp"

#include "rankspectra/error.hpp"
#include "rankspectra/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rankspectra {

SemicircleLaw::SemicircleLaw(double radius) : radius_(radius) {
    if (!(std::isfinite(radius) && radius > 0.0))
        throw DomainError("semicircle radius must be positive and finite");
}

double SemicircleLaw::density(double x) const noexcept {
    const double r2 = radius_ * radius_;
    const double inside = r2 - x * x;
    if (inside <= 0.0) return 0.0;
    return 2.0 / (std::numbers::pi * r2) * std::sqrt(inside);
}

double SemicircleLaw::cdf(double x) const noexcept {
    if (x <= -radius_) return 0.0;
    if (x >= radius_) return 1.0;
    const double r2 = radius_ * radius_;
    const double value = 0.5 + x * std::sqrt(r2 - x * x) / (std::numbers::pi * r2) +
                         std::asin(x / radius_) / std::numbers::pi;
    return std::clamp(value, 0.0, 1.0);
}

std::complex<double> SemicircleLaw::stieltjes(std::complex<double> z) const {
    if (!(z.imag() > 0.0)) throw DomainError("Stieltjes transform requires Im z > 0");
    const double r2 = radius_ * radius_;
    const std::complex<double> w = std::sqrt(z * z - r2);
    // The two roots of (r^2/4) m^2 + z m + 1 = 0 are -2/(z + w) and -2/(z - w);
    // exactly one lies in the upper half-plane. Evaluate each in the form that
    // avoids cancellation.
    auto root = [&](std::complex<double> plus, std::complex<double> minus) {
        return std::abs(plus) >= std::abs(minus) ? -2.0 / plus : -(2.0 / r2) * minus;
    };
    const std::complex<double> first = root(z + w, z - w);
    const std::complex<double> second = root(z - w, z + w);
    return first.imag() > 0.0 ? first : second;
}

double sc_density(double x, double r) { return SemicircleLaw(r).density(x); }
double sc_cdf(double x, double r) { return SemicircleLaw(r).cdf(x); }
std::complex<double> sc_stieltjes(std::complex<double> z, double r) {
    return SemicircleLaw(r).stieltjes(z);
}

double radius_theta(int m_order, double gamma, double sum_lambda_sq) {
    if (m_order < 2) throw DomainError("radius_theta: kernel order must be >= 2");
    if (!(gamma > 0.0)) throw DomainError("radius_theta: gamma must be positive");
    if (!(sum_lambda_sq > 0.0)) throw DomainError("radius_theta: sum of lambda^2 must be positive");
    return m_order * (m_order - 1) * std::sqrt(2.0 * gamma) * sum_lambda_sq;
}

double corollary_radius(KernelId id, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("corollary_radius: gamma must be positive");
    const double root = std::sqrt(2.0 * gamma);
    switch (id) {
    case KernelId::HoeffdingD: return 2.0 * root / 3.0;
    case KernelId::BkrR: return 2.0 * root;
    case KernelId::BdyTauStar: return 6.0 * root / 5.0;
    }
    return 0.0;
}

double g_closed(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
        throw DomainError("g_closed: arguments must lie in [0,1]");
    return std::sqrt(3.0) / 6.0 * (3.0 * x * x + 3.0 * y * y - 6.0 * std::max(x, y) + 2.0);
}

double HoeffdingEigenSystem::sum_lambda() noexcept { return std::sqrt(3.0) / 6.0; }

double HoeffdingEigenSystem::lambda(int r) noexcept {
    const double rr = static_cast<double>(r);
    return std::sqrt(3.0) / (std::numbers::pi * std::numbers::pi * rr * rr);
}

double HoeffdingEigenSystem::psi(int r, double x) noexcept {
    return std::numbers::sqrt2 * std::cos(std::numbers::pi * r * x);
}

double HoeffdingEigenSystem::sum_lambda_sq(int T) noexcept {
    CompensatedSum sum;
    for (int r = T; r >= 1; --r) {
        const double l = lambda(r);
        sum.add(l * l);
    }
    return sum.value();
}

double HoeffdingEigenSystem::sum_lambda_sq_tail_bound(int T) noexcept {
    const double t = static_cast<double>(T);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 1.0 / (pi2 * pi2 * t * t * t);
}

double HoeffdingEigenSystem::g_series(double x, double y, int T) noexcept {
    CompensatedSum sum;
    for (int r = T; r >= 1; --r) sum.add(lambda(r) * psi(r, x) * psi(r, y));
    return sum.value();
}

} // namespace rankspectra
