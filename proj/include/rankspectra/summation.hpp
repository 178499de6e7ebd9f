#pragma once

#include <cmath>
#include <complex>

namespace rankspectra {

// Neumaier-compensated accumulator. Reductions built on it agree across
// partitionings to well within 1e-13 relative.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    void merge(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexCompensatedSum {
public:
    void add(std::complex<double> z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

/// Running mean and standard error of i.i.d. Monte Carlo draws.
class MeanAccumulator {
public:
    void add(double x) noexcept {
        ++count_;
        sum_.add(x);
        sum_sq_.add(x * x);
    }
    long long count() const noexcept { return count_; }
    double mean() const noexcept { return count_ ? sum_.value() / count_ : 0.0; }
    double variance() const noexcept {
        if (count_ < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq_.value() - count_ * m * m) / (count_ - 1);
        return v > 0.0 ? v : 0.0;
    }
    double standard_error() const noexcept {
        return count_ ? std::sqrt(variance() / count_) : 0.0;
    }

private:
    long long count_ = 0;
    CompensatedSum sum_;
    CompensatedSum sum_sq_;
};

} // namespace rankspectra
