#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "paritylab/errors.hpp"

namespace paritylab {

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

// Angular momentum label stored as 2j so half-integers stay exact.
class Spin {
public:
    constexpr Spin() = default;
    constexpr explicit Spin(int twice_j) : twice_(twice_j) {
        if (twice_j < 0) throw DomainError("spin label 2j must be nonnegative");
    }
    static Spin from_value(double j) {
        const double twice = 2.0 * j;
        const double rounded = std::round(twice);
        if (std::abs(twice - rounded) > 1e-12 || rounded < 0)
            throw DomainError("j must be a nonnegative half-integer, got " + std::to_string(j));
        return Spin(static_cast<int>(rounded));
    }
    static Spin from_atoms(int n_atoms) { return Spin(n_atoms); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr int dim() const { return twice_ + 1; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    // Position k = j + m in {0, ..., 2j}; also the excited-atom count (a-mode photons).
    constexpr double m_of(int k) const { return 0.5 * (2 * k - twice_); }
    int index_of(double m) const {
        const double k = m + value();
        const double rounded = std::round(k);
        if (std::abs(k - rounded) > 1e-12 || rounded < 0 || rounded > twice_)
            throw IndexError("m=" + std::to_string(m) + " not valid for j=" + std::to_string(value()));
        return static_cast<int>(rounded);
    }

    friend constexpr bool operator==(Spin, Spin) = default;
    friend constexpr auto operator<=>(Spin, Spin) = default;

private:
    int twice_ = 0;
};

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

inline double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -INFINITY;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(log_binomial(n, k));
}

inline double sqrt_binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(0.5 * log_binomial(n, k));
}

inline constexpr double sign_power(long long exponent) { return (exponent % 2 == 0) ? 1.0 : -1.0; }

// P_n(x) by the three-term upward recurrence.
inline double legendre(int n, double x) {
    if (n < 0) throw DomainError("Legendre degree must be nonnegative");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double bessel_i0(double x) { return std::cyl_bessel_i(0.0, x); }

// Neumaier-compensated accumulator.
template <typename T>
class CompensatedSum {
public:
    void add(T value) {
        const T t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

}  // namespace paritylab
