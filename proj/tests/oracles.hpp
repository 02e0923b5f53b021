#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "paritylab/paritylab.hpp"

namespace oracle {

using paritylab::Complex;
using paritylab::Spin;
using Float50 = boost::multiprecision::cpp_bin_float_50;

inline Float50 factorial50(int n) {
    Float50 f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Explicit Wigner sum in 50-digit arithmetic.
inline double wigner_d_series(Spin spin, double m_prime, double m, double beta) {
    const int tj = spin.twice();
    const int jpm = static_cast<int>(std::lround(0.5 * tj + m));
    const int jmm = tj - jpm;
    const int jpmp = static_cast<int>(std::lround(0.5 * tj + m_prime));
    const int jmmp = tj - jpmp;
    const int diff = jpmp - jpm;  // m' - m
    const Float50 half = Float50(beta) / 2;
    const Float50 c = cos(half);
    const Float50 s = sin(half);
    const Float50 pref = sqrt(factorial50(jpmp) * factorial50(jmmp) * factorial50(jpm) * factorial50(jmm));
    Float50 sum = 0;
    for (int k = 0; k <= tj; ++k) {
        if (jpm - k < 0 || diff + k < 0 || jmmp - k < 0) continue;
        const Float50 den = factorial50(jpm - k) * factorial50(k) * factorial50(diff + k) * factorial50(jmmp - k);
        const int pc = tj + jpm - jpmp - 2 * k;  // 2j + m - m' - 2k
        const int ps = diff + 2 * k;
        Float50 term = pref / den * pow(c, pc) * pow(s, ps);
        if ((diff + k) % 2 != 0) term = -term;
        sum += term;
    }
    return static_cast<double>(sum);
}

// Angular momentum matrices built from the textbook ladder elements, indexed k = j + m.
inline Eigen::MatrixXcd j_plus(Spin spin) {
    const int d = spin.dim();
    const double j = spin.value();
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) {
        const double m = spin.m_of(k);
        p(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    return p;
}

inline Eigen::MatrixXcd jx(Spin s) {
    const auto p = j_plus(s);
    return 0.5 * (p + p.adjoint());
}

inline Eigen::MatrixXcd jy(Spin s) {
    const auto p = j_plus(s);
    return Complex(0, -0.5) * (p - p.adjoint());
}

inline Eigen::MatrixXcd jz(Spin s) {
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
    for (int k = 0; k < s.dim(); ++k) z(k, k) = s.m_of(k);
    return z;
}

inline Eigen::MatrixXcd expm_rotation(const Eigen::MatrixXcd& generator, double angle) {
    const Eigen::MatrixXcd g = Complex(0, -angle) * generator;
    return g.exp();
}

inline Eigen::VectorXcd to_vector(const std::vector<Complex>& v) {
    return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<Complex> random_amplitudes(int dim, std::mt19937_64& rng, bool real_only = false) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(dim);
    double n = 0.0;
    for (auto& c : v) {
        c = Complex(g(rng), real_only ? 0.0 : g(rng));
        n += std::norm(c);
    }
    for (auto& c : v) c /= std::sqrt(n);
    return v;
}

inline paritylab::AngularState random_sector_state(Spin spin, std::mt19937_64& rng, bool real_only = false) {
    return paritylab::AngularState::single(spin, random_amplitudes(spin.dim(), rng, real_only));
}

// Poisson weight e^{-x} x^n / n!
inline double poisson(double x, int n) {
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-x + n * std::log(x) - std::lgamma(n + 1.0));
}

}  // namespace oracle
