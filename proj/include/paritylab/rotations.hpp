#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "paritylab/errors.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/math.hpp"

namespace paritylab {

enum class Axis { X, Y, Z };

struct RotationSpec {
    Axis axis = Axis::Y;
    double angle = 0.0;  // applies exp(-i angle J_axis)
};

// Eigen-decomposition Jx = W diag(m) W^T of one j sector. Column k of W has eigenvalue m = k - j.
struct JxEigenbasis {
    Spin spin;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

namespace detail {

inline JxEigenbasis compute_jx_eigenbasis(Spin spin) {
    const int d = spin.dim();
    JxEigenbasis out{spin, Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
    if (d == 1) return out;
    std::vector<double> diag(d, 0.0);
    std::vector<double> off(d, 0.0);
    for (int k = 0; k + 1 < d; ++k) off[k] = 0.5 * raise_coefficient(spin, k);
    std::vector<double> w(d);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(d));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', d, diag.data(), off.data(), 0.0, 0.0, 0, 0, 0.0, &found, w.data(),
                       out.vectors.data(), d, support.data());
    if (info != 0 || found != d)
        throw ContractViolation("tridiagonal eigensolver failed for 2j=" + std::to_string(spin.twice()));
    for (int k = 0; k < d; ++k) {
        const double exact = spin.m_of(k);
        if (std::abs(w[k] - exact) > 1e-9)
            throw ContractViolation("Jx spectrum deviates from integer-spaced ladder at 2j=" +
                                    std::to_string(spin.twice()));
        out.values(k) = exact;
    }
    return out;
}

class EigenbasisCache {
public:
    std::shared_ptr<const JxEigenbasis> get(Spin spin) {
        {
            std::shared_lock lock(mutex_);
            const auto it = entries_.find(spin.twice());
            if (it != entries_.end()) return it->second;
        }
        auto fresh = std::make_shared<const JxEigenbasis>(compute_jx_eigenbasis(spin));
        std::unique_lock lock(mutex_);
        return entries_.try_emplace(spin.twice(), std::move(fresh)).first->second;
    }

private:
    std::shared_mutex mutex_;
    std::map<int, std::shared_ptr<const JxEigenbasis>> entries_;
};

inline EigenbasisCache& eigenbasis_cache() {
    static EigenbasisCache cache;
    return cache;
}

// Phase e^{-i pi m / 2} relating Jy = R Jx R^dagger with R = exp(-i pi/2 Jz).
inline Complex quarter_turn_phase(double m) { return std::polar(1.0, -0.5 * kPi * m); }

}  // namespace detail

inline std::shared_ptr<const JxEigenbasis> jx_eigenbasis(Spin spin) { return detail::eigenbasis_cache().get(spin); }

// Full (2j+1)x(2j+1) matrix of d^j_{m',m}(beta) = <j,m'| exp(-i beta Jy) |j,m>, indexed by k = j + m.
struct WignerDBlock {
    Spin spin;
    double beta = 0.0;
    Eigen::MatrixXd entries;

    double at(double m_prime, double m) const { return entries(spin.index_of(m_prime), spin.index_of(m)); }
};

inline WignerDBlock wigner_d_block(Spin spin, double beta) {
    const auto basis = jx_eigenbasis(spin);
    const int d = spin.dim();
    Eigen::MatrixXd cos_part = basis->vectors * (beta * basis->values).array().cos().matrix().asDiagonal() *
                               basis->vectors.transpose();
    Eigen::MatrixXd sin_part = basis->vectors * (beta * basis->values).array().sin().matrix().asDiagonal() *
                               basis->vectors.transpose();
    // Element of exp(-i beta Jx) is cos_part - i sin_part; the quarter-turn phases i^{-(m'-m)} pick the real part.
    Eigen::MatrixXd out(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            const Complex x_elem(cos_part(r, c), -sin_part(r, c));
            const Complex phase = std::polar(1.0, -0.5 * kPi * (r - c));
            out(r, c) = (phase * x_elem).real();
        }
    }
    if (beta == 0.0) out.setIdentity();
    return {spin, beta, std::move(out)};
}

inline double wigner_d(Spin spin, double m_prime, double m, double beta) {
    const int r = spin.index_of(m_prime);
    const int c = spin.index_of(m);
    if (beta == 0.0) return r == c ? 1.0 : 0.0;
    const auto basis = jx_eigenbasis(spin);
    CompensatedSum<Complex> s;
    for (int k = 0; k < spin.dim(); ++k)
        s.add(basis->vectors(r, k) * basis->vectors(c, k) * std::polar(1.0, -beta * basis->values(k)));
    return (std::polar(1.0, -0.5 * kPi * (r - c)) * s.value()).real();
}

// D^j_{m',m}(alpha, beta, gamma) = e^{-i(m' alpha + m gamma)} d^j_{m',m}(beta).
inline Complex big_d(Spin spin, double m_prime, double m, double alpha, double beta, double gamma) {
    return std::polar(1.0, -(m_prime * alpha + m * gamma)) * wigner_d(spin, m_prime, m, beta);
}

// Unitary matrix of exp(-i angle J_axis) on one sector.
inline Eigen::MatrixXcd rotation_matrix(Spin spin, RotationSpec spec) {
    const int d = spin.dim();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
    if (spec.axis == Axis::Z) {
        for (int k = 0; k < d; ++k) u(k, k) = std::polar(1.0, -spec.angle * spin.m_of(k));
        return u;
    }
    const auto basis = jx_eigenbasis(spin);
    Eigen::VectorXcd phases(d);
    for (int k = 0; k < d; ++k) phases(k) = std::polar(1.0, -spec.angle * basis->values(k));
    const Eigen::MatrixXcd w = basis->vectors.cast<Complex>();
    u = w * phases.asDiagonal() * w.transpose();
    if (spec.axis == Axis::Y) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                u(r, c) *= detail::quarter_turn_phase(spin.m_of(r)) * std::conj(detail::quarter_turn_phase(spin.m_of(c)));
    }
    return u;
}

namespace detail {

inline AngularState::Sector rotate_sector(Spin spin, const AngularState::Sector& v, RotationSpec spec) {
    const int d = spin.dim();
    AngularState::Sector out(v);
    if (spec.angle == 0.0) return out;
    if (spec.axis == Axis::Z) {
        for (int k = 0; k < d; ++k) out[k] *= std::polar(1.0, -spec.angle * spin.m_of(k));
        return out;
    }
    Eigen::VectorXcd psi = Eigen::Map<const Eigen::VectorXcd>(v.data(), d);
    if (spec.axis == Axis::Y)
        for (int k = 0; k < d; ++k) psi(k) *= std::conj(quarter_turn_phase(spin.m_of(k)));
    const auto basis = jx_eigenbasis(spin);
    const Eigen::MatrixXd& w = basis->vectors;
    Eigen::VectorXd re = w.transpose() * psi.real();
    Eigen::VectorXd im = w.transpose() * psi.imag();
    for (int k = 0; k < d; ++k) {
        const Complex c = Complex(re(k), im(k)) * std::polar(1.0, -spec.angle * basis->values(k));
        re(k) = c.real();
        im(k) = c.imag();
    }
    const Eigen::VectorXd back_re = w * re;
    const Eigen::VectorXd back_im = w * im;
    for (int k = 0; k < d; ++k) {
        out[k] = Complex(back_re(k), back_im(k));
        if (spec.axis == Axis::Y) out[k] *= quarter_turn_phase(spin.m_of(k));
    }
    return out;
}

}  // namespace detail

inline AngularState rotate(const AngularState& state, RotationSpec spec) {
    return state.transformed(
        [&](Spin spin, const AngularState::Sector& v) { return detail::rotate_sector(spin, v, spec); });
}

inline TwoModeState rotate(const TwoModeState& state, RotationSpec spec) {
    const int top = state.n_max_a() + state.n_max_b();
    return from_angular(rotate(to_angular(state), spec), top, top);
}

enum class SplitterType { Jx, Jy };

// Output amplitudes of |alpha>_a |beta>_b under exp(-i angle J_type); coherent states stay coherent.
inline std::pair<Complex, Complex> beamsplit_coherent(Complex alpha, Complex beta, SplitterType type, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    if (type == SplitterType::Jx) return {alpha * c - kI * beta * s, beta * c - kI * alpha * s};
    return {alpha * c - beta * s, beta * c + alpha * s};
}

}  // namespace paritylab
