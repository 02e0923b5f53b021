#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "paritylab/errors.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/math.hpp"

namespace paritylab {

inline constexpr int kHardPhotonCap = 20000;

namespace detail {

// Amplitudes c_0..c_K of an analytically normalized single-mode series. K starts at the cutoff rule
// for `mean` and grows until the discarded mass is below the threshold.
inline TwoModeState single_mode_series(const std::function<Complex(int)>& amplitude, double mean, int n_max,
                                       double tail_threshold = kTailThreshold) {
    const bool automatic = n_max < 0;
    int cutoff = automatic ? truncation_cutoff(mean) : n_max;
    std::vector<Complex> amps;
    CompensatedSum<double> kept;
    auto extend_to = [&](int k) {
        while (static_cast<int>(amps.size()) <= k) {
            amps.push_back(amplitude(static_cast<int>(amps.size())));
            kept.add(std::norm(amps.back()));
        }
    };
    extend_to(cutoff);
    auto tail = [&] { return std::max(0.0, 1.0 - kept.value()); };
    if (automatic) {
        while (tail() >= tail_threshold && cutoff < kHardPhotonCap) extend_to(++cutoff);
    }
    if (tail() >= tail_threshold)
        throw TruncationOverflow("single-mode tail mass " + std::to_string(tail()) + " exceeds threshold at n_max=" +
                                 std::to_string(cutoff));
    const double t = tail();
    const double scale = 1.0 / std::sqrt(kept.value());
    for (auto& c : amps) c *= scale;
    return TwoModeState(cutoff, 0, std::move(amps), t, tail_threshold);
}

inline Complex polar_log(double log_magnitude, double phase) {
    if (log_magnitude == -INFINITY) return {};
    return std::polar(std::exp(log_magnitude), phase);
}

// e^{-|a|^2/2} a^n / sqrt(n!)
inline Complex coherent_amplitude(Complex alpha, int n) {
    const double r = std::abs(alpha);
    if (r == 0.0) return n == 0 ? Complex(1.0) : Complex{};
    return polar_log(-0.5 * r * r + n * std::log(r) - 0.5 * log_factorial(n), n * std::arg(alpha));
}

}  // namespace detail

inline TwoModeState vacuum() { return TwoModeState::vacuum(); }

// |n>_a |q>_b
inline TwoModeState fock_pair(int n, int q) {
    if (n < 0 || q < 0) throw DomainError("photon numbers must be nonnegative");
    std::vector<Complex> amps(static_cast<std::size_t>(n + 1) * (q + 1));
    amps.back() = 1.0;
    return TwoModeState(n, q, std::move(amps));
}

// Single-mode number state |n>.
inline TwoModeState fock(int n) { return fock_pair(n, 0); }

inline TwoModeState coherent(Complex alpha, int n_max = -1) {
    return detail::single_mode_series([alpha](int n) { return detail::coherent_amplitude(alpha, n); },
                                      std::norm(alpha), n_max);
}

inline TwoModeState squeezed_vacuum(double r, int n_max = -1) {
    if (!(r >= 0.0)) throw DomainError("squeeze parameter must be nonnegative");
    if (r == 0.0) return vacuum();
    const double log_t = std::log(std::tanh(r));
    const double log_c = std::log(std::cosh(r));
    auto amp = [=](int n) -> Complex {
        if (n % 2 != 0) return {};
        const int h = n / 2;
        const double log_sq = log_factorial(n) - n * std::log(2.0) - 2.0 * log_factorial(h) + n * log_t - log_c;
        return sign_power(h) * std::exp(0.5 * log_sq);
    };
    const double s = std::sinh(r);
    return detail::single_mode_series(amp, s * s, n_max);
}

// Cat state N(|gamma> + e^{i theta}|-gamma>).
inline TwoModeState cat(Complex gamma, double theta, int n_max = -1) {
    const double norm_sq = 2.0 * (1.0 + std::exp(-2.0 * std::norm(gamma)) * std::cos(theta));
    if (norm_sq < 1e-8) throw DegenerateState("cat superposition cancels (normalization below 1e-8)");
    const double scale = 1.0 / std::sqrt(norm_sq);
    const Complex rel = std::polar(1.0, theta);
    auto amp = [=](int n) { return scale * detail::coherent_amplitude(gamma, n) * (1.0 + rel * sign_power(n)); };
    return detail::single_mode_series(amp, std::norm(gamma), n_max);
}

// Product of two single-mode states: first argument fills mode a, second fills mode b.
inline TwoModeState product(const TwoModeState& mode_a, const TwoModeState& mode_b) {
    return TwoModeState::product(mode_a.mode_a_amplitudes(), mode_b.mode_a_amplitudes(),
                                 mode_a.tail_bound() + mode_b.tail_bound());
}

namespace detail {

inline TwoModeState diagonal_series(const std::function<Complex(int)>& amplitude, double mean_per_mode, int n_max,
                                    double tail_threshold = kTailThreshold) {
    const auto single = single_mode_series(amplitude, mean_per_mode, n_max, tail_threshold);
    const int k = single.n_max_a();
    std::vector<Complex> amps(static_cast<std::size_t>(k + 1) * (k + 1));
    for (int n = 0; n <= k; ++n) amps[static_cast<std::size_t>(n) * (k + 1) + n] = single.amp(n, 0);
    return TwoModeState(k, k, std::move(amps), single.tail_bound(), tail_threshold);
}

}  // namespace detail

// Two-mode squeezed vacuum: B_n = (1-|z|^2)^{1/2} z^n on |n,n>.
inline TwoModeState tmsvs(Complex z, int n_max = -1) {
    const double mod = std::abs(z);
    if (!(mod < 1.0)) throw DomainError("two-mode squeezing argument needs |z| < 1");
    if (mod == 0.0) return fock_pair(0, 0);
    const double log_pref = 0.5 * std::log1p(-mod * mod);
    auto amp = [=](int n) { return detail::polar_log(log_pref + n * std::log(mod), n * std::arg(z)); };
    return detail::diagonal_series(amp, mod * mod / (1.0 - mod * mod), n_max);
}

// Convenience z = e^{i phase} tanh r.
inline TwoModeState tmsvs_from_squeeze(double r, double phase = 0.0, int n_max = -1) {
    if (!(r >= 0.0)) throw DomainError("squeeze parameter must be nonnegative");
    return tmsvs(std::polar(std::tanh(r), phase), n_max);
}

// Pair coherent state: B_n = zeta^n / (n! sqrt(I0(2|zeta|))) on |n,n>.
inline TwoModeState pair_coherent(Complex zeta, int n_max = -1) {
    const double mod = std::abs(zeta);
    if (mod == 0.0) return fock_pair(0, 0);
    const double log_norm = -0.5 * std::log(bessel_i0(2.0 * mod));
    auto amp = [=](int n) {
        return detail::polar_log(log_norm + n * std::log(mod) - log_factorial(n), n * std::arg(zeta));
    };
    return detail::diagonal_series(amp, mod, n_max);
}

inline TwoModeState twin_fock(int n) { return fock_pair(n, n); }

// (|N,0> + e^{i Phi}|0,N>)/sqrt(2)
inline TwoModeState noon(int n, double relative_phase) {
    if (n < 1) throw DomainError("N00N state needs N >= 1");
    std::vector<Complex> amps(static_cast<std::size_t>(n + 1) * (n + 1));
    amps[static_cast<std::size_t>(n) * (n + 1)] = 1.0 / std::sqrt(2.0);
    amps[static_cast<std::size_t>(n)] = std::polar(1.0 / std::sqrt(2.0), relative_phase);
    return TwoModeState(n, n, std::move(amps));
}

// Dicke state |j, m>.
inline AngularState dicke(Spin spin, double m) {
    AngularState::Sector amps(spin.dim());
    amps[spin.index_of(m)] = 1.0;
    return AngularState::single(spin, std::move(amps));
}

// amp(m) = (1+|tau|^2)^{-j} C(2j, j+m)^{1/2} tau^{j+m}
inline AngularState atomic_coherent(Complex tau, Spin spin) {
    const double mod = std::abs(tau);
    const double j = spin.value();
    AngularState::Sector amps(spin.dim());
    for (int k = 0; k < spin.dim(); ++k) {
        if (mod == 0.0) {
            amps[k] = k == 0 ? Complex(1.0) : Complex{};
            continue;
        }
        const double log_mag = -j * std::log1p(mod * mod) + 0.5 * log_binomial(spin.twice(), k) + k * std::log(mod);
        amps[k] = detail::polar_log(log_mag, k * std::arg(tau));
    }
    return AngularState::single(spin, std::move(amps));
}

// ACS(tau=-1) acted on q times by Jz, renormalized.
inline AngularState jz_operated_acs(Spin spin, int q) {
    if (q < 1) throw DomainError("number of Jz applications must be >= 1");
    const auto acs = atomic_coherent(Complex(-1.0), spin);
    const auto& base = acs.sector(spin);
    AngularState::Sector amps(spin.dim());
    double norm_sq = 0.0;
    for (int k = 0; k < spin.dim(); ++k) {
        amps[k] = std::pow(spin.m_of(k), q) * base[k];
        norm_sq += std::norm(amps[k]);
    }
    if (norm_sq < 1e-28) throw DegenerateState("Jz^q image of the atomic coherent state vanishes");
    for (auto& c : amps) c /= std::sqrt(norm_sq);
    return AngularState::single(spin, std::move(amps));
}

// (|j,j> + |j,-j>)/sqrt(2)
inline AngularState maximally_entangled(Spin spin) {
    if (spin.twice() < 1) throw DomainError("maximally entangled state needs N >= 1");
    AngularState::Sector amps(spin.dim());
    amps.front() = 1.0 / std::sqrt(2.0);
    amps.back() = 1.0 / std::sqrt(2.0);
    return AngularState::single(spin, std::move(amps));
}

}  // namespace paritylab
