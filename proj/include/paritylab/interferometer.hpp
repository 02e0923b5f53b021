#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "paritylab/errors.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/math.hpp"
#include "paritylab/rotations.hpp"

namespace paritylab {

enum class SequenceKind { MZI, Ramsey, MagicNoon };

// U2 exp(-i s phi Jz) U1, where U1 is a rotation or, for MagicNoon, the |N,0> -> N00N map.
struct SequenceSpec {
    SequenceKind kind = SequenceKind::MZI;
    RotationSpec first{Axis::X, +kPi / 2};
    int phase_sign = +1;
    RotationSpec second{Axis::X, -kPi / 2};
    double noon_phase = 0.0;
    std::string label = "mzi";

    // exp(i pi/2 Jx) exp(-i phi Jz) exp(-i pi/2 Jx) = exp(-i phi Jy)
    static SequenceSpec mzi() { return {}; }

    // exp(-i pi/2 Jy) twice around the free evolution.
    static SequenceSpec ramsey() {
        return {SequenceKind::Ramsey, {Axis::Y, +kPi / 2}, +1, {Axis::Y, +kPi / 2}, 0.0, "ramsey"};
    }

    // Ramsey for an input that already is the post-pulse state.
    static SequenceSpec ramsey_prepared() {
        return {SequenceKind::Ramsey, {Axis::Y, 0.0}, +1, {Axis::Y, +kPi / 2}, 0.0, "ramsey-prepared"};
    }

    // Jy-type first splitter with the Jx-type second splitter.
    static SequenceSpec mzi_jy_first() {
        return {SequenceKind::MZI, {Axis::Y, -kPi / 2}, +1, {Axis::X, +kPi / 2}, 0.0, "mzi-jy"};
    }

    // |N,0> -> (|N,0> + e^{i Phi}|0,N>)/sqrt(2), phase, then exp(i pi/2 Jx).
    static SequenceSpec magic_noon(double relative_phase) {
        return {SequenceKind::MagicNoon, {Axis::Z, 0.0}, +1, {Axis::X, -kPi / 2}, relative_phase, "magic-noon"};
    }
};

// phi = (omega0 - omega) T
struct RamseyConfig {
    double omega0 = 0.0;
    double omega = 0.0;
    double duration = 0.0;
    double phi() const { return (omega0 - omega) * duration; }
};

namespace detail {

inline AngularState noon_preparation(const AngularState& in, double relative_phase) {
    return in.transformed([&](Spin spin, const AngularState::Sector& v) {
        const int top = spin.dim() - 1;
        for (int k = 0; k < top; ++k)
            if (std::norm(v[k]) > 1e-24)
                throw DomainError("N00N preparation expects only |N,0> components on input");
        AngularState::Sector out(spin.dim());
        if (top == 0) {
            out[0] = v[0];
            return out;
        }
        out[top] = v[top] / std::sqrt(2.0);
        out[0] = v[top] * std::polar(1.0 / std::sqrt(2.0), relative_phase);
        return out;
    });
}

}  // namespace detail

// State after the first element.
inline AngularState prepare(const AngularState& in, const SequenceSpec& seq) {
    if (seq.kind == SequenceKind::MagicNoon) return detail::noon_preparation(in, seq.noon_phase);
    return rotate(in, seq.first);
}

// Pieces of one run: the state just before the second element, and the output.
struct SequenceRun {
    AngularState encoded;
    AngularState output;
};

inline SequenceRun run_detailed(const AngularState& prepared, const SequenceSpec& seq, double phi) {
    auto encoded = rotate(prepared, {Axis::Z, seq.phase_sign * phi});
    auto output = rotate(encoded, seq.second);
    return {std::move(encoded), std::move(output)};
}

inline AngularState run_sequence(const AngularState& in, const SequenceSpec& seq, double phi) {
    return run_detailed(prepare(in, seq), seq, phi).output;
}

inline TwoModeState run_sequence(const TwoModeState& in, const SequenceSpec& seq, double phi) {
    const int top = in.n_max_a() + in.n_max_b();
    return from_angular(run_sequence(to_angular(in), seq, phi), top, top);
}

// d|out>/dphi = U2 (-i s Jz) exp(-i s phi Jz) U1 |in>.
inline AngularState output_derivative(const SequenceRun& run, const SequenceSpec& seq) {
    const auto jz_image = apply_operator(run.encoded, Observable::of(ObservableKind::Jz));
    const Complex factor = -kI * static_cast<double>(seq.phase_sign);
    auto scaled = jz_image.transformed([&](Spin, const AngularState::Sector& v) {
        AngularState::Sector out(v);
        for (auto& c : out) c *= factor;
        return out;
    });
    return rotate(scaled, seq.second);
}

// Gamma_{j,m'}(phi) = sum_m C_{j+m} C'_{j-m} d^j_{m',m}(phi): the MZI output assembled from explicit d blocks.
inline AngularState gamma_coefficients(const AngularState& in, double phi) {
    return in.transformed([&](Spin spin, const AngularState::Sector& v) {
        const auto block = wigner_d_block(spin, phi);
        AngularState::Sector out(spin.dim());
        for (int r = 0; r < spin.dim(); ++r)
            for (int c = 0; c < spin.dim(); ++c) out[r] += block.entries(r, c) * v[c];
        return out;
    });
}

struct SignalPoint {
    double phi = 0.0;
    double expectation = 0.0;
    double variance = 0.0;
    double derivative = 0.0;
    double delta_phi = std::numeric_limits<double>::infinity();
    bool singular = true;
};

inline constexpr double kSingularSlope = 1e-14;
// Variance below this (relative to <O^2>) marks an observable eigenstate; its slope is rounding noise.
inline constexpr double kPinnedVariance = 1e-20;

namespace detail {

// 2 Re <out| O |d out>, the slope of <O> along the phase.
inline double slope(const AngularState& out, const AngularState& dout, const Observable& op) {
    CompensatedSum<double> s;
    for (const auto& [spin, v] : out.sectors()) {
        const auto& dv = dout.sector(spin);
        const auto image = apply_in_sector(spin, v, op);
        for (int k = 0; k < spin.dim(); ++k) s.add(2.0 * (std::conj(image[k]) * dv[k]).real());
    }
    return s.value();
}

inline SignalPoint finish_point(double phi, double expectation, double variance, double derivative) {
    SignalPoint p{phi, expectation, std::max(variance, 0.0), derivative};
    // |d<O>/dphi| <= 2 dO dJ, so a pinned observable has no slope.
    const bool pinned = p.variance <= kPinnedVariance * (p.variance + expectation * expectation);
    p.singular = std::abs(derivative) < kSingularSlope || pinned;
    p.delta_phi = p.singular ? std::numeric_limits<double>::infinity() : std::sqrt(p.variance) / std::abs(derivative);
    return p;
}

}  // namespace detail

// Signal from an already prepared state; lets sweeps reuse the first element.
inline SignalPoint signal_prepared(const AngularState& prepared, const SequenceSpec& seq, const Observable& op,
                                   double phi) {
    const auto run = run_detailed(prepared, seq, phi);
    const auto dout = output_derivative(run, seq);
    const double mean = expectation(run.output, op);
    const double var = variance(run.output, op);
    return detail::finish_point(phi, mean, var, detail::slope(run.output, dout, op));
}

inline SignalPoint signal(const AngularState& in, const SequenceSpec& seq, const Observable& op, double phi) {
    return signal_prepared(prepare(in, seq), seq, op, phi);
}

inline SignalPoint signal(const TwoModeState& in, const SequenceSpec& seq, const Observable& op, double phi) {
    return signal(to_angular(in), seq, op, phi);
}

inline constexpr double kDefaultDifferenceStep = 1e-5;

// Central difference of <O>, Richardson-extrapolated once.
inline double expectation_slope_fd(const AngularState& in, const SequenceSpec& seq, const Observable& op, double phi,
                                   double step = kDefaultDifferenceStep) {
    const auto prepared = prepare(in, seq);
    auto value = [&](double p) { return expectation(run_detailed(prepared, seq, p).output, op); };
    auto central = [&](double h) { return (value(phi + h) - value(phi - h)) / (2.0 * h); };
    return (4.0 * central(0.5 * step) - central(step)) / 3.0;
}

inline SignalPoint signal_fd(const AngularState& in, const SequenceSpec& seq, const Observable& op, double phi,
                             double step = kDefaultDifferenceStep) {
    const auto out = run_sequence(in, seq, phi);
    return detail::finish_point(phi, expectation(out, op), variance(out, op),
                                expectation_slope_fd(in, seq, op, phi, step));
}

// Error-propagation phase uncertainty; a vanishing slope is an error here, unlike in signal().
template <typename State>
double phase_uncertainty(const State& in, const SequenceSpec& seq, const Observable& op, double phi) {
    const auto p = signal(in, seq, op, phi);
    if (p.singular) throw DerivativeSingularity("signal slope vanishes at phi=" + std::to_string(phi));
    return p.delta_phi;
}

inline std::vector<double> phase_grid(double lo, double hi, int steps) {
    if (steps < 2) throw DomainError("phase grid needs at least 2 steps");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("phase grid bounds must be finite");
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i) grid[i] = lo + (hi - lo) * i / (steps - 1);
    return grid;
}

}  // namespace paritylab
