#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "paritylab/errors.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/math.hpp"
#include "paritylab/rotations.hpp"
#include "paritylab/states.hpp"

namespace paritylab {

// Atomic parity is (-1)^{j+m}, the excitation count.
struct ParityProjectors {
    Spin spin;
    std::vector<double> even;
    std::vector<double> odd;
};

inline ParityProjectors parity_projectors(Spin spin) {
    ParityProjectors p{spin, std::vector<double>(spin.dim()), std::vector<double>(spin.dim())};
    for (int k = 0; k < spin.dim(); ++k) (k % 2 == 0 ? p.even : p.odd)[k] = 1.0;
    return p;
}

enum class ParityBranch { Even, Odd };

// <P_even>, <P_odd> of a normalized copy of the target.
inline ParityWeights excitation_parity_weights(const AngularState& target) {
    return parity_weights(target, Observable::of(ObservableKind::ParityAtomicExcited));
}

// P_branch |psi> / |P_branch |psi>|
inline AngularState project(const AngularState& target, ParityBranch branch) {
    const int keep = branch == ParityBranch::Even ? 0 : 1;
    auto out = target.transformed([&](Spin spin, const AngularState::Sector& v) {
        AngularState::Sector w(v);
        for (int k = 0; k < spin.dim(); ++k)
            if (k % 2 != keep) w[k] = 0.0;
        return w;
    });
    if (out.norm_squared() < 1e-28) throw DegenerateState("target has no weight in the requested parity sector");
    return out.normalized();
}

// Weight of the target outside the given parity sector, relative to its norm.
inline double opposite_parity_residual(const AngularState& state, ParityBranch branch) {
    const auto w = excitation_parity_weights(state);
    return branch == ParityBranch::Even ? w.odd : w.even;
}

struct ProtocolOutcome {
    std::string label;
    int parity = 0;  // +1 even, -1 odd, 0 when the outcome does not fix the parity
    double probability = 0.0;
    std::optional<AngularState> post_state;  // empty when the branch is impossible
    long long shots_observed = 0;
};

namespace detail {

inline constexpr double kImpossibleBranch = 1e-14;

inline ProtocolOutcome make_outcome(std::string label, int parity, const AngularState::Sector& unnormalized,
                                    Spin spin) {
    ProtocolOutcome o;
    o.label = std::move(label);
    o.parity = parity;
    double p = 0.0;
    for (const auto& c : unnormalized) p += std::norm(c);
    o.probability = p;
    if (p >= kImpossibleBranch) o.post_state = AngularState::single(spin, unnormalized).normalized();
    return o;
}

}  // namespace detail

struct AtomicProtocolResult {
    Eigen::MatrixXcd joint;    // rows k_a, columns k_b, after the coupling
    Eigen::MatrixXcd readout;  // after the ancilla pi/2 pulse
    bool projective = false;
    std::vector<ProtocolOutcome> outcomes;
};

// Ancilla ACS(tau) on j_b couples through exp(-i chi_t (j_a + m_a) J_z^b); the ancilla is then read out after
// exp(i pi/2 J_y). At chi_t = pi, tau = -1 the outcome m_b = -j_b flags even and m_b = +j_b flags odd.
inline AtomicProtocolResult atomic_ancilla_protocol(const AngularState& target, Spin ancilla, Complex tau,
                                                    double chi_t) {
    const auto [spin_a, sector] = target.only_sector();
    const auto& c = *sector;
    const double nrm = std::sqrt(target.norm_squared());
    if (nrm == 0.0) throw DegenerateState("target state has zero norm");
    const int da = spin_a.dim();
    const int db = ancilla.dim();
    const Eigen::MatrixXcd pulse = rotation_matrix(ancilla, {Axis::Y, -kPi / 2});

    AtomicProtocolResult r;
    r.joint.resize(da, db);
    for (int ka = 0; ka < da; ++ka) {
        const auto acs = atomic_coherent(tau * std::polar(1.0, -chi_t * ka), ancilla);
        const auto& amps = acs.sector(ancilla);
        for (int kb = 0; kb < db; ++kb) r.joint(ka, kb) = c[ka] / nrm * amps[kb];
    }
    r.readout = r.joint * pulse.transpose();

    r.projective = std::abs(std::remainder(chi_t - kPi, 2.0 * kPi)) < 1e-12 && std::abs(tau + 1.0) < 1e-12;
    for (int kb = 0; kb < db; ++kb) {
        AngularState::Sector column(da);
        for (int ka = 0; ka < da; ++ka) column[ka] = r.readout(ka, kb);
        const double m = ancilla.m_of(kb);
        int parity = 0;
        std::string label = "m_b=" + std::to_string(m);
        if (r.projective && kb == 0) parity = +1, label = "even";
        if (r.projective && kb == db - 1) parity = -1, label = "odd";
        auto o = detail::make_outcome(label, parity, column, spin_a);
        if (r.projective && parity == 0) {
            if (o.probability > 1e-12)
                throw ContractViolation("projective readout leaked " + std::to_string(o.probability) +
                                        " onto an interior ancilla level");
            continue;
        }
        if (!r.projective && o.probability < detail::kImpossibleBranch) continue;
        r.outcomes.push_back(std::move(o));
    }
    return r;
}

// Field in the ancilla mode for each target level after exp(-i chi_t n_b J_z): alpha e^{-i chi_t m}.
inline std::vector<Complex> coupled_fields(Spin spin, Complex alpha, double chi_t) {
    std::vector<Complex> out(spin.dim());
    for (int k = 0; k < spin.dim(); ++k) out[k] = alpha * std::polar(1.0, -chi_t * spin.m_of(k));
    return out;
}

// Reference field fed into the second splitter: alpha for even N, i alpha for odd N.
inline Complex reference_field(Spin spin, Complex alpha) { return spin.twice() % 2 == 0 ? alpha : kI * alpha; }

// |x>_b |ref>_c -> |(x + ref)/sqrt2>_b |(ref - x)/sqrt2>_c
inline std::pair<Complex, Complex> recombine(Complex x, Complex ref) {
    return beamsplit_coherent(x, ref, SplitterType::Jy, -kPi / 2);
}

struct FieldProtocolResult {
    std::vector<Complex> fields;  // per target level, after coupling
    Complex reference;
    std::vector<ProtocolOutcome> outcomes;  // "b" and "c", probabilities conditioned on a click
    double no_click_probability = 0.0;
    double distinguishability = 0.0;
    long long no_click_shots = 0;
};

// Coupling at chi_t = pi sends even and odd levels to opposite fields; recombination with the reference
// routes one branch to port b and the other to port c. Which parity lands where depends on N mod 4.
inline FieldProtocolResult field_ancilla_protocol(const AngularState& target, Complex alpha, double chi_t = kPi) {
    const auto [spin, sector] = target.only_sector();
    if (std::abs(std::remainder(chi_t - kPi, 2.0 * kPi)) > 1e-12)
        throw DomainError("field-ancilla readout is defined for chi_t = pi only");
    if (std::abs(alpha) == 0.0) throw DomainError("ancilla field amplitude must be nonzero");
    const auto& c = *sector;
    const double nrm = std::sqrt(target.norm_squared());
    if (nrm == 0.0) throw DegenerateState("target state has zero norm");

    FieldProtocolResult r;
    r.fields = coupled_fields(spin, alpha, chi_t);
    r.reference = reference_field(spin, alpha);
    const double a2 = std::norm(alpha);
    r.no_click_probability = std::exp(-2.0 * a2);
    r.distinguishability = -std::expm1(-2.0 * a2);

    // Even levels share one field, odd levels the other.
    const Complex even_field = r.fields[0];
    const bool even_to_b = std::abs(recombine(even_field, r.reference).second) < 1e-9 * std::abs(alpha);
    const bool even_to_c = std::abs(recombine(even_field, r.reference).first) < 1e-9 * std::abs(alpha);
    if (!even_to_b && !even_to_c) throw ContractViolation("recombined branches do not separate");

    AngularState::Sector port_b(spin.dim()), port_c(spin.dim());
    for (int k = 0; k < spin.dim(); ++k) {
        const bool even = k % 2 == 0;
        (even == even_to_b ? port_b : port_c)[k] = c[k] / nrm;
    }
    const int parity_b = even_to_b ? +1 : -1;
    r.outcomes.push_back(detail::make_outcome("b", parity_b, port_b, spin));
    r.outcomes.push_back(detail::make_outcome("c", -parity_b, port_c, spin));
    return r;
}

// Seeded multinomial draws over outcome probabilities (renormalized). Returns the counts in outcome order.
inline std::vector<long long> sample_counts(const std::vector<double>& probabilities, long long shots,
                                            std::uint64_t seed) {
    if (shots < 0) throw DomainError("shot count must be nonnegative");
    std::vector<long long> counts(probabilities.size());
    if (shots == 0 || probabilities.empty()) return counts;
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(probabilities.begin(), probabilities.end());
    for (long long s = 0; s < shots; ++s) ++counts[pick(rng)];
    return counts;
}

inline void sample(AtomicProtocolResult& r, long long shots, std::uint64_t seed) {
    std::vector<double> p;
    for (const auto& o : r.outcomes) p.push_back(o.probability);
    const auto counts = sample_counts(p, shots, seed);
    for (std::size_t i = 0; i < counts.size(); ++i) r.outcomes[i].shots_observed = counts[i];
}

// Shots without any click are counted apart and carry no parity information.
inline void sample(FieldProtocolResult& r, long long shots, std::uint64_t seed) {
    const double click = r.distinguishability;
    std::vector<double> p;
    for (const auto& o : r.outcomes) p.push_back(o.probability * click);
    p.push_back(r.no_click_probability);
    const auto counts = sample_counts(p, shots, seed);
    for (std::size_t i = 0; i < r.outcomes.size(); ++i) r.outcomes[i].shots_observed = counts[i];
    r.no_click_shots = counts.back();
}

}  // namespace paritylab
