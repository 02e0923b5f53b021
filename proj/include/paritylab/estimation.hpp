#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "paritylab/errors.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/interferometer.hpp"
#include "paritylab/math.hpp"
#include "paritylab/parallel.hpp"

namespace paritylab {

// P(outcome | phi) for a finite outcome set, with an optional analytic derivative.
struct OutcomeDistribution {
    std::function<std::vector<double>(double)> probabilities;
    std::function<std::vector<double>(double)> derivatives;  // empty: finite differences
};

inline constexpr double kNegligibleProbability = 1e-15;

inline std::vector<double> probability_slopes_fd(const OutcomeDistribution& dist, double phi,
                                                 double step = kDefaultDifferenceStep) {
    auto central = [&](double h) {
        const auto up = dist.probabilities(phi + h);
        const auto down = dist.probabilities(phi - h);
        std::vector<double> d(up.size());
        for (std::size_t i = 0; i < up.size(); ++i) d[i] = (up[i] - down[i]) / (2.0 * h);
        return d;
    };
    const auto coarse = central(step);
    const auto fine = central(0.5 * step);
    std::vector<double> out(coarse.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

// F = sum (dP)^2 / P
inline double classical_fi(const OutcomeDistribution& dist, double phi, double sum_tolerance = 1e-10) {
    const auto p = dist.probabilities(phi);
    const auto dp = dist.derivatives ? dist.derivatives(phi) : probability_slopes_fd(dist, phi);
    if (p.size() != dp.size()) throw DomainError("probability and derivative lists differ in length");
    CompensatedSum<double> total, fisher;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < -1e-12) throw NotAState("negative outcome probability");
        total.add(p[i]);
        if (p[i] < kNegligibleProbability) {
            if (std::abs(dp[i]) > 1e-10)
                throw IllConditioned("outcome with vanishing probability has slope " + std::to_string(dp[i]));
            continue;
        }
        fisher.add(dp[i] * dp[i] / p[i]);
    }
    if (std::abs(total.value() - 1.0) > sum_tolerance)
        throw NotAState("outcome probabilities sum to " + std::to_string(total.value()));
    return fisher.value();
}

// Joint photon-number counting at the output; outcomes enumerate every retained (n, q).
inline OutcomeDistribution photon_counting(const AngularState& in, const SequenceSpec& seq) {
    auto prepared = std::make_shared<const AngularState>(prepare(in, seq));
    auto flatten = [](const AngularState& s) {
        std::vector<Complex> out;
        for (const auto& [spin, v] : s.sectors()) out.insert(out.end(), v.begin(), v.end());
        return out;
    };
    OutcomeDistribution dist;
    dist.probabilities = [=](double phi) {
        const auto amps = flatten(run_detailed(*prepared, seq, phi).output);
        std::vector<double> p(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) p[i] = std::norm(amps[i]);
        return p;
    };
    dist.derivatives = [=](double phi) {
        const auto run = run_detailed(*prepared, seq, phi);
        const auto amps = flatten(run.output);
        const auto damps = flatten(output_derivative(run, seq));
        std::vector<double> d(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) d[i] = 2.0 * (std::conj(amps[i]) * damps[i]).real();
        return d;
    };
    return dist;
}

// Two-outcome distribution of a parity observable at the output.
inline OutcomeDistribution parity_outcomes(const AngularState& in, const SequenceSpec& seq, const Observable& op) {
    if (!op.is_parity()) throw DomainError("parity_outcomes needs a parity observable");
    auto prepared = std::make_shared<const AngularState>(prepare(in, seq));
    OutcomeDistribution dist;
    dist.probabilities = [=](double phi) {
        const auto w = parity_weights(run_detailed(*prepared, seq, phi).output, op);
        return std::vector<double>{w.even, w.odd};
    };
    dist.derivatives = [=](double phi) {
        const double slope = signal_prepared(*prepared, seq, op, phi).derivative;
        return std::vector<double>{0.5 * slope, -0.5 * slope};
    };
    return dist;
}

inline constexpr double kSaturationMargin = 1e-12;

// Single-shot Fisher information of a +-1 observable: (d<Pi>)^2 / (1 - <Pi>^2).
inline double parity_fi(double parity_expectation, double parity_derivative) {
    if (std::abs(parity_expectation) >= 1.0 - kSaturationMargin)
        throw Saturated("parity expectation is pinned at +-1");
    return parity_derivative * parity_derivative / (1.0 - parity_expectation * parity_expectation);
}

// Same quantity from separately summed outcome weights, which keeps precision near |<Pi>| = 1.
inline double parity_fi(const ParityWeights& weights, double parity_derivative) {
    const double var = weights.variance();
    if (var <= 4.0 * kSaturationMargin * (1.0 - kSaturationMargin))
        throw Saturated("parity expectation is pinned at +-1");
    return parity_derivative * parity_derivative / var;
}

inline double parity_fi(const AngularState& in, const SequenceSpec& seq, const Observable& op, double phi) {
    const auto prepared = prepare(in, seq);
    const auto weights = parity_weights(run_detailed(prepared, seq, phi).output, op);
    return parity_fi(weights, signal_prepared(prepared, seq, op, phi).derivative);
}

// 4 Var(Jz) on the state entering the phase shift (4 Var(Jy) of the input for the MZI).
inline double qfi_pure(const AngularState& in, const SequenceSpec& seq) {
    return 4.0 * variance(prepare(in, seq), Observable::of(ObservableKind::Jz));
}

inline double qfi_pure(const TwoModeState& in, const SequenceSpec& seq) { return qfi_pure(to_angular(in), seq); }

// 4(<d psi|d psi> - |<psi|d psi>|^2) with |d psi> from Richardson-extrapolated central differences.
inline double qfi_pure_from_derivative(const AngularState& in, const SequenceSpec& seq, double phi,
                                       double step = kDefaultDifferenceStep) {
    const auto prepared = prepare(in, seq);
    auto out_at = [&](double p) { return run_detailed(prepared, seq, p).output; };
    const auto center = out_at(phi);
    auto diff = [&](double h) {
        const auto up = out_at(phi + h);
        const auto down = out_at(phi - h);
        std::map<Spin, AngularState::Sector> d;
        for (const auto& [spin, v] : up.sectors()) {
            const auto& w = down.sector(spin);
            AngularState::Sector s(v.size());
            for (std::size_t k = 0; k < v.size(); ++k) s[k] = (v[k] - w[k]) / (2.0 * h);
            d.emplace(spin, std::move(s));
        }
        return d;
    };
    const auto coarse = diff(step);
    const auto fine = diff(0.5 * step);
    CompensatedSum<double> norm_sq;
    CompensatedSum<Complex> overlap;
    for (const auto& [spin, v] : center.sectors()) {
        const auto& c = coarse.at(spin);
        const auto& f = fine.at(spin);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const Complex dpsi = (4.0 * f[k] - c[k]) / 3.0;
            norm_sq.add(std::norm(dpsi));
            overlap.add(std::conj(v[k]) * dpsi);
        }
    }
    return 4.0 * (norm_sq.value() - std::norm(overlap.value()));
}

// Variance path, verified against the derivative path to the given relative tolerance.
inline double qfi_pure_checked(const AngularState& in, const SequenceSpec& seq, double phi = 0.3,
                               double rel_tol = 1e-6) {
    const double by_variance = qfi_pure(in, seq);
    const double by_derivative = qfi_pure_from_derivative(in, seq, phi);
    const double scale = std::max(std::abs(by_variance), 1e-12);
    if (std::abs(by_variance - by_derivative) > rel_tol * scale)
        throw ContractViolation("QFI paths disagree: " + std::to_string(by_variance) + " vs " +
                                std::to_string(by_derivative));
    return by_variance;
}

inline constexpr double kMixedPairCutoff = 1e-12;

// F_Q = sum_{k,k'} 2 (p_k - p_k')^2 / (p_k + p_k') |<k|G|k'>|^2 for rho(phi) = e^{-i phi G} rho e^{i phi G}.
inline double qfi_mixed(const DensityState& rho, const Observable& generator) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
    if (es.info() != Eigen::Success) throw NotAState("density matrix eigendecomposition failed");
    const Eigen::VectorXd p = es.eigenvalues();
    if (p.minCoeff() < -1e-10) throw NotAState("density matrix has a negative eigenvalue");
    const Eigen::MatrixXcd g = es.eigenvectors().adjoint() * operator_matrix(rho.basis(), generator) * es.eigenvectors();
    CompensatedSum<double> f;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        for (Eigen::Index l = 0; l < p.size(); ++l) {
            const double pk = std::max(p(k), 0.0);
            const double pl = std::max(p(l), 0.0);
            if (pk + pl < kMixedPairCutoff) continue;
            const double diff = pk - pl;
            f.add(2.0 * diff * diff / (pk + pl) * std::norm(g(k, l)));
        }
    }
    return f.value();
}

// Reference scalings of the total photon number inside the interferometer.
struct PhotonLimits {
    double mean_total = 0.0;
    double second_moment = 0.0;
    double sql() const { return 1.0 / std::sqrt(mean_total); }
    double hl() const { return 1.0 / mean_total; }
    double hoffman() const { return 1.0 / std::sqrt(second_moment); }
};

inline PhotonLimits photon_limits(const AngularState& in) {
    CompensatedSum<double> mean, second;
    const double norm = in.norm_squared();
    for (const auto& [spin, v] : in.sectors()) {
        double w = 0.0;
        for (const auto& c : v) w += std::norm(c);
        mean.add(spin.twice() * w / norm);
        second.add(static_cast<double>(spin.twice()) * spin.twice() * w / norm);
    }
    return {mean.value(), second.value()};
}

struct EstimationReport {
    double phi = 0.0;
    double fisher = 0.0;
    double crb = std::numeric_limits<double>::infinity();
    double qfi = 0.0;
    double qcrb = std::numeric_limits<double>::infinity();
    double saturation_gap = 0.0;
    double sql = 0.0;
    double hl = 0.0;
    double hoffman = 0.0;
};

inline double bound_from_information(double information, long long shots = 1) {
    if (information <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(static_cast<double>(shots) * information);
}

// Fisher information of the observable at phi (parity: exact two-outcome FI; otherwise the
// error-propagation information slope^2 / variance), next to the QFI of the same input.
inline EstimationReport estimate(const AngularState& in, const SequenceSpec& seq, const Observable& op, double phi,
                                 long long shots = 1) {
    const auto prepared = prepare(in, seq);
    const auto point = signal_prepared(prepared, seq, op, phi);
    EstimationReport r;
    r.phi = phi;
    r.fisher = point.variance > 0.0 ? point.derivative * point.derivative / point.variance : 0.0;
    r.crb = bound_from_information(r.fisher, shots);
    r.qfi = 4.0 * variance(prepared, Observable::of(ObservableKind::Jz));
    r.qcrb = bound_from_information(r.qfi, shots);
    r.saturation_gap = r.crb - r.qcrb;
    const auto limits = photon_limits(in);
    r.sql = limits.sql();
    r.hl = limits.hl();
    r.hoffman = limits.hoffman();
    return r;
}

struct ParityCounts {
    long long plus = 0;
    long long minus = 0;
    long long shots() const { return plus + minus; }
};

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Outcome +1 with probability (1 + <Pi>)/2.
inline ParityCounts sample_parity(double parity_expectation, long long shots, std::uint64_t seed) {
    if (shots < 1) throw DomainError("need at least one shot");
    if (!(std::abs(parity_expectation) <= 1.0 + 1e-12)) throw DomainError("parity expectation outside [-1, 1]");
    const double p_plus = std::clamp(0.5 * (1.0 + parity_expectation), 0.0, 1.0);
    std::mt19937_64 engine(seed);
    std::binomial_distribution<long long> draw(shots, p_plus);
    const long long plus = draw(engine);
    return {plus, shots - plus};
}

inline double parity_log_likelihood(const ParityCounts& counts, double parity_expectation) {
    constexpr double floor = 1e-300;
    const double p_plus = std::max(0.5 * (1.0 + parity_expectation), floor);
    const double p_minus = std::max(0.5 * (1.0 - parity_expectation), floor);
    double ll = 0.0;
    if (counts.plus > 0) ll += counts.plus * std::log(p_plus);
    if (counts.minus > 0) ll += counts.minus * std::log(p_minus);
    return ll;
}

inline constexpr double kMleTolerance = 1e-6;

// Golden-section maximum of the two-outcome log-likelihood over [lo, hi].
inline double mle_phase(const ParityCounts& counts, const std::function<double(double)>& parity_model, double lo,
                        double hi, double tolerance = kMleTolerance) {
    if (!(hi > lo)) throw DomainError("MLE search interval is empty");
    auto ll = [&](double phi) { return parity_log_likelihood(counts, parity_model(phi)); };
    {
        const double a = ll(lo), b = ll(0.5 * (lo + hi)), c = ll(hi);
        const double spread = std::max({a, b, c}) - std::min({a, b, c});
        if (spread <= 1e-12 * std::max(1.0, std::abs(b))) throw NonIdentifiable("log-likelihood is flat on interval");
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = ll(x1), f2 = ll(x2);
    while (b - a > tolerance) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ll(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ll(x1);
        }
    }
    const double mid = 0.5 * (a + b);
    // The optimum may sit on a boundary of the bracket.
    double best = mid, best_ll = ll(mid);
    for (double edge : {lo, hi}) {
        const double v = ll(edge);
        if (v > best_ll) {
            best = edge;
            best_ll = v;
        }
    }
    return best;
}

struct MonteCarloSummary {
    double rmse = 0.0;
    double bias = 0.0;
    std::vector<double> estimates;
};

// Repeated sampling and MLE at a fixed true phase; trial i uses derive_seed(root_seed, i).
inline MonteCarloSummary mle_monte_carlo(const std::function<double(double)>& parity_model, double true_phi,
                                         long long shots, int trials, std::uint64_t root_seed, double lo, double hi) {
    std::vector<int> ids(trials);
    for (int i = 0; i < trials; ++i) ids[i] = i;
    const double truth = parity_model(true_phi);
    MonteCarloSummary s;
    s.estimates = parallel_map(ids, [&](int i) {
        const auto counts = sample_parity(truth, shots, derive_seed(root_seed, static_cast<std::uint64_t>(i)));
        return mle_phase(counts, parity_model, lo, hi);
    });
    CompensatedSum<double> sq, bias;
    for (double e : s.estimates) {
        sq.add((e - true_phi) * (e - true_phi));
        bias.add(e - true_phi);
    }
    s.rmse = std::sqrt(sq.value() / trials);
    s.bias = bias.value() / trials;
    return s;
}

}  // namespace paritylab
