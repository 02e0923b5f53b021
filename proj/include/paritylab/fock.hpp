#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "paritylab/errors.hpp"
#include "paritylab/math.hpp"

namespace paritylab {

inline constexpr double kTailThreshold = 1e-12;

// Cutoff n_max = ceil(nbar + 10 sqrt(nbar + 1) + 20) for a mode with mean photon number nbar.
inline int truncation_cutoff(double mean_photons) {
    if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons))
        throw DomainError("mean photon number must be finite and nonnegative");
    return static_cast<int>(std::ceil(mean_photons + 10.0 * std::sqrt(mean_photons + 1.0) + 20.0));
}

struct FockIndex {
    int n = 0;  // a-mode photons (excited atoms)
    int q = 0;  // b-mode photons (ground atoms)
    friend bool operator==(const FockIndex&, const FockIndex&) = default;
    friend auto operator<=>(const FockIndex&, const FockIndex&) = default;
};

// Dense amplitude grid over 0 <= n <= n_max_a, 0 <= q <= n_max_b.
class TwoModeState {
    struct AllowZero {};

public:
    TwoModeState(int n_max_a, int n_max_b, std::vector<Complex> amps, double tail_bound = 0.0,
                 double tail_threshold = kTailThreshold)
        : TwoModeState(AllowZero{}, n_max_a, n_max_b, std::move(amps), tail_bound) {
        if (tail_bound_ > tail_threshold)
            throw TruncationOverflow("declared tail mass " + std::to_string(tail_bound_) + " exceeds threshold");
        if (norm_squared() == 0.0) throw DegenerateState("all-zero amplitude grid");
    }

    static TwoModeState vacuum() { return TwoModeState(0, 0, {Complex(1.0)}); }

    // |psi_a> (x) |psi_b> from single-mode amplitude lists.
    static TwoModeState product(const std::vector<Complex>& mode_a, const std::vector<Complex>& mode_b,
                                double tail_bound = 0.0) {
        if (mode_a.empty() || mode_b.empty()) throw DomainError("empty mode amplitude list");
        const int na = static_cast<int>(mode_a.size()) - 1;
        const int nb = static_cast<int>(mode_b.size()) - 1;
        std::vector<Complex> amps(mode_a.size() * mode_b.size());
        for (int n = 0; n <= na; ++n)
            for (int q = 0; q <= nb; ++q) amps[static_cast<std::size_t>(n) * (nb + 1) + q] = mode_a[n] * mode_b[q];
        return TwoModeState(na, nb, std::move(amps), tail_bound);
    }

    int n_max_a() const { return n_max_a_; }
    int n_max_b() const { return n_max_b_; }
    double tail_bound() const { return tail_bound_; }
    const std::vector<Complex>& amplitudes() const { return amps_; }

    Complex amp(int n, int q) const {
        if (n < 0 || q < 0 || n > n_max_a_ || q > n_max_b_) return {};
        return amps_[flat(n, q)];
    }

    double norm_squared() const {
        CompensatedSum<double> s;
        for (const auto& c : amps_) s.add(std::norm(c));
        return s.value();
    }

    TwoModeState normalized() const {
        const double nrm = std::sqrt(norm_squared());
        if (nrm == 0.0) throw DegenerateState("cannot normalize a zero state");
        std::vector<Complex> out(amps_);
        for (auto& c : out) c /= nrm;
        return TwoModeState(AllowZero{}, n_max_a_, n_max_b_, std::move(out), tail_bound_);
    }

    bool b_mode_is_vacuum() const {
        for (int n = 0; n <= n_max_a_; ++n)
            for (int q = 1; q <= n_max_b_; ++q)
                if (amps_[flat(n, q)] != Complex{}) return false;
        return true;
    }

    // a-mode amplitudes of a state whose b-mode is vacuum.
    std::vector<Complex> mode_a_amplitudes() const {
        if (!b_mode_is_vacuum()) throw DomainError("state is not single-mode (b-mode populated)");
        std::vector<Complex> out(n_max_a_ + 1);
        for (int n = 0; n <= n_max_a_; ++n) out[n] = amps_[flat(n, 0)];
        return out;
    }

    // Images of non-unitary operators may vanish; only library internals create those.
    static TwoModeState image(int n_max_a, int n_max_b, std::vector<Complex> amps, double tail_bound) {
        return TwoModeState(AllowZero{}, n_max_a, n_max_b, std::move(amps), tail_bound);
    }

private:
    TwoModeState(AllowZero, int n_max_a, int n_max_b, std::vector<Complex> amps, double tail_bound)
        : n_max_a_(n_max_a), n_max_b_(n_max_b), tail_bound_(tail_bound), amps_(std::move(amps)) {
        if (n_max_a < 0 || n_max_b < 0) throw DomainError("photon cutoffs must be nonnegative");
        if (amps_.size() != static_cast<std::size_t>(n_max_a + 1) * static_cast<std::size_t>(n_max_b + 1))
            throw DomainError("amplitude grid size does not match cutoffs");
        if (!(tail_bound >= 0.0)) throw DomainError("tail bound must be nonnegative");
    }

    std::size_t flat(int n, int q) const { return static_cast<std::size_t>(n) * (n_max_b_ + 1) + q; }

    int n_max_a_;
    int n_max_b_;
    double tail_bound_;
    std::vector<Complex> amps_;
};

// Amplitudes grouped by j sector; entry k of a sector is m = k - j, i.e. n = k, q = 2j - k.
class AngularState {
public:
    using Sector = std::vector<Complex>;

    AngularState() = default;
    explicit AngularState(std::map<Spin, Sector> sectors, double tail_bound = 0.0)
        : sectors_(std::move(sectors)), tail_bound_(tail_bound) {
        for (const auto& [spin, amps] : sectors_)
            if (static_cast<int>(amps.size()) != spin.dim())
                throw DomainError("sector for 2j=" + std::to_string(spin.twice()) + " has wrong length");
    }

    static AngularState single(Spin spin, Sector amps) {
        std::map<Spin, Sector> s;
        s.emplace(spin, std::move(amps));
        return AngularState(std::move(s));
    }

    const std::map<Spin, Sector>& sectors() const { return sectors_; }
    double tail_bound() const { return tail_bound_; }
    bool has_sector(Spin s) const { return sectors_.count(s) != 0; }

    const Sector& sector(Spin s) const {
        const auto it = sectors_.find(s);
        if (it == sectors_.end()) throw IndexError("no sector with 2j=" + std::to_string(s.twice()));
        return it->second;
    }

    Complex amp(Spin s, double m) const {
        const auto it = sectors_.find(s);
        if (it == sectors_.end()) return {};
        return it->second[s.index_of(m)];
    }

    // The unique sector of a definite-j state.
    std::pair<Spin, const Sector*> only_sector() const {
        if (sectors_.size() != 1) throw UnknownAtomNumber("state does not have a definite j");
        return {sectors_.begin()->first, &sectors_.begin()->second};
    }

    int max_twice_j() const { return sectors_.empty() ? 0 : sectors_.rbegin()->first.twice(); }

    double norm_squared() const {
        CompensatedSum<double> s;
        for (const auto& [spin, amps] : sectors_)
            for (const auto& c : amps) s.add(std::norm(c));
        return s.value();
    }

    AngularState normalized() const {
        const double nrm = std::sqrt(norm_squared());
        if (nrm == 0.0) throw DegenerateState("cannot normalize a zero angular state");
        auto out = sectors_;
        for (auto& [spin, amps] : out)
            for (auto& c : amps) c /= nrm;
        return AngularState(std::move(out), tail_bound_);
    }

    template <typename Fn>
    AngularState transformed(Fn&& per_sector) const {
        std::map<Spin, Sector> out;
        for (const auto& [spin, amps] : sectors_) out.emplace(spin, per_sector(spin, amps));
        return AngularState(std::move(out), tail_bound_);
    }

private:
    std::map<Spin, Sector> sectors_;
    double tail_bound_ = 0.0;
};

inline AngularState to_angular(const TwoModeState& state) {
    std::map<Spin, AngularState::Sector> sectors;
    for (int n = 0; n <= state.n_max_a(); ++n) {
        for (int q = 0; q <= state.n_max_b(); ++q) {
            const Complex c = state.amp(n, q);
            if (c == Complex{}) continue;
            const Spin spin(n + q);
            auto it = sectors.find(spin);
            if (it == sectors.end()) it = sectors.emplace(spin, AngularState::Sector(spin.dim())).first;
            it->second[n] = c;
        }
    }
    return AngularState(std::move(sectors), state.tail_bound());
}

// Inverse of to_angular. Cutoffs default to the largest 2j so every sector fits;
// mass landing outside explicit cutoffs above the threshold is an overflow.
inline TwoModeState from_angular(const AngularState& state, int n_max_a = -1, int n_max_b = -1,
                                 double tail_threshold = kTailThreshold) {
    const int top = state.max_twice_j();
    if (n_max_a < 0) n_max_a = top;
    if (n_max_b < 0) n_max_b = top;
    std::vector<Complex> amps(static_cast<std::size_t>(n_max_a + 1) * (n_max_b + 1));
    double escaped = 0.0;
    for (const auto& [spin, sec] : state.sectors()) {
        for (int k = 0; k < spin.dim(); ++k) {
            const int n = k;
            const int q = spin.twice() - k;
            if (n > n_max_a || q > n_max_b) {
                escaped += std::norm(sec[k]);
                continue;
            }
            amps[static_cast<std::size_t>(n) * (n_max_b + 1) + q] = sec[k];
        }
    }
    if (escaped > tail_threshold)
        throw TruncationOverflow("mass " + std::to_string(escaped) + " falls outside the requested Fock window");
    return TwoModeState::image(n_max_a, n_max_b, std::move(amps), state.tail_bound() + escaped);
}

enum class ObservableKind {
    Jx,
    Jy,
    Jz,
    TwoJz,
    ParityA,
    ParityB,
    ZeroPhotonA,
    ZeroPhotonB,
    SigmaN,
    NumberA,
    NumberB,
    ParityAtomicGround,
    ParityAtomicExcited,
};

// A Hermitian observable acting sector-by-sector. For SigmaN, `order` is N.
struct Observable {
    ObservableKind kind = ObservableKind::Jz;
    int order = 0;

    static Observable of(ObservableKind k) { return Observable{k, 0}; }
    static Observable sigma(int n) {
        if (n < 1) throw DomainError("Sigma_N needs N >= 1");
        return Observable{ObservableKind::SigmaN, n};
    }

    bool is_parity() const {
        return kind == ObservableKind::ParityA || kind == ObservableKind::ParityB ||
               kind == ObservableKind::ParityAtomicGround || kind == ObservableKind::ParityAtomicExcited;
    }
    bool is_diagonal() const {
        return kind != ObservableKind::Jx && kind != ObservableKind::Jy && kind != ObservableKind::SigmaN;
    }

    // Eigenvalue on |j, m> with k = j + m, for diagonal kinds.
    double diagonal_value(Spin spin, int k) const {
        const int n = k;
        const int q = spin.twice() - k;
        switch (kind) {
            case ObservableKind::Jz: return 0.5 * (n - q);
            case ObservableKind::TwoJz: return static_cast<double>(n - q);
            case ObservableKind::ParityA:
            case ObservableKind::ParityAtomicExcited: return sign_power(n);
            case ObservableKind::ParityB:
            case ObservableKind::ParityAtomicGround: return sign_power(q);
            case ObservableKind::ZeroPhotonA: return n == 0 ? 1.0 : 0.0;
            case ObservableKind::ZeroPhotonB: return q == 0 ? 1.0 : 0.0;
            case ObservableKind::NumberA: return n;
            case ObservableKind::NumberB: return q;
            default: throw DomainError("observable is not diagonal in the Fock basis");
        }
    }

    std::string name() const {
        switch (kind) {
            case ObservableKind::Jx: return "Jx";
            case ObservableKind::Jy: return "Jy";
            case ObservableKind::Jz: return "Jz";
            case ObservableKind::TwoJz: return "2Jz";
            case ObservableKind::ParityA: return "parity_a";
            case ObservableKind::ParityB: return "parity_b";
            case ObservableKind::ZeroPhotonA: return "zero_photon_a";
            case ObservableKind::ZeroPhotonB: return "zero_photon_b";
            case ObservableKind::SigmaN: return "sigma_" + std::to_string(order);
            case ObservableKind::NumberA: return "number_a";
            case ObservableKind::NumberB: return "number_b";
            case ObservableKind::ParityAtomicGround: return "parity_ground";
            case ObservableKind::ParityAtomicExcited: return "parity_excited";
        }
        return "unknown";
    }
};

namespace detail {

// sqrt(j(j+1) - m(m+1)) for m = k - j, i.e. the J+ coefficient from index k to k+1.
inline double raise_coefficient(Spin spin, int k) {
    const double j = spin.value();
    const double m = spin.m_of(k);
    return std::sqrt(std::max(0.0, j * (j + 1.0) - m * (m + 1.0)));
}

inline AngularState::Sector apply_in_sector(Spin spin, const AngularState::Sector& v, const Observable& op) {
    const int d = spin.dim();
    AngularState::Sector out(d);
    if (op.is_diagonal()) {
        for (int k = 0; k < d; ++k) out[k] = op.diagonal_value(spin, k) * v[k];
        return out;
    }
    if (op.kind == ObservableKind::SigmaN) {
        if (spin.twice() == op.order) {
            out[d - 1] = v[0];
            out[0] = v[d - 1];
        }
        return out;
    }
    // J+ raises k -> k+1; Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i).
    const bool is_x = op.kind == ObservableKind::Jx;
    for (int k = 0; k + 1 < d; ++k) {
        const double c = 0.5 * raise_coefficient(spin, k);
        // <k+1|J|k> and <k|J|k+1>
        const Complex up = is_x ? Complex(c) : Complex(0.0, -c);
        const Complex down = is_x ? Complex(c) : Complex(0.0, c);
        out[k + 1] += up * v[k];
        out[k] += down * v[k + 1];
    }
    return out;
}

inline Complex sector_inner(const AngularState::Sector& a, const AngularState::Sector& b) {
    CompensatedSum<Complex> s;
    for (std::size_t k = 0; k < a.size(); ++k) s.add(std::conj(a[k]) * b[k]);
    return s.value();
}

}  // namespace detail

inline AngularState apply_operator(const AngularState& state, const Observable& op) {
    return state.transformed([&](Spin s, const AngularState::Sector& v) { return detail::apply_in_sector(s, v, op); });
}

inline TwoModeState apply_operator(const TwoModeState& state, const Observable& op) {
    return from_angular(apply_operator(to_angular(state), op), state.n_max_a(), state.n_max_b());
}

enum class Ladder { Raise, Lower };

// J+ = a^dagger b or J- = b^dagger a.
inline AngularState apply_ladder(const AngularState& state, Ladder dir) {
    return state.transformed([&](Spin spin, const AngularState::Sector& v) {
        AngularState::Sector out(spin.dim());
        for (int k = 0; k + 1 < spin.dim(); ++k) {
            const double c = detail::raise_coefficient(spin, k);
            if (dir == Ladder::Raise)
                out[k + 1] = c * v[k];
            else
                out[k] = c * v[k + 1];
        }
        return out;
    });
}

inline TwoModeState apply_ladder(const TwoModeState& state, Ladder dir) {
    return from_angular(apply_ladder(to_angular(state), dir), state.n_max_a(), state.n_max_b());
}

struct ParityWeights {
    double even = 0.0;  // weight on eigenvalue +1
    double odd = 0.0;   // weight on eigenvalue -1
    double expectation() const { return even - odd; }
    double variance() const { return 4.0 * even * odd; }
};

// Probabilities of the two parity outcomes, summed separately so near-unit expectations keep precision.
inline ParityWeights parity_weights(const AngularState& state, const Observable& op) {
    if (!op.is_parity()) throw DomainError("parity_weights needs a parity observable");
    CompensatedSum<double> plus, minus;
    for (const auto& [spin, v] : state.sectors())
        for (int k = 0; k < spin.dim(); ++k) (op.diagonal_value(spin, k) > 0 ? plus : minus).add(std::norm(v[k]));
    const double total = plus.value() + minus.value();
    return {plus.value() / total, minus.value() / total};
}

inline double expectation(const AngularState& state, const Observable& op) {
    if (op.is_parity()) return parity_weights(state, op).expectation();
    CompensatedSum<double> s;
    for (const auto& [spin, v] : state.sectors()) {
        if (op.is_diagonal()) {
            for (int k = 0; k < spin.dim(); ++k) s.add(op.diagonal_value(spin, k) * std::norm(v[k]));
        } else {
            s.add(detail::sector_inner(v, detail::apply_in_sector(spin, v, op)).real());
        }
    }
    return s.value();
}

// <O^2>, exact within each sector.
inline double second_moment(const AngularState& state, const Observable& op) {
    if (op.is_parity()) return 1.0;
    CompensatedSum<double> s;
    for (const auto& [spin, v] : state.sectors()) {
        if (op.is_diagonal()) {
            for (int k = 0; k < spin.dim(); ++k) {
                const double e = op.diagonal_value(spin, k);
                s.add(e * e * std::norm(v[k]));
            }
        } else {
            for (const auto& c : detail::apply_in_sector(spin, v, op)) s.add(std::norm(c));
        }
    }
    return s.value();
}

inline double variance(const AngularState& state, const Observable& op) {
    if (op.is_parity()) return parity_weights(state, op).variance();
    const double mean = expectation(state, op);
    return second_moment(state, op) - mean * mean;
}

inline double expectation(const TwoModeState& state, const Observable& op) { return expectation(to_angular(state), op); }

// Hermitian density matrix over an explicit list of retained (n, q) pairs.
class DensityState {
public:
    DensityState(std::vector<FockIndex> basis, Eigen::MatrixXcd matrix, double tol = 1e-12)
        : basis_(std::move(basis)), rho_(std::move(matrix)) {
        const auto d = static_cast<Eigen::Index>(basis_.size());
        if (rho_.rows() != d || rho_.cols() != d) throw DomainError("density matrix does not match basis size");
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) throw NotAState("density matrix is not Hermitian");
        if (std::abs(rho_.trace() - Complex(1.0)) > tol) throw NotAState("density matrix trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) throw NotAState("density matrix has a negative eigenvalue");
    }

    // |psi><psi| on every full j sector the state touches, so SU(2) generators act exactly.
    static DensityState from_pure(const TwoModeState& state) { return mixture({{1.0, state}}); }

    static DensityState mixture(const std::vector<std::pair<double, TwoModeState>>& parts) {
        std::vector<int> twice_js;
        std::vector<AngularState> angular;
        double wsum = 0.0;
        for (const auto& [w, s] : parts) {
            if (!(w >= 0.0)) throw NotAState("mixture weights must be nonnegative");
            wsum += w;
            angular.push_back(to_angular(s.normalized()));
            for (const auto& [spin, v] : angular.back().sectors()) twice_js.push_back(spin.twice());
        }
        std::sort(twice_js.begin(), twice_js.end());
        twice_js.erase(std::unique(twice_js.begin(), twice_js.end()), twice_js.end());
        std::vector<FockIndex> basis;
        for (int t : twice_js)
            for (int k = 0; k <= t; ++k) basis.push_back({k, t - k});
        const auto d = static_cast<Eigen::Index>(basis.size());
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t p = 0; p < parts.size(); ++p) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                const auto& [n, q] = basis[static_cast<std::size_t>(i)];
                const Spin spin(n + q);
                if (angular[p].has_sector(spin)) v(i) = angular[p].sector(spin)[n];
            }
            rho += (parts[p].first / wsum) * v * v.adjoint();
        }
        return DensityState(std::move(basis), std::move(rho));
    }

    // Diagonal mixture of single-mode number states |n>_a<n| with the given weights.
    static DensityState number_diagonal(const std::vector<double>& weights) {
        std::vector<FockIndex> basis;
        const auto d = static_cast<Eigen::Index>(weights.size());
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
        double total = 0.0;
        for (double w : weights) total += w;
        for (Eigen::Index i = 0; i < d; ++i) {
            basis.push_back({static_cast<int>(i), 0});
            rho(i, i) = weights[static_cast<std::size_t>(i)] / total;
        }
        return DensityState(std::move(basis), std::move(rho));
    }

    const std::vector<FockIndex>& basis() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    Eigen::Index dim() const { return rho_.rows(); }

private:
    std::vector<FockIndex> basis_;
    Eigen::MatrixXcd rho_;
};

// Matrix of an observable restricted to a basis; couplings to pairs outside the basis are dropped.
inline Eigen::MatrixXcd operator_matrix(const std::vector<FockIndex>& basis, const Observable& op) {
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    std::map<FockIndex, Eigen::Index> where;
    for (Eigen::Index i = 0; i < d; ++i) where[basis[static_cast<std::size_t>(i)]] = i;
    for (Eigen::Index col = 0; col < d; ++col) {
        const auto [n, q] = basis[static_cast<std::size_t>(col)];
        const Spin spin(n + q);
        AngularState::Sector unit(spin.dim());
        unit[n] = 1.0;
        const auto image = detail::apply_in_sector(spin, unit, op);
        for (int k = 0; k < spin.dim(); ++k) {
            if (image[k] == Complex{}) continue;
            const auto it = where.find({k, spin.twice() - k});
            if (it != where.end()) m(it->second, col) = image[k];
        }
    }
    return m;
}

inline double expectation(const DensityState& rho, const Observable& op) {
    return (rho.matrix() * operator_matrix(rho.basis(), op)).trace().real();
}

// W(alpha) = (2/pi) <D(alpha) Pi D(alpha)^dagger> for a state whose b-mode is vacuum.
inline double wigner_at(const TwoModeState& state, Complex alpha, double tail_threshold = kTailThreshold) {
    const auto psi = state.mode_a_amplitudes();
    double mean = 0.0;
    for (std::size_t n = 0; n < psi.size(); ++n) mean += n * std::norm(psi[n]);
    const double reach = std::sqrt(mean / state.norm_squared()) + std::abs(alpha);
    const int window = std::max(static_cast<int>(psi.size()), truncation_cutoff(reach * reach));
    const int dim = window + window / 2 + 8;
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double s = std::sqrt(n + 1.0);
        gen(n + 1, n) = -alpha * s;         // -alpha a^dagger
        gen(n, n + 1) = std::conj(alpha) * s;  // +alpha^* a
    }
    const Eigen::MatrixXcd shift = gen.exp();  // D(-alpha) = D(alpha)^dagger
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (std::size_t n = 0; n < psi.size(); ++n) v(static_cast<Eigen::Index>(n)) = psi[n];
    v /= v.norm();
    const Eigen::VectorXcd w = shift * v;
    double escaped = 0.0;
    for (int n = window; n < dim; ++n) escaped += std::norm(w(n));
    if (escaped > tail_threshold) throw TruncationOverflow("displaced state leaves the Fock window");
    CompensatedSum<double> parity;
    for (int n = 0; n < dim; ++n) parity.add(sign_power(n) * std::norm(w(n)));
    return 2.0 / kPi * parity.value();
}

}  // namespace paritylab
