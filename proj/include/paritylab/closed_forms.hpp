#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "paritylab/errors.hpp"
#include "paritylab/math.hpp"
#include "paritylab/rotations.hpp"

namespace paritylab::closed {

struct RamseySignals {
    double jz_single = 0.0;
    double jz_acs = 0.0;
    double parity_mes = 0.0;
    double dphi_acs = 0.0;
    double dphi_mes = 0.0;
};

inline RamseySignals ramsey_signals(int n_atoms, double phi) {
    if (n_atoms < 1) throw DomainError("need at least one atom");
    const double n = n_atoms;
    return {0.5 * std::cos(phi), 0.5 * n * std::cos(phi), sign_power(n_atoms) * std::cos(n * phi), 1.0 / std::sqrt(n),
            1.0 / n};
}

// <Pi_b> after the N00N state, phase, and exp(i pi/2 Jx).
inline double noon_parity(int n, double relative_phase, double phi) {
    if (n < 1) throw DomainError("N00N parity needs N >= 1");
    const double x = n * phi + relative_phase;
    if (n % 2 == 0) return sign_power(n / 2) * std::cos(x);
    return sign_power((n + 1) / 2) * std::sin(x);
}

struct EcsParity {
    double expectation = 0.0;
    double derivative = 0.0;
    double dphi_at_zero = 0.0;
};

inline EcsParity ecs_parity(double nbar, double phi) {
    if (!(nbar > 0.0)) throw DomainError("mean photon number must be positive");
    const double expectation = std::exp(-nbar) * (1.0 + std::exp(nbar * std::cos(phi)) * std::sin(nbar * std::sin(phi)));
    const double derivative = nbar * std::exp(-nbar * (1.0 - std::cos(phi))) * std::cos(phi + nbar * std::sin(phi));
    return {expectation, derivative, std::sqrt(-std::expm1(-2.0 * nbar)) / nbar};
}

// QFI of |beta>_a (x) cat(gamma) in the large-|gamma| form.
inline double ecs_qfi(Complex beta, Complex gamma) {
    const double b2 = std::norm(beta);
    const double g2 = std::norm(gamma);
    const double rel = std::arg(beta) - std::arg(gamma);
    return b2 + g2 + 2.0 * b2 * g2 * (1.0 - std::cos(2.0 * rel));
}

struct TwinFockForms {
    double parity = 0.0;
    double qfi = 0.0;
    double dphi_min = 0.0;
};

inline TwinFockForms twin_fock_forms(int n, double phi) {
    if (n < 0) throw DomainError("photon number must be nonnegative");
    const double qfi = 2.0 * n * (n + 1.0);
    return {legendre(n, std::cos(2.0 * phi)), qfi, 1.0 / std::sqrt(qfi)};
}

// sum_n |B_n|^2 P_n(cos 2 phi) for a state sum_n B_n |n,n>.
inline double correlated_parity(const std::vector<Complex>& diagonal, double phi) {
    const double x = std::cos(2.0 * phi);
    CompensatedSum<double> s;
    double p_prev = 1.0, p_cur = x;
    for (std::size_t n = 0; n < diagonal.size(); ++n) {
        const double pn = n == 0 ? 1.0 : (n == 1 ? x : p_cur);
        s.add(std::norm(diagonal[n]) * pn);
        if (n >= 1) {
            const double next = ((2.0 * n + 1.0) * x * p_cur - n * p_prev) / (n + 1.0);
            p_prev = p_cur;
            p_cur = next;
        }
    }
    return s.value();
}

// Diagonal coefficients of the two-mode squeezed vacuum, |B_n|^2 = (1 - t^2) t^{2n}, t = tanh r.
inline std::vector<Complex> tmsvs_coefficients(double r, double mass_floor = 1e-18) {
    const double t = std::tanh(r);
    std::vector<Complex> out;
    double w = 1.0 - t * t;
    double remaining = 1.0;
    while (remaining > mass_floor && out.size() < 100000) {
        out.emplace_back(std::sqrt(w));
        remaining -= w;
        w *= t * t;
        if (w == 0.0) break;
    }
    return out;
}

inline double tmsvs_parity(double r, double phi) { return correlated_parity(tmsvs_coefficients(r), phi); }
inline double tmsvs_parity_half_pi(double r) { return 1.0 / std::cosh(2.0 * r); }
inline double tmsvs_dphi_min(double nbar_total) { return 1.0 / std::sqrt(nbar_total * (2.0 + nbar_total)); }
inline double tmsvs_hoffman(double nbar_total) { return 1.0 / std::sqrt(2.0 * nbar_total * (nbar_total + 1.0)); }

inline std::vector<Complex> pair_coherent_coefficients(Complex zeta, double mass_floor = 1e-18) {
    const double mod = std::abs(zeta);
    const double log_norm = -0.5 * std::log(bessel_i0(2.0 * mod));
    std::vector<Complex> out;
    double remaining = 1.0;
    for (int n = 0; n < 100000; ++n) {
        const Complex b =
            mod == 0.0 ? Complex(n == 0 ? 1.0 : 0.0)
                       : std::polar(std::exp(log_norm + n * std::log(mod) - log_factorial(n)), n * std::arg(zeta));
        out.push_back(b);
        remaining -= std::norm(b);
        if (remaining < mass_floor && n > 2.0 * mod) break;
    }
    return out;
}

inline double pair_coherent_parity(Complex zeta, double phi) {
    return correlated_parity(pair_coherent_coefficients(zeta), phi);
}

inline double coh_sq_fi(Complex alpha, double r) {
    const double s = std::sinh(r);
    return std::norm(alpha) * std::exp(2.0 * r) + s * s;
}

inline double coh_sq_dphi_min(double nbar_total) { return 1.0 / std::sqrt(nbar_total * (nbar_total + 0.5)); }

// Squeezed-vacuum coefficient S_n (zero for odd n).
inline double svs_coefficient(int n, double r) {
    if (n % 2 != 0 || n < 0) return 0.0;
    if (r == 0.0) return n == 0 ? 1.0 : 0.0;
    const int h = n / 2;
    const double log_sq = log_factorial(n) - n * std::log(2.0) - 2.0 * log_factorial(h) + n * std::log(std::tanh(r)) -
                          std::log(std::cosh(r));
    return sign_power(h) * std::exp(0.5 * log_sq);
}

// P(Nc, Nd | phi) for |alpha>_a (x) SVS(r)_b through the MZI.
inline double coh_sq_joint_prob(Complex alpha, double r, int nc, int nd, double phi) {
    if (nc < 0 || nd < 0) throw DomainError("photon counts must be nonnegative");
    const Spin spin(nc + nd);
    const double m = 0.5 * (nc - nd);
    const double j = spin.value();
    const double a = std::abs(alpha);
    CompensatedSum<Complex> s;
    for (int n = 0; n <= spin.twice(); n += 2) {
        const int k = spin.twice() - n;
        const double sn = svs_coefficient(n, r);
        if (sn == 0.0) continue;
        Complex coh = k == 0 ? Complex(1.0) : Complex{};
        if (a > 0.0) coh = std::polar(std::exp(k * std::log(a) - 0.5 * log_factorial(k)), k * std::arg(alpha));
        s.add(coh * sn * wigner_d(spin, m, j - n, phi));
    }
    return std::exp(-a * a) * std::norm(s.value());
}

struct CohFockForms {
    double parity = 0.0;
    double dphi_jz = 0.0;
    double dphi_min = 0.0;
};

inline CohFockForms coh_fock_forms(Complex alpha, int n, double phi) {
    if (n < 0) throw DomainError("photon number must be nonnegative");
    const double nbar = std::norm(alpha);
    CompensatedSum<double> s;
    double remaining = 1.0;
    for (int k = 0;; ++k) {
        const double w = nbar == 0.0 ? (k == 0 ? 1.0 : 0.0)
                                     : std::exp(-nbar + k * std::log(nbar) - log_factorial(k));
        const Spin spin(k + n);
        const double mm = spin.value() - n;
        s.add(w * wigner_d(spin, mm, mm, 2.0 * phi));
        remaining -= w;
        if (k > nbar && (remaining < 1e-16 || w < 1e-18)) break;
    }
    const double sin_phi = std::sin(phi);
    // Var(2Jz) at the output is nbar cos^2 + (nbar + N + 2 nbar N) sin^2.
    const double num = std::sqrt(nbar + n * (1.0 + 2.0 * nbar) * sin_phi * sin_phi);
    const double den = std::abs((nbar - n) * sin_phi);
    return {sign_power(n) * s.value(), den == 0.0 ? INFINITY : num / den, 1.0 / std::sqrt(nbar + n * (1.0 + 2.0 * nbar))};
}

struct ClassicalLightForms {
    double two_jz = 0.0;
    double dphi_jz = 0.0;
    double parity_a = 0.0;
    double parity_b = 0.0;
    double dphi_parity_a = 0.0;
    double dphi_parity_b = 0.0;
    double p_zero = 0.0;
};

inline ClassicalLightForms classical_light_forms(double nbar, double phi) {
    const double s = std::abs(std::sin(phi));
    const double c_half = std::cos(0.5 * phi);
    const double s_half = std::sin(0.5 * phi);
    ClassicalLightForms f;
    f.two_jz = nbar * std::cos(phi);
    f.dphi_jz = s == 0.0 ? INFINITY : 1.0 / (std::sqrt(nbar) * s);
    f.parity_a = std::exp(-nbar * (1.0 + std::cos(phi)));
    f.parity_b = std::exp(-nbar * (1.0 - std::cos(phi)));
    f.dphi_parity_a = s == 0.0 ? INFINITY : std::sqrt(std::expm1(4.0 * nbar * c_half * c_half)) / (nbar * s);
    f.dphi_parity_b = s == 0.0 ? INFINITY : std::sqrt(std::expm1(4.0 * nbar * s_half * s_half)) / (nbar * s);
    f.p_zero = std::exp(-0.5 * nbar * (1.0 + std::cos(phi)));
    return f;
}

// Ramsey-resolution forms. Coefficients C_m of the post-pulse state are indexed by k = j + m.
namespace detail {

inline void check_coefficients(Spin spin, const std::vector<Complex>& c) {
    if (static_cast<int>(c.size()) != spin.dim()) throw DomainError("coefficient list length must be 2j+1");
}

// sum_{m'} m'^power d_{m',p}(pi/2) d_{m',m}(pi/2)
inline Eigen::MatrixXd quarter_moments(Spin spin, int power) {
    const auto d = wigner_d_block(spin, kPi / 2).entries;
    Eigen::VectorXd weight(spin.dim());
    for (int k = 0; k < spin.dim(); ++k) weight(k) = std::pow(spin.m_of(k), power);
    return d.transpose() * weight.asDiagonal() * d;
}

inline bool all_real(const std::vector<Complex>& c) {
    for (const auto& x : c)
        if (x.imag() != 0.0) return false;
    return true;
}

inline double bilinear(const std::vector<Complex>& c, const Eigen::MatrixXd& kernel, double phi, Spin spin) {
    CompensatedSum<Complex> s;
    for (int a = 0; a < spin.dim(); ++a)      // m
        for (int b = 0; b < spin.dim(); ++b)  // p
            s.add(std::conj(c[b]) * c[a] * std::polar(1.0, -phi * (a - b)) * kernel(b, a));
    return s.value().real();
}

}  // namespace detail

// <Jz> = gamma cos(phi) + alpha for real coefficients; the bilinear form otherwise.
inline double jz_general(Spin spin, const std::vector<Complex>& c, double phi) {
    detail::check_coefficients(spin, c);
    const auto g = detail::quarter_moments(spin, 1);
    if (!detail::all_real(c)) return detail::bilinear(c, g, phi, spin);
    double gamma = 0.0, alpha = 0.0;
    for (int k = 0; k < spin.dim(); ++k) {
        alpha += c[k].real() * c[k].real() * g(k, k);
        if (k + 1 < spin.dim()) gamma += 2.0 * c[k + 1].real() * c[k].real() * g(k + 1, k);
    }
    return gamma * std::cos(phi) + alpha;
}

// <Jz^2> = Omega cos(2 phi) + kappa cos(phi) + beta for real coefficients.
inline double jz_sq_general(Spin spin, const std::vector<Complex>& c, double phi) {
    detail::check_coefficients(spin, c);
    const auto g = detail::quarter_moments(spin, 2);
    if (!detail::all_real(c)) return detail::bilinear(c, g, phi, spin);
    double omega = 0.0, kappa = 0.0, beta = 0.0;
    for (int k = 0; k < spin.dim(); ++k) {
        beta += c[k].real() * c[k].real() * g(k, k);
        if (k + 1 < spin.dim()) kappa += 2.0 * c[k + 1].real() * c[k].real() * g(k + 1, k);
        if (k + 2 < spin.dim()) omega += 2.0 * c[k + 2].real() * c[k].real() * g(k + 2, k);
    }
    return omega * std::cos(2.0 * phi) + kappa * std::cos(phi) + beta;
}

// Ground-state parity after phase and the final pulse: (-1)^{2j} sum_m C*_{-m} C_m e^{-2 i phi m}.
inline double parity_general(Spin spin, const std::vector<Complex>& c, double phi) {
    detail::check_coefficients(spin, c);
    CompensatedSum<Complex> s;
    const int top = spin.dim() - 1;
    for (int k = 0; k <= top; ++k) s.add(std::conj(c[top - k]) * c[k] * std::polar(1.0, -2.0 * phi * spin.m_of(k)));
    return sign_power(spin.twice()) * s.value().real();
}

inline double acs_parity(int n_atoms, double phi) { return std::pow(std::cos(phi), n_atoms); }

// -cos^N(phi) [N - (N-1) cos^{-2}(phi)], written without the division.
inline double jzop_parity(int n_atoms, double phi) {
    if (n_atoms < 1) throw DomainError("need at least one atom");
    const double c = std::cos(phi);
    const double lead = n_atoms * std::pow(c, n_atoms);
    const double tail = n_atoms >= 2 ? (n_atoms - 1) * std::pow(c, n_atoms - 2) : 0.0;
    return -(lead - tail);
}

// (-1)^q sum C(2j, j+m) m^{2q} cos(2 phi m) / sum C(2j, j+m) m^{2q}: q Jz applications.
inline double jzop_parity_q(Spin spin, int q, double phi) {
    CompensatedSum<double> num, den;
    for (int k = 0; k < spin.dim(); ++k) {
        const double m = spin.m_of(k);
        const double w = std::exp(log_binomial(spin.twice(), k) - spin.twice() * std::log(2.0)) * std::pow(m, 2 * q);
        num.add(w * std::cos(2.0 * phi * m));
        den.add(w);
    }
    if (den.value() == 0.0) throw DegenerateState("Jz^q image vanishes");
    return sign_power(q) * num.value() / den.value();
}

inline double noon_parity_atomic(int n_atoms, double relative_phase, double phi) {
    return sign_power(n_atoms) * std::cos(n_atoms * phi + relative_phase);
}

struct QrngForms {
    double parity = 0.0;
    double p_even = 0.0;
    double p_odd = 0.0;
    double mixed_parity = 0.0;
};

// P_e = e^{-n} cosh n and P_o = e^{-n} sinh n, evaluated as (1 +- e^{-2n})/2.
inline QrngForms qrng_forms(double nbar) {
    if (!(nbar >= 0.0)) throw DomainError("mean photon number must be nonnegative");
    const double parity = std::exp(-2.0 * nbar);
    return {parity, 0.5 * (1.0 + parity), -0.5 * std::expm1(-2.0 * nbar), parity};
}

// Registry for command-line queries.
using Params = std::map<std::string, double>;
using Values = std::map<std::string, double>;

struct ClosedFormEntry {
    std::string id;
    std::string description;
    std::vector<std::string> params;
    std::function<Values(const Params&)> evaluate;
};

namespace detail {

inline double need(const Params& p, const std::string& key) {
    const auto it = p.find(key);
    if (it == p.end()) throw DomainError("missing parameter '" + key + "'");
    return it->second;
}

inline int need_int(const Params& p, const std::string& key) {
    const double v = need(p, key);
    if (v != std::round(v)) throw DomainError("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
}

inline double opt(const Params& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

}  // namespace detail

inline const std::vector<ClosedFormEntry>& registry() {
    using detail::need;
    using detail::need_int;
    using detail::opt;
    static const std::vector<ClosedFormEntry> entries = {
        {"ramsey", "Ramsey signals for an ACS and a maximally entangled state", {"N", "phi"},
         [](const Params& p) {
             const auto r = ramsey_signals(need_int(p, "N"), need(p, "phi"));
             return Values{{"jz_single", r.jz_single}, {"jz_acs", r.jz_acs}, {"parity_mes", r.parity_mes},
                           {"dphi_acs", r.dphi_acs}, {"dphi_mes", r.dphi_mes}};
         }},
        {"noon-parity", "output b-mode parity for a N00N state", {"N", "Phi", "phi"},
         [](const Params& p) {
             return Values{{"parity", noon_parity(need_int(p, "N"), opt(p, "Phi", 0.0), need(p, "phi"))}};
         }},
        {"ecs-parity", "entangled coherent state parity signal", {"nbar", "phi"},
         [](const Params& p) {
             const auto r = ecs_parity(need(p, "nbar"), need(p, "phi"));
             return Values{{"expectation", r.expectation}, {"derivative", r.derivative}, {"dphi_at_zero", r.dphi_at_zero}};
         }},
        {"ecs-qfi", "QFI of coherent (x) cat input", {"beta_abs", "beta_arg", "gamma_abs", "gamma_arg"},
         [](const Params& p) {
             return Values{{"qfi", ecs_qfi(std::polar(need(p, "beta_abs"), opt(p, "beta_arg", 0.0)),
                                           std::polar(need(p, "gamma_abs"), opt(p, "gamma_arg", 0.0)))}};
         }},
        {"twin-fock", "twin-Fock parity, QFI and minimum uncertainty", {"N", "phi"},
         [](const Params& p) {
             const auto r = twin_fock_forms(need_int(p, "N"), need(p, "phi"));
             return Values{{"parity", r.parity}, {"qfi", r.qfi}, {"dphi_min", r.dphi_min}};
         }},
        {"tmsvs", "two-mode squeezed vacuum parity and bounds", {"r", "phi"},
         [](const Params& p) {
             const double r = need(p, "r");
             const double s = std::sinh(r);
             const double nbar = 2.0 * s * s;
             return Values{{"parity", tmsvs_parity(r, need(p, "phi"))},
                           {"parity_half_pi", tmsvs_parity_half_pi(r)},
                           {"nbar_total", nbar},
                           {"dphi_min", tmsvs_dphi_min(nbar)},
                           {"hoffman", tmsvs_hoffman(nbar)}};
         }},
        {"pair-coherent", "pair coherent state parity", {"zeta", "phi"},
         [](const Params& p) {
             return Values{{"parity", pair_coherent_parity(Complex(need(p, "zeta"), opt(p, "zeta_im", 0.0)),
                                                           need(p, "phi"))}};
         }},
        {"coh-sq", "coherent (x) squeezed vacuum Fisher information", {"alpha", "r"},
         [](const Params& p) {
             const double a = need(p, "alpha");
             const double s = std::sinh(need(p, "r"));
             return Values{{"fisher", coh_sq_fi(a, need(p, "r"))}, {"dphi_min", coh_sq_dphi_min(a * a + s * s)}};
         }},
        {"coh-sq-prob", "coherent (x) squeezed vacuum joint count probability", {"alpha", "r", "Nc", "Nd", "phi"},
         [](const Params& p) {
             return Values{{"probability", coh_sq_joint_prob(need(p, "alpha"), need(p, "r"), need_int(p, "Nc"),
                                                             need_int(p, "Nd"), need(p, "phi"))}};
         }},
        {"coh-fock", "coherent (x) Fock parity and uncertainties", {"alpha", "N", "phi"},
         [](const Params& p) {
             const auto r = coh_fock_forms(need(p, "alpha"), need_int(p, "N"), need(p, "phi"));
             return Values{{"parity", r.parity}, {"dphi_jz", r.dphi_jz}, {"dphi_min", r.dphi_min}};
         }},
        {"classical-light", "coherent (x) vacuum signals", {"nbar", "phi"},
         [](const Params& p) {
             const auto r = classical_light_forms(need(p, "nbar"), need(p, "phi"));
             return Values{{"two_jz", r.two_jz},       {"dphi_jz", r.dphi_jz},
                           {"parity_a", r.parity_a},   {"parity_b", r.parity_b},
                           {"dphi_parity_a", r.dphi_parity_a}, {"dphi_parity_b", r.dphi_parity_b},
                           {"p_zero", r.p_zero}};
         }},
        {"acs-parity", "Ramsey ground parity for an atomic coherent state", {"N", "phi"},
         [](const Params& p) { return Values{{"parity", acs_parity(need_int(p, "N"), need(p, "phi"))}}; }},
        {"jzop-parity", "Ramsey ground parity for the Jz-operated atomic coherent state", {"N", "phi", "q"},
         [](const Params& p) {
             const int n = need_int(p, "N");
             const int q = static_cast<int>(opt(p, "q", 1.0));
             const double phi = need(p, "phi");
             return Values{{"parity", q == 1 ? jzop_parity(n, phi) : jzop_parity_q(Spin(n), q, phi)}};
         }},
        {"noon-atomic", "Ramsey ground parity for the atomic N00N state", {"N", "theta", "phi"},
         [](const Params& p) {
             return Values{{"parity", noon_parity_atomic(need_int(p, "N"), opt(p, "theta", 0.0), need(p, "phi"))}};
         }},
        {"qrng", "coherent-light parity statistics", {"nbar"},
         [](const Params& p) {
             const auto r = qrng_forms(need(p, "nbar"));
             return Values{{"parity", r.parity}, {"p_even", r.p_even}, {"p_odd", r.p_odd},
                           {"mixed_parity", r.mixed_parity}};
         }},
    };
    return entries;
}

inline const ClosedFormEntry& lookup(const std::string& id) {
    for (const auto& e : registry())
        if (e.id == id) return e;
    throw DomainError("unknown closed form '" + id + "'");
}

}  // namespace paritylab::closed
