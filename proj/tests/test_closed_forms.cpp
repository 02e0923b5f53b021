#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"

using namespace paritylab;

namespace {

const Observable kParityB = Observable::of(ObservableKind::ParityB);
const Observable kGround = Observable::of(ObservableKind::ParityAtomicGround);

std::vector<Complex> random_coefficients(Spin spin, std::mt19937_64& rng, bool complex) {
    std::normal_distribution<> g;
    std::vector<Complex> c(spin.dim());
    double n = 0.0;
    for (auto& x : c) {
        x = Complex(g(rng), complex ? g(rng) : 0.0);
        n += std::norm(x);
    }
    for (auto& x : c) x /= std::sqrt(n);
    return c;
}

}  // namespace

TEST(EntangledCoherent, ParitySignalMatchesSimulation) {
    const double alpha = 1.3;
    const Complex beta = alpha / std::sqrt(2.0);
    const auto in = to_angular(product(coherent(beta), cat(-kI * beta, kPi / 2)));
    for (double phi : {0.0, 0.37, 1.4}) {
        const auto p = signal(in, SequenceSpec::mzi(), kParityB, phi);
        const auto f = closed::ecs_parity(alpha * alpha, phi);
        EXPECT_NEAR(p.expectation, f.expectation, 1e-11);
        EXPECT_NEAR(p.derivative, f.derivative, 1e-10);
        if (phi == 0.0) {
            EXPECT_NEAR(p.delta_phi, f.dphi_at_zero, 1e-10);
        }
    }
}

TEST(EntangledCoherent, QfiLargeAmplitudeForm) {
    const Complex beta = std::polar(1.2, 0.3);
    const Complex gamma = std::polar(3.5, -0.4);
    const double exact = qfi_pure(product(coherent(beta), cat(gamma, kPi / 2)), SequenceSpec::mzi());
    EXPECT_NEAR(exact, closed::ecs_qfi(beta, gamma), 1e-6 * exact);
}

TEST(Noon, OutputParityMatchesSimulation) {
    for (int n = 1; n <= 6; ++n)
        for (double phi : {0.1, 0.37, 2.0}) {
            const double sim = signal(fock(n), SequenceSpec::magic_noon(0.4), kParityB, phi).expectation;
            EXPECT_NEAR(sim, closed::noon_parity(n, 0.4, phi), 1e-12) << "N=" << n;
        }
}

TEST(TwinFock, LegendreParityAndQfi) {
    for (int n : {1, 3, 6})
        for (double phi : {0.2, 0.9}) {
            const auto f = closed::twin_fock_forms(n, phi);
            const auto in = twin_fock(n);
            EXPECT_NEAR(signal(in, SequenceSpec::mzi_jy_first(), kParityB, phi).expectation, f.parity, 1e-12);
            // The plain MZI ordering differs by a global (-1)^N.
            EXPECT_NEAR(signal(in, SequenceSpec::mzi(), kParityB, phi).expectation, sign_power(n) * f.parity, 1e-12);
            EXPECT_NEAR(qfi_pure(in, SequenceSpec::mzi()), f.qfi, 1e-10);
        }
}

TEST(Correlated, TmsvsAndPairCoherent) {
    for (double phi : {0.3, kPi / 2, 1.9}) {
        const double r = 0.7;
        const double sim = signal(tmsvs_from_squeeze(r), SequenceSpec::mzi_jy_first(), kParityB, phi).expectation;
        EXPECT_NEAR(sim, closed::tmsvs_parity(r, phi), 1e-10);
        const Complex zeta(1.1, 0.0);
        const double pc = signal(pair_coherent(zeta), SequenceSpec::mzi_jy_first(), kParityB, phi).expectation;
        EXPECT_NEAR(pc, closed::pair_coherent_parity(zeta, phi), 1e-10);
    }
    for (double r : {0.2, 0.7, 1.3}) EXPECT_NEAR(closed::tmsvs_parity(r, kPi / 2), closed::tmsvs_parity_half_pi(r), 1e-12);
}

TEST(Correlated, TmsvsBoundsFromQfi) {
    const double r = 0.6;
    const double s = std::sinh(r);
    const double nbar = 2.0 * s * s;
    const double qfi = qfi_pure(tmsvs_from_squeeze(r), SequenceSpec::mzi());
    EXPECT_NEAR(1.0 / std::sqrt(qfi), closed::tmsvs_dphi_min(nbar), 1e-9);
    EXPECT_LE(closed::tmsvs_hoffman(nbar), closed::tmsvs_dphi_min(nbar));
}

TEST(CoherentSqueezed, FisherAndJointCounts) {
    const double alpha = 1.1, r = 0.4;
    const auto in = product(coherent(alpha), squeezed_vacuum(r));
    EXPECT_NEAR(qfi_pure(in, SequenceSpec::mzi()), closed::coh_sq_fi(alpha, r), 1e-9);
    const double phi = 0.8;
    const auto out = run_sequence(in, SequenceSpec::mzi(), phi);
    for (int nc = 0; nc <= 4; ++nc)
        for (int nd = 0; nd <= 4; ++nd)
            EXPECT_NEAR(std::norm(out.amp(nc, nd)), closed::coh_sq_joint_prob(alpha, r, nc, nd, phi), 1e-12)
                << nc << "," << nd;
    EXPECT_THROW(closed::coh_sq_joint_prob(alpha, r, -1, 0, phi), DomainError);
}

TEST(CoherentSqueezed, SvsCoefficientMatchesState) {
    const auto s = squeezed_vacuum(0.9);
    for (int n = 0; n < 12; ++n) EXPECT_NEAR(s.amp(n, 0).real(), closed::svs_coefficient(n, 0.9), 1e-12);
}

TEST(CoherentFock, ParityAndUncertainties) {
    const Complex alpha(1.1, 0.0);
    for (int n : {1, 2, 4})
        for (double phi : {0.37, 1.2}) {
            const auto in = to_angular(product(coherent(alpha), fock(n)));
            const auto f = closed::coh_fock_forms(alpha, n, phi);
            EXPECT_NEAR(signal(in, SequenceSpec::mzi(), kParityB, phi).expectation, f.parity, 1e-11);
            EXPECT_NEAR(signal(in, SequenceSpec::mzi(), Observable::of(ObservableKind::Jz), phi).delta_phi, f.dphi_jz,
                        1e-9 * f.dphi_jz);
            EXPECT_NEAR(1.0 / std::sqrt(qfi_pure(in, SequenceSpec::mzi())), f.dphi_min, 1e-10);
        }
}

TEST(ClassicalLight, AllSignals) {
    const double nbar = 4.0;
    const auto in = to_angular(product(coherent(2.0), vacuum()));
    for (double phi : {0.37, 1.7}) {
        const auto f = closed::classical_light_forms(nbar, phi);
        auto sig = [&](ObservableKind k) { return signal(in, SequenceSpec::mzi(), Observable::of(k), phi); };
        EXPECT_NEAR(sig(ObservableKind::TwoJz).expectation, f.two_jz, 1e-10);
        EXPECT_NEAR(sig(ObservableKind::TwoJz).delta_phi, f.dphi_jz, 1e-9);
        EXPECT_NEAR(sig(ObservableKind::ParityA).expectation, f.parity_a, 1e-12);
        EXPECT_NEAR(sig(ObservableKind::ParityB).expectation, f.parity_b, 1e-12);
        EXPECT_NEAR(sig(ObservableKind::ParityA).delta_phi, f.dphi_parity_a, 1e-8 * f.dphi_parity_a);
        EXPECT_NEAR(sig(ObservableKind::ParityB).delta_phi, f.dphi_parity_b, 1e-8 * f.dphi_parity_b);
        EXPECT_NEAR(sig(ObservableKind::ZeroPhotonA).expectation, f.p_zero, 1e-12);
    }
}

TEST(Ramsey, AtomicCoherentAndMaximallyEntangled) {
    for (int n : {1, 3, 4, 7})
        for (double phi : {0.37, 1.1}) {
            const Spin spin(n);
            const auto f = closed::ramsey_signals(n, phi);
            const auto acs = dicke(spin, -spin.value());
            const auto jz = signal(acs, SequenceSpec::ramsey(), Observable::of(ObservableKind::Jz), phi);
            EXPECT_NEAR(jz.expectation, f.jz_acs, 1e-12);
            EXPECT_NEAR(jz.delta_phi, f.dphi_acs, 1e-9);
            EXPECT_NEAR(signal(acs, SequenceSpec::ramsey(), kGround, phi).expectation, closed::acs_parity(n, phi), 1e-12);
            const auto mes = rotate(maximally_entangled(spin), {Axis::Y, -kPi / 2});
            const auto par = signal(mes, SequenceSpec::ramsey(), kGround, phi);
            EXPECT_NEAR(par.expectation, f.parity_mes, 1e-12);
            EXPECT_NEAR(par.delta_phi, f.dphi_mes, 1e-9);
        }
    EXPECT_NEAR(closed::ramsey_signals(1, 0.5).jz_single, 0.5 * std::cos(0.5), 1e-16);
}

TEST(Ramsey, GeneralFormsForRealAndComplexCoefficients) {
    std::mt19937_64 rng(17);
    const auto jz_op = Observable::of(ObservableKind::Jz);
    for (int tj : {1, 3, 4, 8})
        for (bool complex : {false, true}) {
            const Spin spin(tj);
            const auto c = random_coefficients(spin, rng, complex);
            const auto s = AngularState::single(spin, c);
            for (double phi : {0.41, 2.2}) {
                const auto out = run_sequence(s, SequenceSpec::ramsey_prepared(), phi);
                EXPECT_NEAR(expectation(out, jz_op), closed::jz_general(spin, c, phi), 1e-12);
                EXPECT_NEAR(second_moment(out, jz_op), closed::jz_sq_general(spin, c, phi), 1e-11);
                EXPECT_NEAR(expectation(out, kGround), closed::parity_general(spin, c, phi), 1e-12);
            }
        }
    EXPECT_THROW(closed::jz_general(Spin(2), {Complex(1.0)}, 0.1), DomainError);
}

TEST(Ramsey, JzOperatedStates) {
    for (int n : {1, 2, 3, 4, 9})
        for (double phi : {0.2, 0.41, 1.3}) {
            const Spin spin(n);
            const double sim =
                signal(jz_operated_acs(spin, 1), SequenceSpec::ramsey_prepared(), kGround, phi).expectation;
            EXPECT_NEAR(sim, closed::jzop_parity(n, phi), 1e-12) << "N=" << n;
            EXPECT_NEAR(closed::jzop_parity_q(spin, 1, phi), closed::jzop_parity(n, phi), 1e-12);
            for (int q : {2, 3}) {
                const double simq =
                    signal(jz_operated_acs(spin, q), SequenceSpec::ramsey_prepared(), kGround, phi).expectation;
                EXPECT_NEAR(simq, closed::jzop_parity_q(spin, q, phi), 1e-12);
            }
        }
}

TEST(Ramsey, AtomicNoon) {
    for (int n : {2, 3, 5}) {
        const Spin spin(n);
        std::vector<Complex> c(spin.dim());
        c.front() = std::polar(std::sqrt(0.5), 0.3);  // phase on m = -j
        c.back() = std::sqrt(0.5);
        const auto s = AngularState::single(spin, c);
        for (double phi : {0.1, 0.41})
            EXPECT_NEAR(signal(s, SequenceSpec::ramsey_prepared(), kGround, phi).expectation,
                        closed::noon_parity_atomic(n, 0.3, phi), 1e-12);
    }
}

TEST(Qrng, PoissonParitySums) {
    for (double nbar : {0.1, 1.0, 9.0, 30.0}) {
        double even = 0.0, odd = 0.0;
        for (int n = 0; n < 200; ++n) (n % 2 == 0 ? even : odd) += oracle::poisson(nbar, n);
        const auto f = closed::qrng_forms(nbar);
        EXPECT_NEAR(f.p_even, even, 1e-13);
        EXPECT_NEAR(f.p_odd, odd, 1e-13);
        EXPECT_NEAR(f.parity, even - odd, 1e-13);
    }
    EXPECT_NEAR(expectation(coherent(std::sqrt(2.0)), Observable::of(ObservableKind::ParityA)),
                closed::qrng_forms(2.0).parity, 1e-14);
    EXPECT_THROW(closed::qrng_forms(-1.0), DomainError);
}

TEST(Registry, EveryEntryEvaluatesFromItsParameterList) {
    std::set<std::string> ids;
    for (const auto& e : closed::registry()) {
        EXPECT_TRUE(ids.insert(e.id).second) << "duplicate id " << e.id;
        closed::Params p;
        for (const auto& name : e.params) p[name] = 1.0;
        const auto v = e.evaluate(p);
        EXPECT_FALSE(v.empty());
        for (const auto& [k, x] : v) EXPECT_FALSE(std::isnan(x)) << e.id << "." << k;
    }
    EXPECT_NEAR(closed::lookup("qrng").evaluate({{"nbar", 9.0}}).at("p_even"), 0.5, 1e-7);
    EXPECT_THROW(closed::lookup("no-such-form"), DomainError);
    EXPECT_THROW(closed::lookup("twin-fock").evaluate({{"phi", 0.1}}), DomainError);
    EXPECT_THROW(closed::lookup("twin-fock").evaluate({{"N", 1.5}, {"phi", 0.1}}), DomainError);
}
