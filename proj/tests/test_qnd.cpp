#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace paritylab;

namespace {

// Even-excitation weight summed straight from the amplitudes.
double even_weight(const AngularState& s) {
    const auto [spin, v] = s.only_sector();
    double even = 0.0, total = 0.0;
    for (int k = 0; k < spin.dim(); ++k) {
        total += std::norm((*v)[k]);
        if (k % 2 == 0) even += std::norm((*v)[k]);
    }
    return even / total;
}

const ProtocolOutcome& outcome(const std::vector<ProtocolOutcome>& list, const std::string& label) {
    for (const auto& o : list)
        if (o.label == label) return o;
    throw std::runtime_error("missing outcome " + label);
}

double state_distance(const AngularState& a, const AngularState& b) {
    const auto [spin, v] = a.only_sector();
    double d = 0.0;
    for (int k = 0; k < spin.dim(); ++k) d = std::max(d, std::abs((*v)[k] - b.sector(spin)[k]));
    return d;
}

}  // namespace

TEST(Projectors, ResolveIdentityAndAreOrthogonal) {
    for (int tj = 0; tj <= 9; ++tj) {
        const auto p = parity_projectors(Spin(tj));
        for (int k = 0; k < Spin(tj).dim(); ++k) {
            EXPECT_EQ(p.even[k] + p.odd[k], 1.0);
            EXPECT_EQ(p.even[k] * p.odd[k], 0.0);
            const double c = std::cos(k * kPi / 2);
            EXPECT_NEAR(p.even[k], c * c, 1e-15);
        }
    }
}

TEST(Projectors, WeightsMatchParityExpectation) {
    std::mt19937_64 rng(40);
    for (int tj : {3, 4, 7}) {
        const auto s = oracle::random_sector_state(Spin(tj), rng);
        const auto w = excitation_parity_weights(s);
        const double pi = expectation(s, Observable::of(ObservableKind::ParityAtomicExcited));
        EXPECT_NEAR(w.even, 0.5 * (1 + pi), 1e-12);
        EXPECT_NEAR(w.odd, 0.5 * (1 - pi), 1e-12);
        EXPECT_NEAR(w.even, even_weight(s), 1e-12);
    }
}

TEST(Projectors, AtomicCoherentPartition) {
    const Spin spin(3);
    const auto acs = atomic_coherent(Complex(-1.0), spin);
    const auto w = excitation_parity_weights(acs);
    // Binomial weights C(3,k)/8: even k = {0, 2} gives 4/8.
    EXPECT_NEAR(w.even, (1.0 + 3.0) / 8.0, 1e-15);
    EXPECT_NEAR(w.odd, (3.0 + 1.0) / 8.0, 1e-15);
}

TEST(Projection, IdempotentAndPure) {
    std::mt19937_64 rng(41);
    const auto s = oracle::random_sector_state(Spin(6), rng);
    for (auto branch : {ParityBranch::Even, ParityBranch::Odd}) {
        const auto once = project(s, branch);
        const auto twice = project(once, branch);
        EXPECT_LT(state_distance(once, twice), 1e-15);
        EXPECT_LT(opposite_parity_residual(once, branch), 1e-30);
    }
    EXPECT_THROW(project(dicke(Spin(4), 2.0), ParityBranch::Odd), DegenerateState);
}

TEST(AtomicAncilla, AllExcitedIsDeterministicallyEven) {
    const auto target = dicke(Spin(4), 2.0);
    const auto r = atomic_ancilla_protocol(target, Spin(1), Complex(-1.0), kPi);
    ASSERT_TRUE(r.projective);
    EXPECT_NEAR(outcome(r.outcomes, "even").probability, 1.0, 1e-14);
    EXPECT_NEAR(outcome(r.outcomes, "odd").probability, 0.0, 1e-14);
    EXPECT_FALSE(outcome(r.outcomes, "odd").post_state.has_value());
}

TEST(AtomicAncilla, RandomTargetBranchesAndCollapse) {
    std::mt19937_64 rng(42);
    const auto target = oracle::random_sector_state(Spin(4), rng);
    const double pi = expectation(target, Observable::of(ObservableKind::ParityAtomicExcited));
    for (int tb : {1, 6}) {
        const auto r = atomic_ancilla_protocol(target, Spin(tb), Complex(-1.0), kPi);
        ASSERT_EQ(r.outcomes.size(), 2u);
        const auto& even = outcome(r.outcomes, "even");
        const auto& odd = outcome(r.outcomes, "odd");
        EXPECT_NEAR(even.probability, 0.5 * (1 + pi), 1e-10);
        EXPECT_NEAR(odd.probability, 0.5 * (1 - pi), 1e-10);
        EXPECT_EQ(even.parity, +1);
        EXPECT_EQ(odd.parity, -1);
        EXPECT_LT(opposite_parity_residual(*even.post_state, ParityBranch::Even), 1e-10);
        EXPECT_LT(opposite_parity_residual(*odd.post_state, ParityBranch::Odd), 1e-10);
        // Collapse leaves the surviving amplitudes untouched up to a global phase.
        const auto expected = project(target, ParityBranch::Even);
        const Spin sa(4);
        Complex overlap{};
        for (int k = 0; k < sa.dim(); ++k)
            overlap += std::conj(expected.sector(sa)[k]) * even.post_state->sector(sa)[k];
        EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
    }
}

TEST(AtomicAncilla, SingleAtomAncillaMatchesLargeAncilla) {
    std::mt19937_64 rng(43);
    const auto target = oracle::random_sector_state(Spin(5), rng);
    const auto small = atomic_ancilla_protocol(target, Spin(1), Complex(-1.0), kPi);
    const auto large = atomic_ancilla_protocol(target, Spin(6), Complex(-1.0), kPi);
    for (const char* label : {"even", "odd"})
        EXPECT_NEAR(outcome(small.outcomes, label).probability, outcome(large.outcomes, label).probability, 1e-12);
}

TEST(AtomicAncilla, JointStateMatchesMatrixEvolution) {
    std::mt19937_64 rng(44);
    const Spin sa(3), sb(2);
    const auto target = oracle::random_sector_state(sa, rng);
    const auto acs = atomic_coherent(Complex(-1.0), sb);
    const Eigen::MatrixXcd pulse = oracle::expm_rotation(oracle::jy(sb), -kPi / 2);
    for (double chi_t : {kPi, 0.7}) {
        const auto r = atomic_ancilla_protocol(target, sb, Complex(-1.0), chi_t);
        for (int ka = 0; ka < sa.dim(); ++ka) {
            // exp(-i chi_t n_a n_b) on |ka> (x) ACS, then the readout pulse on the ancilla
            Eigen::VectorXcd anc(sb.dim());
            for (int kb = 0; kb < sb.dim(); ++kb)
                anc(kb) = target.sector(sa)[ka] * acs.sector(sb)[kb] * std::polar(1.0, -chi_t * ka * kb);
            const Eigen::VectorXcd after = pulse * anc;
            for (int kb = 0; kb < sb.dim(); ++kb) {
                EXPECT_NEAR(std::abs(r.joint(ka, kb) - anc(kb)), 0.0, 1e-13);
                EXPECT_NEAR(std::abs(r.readout(ka, kb) - after(kb)), 0.0, 1e-12);
            }
        }
    }
}

TEST(AtomicAncilla, GeneralCouplingReturnsEntangledState) {
    std::mt19937_64 rng(45);
    const auto target = oracle::random_sector_state(Spin(4), rng);
    const auto r = atomic_ancilla_protocol(target, Spin(2), Complex(-1.0), kPi / 2);
    EXPECT_FALSE(r.projective);
    double total = 0.0;
    for (const auto& o : r.outcomes) {
        EXPECT_EQ(o.parity, 0);
        total += o.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_GT(r.outcomes.size(), 2u);
}

TEST(AtomicAncilla, RequiresDefiniteAtomNumber) {
    const auto mixed = to_angular(product(coherent(0.5), fock(1)));
    EXPECT_THROW(atomic_ancilla_protocol(mixed, Spin(1), Complex(-1.0), kPi), UnknownAtomNumber);
    EXPECT_THROW(field_ancilla_protocol(mixed, 3.0), UnknownAtomNumber);
}

TEST(FieldAncilla, EvenOnlyTargetOnFourAtomsClicksAtB) {
    const Spin spin(4);
    std::vector<Complex> c(spin.dim());
    c[0] = 0.6;
    c[2] = Complex(0.0, 0.8);
    const auto target = AngularState::single(spin, c);
    const auto r = field_ancilla_protocol(target, 3.0);
    const auto& b = outcome(r.outcomes, "b");
    EXPECT_NEAR(b.probability, 1.0, 1e-14);
    EXPECT_EQ(b.parity, +1);
    EXPECT_LT(state_distance(*b.post_state, target), 1e-15);
    EXPECT_NEAR(r.distinguishability, 1.0 - std::exp(-18.0), 1e-16);
}

TEST(FieldAncilla, PortAssignmentFollowsAtomNumberModFour) {
    // Even levels go to b for N = 0, 1 mod 4 and to c for N = 2, 3 mod 4.
    for (int n = 1; n <= 8; ++n) {
        const auto r = field_ancilla_protocol(dicke(Spin(n), -0.5 * n), 3.0);
        const bool expect_b = n % 4 == 0 || n % 4 == 1;
        EXPECT_EQ(outcome(r.outcomes, "b").parity, expect_b ? +1 : -1) << "N=" << n;
        EXPECT_NEAR(outcome(r.outcomes, expect_b ? "b" : "c").probability, 1.0, 1e-14) << "N=" << n;
    }
}

TEST(FieldAncilla, RandomTargetWeightsAndPostStates) {
    std::mt19937_64 rng(46);
    const auto target = oracle::random_sector_state(Spin(4), rng);
    const double pi = expectation(target, Observable::of(ObservableKind::ParityAtomicExcited));
    const auto r = field_ancilla_protocol(target, 3.0);
    const auto& b = outcome(r.outcomes, "b");
    const auto& c = outcome(r.outcomes, "c");
    EXPECT_NEAR(b.probability, 0.5 * (1 + pi), 1e-10);
    EXPECT_NEAR(c.probability, 0.5 * (1 - pi), 1e-10);
    EXPECT_LT(opposite_parity_residual(*b.post_state, ParityBranch::Even), 1e-10);
    EXPECT_LT(opposite_parity_residual(*c.post_state, ParityBranch::Odd), 1e-10);
    EXPECT_THROW(field_ancilla_protocol(target, 3.0, kPi / 2), DomainError);
    EXPECT_THROW(field_ancilla_protocol(target, 0.0), DomainError);
}

TEST(FieldAncilla, CoherentFastPathMatchesFockEvolution) {
    const Complex alpha(3.0, 0.0);
    const auto field = coherent(alpha);
    for (int tj : {3, 4}) {
        const Spin spin(tj);
        const auto fast = coupled_fields(spin, alpha, kPi);
        for (int k = 0; k < spin.dim(); ++k) {
            const auto expected = coherent(fast[k], field.n_max_a());
            for (int n = 0; n <= field.n_max_a(); ++n) {
                const Complex evolved = field.amp(n, 0) * std::polar(1.0, -kPi * n * spin.m_of(k));
                EXPECT_NEAR(std::abs(evolved - expected.amp(n, 0)), 0.0, 1e-10);
            }
        }
    }
}

TEST(FieldAncilla, RecombinationEmptiesTheDarkPort) {
    const Complex alpha(3.0, 0.0);
    for (int tj : {1, 2, 3, 4}) {
        const Spin spin(tj);
        const auto ref = reference_field(spin, alpha);
        for (int k : {0, 1}) {
            const Complex x = coupled_fields(spin, alpha, kPi)[k];
            const auto [to_b, to_c] = recombine(x, ref);
            const auto out = rotate(product(coherent(x), coherent(ref)), {Axis::Y, -kPi / 2});
            // Whichever port the classical fields leave dark carries no photons in the full evolution.
            const bool b_dark = std::abs(to_b) < 1e-9;
            double leaked = 0.0;
            for (int n = 0; n <= out.n_max_a(); ++n)
                for (int q = 0; q <= out.n_max_b(); ++q)
                    if (b_dark ? n > 0 : q > 0) leaked += std::norm(out.amp(n, q));
            EXPECT_LT(leaked, 1e-12) << "2j=" << tj << " k=" << k;
            EXPECT_NEAR(std::abs(b_dark ? to_c : to_b), std::sqrt(2.0) * 3.0, 1e-12);
        }
    }
}

TEST(Sampling, FrequenciesWithinFourSigma) {
    std::mt19937_64 rng(47);
    const auto target = oracle::random_sector_state(Spin(4), rng);
    auto r = field_ancilla_protocol(target, 3.0);
    const long long shots = 100000;
    sample(r, shots, 2024);
    const double p = outcome(r.outcomes, "b").probability;
    const double freq = static_cast<double>(outcome(r.outcomes, "b").shots_observed) / shots;
    EXPECT_LT(std::abs(freq - p), 4.0 * std::sqrt(p * (1 - p) / shots));

    auto again = field_ancilla_protocol(target, 3.0);
    sample(again, shots, 2024);
    EXPECT_EQ(outcome(again.outcomes, "b").shots_observed, outcome(r.outcomes, "b").shots_observed);
    EXPECT_EQ(again.no_click_shots, r.no_click_shots);

    auto atomic = atomic_ancilla_protocol(target, Spin(1), Complex(-1.0), kPi);
    sample(atomic, shots, 7);
    long long total = 0;
    for (const auto& o : atomic.outcomes) total += o.shots_observed;
    EXPECT_EQ(total, shots);
    EXPECT_THROW(sample_counts({0.5, 0.5}, -1, 0), DomainError);
}
