#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace paritylab;

TEST(Spin, HalfIntegerLabelsRoundTrip) {
    const Spin s = Spin::from_value(1.5);
    EXPECT_EQ(s.twice(), 3);
    EXPECT_EQ(s.dim(), 4);
    EXPECT_DOUBLE_EQ(s.m_of(0), -1.5);
    EXPECT_EQ(s.index_of(0.5), 2);
    EXPECT_THROW(Spin::from_value(0.3), DomainError);
    EXPECT_THROW(s.index_of(2.5), IndexError);
}

TEST(TwoModeState, RejectsZeroGridAndLargeTail) {
    EXPECT_THROW(TwoModeState(1, 1, std::vector<Complex>(4)), DegenerateState);
    EXPECT_THROW(TwoModeState(0, 0, {Complex(1.0)}, 1e-6), TruncationOverflow);
    EXPECT_THROW(TwoModeState(1, 1, std::vector<Complex>(3, 1.0)), DomainError);
}

TEST(TwoModeState, AmplitudeOutsideGridIsZero) {
    const auto s = fock_pair(2, 1);
    EXPECT_EQ(s.amp(2, 1), Complex(1.0));
    EXPECT_EQ(s.amp(5, 0), Complex{});
    EXPECT_EQ(s.amp(-1, 0), Complex{});
}

TEST(AngularMap, RoundTripPreservesAmplitudes) {
    std::mt19937_64 rng(7);
    std::vector<Complex> amps(4 * 5);
    for (auto& c : amps) c = Complex(std::normal_distribution<>()(rng), std::normal_distribution<>()(rng));
    const TwoModeState s(3, 4, amps);
    const auto back = from_angular(to_angular(s), 3, 4);
    for (int n = 0; n <= 3; ++n)
        for (int q = 0; q <= 4; ++q) EXPECT_EQ(back.amp(n, q), s.amp(n, q));
}

TEST(AngularMap, DickeLabelMatchesModeOccupations) {
    const auto a = to_angular(fock_pair(3, 1));
    const Spin s(4);
    EXPECT_EQ(a.amp(s, 1.0), Complex(1.0));  // j = 2, m = (3 - 1)/2
}

TEST(AngularMap, NarrowWindowThrows) {
    const auto a = to_angular(fock_pair(3, 1));
    EXPECT_THROW(from_angular(a, 2, 4), TruncationOverflow);
}

TEST(AngularState, MixedSectorsHaveNoDefiniteJ) {
    const auto s = to_angular(product(coherent(0.7), fock(1)));
    EXPECT_THROW(s.only_sector(), UnknownAtomNumber);
}

TEST(Operators, GeneratorsMatchLadderMatrices) {
    std::mt19937_64 rng(11);
    for (int tj : {1, 2, 5, 8}) {
        const Spin spin(tj);
        const auto state = oracle::random_sector_state(spin, rng);
        const auto v = oracle::to_vector(state.sector(spin));
        const std::pair<ObservableKind, Eigen::MatrixXcd> cases[] = {
            {ObservableKind::Jx, oracle::jx(spin)}, {ObservableKind::Jy, oracle::jy(spin)},
            {ObservableKind::Jz, oracle::jz(spin)}};
        for (const auto& [kind, mat] : cases) {
            const auto image = oracle::to_vector(apply_operator(state, Observable::of(kind)).sector(spin));
            EXPECT_LT((image - mat * v).norm(), 1e-13);
            const double mean = (v.adjoint() * mat * v)(0, 0).real();
            EXPECT_NEAR(expectation(state, Observable::of(kind)), mean, 1e-13);
            const double second = (v.adjoint() * mat * mat * v)(0, 0).real();
            EXPECT_NEAR(variance(state, Observable::of(kind)), second - mean * mean, 1e-12);
        }
    }
}

TEST(Operators, LadderOnTopStateVanishes) {
    const auto top = dicke(Spin(4), 2.0);
    const auto image = apply_ladder(top, Ladder::Raise);
    EXPECT_LT(image.norm_squared(), 1e-30);
    const auto lowered = apply_ladder(top, Ladder::Lower);
    EXPECT_NEAR(lowered.norm_squared(), 4.0, 1e-12);  // j(j+1) - m(m-1) = 6 - 2
}

TEST(Operators, SigmaCouplesExtremeLevels) {
    const auto mes = maximally_entangled(Spin(5));
    EXPECT_NEAR(expectation(mes, Observable::sigma(5)), 1.0, 1e-14);
    EXPECT_NEAR(expectation(mes, Observable::sigma(4)), 0.0, 1e-14);
    EXPECT_THROW(Observable::sigma(0), DomainError);
}

TEST(ParityWeights, VarianceIsFourEvenOdd) {
    std::mt19937_64 rng(3);
    const auto s = oracle::random_sector_state(Spin(6), rng);
    const auto w = parity_weights(s, Observable::of(ObservableKind::ParityA));
    EXPECT_NEAR(w.even + w.odd, 1.0, 1e-15);
    const double e = expectation(s, Observable::of(ObservableKind::ParityA));
    EXPECT_NEAR(w.variance(), 1.0 - e * e, 1e-14);
    EXPECT_NEAR(variance(s, Observable::of(ObservableKind::ParityA)), 1.0 - e * e, 1e-13);
}

TEST(ParityWeights, GroundAndExcitedDifferBySignOfTwoJ) {
    std::mt19937_64 rng(5);
    for (int tj : {3, 4}) {
        const auto s = oracle::random_sector_state(Spin(tj), rng);
        const double g = expectation(s, Observable::of(ObservableKind::ParityAtomicGround));
        const double x = expectation(s, Observable::of(ObservableKind::ParityAtomicExcited));
        EXPECT_NEAR(g, sign_power(tj) * x, 1e-14);
    }
}

TEST(DensityState, PureStateExpectationsAgree) {
    const auto psi = product(coherent(Complex(0.8, 0.3)), fock(2));
    const auto rho = DensityState::from_pure(psi);
    for (auto kind : {ObservableKind::Jx, ObservableKind::Jz, ObservableKind::ParityB, ObservableKind::NumberA})
        EXPECT_NEAR(expectation(rho, Observable::of(kind)), expectation(psi, Observable::of(kind)), 1e-11);
}

TEST(DensityState, RejectsInvalidMatrices) {
    const std::vector<FockIndex> basis{{0, 0}, {1, 0}};
    Eigen::MatrixXcd m(2, 2);
    m << 0.5, 0.1, 0.2, 0.5;
    EXPECT_THROW(DensityState(basis, m), NotAState);
    m << 0.7, 0.0, 0.0, 0.7;
    EXPECT_THROW(DensityState(basis, m), NotAState);
    m << 1.2, 0.0, 0.0, -0.2;
    EXPECT_THROW(DensityState(basis, m), NotAState);
}

TEST(Wigner, VacuumAndFockValues) {
    EXPECT_NEAR(wigner_at(vacuum(), 0.0), 2.0 / kPi, 1e-12);
    EXPECT_NEAR(wigner_at(fock(1), 0.0), -2.0 / kPi, 1e-12);
    EXPECT_NEAR(wigner_at(fock(2), 0.0), 2.0 / kPi, 1e-12);
}

TEST(Wigner, CoherentStateGaussian) {
    const Complex beta(1.1, -0.4);
    for (Complex alpha : {Complex(0.0), Complex(1.0, 0.0), Complex(1.3, -0.2)}) {
        const double expected = 2.0 / kPi * std::exp(-2.0 * std::norm(alpha - beta));
        EXPECT_NEAR(wigner_at(coherent(beta), alpha), expected, 1e-10);
    }
}

TEST(Truncation, CutoffRule) {
    EXPECT_EQ(truncation_cutoff(0.0), 30);
    EXPECT_EQ(truncation_cutoff(25.0), static_cast<int>(std::ceil(25.0 + 10.0 * std::sqrt(26.0) + 20.0)));
    EXPECT_THROW(truncation_cutoff(-1.0), DomainError);
}
