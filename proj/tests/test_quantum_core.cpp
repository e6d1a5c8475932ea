#include <gtest/gtest.h>

#include <numbers>

#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"
#include "daqc/pauli.hpp"
#include "daqc/state.hpp"
#include "test_util.hpp"

using namespace daqc;
using namespace daqc::test;

TEST(PauliMatrix, SingleAndIdentity) {
    Mat z = pauli_matrix(PauliString("Z"));
    EXPECT_EQ(z(0, 0), cplx(1));
    EXPECT_EQ(z(1, 1), cplx(-1));
    EXPECT_LT((pauli_matrix(PauliString("II")) - Mat::Identity(4, 4)).norm(), 1e-15);
}

TEST(PauliMatrix, XZExplicit) {
    Mat expect = Mat::Zero(4, 4);
    expect(0, 2) = 1;
    expect(1, 3) = -1;
    expect(2, 0) = 1;
    expect(3, 1) = -1;
    EXPECT_LT((pauli_matrix(PauliString("XZ")) - expect).norm(), 1e-15);
}

TEST(PauliMatrix, MatchesKroneckerOracle) {
    const std::string ops = "IXYZ";
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        std::string s;
        for (int q = 0; q < 4; ++q) s += ops[rng() % 4];
        EXPECT_LT((pauli_matrix(PauliString(s)) - pauli_string_oracle(s)).norm(), 1e-14) << s;
    }
}

TEST(PauliString, MultiplyMatchesMatrices) {
    const std::string ops = "IXYZ";
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        std::string a, b;
        for (int q = 0; q < 3; ++q) {
            a += ops[rng() % 4];
            b += ops[rng() % 4];
        }
        const auto [phase, prod] = PauliString(a).multiply(PauliString(b));
        const Mat lhs = pauli_string_oracle(a) * pauli_string_oracle(b);
        EXPECT_LT((lhs - phase * pauli_string_oracle(prod.str())).norm(), 1e-14);
        const bool commute = (lhs - pauli_string_oracle(b) * pauli_string_oracle(a)).norm() < 1e-12;
        EXPECT_EQ(PauliString(a).commutes_with(PauliString(b)), commute);
    }
}

TEST(PauliString, RejectsBadCharacters) { EXPECT_THROW(PauliString("XQ"), ValidationError); }

TEST(PauliSum, CommutatorMatchesDense) {
    PauliSum a(2), b(2);
    a.add(PauliString("XI"), 0.7);
    a.add(PauliString("ZZ"), -0.2);
    b.add(PauliString("YX"), 1.1);
    b.add(PauliString("IZ"), 0.4);
    const Mat dense = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    EXPECT_LT((commutator(a, b).matrix() - dense).norm(), 1e-13);
}

TEST(PauliHamiltonian, SimplifyMergesAndDrops) {
    PauliHamiltonian h(2);
    h.add(1.0, "ZZ").add(-1.0, "ZZ").add(0.5, "XI").add(0.25, "XI");
    const auto s = h.simplified();
    ASSERT_EQ(s.terms().size(), 1u);
    EXPECT_DOUBLE_EQ(s.coefficient("XI"), 0.75);
}

TEST(PauliHamiltonian, DiagonalAgreesWithMatrix) {
    PauliHamiltonian h(3);
    h.add(0.3, "ZZI").add(-1.2, "IZZ").add(0.5, "ZIZ").add(0.1, "ZII");
    ASSERT_TRUE(h.is_diagonal());
    EXPECT_LT((h.diagonal() - h.matrix().diagonal().real()).norm(), 1e-14);
}

TEST(Propagator, Examples) {
    PauliHamiltonian z(1), x(1), zz(2);
    z.add(1.0, "Z");
    x.add(1.0, "X");
    zz.add(1.0, "ZZ");
    EXPECT_LT((propagator(z, 0.0) - Mat::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LT((propagator(x, std::numbers::pi) + Mat::Identity(2, 2)).norm(), 1e-14);
    const cplx a = std::exp(cplx(0, -std::numbers::pi / 4)), b = std::conj(a);
    Mat expect = Mat::Zero(4, 4);
    expect.diagonal() << a, b, b, a;
    EXPECT_LT((propagator(zz, std::numbers::pi / 4) - expect).norm(), 1e-14);
}

TEST(Propagator, MatchesExponentialOracle) {
    std::mt19937_64 rng(11);
    for (int d : {2, 4, 8, 16}) {
        const Mat h = random_hermitian(d, rng);
        for (double t : {-1.3, 0.2, 2.5}) {
            EXPECT_LT((expm_hermitian(h, t) - expm_oracle(h, t)).norm(), 1e-10);
            EXPECT_LT((expm_hermitian(h, t, ExpSign::Plus) - expm_oracle(h, -t)).norm(), 1e-10);
        }
    }
}

TEST(Propagator, InverseAndSemigroupProperties) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat h = random_hermitian(8, rng);
        const double t1 = u(rng), t2 = u(rng);
        const Mat id = Mat::Identity(8, 8);
        EXPECT_LT((expm_hermitian(h, t1) * expm_hermitian(h, -t1) - id).norm(), 1e-9);
        EXPECT_LT((expm_hermitian(h, t1) * expm_hermitian(h, t2) - expm_hermitian(h, t1 + t2)).norm(), 1e-9);
        EXPECT_TRUE(is_unitary(expm_hermitian(h, t1)));
    }
}

TEST(Propagator, RejectsNonHermitian) {
    Mat a = Mat::Zero(2, 2);
    a(0, 1) = 1.0;
    EXPECT_THROW(expm_hermitian(a, 1.0), InvalidHamiltonian);
}

TEST(Evolver, MatchesPropagator) {
    std::mt19937_64 rng(13);
    PauliHamiltonian h(3);
    h.add(0.4, "XZI").add(-0.9, "IYY").add(0.3, "ZZZ").add(0.2, "XII");
    Evolver ev(h);
    Vec psi = random_state(8, rng);
    Vec expect = expm_oracle(h.matrix(), 0.7) * psi;
    ev.apply(psi, 0.7);
    EXPECT_LT((psi - expect).norm(), 1e-10);
}

TEST(Fidelity, Examples) {
    const auto z0 = QuantumState::basis(1, 0), z1 = QuantumState::basis(1, 1);
    EXPECT_NEAR(fidelity(z0, z0), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(z0, z1), 0.0, 1e-12);
    EXPECT_NEAR(fidelity(QuantumState::maximally_mixed(1), z0), 0.5, 1e-12);
}

TEST(Fidelity, SymmetricAndNormalizedOnRandomStates) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = QuantumState::from_density(random_density(4, rng));
        const auto b = QuantumState::from_density(random_density(4, rng));
        EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-10);
        EXPECT_NEAR(fidelity(a, a), 1.0, 1e-10);
        const Vec psi = random_state(4, rng);
        const auto p = QuantumState::from_vector(psi);
        const double oracle = (psi.adjoint() * a.rho() * psi)(0, 0).real();
        EXPECT_NEAR(fidelity(p, a), oracle, 1e-10);
    }
}

TEST(QuantumState, ValidationRejectsBadInput) {
    Vec v = Vec::Zero(4);
    v(0) = 2.0;
    EXPECT_THROW(QuantumState::from_vector(v), InvalidState);
    EXPECT_NO_THROW(QuantumState::from_vector(v, true));
    Mat r = Mat::Identity(2, 2);
    EXPECT_THROW(QuantumState::from_density(r), InvalidState);
    EXPECT_THROW(QuantumState::from_vector(Vec::Ones(3), true), DimensionError);
}

TEST(Norms, Examples) {
    EXPECT_EQ(frobenius_norm(Mat::Zero(2, 2)), 0.0);
    EXPECT_NEAR(frobenius_norm(Mat::Identity(2, 2)), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(frobenius_norm(pauli_matrix(PauliString("XX")), true), 1.0, 1e-15);
    EXPECT_NEAR(spectral_norm(Mat(Mat::Identity(3, 3))), 1.0, 1e-8);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = -1;
    EXPECT_NEAR(spectral_norm(d), 3.0, 1e-7);
}

TEST(Norms, SpectralMatchesSvdAndBoundedByFrobenius) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat h = random_hermitian(16, rng);
        const double s = spectral_norm(h);
        EXPECT_NEAR(s, spectral_oracle(h), 1e-6 * spectral_oracle(h));
        EXPECT_GE(frobenius_norm(h) + 1e-12, s);
    }
}

TEST(Norms, PauliSumSpectralMatchesDense) {
    PauliSum a(4);
    a.add(PauliString("XZII"), 0.5);
    a.add(PauliString("IXZI"), -0.3);
    a.add(PauliString("IIXZ"), 0.8);
    a.add(PauliString("ZIIZ"), 0.1);
    EXPECT_NEAR(spectral_norm(a), spectral_oracle(a.matrix()), 1e-6);
}

TEST(ConjugateByLocal, MatchesDense) {
    std::mt19937_64 rng(16);
    PauliSum h(2);
    h.add(PauliString("XZ"), 0.6);
    h.add(PauliString("YI"), -0.4);
    std::vector<Mat2> layer;
    for (int q = 0; q < 2; ++q) layer.push_back(expm_oracle(random_hermitian(2, rng), 1.0));
    const Mat v = kron(Mat(layer[0]), Mat(layer[1]));
    const Mat expect = v.adjoint() * h.matrix() * v;
    EXPECT_LT((conjugate_by_local(h, layer).matrix() - expect).norm(), 1e-12);
}

TEST(ApplyOnQubits, MatchesEmbeddedMatrix) {
    std::mt19937_64 rng(17);
    const Mat u = expm_oracle(random_hermitian(4, rng), 0.9);
    Vec psi = random_state(16, rng);
    // Qubits (3, 1): build the full operator through a permutation oracle.
    Mat full = Mat::Zero(16, 16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            const int bi3 = (i >> 0) & 1, bi1 = (i >> 2) & 1, bj3 = (j >> 0) & 1, bj1 = (j >> 2) & 1;
            if ((i & 0b1010) != (j & 0b1010)) continue;
            full(i, j) = u(bi3 * 2 + bi1, bj3 * 2 + bj1);
        }
    const Vec expect = full * psi;
    apply_on_qubits(psi, 4, u, {3, 1});
    EXPECT_LT((psi - expect).norm(), 1e-12);
    EXPECT_LT((embed(4, u, {3, 1}) - full).norm(), 1e-12);
}
