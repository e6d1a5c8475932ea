#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "daqc/cross_resonance.hpp"
#include "daqc/errors.hpp"
#include "test_util.hpp"

using namespace daqc;
using namespace daqc::test;

namespace {

constexpr double kPi = std::numbers::pi;

double distance(const PauliHamiltonian& a, const PauliHamiltonian& b) {
    return (a.to_sum() - b.to_sum()).frobenius_norm();
}

Mat2 hadamard() {
    Mat2 h;
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

Mat layer_matrix(const std::vector<Mat2>& layer) {
    Mat m = Mat::Identity(1, 1);
    for (const auto& u : layer) m = kron(m, Mat(u));
    return m;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

CRParams params(double g, double omega, double delta) {
    CRParams p;
    p.g = g;
    p.omega = omega;
    p.delta = delta;
    return p;
}

}  // namespace

TEST(CRParams, CouplingSign) {
    const auto p = params(2.0, 0.1, 1.0);
    EXPECT_NEAR(p.J(), -0.05, 1e-15);
    EXPECT_TRUE(p.weak_driving());
    EXPECT_FALSE(params(1.0, 0.5, 1.0).weak_driving());
    CRParams q = p;
    q.g_k = {1.0, 3.0};
    EXPECT_NEAR(q.J(1), -3.0 * 0.1 / 4.0, 1e-15);
    EXPECT_THROW(params(1.0, 0.1, 0.0).validate(), ParamError);
}

TEST(CRHamiltonian, TwoQubitForm) {
    const auto p = params(1.0, 0.1, 2.0);
    PauliHamiltonian expect(2);
    expect.add(1.0 * 0.1 / 8.0, "XX");
    EXPECT_LT(distance(cr_two_qubit_hamiltonian(p), expect), 1e-15);
}

TEST(CRHamiltonian, ThreeSiteChain) {
    const auto p = params(1.0, 0.1, 1.0);
    const double J = p.J();
    PauliHamiltonian expect(3);
    expect.add(J, "XZI").add(J, "IXZ");
    LatticeSpec lat;
    lat.n = 3;
    EXPECT_LT(distance(cr_hamiltonian(p, lat), expect), 1e-15);
}

TEST(CRHamiltonian, PhaseDifferenceRotatesTarget) {
    CRParams p = params(1.0, 0.1, 1.0);
    p.phi_k = {0.3, 0.1};
    LatticeSpec lat;
    lat.n = 2;
    PauliHamiltonian expect(2);
    expect.add(p.J() * std::cos(0.2), "XZ").add(-p.J() * std::sin(0.2), "XY");
    EXPECT_LT(distance(cr_hamiltonian(p, lat), expect), 1e-15);
}

TEST(CRHamiltonian, SquareLatticeBonds) {
    const auto p = params(1.0, 0.1, 1.0);
    LatticeSpec lat{LatticeKind::Square, 2, Boundary::Open};
    const auto h = cr_hamiltonian(p, lat);
    PauliHamiltonian expect(4);
    expect.add(p.J(), "XZII").add(p.J(), "XIZI").add(p.J(), "IXIZ").add(p.J(), "IIXZ");
    EXPECT_LT(distance(h, expect), 1e-15);
    EXPECT_EQ(lat.qubit_count(), 4);
}

TEST(Toggle, HadamardOnEvenSites) {
    const int n = 6;
    const double J = 0.7;
    PauliHamiltonian ha(n);
    for (int k = 0; k + 1 < n; ++k) ha.add(J, PauliString::pair(n, 'X', k, 'Z', k + 1));
    const auto even = toggle(ha, layer_on(n, hadamard(), even_sites(n)));
    PauliHamiltonian expect(n);
    // 1-based pairs (2k-1, 2k) get XX, pairs (2k, 2k+1) get ZZ.
    for (int k = 0; k + 1 < n; ++k) expect.add(J, PauliString::pair(n, k % 2 ? 'Z' : 'X', k, k % 2 ? 'Z' : 'X', k + 1));
    EXPECT_LT(distance(even, expect), 1e-12);
    EXPECT_LT(distance(even, h_even(n, J)), 1e-12);
    const auto odd = toggle(even, layer_on(n, hadamard(), {0, 1, 2, 3, 4, 5}));
    EXPECT_LT(distance(odd, h_odd(n, J)), 1e-12);
}

TEST(Toggle, IdentityLeavesUnchanged) {
    LatticeSpec lat;
    lat.n = 4;
    const auto h = cr_hamiltonian(params(1.0, 0.1, 1.0), lat);
    EXPECT_LT(distance(toggle(h, layer_on(4, Mat2::Identity(), {})), h), 1e-15);
}

TEST(Toggle, MatchesConjugationOracle) {
    std::mt19937_64 rng(71);
    LatticeSpec lat;
    lat.n = 4;
    const auto h = cr_hamiltonian(params(1.0, 0.1, 1.0), lat);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Mat2> layer;
        for (int q = 0; q < 4; ++q) layer.push_back(expm_oracle(random_hermitian(2, rng), 1.0));
        const auto t = toggle(h, layer);
        const Mat v = layer_matrix(layer);
        const Mat expect = v.adjoint() * h.matrix() * v;
        EXPECT_LT((t.matrix() - expect).norm(), 1e-12);
        EXPECT_TRUE(t.to_sum().is_hermitian());
        EXPECT_NEAR(spectral_oracle(t.matrix()), spectral_oracle(h.matrix()), 1e-10);
    }
}

TEST(Toggle, RejectsBadLayers) {
    LatticeSpec lat;
    lat.n = 3;
    const auto h = cr_hamiltonian(params(1.0, 0.1, 1.0), lat);
    EXPECT_THROW(toggle(h, layer_on(2, hadamard(), {0})), InvalidLayer);
    auto bad = layer_on(3, hadamard(), {0});
    bad[1] = Mat2::Identity() * 2.0;
    EXPECT_THROW(toggle(h, bad), InvalidLayer);
}

TEST(Toggle, SelectiveBlocksCommute) {
    for (int n = 3; n <= 8; ++n) {
        const Mat a = h_qf_selective(n, 0.8, true).matrix();
        const Mat b = h_qf_selective(n, 0.8, false).matrix();
        EXPECT_LT(commutator(a, b).norm(), 1e-12) << n;
        EXPECT_LT(commutator(h_odd(n, 0.8).matrix(), h_even(n, 0.8).matrix()).norm(), 1e-12) << n;
    }
}

TEST(Rotations, REPermutesPaulis) {
    const Mat2 re = r_e();
    Mat2 expect = Mat2::Identity() - cplx(0, 1) * (pauli_oracle('X') + pauli_oracle('Y') + pauli_oracle('Z'));
    EXPECT_LT((Mat(re) - Mat(expect) / 2.0).norm(), 1e-14);
    const Mat2 x = pauli_oracle('X'), y = pauli_oracle('Y'), z = pauli_oracle('Z');
    // Conjugation by R_E cycles X -> Z -> Y -> X; three applications give -I.
    EXPECT_LT((Mat(re * re * re) + Mat::Identity(2, 2)).norm(), 1e-14);
    const Mat2 rx = re.adjoint() * x * re, ry = re.adjoint() * y * re, rz = re.adjoint() * z * re;
    EXPECT_LT((rx - z).norm(), 1e-14);
    EXPECT_LT((ry - x).norm(), 1e-14);
    EXPECT_LT((rz - y).norm(), 1e-14);
    EXPECT_LT((Mat(r_x_half_pi()) - expm_oracle(pauli_oracle('X'), kPi / 4)).norm(), 1e-14);
}

TEST(Parts, HeisenbergPartsSumToTarget) {
    for (int n : {3, 4, 6}) {
        const auto parts = heisenberg_parts(n, 0.6);
        const auto sum = parts.h_e + parts.h_e1 + parts.h_e2;
        // Each bond's ZZ term is rotated through XX, YY and ZZ.
        EXPECT_LT(distance(sum, heisenberg_chain(n, 0.6)), 1e-12) << n;
    }
}

TEST(Parts, XY2DPartsSumToTarget) {
    for (int n : {2, 4}) {
        const auto parts = xy2d_parts(n, 0.5, Boundary::Periodic);
        EXPECT_LT(distance(parts.h_i + parts.h_ii, xy_square(n, 0.5, Boundary::Periodic)), 1e-12) << n;
    }
}

TEST(Protocols, IsingAndXYChainsAreExact) {
    const auto p = params(1.0, 0.1, 1.0);
    const double J = std::abs(p.J());
    for (SpinModel m : {SpinModel::Ising, SpinModel::XY}) {
        for (double tau : {0.1 / J, 1.0 / J, 10.0 / J}) {
            LatticeSpec lat;
            lat.n = 4;
            const auto r = simulate_spin_model(m, lat, p, 3 * tau, tau);
            EXPECT_EQ(r.steps, 3);
            EXPECT_LT(r.error, 1e-8) << to_string(m) << " " << tau;
            EXPECT_TRUE(r.trotter_free);
            const Mat exact = expm_oracle(r.target.matrix(), 3 * tau);
            EXPECT_LT((exact - r.exact).norm(), 1e-8);
        }
    }
}

TEST(Protocols, IsingExampleFromPairwiseBlocks) {
    const auto p = params(1.0, 0.1, 1.0);
    const double J = std::abs(p.J());
    LatticeSpec lat;
    lat.n = 4;
    const auto r = simulate_spin_model(SpinModel::Ising, lat, p, 2.1 / J, 0.7 / J);
    EXPECT_EQ(r.steps, 3);
    EXPECT_LT(r.error, 1e-8);
}

TEST(Protocols, HeisenbergIsFirstOrder) {
    const auto p = params(1.0, 0.4, 1.0);
    const double J = std::abs(p.J());
    LatticeSpec lat;
    lat.n = 4;
    const double T = 1.0 / J;
    const double e1 = simulate_spin_model(SpinModel::Heisenberg, lat, p, T, T / 8).error;
    const double e2 = simulate_spin_model(SpinModel::Heisenberg, lat, p, T, T / 16).error;
    EXPECT_GT(e1, 1e-6);
    EXPECT_NEAR(e1 / e2, 2.0, 0.6);
}

TEST(Protocols, UnsupportedCombinations) {
    const auto p = params(1.0, 0.1, 1.0);
    LatticeSpec sq{LatticeKind::Square, 2, Boundary::Periodic};
    EXPECT_THROW(simulate_spin_model(SpinModel::Ising, sq, p, 1.0, 0.5), Unsupported);
    EXPECT_THROW(simulate_spin_model(SpinModel::Heisenberg, sq, p, 1.0, 0.5), Unsupported);
    LatticeSpec chain;
    chain.n = 4;
    EXPECT_THROW(simulate_spin_model(SpinModel::Ising, chain, p, 1.0, 0.3), Unsupported);
}

TEST(Bounds, HeisenbergCommutator) {
    for (int n : {3, 4, 5}) {
        const auto b = heisenberg_commutator_bound(n, 1.0);
        const auto parts = heisenberg_parts(n, 1.0);
        const Mat a = parts.h_e.matrix(), a1 = parts.h_e1.matrix(), a2 = parts.h_e2.matrix();
        const double oracle = spectral_oracle(commutator(a, a1) + commutator(a, a2) + commutator(a1, a2));
        EXPECT_NEAR(b.numeric, oracle, 1e-9) << n;
        EXPECT_DOUBLE_EQ(b.bound, 6.0 * n);
        EXPECT_DOUBLE_EQ(b.digital_bound, 12.0 * n);
        EXPECT_LE(b.numeric, b.bound);
        EXPECT_LE(b.bound, b.digital_bound / 2 + 1e-12);
        EXPECT_TRUE(b.holds);
    }
    const double j1 = heisenberg_commutator_bound(4, 1.0).numeric;
    EXPECT_NEAR(heisenberg_commutator_bound(4, 0.3).numeric, 0.09 * j1, 1e-10);
}

TEST(Bounds, XY2DSmallTorus) {
    const auto b = xy2d_commutator_norm(2, 1.0);
    const auto parts = xy2d_parts(2, 1.0, Boundary::Periodic);
    EXPECT_NEAR(b.numeric, spectral_oracle(commutator(parts.h_i.matrix(), parts.h_ii.matrix())), 1e-9);
    EXPECT_LE(b.numeric, 16.0);
    EXPECT_DOUBLE_EQ(b.digital_bound, 96.0);
    EXPECT_EQ(xy2d_commutator_norm(2, 0.0).numeric, 0.0);
    EXPECT_THROW(xy2d_commutator_norm(3, 1.0), Unsupported);
}

TEST(Bounds, XY2DFourByFourWithinExtensiveBound) {
    const auto b = xy2d_commutator_norm(4, 1.0);
    EXPECT_GT(b.numeric, 0.0);
    EXPECT_LE(b.numeric, b.loose_bound);
    EXPECT_DOUBLE_EQ(b.loose_bound, 256.0);
    EXPECT_DOUBLE_EQ(b.digital_bound, 384.0);
}

TEST(Synthesis, ModelAClosedFormAndExplicit) {
    EXPECT_NEAR(synthesis_error_norm(2, 1.0, SynthesisModel::A, 0.0), 1 / (2 * std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(synthesis_error_norm(5, 2.0, SynthesisModel::A, 0.0), std::sqrt(2.0), 1e-12);
    for (int n : {2, 3, 5})
        for (double t : {0.0, 0.37, 2.1}) {
            const double explicit_norm = synthesis_delta_h(n, 2.0, 3.0, t).to_sum().frobenius_norm(true);
            EXPECT_NEAR(explicit_norm, synthesis_error_norm(n, 2.0, SynthesisModel::A, t), 1e-9);
        }
}

TEST(Synthesis, XYClosedForm) {
    EXPECT_NEAR(synthesis_error_norm(3, 1.0, SynthesisModel::XY, 0.4), std::sqrt(2.0) / 2, 1e-12);
    const auto h = synthesis_delta_h_xy(3, 1.0, 2.0, 0.1, 0.4);
    EXPECT_TRUE(h.to_sum().is_hermitian());
    EXPECT_THROW(synthesis_delta_h_xy(3, 1.0, 0.0, 0.1, 0.4), ParamError);
}

TEST(Synthesis, PropagatorDifference) {
    EXPECT_EQ(propagator_diff_norm(3, 1.0, 2.0, 0.0), 0.0);
    EXPECT_NEAR(propagator_diff_norm(3, 1.0, 2.0, kPi), 0.0, 1e-15);
    const double t = 0.001;
    const double du = propagator_diff_norm(2, 1.0, 10.0, t);
    const double dh = synthesis_error_norm(2, 1.0, SynthesisModel::A, t);
    EXPECT_NEAR(du / (t * dh), 1.0, 0.01);
    EXPECT_THROW(propagator_diff_norm(2, 1.0, 0.0, 1.0), ParamError);
}
