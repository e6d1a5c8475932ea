#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <map>
#include <set>

#include "daqc/compiler.hpp"
#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"
#include "daqc/schedule.hpp"
#include "test_util.hpp"

using namespace daqc;
using namespace daqc::test;

namespace {

CouplingMatrix random_couplings(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CouplingMatrix c(n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) c.set(j, k, u(rng));
    return c;
}

double phase_distance(const Mat& u, const Mat& v) {
    const cplx ov = (u.adjoint() * v).trace();
    const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    return (u * ph - v).norm();
}

}  // namespace

TEST(VectorizePair, Examples) {
    EXPECT_EQ(vectorize_pair(1, 2, 3), 1);
    EXPECT_EQ(vectorize_pair(2, 3, 3), 3);
}

TEST(VectorizePair, RoundTrip) {
    for (int N = 2; N <= 10; ++N) {
        std::set<int> seen;
        for (int n = 1; n <= N; ++n)
            for (int m = n + 1; m <= N; ++m) {
                const int a = vectorize_pair(n, m, N);
                EXPECT_EQ(unvectorize_pair(a, N), std::make_pair(n, m));
                seen.insert(a);
            }
        EXPECT_EQ(static_cast<int>(seen.size()), N * (N - 1) / 2);
        EXPECT_EQ(*seen.begin(), 1);
        EXPECT_EQ(*seen.rbegin(), N * (N - 1) / 2);
    }
    EXPECT_THROW(vectorize_pair(2, 2, 3), IndexError);
    EXPECT_THROW(vectorize_pair(1, 4, 3), IndexError);
}

TEST(SignMatrix, ThreeQubitExplicit) {
    RMat expect(3, 3);
    expect << 1, -1, -1, -1, 1, -1, -1, -1, 1;
    EXPECT_EQ(sign_matrix(3), expect);
}

TEST(SignMatrix, EntriesFromDefinition) {
    // Independent oracle: count shared indices between the two pairs.
    for (int N : {3, 5, 6}) {
        const RMat M = sign_matrix(N);
        const int K = N * (N - 1) / 2;
        for (int a = 1; a <= K; ++a)
            for (int b = 1; b <= K; ++b) {
                const auto [j, k] = unvectorize_pair(a, N);
                const auto [n, m] = unvectorize_pair(b, N);
                const int flips = (n == j) + (n == k) + (m == j) + (m == k);
                EXPECT_EQ(M(a - 1, b - 1), flips % 2 ? -1.0 : 1.0);
            }
    }
}

TEST(SignMatrix, SpectrumMatchesClosedForms) {
    for (int N : {3, 5, 6, 7, 8}) {
        Eigen::SelfAdjointEigenSolver<RMat> es(sign_matrix(N));
        const RVec ev = es.eigenvalues();
        // lambda1 once, lambda2 N-1 times, lambda3 = 4 N(N-3)/2 times; values may coincide.
        std::map<double, int> expect;
        expect[N * (N - 9) / 2.0 + 8] += 1;
        expect[2.0 * (4 - N)] += N - 1;
        expect[4.0] += N * (N - 3) / 2;
        for (const auto& [value, mult] : expect) {
            int count = 0;
            for (double v : ev) count += std::abs(v - value) < 1e-9;
            EXPECT_EQ(count, mult) << "N=" << N << " lambda=" << value;
        }
        EXPECT_NEAR(sign_matrix_lambda1(N), N * (N - 9) / 2.0 + 8, 1e-12);
    }
    EXPECT_NEAR(sign_matrix(4).determinant(), 0.0, 1e-9);
}

TEST(FixNegativeTimes, Examples) {
    const auto a = fix_negative_times({0.5, 1.0, 2.0}, -1.0);
    EXPECT_EQ(a.shifted, (std::vector<double>{0.5, 1.0, 2.0}));
    EXPECT_EQ(a.extra_block, 0.0);
    const auto b = fix_negative_times({-1, -1, -1}, -1.0);
    EXPECT_EQ(b.shifted, (std::vector<double>{0, 0, 0}));
    EXPECT_DOUBLE_EQ(b.extra_block, 1.0);
    const auto c = fix_negative_times({2, -3, 1}, -1.0);
    EXPECT_EQ(c.shifted, (std::vector<double>{5, 0, 4}));
    EXPECT_DOUBLE_EQ(c.extra_block, 3.0);
}

TEST(CompileIsing, ResourceTargetNeedsRepair) {
    const int n = 5;
    const CouplingMatrix target = CouplingMatrix::homogeneous(n, 1.0);
    const auto r = compile_ising(target, 1.0, 1.0);
    for (double t : r.analog_times) EXPECT_NEAR(t, 1.0 / -2.0, 1e-12);
    ASSERT_TRUE(r.repair.has_value());
    const Mat u = schedule_unitary(r.schedule);
    EXPECT_LT((u - propagator(homogeneous_ising(n, 1.0), 1.0)).norm(), 1e-8);
}

TEST(CompileIsing, SingleCouplingSolve) {
    CouplingMatrix target(3);
    target.set(0, 1, 1.0);
    const auto r = compile_ising(target, 1.0, 1.0);
    const RVec t = Eigen::Map<const RVec>(r.analog_times.data(), 3);
    RVec rhs(3);
    rhs << 1, 0, 0;
    EXPECT_LT((sign_matrix(3) * t - rhs).norm(), 1e-12);
    EXPECT_LT((schedule_unitary(r.schedule) - propagator(target.hamiltonian(), 1.0)).norm(), 1e-8);
}

TEST(CompileIsing, ZeroTargetIsIdentity) {
    const auto r = compile_ising(CouplingMatrix(5), 2.0, 1.0);
    for (double t : r.analog_times) EXPECT_EQ(t, 0.0);
    EXPECT_LT((schedule_unitary(r.schedule) - Mat::Identity(32, 32)).norm(), 1e-12);
}

TEST(CompileIsing, RandomTargetsExact) {
    std::mt19937_64 rng(21);
    for (int n : {3, 5, 6, 7}) {
        int repaired = 0;
        for (int trial = 0; trial < 8; ++trial) {
            const CouplingMatrix target = random_couplings(n, rng);
            const auto r = compile_ising(target, 0.8, 1.3);
            repaired += r.repair.has_value();
            EXPECT_LT(r.synthesis_residual, 1e-10);
            const Mat u = schedule_unitary(r.schedule);
            EXPECT_LT((u - propagator(target.hamiltonian(), 0.8)).norm(), 1e-8) << "n=" << n;
        }
        EXPECT_GT(repaired, 0) << "n=" << n;
    }
}

TEST(CompileIsing, PlusSignTargetsInverseEvolution) {
    std::mt19937_64 rng(22);
    const CouplingMatrix target = random_couplings(3, rng);
    IsingOptions opt;
    opt.sign = ExpSign::Plus;
    const auto r = compile_ising(target, 0.5, 1.0, opt);
    EXPECT_LT((schedule_unitary(r.schedule) - expm_oracle(target.hamiltonian().matrix(), -0.5)).norm(), 1e-8);
}

TEST(CompileIsing, FourQubitsRejected) {
    std::mt19937_64 rng(23);
    EXPECT_THROW(compile_ising(random_couplings(4, rng), 1.0, 1.0), SingularSignMatrix);
}

TEST(CompileIsing, BlockCountGrowsWithPairs) {
    std::mt19937_64 rng(24);
    for (int n : {3, 5, 6, 7}) {
        const auto r = compile_ising(random_couplings(n, rng), 1.0, 1.0);
        EXPECT_LE(r.block_count, n * (n - 1) / 2 + 1);
        EXPECT_GE(r.block_count, n * (n - 1) / 2 - 1);
    }
}

TEST(XZ, DefaultPhase) { EXPECT_NEAR(xz_default_phase(1, 1), std::numbers::pi / 4, 1e-15); }

TEST(XZ, RotationIdentity) {
    for (double th : {0.1, 0.7, 2.0}) {
        const Mat2 r = xz_rotation(th);
        const Mat2 lhs = r * pauli_oracle('Z') * r;
        const Mat2 rhs = std::cos(th) * pauli_oracle('Z') + std::sin(th) * pauli_oracle('X');
        EXPECT_LT((lhs - rhs).norm(), 1e-14);
    }
}

TEST(XZ, DecompositionReconstructsTarget) {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {2, 3, 4}) {
        XZCouplings t(n);
        for (int s = 0; s < 4; ++s)
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k) t.c[static_cast<size_t>(s)].set(j, k, u(rng));
        const auto d = xz_decompose(t);
        EXPECT_LT(d.residual, 1e-8);
        EXPECT_LT((d.reconstructed.matrix() - t.hamiltonian().matrix()).norm(), 1e-8);
    }
}

TEST(XZ, PureZZReducesToIsing) {
    std::mt19937_64 rng(26);
    XZCouplings t(3);
    t.c[3] = random_couplings(3, rng);
    const auto r = compile_xz(t, 1.0, 1.0, 1);
    EXPECT_LT(phase_distance(schedule_unitary(r.schedule), propagator(t.hamiltonian(), 1.0)), 1e-7);
}

TEST(XZ, TrotterErrorHalvesWhenStepsDouble) {
    std::mt19937_64 rng(27);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {2, 3}) {
        XZCouplings t(n);
        for (int s = 0; s < 4; ++s)
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k) t.c[static_cast<size_t>(s)].set(j, k, u(rng));
        const Mat exact = propagator(t.hamiltonian(), 1.0);
        std::vector<double> err;
        for (int nt : {4, 8, 16}) err.push_back(phase_distance(schedule_unitary(compile_xz(t, 1.0, 1.0, nt).schedule), exact));
        for (size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(err[i - 1] / err[i], 2.0, 0.4) << "n=" << n;
    }
}

TEST(MBody, BlockCountClosedForms) {
    const auto c4 = mbody_block_count(4, 8);
    EXPECT_DOUBLE_EQ(c4.a, 54.0);
    EXPECT_DOUBLE_EQ(c4.b, -33.75);
    ASSERT_TRUE(c4.quoted.has_value());
    EXPECT_DOUBLE_EQ(*c4.quoted, 630.0);
    EXPECT_FALSE(c4.warnings.empty());
    const auto c3 = mbody_block_count(3, 5);
    EXPECT_DOUBLE_EQ(c3.a, 13.5);
    EXPECT_FALSE(c3.integral);
}

TEST(MBody, ZeroPhasesLeaveChainUnchanged) {
    const std::vector<std::vector<double>> zero(1, std::vector<double>(4, 0.0));
    const auto b = build_mbody_hamiltonian_blocks(4, zero);
    PauliHamiltonian chain(4);
    chain.add(1.0, "ZZII").add(1.0, "IZZI").add(1.0, "IIZZ");
    EXPECT_LT((b.h1[0].matrix() - chain.matrix()).norm(), 1e-14);
    EXPECT_LT((b.h2[0].matrix() - chain.matrix()).norm(), 1e-14);
}

TEST(MBody, BlocksAreConjugatedChains) {
    for (int N : {4, 6, 8}) {
        const auto phases = mbody_default_phases(N);
        const auto b = build_mbody_hamiltonian_blocks(N, phases);
        ASSERT_EQ(b.h1.size(), 4u);
        if (N > 6) continue;
        // Dense oracle: e^{-i O} H e^{i O} with O = sum theta_j X_j X_{j+1} on the H1 bonds.
        const auto& th = phases[0];
        PauliHamiltonian chain(N), o(N);
        for (int j = 0; j + 1 < N; ++j) chain.add(1.0, PauliString::pair(N, 'Z', j, 'Z', j + 1));
        for (int j = 1; j + 1 < N; j += 2) o.add(th[static_cast<size_t>(j)], PauliString::pair(N, 'X', j, 'X', j + 1));
        const Mat u = expm_oracle(o.matrix(), 1.0);
        const Mat expect = u * chain.matrix() * u.adjoint();
        EXPECT_LT((b.h1[0].matrix() - expect).norm(), 1e-10) << "N=" << N;
    }
}

// The displayed expansion shifts the Z Y X terms of g_3 and g_5 one site left;
// the conjugation places them on sites (3,4,5) and (5,6,7), 1-based.
TEST(MBody, EightSiteTermsMatchExpansion) {
    const auto b = build_mbody_hamiltonian_blocks(8, mbody_default_phases(8));
    std::set<std::string> got;
    for (const auto& t : b.h1[0].terms()) got.insert(t.str.str());
    const std::set<std::string> expect{"ZZIIIIII", "ZYXIIIII", "IZZIIIII", "IIZZIIII", "IXYZIIII",
                                       "IIZYXIII", "IXYYXIII", "IIIZZIII", "IIIIZZII", "IIIXYZII",
                                       "IIIIZYXI", "IIIXYYXI", "IIIIIZZI", "IIIIIIZZ", "IIIIIXYZ"};
    EXPECT_EQ(got, expect);
    for (const auto& t : b.h1[0].terms()) EXPECT_LE(std::abs(t.coeff), 1.0 + 1e-12);
}

TEST(PathDecomposition, CoversCompleteGraph) {
    for (int N : {4, 6, 8, 10}) {
        const auto paths = path_decomposition(N);
        EXPECT_EQ(static_cast<int>(paths.size()), N / 2);
        std::set<std::pair<int, int>> edges;
        for (const auto& p : paths) {
            EXPECT_EQ(std::set<int>(p.begin(), p.end()).size(), static_cast<size_t>(N));
            for (size_t i = 0; i + 1 < p.size(); ++i) {
                const auto e = std::minmax(p[i], p[i + 1]);
                EXPECT_TRUE(edges.insert(e).second) << "repeated edge";
            }
        }
        EXPECT_EQ(static_cast<int>(edges.size()), N * (N - 1) / 2);
    }
    EXPECT_THROW(path_decomposition(5), UnsupportedSize);
}
