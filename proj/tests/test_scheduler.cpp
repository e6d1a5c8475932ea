#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "daqc/compiler.hpp"
#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"
#include "daqc/schedule.hpp"
#include "test_util.hpp"

using namespace daqc;
using namespace daqc::test;

namespace {

Mat2 x_gate() { return pauli_oracle('X'); }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        den += std::pow(std::log(x[i]) - mx, 2);
    }
    return num / den;
}

Schedule x_between_blocks(Mode mode, double dt) {
    Schedule s(3, homogeneous_ising(3, 1.0), mode, dt);
    s.add_analog(0.4);
    s.add_layer(std::vector<std::pair<int, Mat2>>{{0, x_gate()}, {2, x_gate()}});
    s.add_analog(0.3);
    return s;
}

}  // namespace

TEST(Schedule, EmptyLeavesStateUnchanged) {
    std::mt19937_64 rng(31);
    const auto psi = QuantumState::from_vector(random_state(8, rng));
    const Schedule s(3, homogeneous_ising(3, 1.0), Mode::SDAQC, 0.01);
    EXPECT_LT((simulate_schedule(s, psi).vec() - psi.vec()).norm(), 1e-15);
}

TEST(Schedule, SingleAnalogBlockIsPropagator) {
    std::mt19937_64 rng(32);
    const auto psi = QuantumState::from_vector(random_state(8, rng));
    Schedule s(3, homogeneous_ising(3, 0.7), Mode::SDAQC, 0.01);
    s.add_analog(1.3);
    const Vec expect = expm_oracle(homogeneous_ising(3, 0.7).matrix(), 1.3) * psi.vec();
    EXPECT_LT((simulate_schedule(s, psi).vec() - expect).norm(), 1e-12);
}

TEST(Schedule, MergingAndIdentityDropping) {
    Schedule s(2, homogeneous_ising(2, 1.0), Mode::SDAQC, 0.01);
    s.add_analog(0.2);
    s.add_analog(0.3);
    s.add_analog(0.0);
    s.add_layer(std::vector<std::pair<int, Mat2>>{{0, x_gate()}});
    s.add_layer(std::vector<std::pair<int, Mat2>>{{0, x_gate()}});
    EXPECT_EQ(s.analog_count(), 1);
    EXPECT_DOUBLE_EQ(s.analog_time(), 0.5);
    EXPECT_EQ(s.layer_count(), 0);
}

TEST(Schedule, RejectsNonUnitaryLayer) {
    Schedule s(2, homogeneous_ising(2, 1.0), Mode::SDAQC, 0.01);
    Mat2 bad = Mat2::Identity() * 2.0;
    EXPECT_THROW(s.add_layer(std::vector<std::pair<int, Mat2>>{{0, bad}}), ValidationError);
}

TEST(Schedule, UnitaryMatchesSimulation) {
    std::mt19937_64 rng(33);
    for (Mode m : {Mode::SDAQC, Mode::BDAQC}) {
        const Schedule s = x_between_blocks(m, 0.05);
        const Mat u = schedule_unitary(s);
        EXPECT_TRUE(is_unitary(u));
        const auto psi = QuantumState::from_vector(random_state(8, rng));
        EXPECT_LT((simulate_schedule(s, psi).vec() - u * psi.vec()).norm(), 1e-12);
    }
}

TEST(Schedule, StepwiseLayerIsInstantaneousGate) {
    const Schedule s = x_between_blocks(Mode::SDAQC, 0.05);
    const Mat h = homogeneous_ising(3, 1.0).matrix();
    const Mat xx = kron(kron(Mat(x_gate()), Mat::Identity(2, 2)), Mat(x_gate()));
    const Mat expect = expm_oracle(h, 0.3) * xx * expm_oracle(h, 0.4);
    EXPECT_LT((schedule_unitary(s) - expect).norm(), 1e-12);
}

TEST(Schedule, BangedPulseRunsOnTopOfInteraction) {
    const double dt = 0.05;
    const Schedule s = x_between_blocks(Mode::BDAQC, dt);
    const Mat h = homogeneous_ising(3, 1.0).matrix();
    // Oracle: pulse generator -(pi / 2dt)(1 - X) on qubits 0 and 2 plus H_int for dt.
    const Mat gx = -(std::numbers::pi / (2 * dt)) * (Mat::Identity(2, 2) - Mat(x_gate()));
    const Mat id2 = Mat::Identity(2, 2);
    const Mat hp = kron(kron(gx, id2), id2) + kron(kron(id2, id2), gx) + h;
    const Mat expect = expm_oracle(h, 0.3 - dt / 2) * expm_oracle(hp, dt) * expm_oracle(h, 0.4 - dt / 2);
    EXPECT_LT((schedule_unitary(s) - expect).norm(), 1e-10);
}

TEST(Schedule, BangedInfidelityVanishesWithOrderTwo) {
    std::mt19937_64 rng(34);
    const auto psi = QuantumState::from_vector(random_state(8, rng));
    const Vec ref = simulate_schedule(x_between_blocks(Mode::SDAQC, 0.01), psi).vec();
    std::vector<double> dts{1e-2, 5e-3, 2.5e-3}, inf;
    for (double dt : dts) {
        const Vec v = simulate_schedule(x_between_blocks(Mode::BDAQC, dt), psi).vec();
        inf.push_back(1.0 - std::norm(ref.dot(v)));
    }
    EXPECT_GT(inf[0], inf[1]);
    EXPECT_GT(inf[1], inf[2]);
    EXPECT_GE(slope(dts, inf), 1.8);
}

TEST(Schedule, WallTimeAccounting) {
    std::mt19937_64 rng(35);
    CouplingMatrix c(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int j = 0; j < 5; ++j)
        for (int k = j + 1; k < 5; ++k) c.set(j, k, u(rng));
    const double dt = 1e-3;
    IsingOptions opt;
    opt.dt = dt;
    Schedule s = compile_ising(c, 1.0, 1.0, opt).schedule;
    const double total = s.analog_time();
    const int layers = s.layer_count();
    s.set_mode(Mode::SDAQC);
    EXPECT_NEAR(lower(s).wall_time, total + layers * dt, 1e-12);
    s.set_mode(Mode::BDAQC);
    const Lowering low = lower(s);
    EXPECT_EQ(low.deficit, 0.0);
    EXPECT_NEAR(low.wall_time, total, 1e-12);
}

TEST(Schedule, BangedDeficitIsReported) {
    Schedule s(2, homogeneous_ising(2, 1.0), Mode::BDAQC, 0.1);
    s.add_analog(0.01);
    s.add_layer(std::vector<std::pair<int, Mat2>>{{0, x_gate()}});
    const Lowering low = lower(s);
    EXPECT_NEAR(low.deficit, 0.09, 1e-12);
    EXPECT_FALSE(low.diagnostics.empty());
}

TEST(LayerGenerator, ReproducesUnitary) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat2 u = expm_oracle(random_hermitian(2, rng), 1.0);
        const Mat2 g = layer_generator(u, 0.01);
        EXPECT_LT((expm_oracle(g, 0.01) - Mat(u)).norm(), 1e-10);
    }
    const Mat2 gx = layer_generator(x_gate(), 0.01);
    EXPECT_LT((Mat(gx) + (std::numbers::pi / 0.02) * (Mat::Identity(2, 2) - Mat(x_gate()))).norm(), 1e-9);
}

TEST(BangError, CommutingIsZero) {
    PauliHamiltonian hi(2), hr(2);
    hi.add(1.0, "ZZ");
    hr.add(0.5, "ZI");
    EXPECT_NEAR(bang_error_estimate(hi, hr, 0.01), 0.0, 1e-15);
    EXPECT_NEAR(bang_error_measured(hi, hr, 0.01), 0.0, 1e-12);
}

TEST(BangError, EstimateIsCubic) {
    PauliHamiltonian hi(2), hr(2);
    hi.add(1.0, "ZZ");
    hr.add(2.0, "XI");
    const double e1 = bang_error_estimate(hi, hr, 0.01), e2 = bang_error_estimate(hi, hr, 0.02);
    EXPECT_NEAR(e2 / e1, 8.0, 1e-6);
}

TEST(BangError, EstimateMatchesNestedCommutator) {
    PauliHamiltonian hi(2), hr(2);
    hi.add(1.0, "ZZ");
    hr.add(2.0, "XI").add(0.5, "IY");
    const Mat a = hi.matrix(), b = hr.matrix();
    const Mat c = a * b - b * a;
    const Mat cc = c * (a + 2 * b) - (a + 2 * b) * c;
    const double dt = 0.01;
    EXPECT_NEAR(bang_error_estimate(hi, hr, dt), std::pow(dt, 3) / 4 * spectral_oracle(cc), 1e-12);
}

TEST(BangError, MeasuredSameOrderAsEstimate) {
    const double dt = 0.01;
    PauliHamiltonian hi(2), hr(2);
    hi.add(1.0, "ZZ");
    hr.add(std::numbers::pi / (2 * dt), "XI");
    const double est = bang_error_estimate(hi, hr, dt), meas = bang_error_measured(hi, hr, dt);
    EXPECT_GT(meas, 0.0);
    EXPECT_LT(std::abs(std::log10(est / meas)), 1.0);
    EXPECT_GE(est, meas);
}

TEST(BangError, MeasuredSlopeIsThree) {
    PauliHamiltonian hi(2), hr(2);
    hi.add(1.0, "ZZ");
    hr.add(3.0, "XI");
    std::vector<double> dts{0.02, 0.01, 0.005}, err;
    for (double dt : dts) err.push_back(bang_error_measured(hi, hr, dt));
    EXPECT_NEAR(slope(dts, err), 3.0, 0.5);
}

TEST(BangError, TotalForScheduleWithoutLayersIsZero) {
    Schedule s(3, homogeneous_ising(3, 1.0), Mode::BDAQC, 0.01);
    s.add_analog(1.0);
    const auto r = total_bang_error(s);
    EXPECT_EQ(r.total, 0.0);
    EXPECT_EQ(r.interior, 0);
}

TEST(BangError, InteriorCountGrowsWithPairs) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::vector<int> counts;
    for (int n : {3, 5, 6, 7}) {
        CouplingMatrix c(n);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) c.set(j, k, u(rng));
        IsingOptions opt;
        opt.mode = Mode::BDAQC;
        opt.dt = 1e-3;
        const auto r = total_bang_error(compile_ising(c, 1.0, 1.0, opt).schedule);
        counts.push_back(r.interior);
        EXPECT_GT(r.total, 0.0);
        EXPECT_LE(r.interior, n * (n - 1) / 2 + 1);
        EXPECT_GE(r.interior, n * (n - 1) / 2 - 2);
    }
    for (size_t i = 1; i < counts.size(); ++i) EXPECT_GT(counts[i], counts[i - 1]);
}
