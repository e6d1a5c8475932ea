#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "daqc/algorithms.hpp"
#include "daqc/errors.hpp"
#include "daqc/mitigation.hpp"

using namespace daqc;

namespace {

constexpr double kPi = std::numbers::pi;

ZNEProgram qft_program(int n) {
    const auto input = qft_input_state(n, kPi / 4);
    const auto ideal = QuantumState::from_vector(circuit_unitary(build_qft(n, false)) * input.vec());
    return {compile_qft_daqc(n, Mode::BDAQC, 0.01), input, ideal};
}

std::vector<std::pair<double, double>> sample(const std::vector<double>& xs, double (*f)(double)) {
    std::vector<std::pair<double, double>> s;
    for (double x : xs) s.emplace_back(x, f(x));
    return s;
}

}  // namespace

TEST(Extrapolate, ExactLine) {
    const auto s = sample({0.2, 0.5, 0.9, 1.3}, [](double x) { return 0.9 - 0.3 * x; });
    EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::linear()), 0.9, 1e-12);
    EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::richardson(2)), 0.9, 1e-12);
}

TEST(Extrapolate, Constant) {
    const auto s = sample({1.0, 2.0, 3.0}, [](double) { return 0.42; });
    EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::linear()), 0.42, 1e-14);
    EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::richardson(2)), 0.42, 1e-14);
}

TEST(Extrapolate, RichardsonQuadratic) {
    const auto s = sample({0.1, 0.2, 0.3}, [](double x) { return 1 - x + x * x; });
    EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::richardson(2)), 1.0, 1e-10);
    // A straight line through curved data misses the intercept.
    EXPECT_GT(std::abs(extrapolate(s, ExtrapolationMethod::linear()) - 1.0), 1e-3);
}

TEST(Extrapolate, ExactOnPolynomialsUpToOrder) {
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 1; k <= 4; ++k) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> c(k + 1);
            for (auto& v : c) v = u(rng);
            std::vector<std::pair<double, double>> s;
            for (int i = 1; i <= k + 3; ++i) {
                const double x = 0.05 * i;
                double y = 0, p = 1;
                for (double cj : c) y += cj * p, p *= x;
                s.emplace_back(x, y);
            }
            EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::richardson(k)), c[0], 1e-10) << k;
        }
    }
}

TEST(Extrapolate, OrderCappedBySampleCount) {
    const auto s = sample({0.1, 0.2}, [](double x) { return 2 + x; });
    EXPECT_NEAR(extrapolate(s, ExtrapolationMethod::richardson(3)), 2.0, 1e-12);
}

TEST(Extrapolate, DegenerateSamples) {
    EXPECT_THROW(extrapolate({{0.1, 1.0}}, ExtrapolationMethod::linear()), DegenerateSamples);
    EXPECT_THROW(extrapolate({{0.1, 1.0}, {0.1, 2.0}}, ExtrapolationMethod::linear()), DegenerateSamples);
    EXPECT_THROW(extrapolate({{0.1, NAN}, {0.2, 2.0}}, ExtrapolationMethod::linear()), DegenerateSamples);
    EXPECT_THROW(extrapolate({{0.1, 1.0}, {0.2, 2.0}}, ExtrapolationMethod::richardson(0)), DegenerateSamples);
}

TEST(Method, Parsing) {
    EXPECT_EQ(ExtrapolationMethod::from_string("linear").kind, ExtrapolationMethod::Kind::Linear);
    EXPECT_EQ(ExtrapolationMethod::from_string("richardson").order, 2);
    EXPECT_EQ(ExtrapolationMethod::from_string("richardson:3").order, 3);
    EXPECT_EQ(ExtrapolationMethod::richardson(3).name(), "richardson:3");
    for (const char* bad : {"quadratic", "richardson:", "richardson:0", "richardson:2x"})
        EXPECT_THROW(ExtrapolationMethod::from_string(bad), PlanError) << bad;
}

TEST(Plan, Validation) {
    ExtrapolationPlan p;
    EXPECT_NO_THROW(p.validate());
    p.g_values = {1.0};
    EXPECT_THROW(p.validate(), PlanError);
    p.g_values = {2.0, 1.0};
    EXPECT_THROW(p.validate(), PlanError);
    p.g_values = {0.0, 1.0};
    EXPECT_THROW(p.validate(), PlanError);
    p = ExtrapolationPlan();
    p.b_values = {0.001, 0.001};
    EXPECT_THROW(p.validate(), PlanError);
    p.b_values = {-0.001, 0.002};
    EXPECT_THROW(p.validate(), PlanError);
}

TEST(ZNE, RejectsInconsistentPrograms) {
    ZNEProgram prog = qft_program(3);
    prog.schedule.set_mode(Mode::SDAQC);
    EXPECT_THROW(two_axis_zne(prog, {}, NoiseModel::preset("mitigation"), 1, 1), PlanError);
    prog = qft_program(3);
    prog.input = QuantumState::basis(2, 0);
    EXPECT_THROW(two_axis_zne(prog, {}, NoiseModel::preset("mitigation"), 1, 1), PlanError);
    ExtrapolationPlan plan;
    plan.observable.kind = Observable::Kind::Expectation;
    plan.observable.pauli = PauliString("ZI");
    EXPECT_THROW(two_axis_zne(qft_program(3), plan, NoiseModel::preset("mitigation"), 1, 1), PlanError);
}

TEST(ZNE, NoiseOffRecoversNoiselessValue) {
    // Without decoherence only the bang error remains, which vanishes with b.
    const auto r = two_axis_zne(qft_program(3), {}, NoiseModel::preset("none"), 1, 1);
    EXPECT_EQ(r.raw.size(), 16u);
    EXPECT_NEAR(r.mitigated_linear, 1.0, 1e-4);
    EXPECT_NEAR(r.mitigated_richardson, 1.0, 1e-4);
    for (const auto& pt : r.raw) EXPECT_LE(pt.value, 1.0 + 1e-12);
}

TEST(ZNE, ReportGridAndJson) {
    ExtrapolationPlan plan;
    plan.g_values = {1.0, 2.0, 4.0};
    plan.b_values = {0.001, 0.002};
    const auto r = two_axis_zne(qft_program(3), plan, NoiseModel::preset("mitigation"), 1, 5);
    ASSERT_EQ(r.raw.size(), 6u);
    EXPECT_DOUBLE_EQ(r.raw[2].b, 0.001);
    EXPECT_DOUBLE_EQ(r.raw[2].g, 4.0);
    EXPECT_DOUBLE_EQ(r.raw[2].x, 0.25);
    EXPECT_EQ(r.inner_linear.size(), 2u);
    // Stronger coupling means shorter runs and less decoherence.
    EXPECT_GT(r.raw[2].value, r.raw[0].value);
    const auto j = r.to_json();
    EXPECT_EQ(j["raw"].size(), 6u);
    EXPECT_TRUE(j.contains("mitigated_linear"));
    EXPECT_TRUE(j.contains("mitigated_richardson"));
    EXPECT_DOUBLE_EQ(j["mitigated"].get<double>(), r.mitigated_linear);
}

TEST(ZNE, MitigatedFidelityBeatsRawPoints) {
    for (int n : {5, 6}) {
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto r = two_axis_zne(qft_program(n), {}, NoiseModel::preset("mitigation"), 20, seed);
            EXPECT_GE(r.mitigated_linear, r.best_raw + 0.02) << n;
            EXPECT_GE(r.mitigated_linear, 0.9);
            EXPECT_LE(r.mitigated_linear, 1.0);
        }
    }
}

TEST(ZNE, ExpectationValueRecovered) {
    const int n = 5;
    ExtrapolationPlan plan;
    plan.method = ExtrapolationMethod::richardson(2);
    plan.observable.kind = Observable::Kind::Expectation;
    plan.observable.pauli = PauliString::single(n, 'Z', 0);
    const auto r = two_axis_zne(qft_program(n), plan, NoiseModel::preset("mitigation"), 1, 1);
    EXPECT_NEAR(r.mitigated, r.ideal, 0.01);
    EXPECT_GT(std::abs(r.raw.front().value - r.ideal), std::abs(r.mitigated - r.ideal));
}

TEST(ZNE, EightQubitQFT) {
    ExtrapolationPlan plan;
    plan.method = ExtrapolationMethod::richardson(2);
    const auto r = two_axis_zne(qft_program(8), plan, NoiseModel::preset("mitigation"), 1, 1);
    EXPECT_GE(r.mitigated, r.best_raw + 0.02);
    EXPECT_GE(r.mitigated, 0.9);
    EXPECT_LE(r.mitigated, 1.0);
    EXPECT_GE(r.mitigated_linear, r.best_raw + 0.02);
}
