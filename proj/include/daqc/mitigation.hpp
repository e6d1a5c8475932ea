#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "daqc/noise.hpp"
#include "daqc/pauli.hpp"
#include "daqc/schedule.hpp"
#include "daqc/state.hpp"

namespace daqc {

struct ExtrapolationMethod {
    enum class Kind { Linear, Richardson };
    Kind kind = Kind::Linear;
    int order = 1;  // Richardson polynomial degree
    std::string name() const;
    static ExtrapolationMethod linear() { return {Kind::Linear, 1}; }
    static ExtrapolationMethod richardson(int k) { return {Kind::Richardson, k}; }
    static ExtrapolationMethod from_string(const std::string& s);  // "linear", "richardson:2"
};

// Linear: least-squares line at x = 0. Richardson(k): degree-k polynomial
// through the samples (least squares when there are more than k + 1) at x = 0.
// The degree is capped at samples - 1.
double extrapolate(const std::vector<std::pair<double, double>>& samples, const ExtrapolationMethod& m);

struct Observable {
    enum class Kind { Fidelity, Expectation };
    Kind kind = Kind::Fidelity;
    PauliString pauli;  // Expectation only
    std::string name() const;
};

// g_values are coupling multipliers of the model's g0; b_values are pulse
// durations in units of 1/g, so the physical pulse is b_i / g_j.
struct ExtrapolationPlan {
    std::vector<double> g_values{1.0, 2.0, 3.0, 4.0};
    std::vector<double> b_values{0.0005, 0.001, 0.0015, 0.002};
    ExtrapolationMethod method = ExtrapolationMethod::linear();
    Observable observable;
    void validate() const;
};

struct ZNEProgram {
    Schedule schedule;    // bDAQC schedule; its dt is replaced by each b_i
    QuantumState input;
    QuantumState ideal;   // target state for the fidelity observable
};

struct ZNEPoint {
    double b = 0.0;
    double g = 0.0;
    double x = 0.0;  // 1 / g
    double value = 0.0;
};

struct ZNEReport {
    std::vector<ZNEPoint> raw;
    std::vector<double> inner_linear, inner_richardson;  // per b_i at x -> 0
    double mitigated_linear = 0.0;
    double mitigated_richardson = 0.0;
    double mitigated = 0.0;  // plan method
    double ideal = 0.0;      // observable on the ideal state
    double best_raw = 0.0;
    int richardson_order = 0;
    nlohmann::json to_json() const;
};

ZNEReport two_axis_zne(const ZNEProgram& program, const ExtrapolationPlan& plan, const NoiseModel& noise, int shots,
                       std::uint64_t seed);

}  // namespace daqc
