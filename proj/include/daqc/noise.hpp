#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daqc/circuit.hpp"
#include "daqc/schedule.hpp"
#include "daqc/state.hpp"

namespace daqc {

enum class ChannelLabel { BitFlip, AmplitudeDamping, Measurement };

std::string to_string(ChannelLabel l);

struct KrausChannel {
    std::vector<Mat> operators;
    ChannelLabel label = ChannelLabel::BitFlip;

    int qubit_count() const;
    // max |sum E^dag E - I|
    double completeness_error() const;
    // Single-qubit superoperator on vec(rho) ordered (00, 01, 10, 11).
    Eigen::Matrix4cd superoperator() const;
};

// E0 = sqrt(1-p) I, E1 = sqrt(p) X.
KrausChannel bit_flip_channel(double p);
// Bit flip preceding an ideal measurement.
KrausChannel measurement_channel(double p);
// Generalized amplitude damping with gamma = 1 - exp(-t / T1) and ground
// state population p; fixed point diag(p, 1 - p).
KrausChannel amplitude_damping_channel(double t, double T1, double p);

// sum_k E_k rho E_k^dag on one qubit (or on qubits (q, q+1) for 4x4 operators).
QuantumState apply_channel(const KrausChannel& c, const QuantumState& rho, int qubit);
// In-place single-qubit superoperator application on an n-qubit density matrix.
void apply_superoperator(Mat& rho, int n, const Eigen::Matrix4cd& s, int qubit);

// Physical units: T1, dt_sqg and gate times in seconds, g0 in 1/s. Schedules
// and native circuits are expressed in units of 1/g0.
struct NoiseModel {
    std::string name = "none";
    double sqgn = 0.0;       // half-width of the uniform single-qubit scale
    double tqgn = 0.0;       // sigma of the relative pi/4 phase error
    double abn_s = 0.0;      // sigma of analog durations, stepwise
    double abn_b = 0.0;      // sigma of analog durations, banged
    double p_bitflip = 0.0;
    double p_meas = 0.0;
    double t1 = 0.0;         // 0 disables damping
    double p_thermal = 1.0;
    double dt_sqg = 1e-8;
    double g0 = 1e6;
    std::map<std::string, double> gate_times;  // Rx, Rz, CNOT
    bool cross_talk = false;

    static NoiseModel preset(const std::string& name);
    static std::vector<std::string> preset_names();
    void validate() const;

    bool damping() const { return t1 > 0.0; }
    bool coherent() const { return sqgn > 0.0 || tqgn > 0.0 || abn_s > 0.0 || abn_b > 0.0; }
    bool noiseless() const;
    // T1 and dt_sqg in units of 1/g0.
    double t1_units() const { return t1 * g0; }
    double dt_units() const { return dt_sqg * g0; }

    nlohmann::json to_json() const;
    // Unknown keys raise ParamError. Missing keys keep the base preset value.
    static NoiseModel from_json(const nlohmann::json& j);
};

// One independent stream per (seed, shot): SplitMix64 mixing seeds an mt19937_64.
class NoiseRng {
public:
    NoiseRng(std::uint64_t seed, std::uint64_t stream);
    double uniform(double a, double b);
    double normal(double sigma);

private:
    std::mt19937_64 eng_;
};

std::uint64_t splitmix64(std::uint64_t x);
// DAQC_SEED overrides the given seed when set.
std::uint64_t resolve_seed(std::uint64_t seed);

enum class PerturbKind { SQG, TQG, AnalogStepwise, AnalogBanged };

// SQG: nominal * U(1 - sqgn, 1 + sqgn). TQG: nominal * (1 + N(0, tqgn)).
// Analog: nominal + N(0, abn). Zero spread returns nominal without a draw.
double perturb_gate(PerturbKind kind, double nominal, const NoiseModel& m, NoiseRng& rng);

struct TrajectoryRun {
    std::uint64_t seed = 0;
    int shots = 0;
    QuantumState result;      // mean density matrix
    double wall_time = 0.0;   // nominal, units of 1/g0
    int simulated_shots = 0;  // 1 when the model has no coherent noise
};

// Density-matrix trajectories. Coherent errors are redrawn for every item of
// every shot; Kraus channels follow each item with that item's wall time;
// measurement bit flips are applied last. Shots run in index order and are
// summed in that order.
TrajectoryRun run_trajectories(const Schedule& s, const QuantumState& psi0, const NoiseModel& m, int shots,
                               std::uint64_t seed);
TrajectoryRun run_trajectories(const NativeCircuit& c, const QuantumState& psi0, const NoiseModel& m, int shots,
                               std::uint64_t seed);

// Wall time of a native gate in units of 1/g0 (before coherent errors).
double native_gate_time(const NativeOp& op, const NoiseModel& m);

}  // namespace daqc
