#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "daqc/linalg.hpp"
#include "daqc/pauli.hpp"
#include "daqc/state.hpp"

namespace daqc {

enum class Mode { SDAQC, BDAQC };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Simultaneous single-qubit rotations, one 2x2 unitary per qubit (identity
// for idle qubits). Lasts the schedule's dt.
struct DigitalLayer {
    std::vector<Mat2> ops;
    std::vector<int> active() const;
};

// Evolution under the resource Hamiltonian for time t.
struct AnalogBlock {
    double t = 0.0;
};

// Opaque multi-qubit unitary applied instantaneously (e.g. controlled
// matrix exponentials that have no analog decomposition here).
struct GateOp {
    Mat u;
    std::vector<int> qubits;
    std::string label;
};

using ScheduleItem = std::variant<DigitalLayer, AnalogBlock, GateOp>;

class Schedule {
public:
    Schedule() = default;
    Schedule(int n, PauliHamiltonian resource, Mode mode, double dt);

    int qubit_count() const { return n_; }
    const PauliHamiltonian& resource() const { return resource_; }
    Mode mode() const { return mode_; }
    double dt() const { return dt_; }
    const std::vector<ScheduleItem>& items() const { return items_; }

    void set_mode(Mode m) { mode_ = m; }
    void set_dt(double dt);

    // Appends a layer, merging it into a directly preceding layer. Layers
    // that reduce to the identity are dropped.
    void add_layer(const std::vector<std::pair<int, Mat2>>& ops);
    void add_layer(const DigitalLayer& layer);
    // Appends an analog block, merging with a directly preceding block.
    // Zero durations are skipped.
    void add_analog(double t);
    void add_gate(GateOp g);
    void append(const Schedule& other);

    int layer_count() const;
    int analog_count() const;
    double analog_time() const;

    std::string serialize() const;

private:
    int n_ = 0;
    PauliHamiltonian resource_;
    Mode mode_ = Mode::SDAQC;
    double dt_ = 0.0;
    std::vector<ScheduleItem> items_;
};

// Homogeneous all-to-all Ising resource g * sum_{j<k} Z_j Z_k.
PauliHamiltonian homogeneous_ising(int n, double g);

// Generator of a single-qubit unitary over time dt: U = exp(-i H dt), with
// eigenphases taken in (-pi, pi].
Mat2 layer_generator(const Mat2& u, double dt);

// Executable primitive after mode-dependent lowering.
struct Step {
    enum class Kind { Pulse, Analog, Gate };
    Kind kind = Kind::Analog;
    int item = -1;               // index into Schedule::items
    double duration = 0.0;       // wall time
    bool resource_on = false;    // pulses in bDAQC run on top of H_int
};

struct Lowering {
    std::vector<Step> steps;
    std::vector<std::string> diagnostics;
    double deficit = 0.0;  // analog time that could not be absorbed
    double wall_time = 0.0;
};

// sDAQC: layers are sudden, analog blocks keep their durations.
// bDAQC: each pulse takes dt/2 from each neighbouring analog block (dt from
// the one neighbour at a boundary), so total interaction time is preserved.
Lowering lower(const Schedule& s);

// Runs a lowered schedule. The per-qubit field scales and analog offsets let
// the noise engine perturb pulses and blocks; defaults give the ideal run.
class ScheduleRunner {
public:
    explicit ScheduleRunner(const Schedule& s);

    const Schedule& schedule() const { return *s_; }
    const Lowering& lowering() const { return low_; }

    void run_pulse(const Step& st, QuantumState& state, const std::vector<double>* scales = nullptr);
    void run_analog(const Step& st, QuantumState& state, double offset = 0.0);
    void run_gate(const Step& st, QuantumState& state);
    void run(QuantumState& state);
    // Switches to another schedule with the same size, resource, mode and dt,
    // keeping the noiseless pulse cache.
    void rebind(const Schedule& s);

private:
    struct PulseKernel {
        std::vector<int> active;
        enum class Kind { Local, Context, Full } kind = Kind::Local;
        // Local: one 2x2 per active qubit. Context: one 2^a block per
        // assignment of the idle qubits. Full: blocks[0] is the whole unitary.
        std::vector<Mat> blocks;
    };
    PulseKernel build_pulse(const DigitalLayer& layer, bool resource_on, const std::vector<double>* scales) const;
    void apply_kernel(const PulseKernel& k, QuantumState& state) const;

    const Schedule* s_;
    Lowering low_;
    Evolver analog_;
    bool diag_resource_;
    // Noiseless pulses keyed by layer content.
    std::map<std::string, PulseKernel> cache_;
};

QuantumState simulate_schedule(const Schedule& s, const QuantumState& psi0);
// Full unitary of the schedule (columns are simulated basis states).
Mat schedule_unitary(const Schedule& s);

// Quantities for the banged-protocol error.
double bang_error_estimate(const PauliHamiltonian& h_i, const PauliHamiltonian& h_r, double dt);
double bang_boundary_estimate(const PauliHamiltonian& h_i, const PauliHamiltonian& h_r, double dt);
// || 1 - e^{-i H_I dt/2} e^{-i H_R dt} e^{-i H_I dt/2} e^{i (H_I + H_R) dt} ||, spectral.
double bang_error_measured(const PauliHamiltonian& h_i, const PauliHamiltonian& h_r, double dt);

struct BangErrorReport {
    std::vector<double> per_step;
    double e_first = 0.0;
    double e_last = 0.0;
    double total = 0.0;
    int interior = 0;  // A
};

BangErrorReport total_bang_error(const Schedule& s);

// Generator of a digital layer as a Pauli Hamiltonian (sum of single-qubit terms).
PauliHamiltonian layer_hamiltonian(const DigitalLayer& layer, double dt);

}  // namespace daqc
