#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "daqc/circuit.hpp"
#include "daqc/noise.hpp"
#include "daqc/schedule.hpp"

namespace daqc {

// digital runs the native gate set; the DAQC modes run compiled schedules.
enum class Paradigm { Digital, SDAQC, BDAQC };

std::string to_string(Paradigm p);
Paradigm paradigm_from_string(const std::string& s);

// ---- QFT ----

// DFT matrix with entries e^{2 pi i j k / 2^n} / 2^{n/2}.
Mat qft_matrix(int n);
// Output in bit-reversed order unless bit_reverse appends the final swaps.
GateCircuit build_qft(int n, bool bit_reverse = true);

// Per qubit m: Hadamard layer, the ZZ part of all controlled rotations that
// target m compiled as one Ising block (phases pi / 2^{k-m+2}), then the
// local Z phases. Matches build_qft(n, false) up to a global phase.
Schedule compile_qft_daqc(int n, Mode mode, double dt, double g = 1.0);

// sin(beta) |W_n> + cos(beta) |GHZ_n>
QuantumState qft_input_state(int n, double beta);

struct QFTRunResult {
    Paradigm mode = Paradigm::Digital;
    double beta = 0.0;
    double fidelity = 0.0;  // to the ideal QFT output (no final swaps)
    TrajectoryRun run;
};

// Digital lowers build_qft(n, false) to native gates; the DAQC modes run
// compile_qft_daqc with the model's single-qubit pulse time.
QFTRunResult run_qft(int n, Paradigm mode, const NoiseModel& noise, int shots, std::uint64_t seed, double beta);

// ---- DAQC two-qubit primitives on an all-to-all homogeneous Ising resource ----

// exp(-i phi Zc Zt). Blocks follow the rows of a Sylvester-Hadamard matrix:
// c and t share a column, each spectator gets its own, so every other pair
// cancels. Two blocks for n <= 3, 2^ceil(log2(n-1)) blocks beyond.
Schedule compile_zz_pair_daqc(int n, int c, int t, double phi, Mode mode, double dt, double g = 1.0);

// cZ from two analog blocks of duration pi/8 (n <= 3) with X on the
// spectators around the first block. With `exact` the local S^dag
// corrections are appended so the unitary is cZ up to a global phase.
Schedule compile_cz_daqc(int n, int control, int target, Mode mode = Mode::SDAQC, double dt = 0.01,
                         bool exact = false, double g = 1.0);

// Single-qubit gates become layers, CZ/CP/CNOT/SWAP use the primitives above,
// multi-qubit unitaries pass through as opaque gates.
Schedule circuit_to_daqc(const GateCircuit& c, Mode mode, double dt, double g = 1.0);

// ---- QPE ----

struct QPEResult {
    int n_r = 0;
    std::vector<double> probabilities;  // over register values, qubit 0 most significant
    double weighted_mean = 0.0;
    double weighted_std = 0.0;
    double majority = 0.0;              // value of the most likely string / 2^n_r
    std::vector<int> ranking;           // register values by decreasing probability
    TrajectoryRun run;
};

std::string bit_string(std::uint64_t v, int n);

// Register qubits 0..n_r-1 control P(phi)^{2^{n_r-1-j}} on the eigenstate |1>.
GateCircuit build_qpe(double phi, int n_r);
QPEResult run_qpe(double phi, int n_r, Paradigm mode, const NoiseModel& noise, int shots = 1,
                  std::uint64_t seed = 0);

// ---- HHL ----

// Binary reflected Gray code, g(i) = i ^ (i >> 1).
std::vector<std::uint64_t> gray_code(int n);
std::vector<std::string> gray_code_strings(int n);

// phi(p) = 2 arcsin(1/p), phi(0) = 0.
RVec aqe_phi(int n_r);
// M_ij = (-1)^{bin(i) . g(j)}, 0-based.
RMat aqe_sign_matrix(int n_r);
// theta = M^T phi / 2^{n_r + 1}; each theta_i drives exp(-i theta_i Z), so
// the ancilla angle for register value p is (M theta)_p = phi(p) / 2.
RVec aqe_angles(int n_r);
// max_p |2 (M theta)_p - phi(p)|
double aqe_residual(int n_r);

struct HHLProblem {
    Mat a;
    Vec b;
    int n_r = 2;
    void validate() const;
    int system_qubits() const;
};

struct HHLResult {
    Vec classical;               // normalized A^{-1} b
    // System state conditioned on ancilla = 1 and the register uncomputed to |0>.
    QuantumState solution;
    double success_probability = 0.0;
    double fidelity = 0.0;       // to the classical solution
    // Conditioned on ancilla = 1 only, register traced out.
    double ancilla_only_probability = 0.0;
    double ancilla_only_fidelity = 0.0;
    double error = 0.0;          // sqrt(2 (1 - sqrt(fidelity))), the phase-aligned distance for pure states
    TrajectoryRun run;
};

// Qubit layout: register 0..n_r-1, system n_r..n_r+n_M-1, ancilla last.
GateCircuit build_hhl(const HHLProblem& p);
HHLResult run_hhl(const HHLProblem& p, Paradigm mode, const NoiseModel& noise, int shots = 1, std::uint64_t seed = 0);

// ceil(log2(kappa sqrt(N_s))), at least 1.
int suggest_register_size(double kappa, int n_s);

// ---- QAOA ----

struct Edge {
    int a, b;
    double w = 1.0;
};

enum class QAOAMode { Ideal, SDA, BDA };
std::string to_string(QAOAMode m);
QAOAMode qaoa_mode_from_string(const std::string& s);

struct QAOAProblem {
    int n = 0;
    std::vector<Edge> edges;
    int p = 1;
    QAOAMode mode = QAOAMode::Ideal;
    double alpha = 1000.0;  // single-qubit to interaction strength ratio
    void validate() const;
};

struct OptimizerSettings {
    int starts = 20;
    int max_evals = 2000;
    double tol = 1e-7;
    std::uint64_t seed = 1;
};

struct QAOAResult {
    std::vector<double> gamma, beta;
    double ratio = 0.0;
    double expectation = 0.0;
    double max_cut = 0.0;
    int evaluations = 0;
    int best_start = -1;
    std::optional<double> noisy_ratio;  // at the optimum, when a noise model is given
    std::vector<std::string> warnings;
};

double max_cut_value(const QAOAProblem& p);
bool is_connected(const QAOAProblem& p);
// <H_P> / max cut at the given parameters.
double qaoa_ratio(const QAOAProblem& p, const std::vector<double>& gamma, const std::vector<double>& beta);

// Reusable evaluator; keeps the driver decomposition and pulse cache.
class QAOAEvaluator {
public:
    explicit QAOAEvaluator(const QAOAProblem& p);
    ~QAOAEvaluator();
    QAOAEvaluator(const QAOAEvaluator&) = delete;
    QAOAEvaluator& operator=(const QAOAEvaluator&) = delete;
    double ratio(const std::vector<double>& gamma, const std::vector<double>& beta);
    Vec state(const std::vector<double>& gamma, const std::vector<double>& beta);

private:
    struct Impl;
    Impl* impl_;
};

// Nelder-Mead over gamma in [0, 2 pi]^p and beta in [0, pi]^p, multi-start.
QAOAResult qaoa_run(const QAOAProblem& p, const OptimizerSettings& opt = {}, const NoiseModel& noise = {});

// Fixed 8-vertex 5-regular instances: complements of C8, C4+C4 and C5+C3.
std::vector<QAOAProblem> qaoa_reference_instances(int p, QAOAMode mode, double alpha);

}  // namespace daqc
