#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "daqc/pauli.hpp"
#include "daqc/schedule.hpp"

namespace daqc {

// Symmetric pair couplings g_jk, j != k, 0-based qubits.
class CouplingMatrix {
public:
    CouplingMatrix() = default;
    explicit CouplingMatrix(int n);
    static CouplingMatrix homogeneous(int n, double g);

    int qubit_count() const { return n_; }
    double get(int j, int k) const;
    void set(int j, int k, double v);
    bool all_zero() const;
    // Values in the pair order alpha = 1..K.
    RVec as_vector() const;
    PauliHamiltonian hamiltonian() const;  // sum_{j<k} g_jk Z_j Z_k

private:
    int n_ = 0;
    RMat g_;
};

// Pair (n, m), 1 <= n < m <= N, to alpha in 1..N(N-1)/2 and back.
int vectorize_pair(int n, int m, int N);
std::pair<int, int> unvectorize_pair(int alpha, int N);

// M_ab = (-1)^(d_nj + d_nk + d_mj + d_mk). Defined for N >= 2.
RMat sign_matrix(int N);
double sign_matrix_lambda1(int N);  // N(N-9)/2 + 8, eigenvalue of the all-ones vector

struct NegativeTimeRepair {
    std::vector<double> shifted;
    double shift = 0.0;          // |t_min|
    double extra_block = 0.0;    // lambda1 * t_min: signed duration of the bare block
    double extra_duration = 0.0; // emitted forward duration (after a period wrap if needed)
    bool wrapped = false;
};

// Adds |t_min| to every time; the bare resource block of duration
// lambda1 * t_min cancels the homogeneous part that the shift introduces.
// A negative extra block is wrapped forward by `period` when one is given.
NegativeTimeRepair fix_negative_times(const std::vector<double>& times, double lambda1,
                                      std::optional<double> period = std::nullopt);

struct CompilationResult {
    Schedule schedule;
    std::vector<double> analog_times;  // t_alpha as solved (before repair)
    std::optional<NegativeTimeRepair> repair;
    double synthesis_residual = 0.0;  // normalized Frobenius distance of Hamiltonians
    int block_count = 0;              // analog blocks emitted
    std::vector<std::string> diagnostics;
};

struct IsingOptions {
    ExpSign sign = ExpSign::Minus;  // Plus targets exp(+i t_F H)
    Mode mode = Mode::SDAQC;
    double dt = 0.01;
    // When false the negative extra block wraps by pi / (2g) instead of
    // 2 pi / g, exact up to a global phase (plus Z on every qubit for even N).
    bool exact_phase = true;
};

// Synthesizes exp(-i t_F sum g_jk Z_j Z_k) from the homogeneous resource
// g sum Z_j Z_k and pairs of X flips.
CompilationResult compile_ising(const CouplingMatrix& target, double t_F, double g, const IsingOptions& opt = {});

// Couplings g^{mu nu}_jk for mu, nu in {x, z}; index 0..3 = xx, xz, zx, zz.
struct XZCouplings {
    explicit XZCouplings(int n = 0) : n(n), c(4, CouplingMatrix(n)) {}
    int n;
    std::vector<CouplingMatrix> c;
    PauliHamiltonian hamiltonian() const;
};

// theta_w^{[s]} = s pi w / (2 (w + 1)) with w the 1-based qubit index.
double xz_default_phase(int s, int w);
// R_theta = cos(theta/2) Z + sin(theta/2) X, so R Z R = cos(theta) Z + sin(theta) X.
Mat2 xz_rotation(double theta);

struct XZDecomposition {
    std::vector<CouplingMatrix> g_s;           // four inhomogeneous Ising targets
    std::vector<std::vector<double>> theta;    // theta[s][q]
    PauliHamiltonian reconstructed;            // sum_s R H_ZZ^{[s]} R
    double residual = 0.0;                     // normalized Frobenius vs target
};

// Per-pair 4x4 solve. `theta` overrides the default phases when non-empty.
XZDecomposition xz_decompose(const XZCouplings& target, const std::vector<std::vector<double>>& theta = {});

CompilationResult compile_xz(const XZCouplings& target, double t_F, double g, int n_T, const IsingOptions& opt = {},
                             const std::vector<std::vector<double>>& theta = {});

struct MBodyCount {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;          // a N + b
    bool integral = true;
    std::optional<double> quoted; // 117 N - 306 for M = 4
    std::vector<std::string> warnings;
};

MBodyCount mbody_block_count(int M, int N);

struct MBodyBlocks {
    std::vector<PauliHamiltonian> h1, h2;
};

// Default phases: theta[k][site], k = 0..3, sites 1,2 (mod 4) -> 2 pi (k+1)/3,
// sites 3,0 (mod 4) -> 2 pi (k+1)/5 (1-based sites).
std::vector<std::vector<double>> mbody_default_phases(int N);

// H1 = e^{-i O} H_ZZ e^{i O} with O on bonds (2,3), (4,5), ... and H2 with
// bonds (1,2), (3,4), ... (1-based), phases taken from the first site of
// each bond. Couplings default to 1 on every nearest-neighbour bond.
MBodyBlocks build_mbody_hamiltonian_blocks(int N, const std::vector<std::vector<double>>& phases,
                                           const std::vector<double>& g1 = {}, const std::vector<double>& g2 = {});

// N/2 edge-disjoint Hamiltonian paths covering K_N (N even), 0-based.
std::vector<std::vector<int>> path_decomposition(int N);

}  // namespace daqc
