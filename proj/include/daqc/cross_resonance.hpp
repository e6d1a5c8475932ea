#pragma once

#include <string>
#include <vector>

#include "daqc/pauli.hpp"
#include "daqc/types.hpp"

namespace daqc {

// Cross-resonance drive parameters (rad/s or any consistent unit). Per-site
// vectors override the uniform values when non-empty; site k is the control
// of the bond (k, k+1).
struct CRParams {
    double g = 1.0;
    double omega = 0.1;
    double delta = 1.0;
    double phi = 0.0;
    std::vector<double> g_k, omega_k, delta_k, phi_k;
    double weak_driving_limit = 0.1;

    double g_at(int k) const;
    double omega_at(int k) const;
    double delta_at(int k) const;
    double phi_at(int k) const;
    // J_k = -g_k Omega_k / (4 delta_k)
    double J(int k = 0) const;
    bool weak_driving() const;  // max Omega_k / |delta_k| <= limit
    void validate() const;
};

enum class LatticeKind { Chain, Square };
enum class Boundary { Open, Periodic };

struct LatticeSpec {
    LatticeKind kind = LatticeKind::Chain;
    int n = 2;  // chain length or square side
    Boundary boundary = Boundary::Open;

    int qubit_count() const;
    // Square lattice site (i, j), 0-based, row major.
    int site(int i, int j) const { return i * n + j; }
    void validate() const;
};

// Chain: sum_k J_k X_k (Z_{k+1} cos dphi_k - Y_{k+1} sin dphi_k), dphi_k = phi_k - phi_{k+1}.
// Square: each site drives its +i and +j neighbours, J X_c Z_t per bond.
PauliHamiltonian cr_hamiltonian(const CRParams& p, const LatticeSpec& lat);
// Two-qubit form g Omega / (4 delta) (cos phi X X + sin phi X Y).
PauliHamiltonian cr_two_qubit_hamiltonian(const CRParams& p);

// V^dag H V for V the tensor product of the layer. Throws InvalidLayer
// when a factor is not a 2x2 unitary or the layer size is wrong.
PauliHamiltonian toggle(const PauliHamiltonian& h, const std::vector<Mat2>& layer);

// Layer with u on the listed qubits and identity elsewhere.
std::vector<Mat2> layer_on(int n, const Mat2& u, const std::vector<int>& qubits);
// 1-based even (or odd) sites as 0-based indices.
std::vector<int> even_sites(int n);
std::vector<int> odd_sites(int n);

// e^{-i pi/(3 sqrt 3) (X + Y + Z)} = (I - i (X + Y + Z)) / 2
Mat2 r_e();
// R_x(pi/2) = e^{-i pi X / 4}
Mat2 r_x_half_pi();

// Chain Hamiltonians toggled from H_A = J sum X_k Z_{k+1} (open chain).
PauliHamiltonian h_even(int n, double J);  // Hadamard on even sites
PauliHamiltonian h_odd(int n, double J);   // Hadamard on odd sites
// Selective drive of odd (even) controls with phase phi:
// J sum X_c (X_t cos phi + Y_t sin phi).
PauliHamiltonian h_qf_selective(int n, double J, bool odd_controls, double phi = 0.0);

// Target models.
PauliHamiltonian ising_chain(int n, double J);       // J sum Z Z
PauliHamiltonian xy_chain(int n, double J);          // J sum (X X + Y Y)
PauliHamiltonian heisenberg_chain(int n, double J);  // J sum (X X + Y Y + Z Z)
PauliHamiltonian xy_square(int n, double J, Boundary b);

struct HeisenbergParts {
    PauliHamiltonian h_e, h_e1, h_e2;  // H_E, R_E^dag H_E R_E, R_E^2dag H_E R_E^2
};
HeisenbergParts heisenberg_parts(int n, double J);

struct XY2DParts {
    PauliHamiltonian h_odd, h_even;  // toggled square-lattice CR Hamiltonians
    PauliHamiltonian h_i, h_ii;      // R_x(pi/2) rotations of h_even and h_odd
};
XY2DParts xy2d_parts(int n, double J, Boundary b);

enum class SpinModel { Ising, XY, Heisenberg };
std::string to_string(SpinModel m);
SpinModel spin_model_from_string(const std::string& s);

// One protocol element: a single-qubit layer or an analog propagator.
struct ProtocolOp {
    enum class Kind { Layer, Analog };
    Kind kind = Kind::Layer;
    std::vector<Mat2> layer;      // Layer
    PauliHamiltonian resource;    // Analog
    double t = 0.0;
    std::string label;
};

struct SpinSimResult {
    SpinModel model = SpinModel::Ising;
    PauliHamiltonian target;
    std::vector<ProtocolOp> step;  // one Trotter step, applied in order
    int steps = 0;                 // M = T / tau
    Mat protocol;                  // step^M
    Mat exact;                     // exp(-i H_target T)
    double error = 0.0;            // spectral norm of the difference
    bool trotter_free = false;
};

// Ising and XY chains are exact; Heisenberg chains and XY squares carry
// first-order Trotter error. Square simulation is limited to n <= 3.
SpinSimResult simulate_spin_model(SpinModel model, const LatticeSpec& lat, const CRParams& p, double T, double tau);

struct CommutatorBound {
    double numeric = 0.0;
    double bound = 0.0;          // DAQC bound
    double digital_bound = 0.0;  // digital-side bound
    double loose_bound = 0.0;    // extensive bound (2D only)
    bool holds = false;
};

// ||[H_E, H_E'] + [H_E, H_E''] + [H_E', H_E'']|| on an open chain against 6 J^2 N;
// digital bound 12 J^2 N.
CommutatorBound heisenberg_commutator_bound(int n, double J);
// ||[H_I, H_II]|| on the periodic n x n lattice against 16 J^2; loose bound
// 16 J^2 n^2, digital bound 24 J^2 n^2.
CommutatorBound xy2d_commutator_norm(int n, double J);

enum class SynthesisModel { A, XY, ZZ };
SynthesisModel synthesis_model_from_string(const std::string& s);

struct SynthesisParams {
    double delta = 1.0;
    double omega = 0.0;
    double varphi = 0.0;  // phase phi_k(t) of the ZZ-toggled model
};

// Closed forms, normalized Frobenius norm (tr I = 1):
// A: g / (2 sqrt 2) sqrt(N - 1), XY: g / 2 sqrt(N - 1),
// ZZ: g / (2 sqrt 2) sqrt(N - 1) sqrt(2 + cos(dt) cos(varphi - dt) + Omega/delta sin(dt) sin(varphi)).
double synthesis_error_norm(int n, double g, SynthesisModel m, double t, const SynthesisParams& p = {});
// Model A Delta H(t) built as a Pauli sum (Omega/delta terms dropped).
PauliHamiltonian synthesis_delta_h(int n, double g, double delta, double t);
// XY-toggled Delta H(t) as a Pauli sum, Omega/delta terms included.
PauliHamiltonian synthesis_delta_h_xy(int n, double g, double delta, double omega, double t);
// g / (delta sqrt 2) |sin(delta t / 2)| sqrt(N - 1)
double propagator_diff_norm(int n, double g, double delta, double t);

}  // namespace daqc
