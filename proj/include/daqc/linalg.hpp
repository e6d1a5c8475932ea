#pragma once

#include <vector>

#include "daqc/pauli.hpp"
#include "daqc/state.hpp"
#include "daqc/types.hpp"

namespace daqc {

// exp(-i H t) (or exp(+i H t) with ExpSign::Plus) by Hermitian eigendecomposition.
Mat expm_hermitian(const Mat& h, double t, ExpSign sign = ExpSign::Minus);
Mat propagator(const PauliHamiltonian& h, double t, ExpSign sign = ExpSign::Minus);

bool is_unitary(const Mat& u, double tol = TOL_UNITARY);

// sqrt(tr(A^dag A)); normalized divides by sqrt(dim), so tr(I) = 1.
double frobenius_norm(const Mat& m, bool normalized = false);

// Largest singular value by power iteration on m^dag m.
double spectral_norm(const Mat& m, double rel_tol = TOL_NORM_ITER, int max_iter = 20000);
// Matrix-free variant for Pauli sums; Lanczos on A^dag A above 10 qubits.
double spectral_norm(const PauliSum& a, double rel_tol = TOL_NORM_ITER, int max_iter = 400);

// min over global phase of ||U - e^{i phi} V||_F.
double phase_aligned_distance(const Mat& u, const Mat& v);

// Apply a 2^k x 2^k matrix to the listed qubits of a vector laid out with
// the given stride (stride 1 for a statevector, d for a density-matrix row).
void apply_on_qubits(cplx* data, std::ptrdiff_t stride, int n, const Mat& u,
                     const std::vector<int>& qubits);
void apply_on_qubits(Vec& psi, int n, const Mat& u, const std::vector<int>& qubits);
// rho -> U rho U^dag for U acting on the listed qubits.
void conjugate_on_qubits(Mat& rho, int n, const Mat& u, const std::vector<int>& qubits);
void apply_unitary(QuantumState& s, const Mat& u, const std::vector<int>& qubits);
void apply_unitary(QuantumState& s, const Mat& u);

// Full 2^N matrix of a tensor product of single-qubit operators.
Mat kron_layer(const std::vector<Mat2>& ops);
// Embed a k-qubit operator into the full space.
Mat embed(int n, const Mat& u, const std::vector<int>& qubits);

// Cached eigendecomposition of a fixed Hamiltonian for repeated evolution.
// Diagonal Hamiltonians skip the decomposition.
class Evolver {
public:
    Evolver() = default;
    explicit Evolver(const PauliHamiltonian& h);
    explicit Evolver(const Mat& h);

    bool diagonal() const { return diagonal_; }
    std::uint64_t dim() const { return static_cast<std::uint64_t>(energies_.size()); }
    Mat unitary(double t, ExpSign sign = ExpSign::Minus) const;
    void apply(Vec& psi, double t) const;
    void apply(Mat& rho, double t) const;
    void apply(QuantumState& s, double t) const;

private:
    bool diagonal_ = true;
    RVec energies_;
    Mat vecs_;
};

}  // namespace daqc
