#pragma once

#include "daqc/types.hpp"

namespace daqc {

// Dense statevector or density matrix over 2^N dimensions.
class QuantumState {
public:
    enum class Kind { Statevector, DensityMatrix };

    QuantumState() = default;
    // Validating constructors. Statevectors must have unit norm within 1e-10
    // unless normalize is set.
    static QuantumState from_vector(Vec v, bool normalize = false);
    static QuantumState from_density(Mat rho);
    static QuantumState basis(int n, std::uint64_t index);
    static QuantumState maximally_mixed(int n);

    int qubit_count() const { return n_; }
    std::uint64_t dim() const { return dim_of(n_); }
    Kind kind() const { return kind_; }
    bool is_pure() const { return kind_ == Kind::Statevector; }

    const Vec& vec() const { return psi_; }
    const Mat& rho() const { return rho_; }
    Vec& vec_mut() { return psi_; }
    Mat& rho_mut() { return rho_; }

    QuantumState to_density() const;
    // Throws InvalidState when the invariants are violated.
    void validate(double tol = TOL_VALID) const;
    // Computational-basis probabilities.
    RVec probabilities() const;

private:
    int n_ = 0;
    Kind kind_ = Kind::Statevector;
    Vec psi_;
    Mat rho_;
};

// Uhlmann fidelity [tr sqrt(sqrt(a) b sqrt(a))]^2; pure states short-circuit.
double fidelity(const QuantumState& a, const QuantumState& b);

}  // namespace daqc
