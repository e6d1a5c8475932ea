#include "daqc/state.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "daqc/errors.hpp"

namespace daqc {

namespace {

int qubits_for_dim(Eigen::Index d) {
    if (d < 2) throw DimensionError("state dimension must be at least 2");
    int n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    if ((Eigen::Index{1} << n) != d) throw DimensionError("state dimension is not a power of two");
    return n;
}

}  // namespace

QuantumState QuantumState::from_vector(Vec v, bool normalize) {
    QuantumState s;
    s.n_ = qubits_for_dim(v.size());
    if (normalize) {
        const double nrm = v.norm();
        if (nrm == 0.0) throw InvalidState("zero vector");
        v /= nrm;
    }
    s.kind_ = Kind::Statevector;
    s.psi_ = std::move(v);
    s.validate();
    return s;
}

QuantumState QuantumState::from_density(Mat rho) {
    if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
    QuantumState s;
    s.n_ = qubits_for_dim(rho.rows());
    s.kind_ = Kind::DensityMatrix;
    s.rho_ = std::move(rho);
    s.validate();
    return s;
}

QuantumState QuantumState::basis(int n, std::uint64_t index) {
    if (n < 1) throw DimensionError("need at least one qubit");
    if (index >= dim_of(n)) throw DimensionError("basis index out of range");
    Vec v = Vec::Zero(static_cast<Eigen::Index>(dim_of(n)));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return from_vector(std::move(v));
}

QuantumState QuantumState::maximally_mixed(int n) {
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    return from_density(Mat::Identity(d, d) / static_cast<double>(d));
}

QuantumState QuantumState::to_density() const {
    if (kind_ == Kind::DensityMatrix) return *this;
    QuantumState s;
    s.n_ = n_;
    s.kind_ = Kind::DensityMatrix;
    s.rho_ = psi_ * psi_.adjoint();
    return s;
}

void QuantumState::validate(double tol) const {
    if (kind_ == Kind::Statevector) {
        if (std::abs(psi_.norm() - 1.0) > tol) throw InvalidState("statevector is not normalized");
        return;
    }
    if ((rho_ - rho_.adjoint()).norm() > tol) throw InvalidState("density matrix is not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0)) > tol) throw InvalidState("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) throw InvalidState("density matrix is not positive");
}

RVec QuantumState::probabilities() const {
    if (kind_ == Kind::Statevector) return psi_.cwiseAbs2();
    return rho_.diagonal().real();
}

double fidelity(const QuantumState& a, const QuantumState& b) {
    if (a.dim() != b.dim()) throw DimensionError("fidelity of states with different dimension");
    double f;
    if (a.is_pure() && b.is_pure()) {
        f = std::norm(a.vec().dot(b.vec()));
    } else if (a.is_pure()) {
        f = (a.vec().adjoint() * b.rho() * a.vec())(0).real();
    } else if (b.is_pure()) {
        f = (b.vec().adjoint() * a.rho() * b.vec())(0).real();
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> ea(a.rho());
        RVec lam = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        Mat sqa = ea.eigenvectors() * lam.asDiagonal() * ea.eigenvectors().adjoint();
        Mat m = sqa * b.rho() * sqa;
        m = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> em(m, Eigen::EigenvaluesOnly);
        const double tr = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
        f = tr * tr;
    }
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace daqc
