#include "daqc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "daqc/errors.hpp"

namespace daqc {

Mat expm_hermitian(const Mat& h, double t, ExpSign sign) {
    if (h.rows() != h.cols()) throw DimensionError("generator must be square");
    const double scale = std::max(1.0, h.norm());
    if ((h - h.adjoint()).norm() > TOL_VALID * scale)
        throw InvalidHamiltonian("generator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) throw InvalidHamiltonian("eigendecomposition failed");
    const double s = -sign_factor(sign) * t;
    Vec ph = (I_UNIT * s * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Mat propagator(const PauliHamiltonian& h, double t, ExpSign sign) {
    if (h.is_diagonal()) {
        const RVec e = h.diagonal();
        const double s = -sign_factor(sign) * t;
        Vec ph(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) ph[i] = std::exp(I_UNIT * (s * e[i]));
        return ph.asDiagonal();
    }
    return expm_hermitian(h.matrix(), t, sign);
}

bool is_unitary(const Mat& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm() <= tol;
}

double frobenius_norm(const Mat& m, bool normalized) {
    const double f = m.norm();
    if (!normalized || m.rows() == 0) return f;
    return f / std::sqrt(static_cast<double>(m.rows()));
}

double spectral_norm(const Mat& m, double rel_tol, int max_iter) {
    if (m.rows() != m.cols()) throw DimensionError("spectral_norm needs a square matrix");
    if (m.rows() == 0 || m.norm() == 0.0) return 0.0;
    const Mat g = m.adjoint() * m;
    // Deterministic start with weight on every basis vector.
    Vec v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(1.0 + 0.01 * static_cast<double>(i % 7), 0.003 * static_cast<double>(i % 5));
    v.normalize();
    double lam = 0.0;
    int stable = 0;
    for (int it = 0; it < max_iter; ++it) {
        Vec w = g * v;
        const double next = v.dot(w).real();
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        v = w / wn;
        if (std::abs(next - lam) <= rel_tol * std::abs(next) * 1e-2) {
            if (++stable >= 3) return std::sqrt(std::max(next, 0.0));
        } else {
            stable = 0;
        }
        lam = next;
    }
    throw ConvergenceError("power iteration did not converge");
}

double spectral_norm(const PauliSum& a, double rel_tol, int max_iter) {
    const int n = a.qubit_count();
    if (a.size() == 0) return 0.0;
    if (n <= 10) return spectral_norm(a.matrix(), rel_tol);

    // Lanczos with full reorthogonalization on B = A^dag A.
    const PauliSum ad = a.adjoint();
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    std::vector<Vec> basis;
    std::vector<double> alpha, beta;
    Vec q(d);
    for (Eigen::Index i = 0; i < d; ++i) q[i] = cplx(1.0 + 0.01 * static_cast<double>(i % 7), 0.003 * static_cast<double>(i % 5));
    q.normalize();
    Vec tmp, w;
    double prev = -1.0;
    for (int k = 0; k < max_iter; ++k) {
        basis.push_back(q);
        a.apply_into(q, tmp);
        ad.apply_into(tmp, w);
        const double al = q.dot(w).real();
        alpha.push_back(al);
        for (const Vec& b : basis) w -= b * b.dot(w);
        for (const Vec& b : basis) w -= b * b.dot(w);
        const double be = w.norm();

        const auto m = static_cast<Eigen::Index>(alpha.size());
        RMat t = RMat::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alpha[static_cast<size_t>(i)];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(t, Eigen::EigenvaluesOnly);
        const double top = es.eigenvalues().maxCoeff();
        if (be < 1e-12 * std::max(1.0, top)) return std::sqrt(std::max(top, 0.0));
        if (prev > 0.0 && std::abs(top - prev) <= rel_tol * 1e-2 * top) return std::sqrt(top);
        prev = top;
        beta.push_back(be);
        q = w / be;
    }
    throw ConvergenceError("Lanczos iteration did not converge");
}

double phase_aligned_distance(const Mat& u, const Mat& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) throw DimensionError("shape mismatch");
    const double s = u.squaredNorm() + v.squaredNorm() - 2.0 * std::abs((v.adjoint() * u).trace());
    return std::sqrt(std::max(s, 0.0));
}

void apply_on_qubits(cplx* data, std::ptrdiff_t stride, int n, const Mat& u,
                     const std::vector<int>& qubits) {
    const int k = static_cast<int>(qubits.size());
    const std::uint64_t sub = dim_of(k);
    if (static_cast<std::uint64_t>(u.rows()) != sub || u.rows() != u.cols())
        throw DimensionError("operator size does not match qubit list");
    std::vector<std::uint64_t> offs(sub, 0);
    std::uint64_t mask = 0;
    for (int j = 0; j < k; ++j) {
        if (qubits[j] < 0 || qubits[j] >= n) throw DimensionError("qubit index out of range");
        const std::uint64_t bit = std::uint64_t{1} << bit_of(n, qubits[j]);
        if (mask & bit) throw DimensionError("repeated qubit index");
        mask |= bit;
    }
    // Local index bit (k-1-j) corresponds to qubits[j].
    for (std::uint64_t l = 0; l < sub; ++l)
        for (int j = 0; j < k; ++j)
            if (l & (std::uint64_t{1} << (k - 1 - j))) offs[l] |= std::uint64_t{1} << bit_of(n, qubits[j]);

    const std::uint64_t d = dim_of(n);
    std::vector<cplx> in(sub), out(sub);
    for (std::uint64_t base = 0; base < d; ++base) {
        if (base & mask) continue;
        for (std::uint64_t l = 0; l < sub; ++l) in[l] = data[static_cast<std::ptrdiff_t>(base | offs[l]) * stride];
        for (std::uint64_t r = 0; r < sub; ++r) {
            cplx acc = 0.0;
            for (std::uint64_t c = 0; c < sub; ++c)
                acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
            out[r] = acc;
        }
        for (std::uint64_t l = 0; l < sub; ++l) data[static_cast<std::ptrdiff_t>(base | offs[l]) * stride] = out[l];
    }
}

void apply_on_qubits(Vec& psi, int n, const Mat& u, const std::vector<int>& qubits) {
    if (static_cast<std::uint64_t>(psi.size()) != dim_of(n)) throw DimensionError("state size mismatch");
    apply_on_qubits(psi.data(), 1, n, u, qubits);
}

void conjugate_on_qubits(Mat& rho, int n, const Mat& u, const std::vector<int>& qubits) {
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("density matrix size mismatch");
    // Columns get U; rows get conj(U), giving U rho U^dag.
    for (Eigen::Index c = 0; c < d; ++c) apply_on_qubits(rho.data() + c * d, 1, n, u, qubits);
    const Mat uc = u.conjugate();
    for (Eigen::Index r = 0; r < d; ++r) apply_on_qubits(rho.data() + r, d, n, uc, qubits);
}

void apply_unitary(QuantumState& s, const Mat& u, const std::vector<int>& qubits) {
    if (s.is_pure())
        apply_on_qubits(s.vec_mut(), s.qubit_count(), u, qubits);
    else
        conjugate_on_qubits(s.rho_mut(), s.qubit_count(), u, qubits);
}

void apply_unitary(QuantumState& s, const Mat& u) {
    if (static_cast<std::uint64_t>(u.rows()) != s.dim()) throw DimensionError("unitary size mismatch");
    if (s.is_pure())
        s.vec_mut() = u * s.vec();
    else
        s.rho_mut() = u * s.rho() * u.adjoint();
}

Mat kron_layer(const std::vector<Mat2>& ops) {
    Mat m = Mat::Identity(1, 1);
    for (const auto& o : ops) {
        Mat next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = m(i, j) * o;
        m.swap(next);
    }
    return m;
}

Mat embed(int n, const Mat& u, const std::vector<int>& qubits) {
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Mat m = Mat::Identity(d, d);
    for (Eigen::Index c = 0; c < d; ++c) apply_on_qubits(m.data() + c * d, 1, n, u, qubits);
    return m;
}

Evolver::Evolver(const PauliHamiltonian& h) {
    if (h.is_diagonal()) {
        diagonal_ = true;
        energies_ = h.diagonal();
    } else {
        *this = Evolver(h.matrix());
    }
}

Evolver::Evolver(const Mat& h) {
    if (h.rows() != h.cols()) throw DimensionError("generator must be square");
    if ((h - h.adjoint()).norm() > TOL_VALID * std::max(1.0, h.norm()))
        throw InvalidHamiltonian("generator is not Hermitian");
    const Mat off = h - Mat(h.diagonal().asDiagonal());
    if (off.norm() == 0.0) {
        diagonal_ = true;
        energies_ = h.diagonal().real();
        return;
    }
    diagonal_ = false;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) throw InvalidHamiltonian("eigendecomposition failed");
    energies_ = es.eigenvalues();
    vecs_ = es.eigenvectors();
}

Mat Evolver::unitary(double t, ExpSign sign) const {
    const double s = -sign_factor(sign) * t;
    Vec ph(energies_.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(I_UNIT * (s * energies_[i]));
    if (diagonal_) return ph.asDiagonal();
    return vecs_ * ph.asDiagonal() * vecs_.adjoint();
}

void Evolver::apply(Vec& psi, double t) const {
    if (psi.size() != energies_.size()) throw DimensionError("state size mismatch");
    if (t == 0.0) return;
    Vec ph(energies_.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(I_UNIT * (-t * energies_[i]));
    if (diagonal_) {
        psi = psi.cwiseProduct(ph);
    } else {
        Vec c = vecs_.adjoint() * psi;
        psi = vecs_ * c.cwiseProduct(ph);
    }
}

void Evolver::apply(Mat& rho, double t) const {
    if (rho.rows() != energies_.size()) throw DimensionError("state size mismatch");
    if (t == 0.0) return;
    Vec ph(energies_.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(I_UNIT * (-t * energies_[i]));
    if (diagonal_) {
        rho = ph.asDiagonal() * rho * ph.conjugate().asDiagonal();
    } else {
        const Mat u = vecs_ * ph.asDiagonal() * vecs_.adjoint();
        rho = u * rho * u.adjoint();
    }
}

void Evolver::apply(QuantumState& s, double t) const {
    if (s.is_pure())
        apply(s.vec_mut(), t);
    else
        apply(s.rho_mut(), t);
}

}  // namespace daqc
