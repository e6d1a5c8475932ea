#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "daqc/types.hpp"

namespace daqc {

// N-qubit Pauli string over {I, X, Y, Z}. Character 0 acts on qubit 0, the
// leftmost tensor factor.
class PauliString {
public:
    PauliString() = default;
    explicit PauliString(std::string ops);
    static PauliString identity(int n) { return PauliString(std::string(n, 'I')); }
    // Single- or two-site helpers, e.g. single(4, 'X', 2) -> "IIXI".
    static PauliString single(int n, char op, int q);
    static PauliString pair(int n, char a, int qa, char b, int qb);

    int size() const { return static_cast<int>(ops_.size()); }
    char operator[](int q) const { return ops_[static_cast<size_t>(q)]; }
    const std::string& str() const { return ops_; }
    std::uint64_t x_mask() const;
    std::uint64_t z_mask() const;
    int y_count() const;
    int weight() const;
    std::vector<int> support() const;
    bool is_diagonal() const;
    bool commutes_with(const PauliString& other) const;

    // Product this * other = phase * result.
    std::pair<cplx, PauliString> multiply(const PauliString& other) const;

    bool operator<(const PauliString& o) const { return ops_ < o.ops_; }
    bool operator==(const PauliString& o) const { return ops_ == o.ops_; }

private:
    std::string ops_;
};

// Dense 2^N matrix of a Pauli string (Kronecker product, qubit 0 leftmost).
Mat pauli_matrix(const PauliString& p);
Mat2 pauli2(char op);

// Complex-weighted Pauli sum. Used for products and commutators where
// coefficients pick up factors of i.
class PauliSum {
public:
    PauliSum() = default;
    explicit PauliSum(int n) : n_(n) {}

    int qubit_count() const { return n_; }
    const std::map<PauliString, cplx>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    void add(const PauliString& p, cplx c);
    PauliSum& operator+=(const PauliSum& o);
    PauliSum& operator-=(const PauliSum& o);
    PauliSum operator+(const PauliSum& o) const;
    PauliSum operator-(const PauliSum& o) const;
    PauliSum operator*(const PauliSum& o) const;
    PauliSum scaled(cplx s) const;
    PauliSum adjoint() const;
    // Drop terms with |c| <= tol.
    PauliSum pruned(double tol = 1e-14) const;

    bool is_hermitian(double tol = TOL_VALID) const;
    Mat matrix() const;
    Vec apply(const Vec& v) const;
    void apply_into(const Vec& v, Vec& out) const;
    // Frobenius norm from coefficients: sqrt(sum |c|^2 * 2^N).
    double frobenius_norm(bool normalized = false) const;

private:
    int n_ = 0;
    std::map<PauliString, cplx> terms_;
};

PauliSum commutator(const PauliSum& a, const PauliSum& b);

struct PauliTerm {
    double coeff;
    PauliString str;
};

// Real-weighted Pauli sum; Hermitian by construction.
class PauliHamiltonian {
public:
    PauliHamiltonian() = default;
    explicit PauliHamiltonian(int n) : n_(n) {}
    PauliHamiltonian(int n, std::vector<PauliTerm> terms);
    // Accepts a PauliSum whose coefficients are real within tol.
    static PauliHamiltonian from_sum(const PauliSum& s, double tol = TOL_VALID);

    int qubit_count() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    PauliHamiltonian& add(double c, const PauliString& p);
    PauliHamiltonian& add(double c, const std::string& p) { return add(c, PauliString(p)); }
    PauliHamiltonian operator+(const PauliHamiltonian& o) const;
    PauliHamiltonian scaled(double s) const;
    // Merge equal strings and drop zero coefficients; output sorted by string.
    PauliHamiltonian simplified(double tol = 0.0) const;

    PauliSum to_sum() const;
    Mat matrix() const;
    Vec apply(const Vec& v) const;
    bool is_diagonal() const;
    // Diagonal of the matrix; valid when is_diagonal().
    RVec diagonal() const;
    double coefficient(const std::string& p) const;

private:
    int n_ = 0;
    std::vector<PauliTerm> terms_;
};

// Exact conjugation exp(-i theta Q) P exp(+i theta Q) for a Pauli rotation
// generator Q, applied term by term.
PauliSum conjugate_by_pauli_rotation(const PauliSum& h, const PauliString& q, double theta);

// Expand V^dagger H V for V a tensor product of single-qubit unitaries.
PauliSum conjugate_by_local(const PauliSum& h, const std::vector<Mat2>& layer);

}  // namespace daqc
