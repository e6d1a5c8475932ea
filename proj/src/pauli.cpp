#include "daqc/pauli.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "daqc/errors.hpp"

namespace daqc {

namespace {

std::pair<cplx, char> site_product(char a, char b) {
    if (a == 'I') return {1.0, b};
    if (b == 'I') return {1.0, a};
    if (a == b) return {1.0, 'I'};
    // a b = i eps_abc c
    if (a == 'X' && b == 'Y') return {I_UNIT, 'Z'};
    if (a == 'Y' && b == 'Z') return {I_UNIT, 'X'};
    if (a == 'Z' && b == 'X') return {I_UNIT, 'Y'};
    if (a == 'Y' && b == 'X') return {-I_UNIT, 'Z'};
    if (a == 'Z' && b == 'Y') return {-I_UNIT, 'X'};
    return {-I_UNIT, 'Y'};  // X Z
}

void check_op(char c) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        throw InvalidHamiltonian(std::string("unknown Pauli symbol '") + c + "'");
}

}  // namespace

PauliString::PauliString(std::string ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw InvalidHamiltonian("empty Pauli string");
    if (ops_.size() > 62) throw DimensionError("Pauli string longer than 62 qubits");
    for (char c : ops_) check_op(c);
}

PauliString PauliString::single(int n, char op, int q) {
    if (q < 0 || q >= n) throw IndexError("qubit index out of range");
    std::string s(static_cast<size_t>(n), 'I');
    s[static_cast<size_t>(q)] = op;
    return PauliString(s);
}

PauliString PauliString::pair(int n, char a, int qa, char b, int qb) {
    if (qa < 0 || qa >= n || qb < 0 || qb >= n || qa == qb)
        throw IndexError("invalid qubit pair");
    std::string s(static_cast<size_t>(n), 'I');
    s[static_cast<size_t>(qa)] = a;
    s[static_cast<size_t>(qb)] = b;
    return PauliString(s);
}

std::uint64_t PauliString::x_mask() const {
    std::uint64_t m = 0;
    const int n = size();
    for (int q = 0; q < n; ++q)
        if (ops_[q] == 'X' || ops_[q] == 'Y') m |= std::uint64_t{1} << bit_of(n, q);
    return m;
}

std::uint64_t PauliString::z_mask() const {
    std::uint64_t m = 0;
    const int n = size();
    for (int q = 0; q < n; ++q)
        if (ops_[q] == 'Z' || ops_[q] == 'Y') m |= std::uint64_t{1} << bit_of(n, q);
    return m;
}

int PauliString::y_count() const {
    int c = 0;
    for (char o : ops_) c += (o == 'Y');
    return c;
}

int PauliString::weight() const {
    int c = 0;
    for (char o : ops_) c += (o != 'I');
    return c;
}

std::vector<int> PauliString::support() const {
    std::vector<int> s;
    for (int q = 0; q < size(); ++q)
        if (ops_[q] != 'I') s.push_back(q);
    return s;
}

bool PauliString::is_diagonal() const {
    for (char o : ops_)
        if (o == 'X' || o == 'Y') return false;
    return true;
}

bool PauliString::commutes_with(const PauliString& other) const {
    if (other.size() != size()) throw DimensionError("Pauli strings of different length");
    int anti = 0;
    for (int q = 0; q < size(); ++q) {
        const char a = ops_[q], b = other.ops_[q];
        if (a != 'I' && b != 'I' && a != b) ++anti;
    }
    return anti % 2 == 0;
}

std::pair<cplx, PauliString> PauliString::multiply(const PauliString& other) const {
    if (other.size() != size()) throw DimensionError("Pauli strings of different length");
    cplx phase = 1.0;
    std::string out(ops_.size(), 'I');
    for (size_t q = 0; q < ops_.size(); ++q) {
        auto [ph, c] = site_product(ops_[q], other.ops_[q]);
        phase *= ph;
        out[q] = c;
    }
    PauliString r;
    r.ops_ = std::move(out);
    return {phase, r};
}

Mat2 pauli2(char op) {
    Mat2 m;
    switch (op) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -I_UNIT, I_UNIT, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw InvalidHamiltonian(std::string("unknown Pauli symbol '") + op + "'");
    }
    return m;
}

namespace {

// i^k for k = y_count mod 4.
cplx i_power(int k) {
    switch (k & 3) {
        case 0: return 1.0;
        case 1: return I_UNIT;
        case 2: return -1.0;
        default: return -I_UNIT;
    }
}

}  // namespace

Mat pauli_matrix(const PauliString& p) {
    const int n = p.size();
    const std::uint64_t d = dim_of(n);
    const std::uint64_t xm = p.x_mask(), zm = p.z_mask();
    const cplx base = i_power(p.y_count());
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::uint64_t b = 0; b < d; ++b) {
        const double s = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
        m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) = base * s;
    }
    return m;
}

// ---------------------------------------------------------------- PauliSum

void PauliSum::add(const PauliString& p, cplx c) {
    if (n_ == 0) n_ = p.size();
    if (p.size() != n_) throw DimensionError("term size does not match qubit count");
    terms_[p] += c;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
    for (const auto& [p, c] : o.terms_) add(p, c);
    return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& o) {
    for (const auto& [p, c] : o.terms_) add(p, -c);
    return *this;
}

PauliSum PauliSum::operator+(const PauliSum& o) const {
    PauliSum r = *this;
    r += o;
    return r;
}

PauliSum PauliSum::operator-(const PauliSum& o) const {
    PauliSum r = *this;
    r -= o;
    return r;
}

PauliSum PauliSum::operator*(const PauliSum& o) const {
    PauliSum r(n_ ? n_ : o.n_);
    for (const auto& [p, c] : terms_)
        for (const auto& [q, d] : o.terms_) {
            auto [ph, s] = p.multiply(q);
            r.add(s, ph * c * d);
        }
    return r;
}

PauliSum PauliSum::scaled(cplx s) const {
    PauliSum r(n_);
    for (const auto& [p, c] : terms_) r.terms_[p] = c * s;
    return r;
}

PauliSum PauliSum::adjoint() const {
    PauliSum r(n_);
    for (const auto& [p, c] : terms_) r.terms_[p] = std::conj(c);
    return r;
}

PauliSum PauliSum::pruned(double tol) const {
    PauliSum r(n_);
    for (const auto& [p, c] : terms_)
        if (std::abs(c) > tol) r.terms_[p] = c;
    return r;
}

bool PauliSum::is_hermitian(double tol) const {
    for (const auto& [p, c] : terms_)
        if (std::abs(c.imag()) > tol) return false;
    return true;
}

Mat PauliSum::matrix() const {
    const std::uint64_t d = dim_of(n_);
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto& [p, c] : terms_) {
        const std::uint64_t xm = p.x_mask(), zm = p.z_mask();
        const cplx base = c * i_power(p.y_count());
        for (std::uint64_t b = 0; b < d; ++b) {
            const double s = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) += base * s;
        }
    }
    return m;
}

void PauliSum::apply_into(const Vec& v, Vec& out) const {
    const std::uint64_t d = dim_of(n_);
    if (static_cast<std::uint64_t>(v.size()) != d) throw DimensionError("vector size mismatch");
    out.setZero(static_cast<Eigen::Index>(d));
    for (const auto& [p, c] : terms_) {
        const std::uint64_t xm = p.x_mask(), zm = p.z_mask();
        const cplx base = c * i_power(p.y_count());
        for (std::uint64_t b = 0; b < d; ++b) {
            const double s = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
            out[static_cast<Eigen::Index>(b ^ xm)] += base * s * v[static_cast<Eigen::Index>(b)];
        }
    }
}

Vec PauliSum::apply(const Vec& v) const {
    Vec out;
    apply_into(v, out);
    return out;
}

double PauliSum::frobenius_norm(bool normalized) const {
    double s = 0.0;
    for (const auto& [p, c] : terms_) s += std::norm(c);
    const double scale = normalized ? 1.0 : std::pow(2.0, n_);
    return std::sqrt(s * scale);
}

PauliSum commutator(const PauliSum& a, const PauliSum& b) {
    PauliSum r(a.qubit_count());
    for (const auto& [p, c] : a.terms())
        for (const auto& [q, d] : b.terms()) {
            if (p.commutes_with(q)) continue;
            auto [ph, s] = p.multiply(q);
            r.add(s, 2.0 * ph * c * d);  // PQ - QP = 2PQ when they anticommute
        }
    return r.pruned();
}

// -------------------------------------------------------- PauliHamiltonian

PauliHamiltonian::PauliHamiltonian(int n, std::vector<PauliTerm> terms) : n_(n) {
    for (auto& t : terms) add(t.coeff, t.str);
}

PauliHamiltonian PauliHamiltonian::from_sum(const PauliSum& s, double tol) {
    PauliHamiltonian h(s.qubit_count());
    for (const auto& [p, c] : s.terms()) {
        if (std::abs(c.imag()) > tol * std::max(1.0, std::abs(c)))
            throw InvalidHamiltonian("non-real coefficient on " + p.str());
        if (c.real() != 0.0) h.add(c.real(), p);
    }
    return h;
}

PauliHamiltonian& PauliHamiltonian::add(double c, const PauliString& p) {
    if (n_ == 0) n_ = p.size();
    if (p.size() != n_) throw DimensionError("term size does not match qubit count");
    if (!std::isfinite(c)) throw InvalidHamiltonian("non-finite coefficient");
    terms_.push_back({c, p});
    return *this;
}

PauliHamiltonian PauliHamiltonian::operator+(const PauliHamiltonian& o) const {
    PauliHamiltonian r = *this;
    if (r.n_ == 0) r.n_ = o.n_;
    for (const auto& t : o.terms_) r.add(t.coeff, t.str);
    return r;
}

PauliHamiltonian PauliHamiltonian::scaled(double s) const {
    PauliHamiltonian r(n_);
    for (const auto& t : terms_) r.terms_.push_back({t.coeff * s, t.str});
    return r;
}

PauliHamiltonian PauliHamiltonian::simplified(double tol) const {
    std::map<PauliString, double> acc;
    for (const auto& t : terms_) acc[t.str] += t.coeff;
    PauliHamiltonian r(n_);
    for (const auto& [p, c] : acc)
        if (std::abs(c) > tol) r.terms_.push_back({c, p});
    return r;
}

PauliSum PauliHamiltonian::to_sum() const {
    PauliSum s(n_);
    for (const auto& t : terms_) s.add(t.str, t.coeff);
    return s;
}

Mat PauliHamiltonian::matrix() const {
    if (n_ == 0) throw DimensionError("Hamiltonian without qubits");
    return to_sum().matrix();
}

Vec PauliHamiltonian::apply(const Vec& v) const { return to_sum().apply(v); }

bool PauliHamiltonian::is_diagonal() const {
    for (const auto& t : terms_)
        if (!t.str.is_diagonal()) return false;
    return true;
}

RVec PauliHamiltonian::diagonal() const {
    const std::uint64_t d = dim_of(n_);
    RVec out = RVec::Zero(static_cast<Eigen::Index>(d));
    for (const auto& t : terms_) {
        if (!t.str.is_diagonal()) continue;
        const std::uint64_t zm = t.str.z_mask();
        for (std::uint64_t b = 0; b < d; ++b)
            out[static_cast<Eigen::Index>(b)] += (std::popcount(b & zm) & 1) ? -t.coeff : t.coeff;
    }
    return out;
}

double PauliHamiltonian::coefficient(const std::string& p) const {
    double c = 0.0;
    for (const auto& t : terms_)
        if (t.str.str() == p) c += t.coeff;
    return c;
}

// ------------------------------------------------------------- conjugation

PauliSum conjugate_by_pauli_rotation(const PauliSum& h, const PauliString& q, double theta) {
    PauliSum r(h.qubit_count());
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    for (const auto& [p, c] : h.terms()) {
        if (p.commutes_with(q)) {
            r.add(p, c);
            continue;
        }
        // e^{-i t Q} P e^{i t Q} = P e^{2 i t Q} = cos(2t) P + i sin(2t) P Q
        auto [ph, pq] = p.multiply(q);
        r.add(p, c * c2);
        r.add(pq, c * I_UNIT * s2 * ph);
    }
    return r.pruned();
}

PauliSum conjugate_by_local(const PauliSum& h, const std::vector<Mat2>& layer) {
    const int n = h.qubit_count();
    if (static_cast<int>(layer.size()) != n) throw DimensionError("layer size mismatch");
    for (const auto& u : layer)
        if ((u.adjoint() * u - Mat2::Identity()).norm() > TOL_UNITARY)
            throw DimensionError("layer operator is not unitary");

    // Single-site images: V^dag sigma V = sum_a w_a sigma_a.
    static const char ops[4] = {'I', 'X', 'Y', 'Z'};
    std::vector<std::array<std::array<cplx, 4>, 4>> images(static_cast<size_t>(n));
    for (int q = 0; q < n; ++q)
        for (int s = 1; s < 4; ++s) {
            Mat2 img = layer[q].adjoint() * pauli2(ops[s]) * layer[q];
            for (int a = 0; a < 4; ++a) images[q][s][a] = (pauli2(ops[a]) * img).trace() / 2.0;
        }

    PauliSum r(n);
    for (const auto& [p, c] : h.terms()) {
        std::vector<std::pair<std::string, cplx>> partial{{p.str(), c}};
        for (int q = 0; q < n; ++q) {
            const char o = p[q];
            if (o == 'I') continue;
            const int s = (o == 'X') ? 1 : (o == 'Y') ? 2 : 3;
            std::vector<std::pair<std::string, cplx>> next;
            for (const auto& [str, w] : partial)
                for (int a = 0; a < 4; ++a) {
                    const cplx wa = images[q][s][a];
                    if (std::abs(wa) < 1e-15) continue;
                    std::string t = str;
                    t[static_cast<size_t>(q)] = ops[a];
                    next.emplace_back(std::move(t), w * wa);
                }
            partial.swap(next);
        }
        for (const auto& [str, w] : partial) r.add(PauliString(str), w);
    }
    return r.pruned();
}

}  // namespace daqc
