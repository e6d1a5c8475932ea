#include "daqc/cross_resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"

namespace daqc {

namespace {

constexpr double PI = std::numbers::pi;

double pick(const std::vector<double>& v, double fallback, int k) {
    if (v.empty()) return fallback;
    if (k < 0 || k >= static_cast<int>(v.size())) throw InvalidLayer("per-site override index out of range");
    return v[static_cast<size_t>(k)];
}

std::string lowercase(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

Mat2 hadamard2() {
    Mat2 h;
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

// Chain bonds (k, k+1), plus the wrap bond when periodic.
std::vector<std::pair<int, int>> chain_bonds(int n, Boundary b) {
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k + 1 < n; ++k) out.emplace_back(k, k + 1);
    if (b == Boundary::Periodic && n > 2) out.emplace_back(n - 1, 0);
    return out;
}

// Bonds (control, target) of the square lattice, +i then +j per site.
std::vector<std::pair<int, int>> square_bonds(int n, Boundary b) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int c = i * n + j;
            if (i + 1 < n) out.emplace_back(c, (i + 1) * n + j);
            else if (b == Boundary::Periodic) out.emplace_back(c, j);
            if (j + 1 < n) out.emplace_back(c, i * n + j + 1);
            else if (b == Boundary::Periodic) out.emplace_back(c, i * n);
        }
    return out;
}

PauliHamiltonian two_body(int n, const std::vector<std::pair<int, int>>& bonds, const std::string& kinds,
                          const std::vector<double>& coeff) {
    PauliHamiltonian h(n);
    for (size_t i = 0; i < bonds.size(); ++i)
        for (size_t s = 0; s < kinds.size(); s += 2)
            h.add(coeff[i], PauliString::pair(n, kinds[s], bonds[i].first, kinds[s + 1], bonds[i].second));
    return h.simplified();
}

std::vector<Mat2> identity_layer(int n) { return std::vector<Mat2>(static_cast<size_t>(n), Mat2::Identity()); }

std::vector<Mat2> compose(const std::vector<Mat2>& first, const std::vector<Mat2>& second) {
    std::vector<Mat2> out(first.size());
    for (size_t q = 0; q < first.size(); ++q) out[q] = second[q] * first[q];
    return out;
}

std::vector<Mat2> adjoint_layer(const std::vector<Mat2>& l) {
    std::vector<Mat2> out(l.size());
    for (size_t q = 0; q < l.size(); ++q) out[q] = l[q].adjoint();
    return out;
}

// W^dag exp(-i H t) W, with W given as a layer applied before the block.
void toggled_block(std::vector<ProtocolOp>& ops, const std::vector<Mat2>& w, const PauliHamiltonian& h, double t,
                   const std::string& label) {
    ops.push_back({ProtocolOp::Kind::Layer, w, {}, 0.0, label + " in"});
    ops.push_back({ProtocolOp::Kind::Analog, {}, h, t, label});
    ops.push_back({ProtocolOp::Kind::Layer, adjoint_layer(w), {}, 0.0, label + " out"});
}

Mat protocol_matrix(int n, const std::vector<ProtocolOp>& ops) {
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Mat u = Mat::Identity(d, d);
    for (const auto& op : ops) {
        if (op.kind == ProtocolOp::Kind::Layer)
            u = kron_layer(op.layer) * u;
        else
            u = propagator(op.resource, op.t) * u;
    }
    return u;
}

std::vector<Mat2> parity_layer(int n, int parity) {
    std::vector<Mat2> l = identity_layer(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((i + j) % 2 == parity) l[static_cast<size_t>(i * n + j)] = hadamard2();
    return l;
}

}  // namespace

double CRParams::g_at(int k) const { return pick(g_k, g, k); }
double CRParams::omega_at(int k) const { return pick(omega_k, omega, k); }
double CRParams::delta_at(int k) const { return pick(delta_k, delta, k); }
double CRParams::phi_at(int k) const { return pick(phi_k, phi, k); }

double CRParams::J(int k) const { return -g_at(k) * omega_at(k) / (4.0 * delta_at(k)); }

bool CRParams::weak_driving() const {
    double worst = std::abs(omega / delta);
    const size_t m = std::max({omega_k.size(), delta_k.size()});
    for (size_t k = 0; k < m; ++k)
        worst = std::max(worst, std::abs(omega_at(static_cast<int>(k)) / delta_at(static_cast<int>(k))));
    return worst <= weak_driving_limit;
}

void CRParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(g) || !finite(omega) || !finite(delta) || !finite(phi)) throw ParamError("CR parameters must be finite");
    if (delta == 0.0) throw ParamError("detuning must be nonzero");
    for (double d : delta_k)
        if (d == 0.0 || !finite(d)) throw ParamError("detuning must be nonzero");
}

int LatticeSpec::qubit_count() const { return kind == LatticeKind::Chain ? n : n * n; }

void LatticeSpec::validate() const {
    if (n < 2) throw Unsupported("lattice needs N >= 2");
}

PauliHamiltonian cr_hamiltonian(const CRParams& p, const LatticeSpec& lat) {
    p.validate();
    lat.validate();
    const int nq = lat.qubit_count();
    PauliHamiltonian h(nq);
    if (lat.kind == LatticeKind::Chain) {
        for (const auto& [c, t] : chain_bonds(lat.n, lat.boundary)) {
            const double dphi = p.phi_at(c) - p.phi_at(t);
            const double J = p.J(c);
            h.add(J * std::cos(dphi), PauliString::pair(nq, 'X', c, 'Z', t));
            h.add(-J * std::sin(dphi), PauliString::pair(nq, 'X', c, 'Y', t));
        }
    } else {
        for (const auto& [c, t] : square_bonds(lat.n, lat.boundary))
            h.add(p.J(c), PauliString::pair(nq, 'X', c, 'Z', t));
    }
    return h.simplified(1e-15);
}

PauliHamiltonian cr_two_qubit_hamiltonian(const CRParams& p) {
    p.validate();
    const double a = p.g * p.omega / (4.0 * p.delta);
    PauliHamiltonian h(2);
    h.add(a * std::cos(p.phi), "XX");
    h.add(a * std::sin(p.phi), "XY");
    return h.simplified(1e-15);
}

PauliHamiltonian toggle(const PauliHamiltonian& h, const std::vector<Mat2>& layer) {
    if (static_cast<int>(layer.size()) != h.qubit_count()) throw InvalidLayer("layer size does not match the Hamiltonian");
    for (const auto& u : layer)
        if (!u.allFinite() || (u.adjoint() * u - Mat2::Identity()).norm() > TOL_UNITARY)
            throw InvalidLayer("layer factor is not unitary");
    return PauliHamiltonian::from_sum(conjugate_by_local(h.to_sum(), layer).pruned(1e-14), 1e-12).simplified();
}

std::vector<Mat2> layer_on(int n, const Mat2& u, const std::vector<int>& qubits) {
    std::vector<Mat2> l = identity_layer(n);
    for (int q : qubits) {
        if (q < 0 || q >= n) throw InvalidLayer("layer qubit out of range");
        l[static_cast<size_t>(q)] = u;
    }
    return l;
}

std::vector<int> even_sites(int n) {
    std::vector<int> out;
    for (int q = 1; q < n; q += 2) out.push_back(q);
    return out;
}

std::vector<int> odd_sites(int n) {
    std::vector<int> out;
    for (int q = 0; q < n; q += 2) out.push_back(q);
    return out;
}

Mat2 r_e() {
    return 0.5 * (Mat2::Identity() - I_UNIT * (pauli2('X') + pauli2('Y') + pauli2('Z')));
}

Mat2 r_x_half_pi() {
    return std::cos(PI / 4) * Mat2::Identity() - I_UNIT * std::sin(PI / 4) * pauli2('X');
}

namespace {

PauliHamiltonian h_a_chain(int n, double J) {
    PauliHamiltonian h(n);
    for (const auto& [c, t] : chain_bonds(n, Boundary::Open)) h.add(J, PauliString::pair(n, 'X', c, 'Z', t));
    return h;
}

}  // namespace

PauliHamiltonian h_even(int n, double J) {
    return toggle(h_a_chain(n, J), layer_on(n, hadamard2(), even_sites(n)));
}

PauliHamiltonian h_odd(int n, double J) {
    return toggle(h_a_chain(n, J), layer_on(n, hadamard2(), odd_sites(n)));
}

PauliHamiltonian h_qf_selective(int n, double J, bool odd_controls, double phi) {
    PauliHamiltonian h(n);
    for (int c = odd_controls ? 0 : 1; c + 1 < n; c += 2) {
        h.add(J * std::cos(phi), PauliString::pair(n, 'X', c, 'X', c + 1));
        h.add(J * std::sin(phi), PauliString::pair(n, 'X', c, 'Y', c + 1));
    }
    return h.simplified(1e-15);
}

PauliHamiltonian ising_chain(int n, double J) {
    const auto b = chain_bonds(n, Boundary::Open);
    return two_body(n, b, "ZZ", std::vector<double>(b.size(), J));
}

PauliHamiltonian xy_chain(int n, double J) {
    const auto b = chain_bonds(n, Boundary::Open);
    return two_body(n, b, "XXYY", std::vector<double>(b.size(), J));
}

PauliHamiltonian heisenberg_chain(int n, double J) {
    const auto b = chain_bonds(n, Boundary::Open);
    return two_body(n, b, "XXYYZZ", std::vector<double>(b.size(), J));
}

PauliHamiltonian xy_square(int n, double J, Boundary bd) {
    const auto b = square_bonds(n, bd);
    return two_body(n * n, b, "XXYY", std::vector<double>(b.size(), J));
}

HeisenbergParts heisenberg_parts(int n, double J) {
    HeisenbergParts p;
    p.h_e = h_even(n, J);
    const auto re = std::vector<Mat2>(static_cast<size_t>(n), r_e());
    p.h_e1 = toggle(p.h_e, re);
    p.h_e2 = toggle(p.h_e1, re);
    return p;
}

XY2DParts xy2d_parts(int n, double J, Boundary b) {
    const int nq = n * n;
    PauliHamiltonian ha(nq);
    for (const auto& [c, t] : square_bonds(n, b)) ha.add(J, PauliString::pair(nq, 'X', c, 'Z', t));
    XY2DParts p;
    p.h_odd = toggle(ha, parity_layer(n, 0));
    p.h_even = toggle(ha, parity_layer(n, 1));
    const auto r = std::vector<Mat2>(static_cast<size_t>(nq), r_x_half_pi());
    p.h_i = toggle(p.h_even, r);
    p.h_ii = toggle(p.h_odd, r);
    return p;
}

std::string to_string(SpinModel m) {
    switch (m) {
        case SpinModel::Ising: return "ising";
        case SpinModel::XY: return "xy";
        case SpinModel::Heisenberg: return "heisenberg";
    }
    return "?";
}

SpinModel spin_model_from_string(const std::string& s) {
    const std::string l = lowercase(s);
    if (l == "ising") return SpinModel::Ising;
    if (l == "xy") return SpinModel::XY;
    if (l == "heisenberg") return SpinModel::Heisenberg;
    throw Unsupported("unknown spin model '" + s + "'");
}

SpinSimResult simulate_spin_model(SpinModel model, const LatticeSpec& lat, const CRParams& p, double T, double tau) {
    lat.validate();
    p.validate();
    if (!(tau > 0.0) || !(T >= 0.0) || !std::isfinite(T)) throw Unsupported("need tau > 0 and T >= 0");
    const double ratio = T / tau;
    const int M = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - M) > 1e-9 * std::max(1.0, ratio)) throw Unsupported("T must be an integer multiple of tau");
    const double J = p.J(0);
    const int n = lat.n;
    const int nq = lat.qubit_count();

    SpinSimResult r;
    r.model = model;
    r.steps = M;
    const Mat2 h = hadamard2();
    if (lat.kind == LatticeKind::Chain) {
        if (lat.boundary != Boundary::Open) throw Unsupported("chain protocols use open boundaries");
        if (nq > 12) throw Unsupported("chain simulation is limited to 12 qubits");
        const PauliHamiltonian ha = h_a_chain(n, J);
        const auto v_even = layer_on(n, h, even_sites(n));
        const auto v_odd = layer_on(n, h, odd_sites(n));
        const auto v_all = std::vector<Mat2>(static_cast<size_t>(n), h);
        switch (model) {
            case SpinModel::Ising:
                r.target = ising_chain(n, J);
                toggled_block(r.step, v_all, h_qf_selective(n, J, false), tau, "U_QF even");
                toggled_block(r.step, v_all, h_qf_selective(n, J, true), tau, "U_QF odd");
                r.trotter_free = true;
                break;
            case SpinModel::XY: {
                r.target = xy_chain(n, J);
                const auto rx = std::vector<Mat2>(static_cast<size_t>(n), r_x_half_pi());
                toggled_block(r.step, compose(rx, v_even), ha, tau, "U_A even'");
                toggled_block(r.step, compose(rx, v_odd), ha, tau, "U_A odd'");
                r.trotter_free = true;
                break;
            }
            case SpinModel::Heisenberg: {
                r.target = heisenberg_chain(n, J);
                const auto re = std::vector<Mat2>(static_cast<size_t>(n), r_e());
                toggled_block(r.step, compose(compose(re, re), v_even), ha, tau, "U_A E''");
                toggled_block(r.step, compose(re, v_even), ha, tau, "U_A E'");
                toggled_block(r.step, v_even, ha, tau, "U_A E");
                break;
            }
        }
    } else {
        if (model != SpinModel::XY) throw Unsupported("square lattices support the XY model only");
        if (n > 3) throw Unsupported("square-lattice simulation is limited to 3 x 3");
        if (lat.boundary == Boundary::Periodic && n % 2) throw Unsupported("periodic squares need even N");
        PauliHamiltonian ha(nq);
        for (const auto& [c, t] : square_bonds(n, lat.boundary)) ha.add(J, PauliString::pair(nq, 'X', c, 'Z', t));
        r.target = xy_square(n, J, lat.boundary);
        const auto rx = std::vector<Mat2>(static_cast<size_t>(nq), r_x_half_pi());
        toggled_block(r.step, compose(rx, parity_layer(n, 0)), ha, tau, "U_A II");
        toggled_block(r.step, compose(rx, parity_layer(n, 1)), ha, tau, "U_A I");
    }

    const Mat step = protocol_matrix(nq, r.step);
    const auto d = static_cast<Eigen::Index>(dim_of(nq));
    r.protocol = Mat::Identity(d, d);
    for (int m = 0; m < M; ++m) r.protocol = step * r.protocol;
    r.exact = propagator(r.target, T);
    r.error = spectral_norm(Mat(r.protocol - r.exact));
    return r;
}

CommutatorBound heisenberg_commutator_bound(int n, double J) {
    if (n < 3) throw Unsupported("Heisenberg bound needs N >= 3");
    const auto parts = heisenberg_parts(n, J);
    const PauliSum a = parts.h_e.to_sum(), b = parts.h_e1.to_sum(), c = parts.h_e2.to_sum();
    const PauliSum comm = (commutator(a, b) + commutator(a, c) + commutator(b, c)).pruned();
    CommutatorBound r;
    r.numeric = spectral_norm(comm);
    r.bound = 6.0 * J * J * n;
    r.digital_bound = 12.0 * J * J * n;
    r.holds = r.numeric <= r.bound * (1.0 + 1e-9) && r.numeric <= r.digital_bound / 2.0 * (1.0 + 1e-9);
    return r;
}

CommutatorBound xy2d_commutator_norm(int n, double J) {
    if (n % 2) throw Unsupported("2D XY commutator needs even N");
    if (n * n > 16) throw Unsupported("2D XY commutator is limited to 16 qubits");
    const auto parts = xy2d_parts(n, J, Boundary::Periodic);
    const PauliSum comm = commutator(parts.h_i.to_sum(), parts.h_ii.to_sum()).pruned();
    CommutatorBound r;
    r.numeric = spectral_norm(comm);
    r.bound = 16.0 * J * J;
    r.loose_bound = 16.0 * J * J * n * n;
    r.digital_bound = 24.0 * J * J * n * n;
    r.holds = r.numeric <= r.bound * (1.0 + 1e-9) && r.numeric <= r.loose_bound * (1.0 + 1e-9);
    return r;
}

SynthesisModel synthesis_model_from_string(const std::string& s) {
    const std::string l = lowercase(s);
    if (l == "a") return SynthesisModel::A;
    if (l == "xy") return SynthesisModel::XY;
    if (l == "zz") return SynthesisModel::ZZ;
    throw Unsupported("unknown synthesis model '" + s + "' (a, xy, zz)");
}

double synthesis_error_norm(int n, double g, SynthesisModel m, double t, const SynthesisParams& p) {
    if (n < 2) throw Unsupported("synthesis error needs N >= 2");
    const double root = std::sqrt(static_cast<double>(n - 1));
    switch (m) {
        case SynthesisModel::A: return std::abs(g) / (2.0 * std::sqrt(2.0)) * root;
        case SynthesisModel::XY: return std::abs(g) / 2.0 * root;
        case SynthesisModel::ZZ: {
            if (p.delta == 0.0) throw Unsupported("ZZ synthesis error needs delta != 0");
            const double dt = p.delta * t;
            const double inner = 2.0 + std::cos(dt) * std::cos(p.varphi - dt) +
                                 p.omega / p.delta * std::sin(dt) * std::sin(p.varphi);
            return std::abs(g) / (2.0 * std::sqrt(2.0)) * root * std::sqrt(std::max(0.0, inner));
        }
    }
    return 0.0;
}

PauliHamiltonian synthesis_delta_h(int n, double g, double delta, double t) {
    if (n < 2) throw Unsupported("synthesis error needs N >= 2");
    const double c = std::cos(delta * t), s = std::sin(delta * t);
    PauliHamiltonian h(n);
    for (int k = 0; k + 1 < n; ++k) {
        h.add(g / 4 * c, PauliString::pair(n, 'Z', k, 'Z', k + 1));
        h.add(g / 4 * s, PauliString::pair(n, 'Y', k, 'Z', k + 1));
        h.add(g / 4 * c, PauliString::pair(n, 'Y', k, 'Y', k + 1));
        h.add(-g / 4 * s, PauliString::pair(n, 'Z', k, 'Y', k + 1));
    }
    return h.simplified(1e-15);
}

PauliHamiltonian synthesis_delta_h_xy(int n, double g, double delta, double omega, double t) {
    if (n < 2) throw Unsupported("synthesis error needs N >= 2");
    if (delta == 0.0) throw ParamError("delta must be nonzero");
    const double c = std::cos(delta * t), s = std::sin(delta * t);
    const double c2 = std::cos(2 * delta * t), s2 = std::sin(2 * delta * t);
    const double r = omega / delta, a = g / 4;
    PauliHamiltonian h(n);
    for (int k = 0; k + 1 < n; ++k) {
        const auto pr = [&](char p, char q) { return PauliString::pair(n, p, k, q, k + 1); };
        h.add(a * c, pr('X', 'Y'));
        h.add(a * c, pr('Y', 'X'));
        h.add(-2 * a * c, pr('Z', 'Z'));
        h.add(a * (s + r * s2), pr('Z', 'Y'));
        h.add(-a * (s + r * s2), pr('Z', 'X'));
        h.add(a * s, pr('X', 'Z'));
        h.add(-a * s, pr('Y', 'Z'));
        h.add(-a * r * c2, pr('Y', 'Y'));
        h.add(-a * r * c2, pr('X', 'X'));
    }
    return h.simplified(1e-15);
}

double propagator_diff_norm(int n, double g, double delta, double t) {
    if (n < 2) throw Unsupported("propagator difference needs N >= 2");
    if (delta == 0.0) throw ParamError("delta must be nonzero");
    return std::abs(g) / (std::abs(delta) * std::sqrt(2.0)) * std::abs(std::sin(delta * t / 2.0)) *
           std::sqrt(static_cast<double>(n - 1));
}

}  // namespace daqc
