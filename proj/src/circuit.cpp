#include "daqc/circuit.hpp"

#include <cmath>
#include <numbers>

#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"
#include "daqc/pauli.hpp"
#include "daqc/schedule.hpp"

namespace daqc {

namespace {

constexpr double PI = std::numbers::pi;

Mat2 rot(char p, double theta) {
    return std::cos(theta / 2) * Mat2::Identity() - I_UNIT * std::sin(theta / 2) * pauli2(p);
}

Gate make(GateType t, std::vector<int> q, double param = 0.0) {
    Gate g;
    g.type = t;
    g.qubits = std::move(q);
    g.param = param;
    return g;
}

Mat controlled_phase(double phi) {
    Mat m = Mat::Identity(4, 4);
    m(3, 3) = std::exp(I_UNIT * phi);
    return m;
}

}  // namespace

std::string to_string(GateType t) {
    switch (t) {
        case GateType::H: return "H";
        case GateType::X: return "X";
        case GateType::Y: return "Y";
        case GateType::Z: return "Z";
        case GateType::Rx: return "Rx";
        case GateType::Ry: return "Ry";
        case GateType::Rz: return "Rz";
        case GateType::V: return "V";
        case GateType::CNOT: return "CNOT";
        case GateType::CZ: return "CZ";
        case GateType::CP: return "CP";
        case GateType::CRk: return "CRk";
        case GateType::SWAP: return "SWAP";
        case GateType::U: return "U";
        case GateType::Measure: return "M";
    }
    return "?";
}

GateCircuit::GateCircuit(int n) : n_(n) {
    if (n < 1) throw CircuitError("circuit needs at least one qubit");
}

void GateCircuit::push(Gate g) {
    for (size_t i = 0; i < g.qubits.size(); ++i) {
        if (g.qubits[i] < 0 || g.qubits[i] >= n_) throw CircuitError("qubit index out of range");
        for (size_t j = 0; j < i; ++j)
            if (g.qubits[i] == g.qubits[j]) throw CircuitError("gate qubits must be distinct");
    }
    if (!std::isfinite(g.param)) throw CircuitError("gate parameter must be finite");
    gates_.push_back(std::move(g));
}

GateCircuit& GateCircuit::h(int q) { push(make(GateType::H, {q})); return *this; }
GateCircuit& GateCircuit::x(int q) { push(make(GateType::X, {q})); return *this; }
GateCircuit& GateCircuit::y(int q) { push(make(GateType::Y, {q})); return *this; }
GateCircuit& GateCircuit::z(int q) { push(make(GateType::Z, {q})); return *this; }
GateCircuit& GateCircuit::rx(int q, double t) { push(make(GateType::Rx, {q}, t)); return *this; }
GateCircuit& GateCircuit::ry(int q, double t) { push(make(GateType::Ry, {q}, t)); return *this; }
GateCircuit& GateCircuit::rz(int q, double t) { push(make(GateType::Rz, {q}, t)); return *this; }
GateCircuit& GateCircuit::v(int q) { push(make(GateType::V, {q})); return *this; }
GateCircuit& GateCircuit::cnot(int c, int t) { push(make(GateType::CNOT, {c, t})); return *this; }
GateCircuit& GateCircuit::cz(int c, int t) { push(make(GateType::CZ, {c, t})); return *this; }
GateCircuit& GateCircuit::cp(int c, int t, double phi) { push(make(GateType::CP, {c, t}, phi)); return *this; }
GateCircuit& GateCircuit::swap(int a, int b) { push(make(GateType::SWAP, {a, b})); return *this; }
GateCircuit& GateCircuit::measure(int q) { push(make(GateType::Measure, {q})); return *this; }

GateCircuit& GateCircuit::crk(int c, int t, int k) {
    if (k < 1) throw CircuitError("CRk needs k >= 1");
    Gate g = make(GateType::CRk, {c, t}, 2 * PI / std::ldexp(1.0, k));
    g.k = k;
    push(std::move(g));
    return *this;
}

GateCircuit& GateCircuit::unitary(const Mat& u, const std::vector<int>& qubits, const std::string& label) {
    if (static_cast<std::uint64_t>(u.rows()) != dim_of(static_cast<int>(qubits.size())) || u.rows() != u.cols())
        throw CircuitError("unitary size does not match its qubits");
    if (!is_unitary(u)) throw CircuitError("gate matrix is not unitary");
    Gate g = make(GateType::U, qubits);
    g.u = u;
    g.label = label;
    push(std::move(g));
    return *this;
}

GateCircuit& GateCircuit::append(const GateCircuit& other) {
    if (other.n_ != n_) throw CircuitError("cannot append circuits of different size");
    for (const auto& g : other.gates_) push(g);
    return *this;
}

GateCircuit& GateCircuit::append_at(const GateCircuit& src, int offset) {
    for (Gate g : src.gates_) {
        for (int& q : g.qubits) q += offset;
        push(std::move(g));
    }
    return *this;
}

GateCircuit& GateCircuit::add(Gate g) {
    push(std::move(g));
    return *this;
}

GateCircuit GateCircuit::inverse() const {
    GateCircuit inv(n_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
        Gate g = *it;
        switch (g.type) {
            case GateType::Rx: case GateType::Ry: case GateType::Rz: case GateType::CP:
                g.param = -g.param;
                break;
            case GateType::CRk:
                g.type = GateType::CP;
                g.param = -g.param;
                break;
            case GateType::V:
                g.type = GateType::U;
                g.u = v_gate().adjoint();
                g.label = "Vdg";
                break;
            case GateType::U:
                g.u = Mat(g.u.adjoint());
                g.label += "dg";
                break;
            case GateType::Measure:
                throw CircuitError("measurements cannot be inverted");
            default:
                break;
        }
        inv.push(std::move(g));
    }
    return inv;
}

Mat2 v_gate() {
    Mat2 v;
    v << -I_UNIT, I_UNIT, 1.0, 1.0;
    return v / std::sqrt(2.0);
}

Mat2 hadamard() {
    Mat2 h;
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

Mat gate_matrix(const Gate& g) {
    switch (g.type) {
        case GateType::H: return hadamard();
        case GateType::X: return pauli2('X');
        case GateType::Y: return pauli2('Y');
        case GateType::Z: return pauli2('Z');
        case GateType::Rx: return rot('X', g.param);
        case GateType::Ry: return rot('Y', g.param);
        case GateType::Rz: return rot('Z', g.param);
        case GateType::V: return v_gate();
        case GateType::Measure: return Mat2::Identity();
        case GateType::CP: case GateType::CRk: return controlled_phase(g.param);
        case GateType::CZ: return controlled_phase(PI);
        case GateType::CNOT: {
            Mat m = Mat::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
            return m;
        }
        case GateType::SWAP: {
            Mat m = Mat::Zero(4, 4);
            m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
            return m;
        }
        case GateType::U: return g.u;
    }
    throw CircuitError("unknown gate");
}

Mat circuit_unitary(const GateCircuit& c) {
    const int n = c.qubit_count();
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Mat u = Mat::Identity(d, d);
    for (const auto& g : c.gates()) {
        if (g.type == GateType::Measure) continue;
        const Mat m = gate_matrix(g);
        for (Eigen::Index col = 0; col < d; ++col) apply_on_qubits(u.data() + col * d, 1, n, m, g.qubits);
    }
    return u;
}

QuantumState run_circuit(const GateCircuit& c, const QuantumState& psi0) {
    if (psi0.qubit_count() != c.qubit_count()) throw DimensionError("state size does not match circuit");
    QuantumState s = psi0;
    for (const auto& g : c.gates())
        if (g.type != GateType::Measure) apply_unitary(s, gate_matrix(g), g.qubits);
    return s;
}

Mat NativeOp::matrix() const {
    switch (kind) {
        case Kind::SQG: return expm_hermitian(gen, 1.0, ExpSign::Plus);
        case Kind::TQG: {
            Mat m = Mat::Zero(4, 4);
            const double s[4] = {1, -1, -1, 1};
            for (int i = 0; i < 4; ++i) m(i, i) = std::exp(I_UNIT * phase * s[i]);
            return m;
        }
        case Kind::Opaque: return u;
    }
    return u;
}

int NativeCircuit::sqg_count() const {
    int c = 0;
    for (const auto& o : ops) c += o.kind == NativeOp::Kind::SQG;
    return c;
}

int NativeCircuit::tqg_count() const {
    int c = 0;
    for (const auto& o : ops) c += o.kind == NativeOp::Kind::TQG;
    return c;
}

Mat2 sqg_generator(const Mat2& u) { return -layer_generator(u, 1.0); }

namespace {

struct NativeBuilder {
    NativeCircuit out;

    void sqg(int q, const Mat2& k, const std::string& label) {
        NativeOp o;
        o.kind = NativeOp::Kind::SQG;
        o.qubits = {q};
        o.gen = k;
        o.label = label;
        out.ops.push_back(std::move(o));
    }
    void tqg(int a, int b) {
        NativeOp o;
        o.kind = NativeOp::Kind::TQG;
        o.qubits = {a, b};
        o.phase = PI / 4;
        o.label = "ZZ";
        out.ops.push_back(std::move(o));
    }
    // exp(i pi/2 (1 - P)) = P exactly.
    void pauli(int q, char p) { sqg(q, PI / 2 * (Mat2::Identity() - pauli2(p)), std::string(1, p)); }
    void hadamard(int q) {
        sqg(q, PI / 2 * (Mat2::Identity() - (pauli2('X') + pauli2('Z')) / std::sqrt(2.0)), "H");
    }
    // exp(i a Zc Zk).
    void zz(int c, int k, double a) {
        if (a == 0.0) return;
        if (a == PI / 4) {
            tqg(c, k);
            return;
        }
        const Mat2 y = pauli2('Y');
        sqg(c, -PI / 4 * y, "Ry");
        pauli(k, 'X');
        tqg(c, k);
        pauli(k, 'X');
        sqg(c, a * y, "Ry");
        tqg(c, k);
        sqg(c, PI / 4 * y, "Ry");
    }
    // diag(1, 1, 1, e^{i phi}) = e^{i phi/4 (1 - Zc)(1 - Zt)}.
    void cphase(int c, int t, double phi) {
        const Mat2 z = pauli2('Z');
        sqg(c, -phi / 4 * z, "Rz");
        sqg(t, phi / 4 * (Mat2::Identity() - z), "Rz");
        zz(c, t, phi / 4);
    }
    void cnot(int c, int t) {
        hadamard(t);
        cphase(c, t, PI);
        hadamard(t);
    }
};

}  // namespace

NativeCircuit lower_to_native(const GateCircuit& c) {
    NativeBuilder b;
    b.out.n = c.qubit_count();
    for (const auto& g : c.gates()) {
        const auto& q = g.qubits;
        switch (g.type) {
            case GateType::Measure: break;
            case GateType::H: b.hadamard(q[0]); break;
            case GateType::X: b.pauli(q[0], 'X'); break;
            case GateType::Y: b.pauli(q[0], 'Y'); break;
            case GateType::Z: b.pauli(q[0], 'Z'); break;
            case GateType::Rx: b.sqg(q[0], -g.param / 2 * pauli2('X'), "Rx"); break;
            case GateType::Ry: b.sqg(q[0], -g.param / 2 * pauli2('Y'), "Ry"); break;
            case GateType::Rz: b.sqg(q[0], -g.param / 2 * pauli2('Z'), "Rz"); break;
            case GateType::V: b.sqg(q[0], sqg_generator(v_gate()), "V"); break;
            case GateType::CZ: b.cphase(q[0], q[1], PI); break;
            case GateType::CP: case GateType::CRk: b.cphase(q[0], q[1], g.param); break;
            case GateType::CNOT: b.cnot(q[0], q[1]); break;
            case GateType::SWAP:
                b.cnot(q[0], q[1]);
                b.cnot(q[1], q[0]);
                b.cnot(q[0], q[1]);
                break;
            case GateType::U: {
                if (q.size() == 1) {
                    b.sqg(q[0], sqg_generator(g.u), g.label);
                } else {
                    NativeOp o;
                    o.kind = NativeOp::Kind::Opaque;
                    o.qubits = q;
                    o.u = g.u;
                    o.label = g.label;
                    b.out.ops.push_back(std::move(o));
                }
                break;
            }
        }
    }
    return b.out;
}

Mat native_unitary(const NativeCircuit& c) {
    const auto d = static_cast<Eigen::Index>(dim_of(c.n));
    Mat u = Mat::Identity(d, d);
    for (const auto& o : c.ops) {
        const Mat m = o.matrix();
        for (Eigen::Index col = 0; col < d; ++col) apply_on_qubits(u.data() + col * d, 1, c.n, m, o.qubits);
    }
    return u;
}

}  // namespace daqc
