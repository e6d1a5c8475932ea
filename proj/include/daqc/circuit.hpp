#pragma once

#include <string>
#include <vector>

#include "daqc/state.hpp"
#include "daqc/types.hpp"

namespace daqc {

enum class GateType { H, X, Y, Z, Rx, Ry, Rz, V, CNOT, CZ, CP, CRk, SWAP, U, Measure };

std::string to_string(GateType t);

struct Gate {
    GateType type = GateType::H;
    std::vector<int> qubits;
    double param = 0.0;  // rotation angle or controlled phase
    int k = 0;           // CRk order
    Mat u;               // GateType::U only
    std::string label;
};

// Ordered gate list. Rx/Ry/Rz(t) = exp(-i t P / 2), CP(phi) = diag(1,1,1,e^{i phi}),
// CRk = CP(2 pi / 2^k), V = [[-i, i], [1, 1]] / sqrt(2).
class GateCircuit {
public:
    GateCircuit() = default;
    explicit GateCircuit(int n);

    int qubit_count() const { return n_; }
    const std::vector<Gate>& gates() const { return gates_; }

    GateCircuit& h(int q);
    GateCircuit& x(int q);
    GateCircuit& y(int q);
    GateCircuit& z(int q);
    GateCircuit& rx(int q, double theta);
    GateCircuit& ry(int q, double theta);
    GateCircuit& rz(int q, double theta);
    GateCircuit& v(int q);
    GateCircuit& cnot(int c, int t);
    GateCircuit& cz(int c, int t);
    GateCircuit& cp(int c, int t, double phi);
    GateCircuit& crk(int c, int t, int k);
    GateCircuit& swap(int a, int b);
    GateCircuit& unitary(const Mat& u, const std::vector<int>& qubits, const std::string& label = "U");
    GateCircuit& measure(int q);
    GateCircuit& append(const GateCircuit& other);
    // Appends src with every qubit index shifted by offset.
    GateCircuit& append_at(const GateCircuit& src, int offset);
    GateCircuit& add(Gate g);
    // Reversed circuit of adjoints. Measurements cannot be inverted.
    GateCircuit inverse() const;

private:
    void push(Gate g);
    int n_ = 0;
    std::vector<Gate> gates_;
};

Mat2 v_gate();
Mat2 hadamard();
// Matrix of a gate on its own qubits (first listed qubit is the most significant).
Mat gate_matrix(const Gate& g);
Mat circuit_unitary(const GateCircuit& c);
QuantumState run_circuit(const GateCircuit& c, const QuantumState& psi0);

// Native digital primitives: single-qubit exp(i K) with K Hermitian, the
// two-qubit exp(i phase Z Z), and opaque unitaries that carry no noise.
struct NativeOp {
    enum class Kind { SQG, TQG, Opaque };
    Kind kind = Kind::SQG;
    std::vector<int> qubits;
    Mat2 gen = Mat2::Zero();  // SQG: U = exp(i gen)
    double phase = 0.0;       // TQG: U = exp(i phase Z Z)
    Mat u;                    // Opaque
    std::string label;
    Mat matrix() const;
};

struct NativeCircuit {
    int n = 0;
    std::vector<NativeOp> ops;
    int sqg_count() const;
    int tqg_count() const;
};

// Lowers every gate to single-qubit rotations and fixed pi/4 ZZ phases.
// Arbitrary ZZ phases use the five-factor identity
// e^{i a Zc Zk} = e^{i pi/4 Yc} e^{i pi/4 ZZ} e^{i a Yc} X_k e^{i pi/4 ZZ} X_k e^{-i pi/4 Yc}.
// The native circuit equals the gate circuit up to a global phase.
NativeCircuit lower_to_native(const GateCircuit& c);
Mat native_unitary(const NativeCircuit& c);

// Hermitian K with exp(i K) = u, eigenphases in (-pi, pi].
Mat2 sqg_generator(const Mat2& u);

}  // namespace daqc
