#include "daqc/algorithms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "daqc/compiler.hpp"
#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"

namespace daqc {

namespace {

constexpr double PI = std::numbers::pi;

using LayerOps = std::vector<std::pair<int, Mat2>>;

std::string lowercase(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

Mat2 z_phase(double theta) {  // exp(-i theta Z)
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::exp(-I_UNIT * theta);
    m(1, 1) = std::exp(I_UNIT * theta);
    return m;
}

Mat2 s_dagger() {
    Mat2 m = Mat2::Identity();
    m(1, 1) = -I_UNIT;
    return m;
}

void check_pair(int n, int c, int t) {
    if (n < 2) throw TooFewQubits("two-qubit primitives need at least two qubits");
    if (c < 0 || c >= n || t < 0 || t >= n) throw IndexError("qubit index out of range");
    if (c == t) throw IndexError("control and target must differ");
}

}  // namespace

std::string to_string(Paradigm p) {
    switch (p) {
        case Paradigm::Digital: return "digital";
        case Paradigm::SDAQC: return "sdaqc";
        case Paradigm::BDAQC: return "bdaqc";
    }
    return "?";
}

Paradigm paradigm_from_string(const std::string& s) {
    const std::string l = lowercase(s);
    if (l == "digital" || l == "dqc") return Paradigm::Digital;
    if (l == "sdaqc") return Paradigm::SDAQC;
    if (l == "bdaqc") return Paradigm::BDAQC;
    throw ParamError("unknown paradigm '" + s + "' (digital, sdaqc, bdaqc)");
}

// ---- QFT ----

Mat qft_matrix(int n) {
    if (n < 1) throw TooFewQubits("QFT needs at least one qubit");
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Mat f(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
            f(j, k) = norm * std::exp(I_UNIT * (2.0 * PI * static_cast<double>((j * k) % d) / static_cast<double>(d)));
    return f;
}

GateCircuit build_qft(int n, bool bit_reverse) {
    if (n < 1) throw TooFewQubits("QFT needs at least one qubit");
    GateCircuit c(n);
    for (int m = 0; m < n; ++m) {
        c.h(m);
        for (int l = m + 1; l < n; ++l) c.crk(l, m, l - m + 1);
    }
    if (bit_reverse)
        for (int q = 0; q < n / 2; ++q) c.swap(q, n - 1 - q);
    return c;
}

Schedule compile_qft_daqc(int n, Mode mode, double dt, double g) {
    if (n < 2) throw TooFewQubits("DAQC QFT needs at least two qubits");
    if (n == 4) throw SingularSignMatrix("N = 4: the all-to-all sign matrix is singular");
    Schedule s(n, homogeneous_ising(n, g), mode, dt);
    const Mat2 h = hadamard();
    for (int m = 0; m < n; ++m) {
        s.add_layer(LayerOps{{m, h}});
        if (m == n - 1) break;
        CouplingMatrix target(n);
        std::vector<double> local(static_cast<size_t>(n), 0.0);
        for (int l = m + 1; l < n; ++l) {
            const double alpha = PI / std::ldexp(1.0, l - m + 2);
            target.set(m, l, alpha);
            local[static_cast<size_t>(m)] += alpha;
            local[static_cast<size_t>(l)] += alpha;
        }
        IsingOptions opt;
        opt.sign = ExpSign::Plus;
        opt.mode = mode;
        opt.dt = dt;
        opt.exact_phase = false;
        s.append(compile_ising(target, 1.0, g, opt).schedule);
        std::vector<std::pair<int, Mat2>> ops;
        for (int q = m; q < n; ++q)
            if (local[static_cast<size_t>(q)] != 0.0) ops.emplace_back(q, z_phase(local[static_cast<size_t>(q)]));
        s.add_layer(ops);
    }
    return s;
}

// ---- DAQC two-qubit primitives ----

Schedule compile_zz_pair_daqc(int n, int c, int t, double phi, Mode mode, double dt, double g) {
    check_pair(n, c, t);
    if (!(g > 0.0)) throw InvalidTarget("resource coupling g must be positive");
    if (!std::isfinite(phi)) throw InvalidTarget("phase must be finite");
    Schedule s(n, homogeneous_ising(n, g), mode, dt);
    if (phi == 0.0) return s;

    std::vector<int> column(static_cast<size_t>(n), 0);
    int next = 1;
    for (int q = 0; q < n; ++q)
        if (q != c && q != t) column[static_cast<size_t>(q)] = next++;
    const int blocks = n == 2 ? 1 : static_cast<int>(std::bit_ceil(static_cast<unsigned>(n - 1)));
    const bool negative = phi < 0.0;
    const double tau = std::abs(phi) / (g * blocks);
    const Mat2 x = pauli2('X');

    std::vector<bool> flipped(static_cast<size_t>(n), false);
    auto flip_to = [&](const std::vector<bool>& want) {
        std::vector<std::pair<int, Mat2>> ops;
        for (int q = 0; q < n; ++q)
            if (want[static_cast<size_t>(q)] != flipped[static_cast<size_t>(q)]) ops.emplace_back(q, x);
        s.add_layer(ops);
        flipped = want;
    };
    // Rows in descending order so the spectators are flipped around the first block.
    for (int row = blocks - 1; row >= 0; --row) {
        std::vector<bool> want(static_cast<size_t>(n));
        for (int q = 0; q < n; ++q) {
            const bool odd = std::popcount(static_cast<unsigned>(row & column[static_cast<size_t>(q)])) % 2 == 1;
            want[static_cast<size_t>(q)] = odd != (q == t && negative);
        }
        flip_to(want);
        s.add_analog(tau);
    }
    flip_to(std::vector<bool>(static_cast<size_t>(n), false));
    return s;
}

Schedule compile_cz_daqc(int n, int control, int target, Mode mode, double dt, bool exact, double g) {
    Schedule s = compile_zz_pair_daqc(n, control, target, PI / 4, mode, dt, g);
    // cZ = e^{i pi/4} S^dag_c S^dag_t exp(-i pi/4 Zc Zt)
    if (exact) s.add_layer(LayerOps{{control, s_dagger()}, {target, s_dagger()}});
    return s;
}

Schedule circuit_to_daqc(const GateCircuit& c, Mode mode, double dt, double g) {
    const int n = c.qubit_count();
    if (n < 2) throw TooFewQubits("DAQC execution needs at least two qubits");
    Schedule s(n, homogeneous_ising(n, g), mode, dt);
    const Mat2 h = hadamard();
    auto cp = [&](int a, int b, double phi) {
        // CP(phi) = e^{i phi/4} e^{-i phi/4 Za} e^{-i phi/4 Zb} e^{i phi/4 Za Zb}
        s.append(compile_zz_pair_daqc(n, a, b, -phi / 4, mode, dt, g));
        s.add_layer(LayerOps{{a, z_phase(phi / 4)}, {b, z_phase(phi / 4)}});
    };
    auto cnot = [&](int a, int b) {
        s.add_layer(LayerOps{{b, h}});
        cp(a, b, PI);
        s.add_layer(LayerOps{{b, h}});
    };
    for (const auto& gate : c.gates()) {
        const auto& q = gate.qubits;
        switch (gate.type) {
            case GateType::Measure:
                break;
            case GateType::CZ:
                cp(q[0], q[1], PI);
                break;
            case GateType::CP:
            case GateType::CRk:
                cp(q[0], q[1], gate.param);
                break;
            case GateType::CNOT:
                cnot(q[0], q[1]);
                break;
            case GateType::SWAP:
                cnot(q[0], q[1]);
                cnot(q[1], q[0]);
                cnot(q[0], q[1]);
                break;
            default:
                if (q.size() == 1) {
                    s.add_layer(LayerOps{{q[0], Mat2(gate_matrix(gate))}});
                } else {
                    GateOp op;
                    op.u = gate_matrix(gate);
                    op.qubits = q;
                    op.label = gate.label.empty() ? to_string(gate.type) : gate.label;
                    s.add_gate(std::move(op));
                }
        }
    }
    return s;
}

// ---- shared execution ----

namespace {

TrajectoryRun execute(const GateCircuit& c, const QuantumState& psi0, Paradigm mode, const NoiseModel& noise,
                      int shots, std::uint64_t seed) {
    if (mode == Paradigm::Digital) return run_trajectories(lower_to_native(c), psi0, noise, shots, seed);
    const Mode m = mode == Paradigm::SDAQC ? Mode::SDAQC : Mode::BDAQC;
    return run_trajectories(circuit_to_daqc(c, m, noise.dt_units()), psi0, noise, shots, seed);
}

}  // namespace

// ---- QFT runs ----

QuantumState qft_input_state(int n, double beta) {
    if (n < 2) throw InvalidProblem("QFT input state needs at least two qubits");
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Vec w = Vec::Zero(d), ghz = Vec::Zero(d);
    for (int q = 0; q < n; ++q) w(static_cast<Eigen::Index>(std::uint64_t{1} << q)) = 1.0 / std::sqrt(n);
    ghz(0) = ghz(d - 1) = 1.0 / std::sqrt(2.0);
    return QuantumState::from_vector(std::sin(beta) * w + std::cos(beta) * ghz, true);
}

QFTRunResult run_qft(int n, Paradigm mode, const NoiseModel& noise, int shots, std::uint64_t seed, double beta) {
    if (n < 2 || n > 10) throw InvalidProblem("QFT run supports 2..10 qubits");
    noise.validate();
    const GateCircuit c = build_qft(n, false);
    const QuantumState psi0 = qft_input_state(n, beta);
    const QuantumState ideal = run_circuit(c, psi0);
    QFTRunResult r;
    r.mode = mode;
    r.beta = beta;
    if (mode == Paradigm::Digital) {
        r.run = run_trajectories(lower_to_native(c), psi0, noise, shots, seed);
    } else {
        const Mode m = mode == Paradigm::SDAQC ? Mode::SDAQC : Mode::BDAQC;
        r.run = run_trajectories(compile_qft_daqc(n, m, noise.dt_units()), psi0, noise, shots, seed);
    }
    r.fidelity = fidelity(ideal, r.run.result);
    return r;
}

// ---- QPE ----

std::string bit_string(std::uint64_t v, int n) {
    std::string s(static_cast<size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((v >> (n - 1 - i)) & 1U) s[static_cast<size_t>(i)] = '1';
    return s;
}

GateCircuit build_qpe(double phi, int n_r) {
    if (n_r < 1) throw InvalidProblem("QPE needs at least one register qubit");
    if (!(phi >= 0.0 && phi < 1.0)) throw InvalidProblem("phase must lie in [0, 1)");
    const int n = n_r + 1;
    GateCircuit c(n);
    for (int j = 0; j < n_r; ++j) c.h(j);
    for (int j = 0; j < n_r; ++j) {
        const double angle = 2.0 * PI * std::fmod(phi * std::ldexp(1.0, n_r - 1 - j), 1.0);
        if (angle != 0.0) c.cp(j, n_r, angle);
    }
    c.append_at(build_qft(n_r, true).inverse(), 0);
    return c;
}

QPEResult run_qpe(double phi, int n_r, Paradigm mode, const NoiseModel& noise, int shots, std::uint64_t seed) {
    const GateCircuit c = build_qpe(phi, n_r);
    const int n = n_r + 1;
    QPEResult r;
    r.n_r = n_r;
    r.run = execute(c, QuantumState::basis(n, 1), mode, noise, shots, seed);
    const RVec full = r.run.result.probabilities();
    const size_t m = static_cast<size_t>(dim_of(n_r));
    r.probabilities.assign(m, 0.0);
    for (Eigen::Index i = 0; i < full.size(); ++i) r.probabilities[static_cast<size_t>(i >> 1)] += full(i);

    const double scale = 1.0 / static_cast<double>(m);
    double mean = 0.0, sq = 0.0;
    for (size_t v = 0; v < m; ++v) {
        mean += r.probabilities[v] * static_cast<double>(v) * scale;
        sq += r.probabilities[v] * std::pow(static_cast<double>(v) * scale, 2);
    }
    r.weighted_mean = mean;
    r.weighted_std = std::sqrt(std::max(0.0, sq - mean * mean));
    r.ranking.resize(m);
    std::iota(r.ranking.begin(), r.ranking.end(), 0);
    std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](int a, int b) {
        return r.probabilities[static_cast<size_t>(a)] > r.probabilities[static_cast<size_t>(b)];
    });
    r.majority = r.ranking.front() * scale;
    return r;
}

// ---- HHL ----

std::vector<std::uint64_t> gray_code(int n) {
    if (n < 1 || n > 30) throw InvalidProblem("Gray code length must be in 1..30");
    std::vector<std::uint64_t> g(dim_of(n));
    for (std::uint64_t i = 0; i < g.size(); ++i) g[i] = i ^ (i >> 1);
    return g;
}

std::vector<std::string> gray_code_strings(int n) {
    std::vector<std::string> out;
    for (auto v : gray_code(n)) out.push_back(bit_string(v, n));
    return out;
}

RVec aqe_phi(int n_r) {
    if (n_r < 1) throw InvalidProblem("register needs at least one qubit");
    const auto m = static_cast<Eigen::Index>(dim_of(n_r));
    RVec phi = RVec::Zero(m);
    for (Eigen::Index p = 1; p < m; ++p) phi(p) = 2.0 * std::asin(1.0 / static_cast<double>(p));
    return phi;
}

RMat aqe_sign_matrix(int n_r) {
    const auto g = gray_code(n_r);
    const auto m = static_cast<Eigen::Index>(g.size());
    RMat M(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            M(i, j) = std::popcount(static_cast<std::uint64_t>(i) & g[static_cast<size_t>(j)]) % 2 ? -1.0 : 1.0;
    return M;
}

RVec aqe_angles(int n_r) {
    return aqe_sign_matrix(n_r).transpose() * aqe_phi(n_r) / std::ldexp(1.0, n_r + 1);
}

double aqe_residual(int n_r) {
    return (2.0 * aqe_sign_matrix(n_r) * aqe_angles(n_r) - aqe_phi(n_r)).cwiseAbs().maxCoeff();
}

int HHLProblem::system_qubits() const {
    const auto d = static_cast<std::uint64_t>(a.rows());
    if (d < 2 || !std::has_single_bit(d)) return -1;
    return std::countr_zero(d);
}

void HHLProblem::validate() const {
    if (n_r < 1) throw InvalidProblem("register needs at least one qubit");
    if (a.rows() != a.cols() || system_qubits() < 1) throw InvalidProblem("A must be square with size 2^n_M");
    if (b.size() != a.rows()) throw InvalidProblem("b length must match A");
    if (!(b.norm() > 0.0) || !b.allFinite()) throw InvalidProblem("b must be a finite nonzero vector");
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > TOL_VALID) throw InvalidProblem("A must be Hermitian");
    const RVec ev = Eigen::SelfAdjointEigenSolver<Mat>(a).eigenvalues();
    if (ev.minCoeff() <= 0.0 || ev.maxCoeff() >= 1.0)
        throw SpectrumError("eigenvalues of A must lie in (0, 1); found [" + std::to_string(ev.minCoeff()) + ", " +
                            std::to_string(ev.maxCoeff()) + "]. Rescale A by 1 / (|lambda|_max (1 + eps)) and b " +
                            "consistently");
}

namespace {

void controlled_powers(GateCircuit& c, const HHLProblem& p, bool adjoint) {
    const int nm = p.system_qubits();
    const auto d = p.a.rows();
    std::vector<int> order(static_cast<size_t>(p.n_r));
    std::iota(order.begin(), order.end(), 0);
    if (adjoint) std::reverse(order.begin(), order.end());
    for (int j : order) {
        const double t = 2.0 * PI * std::ldexp(1.0, p.n_r - 1 - j);
        Mat u = expm_hermitian(p.a, t, ExpSign::Plus);
        if (adjoint) u = Mat(u.adjoint());
        Mat cu = Mat::Identity(2 * d, 2 * d);
        cu.bottomRightCorner(d, d) = u;
        std::vector<int> qubits{j};
        for (int s = 0; s < nm; ++s) qubits.push_back(p.n_r + s);
        c.unitary(cu, qubits, adjoint ? "cUdg" : "cU");
    }
}

}  // namespace

GateCircuit build_hhl(const HHLProblem& p) {
    p.validate();
    const int nm = p.system_qubits();
    const int n = p.n_r + nm + 1;
    const int anc = n - 1;
    GateCircuit c(n);
    for (int j = 0; j < p.n_r; ++j) c.h(j);
    controlled_powers(c, p, false);
    c.append_at(build_qft(p.n_r, true).inverse(), 0);

    // Ancilla rotation by phi(p)/2 about Y: V (prod Rz / CNOT ladder) V^dag.
    Gate vdg;
    vdg.type = GateType::U;
    vdg.qubits = {anc};
    vdg.u = v_gate().adjoint();
    vdg.label = "Vdg";
    c.add(vdg);
    const RVec theta = aqe_angles(p.n_r);
    const auto g = gray_code(p.n_r);
    const size_t m = g.size();
    for (size_t k = 0; k < m; ++k) {
        if (theta(static_cast<Eigen::Index>(k)) != 0.0) c.rz(anc, 2.0 * theta(static_cast<Eigen::Index>(k)));
        const std::uint64_t diff = g[k] ^ g[(k + 1) % m];
        const int bit = std::countr_zero(diff);
        c.cnot(p.n_r - 1 - bit, anc);
    }
    c.v(anc);

    c.append_at(build_qft(p.n_r, true), 0);
    controlled_powers(c, p, true);
    for (int j = 0; j < p.n_r; ++j) c.h(j);
    return c;
}

HHLResult run_hhl(const HHLProblem& p, Paradigm mode, const NoiseModel& noise, int shots, std::uint64_t seed) {
    const GateCircuit c = build_hhl(p);
    const int nm = p.system_qubits();
    const auto ds = static_cast<Eigen::Index>(dim_of(nm));

    Vec reg0 = Vec::Zero(static_cast<Eigen::Index>(dim_of(p.n_r)));
    reg0(0) = 1.0;
    Vec anc0 = Vec::Zero(2);
    anc0(0) = 1.0;
    const Vec b = p.b / p.b.norm();
    Vec psi = Eigen::kroneckerProduct(Eigen::kroneckerProduct(reg0, b).eval(), anc0).eval();

    HHLResult r;
    r.run = execute(c, QuantumState::from_vector(psi, true), mode, noise, shots, seed);
    const Mat& rho = r.run.result.rho();

    auto index = [&](std::uint64_t reg, Eigen::Index sv) {
        return static_cast<Eigen::Index>((reg << (nm + 1)) | (static_cast<std::uint64_t>(sv) << 1) | 1U);
    };
    Mat traced = Mat::Zero(ds, ds), sys = Mat::Zero(ds, ds);
    for (std::uint64_t reg = 0; reg < dim_of(p.n_r); ++reg)
        for (Eigen::Index s1 = 0; s1 < ds; ++s1)
            for (Eigen::Index s2 = 0; s2 < ds; ++s2) {
                traced(s1, s2) += rho(index(reg, s1), index(reg, s2));
                if (reg == 0) sys(s1, s2) = rho(index(0, s1), index(0, s2));
            }
    const Vec x = p.a.partialPivLu().solve(b);
    r.classical = x / x.norm();
    auto overlap = [&](const Mat& m) {
        return std::clamp((r.classical.adjoint() * m * r.classical)(0, 0).real(), 0.0, 1.0);
    };
    r.ancilla_only_probability = traced.trace().real();
    r.success_probability = sys.trace().real();
    if (r.success_probability <= 1e-14) throw SpectrumError("post-selection probability vanished");
    r.ancilla_only_fidelity = overlap(traced / r.ancilla_only_probability);
    sys /= r.success_probability;
    sys = (0.5 * (sys + sys.adjoint())).eval();
    r.solution = QuantumState::from_density(sys);
    r.fidelity = overlap(sys);
    r.error = std::sqrt(std::max(0.0, 2.0 * (1.0 - std::sqrt(r.fidelity))));
    return r;
}

int suggest_register_size(double kappa, int n_s) {
    if (!(kappa >= 1.0) || n_s < 1) throw InvalidProblem("need kappa >= 1 and N_s >= 1");
    const double v = std::ceil(std::log2(kappa * std::sqrt(static_cast<double>(n_s))) - 1e-12);
    return std::max(1, static_cast<int>(v));
}

// ---- QAOA ----

std::string to_string(QAOAMode m) {
    switch (m) {
        case QAOAMode::Ideal: return "ideal";
        case QAOAMode::SDA: return "sda";
        case QAOAMode::BDA: return "bda";
    }
    return "?";
}

QAOAMode qaoa_mode_from_string(const std::string& s) {
    const std::string l = lowercase(s);
    if (l == "ideal") return QAOAMode::Ideal;
    if (l == "sda") return QAOAMode::SDA;
    if (l == "bda") return QAOAMode::BDA;
    throw ParamError("unknown QAOA mode '" + s + "' (ideal, sda, bda)");
}

void QAOAProblem::validate() const {
    if (n < 2) throw InvalidProblem("QAOA needs at least two vertices");
    if (n > 14) throw InvalidProblem("QAOA simulation is limited to 14 vertices");
    if (edges.empty()) throw InvalidProblem("graph has no edges");
    for (const auto& e : edges) {
        if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n || e.a == e.b) throw InvalidProblem("invalid edge");
        if (!std::isfinite(e.w)) throw InvalidProblem("edge weight must be finite");
    }
    if (p < 1) throw InvalidProblem("QAOA needs p >= 1");
    if (mode != QAOAMode::Ideal && !(alpha > 0.0)) throw ParamError("alpha must be positive in DA modes");
}

namespace {

RVec cut_values(const QAOAProblem& p) {
    const auto d = static_cast<Eigen::Index>(dim_of(p.n));
    RVec c = RVec::Zero(d);
    for (Eigen::Index z = 0; z < d; ++z)
        for (const auto& e : p.edges) {
            const bool za = (z >> bit_of(p.n, e.a)) & 1, zb = (z >> bit_of(p.n, e.b)) & 1;
            if (za != zb) c(z) += e.w;
        }
    return c;
}

CouplingMatrix problem_couplings(const QAOAProblem& p) {
    // H_P = sum w/2 (1 - Z Z); only the ZZ part matters up to a global phase.
    CouplingMatrix m(p.n);
    for (const auto& e : p.edges) m.set(e.a, e.b, m.get(e.a, e.b) - e.w / 2);
    return m;
}

void check_params(const QAOAProblem& p, const std::vector<double>& gamma, const std::vector<double>& beta) {
    if (static_cast<int>(gamma.size()) != p.p || static_cast<int>(beta.size()) != p.p)
        throw InvalidProblem("gamma and beta need p entries each");
}

}  // namespace

double max_cut_value(const QAOAProblem& p) {
    p.validate();
    return cut_values(p).maxCoeff();
}

bool is_connected(const QAOAProblem& p) {
    std::vector<int> parent(static_cast<size_t>(p.n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
        return x;
    };
    for (const auto& e : p.edges) parent[static_cast<size_t>(find(e.a))] = find(e.b);
    for (int v = 1; v < p.n; ++v)
        if (find(v) != find(0)) return false;
    return true;
}

struct QAOAEvaluator::Impl {
    QAOAProblem prob;
    RVec cut;
    double max_cut = 0.0;
    CouplingMatrix couplings;
    Evolver driver;  // H_int + alpha sum X, bDA only
    double dt = 0.0;
    std::optional<CompilationResult> compiled;
    std::optional<ScheduleRunner> runner;

    explicit Impl(const QAOAProblem& p) : prob(p) {
        prob.validate();
        cut = cut_values(prob);
        max_cut = cut.maxCoeff();
        couplings = problem_couplings(prob);
        if (prob.mode == QAOAMode::BDA) {
            dt = PI / (2.0 * prob.alpha);
            PauliHamiltonian h = homogeneous_ising(prob.n, 1.0);
            for (int q = 0; q < prob.n; ++q) h.add(prob.alpha, PauliString::single(prob.n, 'X', q));
            driver = Evolver(h.matrix());
        } else if (prob.mode == QAOAMode::SDA) {
            dt = 0.01;
        }
    }

    void problem_unitary(Vec& psi, double gamma) {
        if (prob.mode == QAOAMode::Ideal || gamma == 0.0) {
            if (prob.mode == QAOAMode::Ideal)
                for (Eigen::Index z = 0; z < psi.size(); ++z) psi(z) *= std::exp(-I_UNIT * gamma * cut(z));
            return;
        }
        IsingOptions opt;
        opt.mode = prob.mode == QAOAMode::BDA ? Mode::BDAQC : Mode::SDAQC;
        opt.dt = dt;
        compiled = compile_ising(couplings, gamma, 1.0, opt);
        if (!runner)
            runner.emplace(compiled->schedule);
        else
            runner->rebind(compiled->schedule);
        QuantumState st = QuantumState::from_vector(psi);
        runner->run(st);
        psi = st.vec();
    }

    void mixer(Vec& psi, double beta) {
        if (prob.mode == QAOAMode::BDA) {
            driver.apply(psi, beta / prob.alpha);
            return;
        }
        const Mat2 rx = std::cos(beta) * Mat2::Identity() - I_UNIT * std::sin(beta) * pauli2('X');
        for (int q = 0; q < prob.n; ++q) apply_on_qubits(psi, prob.n, rx, {q});
    }

    Vec state(const std::vector<double>& gamma, const std::vector<double>& beta) {
        check_params(prob, gamma, beta);
        const auto d = static_cast<Eigen::Index>(dim_of(prob.n));
        Vec psi = Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
        for (int l = 0; l < prob.p; ++l) {
            problem_unitary(psi, gamma[static_cast<size_t>(l)]);
            mixer(psi, beta[static_cast<size_t>(l)]);
        }
        return psi;
    }

    double ratio(const std::vector<double>& gamma, const std::vector<double>& beta) {
        const Vec psi = state(gamma, beta);
        return psi.cwiseAbs2().dot(cut) / max_cut;
    }
};

QAOAEvaluator::QAOAEvaluator(const QAOAProblem& p) : impl_(new Impl(p)) {}
QAOAEvaluator::~QAOAEvaluator() { delete impl_; }
double QAOAEvaluator::ratio(const std::vector<double>& g, const std::vector<double>& b) { return impl_->ratio(g, b); }
Vec QAOAEvaluator::state(const std::vector<double>& g, const std::vector<double>& b) { return impl_->state(g, b); }

double qaoa_ratio(const QAOAProblem& p, const std::vector<double>& gamma, const std::vector<double>& beta) {
    QAOAEvaluator ev(p);
    return ev.ratio(gamma, beta);
}

namespace {

struct Objective {
    QAOAEvaluator* ev;
    int p;
    int evals = 0;
};

void clamp_params(const double* x, int p, std::vector<double>& gamma, std::vector<double>& beta) {
    gamma.resize(static_cast<size_t>(p));
    beta.resize(static_cast<size_t>(p));
    for (int l = 0; l < p; ++l) {
        gamma[static_cast<size_t>(l)] = std::clamp(x[l], 0.0, 2.0 * PI);
        beta[static_cast<size_t>(l)] = std::clamp(x[p + l], 0.0, PI);
    }
}

double objective(const gsl_vector* x, void* params) {
    auto* o = static_cast<Objective*>(params);
    std::vector<double> g, b;
    clamp_params(x->data, o->p, g, b);
    ++o->evals;
    return -o->ev->ratio(g, b);
}

// Closed-box QAOA circuit for noisy evaluation in the ideal mode.
GateCircuit qaoa_circuit(const QAOAProblem& p, const std::vector<double>& gamma, const std::vector<double>& beta) {
    GateCircuit c(p.n);
    for (int q = 0; q < p.n; ++q) c.h(q);
    for (int l = 0; l < p.p; ++l) {
        for (const auto& e : p.edges) {
            // exp(-i gamma w/2 (1 - Za Zb)) = exp(+i gamma w/2 Za Zb) up to phase
            c.cnot(e.a, e.b).rz(e.b, -gamma[static_cast<size_t>(l)] * e.w).cnot(e.a, e.b);
        }
        for (int q = 0; q < p.n; ++q) c.rx(q, 2.0 * beta[static_cast<size_t>(l)]);
    }
    return c;
}

Schedule qaoa_schedule(const QAOAProblem& p, const std::vector<double>& gamma, const std::vector<double>& beta) {
    const Mode m = p.mode == QAOAMode::BDA ? Mode::BDAQC : Mode::SDAQC;
    const double dt = p.mode == QAOAMode::BDA ? PI / (2.0 * p.alpha) : 0.01;
    Schedule s(p.n, homogeneous_ising(p.n, 1.0), m, dt);
    std::vector<int> all(static_cast<size_t>(p.n));
    std::iota(all.begin(), all.end(), 0);
    const CouplingMatrix cm = problem_couplings(p);
    PauliHamiltonian drv = homogeneous_ising(p.n, 1.0);
    for (int q = 0; q < p.n; ++q) drv.add(p.alpha, PauliString::single(p.n, 'X', q));
    const Mat drv_m = drv.matrix();
    // Initial |+> layer is state preparation, outside the schedule.
    for (int l = 0; l < p.p; ++l) {
        const double g = gamma[static_cast<size_t>(l)], b = beta[static_cast<size_t>(l)];
        if (g > 0.0) {
            IsingOptions opt;
            opt.mode = m;
            opt.dt = dt;
            s.append(compile_ising(cm, g, 1.0, opt).schedule);
        }
        if (p.mode == QAOAMode::BDA) {
            s.add_gate(GateOp{expm_hermitian(drv_m, b / p.alpha), all, "driver"});
        } else {
            const Mat2 rx = std::cos(b) * Mat2::Identity() - I_UNIT * std::sin(b) * pauli2('X');
            std::vector<std::pair<int, Mat2>> ops;
            for (int q = 0; q < p.n; ++q) ops.emplace_back(q, rx);
            s.add_layer(ops);
        }
    }
    return s;
}

}  // namespace

QAOAResult qaoa_run(const QAOAProblem& p, const OptimizerSettings& opt, const NoiseModel& noise) {
    p.validate();
    if (opt.starts < 1 || opt.max_evals < 1 || !(opt.tol > 0.0)) throw ParamError("invalid optimizer settings");
    QAOAResult res;
    if (!is_connected(p)) res.warnings.push_back("graph is disconnected");
    QAOAEvaluator ev(p);
    res.max_cut = max_cut_value(p);

    const int dim = 2 * p.p;
    gsl_set_error_handler_off();
    const gsl_multimin_fminimizer_type* type = gsl_multimin_fminimizer_nmsimplex2;
    double best = -1.0;
    for (int s = 0; s < opt.starts; ++s) {
        std::mt19937_64 rng(splitmix64(opt.seed ^ splitmix64(static_cast<std::uint64_t>(s) + 1)));
        std::uniform_real_distribution<double> ug(0.0, 2.0 * PI), ub(0.0, PI);
        gsl_vector* x = gsl_vector_alloc(static_cast<size_t>(dim));
        gsl_vector* step = gsl_vector_alloc(static_cast<size_t>(dim));
        for (int l = 0; l < p.p; ++l) {
            gsl_vector_set(x, static_cast<size_t>(l), ug(rng));
            gsl_vector_set(x, static_cast<size_t>(p.p + l), ub(rng));
        }
        gsl_vector_set_all(step, 0.3);
        Objective o{&ev, p.p};
        gsl_multimin_function f{&objective, static_cast<size_t>(dim), &o};
        gsl_multimin_fminimizer* mz = gsl_multimin_fminimizer_alloc(type, static_cast<size_t>(dim));
        gsl_multimin_fminimizer_set(mz, &f, x, step);
        while (o.evals < opt.max_evals) {
            if (gsl_multimin_fminimizer_iterate(mz) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(mz), opt.tol) == GSL_SUCCESS) break;
        }
        const double r = -gsl_multimin_fminimizer_minimum(mz);
        res.evaluations += o.evals;
        if (r > best) {
            best = r;
            res.best_start = s;
            clamp_params(gsl_multimin_fminimizer_x(mz)->data, p.p, res.gamma, res.beta);
        }
        gsl_multimin_fminimizer_free(mz);
        gsl_vector_free(x);
        gsl_vector_free(step);
    }
    res.ratio = best;
    res.expectation = best * res.max_cut;

    if (!noise.noiseless()) {
        const auto d = static_cast<Eigen::Index>(dim_of(p.n));
        const QuantumState plus = QuantumState::from_vector(Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
        const std::uint64_t seed = resolve_seed(opt.seed);
        const TrajectoryRun run =
            p.mode == QAOAMode::Ideal
                ? run_trajectories(lower_to_native(qaoa_circuit(p, res.gamma, res.beta)), plus, noise, 100, seed)
                : run_trajectories(qaoa_schedule(p, res.gamma, res.beta), plus, noise, 100, seed);
        res.noisy_ratio = run.result.probabilities().dot(cut_values(p)) / res.max_cut;
    }
    return res;
}

std::vector<QAOAProblem> qaoa_reference_instances(int p, QAOAMode mode, double alpha) {
    const int n = 8;
    auto complement = [&](const std::vector<std::pair<int, int>>& removed) {
        QAOAProblem q;
        q.n = n;
        q.p = p;
        q.mode = mode;
        q.alpha = alpha;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const bool gone = std::any_of(removed.begin(), removed.end(), [&](const auto& e) {
                    return (e.first == a && e.second == b) || (e.first == b && e.second == a);
                });
                if (!gone) q.edges.push_back({a, b, 1.0});
            }
        q.validate();
        return q;
    };
    auto cycle = [](int start, int len, std::vector<std::pair<int, int>>& out) {
        for (int i = 0; i < len; ++i) out.emplace_back(start + i, start + (i + 1) % len);
    };
    std::vector<std::pair<int, int>> c8, c44, c53;
    cycle(0, 8, c8);
    cycle(0, 4, c44);
    cycle(4, 4, c44);
    cycle(0, 5, c53);
    cycle(5, 3, c53);
    return {complement(c8), complement(c44), complement(c53)};
}

}  // namespace daqc
