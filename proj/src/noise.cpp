#include "daqc/noise.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"

namespace daqc {

namespace {

void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParamError(std::string(what) + " must lie in [0, 1]");
}

void check_nonneg(double x, const char* what) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ParamError(std::string(what) + " must be finite and non-negative");
}

}  // namespace

std::string to_string(ChannelLabel l) {
    switch (l) {
        case ChannelLabel::BitFlip: return "bit_flip";
        case ChannelLabel::AmplitudeDamping: return "amplitude_damping";
        case ChannelLabel::Measurement: return "measurement";
    }
    return "?";
}

int KrausChannel::qubit_count() const {
    if (operators.empty()) throw ParamError("channel has no operators");
    return operators[0].rows() == 2 ? 1 : 2;
}

double KrausChannel::completeness_error() const {
    const auto d = operators.at(0).rows();
    Mat s = Mat::Zero(d, d);
    for (const auto& e : operators) s += e.adjoint() * e;
    return (s - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

Eigen::Matrix4cd KrausChannel::superoperator() const {
    if (qubit_count() != 1) throw ParamError("superoperator is defined for single-qubit channels");
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    for (const auto& e : operators)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) s(2 * i + j, 2 * k + l) += e(i, k) * std::conj(e(j, l));
    return s;
}

KrausChannel bit_flip_channel(double p) {
    check_prob(p, "bit-flip probability");
    KrausChannel c;
    c.label = ChannelLabel::BitFlip;
    c.operators.push_back(std::sqrt(1.0 - p) * Mat::Identity(2, 2));
    c.operators.push_back(std::sqrt(p) * Mat(pauli2('X')));
    return c;
}

KrausChannel measurement_channel(double p) {
    KrausChannel c = bit_flip_channel(p);
    c.label = ChannelLabel::Measurement;
    return c;
}

KrausChannel amplitude_damping_channel(double t, double T1, double p) {
    check_nonneg(t, "damping time");
    if (!(T1 > 0.0)) throw ParamError("T1 must be positive");
    check_prob(p, "thermal population");
    const double g = -std::expm1(-t / T1);
    const double a = std::sqrt(p), b = std::sqrt(1.0 - p);
    KrausChannel c;
    c.label = ChannelLabel::AmplitudeDamping;
    Mat e = Mat::Zero(2, 2);
    e(0, 0) = a;
    e(1, 1) = a * std::sqrt(1.0 - g);
    c.operators.push_back(e);
    e.setZero();
    e(0, 1) = a * std::sqrt(g);
    c.operators.push_back(e);
    e.setZero();
    e(0, 0) = b * std::sqrt(1.0 - g);
    e(1, 1) = b;
    c.operators.push_back(e);
    e.setZero();
    e(1, 0) = b * std::sqrt(g);
    c.operators.push_back(e);
    return c;
}

void apply_superoperator(Mat& rho, int n, const Eigen::Matrix4cd& s, int qubit) {
    if (qubit < 0 || qubit >= n) throw DimensionError("channel qubit out of range");
    const std::uint64_t bit = std::uint64_t{1} << bit_of(n, qubit);
    const std::uint64_t d = dim_of(n);
    Eigen::Vector4cd in, out;
    for (std::uint64_t c = 0; c < d; ++c) {
        if (c & bit) continue;
        for (std::uint64_t r = 0; r < d; ++r) {
            if (r & bit) continue;
            const std::uint64_t rr[2] = {r, r | bit}, cc[2] = {c, c | bit};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    in(2 * i + j) = rho(static_cast<Eigen::Index>(rr[i]), static_cast<Eigen::Index>(cc[j]));
            out.noalias() = s * in;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    rho(static_cast<Eigen::Index>(rr[i]), static_cast<Eigen::Index>(cc[j])) = out(2 * i + j);
        }
    }
}

QuantumState apply_channel(const KrausChannel& c, const QuantumState& rho, int qubit) {
    if (rho.is_pure()) throw RequiresDensityMatrix("channels act on density matrices");
    const int n = rho.qubit_count();
    const int k = c.qubit_count();
    if (qubit < 0 || qubit + k > n) throw DimensionError("channel qubit out of range");
    if (k == 1) {
        Mat r = rho.rho();
        apply_superoperator(r, n, c.superoperator(), qubit);
        return QuantumState::from_density(std::move(r));
    }
    std::vector<int> qs = {qubit, qubit + 1};
    Mat acc = Mat::Zero(rho.rho().rows(), rho.rho().cols());
    for (const auto& e : c.operators) {
        Mat r = rho.rho();
        conjugate_on_qubits(r, n, e, qs);
        acc += r;
    }
    return QuantumState::from_density(std::move(acc));
}

NoiseModel NoiseModel::preset(const std::string& name) {
    NoiseModel m;
    m.name = name;
    if (name == "none") return m;
    if (name == "qft-2020") {
        m.sqgn = 0.0005;
        m.tqgn = 0.2;
        m.abn_s = 0.02;
        m.abn_b = 0.01;
        m.p_bitflip = 0.005;
        m.p_meas = 0.01;
        m.t1 = 50e-6;
        m.p_thermal = 0.35;
        m.g0 = 1e6;
        m.dt_sqg = 1.0 / (100.0 * m.g0);
        return m;
    }
    if (name == "qpe-ibm") {
        m.sqgn = 0.0005;
        m.tqgn = 0.08;
        m.abn_s = 0.002;
        m.abn_b = 0.001;
        m.p_bitflip = 1e-4;
        m.p_meas = 0.01;
        m.t1 = 50e-6;
        m.p_thermal = 0.35;
        m.g0 = 1e6;
        m.dt_sqg = 10e-9;
        m.gate_times = {{"Rx", 10e-9}, {"Rz", 1e-9}, {"CNOT", 300e-9}};
        m.cross_talk = true;
        return m;
    }
    if (name == "mitigation") {
        m.t1 = 50e-6;
        m.p_thermal = 0.35;
        m.g0 = 1e6;
        m.dt_sqg = 1.0 / (100.0 * m.g0);
        return m;
    }
    throw ParamError("unknown noise preset '" + name + "'");
}

std::vector<std::string> NoiseModel::preset_names() { return {"none", "qft-2020", "qpe-ibm", "mitigation"}; }

void NoiseModel::validate() const {
    check_nonneg(sqgn, "SQGN");
    if (sqgn > 1.0) throw ParamError("SQGN must not exceed 1");
    check_nonneg(tqgn, "TQGN");
    check_nonneg(abn_s, "ABN_s");
    check_nonneg(abn_b, "ABN_b");
    check_prob(p_bitflip, "bit-flip probability");
    check_prob(p_meas, "measurement error probability");
    check_prob(p_thermal, "thermal population");
    check_nonneg(t1, "T1");
    if (!(dt_sqg > 0.0) || !std::isfinite(dt_sqg)) throw ParamError("dt_sqg must be positive");
    if (!(g0 > 0.0) || !std::isfinite(g0)) throw ParamError("g0 must be positive");
    for (const auto& [k, v] : gate_times) {
        if (k != "Rx" && k != "Rz" && k != "CNOT") throw ParamError("unknown gate time '" + k + "'");
        if (!(v > 0.0)) throw ParamError("gate times must be positive");
    }
}

bool NoiseModel::noiseless() const { return !coherent() && !damping() && p_bitflip == 0.0 && p_meas == 0.0; }

nlohmann::json NoiseModel::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["SQGN"] = sqgn;
    j["TQGN"] = tqgn;
    j["ABN_s"] = abn_s;
    j["ABN_b"] = abn_b;
    j["p_bitflip"] = p_bitflip;
    j["p_meas"] = p_meas;
    j["T1"] = t1;
    j["p_thermal"] = p_thermal;
    j["dt_sqg"] = dt_sqg;
    j["g0"] = g0;
    j["gate_times"] = gate_times;
    j["cross_talk"] = cross_talk;
    return j;
}

NoiseModel NoiseModel::from_json(const nlohmann::json& j) {
    if (j.is_string()) return preset(j.get<std::string>());
    if (!j.is_object()) throw ParamError("noise model must be a preset name or an object");
    NoiseModel m = preset(j.value("preset", std::string("none")));
    if (j.contains("name")) m.name = j["name"].get<std::string>();
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "preset" || k == "name") continue;
            if (k == "SQGN") m.sqgn = v.get<double>();
            else if (k == "TQGN") m.tqgn = v.get<double>();
            else if (k == "ABN_s") m.abn_s = v.get<double>();
            else if (k == "ABN_b") m.abn_b = v.get<double>();
            else if (k == "p_bitflip") m.p_bitflip = v.get<double>();
            else if (k == "p_meas") m.p_meas = v.get<double>();
            else if (k == "T1") m.t1 = v.get<double>();
            else if (k == "p_thermal") m.p_thermal = v.get<double>();
            else if (k == "dt_sqg") m.dt_sqg = v.get<double>();
            else if (k == "g0") m.g0 = v.get<double>();
            else if (k == "gate_times") m.gate_times = v.get<std::map<std::string, double>>();
            else if (k == "cross_talk") m.cross_talk = v.get<bool>();
            else throw ParamError("unknown noise key '" + k + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParamError(std::string("malformed noise model: ") + e.what());
    }
    m.validate();
    return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

NoiseRng::NoiseRng(std::uint64_t seed, std::uint64_t stream)
    : eng_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

double NoiseRng::uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }

double NoiseRng::normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(eng_); }

std::uint64_t resolve_seed(std::uint64_t seed) {
    if (const char* env = std::getenv("DAQC_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
        throw ParamError("DAQC_SEED must be a non-negative integer");
    }
    return seed;
}

double perturb_gate(PerturbKind kind, double nominal, const NoiseModel& m, NoiseRng& rng) {
    switch (kind) {
        case PerturbKind::SQG:
            return m.sqgn > 0.0 ? nominal * rng.uniform(1.0 - m.sqgn, 1.0 + m.sqgn) : nominal;
        case PerturbKind::TQG:
            return m.tqgn > 0.0 ? nominal * (1.0 + rng.normal(m.tqgn)) : nominal;
        case PerturbKind::AnalogStepwise:
            return m.abn_s > 0.0 ? nominal + rng.normal(m.abn_s) : nominal;
        case PerturbKind::AnalogBanged:
            return m.abn_b > 0.0 ? nominal + rng.normal(m.abn_b) : nominal;
    }
    return nominal;
}

double native_gate_time(const NativeOp& op, const NoiseModel& m) {
    switch (op.kind) {
        case NativeOp::Kind::SQG: {
            if (m.gate_times.empty()) return m.dt_units();
            const bool diag = std::abs(op.gen(0, 1)) < 1e-14 && std::abs(op.gen(1, 0)) < 1e-14;
            auto it = m.gate_times.find(diag ? "Rz" : "Rx");
            return it == m.gate_times.end() ? m.dt_units() : it->second * m.g0;
        }
        case NativeOp::Kind::TQG: {
            auto it = m.gate_times.find("CNOT");
            if (it != m.gate_times.end()) return it->second * m.g0;
            return 100.0 * m.dt_units() * std::numbers::pi / 4.0;
        }
        case NativeOp::Kind::Opaque: return 0.0;
    }
    return 0.0;
}

namespace {

struct ChannelSet {
    int n;
    const NoiseModel& m;
    Eigen::Matrix4cd flip, meas;

    ChannelSet(int n, const NoiseModel& m)
        : n(n), m(m), flip(bit_flip_channel(m.p_bitflip).superoperator()),
          meas(measurement_channel(m.p_meas).superoperator()) {}

    void damp(Mat& rho, double t) const {
        if (!m.damping() || !(t > 0.0)) return;
        const auto s = amplitude_damping_channel(t, m.t1_units(), m.p_thermal).superoperator();
        for (int q = 0; q < n; ++q) apply_superoperator(rho, n, s, q);
    }
    void bit_flip(Mat& rho, const std::vector<int>& qs) const {
        if (m.p_bitflip == 0.0) return;
        for (int q : qs) apply_superoperator(rho, n, flip, q);
    }
    void bit_flip_all(Mat& rho) const {
        if (m.p_bitflip == 0.0) return;
        for (int q = 0; q < n; ++q) apply_superoperator(rho, n, flip, q);
    }
    void measurement(Mat& rho) const {
        if (m.p_meas == 0.0) return;
        for (int q = 0; q < n; ++q) apply_superoperator(rho, n, meas, q);
    }
};

template <class Shot>
TrajectoryRun average_shots(const QuantumState& psi0, const NoiseModel& m, int shots, std::uint64_t seed,
                            Shot&& shot) {
    if (shots < 1) throw ParamError("shots must be at least 1");
    m.validate();
    TrajectoryRun run;
    run.seed = seed;
    run.shots = shots;
    run.simulated_shots = m.coherent() ? shots : 1;
    const QuantumState start = psi0.is_pure() ? psi0.to_density() : psi0;
    Mat sum;
    for (int k = 0; k < run.simulated_shots; ++k) {
        NoiseRng rng(seed, static_cast<std::uint64_t>(k));
        QuantumState st = start;
        shot(st, rng);
        if (k == 0)
            sum = std::move(st.rho_mut());
        else
            sum += st.rho();
    }
    if (run.simulated_shots > 1) sum /= static_cast<double>(run.simulated_shots);
    run.result = QuantumState::from_density(std::move(sum));
    return run;
}

}  // namespace

TrajectoryRun run_trajectories(const Schedule& s, const QuantumState& psi0, const NoiseModel& m, int shots,
                               std::uint64_t seed) {
    if (psi0.qubit_count() != s.qubit_count()) throw DimensionError("state size does not match schedule");
    const int n = s.qubit_count();
    ScheduleRunner runner(s);
    const ChannelSet ch(n, m);
    const PerturbKind analog_kind = s.mode() == Mode::SDAQC ? PerturbKind::AnalogStepwise : PerturbKind::AnalogBanged;
    std::vector<double> scales(static_cast<size_t>(n), 1.0);

    auto shot = [&](QuantumState& st, NoiseRng& rng) {
        for (const auto& step : runner.lowering().steps) {
            switch (step.kind) {
                case Step::Kind::Pulse: {
                    const auto active = std::get<DigitalLayer>(s.items()[step.item]).active();
                    if (m.sqgn > 0.0) {
                        std::fill(scales.begin(), scales.end(), 1.0);
                        for (int q : active) scales[q] = perturb_gate(PerturbKind::SQG, 1.0, m, rng);
                        runner.run_pulse(step, st, &scales);
                    } else {
                        runner.run_pulse(step, st);
                    }
                    ch.damp(st.rho_mut(), step.duration);
                    if (m.cross_talk)
                        ch.bit_flip_all(st.rho_mut());
                    else
                        ch.bit_flip(st.rho_mut(), active);
                    break;
                }
                case Step::Kind::Analog: {
                    if (!(step.duration > 0.0)) break;
                    const double t = perturb_gate(analog_kind, step.duration, m, rng);
                    runner.run_analog(step, st, t - step.duration);
                    ch.damp(st.rho_mut(), std::max(t, 0.0));
                    if (s.mode() == Mode::SDAQC) ch.bit_flip_all(st.rho_mut());
                    break;
                }
                case Step::Kind::Gate:
                    runner.run_gate(step, st);
                    break;
            }
        }
        ch.measurement(st.rho_mut());
    };
    TrajectoryRun run = average_shots(psi0, m, shots, seed, shot);
    run.wall_time = runner.lowering().wall_time;
    return run;
}

TrajectoryRun run_trajectories(const NativeCircuit& c, const QuantumState& psi0, const NoiseModel& m, int shots,
                               std::uint64_t seed) {
    if (psi0.qubit_count() != c.n) throw DimensionError("state size does not match circuit");
    const int n = c.n;
    const ChannelSet ch(n, m);
    // Noiseless unitaries are built once.
    std::vector<Mat> nominal;
    nominal.reserve(c.ops.size());
    double wall = 0.0;
    for (const auto& op : c.ops) {
        nominal.push_back(op.matrix());
        wall += native_gate_time(op, m);
    }

    auto shot = [&](QuantumState& st, NoiseRng& rng) {
        Mat& rho = st.rho_mut();
        for (size_t i = 0; i < c.ops.size(); ++i) {
            const auto& op = c.ops[i];
            const double t = native_gate_time(op, m);
            switch (op.kind) {
                case NativeOp::Kind::SQG: {
                    if (m.sqgn > 0.0) {
                        const double b = perturb_gate(PerturbKind::SQG, 1.0, m, rng);
                        conjugate_on_qubits(rho, n, expm_hermitian(op.gen * b, 1.0, ExpSign::Plus), op.qubits);
                    } else {
                        conjugate_on_qubits(rho, n, nominal[i], op.qubits);
                    }
                    ch.damp(rho, t);
                    if (m.cross_talk)
                        ch.bit_flip_all(rho);
                    else
                        ch.bit_flip(rho, op.qubits);
                    break;
                }
                case NativeOp::Kind::TQG: {
                    double scale = 1.0;
                    if (m.tqgn > 0.0) {
                        scale = perturb_gate(PerturbKind::TQG, op.phase, m, rng) / op.phase;
                        NativeOp p = op;
                        p.phase = op.phase * scale;
                        conjugate_on_qubits(rho, n, p.matrix(), op.qubits);
                    } else {
                        conjugate_on_qubits(rho, n, nominal[i], op.qubits);
                    }
                    ch.damp(rho, std::max(t * scale, 0.0));
                    ch.bit_flip(rho, op.qubits);
                    break;
                }
                case NativeOp::Kind::Opaque:
                    conjugate_on_qubits(rho, n, nominal[i], op.qubits);
                    break;
            }
        }
        ch.measurement(rho);
    };
    TrajectoryRun run = average_shots(psi0, m, shots, seed, shot);
    run.wall_time = wall;
    return run;
}

}  // namespace daqc
