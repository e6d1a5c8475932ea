#include "daqc/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "daqc/algorithms.hpp"
#include "daqc/compiler.hpp"
#include "daqc/cross_resonance.hpp"
#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"
#include "daqc/mitigation.hpp"

#ifndef DAQC_VERSION
#define DAQC_VERSION "0.1.0"
#endif

namespace daqc {

using json = nlohmann::json;

std::string version_string() { return DAQC_VERSION; }

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<KeySpec> common_keys(const std::string& mode, const std::string& noise, int shots) {
    return {
        {"mode", KeyType::String, mode, "digital, sdaqc or bdaqc"},
        {"noise", KeyType::Json, noise, "preset name or inline noise model"},
        {"shots", KeyType::Int, shots, "trajectory count"},
        {"seed", KeyType::Int, 1, "base seed (DAQC_SEED overrides)"},
        {"out", KeyType::String, "results", "output directory"},
    };
}

std::vector<KeySpec> ising_keys() {
    return {
        {"n", KeyType::Int, 5, "qubit count"},
        {"t", KeyType::Double, 1.0, "target evolution time"},
        {"g", KeyType::Double, 1.0, "resource coupling"},
        {"dt", KeyType::Double, 0.01, "single-qubit pulse time (units of 1/g)"},
        {"couplings", KeyType::Json, json(), "target couplings [[j, k, value], ...]; random when absent"},
    };
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

template <class T>
T get(const json& p, const std::string& k) {
    return p.at(k).get<T>();
}

Paradigm config_paradigm(const json& p) {
    try {
        return paradigm_from_string(get<std::string>(p, "mode"));
    } catch (const Error&) {
        throw ConfigError("mode must be digital, sdaqc or bdaqc");
    }
}

Mode daqc_mode(const json& p) {
    const Paradigm m = config_paradigm(p);
    if (m == Paradigm::Digital) throw ConfigError("this command needs mode sdaqc or bdaqc");
    return m == Paradigm::SDAQC ? Mode::SDAQC : Mode::BDAQC;
}

CouplingMatrix config_couplings(const json& p, std::uint64_t seed) {
    const int n = get<int>(p, "n");
    if (n < 2 || n > 10) throw ConfigError("n must be in 2..10");
    CouplingMatrix c(n);
    const json& list = p.at("couplings");
    if (list.is_null()) {
        std::mt19937_64 rng(splitmix64(seed));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) c.set(j, k, u(rng));
        return c;
    }
    if (!list.is_array()) throw ConfigError("couplings must be an array of [j, k, value]");
    for (const auto& e : list) {
        if (!e.is_array() || e.size() != 3) throw ConfigError("couplings must be an array of [j, k, value]");
        c.set(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
    return c;
}

struct IsingRun {
    CouplingMatrix target;
    CompilationResult compiled;
    Mat exact;
};

IsingRun compile_from_config(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    IsingRun r{config_couplings(p, cfg.seed), {}, {}};
    IsingOptions opt;
    opt.mode = daqc_mode(p);
    opt.dt = get<double>(p, "dt");
    r.compiled = compile_ising(r.target, get<double>(p, "t"), get<double>(p, "g"), opt);
    r.exact = propagator(r.target.hamiltonian(), get<double>(p, "t"));
    return r;
}

json compile_metrics(const IsingRun& r) {
    const Mat u = schedule_unitary(r.compiled.schedule);
    const double d = static_cast<double>(u.rows());
    return {{"qubits", r.target.qubit_count()},
            {"block_count", r.compiled.block_count},
            {"layer_count", r.compiled.schedule.layer_count()},
            {"analog_time", r.compiled.schedule.analog_time()},
            {"synthesis_residual", r.compiled.synthesis_residual},
            {"unitary_fidelity", std::abs((r.exact.adjoint() * u).trace()) / d},
            {"negative_time_repair", r.compiled.repair.has_value()},
            {"diagnostics", r.compiled.diagnostics}};
}

std::string analog_times_csv(const IsingRun& r) {
    std::ostringstream os;
    os << "alpha,j,k,coupling,time\n";
    const int n = r.target.qubit_count();
    for (size_t a = 0; a < r.compiled.analog_times.size(); ++a) {
        const auto [j, k] = unvectorize_pair(static_cast<int>(a) + 1, n);
        os << a + 1 << ',' << j - 1 << ',' << k - 1 << ',' << csv_number(r.target.get(j - 1, k - 1)) << ','
           << csv_number(r.compiled.analog_times[a]) << '\n';
    }
    return os.str();
}

std::string probability_csv(int n, const RVec& ideal, const RVec& noisy) {
    std::ostringstream os;
    os << "state,ideal,noisy\n";
    for (Eigen::Index i = 0; i < ideal.size(); ++i)
        os << bit_string(static_cast<std::uint64_t>(i), n) << ',' << csv_number(ideal(i)) << ','
           << csv_number(noisy(i)) << '\n';
    return os.str();
}

ExperimentOutput cmd_compile(const ExperimentConfig& cfg) {
    const IsingRun r = compile_from_config(cfg);
    ExperimentOutput out;
    out.record["metrics"] = compile_metrics(r);
    out.files["compile_analog_times.csv"] = analog_times_csv(r);
    out.files["compile_schedule.txt"] = r.compiled.schedule.serialize();
    return out;
}

ExperimentOutput cmd_simulate(const ExperimentConfig& cfg) {
    const IsingRun r = compile_from_config(cfg);
    const int n = r.target.qubit_count();
    const std::string input = get<std::string>(cfg.params, "input");
    QuantumState psi0;
    if (input == "plus") psi0 = QuantumState::from_vector(Vec::Ones(static_cast<Eigen::Index>(dim_of(n))), true);
    else if (input == "zero") psi0 = QuantumState::basis(n, 0);
    else if (input == "w_ghz") psi0 = qft_input_state(n, kPi / 4);
    else throw ConfigError("input must be plus, zero or w_ghz");
    const QuantumState ideal = QuantumState::from_vector(r.exact * psi0.vec());
    const TrajectoryRun run = run_trajectories(r.compiled.schedule, psi0, cfg.noise, cfg.shots, cfg.seed);
    ExperimentOutput out;
    json m = compile_metrics(r);
    m["fidelity"] = fidelity(ideal, run.result);
    m["simulated_shots"] = run.simulated_shots;
    m["wall_time"] = run.wall_time;
    out.record["metrics"] = m;
    out.files["simulate_probabilities.csv"] =
        probability_csv(n, ideal.probabilities(), run.result.probabilities());
    return out;
}

ExperimentOutput cmd_qft(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    const auto ns = get<std::vector<int>>(p, "n");
    const auto betas = get<std::vector<double>>(p, "beta");
    const Paradigm primary = config_paradigm(p);
    if (ns.empty() || betas.empty()) throw ConfigError("n and beta must be non-empty");
    std::ostringstream rows, summary;
    rows << "n,mode,beta,fidelity\n";
    summary << "n,mode,mean_fidelity\n";
    json metrics = json::array();
    for (int n : ns) {
        json entry{{"n", n}};
        for (Paradigm m : {Paradigm::Digital, Paradigm::SDAQC, Paradigm::BDAQC}) {
            double sum = 0.0;
            for (size_t i = 0; i < betas.size(); ++i) {
                const QFTRunResult r = run_qft(n, m, cfg.noise, cfg.shots, splitmix64(cfg.seed + i), betas[i]);
                rows << n << ',' << to_string(m) << ',' << csv_number(betas[i]) << ',' << csv_number(r.fidelity)
                     << '\n';
                sum += r.fidelity;
            }
            const double mean = sum / static_cast<double>(betas.size());
            summary << n << ',' << to_string(m) << ',' << csv_number(mean) << '\n';
            entry["mean_fidelity"][to_string(m)] = mean;
        }
        entry["primary_fidelity"] = entry["mean_fidelity"][to_string(primary)];
        metrics.push_back(entry);
    }
    ExperimentOutput out;
    out.record["metrics"] = {{"runs", metrics}};
    out.files["qft_fidelity.csv"] = rows.str();
    out.files["qft_fidelity_vs_n.csv"] = summary.str();
    return out;
}

ExperimentOutput cmd_qpe(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    const int n_r = get<int>(p, "nr");
    const QPEResult r = run_qpe(get<double>(p, "phi"), n_r, config_paradigm(p), cfg.noise, cfg.shots, cfg.seed);
    std::ostringstream os;
    os << "state,estimate,probability\n";
    const double scale = 1.0 / static_cast<double>(dim_of(n_r));
    for (size_t v = 0; v < r.probabilities.size(); ++v)
        os << bit_string(v, n_r) << ',' << csv_number(static_cast<double>(v) * scale) << ','
           << csv_number(r.probabilities[v]) << '\n';
    json top = json::array();
    for (size_t i = 0; i < std::min<size_t>(2, r.ranking.size()); ++i) {
        const auto v = static_cast<std::uint64_t>(r.ranking[i]);
        top.push_back({{"state", bit_string(v, n_r)}, {"probability", r.probabilities[v]}});
    }
    ExperimentOutput out;
    out.record["metrics"] = {{"top", top},
                             {"weighted_mean", r.weighted_mean},
                             {"weighted_std", r.weighted_std},
                             {"majority", r.majority}};
    out.files["qpe_probabilities.csv"] = os.str();
    return out;
}

ExperimentOutput cmd_hhl(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    HHLProblem prob;
    const auto rows = get<std::vector<std::vector<double>>>(p, "a");
    const auto b = get<std::vector<double>>(p, "b");
    const auto d = static_cast<Eigen::Index>(rows.size());
    prob.a = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<size_t>(i)].size()) != d)
            throw ConfigError("a must be a square matrix");
        for (Eigen::Index j = 0; j < d; ++j) prob.a(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    prob.b = Vec::Zero(static_cast<Eigen::Index>(b.size()));
    for (size_t i = 0; i < b.size(); ++i) prob.b(static_cast<Eigen::Index>(i)) = b[i];
    prob.n_r = get<int>(p, "nr");
    const HHLResult r = run_hhl(prob, config_paradigm(p), cfg.noise, cfg.shots, cfg.seed);
    std::ostringstream os;
    os << "state,classical,solution\n";
    const RVec sol = r.solution.probabilities();
    for (Eigen::Index i = 0; i < r.classical.size(); ++i)
        os << bit_string(static_cast<std::uint64_t>(i), prob.system_qubits()) << ','
           << csv_number(std::norm(r.classical(i))) << ',' << csv_number(sol(i)) << '\n';
    ExperimentOutput out;
    out.record["metrics"] = {{"fidelity", r.fidelity},
                             {"error", r.error},
                             {"success_probability", r.success_probability},
                             {"ancilla_only_probability", r.ancilla_only_probability},
                             {"ancilla_only_fidelity", r.ancilla_only_fidelity},
                             {"suggested_nr", suggest_register_size(
                                                  [&] {
                                                      Eigen::SelfAdjointEigenSolver<Mat> es(prob.a);
                                                      const RVec ev = es.eigenvalues().cwiseAbs();
                                                      return ev.maxCoeff() / ev.minCoeff();
                                                  }(),
                                                  static_cast<int>(d))}};
    out.files["hhl_solution.csv"] = os.str();
    return out;
}

ExperimentOutput cmd_qaoa(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    QAOAMode mode;
    try {
        mode = qaoa_mode_from_string(get<std::string>(p, "qaoa_mode"));
    } catch (const Error&) {
        throw ConfigError("qaoa_mode must be ideal, sda or bda");
    }
    const int layers = get<int>(p, "p");
    const double alpha = get<double>(p, "alpha");
    QAOAProblem prob;
    const std::string inst = get<std::string>(p, "instance");
    if (!p.at("edges").is_null()) {
        prob.n = get<int>(p, "vertices");
        for (const auto& e : p.at("edges")) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ConfigError("edges must be [[a, b(, w)], ...]");
            prob.edges.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
        }
        prob.p = layers;
        prob.mode = mode;
        prob.alpha = alpha;
    } else if (inst == "edge") {
        prob = {2, {{0, 1, 1.0}}, layers, mode, alpha};
    } else if (inst == "0" || inst == "1" || inst == "2") {
        prob = qaoa_reference_instances(layers, mode, alpha)[static_cast<size_t>(inst[0] - '0')];
    } else {
        throw ConfigError("instance must be 0, 1, 2 or edge (or give edges)");
    }
    OptimizerSettings opt;
    opt.starts = get<int>(p, "starts");
    opt.max_evals = get<int>(p, "max_evals");
    opt.seed = cfg.seed;
    const QAOAResult r = qaoa_run(prob, opt, cfg.noise);
    std::ostringstream os;
    os << "layer,gamma,beta\n";
    for (size_t k = 0; k < r.gamma.size(); ++k)
        os << k + 1 << ',' << csv_number(r.gamma[k]) << ',' << csv_number(r.beta[k]) << '\n';
    json m{{"ratio", r.ratio},
           {"expectation", r.expectation},
           {"max_cut", r.max_cut},
           {"evaluations", r.evaluations},
           {"best_start", r.best_start},
           {"warnings", r.warnings}};
    m["noisy_ratio"] = r.noisy_ratio ? json(*r.noisy_ratio) : json();
    ExperimentOutput out;
    out.record["metrics"] = m;
    out.files["qaoa_parameters.csv"] = os.str();
    return out;
}

ExperimentOutput cmd_cr(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    SpinModel model;
    try {
        model = spin_model_from_string(get<std::string>(p, "model"));
    } catch (const Error&) {
        throw ConfigError("model must be ising, xy or heisenberg");
    }
    LatticeSpec lat;
    const std::string kind = get<std::string>(p, "lattice");
    const std::string boundary = get<std::string>(p, "boundary");
    if (kind == "chain") lat.kind = LatticeKind::Chain;
    else if (kind == "square") lat.kind = LatticeKind::Square;
    else throw ConfigError("lattice must be chain or square");
    if (boundary == "open") lat.boundary = Boundary::Open;
    else if (boundary == "periodic") lat.boundary = Boundary::Periodic;
    else throw ConfigError("boundary must be open or periodic");
    lat.n = get<int>(p, "size");
    CRParams cr;
    cr.g = get<double>(p, "g");
    cr.omega = get<double>(p, "omega");
    cr.delta = get<double>(p, "delta");
    const double T = get<double>(p, "time");
    const auto taus = get<std::vector<double>>(p, "tau");
    if (taus.empty()) throw ConfigError("tau must be non-empty");
    std::ostringstream os;
    os << "tau,steps,error\n";
    json runs = json::array();
    bool trotter_free = false;
    for (double tau : taus) {
        const SpinSimResult r = simulate_spin_model(model, lat, cr, T, tau);
        trotter_free = r.trotter_free;
        os << csv_number(tau) << ',' << r.steps << ',' << csv_number(r.error) << '\n';
        runs.push_back({{"tau", tau}, {"steps", r.steps}, {"error", r.error}});
    }
    json m{{"J", cr.J()}, {"weak_driving", cr.weak_driving()}, {"trotter_free", trotter_free}, {"runs", runs}};
    if (model == SpinModel::Heisenberg && lat.kind == LatticeKind::Chain) {
        const CommutatorBound b = heisenberg_commutator_bound(lat.n, cr.J());
        m["commutator"] = {{"numeric", b.numeric}, {"bound", b.bound}, {"digital_bound", b.digital_bound},
                           {"holds", b.holds}};
    }
    ExperimentOutput out;
    out.record["metrics"] = m;
    out.files["cr_errors.csv"] = os.str();
    return out;
}

ExperimentOutput cmd_mitigate(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    if (daqc_mode(p) != Mode::BDAQC) throw ConfigError("mitigate needs mode bdaqc");
    const int n = get<int>(p, "n");
    if (n < 2 || n > 10) throw ConfigError("n must be in 2..10");
    ExtrapolationPlan plan;
    plan.g_values = get<std::vector<double>>(p, "g_values");
    plan.b_values = get<std::vector<double>>(p, "b_values");
    plan.method = ExtrapolationMethod::from_string(get<std::string>(p, "method"));
    const std::string obs = get<std::string>(p, "observable");
    if (obs != "fidelity") {
        if (static_cast<int>(obs.size()) != n || obs.find_first_not_of("IXYZ") != std::string::npos)
            throw ConfigError("observable must be fidelity or an n-character Pauli string");
        plan.observable.kind = Observable::Kind::Expectation;
        plan.observable.pauli = PauliString(obs);
    }
    plan.validate();
    const QuantumState input = qft_input_state(n, get<double>(p, "beta"));
    const QuantumState ideal = run_circuit(build_qft(n, false), input);
    const ZNEReport r = two_axis_zne({compile_qft_daqc(n, Mode::BDAQC, plan.b_values.front()), input, ideal}, plan,
                                     cfg.noise, cfg.shots, cfg.seed);
    std::ostringstream os;
    os << "b,g,x,value\n";
    for (const auto& pt : r.raw)
        os << csv_number(pt.b) << ',' << csv_number(pt.g) << ',' << csv_number(pt.x) << ',' << csv_number(pt.value)
           << '\n';
    ExperimentOutput out;
    json m = r.to_json();
    m.erase("raw");
    m["method"] = plan.method.name();
    m["observable"] = plan.observable.name();
    out.record["metrics"] = m;
    out.files["mitigate_grid.csv"] = os.str();
    return out;
}

bool type_matches(const json& v, KeyType t) {
    switch (t) {
        case KeyType::Int: return v.is_number_integer();
        case KeyType::Double: return v.is_number();
        case KeyType::String: return v.is_string();
        case KeyType::IntList:
            if (!v.is_array()) return false;
            for (const auto& e : v)
                if (!e.is_number_integer()) return false;
            return true;
        case KeyType::DoubleList:
            if (!v.is_array()) return false;
            for (const auto& e : v)
                if (!e.is_number()) return false;
            return true;
        case KeyType::Json: return true;
    }
    return false;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

const std::vector<std::string>& cli_commands() {
    static const std::vector<std::string> c{"compile", "simulate", "qft", "qpe", "hhl", "qaoa", "cr", "mitigate"};
    return c;
}

std::vector<KeySpec> command_keys(const std::string& command) {
    std::vector<KeySpec> k;
    const auto add = [&](const std::vector<KeySpec>& more) { k.insert(k.end(), more.begin(), more.end()); };
    if (command == "compile") {
        add(common_keys("sdaqc", "none", 1));
        add(ising_keys());
    } else if (command == "simulate") {
        add(common_keys("sdaqc", "none", 100));
        add(ising_keys());
        add({{"input", KeyType::String, "plus", "plus, zero or w_ghz"}});
    } else if (command == "qft") {
        add(common_keys("bdaqc", "qft-2020", 1000));
        add({{"n", KeyType::IntList, json::array({3}), "qubit counts"},
             {"beta", KeyType::DoubleList, json::array({0.0, kPi / 4, kPi / 2, 3 * kPi / 4}),
              "input angles of sin(beta)|W> + cos(beta)|GHZ>"}});
    } else if (command == "qpe") {
        add(common_keys("digital", "none", 1));
        add({{"phi", KeyType::Double, 1.0 / 3.0, "eigenphase in [0, 1)"},
             {"nr", KeyType::Int, 4, "register qubits"}});
    } else if (command == "hhl") {
        add(common_keys("digital", "none", 1));
        add({{"a", KeyType::Json, json::array({json::array({0.25, 0.0}), json::array({0.0, 0.5})}),
              "Hermitian matrix as rows"},
             {"b", KeyType::DoubleList, json::array({1.0, 1.0}), "right-hand side"},
             {"nr", KeyType::Int, 2, "register qubits"}});
    } else if (command == "qaoa") {
        add(common_keys("digital", "none", 100));
        add({{"instance", KeyType::String, "0", "reference instance 0, 1, 2 or edge"},
             {"edges", KeyType::Json, json(), "custom graph [[a, b(, w)], ...]"},
             {"vertices", KeyType::Int, 0, "vertex count of a custom graph"},
             {"p", KeyType::Int, 1, "QAOA layers"},
             {"qaoa_mode", KeyType::String, "ideal", "ideal, sda or bda"},
             {"alpha", KeyType::Double, 1000.0, "single-qubit to interaction ratio"},
             {"starts", KeyType::Int, 20, "optimizer restarts"},
             {"max_evals", KeyType::Int, 2000, "evaluations per start"}});
    } else if (command == "cr") {
        add(common_keys("digital", "none", 1));
        add({{"model", KeyType::String, "ising", "ising, xy or heisenberg"},
             {"lattice", KeyType::String, "chain", "chain or square"},
             {"boundary", KeyType::String, "open", "open or periodic"},
             {"size", KeyType::Int, 4, "chain length or square side"},
             {"time", KeyType::Double, 1.0, "total evolution time"},
             {"tau", KeyType::DoubleList, json::array({0.1, 0.5, 1.0}), "Trotter steps"},
             {"g", KeyType::Double, 1.0, "coupling"},
             {"omega", KeyType::Double, 0.1, "drive amplitude"},
             {"delta", KeyType::Double, 1.0, "detuning"}});
    } else if (command == "mitigate") {
        add(common_keys("bdaqc", "mitigation", 100));
        const ExtrapolationPlan d;
        add({{"n", KeyType::Int, 6, "QFT qubits"},
             {"b_values", KeyType::DoubleList, d.b_values, "pulse durations in units of 1/g"},
             {"g_values", KeyType::DoubleList, d.g_values, "coupling multipliers of g0"},
             {"method", KeyType::String, "linear", "linear or richardson:k"},
             {"observable", KeyType::String, "fidelity", "fidelity or a Pauli string"},
             {"beta", KeyType::Double, kPi / 4, "input angle"}});
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return k;
}

json flag_value(const KeySpec& key, const std::string& text) {
    const auto split = [&] {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    const auto to_double = [&](const std::string& s) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ConfigError("'" + key.name + "' expects a number, got '" + s + "'");
        return v;
    };
    const auto to_int = [&](const std::string& s) {
        size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ConfigError("'" + key.name + "' expects an integer, got '" + s + "'");
        return v;
    };
    switch (key.type) {
        case KeyType::Int: return to_int(text);
        case KeyType::Double: return to_double(text);
        case KeyType::String: return text;
        case KeyType::IntList: {
            json a = json::array();
            for (const auto& s : split()) a.push_back(to_int(s));
            return a;
        }
        case KeyType::DoubleList: {
            json a = json::array();
            for (const auto& s : split()) a.push_back(to_double(s));
            return a;
        }
        case KeyType::Json: {
            json v = json::parse(text, nullptr, false);
            if (v.is_discarded()) {
                if (key.name == "noise") return text;
                throw ConfigError("'" + key.name + "' expects JSON text");
            }
            return v;
        }
    }
    return text;
}

ExperimentConfig resolve_config(const json& raw) {
    if (!raw.is_object()) throw ConfigError("config must be an object");
    if (!raw.contains("command") || !raw["command"].is_string()) throw ConfigError("config needs a command");
    ExperimentConfig cfg;
    cfg.command = raw["command"].get<std::string>();
    const auto keys = command_keys(cfg.command);
    for (const auto& [k, v] : raw.items()) {
        if (k == "command") continue;
        const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.name == k; });
        if (it == keys.end()) throw ConfigError("unknown key '" + k + "' for command " + cfg.command);
        if (!type_matches(v, it->type)) throw ConfigError("key '" + k + "' has the wrong type");
    }
    for (const auto& s : keys) cfg.params[s.name] = raw.contains(s.name) ? raw[s.name] : s.fallback;
    cfg.noise = NoiseModel::from_json(cfg.params["noise"]);
    cfg.shots = cfg.params["shots"].get<int>();
    if (cfg.shots < 1) throw ConfigError("shots must be >= 1");
    const auto seed = cfg.params["seed"].get<long long>();
    if (seed < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = resolve_seed(static_cast<std::uint64_t>(seed));
    cfg.params["seed"] = cfg.seed;
    cfg.out = cfg.params["out"].get<std::string>();
    return cfg;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    ExperimentOutput out;
    try {
        if (cfg.command == "compile") out = cmd_compile(cfg);
        else if (cfg.command == "simulate") out = cmd_simulate(cfg);
        else if (cfg.command == "qft") out = cmd_qft(cfg);
        else if (cfg.command == "qpe") out = cmd_qpe(cfg);
        else if (cfg.command == "hhl") out = cmd_hhl(cfg);
        else if (cfg.command == "qaoa") out = cmd_qaoa(cfg);
        else if (cfg.command == "cr") out = cmd_cr(cfg);
        else if (cfg.command == "mitigate") out = cmd_mitigate(cfg);
        else throw ConfigError("unknown command '" + cfg.command + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed value: ") + e.what());
    }
    json config = cfg.params;
    config.erase("out");
    out.record["command"] = cfg.command;
    out.record["version"] = version_string();
    out.record["seed"] = cfg.seed;
    out.record["config"] = config;
    out.record["noise"] = cfg.noise.to_json();
    out.record["files"] = json::array();
    for (const auto& [name, body] : out.files) out.record["files"].push_back(name);
    return out;
}

int run(const json& raw, std::ostream& log) {
    ExperimentOutput out;
    std::string dir, command;
    try {
        const ExperimentConfig cfg = resolve_config(raw);
        dir = cfg.out;
        command = cfg.command;
        out = run_experiment(cfg);
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return e.is_numeric() ? 3 : 2;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 3;
    }
    out.record["timestamp"] = timestamp();
    try {
        std::filesystem::create_directories(dir);
        const auto write = [&](const std::string& name, const std::string& body) {
            std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
            f << body;
            if (!f) throw std::runtime_error("cannot write " + name);
        };
        for (const auto& [name, body] : out.files) write(name, body);
        write(command + ".json", out.record.dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 3;
    }
    log << "wrote " << (std::filesystem::path(dir) / (command + ".json")).string() << '\n';
    return 0;
}

}  // namespace daqc
