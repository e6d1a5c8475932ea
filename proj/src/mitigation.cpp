#include "daqc/mitigation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "daqc/errors.hpp"
#include "daqc/linalg.hpp"

namespace daqc {

std::string ExtrapolationMethod::name() const {
    return kind == Kind::Linear ? "linear" : "richardson:" + std::to_string(order);
}

ExtrapolationMethod ExtrapolationMethod::from_string(const std::string& s) {
    if (s == "linear") return linear();
    if (s.rfind("richardson", 0) == 0) {
        if (s == "richardson") return richardson(2);
        if (s.size() > 11 && s[10] == ':') {
            try {
                size_t used = 0;
                const int k = std::stoi(s.substr(11), &used);
                if (used == s.size() - 11 && k >= 1) return richardson(k);
            } catch (const std::exception&) {
            }
        }
    }
    throw PlanError("unknown extrapolation method '" + s + "' (linear, richardson:k)");
}

double extrapolate(const std::vector<std::pair<double, double>>& samples, const ExtrapolationMethod& m) {
    if (samples.size() < 2) throw DegenerateSamples("extrapolation needs at least two samples");
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
            throw DegenerateSamples("samples must be finite");
        for (size_t j = 0; j < i; ++j)
            if (samples[i].first == samples[j].first) throw DegenerateSamples("duplicate x in samples");
    }
    if (m.order < 1) throw DegenerateSamples("extrapolation order must be >= 1");
    const int deg = m.kind == ExtrapolationMethod::Kind::Linear
                        ? 1
                        : std::min(m.order, static_cast<int>(samples.size()) - 1);
    const auto rows = static_cast<Eigen::Index>(samples.size());
    // Scale x so the Vandermonde system stays well conditioned.
    double scale = 0.0;
    for (const auto& s : samples) scale = std::max(scale, std::abs(s.first));
    RMat V(rows, deg + 1);
    RVec y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double x = samples[static_cast<size_t>(i)].first / scale;
        double p = 1.0;
        for (int d = 0; d <= deg; ++d, p *= x) V(i, d) = p;
        y(i) = samples[static_cast<size_t>(i)].second;
    }
    const RVec c = V.colPivHouseholderQr().solve(y);
    return c(0);
}

std::string Observable::name() const {
    return kind == Kind::Fidelity ? "fidelity" : "expectation:" + pauli.str();
}

void ExtrapolationPlan::validate() const {
    if (g_values.size() < 2 || b_values.size() < 2) throw PlanError("need at least two points per axis");
    for (size_t i = 0; i < g_values.size(); ++i) {
        if (!(g_values[i] > 0.0) || !std::isfinite(g_values[i])) throw PlanError("g values must be positive");
        if (i > 0 && !(g_values[i] > g_values[i - 1])) throw PlanError("g values must be strictly increasing");
    }
    for (size_t i = 0; i < b_values.size(); ++i) {
        if (!(b_values[i] > 0.0) || !std::isfinite(b_values[i])) throw PlanError("b values must be positive");
        for (size_t j = 0; j < i; ++j)
            if (b_values[i] == b_values[j]) throw PlanError("b values must be distinct");
    }
    if (method.kind == ExtrapolationMethod::Kind::Richardson && method.order < 1)
        throw PlanError("Richardson order must be >= 1");
}

namespace {

double measure(const QuantumState& rho, const Observable& o, const QuantumState& ideal) {
    if (o.kind == Observable::Kind::Fidelity) return fidelity(ideal, rho);
    const Mat p = pauli_matrix(o.pauli);
    if (rho.is_pure()) return (rho.vec().adjoint() * p * rho.vec())(0, 0).real();
    return (p * rho.rho()).trace().real();
}

}  // namespace

ZNEReport two_axis_zne(const ZNEProgram& program, const ExtrapolationPlan& plan, const NoiseModel& noise, int shots,
                       std::uint64_t seed) {
    plan.validate();
    noise.validate();
    const int n = program.schedule.qubit_count();
    if (program.schedule.mode() != Mode::BDAQC) throw PlanError("two-axis extrapolation needs a bDAQC schedule");
    if (program.input.qubit_count() != n) throw PlanError("input state size does not match the schedule");
    if (plan.observable.kind == Observable::Kind::Fidelity && program.ideal.qubit_count() != n)
        throw PlanError("fidelity observable needs an ideal state of matching size");
    if (plan.observable.kind == Observable::Kind::Expectation && plan.observable.pauli.size() != n)
        throw PlanError("observable size does not match the schedule");

    ZNEReport r;
    const int rich = std::max(plan.method.kind == ExtrapolationMethod::Kind::Richardson ? plan.method.order : 2, 1);
    r.richardson_order = rich;
    r.ideal = plan.observable.kind == Observable::Kind::Fidelity
                  ? 1.0
                  : measure(program.ideal, plan.observable, program.ideal);
    // Points are independent; each writes its own slot so the result does not
    // depend on scheduling.
    const size_t nb = plan.b_values.size(), ng = plan.g_values.size();
    r.raw.resize(nb * ng);
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (size_t k; (k = next++) < nb * ng;) {
            const size_t i = k / ng, j = k % ng;
            try {
                Schedule s = program.schedule;
                s.set_dt(plan.b_values[i]);
                NoiseModel m = noise;
                m.g0 = noise.g0 * plan.g_values[j];
                const std::uint64_t point_seed = splitmix64(seed ^ (i * 7919 + j + 1));
                const TrajectoryRun run = run_trajectories(s, program.input, m, shots, point_seed);
                r.raw[k] = {plan.b_values[i], plan.g_values[j], 1.0 / plan.g_values[j],
                            measure(run.result, plan.observable, program.ideal)};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const size_t threads = std::min<size_t>(std::max(1u, std::thread::hardware_concurrency()), nb * ng);
    std::vector<std::thread> pool;
    for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    r.best_raw = -1e300;
    for (const auto& pt : r.raw) r.best_raw = std::max(r.best_raw, pt.value);
    std::vector<std::pair<double, double>> outer_lin, outer_rich;
    for (size_t i = 0; i < nb; ++i) {
        const double b = plan.b_values[i];
        std::vector<std::pair<double, double>> inner;
        for (size_t j = 0; j < ng; ++j) inner.emplace_back(r.raw[i * ng + j].x, r.raw[i * ng + j].value);
        const double lin = extrapolate(inner, ExtrapolationMethod::linear());
        const double ric = extrapolate(inner, ExtrapolationMethod::richardson(rich));
        r.inner_linear.push_back(lin);
        r.inner_richardson.push_back(ric);
        outer_lin.emplace_back(b, lin);
        outer_rich.emplace_back(b, ric);
    }
    r.mitigated_linear = extrapolate(outer_lin, ExtrapolationMethod::linear());
    r.mitigated_richardson = extrapolate(outer_rich, ExtrapolationMethod::richardson(rich));
    r.mitigated = plan.method.kind == ExtrapolationMethod::Kind::Linear ? r.mitigated_linear : r.mitigated_richardson;
    return r;
}

nlohmann::json ZNEReport::to_json() const {
    nlohmann::json raw_j = nlohmann::json::array();
    for (const auto& p : raw) raw_j.push_back({{"b", p.b}, {"g", p.g}, {"x", p.x}, {"value", p.value}});
    return {{"raw", raw_j},
            {"inner_linear", inner_linear},
            {"inner_richardson", inner_richardson},
            {"mitigated_linear", mitigated_linear},
            {"mitigated_richardson", mitigated_richardson},
            {"mitigated", mitigated},
            {"ideal", ideal},
            {"best_raw", best_raw},
            {"richardson_order", richardson_order}};
}

}  // namespace daqc
