#include "daqc/schedule.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "daqc/errors.hpp"

namespace daqc {

std::string to_string(Mode m) { return m == Mode::SDAQC ? "sdaqc" : "bdaqc"; }

Mode mode_from_string(const std::string& s) {
    if (s == "sdaqc" || s == "sDAQC") return Mode::SDAQC;
    if (s == "bdaqc" || s == "bDAQC") return Mode::BDAQC;
    throw ScheduleError("unknown schedule mode '" + s + "'");
}

namespace {

bool is_identity(const Mat2& u, double tol = 1e-14) {
    return (u - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string op_name(const Mat2& u) {
    static const char* names[] = {"X", "Y", "Z"};
    for (int a = 0; a < 3; ++a)
        if ((u - pauli2(names[a][0])).cwiseAbs().maxCoeff() < 1e-14) return names[a];
    Mat2 h;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    if ((u - h).cwiseAbs().maxCoeff() < 1e-14) return "H";
    std::string s = "[";
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (i || j) s += ",";
            s += fmt(u(i, j).real()) + (u(i, j).imag() < 0 ? "" : "+") + fmt(u(i, j).imag()) + "i";
        }
    return s + "]";
}

}  // namespace

std::vector<int> DigitalLayer::active() const {
    std::vector<int> a;
    for (int q = 0; q < static_cast<int>(ops.size()); ++q)
        if (!is_identity(ops[q])) a.push_back(q);
    return a;
}

Schedule::Schedule(int n, PauliHamiltonian resource, Mode mode, double dt)
    : n_(n), resource_(std::move(resource)), mode_(mode) {
    if (n < 1) throw ScheduleError("schedule needs at least one qubit");
    if (!resource_.empty() && resource_.qubit_count() != n)
        throw DimensionError("resource Hamiltonian size does not match schedule");
    if (resource_.empty()) resource_ = PauliHamiltonian(n);
    set_dt(dt);
}

void Schedule::set_dt(double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw ScheduleError("pulse duration must be non-negative");
    dt_ = dt;
}

void Schedule::add_layer(const std::vector<std::pair<int, Mat2>>& ops) {
    DigitalLayer l;
    l.ops.assign(static_cast<size_t>(n_), Mat2::Identity());
    for (const auto& [q, u] : ops) {
        if (q < 0 || q >= n_) throw ScheduleError("layer qubit out of range");
        if ((u.adjoint() * u - Mat2::Identity()).norm() > TOL_UNITARY)
            throw ScheduleError("layer operator is not unitary");
        l.ops[static_cast<size_t>(q)] = u * l.ops[static_cast<size_t>(q)];
    }
    add_layer(l);
}

void Schedule::add_layer(const DigitalLayer& layer) {
    if (static_cast<int>(layer.ops.size()) != n_) throw ScheduleError("layer size mismatch");
    DigitalLayer l = layer;
    if (!items_.empty()) {
        if (auto* prev = std::get_if<DigitalLayer>(&items_.back())) {
            for (int q = 0; q < n_; ++q) l.ops[q] = l.ops[q] * prev->ops[q];
            items_.pop_back();
        }
    }
    for (auto& u : l.ops)
        if (is_identity(u)) u = Mat2::Identity();
    if (l.active().empty()) return;
    items_.emplace_back(std::move(l));
}

void Schedule::add_analog(double t) {
    if (!std::isfinite(t) || t < 0.0) throw ScheduleError("analog durations must be non-negative");
    if (t == 0.0) return;
    if (!items_.empty())
        if (auto* prev = std::get_if<AnalogBlock>(&items_.back())) {
            prev->t += t;
            return;
        }
    items_.emplace_back(AnalogBlock{t});
}

void Schedule::add_gate(GateOp g) {
    for (int q : g.qubits)
        if (q < 0 || q >= n_) throw ScheduleError("gate qubit out of range");
    if (static_cast<std::uint64_t>(g.u.rows()) != dim_of(static_cast<int>(g.qubits.size())))
        throw ScheduleError("gate matrix size does not match its qubits");
    items_.emplace_back(std::move(g));
}

void Schedule::append(const Schedule& other) {
    if (other.n_ != n_) throw ScheduleError("cannot append schedules of different size");
    for (const auto& it : other.items_) {
        if (auto* l = std::get_if<DigitalLayer>(&it))
            add_layer(*l);
        else if (auto* a = std::get_if<AnalogBlock>(&it))
            add_analog(a->t);
        else
            add_gate(std::get<GateOp>(it));
    }
}

int Schedule::layer_count() const {
    int c = 0;
    for (const auto& it : items_) c += std::holds_alternative<DigitalLayer>(it);
    return c;
}

int Schedule::analog_count() const {
    int c = 0;
    for (const auto& it : items_) c += std::holds_alternative<AnalogBlock>(it);
    return c;
}

double Schedule::analog_time() const {
    double t = 0.0;
    for (const auto& it : items_)
        if (auto* a = std::get_if<AnalogBlock>(&it)) t += a->t;
    return t;
}

std::string Schedule::serialize() const {
    std::ostringstream os;
    os << "schedule n=" << n_ << " mode=" << to_string(mode_) << " dt=" << fmt(dt_) << "\n";
    os << "resource";
    for (const auto& t : resource_.terms()) os << " " << fmt(t.coeff) << "*" << t.str.str();
    os << "\n";
    for (const auto& it : items_) {
        if (auto* l = std::get_if<DigitalLayer>(&it)) {
            os << "layer";
            for (int q : l->active()) os << " " << op_name(l->ops[q]) << "@" << q;
            os << "\n";
        } else if (auto* a = std::get_if<AnalogBlock>(&it)) {
            os << "analog t=" << fmt(a->t) << "\n";
        } else {
            const auto& g = std::get<GateOp>(it);
            os << "gate " << g.label;
            for (int q : g.qubits) os << " " << q;
            os << "\n";
        }
    }
    return os.str();
}

PauliHamiltonian homogeneous_ising(int n, double g) {
    PauliHamiltonian h(n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) h.add(g, PauliString::pair(n, 'Z', j, 'Z', k));
    return h;
}

Mat2 layer_generator(const Mat2& u, double dt) {
    if (!(dt > 0.0)) throw ScheduleError("pulse duration must be positive to define a generator");
    const cplx u00 = u(0, 0);
    if ((u - u00 * Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-14)
        return Mat2::Identity() * (-std::arg(u00) / dt);
    Eigen::ComplexEigenSolver<Mat2> es(u);
    Mat2 v = es.eigenvectors();
    v.col(0).normalize();
    v.col(1).normalize();
    Mat2 d = Mat2::Zero();
    for (int i = 0; i < 2; ++i) d(i, i) = -std::arg(es.eigenvalues()[i]) / dt;
    Mat2 h = v * d * v.adjoint();
    return 0.5 * (h + h.adjoint());
}

PauliHamiltonian layer_hamiltonian(const DigitalLayer& layer, double dt) {
    const int n = static_cast<int>(layer.ops.size());
    PauliHamiltonian h(n);
    static const char ops[3] = {'X', 'Y', 'Z'};
    for (int q : layer.active()) {
        const Mat2 g = layer_generator(layer.ops[q], dt);
        for (char a : ops) {
            const double c = (pauli2(a) * g).trace().real() / 2.0;
            if (std::abs(c) > 1e-15) h.add(c, PauliString::single(n, a, q));
        }
        // Identity part only shifts the global phase; kept for exactness.
        const double c0 = g.trace().real() / 2.0;
        if (std::abs(c0) > 1e-15) h.add(c0, PauliString::identity(n));
    }
    return h;
}

Lowering lower(const Schedule& s) {
    Lowering low;
    const auto& items = s.items();
    const int m = static_cast<int>(items.size());
    std::vector<double> remaining(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i)
        if (auto* a = std::get_if<AnalogBlock>(&items[i])) remaining[i] = a->t;

    const bool banged = s.mode() == Mode::BDAQC;
    if (banged) {
        const double dt = s.dt();
        for (int i = 0; i < m; ++i) {
            if (!std::holds_alternative<DigitalLayer>(items[i])) continue;
            const bool left = i > 0 && std::holds_alternative<AnalogBlock>(items[i - 1]);
            const bool right = i + 1 < m && std::holds_alternative<AnalogBlock>(items[i + 1]);
            if (left && right) {
                remaining[i - 1] -= dt / 2;
                remaining[i + 1] -= dt / 2;
            } else if (left) {
                remaining[i - 1] -= dt;
            } else if (right) {
                remaining[i + 1] -= dt;
            } else {
                low.diagnostics.push_back("pulse at item " + std::to_string(i) +
                                          " has no adjacent analog time; interaction adds dt");
            }
        }
        for (int i = 0; i < m; ++i)
            if (remaining[i] < 0.0) {
                low.deficit += -remaining[i];
                low.diagnostics.push_back("analog block " + std::to_string(i) + " shorter than its pulses by " +
                                          fmt(-remaining[i]));
                remaining[i] = 0.0;
            }
    }

    for (int i = 0; i < m; ++i) {
        Step st;
        st.item = i;
        if (std::holds_alternative<DigitalLayer>(items[i])) {
            st.kind = Step::Kind::Pulse;
            st.duration = s.dt();
            st.resource_on = banged;
        } else if (std::holds_alternative<AnalogBlock>(items[i])) {
            st.kind = Step::Kind::Analog;
            st.duration = remaining[i];
        } else {
            st.kind = Step::Kind::Gate;
            st.duration = 0.0;
        }
        low.wall_time += st.duration;
        low.steps.push_back(st);
    }
    return low;
}

ScheduleRunner::ScheduleRunner(const Schedule& s)
    : s_(&s), low_(lower(s)), analog_(s.resource()), diag_resource_(s.resource().is_diagonal()) {}

ScheduleRunner::PulseKernel ScheduleRunner::build_pulse(const DigitalLayer& layer, bool resource_on,
                                                        const std::vector<double>* scales) const {
    const int n = s_->qubit_count();
    const double dt = s_->dt();
    PulseKernel k;
    k.active = layer.active();
    auto scale = [&](int q) { return scales ? (*scales)[static_cast<size_t>(q)] : 1.0; };

    if (!resource_on || s_->resource().empty()) {
        for (int q : k.active) {
            if (scale(q) == 1.0) {
                k.blocks.emplace_back(layer.ops[q]);
            } else {
                const Mat2 g = layer_generator(layer.ops[q], dt) * scale(q);
                k.blocks.push_back(expm_hermitian(g, dt));
            }
        }
        return k;
    }
    if (!(dt > 0.0)) throw ScheduleError("banged pulses need a positive dt");

    if (!diag_resource_) {
        Mat h = s_->resource().matrix();
        const auto hr = layer_hamiltonian(layer, dt);
        for (const auto& t : hr.terms()) {
            const int q = t.str.support().empty() ? -1 : t.str.support()[0];
            h += (q < 0 ? 1.0 : scale(q)) * t.coeff * pauli_matrix(t.str);
        }
        k.kind = PulseKernel::Kind::Full;
        k.blocks.push_back(expm_hermitian(h, dt));
        return k;
    }

    // Diagonal resource: block diagonal over assignments of the idle qubits.
    k.kind = PulseKernel::Kind::Context;
    const RVec diag = s_->resource().diagonal();
    const int a = static_cast<int>(k.active.size());
    const std::uint64_t sub = dim_of(a);
    Mat hloc = Mat::Zero(static_cast<Eigen::Index>(sub), static_cast<Eigen::Index>(sub));
    for (int j = 0; j < a; ++j) {
        const int q = k.active[j];
        const Mat2 g = layer_generator(layer.ops[q], dt) * scale(q);
        std::vector<Mat2> f(static_cast<size_t>(a), Mat2::Identity());
        f[static_cast<size_t>(j)] = g;
        hloc += kron_layer(f);
    }
    std::vector<std::uint64_t> offs(sub, 0);
    std::uint64_t mask = 0;
    for (int j = 0; j < a; ++j) mask |= std::uint64_t{1} << bit_of(n, k.active[j]);
    for (std::uint64_t l = 0; l < sub; ++l)
        for (int j = 0; j < a; ++j)
            if (l & (std::uint64_t{1} << (a - 1 - j))) offs[l] |= std::uint64_t{1} << bit_of(n, k.active[j]);
    for (std::uint64_t base = 0; base < dim_of(n); ++base) {
        if (base & mask) continue;
        Mat h = hloc;
        for (std::uint64_t l = 0; l < sub; ++l)
            h(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) += diag[static_cast<Eigen::Index>(base | offs[l])];
        k.blocks.push_back(expm_hermitian(h, dt));
    }
    return k;
}

void ScheduleRunner::apply_kernel(const PulseKernel& k, QuantumState& state) const {
    const int n = s_->qubit_count();
    if (k.kind == PulseKernel::Kind::Full) {
        apply_unitary(state, k.blocks[0]);
        return;
    }
    const int a = static_cast<int>(k.active.size());
    if (k.kind == PulseKernel::Kind::Local) {
        for (int j = 0; j < a; ++j) apply_unitary(state, k.blocks[j], {k.active[j]});
        return;
    }
    const std::uint64_t sub = dim_of(a);
    std::vector<std::uint64_t> offs(sub, 0);
    std::uint64_t mask = 0;
    for (int j = 0; j < a; ++j) mask |= std::uint64_t{1} << bit_of(n, k.active[j]);
    for (std::uint64_t l = 0; l < sub; ++l)
        for (int j = 0; j < a; ++j)
            if (l & (std::uint64_t{1} << (a - 1 - j))) offs[l] |= std::uint64_t{1} << bit_of(n, k.active[j]);

    auto apply_strided = [&](cplx* data, std::ptrdiff_t stride, bool conj) {
        std::vector<cplx> in(sub);
        size_t ctx = 0;
        for (std::uint64_t base = 0; base < dim_of(n); ++base) {
            if (base & mask) continue;
            const Mat& u = k.blocks[ctx++];
            for (std::uint64_t l = 0; l < sub; ++l) in[l] = data[static_cast<std::ptrdiff_t>(base | offs[l]) * stride];
            for (std::uint64_t r = 0; r < sub; ++r) {
                cplx acc = 0.0;
                for (std::uint64_t c = 0; c < sub; ++c) {
                    const cplx e = u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                    acc += (conj ? std::conj(e) : e) * in[c];
                }
                data[static_cast<std::ptrdiff_t>(base | offs[r]) * stride] = acc;
            }
        }
    };
    if (state.is_pure()) {
        apply_strided(state.vec_mut().data(), 1, false);
    } else {
        Mat& rho = state.rho_mut();
        const auto d = rho.rows();
        for (Eigen::Index c = 0; c < d; ++c) apply_strided(rho.data() + c * d, 1, false);
        for (Eigen::Index r = 0; r < d; ++r) apply_strided(rho.data() + r, d, true);
    }
}

void ScheduleRunner::run_pulse(const Step& st, QuantumState& state, const std::vector<double>* scales) {
    const auto& layer = std::get<DigitalLayer>(s_->items()[st.item]);
    if (scales) {
        apply_kernel(build_pulse(layer, st.resource_on, scales), state);
        return;
    }
    std::string key(1, st.resource_on ? 'b' : 's');
    for (int q : layer.active()) {
        key.append(reinterpret_cast<const char*>(&q), sizeof q);
        key.append(reinterpret_cast<const char*>(layer.ops[q].data()), sizeof(cplx) * 4);
    }
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(std::move(key), build_pulse(layer, st.resource_on, nullptr)).first;
    apply_kernel(it->second, state);
}

void ScheduleRunner::rebind(const Schedule& s) {
    if (s.qubit_count() != s_->qubit_count() || s.mode() != s_->mode() || s.dt() != s_->dt())
        throw ScheduleError("rebind needs a schedule with the same size, mode and dt");
    const auto a = s.resource().simplified().terms(), b = s_->resource().simplified().terms();
    bool same = a.size() == b.size();
    for (size_t i = 0; same && i < a.size(); ++i) same = a[i].coeff == b[i].coeff && a[i].str == b[i].str;
    if (!same) throw ScheduleError("rebind needs the same resource Hamiltonian");
    s_ = &s;
    low_ = lower(s);
}

void ScheduleRunner::run_analog(const Step& st, QuantumState& state, double offset) {
    analog_.apply(state, st.duration + offset);
}

void ScheduleRunner::run_gate(const Step& st, QuantumState& state) {
    const auto& g = std::get<GateOp>(s_->items()[st.item]);
    apply_unitary(state, g.u, g.qubits);
}

void ScheduleRunner::run(QuantumState& state) {
    if (state.qubit_count() != s_->qubit_count()) throw DimensionError("state size does not match schedule");
    for (const auto& st : low_.steps) {
        switch (st.kind) {
            case Step::Kind::Pulse: run_pulse(st, state); break;
            case Step::Kind::Analog: run_analog(st, state); break;
            case Step::Kind::Gate: run_gate(st, state); break;
        }
    }
}

QuantumState simulate_schedule(const Schedule& s, const QuantumState& psi0) {
    if (psi0.qubit_count() != s.qubit_count()) throw DimensionError("state size does not match schedule");
    QuantumState out = psi0;
    ScheduleRunner r(s);
    r.run(out);
    return out;
}

Mat schedule_unitary(const Schedule& s) {
    const int n = s.qubit_count();
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Mat u(d, d);
    ScheduleRunner r(s);
    for (Eigen::Index c = 0; c < d; ++c) {
        QuantumState st = QuantumState::basis(n, static_cast<std::uint64_t>(c));
        r.run(st);
        u.col(c) = st.vec();
    }
    return u;
}

double bang_error_estimate(const PauliHamiltonian& h_i, const PauliHamiltonian& h_r, double dt) {
    if (!(dt > 0.0)) throw ScheduleError("dt must be positive");
    const PauliSum a = h_i.to_sum(), b = h_r.to_sum();
    const PauliSum inner = commutator(a, b);
    const PauliSum outer = commutator(inner, a + b.scaled(2.0));
    return std::pow(dt, 3) / 4.0 * spectral_norm(outer);
}

double bang_boundary_estimate(const PauliHamiltonian& h_i, const PauliHamiltonian& h_r, double dt) {
    if (!(dt > 0.0)) throw ScheduleError("dt must be positive");
    return dt * dt / 2.0 * spectral_norm(commutator(h_i.to_sum(), h_r.to_sum()));
}

double bang_error_measured(const PauliHamiltonian& h_i, const PauliHamiltonian& h_r, double dt) {
    const Mat hi = h_i.matrix(), hr = h_r.matrix();
    const Mat sym = expm_hermitian(hi, dt / 2) * expm_hermitian(hr, dt) * expm_hermitian(hi, dt / 2);
    const Mat bang_inv = expm_hermitian(hi + hr, dt, ExpSign::Plus);
    const Mat e = Mat::Identity(hi.rows(), hi.cols()) - sym * bang_inv;
    return spectral_norm(e);
}

BangErrorReport total_bang_error(const Schedule& s) {
    if (s.mode() != Mode::BDAQC) throw WrongMode("bang error is defined for bDAQC schedules");
    BangErrorReport r;
    const auto& items = s.items();
    const int m = static_cast<int>(items.size());
    std::vector<double> boundary;
    for (int i = 0; i < m; ++i) {
        const auto* layer = std::get_if<DigitalLayer>(&items[i]);
        if (!layer) continue;
        const bool left = i > 0 && std::holds_alternative<AnalogBlock>(items[i - 1]);
        const bool right = i + 1 < m && std::holds_alternative<AnalogBlock>(items[i + 1]);
        PauliHamiltonian hr = layer_hamiltonian(*layer, s.dt());
        if (left && right) {
            r.per_step.push_back(bang_error_estimate(s.resource(), hr, s.dt()));
            ++r.interior;
        } else {
            boundary.push_back(bang_boundary_estimate(s.resource(), hr, s.dt()));
        }
    }
    if (!boundary.empty()) {
        r.e_first = boundary.front();
        r.e_last = boundary.size() > 1 ? boundary.back() : 0.0;
    }
    for (double e : r.per_step) r.total += e;
    for (double e : boundary) r.total += e;
    return r;
}

}  // namespace daqc
