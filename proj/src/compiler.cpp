#include "daqc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "daqc/errors.hpp"

namespace daqc {

using std::numbers::pi;

// ------------------------------------------------------------ couplings

CouplingMatrix::CouplingMatrix(int n) : n_(n), g_(RMat::Zero(n, n)) {
    if (n < 1) throw TooFewQubits("coupling matrix needs at least one qubit");
}

CouplingMatrix CouplingMatrix::homogeneous(int n, double g) {
    CouplingMatrix c(n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) c.set(j, k, g);
    return c;
}

double CouplingMatrix::get(int j, int k) const {
    if (j < 0 || k < 0 || j >= n_ || k >= n_ || j == k) throw IndexError("coupling index out of range");
    return g_(j, k);
}

void CouplingMatrix::set(int j, int k, double v) {
    if (j < 0 || k < 0 || j >= n_ || k >= n_ || j == k) throw IndexError("coupling index out of range");
    if (!std::isfinite(v)) throw InvalidTarget("coupling must be finite");
    g_(j, k) = g_(k, j) = v;
}

bool CouplingMatrix::all_zero() const { return g_.cwiseAbs().maxCoeff() == 0.0; }

RVec CouplingMatrix::as_vector() const {
    RVec v(n_ * (n_ - 1) / 2);
    for (int j = 0; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k) v[vectorize_pair(j + 1, k + 1, n_) - 1] = g_(j, k);
    return v;
}

PauliHamiltonian CouplingMatrix::hamiltonian() const {
    PauliHamiltonian h(n_);
    for (int j = 0; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k)
            if (g_(j, k) != 0.0) h.add(g_(j, k), PauliString::pair(n_, 'Z', j, 'Z', k));
    return h;
}

// ------------------------------------------------------------ sign matrix

int vectorize_pair(int n, int m, int N) {
    if (N < 2 || n < 1 || m > N || n >= m) throw IndexError("pair indices must satisfy 1 <= n < m <= N");
    return N * (n - 1) - n * (n + 1) / 2 + m;
}

std::pair<int, int> unvectorize_pair(int alpha, int N) {
    const int K = N * (N - 1) / 2;
    if (N < 2 || alpha < 1 || alpha > K) throw IndexError("pair index out of range");
    // Row n holds alphas vectorize(n, n+1) .. vectorize(n, N).
    int n = 1;
    while (vectorize_pair(n, N, N) < alpha) ++n;
    const int m = alpha - (N * (n - 1) - n * (n + 1) / 2);
    return {n, m};
}

RMat sign_matrix(int N) {
    if (N < 2) throw TooFewQubits("sign matrix needs N >= 2");
    const int K = N * (N - 1) / 2;
    RMat m(K, K);
    for (int a = 1; a <= K; ++a) {
        const auto [n, mm] = unvectorize_pair(a, N);
        for (int b = 1; b <= K; ++b) {
            const auto [j, k] = unvectorize_pair(b, N);
            const int e = (n == j) + (n == k) + (mm == j) + (mm == k);
            m(a - 1, b - 1) = (e % 2) ? -1.0 : 1.0;
        }
    }
    return m;
}

double sign_matrix_lambda1(int N) { return N * (N - 9) / 2.0 + 8.0; }

NegativeTimeRepair fix_negative_times(const std::vector<double>& times, double lambda1, std::optional<double> period) {
    if (lambda1 == 0.0) throw SingularSignMatrix("lambda1 = 0 leaves the shift uncompensated");
    NegativeTimeRepair r;
    r.shifted = times;
    if (times.empty()) return r;
    const auto it = std::min_element(times.begin(), times.end());
    const double tmin = *it;
    if (tmin >= 0.0) return r;
    r.shift = -tmin;
    for (auto& t : r.shifted) t += r.shift;
    r.shifted[static_cast<size_t>(it - times.begin())] = 0.0;
    r.extra_block = lambda1 * tmin;
    r.extra_duration = r.extra_block;
    if (r.extra_block < 0.0 && period) {
        const double p = *period;
        if (!(p > 0.0)) throw InvalidTarget("wrap period must be positive");
        r.extra_duration = r.extra_block + std::ceil(-r.extra_block / p) * p;
        r.wrapped = true;
    }
    return r;
}

// ------------------------------------------------------------ Ising

CompilationResult compile_ising(const CouplingMatrix& target, double t_F, double g, const IsingOptions& opt) {
    const int N = target.qubit_count();
    if (N < 2) throw TooFewQubits("Ising synthesis needs at least two qubits");
    if (N == 4)
        throw SingularSignMatrix("N = 4: the sign matrix is singular; all-to-all targets need a modified rotation set");
    if (!(g > 0.0)) throw InvalidTarget("resource coupling g must be positive");
    if (!(t_F > 0.0)) throw InvalidTarget("target time t_F must be positive");

    CompilationResult res;
    res.schedule = Schedule(N, homogeneous_ising(N, g), opt.mode, opt.dt);
    const double s = opt.sign == ExpSign::Minus ? 1.0 : -1.0;
    const RVec rhs = s * target.as_vector() * (t_F / g);
    const int K = static_cast<int>(rhs.size());
    if (target.all_zero()) {
        res.analog_times.assign(static_cast<size_t>(K), 0.0);
        return res;
    }

    const RMat M = sign_matrix(N);
    const RVec t = M.partialPivLu().solve(rhs);
    const double resid = (M * t - rhs).norm();
    if (resid > 1e-10 * std::max(1.0, rhs.norm()))
        throw SynthesisResidualError("sign-matrix solve residual " + std::to_string(resid));
    res.analog_times.assign(t.data(), t.data() + K);

    std::vector<double> times = res.analog_times;
    double extra_signed = 0.0, extra_emit = 0.0;
    bool parity_flip = false;
    if (*std::min_element(times.begin(), times.end()) < 0.0) {
        const double period = opt.exact_phase ? 2.0 * pi / g : pi / (2.0 * g);
        const auto rep = fix_negative_times(times, sign_matrix_lambda1(N), period);
        times = rep.shifted;
        extra_signed = rep.extra_block;
        extra_emit = rep.extra_duration;
        if (rep.wrapped) {
            const auto k = std::llround((rep.extra_duration - rep.extra_block) / period);
            // exp(-i (pi/2) sum Z_j Z_k) is Z on every qubit for even N.
            parity_flip = !opt.exact_phase && N % 2 == 0 && k % 2 != 0;
            res.diagnostics.push_back(opt.exact_phase ? "negative extra block wrapped by the resource period 2 pi / g"
                                                      : "negative extra block wrapped by pi / (2g) up to a global phase");
        }
        res.repair = rep;
    }

    const Mat2 x = pauli2('X');
    for (int a = 1; a <= K; ++a) {
        const double ta = times[static_cast<size_t>(a - 1)];
        if (ta <= 0.0) continue;
        const auto [n, m] = unvectorize_pair(a, N);
        res.schedule.add_layer({{n - 1, x}, {m - 1, x}});
        res.schedule.add_analog(ta);
        res.schedule.add_layer({{n - 1, x}, {m - 1, x}});
    }
    res.schedule.add_analog(extra_emit);
    if (parity_flip) {
        std::vector<std::pair<int, Mat2>> zs;
        for (int q = 0; q < N; ++q) zs.emplace_back(q, pauli2('Z'));
        res.schedule.add_layer(zs);
    }
    res.block_count = res.schedule.analog_count();

    RVec tv = Eigen::Map<const RVec>(times.data(), K);
    const RVec eff = (M * tv).array() + extra_signed;
    res.synthesis_residual = (eff - rhs).norm() * g / t_F;
    return res;
}

// ------------------------------------------------------------ XZ

PauliHamiltonian XZCouplings::hamiltonian() const {
    static const char mu[4][2] = {{'X', 'X'}, {'X', 'Z'}, {'Z', 'X'}, {'Z', 'Z'}};
    PauliHamiltonian h(n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            for (int c = 0; c < 4; ++c) {
                const double v = this->c[c].get(j, k);
                if (v != 0.0) h.add(v, PauliString::pair(n, mu[c][0], j, mu[c][1], k));
            }
    return h;
}

double xz_default_phase(int s, int w) { return s * pi * w / (2.0 * (w + 1)); }

Mat2 xz_rotation(double theta) { return std::cos(theta / 2) * pauli2('Z') + std::sin(theta / 2) * pauli2('X'); }

XZDecomposition xz_decompose(const XZCouplings& target, const std::vector<std::vector<double>>& theta_in) {
    const int N = target.n;
    if (N < 2) throw TooFewQubits("XZ synthesis needs at least two qubits");
    XZDecomposition d;
    d.theta = theta_in;
    if (d.theta.empty()) {
        d.theta.assign(4, std::vector<double>(static_cast<size_t>(N)));
        for (int s = 0; s < 4; ++s)
            for (int q = 0; q < N; ++q) d.theta[s][q] = xz_default_phase(s + 1, q + 1);
    }
    if (d.theta.size() != 4) throw InvalidTarget("need four phase sets");
    for (const auto& row : d.theta)
        if (static_cast<int>(row.size()) != N) throw InvalidTarget("phase set size mismatch");

    d.g_s.assign(4, CouplingMatrix(N));
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) {
            Eigen::Matrix4d A;
            for (int s = 0; s < 4; ++s) {
                const double sj = std::sin(d.theta[s][j]), cj = std::cos(d.theta[s][j]);
                const double sk = std::sin(d.theta[s][k]), ck = std::cos(d.theta[s][k]);
                A(0, s) = sj * sk;
                A(1, s) = sj * ck;
                A(2, s) = cj * sk;
                A(3, s) = cj * ck;
            }
            Eigen::JacobiSVD<Eigen::Matrix4d> svd(A);
            const double smin = svd.singularValues()(3), smax = svd.singularValues()(0);
            if (smin <= 1e-10 * smax)
                throw SingularPhaseSystem("phase system for pair (" + std::to_string(j + 1) + "," +
                                          std::to_string(k + 1) + ") is singular");
            Eigen::Vector4d rhs(target.c[0].get(j, k), target.c[1].get(j, k), target.c[2].get(j, k),
                                target.c[3].get(j, k));
            const Eigen::Vector4d x = A.partialPivLu().solve(rhs);
            if ((A * x - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm()))
                throw SingularPhaseSystem("phase system solve residual too large");
            for (int s = 0; s < 4; ++s) d.g_s[s].set(j, k, x[s]);
        }

    PauliSum rec(N);
    for (int s = 0; s < 4; ++s)
        for (int j = 0; j < N; ++j)
            for (int k = j + 1; k < N; ++k) {
                const double v = d.g_s[s].get(j, k);
                if (v == 0.0) continue;
                const double sj = std::sin(d.theta[s][j]), cj = std::cos(d.theta[s][j]);
                const double sk = std::sin(d.theta[s][k]), ck = std::cos(d.theta[s][k]);
                rec.add(PauliString::pair(N, 'X', j, 'X', k), v * sj * sk);
                rec.add(PauliString::pair(N, 'X', j, 'Z', k), v * sj * ck);
                rec.add(PauliString::pair(N, 'Z', j, 'X', k), v * cj * sk);
                rec.add(PauliString::pair(N, 'Z', j, 'Z', k), v * cj * ck);
            }
    d.reconstructed = PauliHamiltonian::from_sum(rec.pruned(1e-15));
    d.residual = (rec - target.hamiltonian().to_sum()).frobenius_norm(true);
    return d;
}

CompilationResult compile_xz(const XZCouplings& target, double t_F, double g, int n_T, const IsingOptions& opt,
                             const std::vector<std::vector<double>>& theta) {
    if (n_T < 1) throw InvalidTarget("need at least one Trotter step");
    const int N = target.n;
    CompilationResult res;
    res.schedule = Schedule(N, homogeneous_ising(N, g), opt.mode, opt.dt);
    const double step = t_F / n_T;

    const bool pure_zz = target.c[0].all_zero() && target.c[1].all_zero() && target.c[2].all_zero();
    if (pure_zz) {
        const auto sub = compile_ising(target.c[3], step, g, opt);
        for (int r = 0; r < n_T; ++r) res.schedule.append(sub.schedule);
        res.analog_times = sub.analog_times;
        res.repair = sub.repair;
        res.synthesis_residual = sub.synthesis_residual;
        res.diagnostics.push_back("pure ZZ target: no rotation frames needed");
        res.block_count = res.schedule.analog_count();
        return res;
    }

    const auto dec = xz_decompose(target, theta);
    std::vector<CompilationResult> subs;
    std::vector<std::vector<std::pair<int, Mat2>>> frames;
    for (int s = 0; s < 4; ++s) {
        if (dec.g_s[s].all_zero()) continue;
        subs.push_back(compile_ising(dec.g_s[s], step, g, opt));
        std::vector<std::pair<int, Mat2>> f;
        for (int q = 0; q < N; ++q) f.emplace_back(q, xz_rotation(dec.theta[s][q]));
        frames.push_back(std::move(f));
        res.analog_times.insert(res.analog_times.end(), subs.back().analog_times.begin(),
                                subs.back().analog_times.end());
        if (subs.back().repair) res.repair = subs.back().repair;
    }
    for (int r = 0; r < n_T; ++r)
        for (size_t i = 0; i < subs.size(); ++i) {
            res.schedule.add_layer(frames[i]);
            res.schedule.append(subs[i].schedule);
            res.schedule.add_layer(frames[i]);
        }
    res.synthesis_residual = dec.residual;
    res.block_count = res.schedule.analog_count();
    return res;
}

// ------------------------------------------------------------ M-body

MBodyCount mbody_block_count(int M, int N) {
    if (M < 3) throw TooFewQubits("M-body counting needs M >= 3");
    if (N < M) throw TooFewQubits("need N >= M");
    MBodyCount c;
    const double p = std::pow(3.0, M - 1);
    c.a = 9.0 / 4.0 * (p - 3.0);
    c.b = p / 2.0 * (1.5 - M);
    c.value = c.a * N + c.b;
    c.integral = std::floor(c.a) == c.a && std::floor(c.b) == c.b;
    if (!c.integral)
        c.warnings.push_back("closed forms give non-integer coefficients a = " + std::to_string(c.a) +
                             ", b = " + std::to_string(c.b));
    if (M == 4) {
        c.quoted = 117.0 * N - 306.0;
        c.warnings.push_back("closed forms give 54N - 33.75 while the quoted count is 117N - 306");
    }
    return c;
}

std::vector<std::vector<double>> mbody_default_phases(int N) {
    std::vector<std::vector<double>> th(4, std::vector<double>(static_cast<size_t>(N)));
    for (int k = 0; k < 4; ++k)
        for (int site = 1; site <= N; ++site) {
            const int r = site % 4;
            th[k][site - 1] = (r == 1 || r == 2) ? 2.0 * pi * (k + 1) / 3.0 : 2.0 * pi * (k + 1) / 5.0;
        }
    return th;
}

MBodyBlocks build_mbody_hamiltonian_blocks(int N, const std::vector<std::vector<double>>& phases,
                                           const std::vector<double>& g1, const std::vector<double>& g2) {
    if (N < 4) throw TooFewQubits("M = 4 blocks need N >= 4");
    if (phases.empty()) throw InvalidTarget("need at least one phase set");
    for (const auto& p : phases)
        if (static_cast<int>(p.size()) != N) throw InvalidTarget("phase set size mismatch");
    auto chain = [&](const std::vector<double>& g) {
        if (!g.empty() && static_cast<int>(g.size()) != N - 1) throw InvalidTarget("need N - 1 bond couplings");
        PauliSum h(N);
        for (int j = 0; j + 1 < N; ++j) h.add(PauliString::pair(N, 'Z', j, 'Z', j + 1), g.empty() ? 1.0 : g[j]);
        return h;
    };
    const PauliSum hz1 = chain(g1), hz2 = chain(g2);
    MBodyBlocks out;
    for (const auto& th : phases) {
        // 0-based first sites: H1 bonds start at 1, 3, 5, ...; H2 at 0, 2, 4, ...
        PauliSum h1 = hz1, h2 = hz2;
        for (int j = 1; j + 1 < N; j += 2)
            h1 = conjugate_by_pauli_rotation(h1, PauliString::pair(N, 'X', j, 'X', j + 1), th[j]);
        for (int j = 0; j + 1 < N; j += 2)
            h2 = conjugate_by_pauli_rotation(h2, PauliString::pair(N, 'X', j, 'X', j + 1), th[j]);
        out.h1.push_back(PauliHamiltonian::from_sum(h1.pruned(1e-14)).simplified(1e-14));
        out.h2.push_back(PauliHamiltonian::from_sum(h2.pruned(1e-14)).simplified(1e-14));
    }
    return out;
}

// ------------------------------------------------------------ paths

std::vector<std::vector<int>> path_decomposition(int N) {
    if (N % 2 != 0) throw UnsupportedSize("path decomposition needs an even number of qubits");
    if (N < 4) throw UnsupportedSize("path decomposition needs N >= 4");
    std::vector<int> base(static_cast<size_t>(N));
    base[0] = 0;
    for (int i = 1; i < N; ++i) {
        const int step = (i % 2) ? i : -i;
        base[i] = ((base[i - 1] + step) % N + N) % N;
    }
    std::vector<std::vector<int>> paths;
    for (int r = 0; r < N / 2; ++r) {
        std::vector<int> p(static_cast<size_t>(N));
        for (int i = 0; i < N; ++i) p[i] = (base[i] + r) % N;
        paths.push_back(std::move(p));
    }
    return paths;
}

}  // namespace daqc
