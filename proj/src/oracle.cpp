#include "qcorr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcorr/errors.hpp"
#include "qcorr/quantifiers.hpp"

#include <complex>
#ifndef lapack_complex_double
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

namespace qcorr {

namespace {

constexpr std::uint32_t kTagCoupling = 1;   // shared / first-qubit W
constexpr std::uint32_t kTagCouplingB = 2;  // second-qubit W
constexpr std::uint32_t kTagSpectrum = 3;   // bath level draws

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const cplx kImag(0.0, 1.0);

std::mt19937_64 seeded_rng(std::uint64_t master, std::uint32_t draw,
                           std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(master),
                      static_cast<std::uint32_t>(master >> 32), draw, tag};
    return std::mt19937_64(seq);
}

// In-place Hermitian eigendecomposition; `a` is replaced by its eigenvector
// columns and `w` receives ascending eigenvalues.
void eigh_inplace(Eigen::MatrixXcd& a, Eigen::VectorXd& w) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    w.resize(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                           a.data(), n, w.data());
    if (info > 0)
        throw ConvergenceError("eigensolver failed to converge (info=" +
                               std::to_string(info) + ")");
    if (info < 0)
        throw std::logic_error("bad eigensolver argument " +
                               std::to_string(-info));
}

// Matrix, divide-and-conquer workspaces, and two time-batch buffers. The
// extra MiB covers the small fixed-size allocations around them.
std::size_t bytes_needed(int dim, int n_times) {
    const auto d = static_cast<std::size_t>(dim);
    return 48u * d * d + 32u * d * static_cast<std::size_t>(n_times) +
           (std::size_t(1) << 20);
}

void check_budget(const OracleParams& p, int dim, int n_times) {
    const std::size_t need = bytes_needed(dim, n_times);
    if (need > p.memory_limit_bytes)
        throw BudgetError("estimated workspace " + std::to_string(need) +
                          " bytes exceeds the limit of " +
                          std::to_string(p.memory_limit_bytes));
}

void validate_times(const std::vector<double>& times) {
    if (times.empty())
        throw ValidationError("time grid is empty");
    for (double t : times)
        if (!std::isfinite(t) || t < 0.0)
            throw ValidationError("time grid entries must be finite and >= 0");
}

std::vector<double> resolve_env(const DensityOfStates& dos,
                                const OracleParams& p) {
    if (p.n < 2) throw ValidationError("need at least 2 environment levels");
    if (p.env_levels) {
        if (static_cast<int>(p.env_levels->size()) != p.n)
            throw ValidationError("explicit level list length differs from n");
        std::vector<double> env = *p.env_levels;
        for (double e : env)
            if (!std::isfinite(e))
                throw ValidationError("environment levels must be finite");
        std::sort(env.begin(), env.end());
        return env;
    }
    return sample_env_spectrum(dos, p.n, p.seed);
}

struct PureComponent {
    double weight;
    Eigen::Vector4cd c;
};

std::vector<PureComponent> decompose(const XState& rho0) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho0.matrix());
    std::vector<PureComponent> out;
    for (int i = 0; i < 4; ++i) {
        const double w = es.eigenvalues()(i);
        if (w > 1e-14) out.push_back({w, es.eigenvectors().col(i)});
    }
    return out;
}

// Eigenbasis amplitudes of a state supported on bath level k0 only:
// (U^dag psi0)_k picks up one row of U per occupied system slot.
Eigen::VectorXcd sparse_amps(const Eigen::MatrixXcd& u, int n, int k0,
                             const Eigen::VectorXcd& slot_coeffs) {
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(u.rows());
    for (int s = 0; s < slot_coeffs.size(); ++s)
        amps += u.row(s * n + k0).adjoint() * slot_coeffs(s);
    return amps;
}

// Columns hold e^{-i lam t} amps for each requested time.
Eigen::MatrixXcd phase_batch(const Eigen::VectorXd& lam,
                             const Eigen::VectorXcd& amps,
                             const std::vector<double>& times) {
    Eigen::MatrixXcd b(lam.size(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t it = 0; it < times.size(); ++it)
        b.col(static_cast<Eigen::Index>(it)) =
            ((lam.array() * -times[it]).cast<cplx>() * kImag).exp() *
            amps.array();
    return b;
}

// Gram matrix of the four system amplitude vectors:
// rho[a][b] = sum_j A_a[j] conj(A_b[j]).
Mat4 gram_state(const Eigen::MatrixXcd& a) {
    return a.transpose() * a.conjugate();
}

struct WelfordAccum {
    Mat4 mean = Mat4::Zero();
    Eigen::Matrix4d m2 = Eigen::Matrix4d::Zero();

    void update(int k, const Mat4& x) {
        const Mat4 delta = x - mean;
        mean += delta / static_cast<double>(k);
        const Mat4 delta2 = x - mean;
        m2 += delta.conjugate().cwiseProduct(delta2).real();
    }
};

using DrawStates = std::vector<Mat4>;  // one reduced state per time

DrawStates common_draw(const std::vector<double>& env,
                       const std::vector<PureComponent>& comps,
                       const OracleParams& p, int draw) {
    const int n = p.n;
    auto rng = seeded_rng(p.seed, static_cast<std::uint32_t>(draw),
                          kTagCoupling);
    Eigen::MatrixXcd u =
        build_triplet_hamiltonian(env, sample_gue(n, rng), p.s, p.v);
    Eigen::VectorXd lam;
    eigh_inplace(u, lam);

    const int k0 = nearest_level_index(env, p.env_energy);
    const std::size_t nt = p.times.size();
    DrawStates rho(nt, Mat4::Zero());
    Eigen::MatrixXcd sys(n, 4);
    for (const auto& comp : comps) {
        Eigen::Vector3cd slot;
        slot << comp.c(0), (comp.c(1) + comp.c(2)) * kInvSqrt2, comp.c(3);
        const cplx singlet = (comp.c(1) - comp.c(2)) * kInvSqrt2;
        const Eigen::MatrixXcd psi =
            u * phase_batch(lam, sparse_amps(u, n, k0, slot), p.times);
        for (std::size_t it = 0; it < nt; ++it) {
            const auto col = psi.col(static_cast<Eigen::Index>(it));
            sys.col(0) = col.segment(0, n);
            sys.col(1) = col.segment(n, n) * kInvSqrt2;
            sys.col(2) = sys.col(1);
            sys.col(3) = col.segment(2 * n, n);
            // The antisymmetric amplitude rides on level k0 with a bare
            // phase; it enters the middle slots with opposite signs.
            const cplx sig = singlet *
                             std::exp(-kImag * env[k0] * p.times[it]) *
                             kInvSqrt2;
            sys(k0, 1) += sig;
            sys(k0, 2) -= sig;
            rho[it] += comp.weight * gram_state(sys);
        }
    }
    return rho;
}

DrawStates free_ancilla_draw(const std::vector<double>& env,
                             const std::vector<PureComponent>& comps,
                             const OracleParams& p, int draw) {
    const int n = p.n;
    auto rng = seeded_rng(p.seed, static_cast<std::uint32_t>(draw),
                          kTagCoupling);
    Eigen::MatrixXcd u = build_hamiltonian(EnvModel::independent, env,
                                           sample_gue(n, rng), p.s, p.v);
    Eigen::VectorXd lam;
    eigh_inplace(u, lam);

    const int k0 = nearest_level_index(env, p.env_energy);
    const std::size_t nt = p.times.size();
    DrawStates rho(nt, Mat4::Zero());
    for (const auto& comp : comps) {
        // chi_a(t) = U_BE(t) (c_{a0}|0,k0> + c_{a1}|1,k0>) for the free
        // qubit's basis label a; it only adds the phase e^{-i s z_a t}.
        std::array<Eigen::MatrixXcd, 2> chi;
        for (int a = 0; a < 2; ++a) {
            Eigen::Vector2cd slot;
            slot << comp.c(2 * a), comp.c(2 * a + 1);
            chi[a] = u * phase_batch(lam, sparse_amps(u, n, k0, slot),
                                     p.times);
        }
        for (std::size_t it = 0; it < nt; ++it) {
            const double t = p.times[it];
            Mat4 r = Mat4::Zero();
            for (int a = 0; a < 2; ++a)
                for (int ap = 0; ap < 2; ++ap) {
                    const cplx phase = std::exp(
                        -kImag * p.s * static_cast<double>((ap - a) * 2) * t);
                    // z_a = 1 - 2a, so z_a - z_ap = 2(ap - a).
                    for (int b = 0; b < 2; ++b)
                        for (int bp = 0; bp < 2; ++bp) {
                            const cplx val =
                                chi[ap]
                                    .col(static_cast<Eigen::Index>(it))
                                    .segment(bp * n, n)
                                    .dot(chi[a]
                                             .col(static_cast<Eigen::Index>(
                                                 it))
                                             .segment(b * n, n));
                            r(2 * a + b, 2 * ap + bp) += phase * val;
                        }
                }
            rho[it] += comp.weight * r;
        }
    }
    return rho;
}

// T[x'][y'][x][y] = sum_j K_x[x' n + j] conj(K_y[y' n + j]) for the 2n
// propagator columns K_a = U(t)|a, k0>; composing the two qubits' tensors
// pushes any initial two-qubit state through independent baths.
using TransferTensor = std::array<std::array<Eigen::Matrix2cd, 2>, 2>;

TransferTensor transfer_at(const Eigen::MatrixXcd& k_cols, int n) {
    TransferTensor t;
    for (int xp = 0; xp < 2; ++xp)
        for (int yp = 0; yp < 2; ++yp)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    t[xp][yp](x, y) = k_cols.col(y)
                                          .segment(yp * n, n)
                                          .dot(k_cols.col(x).segment(xp * n, n));
    return t;
}

DrawStates independent_draw(const std::vector<double>& env, const Mat4& rho0,
                            const OracleParams& p, int draw) {
    const int n = p.n;
    const int k0 = nearest_level_index(env, p.env_energy);
    const std::size_t nt = p.times.size();
    const double va = p.v_a.value_or(p.v), vb = p.v_b.value_or(p.v);

    // Per-qubit propagator columns for both basis starts, all times.
    std::array<std::vector<Eigen::MatrixXcd>, 2> cols;  // [qubit][time]
    for (int q = 0; q < 2; ++q) {
        auto rng = seeded_rng(p.seed, static_cast<std::uint32_t>(draw),
                              q == 0 ? kTagCoupling : kTagCouplingB);
        Eigen::MatrixXcd u =
            build_hamiltonian(EnvModel::independent, env, sample_gue(n, rng),
                              p.s, q == 0 ? va : vb);
        Eigen::VectorXd lam;
        eigh_inplace(u, lam);
        std::array<Eigen::MatrixXcd, 2> k_all;
        for (int a = 0; a < 2; ++a) {
            Eigen::Vector2cd slot = Eigen::Vector2cd::Zero();
            slot(a) = 1.0;
            k_all[a] = u * phase_batch(lam, sparse_amps(u, n, k0, slot),
                                       p.times);
        }
        cols[q].resize(nt);
        for (std::size_t it = 0; it < nt; ++it) {
            Eigen::MatrixXcd k(2 * n, 2);
            k.col(0) = k_all[0].col(static_cast<Eigen::Index>(it));
            k.col(1) = k_all[1].col(static_cast<Eigen::Index>(it));
            cols[q][it] = std::move(k);
        }
    }

    DrawStates rho(nt, Mat4::Zero());
    for (std::size_t it = 0; it < nt; ++it) {
        const TransferTensor ta = transfer_at(cols[0][it], n);
        const TransferTensor tb = transfer_at(cols[1][it], n);
        Mat4 r = Mat4::Zero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d) {
                        const cplx in = rho0(2 * a + b, 2 * c + d);
                        if (in == cplx(0.0)) continue;
                        for (int ap = 0; ap < 2; ++ap)
                            for (int cp = 0; cp < 2; ++cp)
                                for (int bp = 0; bp < 2; ++bp)
                                    for (int dp = 0; dp < 2; ++dp)
                                        r(2 * ap + bp, 2 * cp + dp) +=
                                            ta[ap][cp](a, c) *
                                            tb[bp][dp](b, d) * in;
                    }
        rho[it] = r;
    }
    return rho;
}

} // namespace

const char* env_model_name(EnvModel m) {
    switch (m) {
        case EnvModel::common: return "common";
        case EnvModel::independent: return "independent";
        case EnvModel::free_ancilla: return "free-ancilla";
    }
    return "unknown";
}

EnvModel parse_env_model(std::string_view name) {
    if (name == "common") return EnvModel::common;
    if (name == "independent") return EnvModel::independent;
    if (name == "free-ancilla" || name == "free_ancilla")
        return EnvModel::free_ancilla;
    throw ValidationError("unknown environment model '" + std::string(name) +
                          "'");
}

Eigen::MatrixXcd sample_gue(int n, std::mt19937_64& rng) {
    if (n < 1) throw ValidationError("matrix dimension must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd w(n, n);
    const double off = 1.0 / std::sqrt(2.0 * n);
    const double diag = std::sqrt(2.0 / n);
    for (int j = 0; j < n; ++j) w(j, j) = gauss(rng) * diag;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const double x = gauss(rng), y = gauss(rng);
            w(j, k) = cplx(x, y) * off;
            w(k, j) = std::conj(w(j, k));
        }
    return w;
}

Eigen::MatrixXcd sample_gue(int n, std::uint64_t seed) {
    auto rng = seeded_rng(seed, 0, kTagCoupling);
    return sample_gue(n, rng);
}

std::vector<double> sample_env_spectrum(const DensityOfStates& dos, int n,
                                        std::uint64_t master_seed) {
    if (n < 1) throw ValidationError("need a positive level count");
    auto rng = seeded_rng(master_seed, 0, kTagSpectrum);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> env(static_cast<std::size_t>(n));
    for (auto& e : env) {
        const double u =
            std::clamp(unif(rng), 1e-12, 1.0 - 1e-12);  // keep tan finite
        e = dos.sample(u);
    }
    std::sort(env.begin(), env.end());
    return env;
}

int nearest_level_index(const std::vector<double>& env, double e) {
    if (env.empty()) throw ValidationError("empty level list");
    const auto it = std::lower_bound(env.begin(), env.end(), e);
    if (it == env.begin()) return 0;
    if (it == env.end()) return static_cast<int>(env.size()) - 1;
    const auto idx = static_cast<int>(it - env.begin());
    // <= keeps the lower index on an exact distance tie.
    return (e - env[idx - 1] <= env[idx] - e) ? idx - 1 : idx;
}

Eigen::MatrixXcd build_hamiltonian(EnvModel model,
                                   const std::vector<double>& env,
                                   const Eigen::MatrixXcd& w, double s,
                                   double v) {
    const int n = static_cast<int>(env.size());
    if (w.rows() != n || w.cols() != n)
        throw ValidationError("coupling matrix size differs from level count");

    const Eigen::VectorXcd ediag =
        Eigen::Map<const Eigen::VectorXd>(env.data(), n).cast<cplx>();
    const auto place = [&](Eigen::MatrixXcd& h, int a, int b, double sys,
                           bool with_w) {
        if (with_w)
            h.block(a * n, b * n, n, n) += cplx(sys) * w;
        else
            h.block(a * n, b * n, n, n).diagonal().array() += cplx(sys);
    };

    if (model == EnvModel::independent) {
        // Single-qubit block: splitting s on the qubit, bath levels, and a
        // flip-coupled bath operator.
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
        place(h, 0, 0, s, false);
        place(h, 1, 1, -s, false);
        h.block(0, 0, n, n).diagonal() += ediag;
        h.block(n, n, n, n).diagonal() += ediag;
        place(h, 0, 1, v, true);
        place(h, 1, 0, v, true);
        return h;
    }

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
    const double zsum[4] = {2.0, 0.0, 0.0, -2.0};
    for (int a = 0; a < 4; ++a) {
        place(h, a, a, s * zsum[a], false);
        h.block(a * n, a * n, n, n).diagonal() += ediag;
    }
    if (model == EnvModel::common) {
        // Collective flip: every single spin-flip pair couples through the
        // same bath operator.
        const int pairs[4][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
        for (const auto& pr : pairs) {
            place(h, pr[0], pr[1], v, true);
            place(h, pr[1], pr[0], v, true);
        }
    } else {  // free_ancilla: only the second qubit flips
        const int pairs[2][2] = {{0, 1}, {2, 3}};
        for (const auto& pr : pairs) {
            place(h, pr[0], pr[1], v, true);
            place(h, pr[1], pr[0], v, true);
        }
    }
    return h;
}

Eigen::MatrixXcd build_triplet_hamiltonian(const std::vector<double>& env,
                                           const Eigen::MatrixXcd& w, double s,
                                           double v) {
    const int n = static_cast<int>(env.size());
    if (w.rows() != n || w.cols() != n)
        throw ValidationError("coupling matrix size differs from level count");
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3 * n, 3 * n);
    const Eigen::VectorXcd ediag =
        Eigen::Map<const Eigen::VectorXd>(env.data(), n).cast<cplx>();
    const double zsum[3] = {2.0, 0.0, -2.0};
    for (int a = 0; a < 3; ++a) {
        h.block(a * n, a * n, n, n).diagonal().array() += cplx(s * zsum[a]);
        h.block(a * n, a * n, n, n).diagonal() += ediag;
    }
    const cplx amp = std::numbers::sqrt2 * v;
    h.block(0, n, n, n) = amp * w;
    h.block(n, 0, n, n) = amp * w;
    h.block(n, 2 * n, n, n) = amp * w;
    h.block(2 * n, n, n, n) = amp * w;
    return h;
}

Mat4 reduced_state(const Eigen::VectorXcd& psi) {
    if (psi.size() % 4 != 0)
        throw ValidationError("state length is not a multiple of 4");
    const int n = static_cast<int>(psi.size() / 4);
    Eigen::MatrixXcd sys(n, 4);
    for (int a = 0; a < 4; ++a) sys.col(a) = psi.segment(a * n, n);
    return gram_state(sys);
}

Mat4 to_interaction_picture(const Mat4& rho_lab, double s, double t) {
    Eigen::Vector4cd p;
    p << std::exp(kImag * 2.0 * s * t), 1.0, 1.0, std::exp(-kImag * 2.0 * s * t);
    return p.asDiagonal() * rho_lab * p.conjugate().asDiagonal();
}

XState sanitize_xstate(const Mat4& m) {
    const Mat4 herm = 0.5 * (m + m.adjoint());
    const Mat4 xp = x_projection(herm);
    double d[4] = {std::max(0.0, xp(0, 0).real()),
                   std::max(0.0, xp(1, 1).real()),
                   std::max(0.0, xp(2, 2).real()),
                   std::max(0.0, xp(3, 3).real())};
    const double tr = d[0] + d[1] + d[2] + d[3];
    if (!(tr > 0.0)) throw ValidationError("sampled mean has no weight left");
    for (auto& x : d) x /= tr;
    const auto cap = [](cplx c, double bound) {
        const double a = std::abs(c);
        return (a > bound && a > 0.0) ? c * (bound / a) : c;
    };
    const cplx r14 = cap(xp(0, 3) / tr, std::sqrt(d[0] * d[3]));
    const cplx r23 = cap(xp(1, 2) / tr, std::sqrt(d[1] * d[2]));
    Mat4 fixed = Mat4::Zero();
    fixed(0, 0) = d[0];
    fixed(1, 1) = d[1];
    fixed(2, 2) = d[2];
    fixed(3, 3) = d[3];
    fixed(0, 3) = r14;
    fixed(3, 0) = std::conj(r14);
    fixed(1, 2) = r23;
    fixed(2, 1) = std::conj(r23);
    return XState::from_matrix(fixed, 1e-9);
}

OracleResult ensemble(const DensityOfStates& dos, const XState& rho0,
                      const OracleParams& p) {
    validate_times(p.times);
    if (p.draws < 1) throw ValidationError("need at least one draw");
    if (p.model != EnvModel::independent && (p.v_a || p.v_b))
        throw ValidationError(
            "per-qubit couplings only apply to independent baths");
    const std::vector<double> env = resolve_env(dos, p);
    const int dim = p.model == EnvModel::common ? 3 * p.n : 2 * p.n;
    check_budget(p, dim, static_cast<int>(p.times.size()));

    const std::vector<PureComponent> comps = decompose(rho0);
    const Mat4 rho0m = rho0.matrix();

    std::vector<WelfordAccum> acc(p.times.size());
    std::vector<double> viol(p.times.size(), 0.0);
    for (int draw = 0; draw < p.draws; ++draw) {
        DrawStates states;
        switch (p.model) {
            case EnvModel::common:
                states = common_draw(env, comps, p, draw);
                break;
            case EnvModel::free_ancilla:
                states = free_ancilla_draw(env, comps, p, draw);
                break;
            case EnvModel::independent:
                states = independent_draw(env, rho0m, p, draw);
                break;
        }
        for (std::size_t it = 0; it < states.size(); ++it) {
            acc[it].update(draw + 1, states[it]);
            viol[it] = std::max(viol[it], x_violation(states[it]));
        }
    }

    OracleResult out;
    out.times = p.times;
    out.draws = p.draws;
    out.draw_x_violation = std::move(viol);
    out.mean.reserve(acc.size());
    out.variance.reserve(acc.size());
    out.std_error.reserve(acc.size());
    for (const auto& a : acc) {
        out.mean.push_back(a.mean);
        Eigen::Matrix4d var = Eigen::Matrix4d::Zero();
        if (p.draws > 1) var = a.m2 / static_cast<double>(p.draws - 1);
        out.variance.push_back(var);
        out.std_error.push_back(
            (var / static_cast<double>(p.draws)).cwiseSqrt());
    }
    return out;
}

const std::array<const char*, 10>& compare_labels() {
    static const std::array<const char*, 10> labels = {
        "r11",         "r44",     "a1",      "a2",      "abs_r14",
        "abs_a3",      "negativity", "concurrence", "discord", "entropy"};
    return labels;
}

std::vector<CompareRow> bvh_compare(const OracleResult& mc,
                                    const XState& rho0,
                                    const CommonEnvChannel& channel, double s,
                                    double v) {
    const auto observables = [](const XState& st) {
        const BlockCoords bc = st.block_coords();
        const QuantifierReport q = report(st);
        return std::array<double, 10>{
            st.r11(),     st.r44(),      bc.a1,     bc.a2,    std::abs(st.r14()),
            std::abs(bc.a3), q.negativity, q.concurrence, q.discord, q.entropy};
    };
    std::vector<CompareRow> rows;
    rows.reserve(mc.times.size());
    for (std::size_t it = 0; it < mc.times.size(); ++it) {
        CompareRow row;
        row.t = mc.times[it];
        row.tau = v * v * row.t;
        const Mat4 rot = to_interaction_picture(mc.mean[it], s, row.t);
        row.mean_x_violation = x_violation(0.5 * (rot + rot.adjoint()));
        row.sampled_value = observables(sanitize_xstate(rot));
        row.channel_value = observables(channel.evolve(rho0, row.tau));
        for (int i = 0; i < 10; ++i)
            row.deviation[i] =
                std::abs(row.channel_value[i] - row.sampled_value[i]);
        rows.push_back(row);
    }
    return rows;
}

ResolventTraces mean_block_resolvent_traces(const DensityOfStates& dos,
                                            const OracleParams& p, cplx z) {
    if (z.imag() == 0.0)
        throw ValidationError("resolvent trace needs Im z != 0");
    if (p.draws < 1) throw ValidationError("need at least one draw");
    const std::vector<double> env = resolve_env(dos, p);
    check_budget(p, 3 * p.n, 1);
    const int n = p.n;

    ResolventTraces out;
    out.draws = p.draws;
    for (int draw = 0; draw < p.draws; ++draw) {
        auto rng = seeded_rng(p.seed, static_cast<std::uint32_t>(draw),
                              kTagCoupling);
        Eigen::MatrixXcd u =
            build_triplet_hamiltonian(env, sample_gue(n, rng), p.s, p.v);
        Eigen::VectorXd lam;
        eigh_inplace(u, lam);
        cplx gp = 0.0, gm = 0.0;
        for (int k = 0; k < 3 * n; ++k) {
            // Symmetric-sector weight from slots 1 and 3, antisymmetric-like
            // weight from the middle slot.
            const double wp =
                0.5 * (u.col(k).segment(0, n) + u.col(k).segment(2 * n, n))
                          .squaredNorm();
            const double wm = u.col(k).segment(n, n).squaredNorm();
            const cplx pole = 1.0 / (lam(k) - z);
            gp += wp * pole;
            gm += wm * pole;
        }
        out.g_plus += 2.0 * gp / static_cast<double>(n);
        out.g_minus += 2.0 * gm / static_cast<double>(n);
    }
    out.g_plus /= static_cast<double>(p.draws);
    out.g_minus /= static_cast<double>(p.draws);
    return out;
}

} // namespace qcorr
