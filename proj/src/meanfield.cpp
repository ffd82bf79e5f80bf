#include "qcorr/meanfield.hpp"

#include <cmath>
#include <numbers>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

double gap_of(KernelForm form, double s, int eta) {
    if (form == KernelForm::uniform_gap || eta > 0) return 4.0 * s * s;
    return 0.0;
}

void check_imag(cplx z, double floor) {
    if (std::abs(z.imag()) < floor)
        throw ValidationError("Im z below the conditioning floor " +
                              std::to_string(floor));
}

cplx seed_v0(const DensityOfStates& dos, cplx z, double gap) {
    return kernel_integral(dos, z, 0.0, gap);
}

struct Equations {
    const DensityOfStates& dos;
    double s, v;
    cplx z;
    KernelForm form;

    std::pair<cplx, cplx> apply(cplx gp, cplx gm) const {
        const cplx v2 = v * v;
        return {kernel_integral(dos, z, v2 * gm, gap_of(form, s, +1)),
                kernel_integral(dos, z, v2 * gp, gap_of(form, s, -1))};
    }
};

void check_herglotz(const ResolventSample& r) {
    const double sgn = r.z.imag() > 0.0 ? 1.0 : -1.0;
    if (!(r.g_plus.imag() * sgn > 0.0) || !(r.g_minus.imag() * sgn > 0.0))
        throw ConvergenceError(
            "resolvent pair left the admissible class (Im g sign)");
}

ResolventSample finish(ResolventSample r, const Equations& eq,
                       const SolverOptions& opt) {
    const auto [kp, km] = eq.apply(r.g_plus, r.g_minus);
    r.residual = std::max(std::abs(r.g_plus - kp), std::abs(r.g_minus - km));
    if (!(r.residual <= opt.residual_tol))
        throw ConvergenceError("fixed-point residual " +
                               std::to_string(r.residual) +
                               " above the acceptance bound");
    check_herglotz(r);
    return r;
}

} // namespace

cplx kernel_integral(const DensityOfStates& dos, cplx z, cplx a, double gap) {
    const cplx w = z + a;
    if (gap == 0.0) {
        // The numerator 2 (E - z) cancels the (E - z) factor of the
        // denominator exactly, leaving a single shifted Stieltjes transform.
        return 2.0 * dos.stieltjes(z + 2.0 * a);
    }
    const cplx r = std::sqrt(cplx(gap, 0.0) + a * a);
    if (std::abs(r) < 1e-12)
        throw ConvergenceError("kernel denominator degenerates (R ~ 0)");
    const cplx up = w + r, dn = w - r;
    if (up.imag() == 0.0 || dn.imag() == 0.0)
        throw ConvergenceError("kernel pole reached the real axis");
    return ((r + a) * dos.stieltjes(up) + (r - a) * dos.stieltjes(dn)) / r;
}

ResolventSample solve_selfconsistent(const DensityOfStates& dos, double s,
                                     double v, cplx z,
                                     const SolverOptions& opt) {
    check_imag(z, opt.min_imag);
    const Equations eq{dos, s, v, z, opt.form};
    ResolventSample r;
    r.z = z;
    r.s = s;
    r.v = v;
    r.form = opt.form;
    r.g_plus = seed_v0(dos, z, gap_of(opt.form, s, +1));
    r.g_minus = seed_v0(dos, z, gap_of(opt.form, s, -1));
    const double d = opt.damping;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const auto [kp, km] = eq.apply(r.g_plus, r.g_minus);
        const cplx np = (1.0 - d) * r.g_plus + d * kp;
        const cplx nm = (1.0 - d) * r.g_minus + d * km;
        const double step =
            std::max(std::abs(np - r.g_plus), std::abs(nm - r.g_minus));
        r.g_plus = np;
        r.g_minus = nm;
        r.iterations = it;
        if (step < opt.step_tol) return finish(r, eq, opt);
    }
    throw ConvergenceError("fixed-point iteration exhausted " +
                           std::to_string(opt.max_iter) + " iterations");
}

ResolventSample solve_newton(const DensityOfStates& dos, double s, double v,
                             cplx z, const SolverOptions& opt) {
    check_imag(z, opt.min_imag);
    const Equations eq{dos, s, v, z, opt.form};
    Eigen::Vector4d x;
    {
        const cplx gp = seed_v0(dos, z, gap_of(opt.form, s, +1));
        const cplx gm = seed_v0(dos, z, gap_of(opt.form, s, -1));
        x << gp.real(), gp.imag(), gm.real(), gm.imag();
    }
    const auto resid = [&](const Eigen::Vector4d& y) {
        const cplx gp(y(0), y(1)), gm(y(2), y(3));
        const auto [kp, km] = eq.apply(gp, gm);
        Eigen::Vector4d f;
        f << (gp - kp).real(), (gp - kp).imag(), (gm - km).real(),
            (gm - km).imag();
        return f;
    };
    Eigen::Vector4d f = resid(x);
    int it = 0;
    for (; it < 200 && f.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
        Eigen::Matrix4d jac;
        for (int c = 0; c < 4; ++c) {
            Eigen::Vector4d xp = x;
            const double h = 1e-7 * (1.0 + std::abs(x(c)));
            xp(c) += h;
            jac.col(c) = (resid(xp) - f) / h;
        }
        Eigen::Vector4d step = jac.fullPivLu().solve(-f);
        double lam = 1.0;
        const double f0 = f.norm();
        for (int bt = 0; bt < 30; ++bt) {
            const Eigen::Vector4d xn = x + lam * step;
            const Eigen::Vector4d fn = resid(xn);
            if (fn.norm() < f0) {
                x = xn;
                f = fn;
                break;
            }
            lam *= 0.5;
            if (bt == 29)
                throw ConvergenceError(
                    "root finder stalled: no descent along the Newton step");
        }
    }
    if (f.lpNorm<Eigen::Infinity>() > 1e-13)
        throw ConvergenceError("root finder did not reach tolerance");
    ResolventSample r;
    r.z = z;
    r.s = s;
    r.v = v;
    r.form = opt.form;
    r.g_plus = cplx(x(0), x(1));
    r.g_minus = cplx(x(2), x(3));
    r.iterations = it;
    return finish(r, eq, opt);
}

std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> block_resolvent(
    const ResolventSample& sample, double e) {
    using M2 = Eigen::Matrix2cd;
    const M2 sx = (M2() << 0, 1, 1, 0).finished();
    const M2 sz = (M2() << 1, 0, 0, -1).finished();
    std::pair<M2, M2> out;
    for (int eta : {+1, -1}) {
        const cplx zeta =
            eta > 0 ? sample.zeta_minus() : sample.zeta_plus();  // Z^(-eta)
        const double gap = gap_of(sample.form, sample.s, eta);
        const cplx den =
            e * e - sample.z * sample.z - gap - 2.0 * (e - sample.z) * zeta;
        if (std::abs(den) < 1e-14)
            throw ConvergenceError("block resolvent denominator vanishes");
        M2 num = e * M2::Identity() - sample.z * sx -
                 sample.s * (1.0 + eta) * sz - zeta * (M2::Identity() - sx);
        (eta > 0 ? out.first : out.second) = num / den;
    }
    return out;
}

std::vector<double> limiting_dos_probe(const DensityOfStates& dos, double s,
                                       double v,
                                       const std::vector<double>& e_grid,
                                       double eps, const SolverOptions& opt) {
    std::vector<double> out;
    out.reserve(e_grid.size());
    for (double e : e_grid) {
        const ResolventSample r =
            solve_selfconsistent(dos, s, v, cplx(e, eps), opt);
        out.push_back((r.g_plus.imag() + r.g_minus.imag()) /
                      (2.0 * std::numbers::pi));
    }
    return out;
}

} // namespace qcorr
