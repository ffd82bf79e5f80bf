// Acceptance gate: twelve numbered criteria, each printing one
//   criterion NN PASS|FAIL (details) [Xs]
// line. Run with a criterion index argument, or no argument for all.
// Exit code 0 when every executed criterion passes, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qcorr/channel.hpp"
#include "qcorr/meanfield.hpp"
#include "qcorr/oracle.hpp"
#include "qcorr/quantifiers.hpp"
#include "qcorr/xstate.hpp"

using namespace qcorr;

namespace {

struct Outcome {
    bool pass = true;
    std::string details;
};

void note(Outcome& o, bool ok, const std::string& text) {
    o.pass = o.pass && ok;
    if (!o.details.empty()) o.details += "; ";
    o.details += text;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

std::vector<double> linspace(double a, double b, int steps) {
    std::vector<double> out(steps + 1);
    for (int i = 0; i <= steps; ++i) out[i] = a + (b - a) * i / steps;
    return out;
}

XState random_family_state(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int fam = int(unif(gen) * 4.0);
    const double r = 0.05 + 0.9 * unif(gen);
    const double phase = 2.0 * M_PI * unif(gen);
    switch (fam) {
        case 0:
            return product_state(r);
        case 1:
            return bell1_state(std::polar(r, phase));
        case 2:
            return bell2_state(std::polar(r, phase));
        default:
            return werner_state(1 + int(unif(gen) * 2.0),
                                -1.0 / 3.0 + (4.0 / 3.0) * unif(gen));
    }
}

CommonEnvChannel random_channel(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double gamma = 0.1 + 1.1 * unif(gen);
    const double e = -3.0 + 6.0 * unif(gen);
    const double s = 0.5 + 1.0 * unif(gen);
    return CommonEnvChannel::from_dos(LorentzianDos(gamma), e, s);
}

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
    Outcome o;
    std::mt19937_64 gen(101);
    std::vector<XState> states;
    for (int i = 0; i < 200; ++i) states.push_back(random_family_state(gen));
    std::vector<CommonEnvChannel> channels;
    for (int i = 0; i < 50; ++i) channels.push_back(random_channel(gen));
    double worst = 0.0;
    for (const XState& st : states)
        for (const CommonEnvChannel& ch : channels)
            worst = std::max(worst, max_abs(ch.evolve(st, 0.0).matrix() -
                                            st.matrix()));
    note(o, worst <= 1e-12, fmt("max |evolve(rho,0)-rho| = %.2e", worst));
    return o;
}

Outcome criterion2() {
    Outcome o;
    std::mt19937_64 gen(202);
    const std::vector<double> taus = linspace(0.0, 20.0, 199);
    double trace_err = 0.0, herm_err = 0.0, min_eig = 1.0, a2_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        const XState rho0 = random_xstate(gen);
        const CommonEnvChannel ch = random_channel(gen);
        const double a2_0 = rho0.block_coords().a2;
        for (double tau : taus) {
            const XState st = ch.evolve(rho0, tau);
            const Mat4 m = st.matrix();
            trace_err = std::max(trace_err, std::abs(m.trace().real() - 1.0));
            herm_err = std::max(herm_err, max_abs(m - Mat4(m.adjoint())));
            for (double ev : st.eigenvalues()) min_eig = std::min(min_eig, ev);
            a2_err = std::max(a2_err,
                              std::abs(st.block_coords().a2 - a2_0));
        }
    }
    note(o, trace_err <= 1e-12, fmt("trace err %.2e", trace_err));
    note(o, herm_err <= 1e-12, fmt("herm err %.2e", herm_err));
    note(o, min_eig >= -1e-10, fmt("min eig %.2e", min_eig));
    note(o, a2_err <= 1e-14, fmt("a2 drift %.2e", a2_err));
    return o;
}

Outcome criterion3() {
    Outcome o;
    const double g0 = 0.1;
    const CommonEnvChannel ch = CommonEnvChannel::from_dos(FlatDos(g0), 2.0, 1.0);
    const Eigen::Matrix3d l3 = flat_generator(g0);

    double spec_err = 0.0;
    {
        const Eigen::Vector3d e1 = Eigen::Vector3d::Ones() / std::sqrt(3.0);
        const Eigen::Vector3d e2 =
            Eigen::Vector3d(1.0, -2.0, 1.0) / std::sqrt(6.0);
        const Eigen::Vector3d e3 =
            Eigen::Vector3d(1.0, 0.0, -1.0) / std::sqrt(2.0);
        spec_err = std::max((l3 * e1).cwiseAbs().maxCoeff(),
                            std::max((l3 * e2 - 6.0 * g0 * e2).cwiseAbs().maxCoeff(),
                                     (l3 * e3 - 2.0 * g0 * e3).cwiseAbs().maxCoeff()));
    }
    note(o, spec_err <= 1e-10, fmt("generator spectrum err %.2e", spec_err));

    double exp_err = 0.0;
    for (double tau : linspace(0.0, 5.0, 20)) {
        const Eigen::Matrix3d expm = (-tau * l3).exp();
        exp_err = std::max(exp_err,
                           (ch.channel_matrix(tau) - expm).cwiseAbs().maxCoeff());
    }
    note(o, exp_err <= 1e-10, fmt("matrix vs exponential %.2e", exp_err));

    double semi_err = 0.0;
    const std::vector<double> grid = linspace(0.0, 5.0, 19);
    for (double t1 : grid)
        for (double t2 : grid)
            semi_err = std::max(
                semi_err, (ch.channel_matrix(t1 + t2) -
                           ch.channel_matrix(t1) * ch.channel_matrix(t2))
                              .cwiseAbs()
                              .maxCoeff());
    note(o, semi_err <= 1e-10, fmt("semigroup residual %.2e", semi_err));

    std::mt19937_64 gen(303);
    double triple_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        const XState inf = ch.stationary(random_xstate(gen));
        const BlockCoords bc = inf.block_coords();
        triple_err = std::max({triple_err, std::abs(inf.r11() - bc.a1),
                               std::abs(inf.r44() - bc.a1)});
    }
    note(o, triple_err <= 1e-10, fmt("stationary triple err %.2e", triple_err));

    const double det = ch.stationary_matrix().determinant();
    note(o, std::abs(det) <= 1e-12, fmt("det stationary %.2e", std::abs(det)));
    return o;
}

Outcome criterion4() {
    Outcome o;
    std::mt19937_64 gen(404);
    double order_slack = 0.0;
    int vanish_fail = 0;
    for (int i = 0; i < 10000; ++i) {
        const XState st = random_xstate(gen);
        const double c = concurrence(st);
        const double n = negativity(st);
        order_slack = std::max(order_slack, n - c);
        if ((c > 1e-12) != (n > 1e-12)) ++vanish_fail;
    }
    note(o, order_slack <= 1e-12, fmt("max N-C = %.2e", order_slack));
    note(o, vanish_fail == 0,
         fmt("simultaneous-vanish violations %.0f", double(vanish_fail)));

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double pure_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const cplx alpha = std::polar(0.05 + 0.9 * unif(gen),
                                      2.0 * M_PI * unif(gen));
        const XState st =
            (i % 2) ? bell1_state(alpha) : bell2_state(alpha);
        pure_err = std::max(pure_err,
                            std::abs(concurrence(st) - negativity(st)));
    }
    note(o, pure_err <= 1e-10, fmt("pure |C-N| = %.2e", pure_err));

    double mixed_err = 0.0;
    int accepted = 0;
    while (accepted < 2000) {
        const XState st = random_xstate(gen);
        const double m = 0.5 * (st.r11() + st.r44());
        const XState sym(m, st.r22(), st.r33(), m, st.r14(), st.r23());
        const double c1 = std::abs(sym.r23()) - std::sqrt(sym.r11() * sym.r44());
        const double c2 = std::abs(sym.r14()) - std::sqrt(sym.r22() * sym.r33());
        if (c1 < c2) continue;
        ++accepted;
        mixed_err = std::max(mixed_err,
                             std::abs(concurrence(sym) - negativity(sym)));
    }
    note(o, mixed_err <= 1e-10, fmt("balanced mixed |C-N| = %.2e", mixed_err));
    return o;
}

// Trajectory summary for criterion 5: event pattern plus limits.
struct TrajSummary {
    std::vector<TrajectoryEvent> events;
    double c_inf = 0.0;
    bool c_monotone_down = true;
};

TrajSummary summarize(double gamma, double e_env, double alpha) {
    const CommonEnvChannel ch =
        CommonEnvChannel::from_dos(LorentzianDos(gamma), e_env, 1.0);
    const XState rho0 = bell2_state(cplx(alpha));
    const Trajectory tr = trajectory(ch, rho0, linspace(0.0, 40.0, 800));
    TrajSummary s;
    s.events = tr.events;
    s.c_inf = concurrence(ch.stationary(rho0));
    for (std::size_t i = 0; i + 1 < tr.reports.size(); ++i)
        if (tr.reports[i + 1].concurrence >
            tr.reports[i].concurrence + 1e-12)
            s.c_monotone_down = false;
    return s;
}

std::string event_string(const std::vector<TrajectoryEvent>& ev) {
    if (ev.empty()) return "none";
    std::string out;
    for (const auto& e : ev) {
        if (!out.empty()) out += ",";
        out += (e.death ? "death@" : "birth@") + fmt("%.3f", e.tau);
    }
    return out;
}

Outcome criterion5() {
    Outcome o;
    {
        const TrajSummary s = summarize(0.15, 1.1, 0.67);
        note(o, std::abs(s.c_inf - 0.071) <= 0.005,
             fmt("(0.15,1.1) C_inf = %.4f want 0.071+-0.005", s.c_inf));
    }
    {
        const TrajSummary s = summarize(0.33, 1.3, 0.67);
        const bool pattern = s.events.size() >= 3 && s.events[0].death &&
                             !s.events[1].death && s.events[2].death;
        note(o, pattern,
             "(0.33,1.3) events " + event_string(s.events) +
                 " want death-birth-death");
    }
    {
        const TrajSummary s = summarize(0.33, 1.5, 0.67);
        const bool monotone_death = s.c_monotone_down &&
                                    s.events.size() == 1 &&
                                    s.events[0].death && s.c_inf <= 1e-6;
        note(o, monotone_death,
             "(0.33,1.5) events " + event_string(s.events) +
                 fmt(", C_inf = %.4f want monotone decay to 0", s.c_inf));
    }
    return o;
}

// Rises and falls along a sampled curve exceed the threshold.
bool non_monotone(const std::vector<double>& y, double tol) {
    double max_rise = 0.0, max_fall = 0.0, running_min = y[0],
           running_max = y[0];
    for (double v : y) {
        max_rise = std::max(max_rise, v - running_min);
        max_fall = std::max(max_fall, running_max - v);
        running_min = std::min(running_min, v);
        running_max = std::max(running_max, v);
    }
    return max_rise > tol && max_fall > tol;
}

Outcome criterion6() {
    Outcome o;
    const XState rho0 = bell2_state(cplx(0.2));
    const double d0 = discord(rho0);
    note(o, std::abs(d0 - 0.242) <= 0.005, fmt("D(0) = %.4f", d0));

    const CommonEnvChannel lor =
        CommonEnvChannel::from_dos(LorentzianDos(0.8), 2.0, 1.0);
    const double d_inf = discord(lor.stationary(rho0));
    note(o, std::abs(d_inf - 0.295) <= 0.01,
         fmt("lorentzian D_inf = %.4f want 0.295+-0.01", d_inf));

    const CommonEnvChannel flat =
        CommonEnvChannel::from_dos(FlatDos(0.1), 2.0, 1.0);
    const double d_flat = discord(flat.stationary(rho0));
    note(o, std::abs(d_flat - 0.333) <= 0.005, fmt("flat D_inf = %.4f", d_flat));

    const auto discord_curve = [&](const CommonEnvChannel& ch, double tau_max) {
        std::vector<double> out;
        for (double tau : linspace(0.0, tau_max, 200))
            out.push_back(discord(ch.evolve(rho0, tau)));
        return out;
    };
    const bool lor_nm = non_monotone(discord_curve(lor, 20.0), 1e-3);
    const bool flat_nm = non_monotone(discord_curve(flat, 40.0), 1e-3);
    note(o, lor_nm, lor_nm ? "lorentzian D non-monotone"
                           : "lorentzian D monotone");
    note(o, flat_nm, flat_nm ? "flat D non-monotone" : "flat D monotone");
    return o;
}

Outcome criterion7() {
    Outcome o;
    const XState rho0 = bell1_state(cplx(0.5));
    const QuantifierReport r0 = report(rho0);
    note(o, std::abs(r0.concurrence - std::sqrt(3.0) / 2.0) <= 1e-3,
         fmt("C(0) = %.6f", r0.concurrence));
    note(o, std::abs(r0.discord - 0.811) <= 0.002, fmt("D(0) = %.4f", r0.discord));
    note(o, r0.entropy <= 1e-10, fmt("S(0) = %.2e", r0.entropy));

    // the caption omits (gamma, E); the qualitative checks use (0.15, 1.1)
    const CommonEnvChannel ch =
        CommonEnvChannel::from_dos(LorentzianDos(0.15), 1.1, 1.0);
    const std::vector<double> taus = linspace(0.0, 25.0, 500);
    std::vector<double> d_curve, s_curve;
    for (double tau : taus) {
        const QuantifierReport r = report(ch.evolve(rho0, tau));
        d_curve.push_back(r.discord);
        s_curve.push_back(r.entropy);
    }
    bool s_monotone = true;
    for (std::size_t i = 0; i + 1 < s_curve.size(); ++i)
        if (s_curve[i + 1] < s_curve[i] - 1e-9) s_monotone = false;
    note(o, s_monotone && s_curve.back() > 0.5,
         fmt("entropy monotone to %.3f", s_curve.back()));

    const auto min_it = std::min_element(d_curve.begin(), d_curve.end());
    const bool dip_and_rise = min_it != d_curve.begin() &&
                              d_curve.front() > *min_it + 0.1 &&
                              d_curve.back() > *min_it + 1e-4;
    note(o, dip_and_rise,
         fmt("discord dips to %.4f then ends at %.4f", *min_it,
             d_curve.back()));

    int flat_steps = 0;
    const double dtau = taus[1] - taus[0];
    for (std::size_t i = 0; i + 1 < d_curve.size(); ++i)
        if (std::abs(d_curve[i + 1] - d_curve[i]) < 1e-3 * dtau) ++flat_steps;
    const double flat_frac = double(flat_steps) / double(d_curve.size() - 1);
    note(o, flat_frac >= 0.3, fmt("near-flat fraction %.2f", flat_frac));
    return o;
}

Outcome criterion8() {
    Outcome o;
    const CommonEnvChannel flat =
        CommonEnvChannel::from_dos(FlatDos(0.1), 2.0, 1.0);
    for (double sign : {1.0, -1.0}) {
        const double alpha = 0.5 * std::sqrt(2.0 + sign * std::sqrt(3.0));
        const double d =
            discord(flat.stationary(bell1_state(cplx(alpha))));
        note(o, d <= 1e-3,
             fmt("flat D_inf(alpha=%.4f) = %.2e", alpha, d));
    }
    const double pairs[2][2] = {{0.2, 0.5}, {0.3, 1.5}};
    for (const auto& pr : pairs) {
        const CommonEnvChannel ch =
            CommonEnvChannel::from_dos(LorentzianDos(pr[0]), pr[1], 1.0);
        double d_min = 1e9;
        double alpha_min = 0.0;
        for (int k = 1; k <= 19; ++k) {
            const double alpha = 0.05 * k;
            const double d = discord(ch.stationary(bell1_state(cplx(alpha))));
            if (d < d_min) {
                d_min = d;
                alpha_min = alpha;
            }
        }
        note(o, d_min > 1e-2,
             fmt("(%.2g,%.2g) min D_inf = ", pr[0], pr[1]) +
                 fmt("%.2e at alpha %.2f want > 1e-2", d_min, alpha_min));
    }
    return o;
}

Outcome criterion9() {
    Outcome o;
    const LorentzianDos dos(0.8);
    const XState rho0 = bell2_state(cplx(0.2));
    std::vector<double> sizes{100, 200, 400}, maxvar;
    bool bound_ok = true;
    for (double nd : sizes) {
        OracleParams p;
        p.n = int(nd);
        p.v = 0.2;
        p.s = 1.0;
        p.env_energy = 2.0;
        p.draws = 200;
        p.seed = 909;
        p.times = {5.0};
        const OracleResult res = ensemble(dos, rho0, p);
        const double mv = res.variance[0].maxCoeff();
        const double bound = 1024.0 * p.v * p.v * 25.0 / nd;
        maxvar.push_back(mv);
        bound_ok = bound_ok && mv <= bound;
    }
    note(o, bound_ok,
         fmt("max variance %.2e / %.2e / %.2e", maxvar[0], maxvar[1],
             maxvar[2]));
    // least-squares slope of log(var) against log(n)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = std::log(sizes[i]), y = std::log(maxvar[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = sizes.size();
    const double p_fit = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    note(o, p_fit >= 0.7 && p_fit <= 1.3, fmt("fitted p = %.3f", p_fit));
    return o;
}

Outcome criterion10() {
    Outcome o;
    const LorentzianDos dos(0.8);
    const XState rho0 = bell2_state(cplx(0.2));
    const CommonEnvChannel ch = CommonEnvChannel::from_dos(dos, 2.0, 1.0);
    const std::vector<double> taus = linspace(0.0, 3.0, 12);
    const double vs[3] = {0.3, 0.2, 0.1};
    double dev[3] = {0.0, 0.0, 0.0};
    for (int iv = 0; iv < 3; ++iv) {
        OracleParams p;
        p.n = 600;
        p.v = vs[iv];
        p.s = 1.0;
        p.env_energy = 2.0;
        p.draws = 50;
        p.seed = 1010 + iv;
        for (double tau : taus) p.times.push_back(tau / (p.v * p.v));
        const OracleResult mc = ensemble(dos, rho0, p);
        for (const CompareRow& row : bvh_compare(mc, rho0, ch, p.s, p.v))
            for (double d : row.deviation) dev[iv] = std::max(dev[iv], d);
    }
    note(o, dev[0] > dev[1] && dev[1] > dev[2],
         fmt("sup deviation %.3f / %.3f / %.3f for v = 0.3/0.2/0.1", dev[0],
             dev[1], dev[2]));
    note(o, dev[2] <= 0.05, fmt("v=0.1 deviation %.3f want <= 0.05", dev[2]));
    return o;
}

Outcome criterion11() {
    Outcome o;
    const LorentzianDos dos(1.0);
    const double s = 1.0, v = 0.5;

    double v0_err = 0.0;
    for (double x : linspace(-3.0, 3.0, 10)) {
        const cplx z(x, 0.7);
        const ResolventSample r = solve_selfconsistent(dos, s, 0.0, z);
        const cplx expect = kernel_integral(dos, z, cplx(0.0), 4.0 * s * s);
        v0_err = std::max(v0_err, std::max(std::abs(r.g_plus - expect),
                                           std::abs(r.g_minus - expect)));
    }
    note(o, v0_err <= 1e-10, fmt("v=0 closed-form err %.2e", v0_err));

    std::mt19937_64 gen(1111);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool herglotz_ok = true;
    double schwarz_err = 0.0, agree_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double re = -4.0 + 8.0 * unif(gen);
        const double im = (0.05 + 2.0 * unif(gen)) * (i % 2 ? 1.0 : -1.0);
        const cplx z(re, im);
        const ResolventSample r = solve_selfconsistent(dos, s, v, z);
        herglotz_ok = herglotz_ok && r.g_plus.imag() * im > 0.0 &&
                      r.g_minus.imag() * im > 0.0;
        if (i < 100) {
            const ResolventSample rc =
                solve_selfconsistent(dos, s, v, std::conj(z));
            schwarz_err = std::max(
                schwarz_err, std::abs(rc.g_plus - std::conj(r.g_plus)));
            const ResolventSample rn = solve_newton(dos, s, v, z);
            agree_err = std::max(
                agree_err, std::max(std::abs(rn.g_plus - r.g_plus),
                                    std::abs(rn.g_minus - r.g_minus)));
        }
    }
    note(o, herglotz_ok, herglotz_ok ? "herglotz sign holds at 1000 z"
                                     : "herglotz sign violated");
    note(o, schwarz_err <= 1e-10, fmt("schwarz err %.2e", schwarz_err));
    note(o, agree_err <= 1e-10, fmt("solver agreement %.2e", agree_err));

    // finite-size traces against both kernel forms at z = 0.5 + 0.5i
    const cplx z(0.5, 0.5);
    const ResolventSample canon = solve_selfconsistent(dos, s, v, z);
    SolverOptions block_opt;
    block_opt.form = KernelForm::block_gap;
    const ResolventSample block = solve_selfconsistent(dos, s, v, z, block_opt);
    double err_can[3], err_blk[3];
    const int sizes[3] = {200, 400, 800};
    for (int i = 0; i < 3; ++i) {
        OracleParams p;
        p.n = sizes[i];
        p.v = v;
        p.s = s;
        p.draws = 16;
        p.seed = 2020;
        const ResolventTraces tr = mean_block_resolvent_traces(dos, p, z);
        err_can[i] = std::max(std::abs(tr.g_plus - canon.g_plus),
                              std::abs(tr.g_minus - canon.g_minus));
        err_blk[i] = std::max(std::abs(tr.g_plus - block.g_plus),
                              std::abs(tr.g_minus - block.g_minus));
    }
    const bool converges = err_can[0] > err_can[1] && err_can[1] > err_can[2] &&
                           err_can[2] <= 0.01;
    note(o, converges,
         fmt("trace err vs canonical %.3f / %.3f / %.3f", err_can[0],
             err_can[1], err_can[2]) +
             fmt(" (vs block variant %.4f / %.4f / %.4f)", err_blk[0],
                 err_blk[1], err_blk[2]));
    return o;
}

Outcome criterion12() {
    Outcome o;
    std::mt19937_64 gen(1212);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const XState st = random_xstate(gen);
        worst = std::max(worst,
                         std::abs(entropy(st) - entropy_of_matrix(st.matrix())));
    }
    note(o, worst <= 1e-12, fmt("max |dS| = %.2e", worst));
    return o;
}

struct Criterion {
    Outcome (*run)();
    double budget_s;  // 0 means no stated limit
};

const Criterion kCriteria[12] = {
    {criterion1, 1.0},   {criterion2, 10.0},  {criterion3, 1.0},
    {criterion4, 30.0},  {criterion5, 5.0},   {criterion6, 60.0},
    {criterion7, 0.0},   {criterion8, 300.0}, {criterion9, 600.0},
    {criterion10, 1800.0}, {criterion11, 600.0}, {criterion12, 5.0},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 12) {
            std::fprintf(stderr, "usage: %s [1-12]\n", argv[0]);
            return 2;
        }
    }
    bool all_pass = true;
    for (int idx = 1; idx <= 12; ++idx) {
        if (only && idx != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o = kCriteria[idx - 1].run();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        const double budget = kCriteria[idx - 1].budget_s;
        if (budget > 0.0 && secs > budget) {
            o.pass = false;
            o.details += fmt("; over %.0fs budget", budget);
        }
        std::printf("criterion %02d %s (%s) [%.1fs]\n", idx,
                    o.pass ? "PASS" : "FAIL", o.details.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
