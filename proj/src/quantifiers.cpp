#include "qcorr/quantifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

constexpr double kEigFloor = -1e-10;

double xlog2x(double x) {
    if (x <= 0.0) return 0.0;
    return x * std::log2(x);
}

/// Binary entropy in bits.
double h2(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

double entropy_of_values(const double* ev, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        if (ev[i] < kEigFloor)
            throw ValidationError("entropy of a matrix with eigenvalue " +
                                  std::to_string(ev[i]) + " below -1e-10");
        s -= xlog2x(std::max(ev[i], 0.0));
    }
    return s;
}

double sqrt0(double x) { return std::sqrt(std::max(x, 0.0)); }

/// Entropy of a normalized 2x2 Hermitian state given trace p, diagonal gap d
/// and off-diagonal modulus m: eigenvalues are (1 +/- r)/2 with
/// r = sqrt(d^2 + 4 m^2)/p.
double conditional_entropy_2x2(double p, double d, double m) {
    if (p <= 0.0) return 0.0;
    const double r = std::min(std::sqrt(d * d + 4.0 * m * m) / p, 1.0);
    return h2(0.5 * (1.0 + r));
}

struct Objective {
    const Mat4& rho;
    MeasuredSide side;

    /// Average post-measurement entropy of the unmeasured qubit when the
    /// measured one is projected along the Bloch direction (theta, phi).
    double operator()(double theta, double phi) const {
        const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
        const cplx e = std::polar(1.0, phi);
        // Projector |m><m| with m = (c, e s) and its complement.
        Eigen::Matrix2cd proj[2];
        proj[0] << c * c, c * s * std::conj(e), c * s * e, s * s;
        proj[1] = Eigen::Matrix2cd::Identity() - proj[0];
        double total = 0.0;
        for (const auto& pk : proj) {
            // rho_cond[a,a'] = sum_{c,d} rho[(a,c),(a',d)] pk[d,c] for a
            // B-side measurement; A-side swaps which index pair is summed.
            Eigen::Matrix2cd cond = Eigen::Matrix2cd::Zero();
            for (int a = 0; a < 2; ++a)
                for (int ap = 0; ap < 2; ++ap) {
                    cplx acc = 0.0;
                    for (int cc = 0; cc < 2; ++cc)
                        for (int dd = 0; dd < 2; ++dd) {
                            const cplx rel =
                                side == MeasuredSide::b
                                    ? rho(2 * a + cc, 2 * ap + dd)
                                    : rho(2 * cc + a, 2 * dd + ap);
                            acc += rel * pk(dd, cc);
                        }
                    cond(a, ap) = acc;
                }
            const double p = cond.trace().real();
            if (p <= 1e-15) continue;
            total += p * conditional_entropy_2x2(
                             p, (cond(0, 0) - cond(1, 1)).real(),
                             std::abs(cond(0, 1)));
        }
        return total;
    }
};

/// Golden-section minimization on [a, b]; returns the argmin.
template <class F>
double golden_min(F f, double a, double b, double xtol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

double reduced_entropy(const Mat4& rho, MeasuredSide measured) {
    // Entropy of the qubit that is NOT measured conditions the discord
    // formula on the measured one; here we need S of the measured qubit's
    // partner trace, i.e. the reduced state of the measured side itself.
    double p0;
    if (measured == MeasuredSide::b)
        p0 = (rho(0, 0) + rho(2, 2)).real();  // P(B = +)
    else
        p0 = (rho(0, 0) + rho(1, 1)).real();  // P(A = +)
    // Off-diagonal of the reduced state survives only off the X pattern.
    cplx off = 0.0;
    if (measured == MeasuredSide::b)
        off = rho(0, 1) + rho(2, 3);
    else
        off = rho(0, 2) + rho(1, 3);
    const double r = std::sqrt(std::pow(2.0 * p0 - 1.0, 2) + 4.0 * std::norm(off));
    return h2(0.5 * (1.0 + std::min(r, 1.0)));
}

double clip_discord(double d) {
    if (d >= 0.0) return d;
    if (d >= -1e-9) return 0.0;
    throw ConvergenceError("discord minimizer returned " + std::to_string(d) +
                           ", below the -1e-9 slack");
}

} // namespace

double negativity(const XState& st) {
    const double n1 = std::sqrt(std::pow(st.r11() - st.r44(), 2) +
                                4.0 * std::norm(st.r23())) -
                      st.r11() - st.r44();
    const double n2 = std::sqrt(std::pow(st.r22() - st.r33(), 2) +
                                4.0 * std::norm(st.r14())) -
                      st.r22() - st.r33();
    return std::max(0.0, n1) + std::max(0.0, n2);
}

double concurrence(const XState& st) {
    const double c1 = std::abs(st.r23()) - sqrt0(st.r11() * st.r44());
    const double c2 = std::abs(st.r14()) - sqrt0(st.r22() * st.r33());
    return 2.0 * std::max({0.0, c1, c2});
}

double entropy(const XState& st) {
    const auto ev = st.eigenvalues();
    return entropy_of_values(ev.data(), 4);
}

double entropy_of_matrix(const Mat4& rho) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double vals[4] = {ev(0), ev(1), ev(2), ev(3)};
    return entropy_of_values(vals, 4);
}

DiscordDetail discord_of_matrix(const Mat4& rho, const DiscordOptions& opt) {
    const Objective f{rho, opt.side};
    const int n = std::max(opt.grid, 4);
    double best_t = 0.0, best_p = 0.0, best_f = f(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double theta = std::numbers::pi * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / n;
            const double v = f(theta, phi);
            if (v < best_f) {
                best_f = v;
                best_t = theta;
                best_p = phi;
            }
        }
    }
    // Per-axis golden-section refinement around the grid minimum.
    const double dt = std::numbers::pi / (n - 1);
    const double dp = 2.0 * std::numbers::pi / n;
    double prev = best_f;
    for (int round = 0; round < opt.max_rounds; ++round) {
        best_t = golden_min([&](double t) { return f(t, best_p); },
                            std::max(0.0, best_t - dt),
                            std::min(std::numbers::pi, best_t + dt), 1e-9);
        best_p = golden_min([&](double p) { return f(best_t, p); },
                            best_p - dp, best_p + dp, 1e-9);
        const double now = f(best_t, best_p);
        if (prev - now < 0.01 * opt.tol) {
            prev = now;
            break;
        }
        prev = now;
    }
    DiscordDetail out;
    out.theta = best_t;
    out.phi = best_p;
    out.conditional_entropy = prev;
    out.value = clip_discord(reduced_entropy(rho, opt.side) -
                             entropy_of_matrix(rho) + prev);
    return out;
}

namespace {

/// One-angle objective for X-form states measured on either side: the phase
/// angle drops out and both coherences contribute through their moduli.
DiscordDetail discord_xpath(const XState& st, MeasuredSide side) {
    const double r11 = st.r11(), r22 = st.r22(), r33 = st.r33(), r44 = st.r44();
    // Swapping the qubits exchanges the middle populations and conjugates
    // r23, none of which changes the objective below except through t.
    const double t = (side == MeasuredSide::b) ? r11 - r22 + r33 - r44
                                               : r11 + r22 - r33 - r44;
    const double mm = std::abs(st.r14()) + std::abs(st.r23());
    const auto cond = [&](double theta) {
        const double c = std::cos(theta), sn = std::sin(theta);
        double total = 0.0;
        for (int sgn : {+1, -1}) {
            const double cs = sgn * c;
            const double p = 0.5 * (1.0 + t * cs);
            if (p <= 1e-15) continue;
            double d1, d2;
            if (side == MeasuredSide::b) {
                d1 = 0.5 * (r11 * (1.0 + cs) + r22 * (1.0 - cs));
                d2 = 0.5 * (r33 * (1.0 + cs) + r44 * (1.0 - cs));
            } else {
                d1 = 0.5 * (r11 * (1.0 + cs) + r33 * (1.0 - cs));
                d2 = 0.5 * (r22 * (1.0 + cs) + r44 * (1.0 - cs));
            }
            const double od = 0.5 * std::abs(sn) * mm;
            total += p * conditional_entropy_2x2(p, d1 - d2, od);
        }
        return total;
    };
    // The objective is symmetric under theta -> pi - theta, so [0, pi/2]
    // brackets the minimum; compare the refined interior point against both
    // endpoints since the minimum often sits exactly at one of them.
    const double ti = golden_min(cond, 0.0, 0.5 * std::numbers::pi, 1e-9);
    DiscordDetail out;
    out.theta = ti;
    out.phi = 0.0;
    double best = cond(ti);
    for (double cand : {0.0, 0.5 * std::numbers::pi}) {
        const double v = cond(cand);
        if (v < best) {
            best = v;
            out.theta = cand;
        }
    }
    out.conditional_entropy = best;
    const Mat4 rho = st.matrix();
    out.value = clip_discord(reduced_entropy(rho, side) - entropy(st) + best);
    return out;
}

} // namespace

DiscordDetail discord_detail(const XState& st, const DiscordOptions& opt) {
    return discord_xpath(st, opt.side);
}

double discord(const XState& st) {
    return discord_xpath(st, MeasuredSide::b).value;
}

QuantifierReport report(const XState& st) {
    QuantifierReport r;
    r.negativity = negativity(st);
    r.concurrence = concurrence(st);
    r.entropy = entropy(st);
    r.discord = discord(st);
    return r;
}

} // namespace qcorr
