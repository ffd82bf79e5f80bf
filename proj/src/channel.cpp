#include "qcorr/channel.hpp"

#include <cmath>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

/// 0/0 -> 0 convention for rate ratios: every ratio below carries its
/// numerator as a factor of the physical weight, so a vanishing numerator
/// kills the term before the denominator matters.
double ratio0(double num, double den) { return num == 0.0 ? 0.0 : num / den; }

} // namespace

double CommonEnvChannel::q_alpha(int alpha, double tau) const {
    const RateSet& r = rates_;
    const double ga = alpha > 0 ? r.gamma_plus : r.gamma_minus;
    const double g2a = alpha > 0 ? r.gamma_2plus : r.gamma_2minus;
    const double gta = alpha > 0 ? r.gamma_tilde_plus : r.gamma_tilde_minus;
    return ratio0(r.gamma0, gta) +
           ratio0(ga * r.gamma0, gta * (r.gamma0 + g2a)) *
               std::exp(-2.0 * gta * tau) -
           ratio0(r.gamma0, r.gamma0 + g2a) * std::exp(-2.0 * ga * tau);
}

Eigen::Matrix3d CommonEnvChannel::channel_matrix(double tau) const {
    if (tau < 0.0) throw ValidationError("channel time tau must be >= 0");
    const RateSet& r = rates_;
    const double egp = std::exp(-2.0 * r.gamma_plus * tau);
    const double egm = std::exp(-2.0 * r.gamma_minus * tau);
    const double egtp = std::exp(-2.0 * r.gamma_tilde_plus * tau);
    const double egtm = std::exp(-2.0 * r.gamma_tilde_minus * tau);
    const double egt = std::exp(-2.0 * r.gamma_tilde_sum * tau);
    // The corner entries are (Gamma_{2-a}/Gamma_0) q_{-a} expanded so that a
    // vanishing Gamma_0 cancels against the q factor instead of dividing.
    const double corner_plus =  // row 3, column 1: carries q_+
        ratio0(r.gamma_2plus, r.gamma_tilde_plus) +
        ratio0(r.gamma_plus * r.gamma_2plus,
               r.gamma_tilde_plus * (r.gamma0 + r.gamma_2plus)) *
            egtp -
        ratio0(r.gamma_2plus, r.gamma0 + r.gamma_2plus) * egp;
    const double corner_minus =  // row 1, column 3: carries q_-
        ratio0(r.gamma_2minus, r.gamma_tilde_minus) +
        ratio0(r.gamma_minus * r.gamma_2minus,
               r.gamma_tilde_minus * (r.gamma0 + r.gamma_2minus)) *
            egtm -
        ratio0(r.gamma_2minus, r.gamma0 + r.gamma_2minus) * egm;
    Eigen::Matrix3d m;
    m(0, 0) = q_alpha(+1, tau) + egp;
    m(0, 1) = ratio0(r.gamma_minus, r.gamma_tilde_sum) * (1.0 - egt);
    m(0, 2) = corner_minus;
    m(1, 0) = ratio0(r.gamma_plus, r.gamma_tilde_plus) * (1.0 - egtp);
    m(1, 1) = ratio0(r.gamma0, r.gamma_tilde_sum) +
              ratio0(r.gamma_sum, r.gamma_tilde_sum) * egt;
    m(1, 2) = ratio0(r.gamma_minus, r.gamma_tilde_minus) * (1.0 - egtm);
    m(2, 0) = corner_plus;
    m(2, 1) = ratio0(r.gamma_plus, r.gamma_tilde_sum) * (1.0 - egt);
    m(2, 2) = q_alpha(-1, tau) + egm;
    return m;
}

Eigen::Matrix3d CommonEnvChannel::stationary_matrix() const {
    const RateSet& r = rates_;
    Eigen::Matrix3d m;
    m(0, 0) = ratio0(r.gamma0, r.gamma_tilde_plus);
    m(0, 1) = ratio0(r.gamma_minus, r.gamma_tilde_sum);
    m(0, 2) = ratio0(r.gamma_2minus, r.gamma_tilde_minus);
    m(1, 0) = ratio0(r.gamma_plus, r.gamma_tilde_plus);
    m(1, 1) = ratio0(r.gamma0, r.gamma_tilde_sum);
    m(1, 2) = ratio0(r.gamma_minus, r.gamma_tilde_minus);
    m(2, 0) = ratio0(r.gamma_2plus, r.gamma_tilde_plus);
    m(2, 1) = ratio0(r.gamma_plus, r.gamma_tilde_sum);
    m(2, 2) = ratio0(r.gamma0, r.gamma_tilde_minus);
    return m;
}

cplx CommonEnvChannel::coherence_factor_outer(double tau) const {
    return std::exp(-rates_.gamma_sum * tau) *
           std::polar(1.0, rates_.psi_plus * tau);
}

cplx CommonEnvChannel::coherence_factor_inner(double tau) const {
    return std::exp(-rates_.gamma_sum * tau) *
           std::polar(1.0, rates_.psi_minus * tau);
}

XState CommonEnvChannel::evolve(const XState& rho0, double tau) const {
    const Eigen::Matrix3d m = channel_matrix(tau);
    const BlockCoords bc0 = rho0.block_coords();
    const Eigen::Vector3d triple =
        m * Eigen::Vector3d(rho0.r11(), bc0.a1, rho0.r44());
    BlockCoords bc;
    bc.a1 = triple(1);
    bc.a2 = bc0.a2;
    bc.a3 = coherence_factor_inner(tau) * bc0.a3;
    return XState::from_parts(triple(0), triple(2),
                              coherence_factor_outer(tau) * rho0.r14(), bc);
}

XState CommonEnvChannel::evolve_blockform(const XState& rho0, double tau) const {
    if (tau < 0.0) throw ValidationError("channel time tau must be >= 0");
    const RateSet& r = rates_;
    using M2 = Eigen::Matrix2cd;
    const M2 sz = (M2() << 1, 0, 0, -1).finished();
    const M2 sx = (M2() << 0, 1, 1, 0).finished();
    const M2 sy = (M2() << 0, cplx(0, -1), cplx(0, 1), 0).finished();
    const M2 sp = (M2() << 0, 1, 0, 0).finished();  // raising block unit
    const auto p_proj = [&](int a) { return M2((M2::Identity() + double(a) * sz) / 2.0); };
    const auto pi_proj = [&](int a) { return M2((M2::Identity() + double(a) * sx) / 2.0); };
    const auto re_part = [](const M2& m) { return M2((m + m.adjoint()) / 2.0); };

    const BlockCoords bc0 = rho0.block_coords();
    const double diag0[2] = {rho0.r11(), rho0.r44()};  // outer block diagonal
    const double egt = std::exp(-2.0 * r.gamma_tilde_sum * tau);

    // Outer block on {|++>, |-->}: per-branch population mixing plus the
    // phased decay of the block coherence.
    M2 outer = M2::Zero();
    for (int a : {+1, -1}) {
        const double ga = a > 0 ? r.gamma_plus : r.gamma_minus;
        const double g2ma = a > 0 ? r.gamma_2minus : r.gamma_2plus;
        const double gma = a > 0 ? r.gamma_minus : r.gamma_plus;
        const double own = diag0[a > 0 ? 0 : 1];
        const double other = diag0[a > 0 ? 1 : 0];
        const double val = (q_alpha(a, tau) + std::exp(-2.0 * ga * tau)) * own +
                           ratio0(g2ma, r.gamma0) * q_alpha(-a, tau) * other +
                           ratio0(gma, r.gamma_tilde_sum) * (1.0 - egt) * bc0.a1;
        outer += val * p_proj(a);
    }
    const cplx c_outer = coherence_factor_outer(tau) * rho0.r14();
    outer += 2.0 * re_part(M2(sp * c_outer));

    // Inner block on {|+->, |-+>}: symmetric part driven to a1, the
    // conserved a2 on the antisymmetric projector, and the phased a3.
    double inner_sym = ratio0(r.gamma0, r.gamma_tilde_sum) * bc0.a1 +
                       ratio0(r.gamma_sum, r.gamma_tilde_sum) * egt * bc0.a1;
    for (int a : {+1, -1}) {
        const double ga = a > 0 ? r.gamma_plus : r.gamma_minus;
        const double gta = a > 0 ? r.gamma_tilde_plus : r.gamma_tilde_minus;
        inner_sym += ratio0(ga, gta) * (1.0 - std::exp(-2.0 * gta * tau)) *
                     diag0[a > 0 ? 0 : 1];
    }
    const cplx c_inner = coherence_factor_inner(tau) * bc0.a3;
    const M2 inner = inner_sym * pi_proj(+1) + bc0.a2 * pi_proj(-1) +
                     re_part(M2((sz + cplx(0, 1) * sy) * c_inner));

    Mat4 rho = Mat4::Zero();
    rho(0, 0) = outer(0, 0);
    rho(0, 3) = outer(0, 1);
    rho(3, 0) = outer(1, 0);
    rho(3, 3) = outer(1, 1);
    rho(1, 1) = inner(0, 0);
    rho(1, 2) = inner(0, 1);
    rho(2, 1) = inner(1, 0);
    rho(2, 2) = inner(1, 1);
    return XState::from_matrix(rho);
}

XState CommonEnvChannel::stationary(const XState& rho0) const {
    const RateSet& r = rates_;
    if (!(r.gamma_plus > 0.0) || !(r.gamma_minus > 0.0))
        throw ValidationError(
            "no stationary state: a one-sided decay rate vanishes, some "
            "transient never dies out");
    const BlockCoords bc0 = rho0.block_coords();
    const Eigen::Vector3d triple =
        stationary_matrix() *
        Eigen::Vector3d(rho0.r11(), bc0.a1, rho0.r44());
    BlockCoords bc;
    bc.a1 = triple(1);
    bc.a2 = bc0.a2;
    bc.a3 = 0.0;
    return XState::from_parts(triple(0), triple(2), 0.0, bc);
}

MarkovDiagnostic CommonEnvChannel::markov_diagnostic() const {
    MarkovDiagnostic d;
    d.det_phi3_inf = stationary_matrix().determinant();
    const RateSet& r = rates_;
    const double scale = std::max(1.0, r.gamma0);
    d.is_flat = std::abs(r.gamma_plus - r.gamma0) <= 1e-12 * scale &&
                std::abs(r.gamma_minus - r.gamma0) <= 1e-12 * scale &&
                std::abs(r.gamma_2plus - r.gamma0) <= 1e-12 * scale &&
                std::abs(r.gamma_2minus - r.gamma0) <= 1e-12 * scale &&
                std::abs(r.psi_plus) <= 1e-12 && std::abs(r.psi_minus) <= 1e-12;
    // Composition defect over a fixed 20x20 grid of (tau, tau') pairs;
    // zero (to rounding) exactly when the family is a semigroup.
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
            const double t1 = 0.25 * i, t2 = 0.25 * j;
            const Eigen::Matrix3d defect =
                channel_matrix(t1 + t2) - channel_matrix(t1) * channel_matrix(t2);
            worst = std::max(worst, defect.cwiseAbs().maxCoeff());
        }
    d.max_semigroup_residual = worst;
    return d;
}

Eigen::Matrix3d flat_generator(double gamma0) {
    const Eigen::Vector3d e2 =
        Eigen::Vector3d(1.0, -2.0, 1.0) / std::sqrt(6.0);
    const Eigen::Vector3d e3 = Eigen::Vector3d(1.0, 0.0, -1.0) / std::sqrt(2.0);
    return 6.0 * gamma0 * e2 * e2.transpose() +
           2.0 * gamma0 * e3 * e3.transpose();
}

Trajectory trajectory(const CommonEnvChannel& ch, const XState& rho0,
                      const std::vector<double>& taus) {
    if (taus.empty()) throw ValidationError("trajectory needs a non-empty grid");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] < 0.0)
            throw ValidationError("trajectory grid must be non-negative");
        if (i && taus[i] <= taus[i - 1])
            throw ValidationError("trajectory grid must be strictly ascending");
    }
    Trajectory tr;
    tr.taus = taus;
    tr.states.reserve(taus.size());
    tr.reports.reserve(taus.size());
    for (double tau : taus) {
        tr.states.push_back(ch.evolve(rho0, tau));
        tr.reports.push_back(report(tr.states.back()));
    }
    constexpr double kZero = 1e-9;
    const auto alive_at = [&](double tau) {
        return concurrence(ch.evolve(rho0, tau)) >= kZero;
    };
    for (std::size_t i = 1; i < taus.size(); ++i) {
        const bool was = tr.reports[i - 1].concurrence >= kZero;
        const bool now = tr.reports[i].concurrence >= kZero;
        if (was == now) continue;
        double lo = taus[i - 1], hi = taus[i];
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            if (alive_at(mid) == was)
                lo = mid;
            else
                hi = mid;
        }
        tr.events.push_back({0.5 * (lo + hi), was});
    }
    return tr;
}

} // namespace qcorr
