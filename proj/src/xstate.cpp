#include "qcorr/xstate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

std::array<double, 4> block_pair_spectrum(double d1, double d2, cplx off1,
                                          double d3, double d4, cplx off2) {
    const double h1 = 0.5 * (d1 + d2);
    const double g1 = std::hypot(0.5 * (d1 - d2), std::abs(off1));
    const double h2 = 0.5 * (d3 + d4);
    const double g2 = std::hypot(0.5 * (d3 - d4), std::abs(off2));
    return {h1 + g1, h1 - g1, h2 + g2, h2 - g2};
}

void check_invariants(double r11, double r22, double r33, double r44,
                      cplx r14, cplx r23, double tol) {
    const double tr = r11 + r22 + r33 + r44;
    if (std::abs(tr - 1.0) > tol)
        throw ValidationError("state trace " + std::to_string(tr) + " deviates from 1 beyond tolerance");
    const auto ev = block_pair_spectrum(r11, r44, r14, r22, r33, r23);
    for (double v : ev)
        if (v < -tol)
            throw ValidationError("state has negative eigenvalue " + std::to_string(v));
    if (!std::isfinite(std::abs(r14)) || !std::isfinite(std::abs(r23)))
        throw ValidationError("state contains non-finite entries");
}

double norm1(cplx a) { return std::abs(a); }

} // namespace

XState::XState(double r11, double r22, double r33, double r44, cplx r14,
               cplx r23, double tol)
    : r11_(r11), r22_(r22), r33_(r33), r44_(r44), r14_(r14), r23_(r23) {
    check_invariants(r11_, r22_, r33_, r44_, r14_, r23_, tol);
}

XState XState::from_matrix(const Mat4& rho, double tol) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol)
        throw ValidationError("matrix is not Hermitian (defect " + std::to_string(herm) + ")");
    const double offx = x_violation(rho);
    if (offx > tol)
        throw ValidationError("matrix is not X-form (off-pattern weight " + std::to_string(offx) + ")");
    const double im_diag = std::max(
        std::max(std::abs(rho(0, 0).imag()), std::abs(rho(1, 1).imag())),
        std::max(std::abs(rho(2, 2).imag()), std::abs(rho(3, 3).imag())));
    if (im_diag > tol)
        throw ValidationError("diagonal has imaginary weight " + std::to_string(im_diag));
    const cplx r14 = 0.5 * (rho(0, 3) + std::conj(rho(3, 0)));
    const cplx r23 = 0.5 * (rho(1, 2) + std::conj(rho(2, 1)));
    return XState(rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(),
                  rho(3, 3).real(), r14, r23, tol);
}

XState XState::from_parts(double r11, double r44, cplx r14,
                          const BlockCoords& bc, double tol) {
    const double r22 = 0.5 * (bc.a1 + bc.a2) + bc.a3.real();
    const double r33 = 0.5 * (bc.a1 + bc.a2) - bc.a3.real();
    const cplx r23(0.5 * (bc.a1 - bc.a2), bc.a3.imag());
    return XState(r11, r22, r33, r44, r14, r23, tol);
}

Mat4 XState::matrix() const {
    Mat4 rho = Mat4::Zero();
    rho(0, 0) = r11_;
    rho(1, 1) = r22_;
    rho(2, 2) = r33_;
    rho(3, 3) = r44_;
    rho(0, 3) = r14_;
    rho(3, 0) = std::conj(r14_);
    rho(1, 2) = r23_;
    rho(2, 1) = std::conj(r23_);
    return rho;
}

BlockCoords XState::block_coords() const {
    BlockCoords bc;
    bc.a1 = 0.5 * (r22_ + r33_) + r23_.real();
    bc.a2 = 0.5 * (r22_ + r33_) - r23_.real();
    bc.a3 = cplx(0.5 * (r22_ - r33_), r23_.imag());
    return bc;
}

std::array<double, 4> XState::eigenvalues() const {
    return block_pair_spectrum(r11_, r44_, r14_, r22_, r33_, r23_);
}

const char* family_name(Family f) {
    switch (f) {
    case Family::product: return "product";
    case Family::bell1: return "bell1";
    case Family::bell2: return "bell2";
    case Family::werner: return "werner";
    }
    return "?";
}

int family_index(Family f) { return static_cast<int>(f); }

XState product_state(double alpha0) {
    if (std::abs(alpha0) > 1.0)
        throw ValidationError("product family needs |alpha0| <= 1");
    const double a2 = alpha0 * alpha0;
    const double b2 = 1.0 - a2;
    return XState(a2 * a2, a2 * b2, a2 * b2, b2 * b2, 0.0, 0.0);
}

namespace {
cplx default_beta(cplx alpha, const char* who) {
    const double rest = 1.0 - std::norm(alpha);
    if (rest < -1e-12)
        throw ValidationError(std::string(who) + " needs |alpha| <= 1");
    return cplx(std::sqrt(std::max(rest, 0.0)), 0.0);
}
void check_unit(cplx alpha, cplx beta, const char* who) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
        throw ValidationError(std::string(who) + " amplitudes are not normalized");
}
} // namespace

XState bell1_state(cplx alpha1) { return bell1_state(alpha1, default_beta(alpha1, "bell1")); }

XState bell1_state(cplx alpha1, cplx beta1) {
    check_unit(alpha1, beta1, "bell1");
    // |Psi_1> = alpha1 |-+> + beta1 |+->: population |beta1|^2 on |+->,
    // |alpha1|^2 on |-+>, coherence <+-|rho|-+> = beta1 conj(alpha1).
    return XState(0.0, std::norm(beta1), std::norm(alpha1), 0.0, 0.0,
                  beta1 * std::conj(alpha1));
}

XState bell2_state(cplx alpha2) { return bell2_state(alpha2, default_beta(alpha2, "bell2")); }

XState bell2_state(cplx alpha2, cplx beta2) {
    check_unit(alpha2, beta2, "bell2");
    return XState(std::norm(beta2), 0.0, 0.0, std::norm(alpha2),
                  beta2 * std::conj(alpha2), 0.0);
}

XState werner_state(int k, double alpha3) {
    return werner_state(k, alpha3, cplx(std::numbers::sqrt2 / 2.0, 0.0));
}

XState werner_state(int k, double alpha3, cplx alpha_k) {
    if (k != 1 && k != 2)
        throw ValidationError("werner backbone index must be 1 or 2");
    if (alpha3 < -1.0 / 3.0 - 1e-12 || alpha3 > 1.0 + 1e-12)
        throw ValidationError("werner weight alpha3 must lie in [-1/3, 1]");
    const XState pure = (k == 1) ? bell1_state(alpha_k) : bell2_state(alpha_k);
    const double w = alpha3;
    const double m = 0.25 * (1.0 - w);
    return XState(w * pure.r11() + m, w * pure.r22() + m, w * pure.r33() + m,
                  w * pure.r44() + m, w * pure.r14(), w * pure.r23());
}

XState make_state(const InitialCondition& ic) {
    switch (ic.family) {
    case Family::product:
        return product_state(ic.alpha);
    case Family::bell1:
        return ic.beta ? bell1_state(ic.alpha, *ic.beta) : bell1_state(ic.alpha);
    case Family::bell2:
        return ic.beta ? bell2_state(ic.alpha, *ic.beta) : bell2_state(ic.alpha);
    case Family::werner:
        return werner_state(ic.werner_k, ic.alpha, ic.werner_backbone_alpha);
    }
    throw ValidationError("unknown initial-condition family");
}

Mat4 x_projection(const Mat4& rho) {
    Mat4 out = Mat4::Zero();
    // Conjugation by P = diag(1,-1,-1,1) flips the sign of every entry with
    // exactly one index in {2,3}; averaging keeps the X pattern and removes
    // the rest.
    out(0, 0) = rho(0, 0);
    out(1, 1) = rho(1, 1);
    out(2, 2) = rho(2, 2);
    out(3, 3) = rho(3, 3);
    out(0, 3) = rho(0, 3);
    out(3, 0) = rho(3, 0);
    out(1, 2) = rho(1, 2);
    out(2, 1) = rho(2, 1);
    return out;
}

double x_violation(const Mat4& rho) {
    double m = 0.0;
    static constexpr int off_rows[8] = {0, 0, 1, 1, 2, 2, 3, 3};
    static constexpr int off_cols[8] = {1, 2, 0, 3, 0, 3, 1, 2};
    for (int i = 0; i < 8; ++i)
        m = std::max(m, norm1(rho(off_rows[i], off_cols[i])));
    return m;
}

XState random_xstate(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::exponential_distribution<double> ex(1.0);
    double p[4];
    double s = 0.0;
    for (double& v : p) {
        v = ex(gen);
        s += v;
    }
    for (double& v : p) v /= s;
    const double m14 = u01(gen) * std::sqrt(p[0] * p[3]);
    const double m23 = u01(gen) * std::sqrt(p[1] * p[2]);
    const double ph14 = 2.0 * std::numbers::pi * u01(gen);
    const double ph23 = 2.0 * std::numbers::pi * u01(gen);
    return XState(p[0], p[1], p[2], p[3], std::polar(m14, ph14),
                  std::polar(m23, ph23));
}

std::string state_csv_header() {
    std::ostringstream os;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i || j) os << ',';
            os << "re_r" << i + 1 << j + 1 << ",im_r" << i + 1 << j + 1;
        }
    return os.str();
}

std::string state_csv_row(const Mat4& rho) {
    char buf[64];
    std::string row;
    row.reserve(32 * 26);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", rho(i, j).real(),
                          rho(i, j).imag());
            if (i || j) row += ',';
            row += buf;
        }
    return row;
}

} // namespace qcorr
