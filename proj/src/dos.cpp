#include "qcorr/dos.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

constexpr double kPi = std::numbers::pi;

/// Shared excision/extrapolation driver. `plain(a, b)` must integrate
/// nu0(u)/(u - y) over an interval that excludes y. The two-point Richardson
/// step 2 I(h/2) - I(h) removes the O(h) excision error exactly for locally
/// linear densities, so the loop terminates after a few halvings.
double excised_pv(const std::function<double(double, double)>& plain, double y,
                  double lo, double hi, double h0) {
    const auto estimate = [&](double h) {
        double total = 0.0;
        if (y - h > lo) total += plain(lo, y - h);
        if (y + h < hi) total += plain(y + h, hi);
        return total;
    };
    double h = h0;
    double ih = estimate(h);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < 48; ++k) {
        const double ih2 = estimate(0.5 * h);
        const double rich = 2.0 * ih2 - ih;
        if (k > 0 && std::abs(rich - prev) < 1e-6) return rich;
        prev = rich;
        ih = ih2;
        h *= 0.5;
    }
    throw ConvergenceError(
        "principal-value excision did not settle below 1e-6 (last estimate " +
        std::to_string(prev) + ")");
}

} // namespace

// ---------------------------------------------------------------------------
// Lorentzian

LorentzianDos::LorentzianDos(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0))
        throw ValidationError("lorentzian width gamma must be positive");
}

double LorentzianDos::eval(double e) const {
    return gamma_ / (kPi * (e * e + gamma_ * gamma_));
}

double LorentzianDos::hilbert_pv(double y) const {
    return -y / (y * y + gamma_ * gamma_);
}

cplx LorentzianDos::stieltjes(cplx z) const {
    if (z.imag() == 0.0)
        throw ValidationError("Stieltjes transform needs Im z != 0");
    const double sgn = z.imag() > 0.0 ? 1.0 : -1.0;
    return -1.0 / (z + cplx(0.0, sgn * gamma_));
}

double LorentzianDos::sample(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw ValidationError("inverse CDF argument must lie in (0, 1)");
    return gamma_ * std::tan(kPi * (u - 0.5));
}

std::pair<double, double> LorentzianDos::support() const {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
}

std::string LorentzianDos::describe() const {
    std::ostringstream os;
    os << "lorentzian gamma=" << gamma_;
    return os.str();
}

// ---------------------------------------------------------------------------
// Flat

FlatDos::FlatDos(double gamma0) : gamma0_(gamma0) {
    if (!(gamma0 > 0.0))
        throw ValidationError("flat rate gamma0 must be positive");
}

double FlatDos::eval(double) const { return gamma0_ / (2.0 * kPi); }

double FlatDos::hilbert_pv(double) const { return 0.0; }

cplx FlatDos::stieltjes(cplx) const {
    throw ValidationError("flat density has no Stieltjes transform (not normalizable)");
}

double FlatDos::sample(double) const {
    throw ValidationError("flat density cannot be sampled (not normalizable)");
}

std::pair<double, double> FlatDos::support() const {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
}

std::string FlatDos::describe() const {
    std::ostringstream os;
    os << "flat gamma0=" << gamma0_;
    return os.str();
}

// ---------------------------------------------------------------------------
// Tabulated

TabulatedDos::TabulatedDos(std::vector<double> energies,
                           std::vector<double> values)
    : e_(std::move(energies)), v_(std::move(values)) {
    if (e_.size() != v_.size() || e_.size() < 2)
        throw ValidationError("tabulated density needs >= 2 matching (energy, value) pairs");
    for (std::size_t i = 0; i + 1 < e_.size(); ++i)
        if (!(e_[i + 1] > e_[i]))
            throw ValidationError("tabulated energies must be strictly increasing");
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < e_.size(); ++i) {
        if (v_[i] < 0.0 || v_[i + 1] < 0.0)
            throw ValidationError("tabulated density values must be non-negative");
        integral += 0.5 * (v_[i] + v_[i + 1]) * (e_[i + 1] - e_[i]);
    }
    if (std::abs(integral - 1.0) > 1e-6)
        throw ValidationError("tabulated density integrates to " +
                              std::to_string(integral) +
                              ", more than 1e-6 away from 1");
    for (double& x : v_) x /= integral;
    cdf_.assign(e_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < e_.size(); ++i)
        cdf_[i + 1] =
            cdf_[i] + 0.5 * (v_[i] + v_[i + 1]) * (e_[i + 1] - e_[i]);
}

TabulatedDos TabulatedDos::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open density file: " + path);
    std::vector<double> es, vs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double e, v;
        if (!(ls >> e)) continue;  // blank or comment-only line
        if (!(ls >> v))
            throw ValidationError("density file " + path + " line " +
                                  std::to_string(lineno) +
                                  ": expected two columns");
        es.push_back(e);
        vs.push_back(v);
    }
    return TabulatedDos(std::move(es), std::move(vs));
}

double TabulatedDos::eval(double e) const {
    if (e <= e_.front() || e >= e_.back()) {
        // Endpoint values still count on the closed support boundary.
        if (e == e_.front()) return v_.front();
        if (e == e_.back()) return v_.back();
        return 0.0;
    }
    const auto it = std::upper_bound(e_.begin(), e_.end(), e);
    const std::size_t i = static_cast<std::size_t>(it - e_.begin()) - 1;
    const double t = (e - e_[i]) / (e_[i + 1] - e_[i]);
    return v_[i] + t * (v_[i + 1] - v_[i]);
}

double TabulatedDos::segment_pv(double a, double b, double y) const {
    // Exact integral of the piecewise-linear density against 1/(u - y):
    // on each linear piece nu(u) = nu_at_y + slope (u - y), so the integral
    // contributes slope * (length) + nu_at_y * log |(b' - y)/(a' - y)|.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < e_.size(); ++i) {
        const double lo = std::max(a, e_[i]);
        const double hi = std::min(b, e_[i + 1]);
        if (hi <= lo) continue;
        const double slope = (v_[i + 1] - v_[i]) / (e_[i + 1] - e_[i]);
        const double nu_at_y = v_[i] + slope * (y - e_[i]);
        total += slope * (hi - lo) +
                 nu_at_y * std::log(std::abs((hi - y) / (lo - y)));
    }
    return total;
}

double TabulatedDos::hilbert_pv(double y) const {
    const double lo = e_.front(), hi = e_.back();
    if (y <= lo || y >= hi) {
        if (y == lo || y == hi) {
            // Logarithmic endpoint singularity: fall back to a slightly
            // nudged interior evaluation; the density vanishing there keeps
            // the limit finite whenever nu0(y) = 0.
            const double eps = 1e-9 * (hi - lo);
            return hilbert_pv(y == lo ? y + eps : y - eps);
        }
        return segment_pv(lo, hi, y);
    }
    const double h0 = 0.5 * std::min(y - lo, hi - y);
    return excised_pv([this, y](double a, double b) { return segment_pv(a, b, y); },
                      y, lo, hi, h0);
}

cplx TabulatedDos::stieltjes(cplx z) const {
    if (z.imag() == 0.0)
        throw ValidationError("Stieltjes transform needs Im z != 0");
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < e_.size(); ++i) {
        const double slope = (v_[i + 1] - v_[i]) / (e_[i + 1] - e_[i]);
        const cplx nu_at_z = v_[i] + slope * (z - e_[i]);
        total += slope * (e_[i + 1] - e_[i]) +
                 nu_at_z * (std::log(e_[i + 1] - z) - std::log(e_[i] - z));
    }
    return total;
}

double TabulatedDos::sample(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw ValidationError("inverse CDF argument must lie in (0, 1)");
    const double target = u;  // cdf_ is normalized along with v_
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    i = std::min(std::max<std::size_t>(i, 1), cdf_.size() - 1) - 1;
    const double need = target - cdf_[i];
    const double dx = e_[i + 1] - e_[i];
    const double slope = (v_[i + 1] - v_[i]) / dx;
    // Solve v_i t + slope t^2 / 2 = need for t in [0, dx].
    double t;
    if (std::abs(slope) < 1e-14 * std::max(v_[i], 1.0)) {
        t = v_[i] > 0.0 ? need / v_[i] : 0.0;
    } else {
        const double disc = v_[i] * v_[i] + 2.0 * slope * need;
        t = (-v_[i] + std::sqrt(std::max(disc, 0.0))) / slope;
    }
    return e_[i] + std::clamp(t, 0.0, dx);
}

std::pair<double, double> TabulatedDos::support() const {
    return {e_.front(), e_.back()};
}

std::string TabulatedDos::describe() const {
    std::ostringstream os;
    os << "tabulated n=" << e_.size() << " on [" << e_.front() << ","
       << e_.back() << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Rates and phases

RateSet rates(const DensityOfStates& dos, double e_env, double s) {
    if (!(s > 0.0))
        throw ValidationError("qubit splitting s must be positive");
    RateSet r;
    const auto [lo, hi] = dos.support();
    const double probes[5] = {e_env, e_env + 2.0 * s, e_env - 2.0 * s,
                              e_env + 4.0 * s, e_env - 4.0 * s};
    double* slots[5] = {&r.gamma0, &r.gamma_plus, &r.gamma_minus,
                        &r.gamma_2plus, &r.gamma_2minus};
    for (int i = 0; i < 5; ++i) {
        if (probes[i] < lo || probes[i] > hi) r.outside_support = true;
        *slots[i] = 2.0 * kPi * dos.eval(probes[i]);
    }
    if (r.gamma0 == 0.0 && r.gamma_plus == 0.0 && r.gamma_minus == 0.0 &&
        r.gamma_2plus == 0.0 && r.gamma_2minus == 0.0)
        throw ValidationError(
            "degenerate environment: all five rates vanish at this energy");
    r.gamma_tilde_plus = r.gamma0 + r.gamma_plus + r.gamma_2plus;
    r.gamma_tilde_minus = r.gamma0 + r.gamma_minus + r.gamma_2minus;
    r.gamma_sum = r.gamma_plus + r.gamma_minus;
    r.gamma_tilde_sum = r.gamma0 + r.gamma_sum;
    const auto [psi_p, psi_m] = pv_phases(dos, e_env, s);
    r.psi_plus = psi_p;
    r.psi_minus = psi_m;
    return r;
}

std::pair<double, double> pv_phases(const DensityOfStates& dos, double e_env,
                                    double s) {
    if (!(s > 0.0))
        throw ValidationError("qubit splitting s must be positive");
    if (dos.is_flat()) return {0.0, 0.0};
    // Partial fractions split both kernels into simple poles at e +/- 2s:
    //   1/((u-e)^2 - 4s^2)      = [1/(u-e-2s) - 1/(u-e+2s)] / (4s)
    //   (u-e)/((u-e)^2 - 4s^2)  = [1/(u-e-2s) + 1/(u-e+2s)] / 2
    const double j_up = dos.hilbert_pv(e_env + 2.0 * s);
    const double j_dn = dos.hilbert_pv(e_env - 2.0 * s);
    return {-2.0 * (j_up - j_dn), 2.0 * (j_up + j_dn)};
}

double hilbert_pv_numeric(const DensityOfStates& dos, double y) {
    auto [lo, hi] = dos.support();
    // Full-line tails: the densities in scope decay like u^-2, so cutting at
    // 1e8 leaves a tail contribution around 1e-17.
    const double cut = std::max(1e8, std::abs(y) * 10.0);
    if (std::isinf(lo)) lo = -cut;
    if (std::isinf(hi)) hi = cut;
    // Composite Simpson with panel doubling on a fixed interval in the
    // substituted variable.
    const auto simpson = [](const std::function<double(double)>& f, double a,
                            double b) {
        int n = 64;
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int round = 0; round < 14; ++round) {
            const double hstep = (b - a) / n;
            double acc = f(a) + f(b);
            for (int i = 1; i < n; ++i)
                acc += f(a + i * hstep) * (i % 2 ? 4.0 : 2.0);
            const double val = acc * hstep / 3.0;
            if (round > 0 && std::abs(val - prev) < 1e-9) return val;
            prev = val;
            n *= 2;
        }
        return prev;
    };
    // The substitution u = y +/- exp(x) turns Int nu0(u)/(u - y) du on one
    // side of the pole into a plain integral of nu0(y +/- exp(x)) dx, which
    // is smooth and spans only log-many units.
    const auto plain = [&](double a, double b) {
        if (b <= y)
            return -simpson([&](double x) { return dos.eval(y - std::exp(x)); },
                            std::log(y - b), std::log(y - a));
        return simpson([&](double x) { return dos.eval(y + std::exp(x)); },
                       std::log(a - y), std::log(b - y));
    };
    const double h0 = std::min(1.0, 0.25 * std::min(y - lo, hi - y));
    if (!(h0 > 0.0)) return dos.hilbert_pv(y);
    return excised_pv(plain, y, lo, hi, h0);
}

std::unique_ptr<DensityOfStates> make_dos(const std::string& kind, double gamma,
                                          double gamma0) {
    if (kind == "lorentzian") return std::make_unique<LorentzianDos>(gamma);
    if (kind == "flat") return std::make_unique<FlatDos>(gamma0);
    if (kind.rfind("file:", 0) == 0)
        return std::make_unique<TabulatedDos>(
            TabulatedDos::from_file(kind.substr(5)));
    throw ValidationError("unknown density kind '" + kind +
                          "' (expected lorentzian, flat, or file:PATH)");
}

} // namespace qcorr
