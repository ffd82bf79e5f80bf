#pragma once

#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qcorr {

using cplx = std::complex<double>;

/// Environment spectral density nu0 together with the integral transforms the
/// rest of the library needs. Implementations are immutable and thread-safe.
class DensityOfStates {
public:
    virtual ~DensityOfStates() = default;

    /// nu0(e).
    virtual double eval(double e) const = 0;

    /// Principal-value transform  pv Int nu0(u) / (u - y) du.
    virtual double hilbert_pv(double y) const = 0;

    /// Stieltjes transform  Int nu0(E) / (E - z) dE, defined off the real
    /// axis only.
    virtual cplx stieltjes(cplx z) const = 0;

    /// Inverse CDF at u in (0, 1), for drawing environment spectra.
    virtual double sample(double u) const = 0;

    /// Closed support; +-infinity for densities with full-line tails.
    virtual std::pair<double, double> support() const = 0;

    /// True for the constant-rate variant, which short-circuits the rate and
    /// phase computations below.
    virtual bool is_flat() const { return false; }

    /// One-line parameter description for run manifests.
    virtual std::string describe() const = 0;
};

/// nu0(e) = gamma / (pi (e^2 + gamma^2)). All transforms in closed form.
class LorentzianDos final : public DensityOfStates {
public:
    explicit LorentzianDos(double gamma);
    double eval(double e) const override;
    double hilbert_pv(double y) const override;
    cplx stieltjes(cplx z) const override;
    double sample(double u) const override;
    std::pair<double, double> support() const override;
    std::string describe() const override;
    double gamma() const { return gamma_; }

private:
    double gamma_;
};

/// Constant-rate environment, parametrized directly by Gamma0 because a flat
/// density on the whole line is not normalizable. eval returns the constant
/// gamma0 / (2 pi) so the generic rate formula still lands on Gamma0; both
/// principal-value phases are 0 in this variant; sampling and the Stieltjes
/// transform are rejected.
class FlatDos final : public DensityOfStates {
public:
    explicit FlatDos(double gamma0);
    double eval(double e) const override;
    double hilbert_pv(double y) const override;
    cplx stieltjes(cplx z) const override;
    double sample(double u) const override;
    std::pair<double, double> support() const override;
    bool is_flat() const override { return true; }
    std::string describe() const override;
    double gamma0() const { return gamma0_; }

private:
    double gamma0_;
};

/// Piecewise-linear density on a finite grid, 0 outside. The trapezoid
/// integral must come out within 1e-6 of 1; the values are then rescaled so
/// it is exactly 1. All transforms are exact per-segment integrals; the
/// principal value additionally runs the excision/extrapolation loop so
/// pole-straddling kinks are handled.
class TabulatedDos final : public DensityOfStates {
public:
    TabulatedDos(std::vector<double> energies, std::vector<double> values);
    static TabulatedDos from_file(const std::string& path);

    double eval(double e) const override;
    double hilbert_pv(double y) const override;
    cplx stieltjes(cplx z) const override;
    double sample(double u) const override;
    std::pair<double, double> support() const override;
    std::string describe() const override;

private:
    /// Exact Int nu0(u)/(u - y) du over [a, b], which must not contain y.
    double segment_pv(double a, double b, double y) const;

    std::vector<double> e_, v_, cdf_;
};

/// Decay rates and principal-value phases evaluated at the environment
/// energy e and qubit splitting 2s:
///   gamma0 = Gamma(e), gamma_plus/minus = Gamma(e +/- 2s),
///   gamma_2plus/2minus = Gamma(e +/- 4s), with Gamma(x) = 2 pi nu0(x);
///   gamma_tilde_a = gamma0 + gamma_a + gamma_2a;
///   gamma_sum = gamma_plus + gamma_minus; gamma_tilde_sum = gamma0 + gamma_sum.
struct RateSet {
    double gamma0 = 0.0;
    double gamma_plus = 0.0, gamma_minus = 0.0;
    double gamma_2plus = 0.0, gamma_2minus = 0.0;
    double gamma_tilde_plus = 0.0, gamma_tilde_minus = 0.0;
    double gamma_sum = 0.0, gamma_tilde_sum = 0.0;
    double psi_plus = 0.0, psi_minus = 0.0;
    /// Set when a tabulated density was probed outside its grid; the affected
    /// rates are 0 rather than an error.
    bool outside_support = false;
};

RateSet rates(const DensityOfStates& dos, double e_env, double s);

/// (psi_plus, psi_minus):
///   psi_plus  = -8 s  pv Int nu0(u) / ((u - e)^2 - 4 s^2) du
///   psi_minus =  4    pv Int nu0(u) (u - e) / ((u - e)^2 - 4 s^2) du
/// evaluated by partial fractions through hilbert_pv at e +/- 2s.
std::pair<double, double> pv_phases(const DensityOfStates& dos, double e_env,
                                    double s);

/// Independent evaluation of hilbert_pv by symmetric excision around the pole
/// with Richardson extrapolation in the excision half-width, integrating
/// nu0 through eval() only. Cross-checks the closed forms in the tests.
double hilbert_pv_numeric(const DensityOfStates& dos, double y);

/// Parses "lorentzian", "flat", "file:PATH" descriptors plus their parameters into
/// a concrete density. gamma is required for lorentzian, gamma0 for flat.
std::unique_ptr<DensityOfStates> make_dos(const std::string& kind, double gamma,
                                          double gamma0);

} // namespace qcorr
