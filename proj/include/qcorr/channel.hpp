#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qcorr/dos.hpp"
#include "qcorr/quantifiers.hpp"
#include "qcorr/xstate.hpp"

namespace qcorr {

struct MarkovDiagnostic {
    double det_phi3_inf = 0.0;
    double max_semigroup_residual = 0.0;
    bool is_flat = false;  // all five rates equal and both phases zero
};

/// A concurrence zero crossing along a trajectory: death when the
/// concurrence drops to zero, birth when it revives.
struct TrajectoryEvent {
    double tau = 0.0;
    bool death = true;
};

struct Trajectory {
    std::vector<double> taus;
    std::vector<XState> states;
    std::vector<QuantifierReport> reports;
    std::vector<TrajectoryEvent> events;
};

/// Scaled-time reduced dynamics of two qubits coupled to one shared
/// environment, parametrized entirely by a RateSet. The populations
/// (r11, a1, r44) evolve by a 3x3 matrix, a2 is conserved, and the two
/// coherences pick up damped phase factors.
class CommonEnvChannel {
public:
    explicit CommonEnvChannel(const RateSet& r) : rates_(r) {}
    static CommonEnvChannel from_dos(const DensityOfStates& dos, double e_env,
                                     double s) {
        return CommonEnvChannel(rates(dos, e_env, s));
    }

    const RateSet& rate_set() const { return rates_; }

    /// Matrix acting on the column (r11, a1, r44) at scaled time tau.
    /// Columns sum to 1 (trace preservation) and all entries are
    /// non-negative for tau >= 0.
    Eigen::Matrix3d channel_matrix(double tau) const;

    /// tau -> infinity limit of channel_matrix. Columns sum to 1; invertible
    /// for structured environments, rank one for the constant-rate variant.
    Eigen::Matrix3d stationary_matrix() const;

    /// Damped phase factor exp((-gamma_sum + i psi_plus) tau) on r14.
    cplx coherence_factor_outer(double tau) const;

    /// Damped phase factor exp((-gamma_sum + i psi_minus) tau) on a3.
    cplx coherence_factor_inner(double tau) const;

    XState evolve(const XState& rho0, double tau) const;

    /// Same evolution assembled through the printed 2x2 block composition
    /// (projectors onto the block diagonals and off-diagonals). Retained as
    /// an independent cross-check of evolve; agrees entrywise to 1e-10.
    XState evolve_blockform(const XState& rho0, double tau) const;

    /// Closed-form infinite-time state. Requires both one-sided decay rates
    /// positive so every transient actually dies out.
    XState stationary(const XState& rho0) const;

    MarkovDiagnostic markov_diagnostic() const;

private:
    double q_alpha(int alpha, double tau) const;
    RateSet rates_;
};

/// Generator of the constant-rate channel: channel_matrix(tau) equals
/// exp(-tau L3) exactly in that case. Spectrum {0, 2 g0, 6 g0} with
/// eigenvectors (1,1,1)/sqrt3, (1,-2,1)/sqrt6, (1,0,-1)/sqrt2.
Eigen::Matrix3d flat_generator(double gamma0);

/// Evolves over the given ascending non-negative grid, reports all four
/// quantifiers per point, and locates concurrence death/birth events by
/// bisection to a tau resolution of 1e-4 (concurrence below 1e-9 counts
/// as zero).
Trajectory trajectory(const CommonEnvChannel& ch, const XState& rho0,
                      const std::vector<double>& taus);

} // namespace qcorr
