#pragma once

// Finite-size Monte Carlo reference for the two-qubit random-matrix bath:
// exact unitary evolution of |system> ⊗ |env level> under sampled couplings,
// ensemble statistics of the reduced two-qubit state, and finite-size
// block resolvent traces used to check the self-consistent limit.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qcorr/channel.hpp"
#include "qcorr/dos.hpp"
#include "qcorr/xstate.hpp"

namespace qcorr {

// Bath topology. `common` couples both qubits to one shared bath through the
// collective flip operator; `independent` gives each qubit its own bath (same
// level spectrum, independently sampled couplings); `free_ancilla` couples
// only the second qubit and lets the first precess freely.
enum class EnvModel { common, independent, free_ancilla };

const char* env_model_name(EnvModel m);
EnvModel parse_env_model(std::string_view name);

struct OracleParams {
    int n = 200;              // environment levels per bath
    double v = 0.2;           // system-bath coupling amplitude
    double s = 1.0;           // single-qubit level splitting
    double env_energy = 0.0;  // target energy for the initial bath level
    int draws = 100;
    std::uint64_t seed = 20260821;
    EnvModel model = EnvModel::common;
    std::vector<double> times;  // lab-frame times, non-negative
    // Explicit bath levels override sampling from the density of states.
    std::optional<std::vector<double>> env_levels;
    // Per-qubit couplings for the independent-bath model; default to v.
    std::optional<double> v_a, v_b;
    std::size_t memory_limit_bytes = std::size_t(2) << 30;
};

// Hermitian draw with E|W_jk|^2 = (1 + delta_jk)/n, eigenvalue support
// converging to [-2, 2].
Eigen::MatrixXcd sample_gue(int n, std::mt19937_64& rng);
Eigen::MatrixXcd sample_gue(int n, std::uint64_t seed);

// n independent levels drawn through the inverse CDF of `dos`, sorted
// ascending. The stream is seeded from `master_seed` alone, so the spectrum
// is shared by every coupling draw of a run.
std::vector<double> sample_env_spectrum(const DensityOfStates& dos, int n,
                                        std::uint64_t master_seed);

// Index of the level closest to `e`; exact ties resolve to the lower index.
int nearest_level_index(const std::vector<double>& env, double e);

// Full-space Hamiltonian for validation at small n. `common` and
// `free_ancilla` return the 4n x 4n matrix on (two qubits) ⊗ (bath), basis
// index a*n + j with a the product-basis slot. `independent` factorizes, so
// it returns the single-qubit 2n x 2n block built from `w`.
Eigen::MatrixXcd build_hamiltonian(EnvModel model,
                                   const std::vector<double>& env,
                                   const Eigen::MatrixXcd& w, double s,
                                   double v);

// Collective-sector reduction of the common-bath Hamiltonian: the shared
// coupling never leaves the span of {|++>, (|+-> + |-+>)/sqrt2, |-->} ⊗ bath,
// so evolution only needs this 3n x 3n block plus a free antisymmetric
// amplitude.
Eigen::MatrixXcd build_triplet_hamiltonian(const std::vector<double>& env,
                                           const Eigen::MatrixXcd& w, double s,
                                           double v);

// Partial trace over the bath of a pure 4n-vector (index a*n + j).
Mat4 reduced_state(const Eigen::VectorXcd& psi);

// Removes the free two-qubit precession: conjugation by
// diag(e^{i2st}, 1, 1, e^{-i2st}).
Mat4 to_interaction_picture(const Mat4& rho_lab, double s, double t);

// Repairs a sampled mean into an exact X-form state: hermitize, project onto
// the checkerboard pattern, clip negative populations, cap coherences at
// their positivity bound, renormalize the trace.
XState sanitize_xstate(const Mat4& m);

struct OracleResult {
    std::vector<double> times;
    std::vector<Mat4> mean;  // lab-frame ensemble mean per time
    // Entrywise Var(Re) + Var(Im) over draws, and sqrt(variance / draws).
    std::vector<Eigen::Matrix4d> variance;
    std::vector<Eigen::Matrix4d> std_error;
    // Largest off-pattern magnitude seen in any single draw (per time).
    std::vector<double> draw_x_violation;
    int draws = 0;
};

OracleResult ensemble(const DensityOfStates& dos, const XState& rho0,
                      const OracleParams& p);

// Picture-invariant comparison of the sampled mean against the limiting
// channel at tau = v^2 t.
struct CompareRow {
    double t = 0.0, tau = 0.0;
    std::array<double, 10> channel_value{};
    std::array<double, 10> sampled_value{};
    std::array<double, 10> deviation{};  // absolute differences
    double mean_x_violation = 0.0;       // off-pattern size before projection
};

const std::array<const char*, 10>& compare_labels();

std::vector<CompareRow> bvh_compare(const OracleResult& mc,
                                    const XState& rho0,
                                    const CommonEnvChannel& channel, double s,
                                    double v);

// Draw-averaged partial traces of (H - z)^{-1} over the two collective
// sectors, normalized so each carries spectral mass 2 as n grows.
struct ResolventTraces {
    cplx g_plus{};
    cplx g_minus{};
    int draws = 0;
};

ResolventTraces mean_block_resolvent_traces(const DensityOfStates& dos,
                                            const OracleParams& p, cplx z);

} // namespace qcorr
