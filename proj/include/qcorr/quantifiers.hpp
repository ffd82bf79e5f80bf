#pragma once

#include "qcorr/xstate.hpp"

namespace qcorr {

/// The four correlation quantifiers of a two-qubit state. Entropy is in bits
/// (base-2 logarithms), so it ranges over [0, 2]; the others over [0, 1].
struct QuantifierReport {
    double negativity = 0.0;
    double concurrence = 0.0;
    double entropy = 0.0;
    double discord = 0.0;
};

/// N = max{0, N1} + max{0, N2} with
///   N1 = sqrt((r11 - r44)^2 + 4 |r23|^2) - r11 - r44,
///   N2 = sqrt((r22 - r33)^2 + 4 |r14|^2) - r22 - r33.
double negativity(const XState& st);

/// C = 2 max{0, C1, C2} with C1 = |r23| - sqrt(r11 r44),
/// C2 = |r14| - sqrt(r22 r33).
double concurrence(const XState& st);

/// Von Neumann entropy from the closed-form block spectrum, 0 log 0 := 0.
double entropy(const XState& st);

/// Same quantity through a generic Hermitian eigensolver; works for any
/// density matrix. Eigenvalues below -1e-10 are rejected as invalid input.
double entropy_of_matrix(const Mat4& rho);

/// Which qubit the discord measurement acts on. B is the defining choice;
/// the A-side value is exposed for symmetry verification.
enum class MeasuredSide { b, a };

struct DiscordOptions {
    MeasuredSide side = MeasuredSide::b;
    int grid = 64;              // coarse grid points per measurement angle
    double tol = 1e-6;          // refinement tolerance in the objective
    int max_rounds = 40;        // coordinate-descent rounds before giving up
};

struct DiscordDetail {
    double value = 0.0;
    double theta = 0.0;         // minimizing measurement direction
    double phi = 0.0;
    double conditional_entropy = 0.0;  // min over measurements of sum p_k S(rho_{A|k})
};

/// D = S(rho_measured-side's partner) - S(rho) + min over one-qubit projective
/// measurements of the average conditional entropy. Minimization runs a
/// coarse (theta, phi) grid followed by per-axis golden-section refinement;
/// for X-form input the objective collapses to one angle and that reduced
/// search is used. Values in [-1e-9, 0) are clipped to 0.
double discord(const XState& st);
DiscordDetail discord_detail(const XState& st, const DiscordOptions& opt);

/// Canonical two-angle search on a dense state, no X reduction. The X-form
/// reduction above is validated against this path in the test suite.
DiscordDetail discord_of_matrix(const Mat4& rho, const DiscordOptions& opt);

QuantifierReport report(const XState& st);

} // namespace qcorr
