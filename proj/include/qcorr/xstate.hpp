#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace qcorr {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;

/// Default tolerance for the state invariants (Hermiticity, unit trace,
/// positive semidefiniteness, X-form pattern).
inline constexpr double kStateTol = 1e-10;

/// Coordinates of the {|+->, |-+>} block of an X-state:
///   a1 = (r22 + r33)/2 + Re r23
///   a2 = (r22 + r33)/2 - Re r23   (conserved by the channel)
///   a3 = (r22 - r33)/2 + i Im r23
/// The map (r22, r33, r23) <-> (a1, a2, a3) is a linear bijection.
struct BlockCoords {
    double a1 = 0.0;
    double a2 = 0.0;
    cplx a3{0.0, 0.0};
};

/// Two-qubit X-form density matrix in the product basis
/// |1> = |++>, |2> = |+->, |3> = |-+>, |4> = |-->.
/// Kept in terms of its six independent entries; immutable after construction.
class XState {
public:
    /// Maximally mixed state.
    XState() : r11_(0.25), r22_(0.25), r33_(0.25), r44_(0.25) {}

    /// Builds from the six independent entries and validates all invariants.
    XState(double r11, double r22, double r33, double r44, cplx r14, cplx r23,
           double tol = kStateTol);

    /// Accepts a dense matrix that is X-form up to `tol`; rejects anything
    /// with off-pattern weight above it.
    static XState from_matrix(const Mat4& rho, double tol = kStateTol);

    /// Assembles a state from the {1,4}-block data and the block coordinates
    /// of the {2,3} block.
    static XState from_parts(double r11, double r44, cplx r14,
                             const BlockCoords& bc, double tol = kStateTol);

    double r11() const { return r11_; }
    double r22() const { return r22_; }
    double r33() const { return r33_; }
    double r44() const { return r44_; }
    cplx r14() const { return r14_; }
    cplx r23() const { return r23_; }

    Mat4 matrix() const;
    BlockCoords block_coords() const;

    /// Closed-form spectrum: each 2x2 block contributes the pair
    /// (tr/2) +/- sqrt((d/2)^2 + |off|^2). Order: {1,4}-block pair
    /// (larger first), then {2,3}-block pair.
    std::array<double, 4> eigenvalues() const;

private:
    double r11_ = 1.0, r22_ = 0.0, r33_ = 0.0, r44_ = 0.0;
    cplx r14_{0.0, 0.0}, r23_{0.0, 0.0};
};

/// Initial-condition families, indexed as in the model labels (C0..C3 etc.).
enum class Family { product = 0, bell1 = 1, bell2 = 2, werner = 3 };

const char* family_name(Family f);
int family_index(Family f);

/// Dephased two-qubit product state: diag(a^4, a^2 b^2, a^2 b^2, b^4)
/// with b^2 = 1 - a^2. Requires |alpha0| <= 1.
XState product_state(double alpha0);

/// Pure |Psi_1> = alpha1 |-+> + beta1 |+->. The one-argument form takes
/// beta1 = sqrt(1 - |alpha1|^2) >= 0; the two-argument form requires
/// |alpha1|^2 + |beta1|^2 = 1 to 1e-12.
XState bell1_state(cplx alpha1);
XState bell1_state(cplx alpha1, cplx beta1);

/// Pure |Psi_2> = alpha2 |--> + beta2 |++>, conventions as above.
XState bell2_state(cplx alpha2);
XState bell2_state(cplx alpha2, cplx beta2);

/// Mixture alpha3 |Psi_k><Psi_k| + (1 - alpha3) I/4 with k in {1,2} and
/// alpha3 in [-1/3, 1]; the backbone amplitude alpha_k defaults to 1/sqrt(2).
XState werner_state(int k, double alpha3);
XState werner_state(int k, double alpha3, cplx alpha_k);

/// Family tag plus the parameters the CLI exposes. `beta` stays empty for
/// the default beta = sqrt(1 - alpha^2) convention.
struct InitialCondition {
    Family family = Family::bell1;
    double alpha = 0.7071067811865476;       // alpha_0..alpha_3 by family
    std::optional<double> beta;              // bell families only
    int werner_k = 1;                        // backbone Bell family
    double werner_backbone_alpha = 0.7071067811865476;  // alpha_k
};

XState make_state(const InitialCondition& ic);

/// Projector onto the X pattern: (rho + P rho P)/2 with P = diag(1,-1,-1,1).
/// Fixes every X entry and zeroes the off-pattern ones.
Mat4 x_projection(const Mat4& rho);

/// Largest off-pattern modulus of a dense matrix.
double x_violation(const Mat4& rho);

/// Uniform-ish random valid X-state: populations from a flat simplex draw,
/// coherence moduli uniform within their positivity bounds, phases uniform.
XState random_xstate(std::mt19937_64& gen);

/// CSV serialization of a dense 4x4 state: 16 entries, row-major, each as a
/// re/im pair, 17 significant digits (round-trip exact).
std::string state_csv_header();
std::string state_csv_row(const Mat4& rho);

} // namespace qcorr
