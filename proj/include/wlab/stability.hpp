#ifndef WLAB_STABILITY_HPP
#define WLAB_STABILITY_HPP

#include <array>
#include <utility>
#include <vector>

#include "wlab/geometry.hpp"

namespace wlab {

/// Pointwise decomposition of the deviation h = f - f0 in the orthonormal
/// frame {sqrt2 f0_theta, sqrt2 f0_phi, n, f0} of R^4 along the reference
/// torus: h = v1 f0_theta + v2 f0_phi + z n + w f0.
struct DeviationDecomposition {
    ScalarField v1;
    ScalarField v2;
    ScalarField z;
    ScalarField w; // equals -|h|^2 / 2 pointwise
};

/// Constant conformal-class coefficients (a, b, c) with ac - b^2 = 1/4, the
/// log conformal factor u, and the RMS non-conformality defect of the fit.
struct ConformalStructure {
    double a = 0.5;
    double b = 0.0;
    double c = 0.5;
    ScalarField u;
    double defect = 0.0;

    explicit ConformalStructure(const TorusGrid& g) : u(g) {}
};

struct StabilityReport {
    double delta = 0.0;        // sqrt(max(W - 2 pi^2, 0))
    double dist_w22 = 0.0;     // ||f - f0||_{W^{2,2}} after normalization
    double u_inf = 0.0;        // sup |u|
    double moduli_gap = 0.0;   // |a - 1/2| + |b| + |c - 1/2|
    double area_gap = 0.0;     // |Area - 2 pi^2|
    double h_l2 = 0.0;         // ||H||_{L^2(dA)}
    double ratio_w22_h = 0.0;  // dist_w22 / h_l2
    double ratio_w22_delta = 0.0;
    double willmore = 0.0;
    double area = 0.0;
};

struct RotationNormalization {
    Mat4 rotation;
    Immersion normalized;
};

/// Orthogonal Procrustes alignment: the rotation R in SO(4) minimizing
/// \int |R f - f0|^2, solved by SVD of the cross-covariance with the sign
/// corrected on the last singular direction. Throws SingularCovariance.
RotationNormalization rotation_normalize(const Immersion& f);

/// \int |R f - f0|^2 dtheta dphi for an arbitrary rotation (oracle helper).
double procrustes_objective(const Mat4& rotation, const Immersion& f);

/// The six first-order optimality integrals \int <A_ij f, f0> over the
/// standard so(4) basis, in the order (12), (13), (14), (23), (24), (34).
/// All vanish at the Procrustes optimum.
std::array<double, 6> balance_residuals(const Immersion& f_normalized);

/// Throws NotGraphLike unless <f, f0> > 0 at every node.
DeviationDecomposition decompose_deviation(const Immersion& f);

/// u from the determinant identity e^{4u}/4 = det g; (a, b, c) from the
/// two-parameter fit of e^{-2u} g to a constant matrix of determinant 1/4.
ConformalStructure extract_conformal_structure(const Immersion& f);

/// Orthogonal projection onto Ker(laplacian + 2) =
/// span{cos cos, cos sin, sin cos, sin sin} of the (1,1) harmonics,
/// exact in Fourier space. Returns (projection, complement).
std::pair<ScalarField, ScalarField> kernel_project(const ScalarField& z);

/// (laplacian + 2) z, spectrally.
ScalarField apply_helmholtz(const ScalarField& z);

/// Mode-wise inverse of (laplacian + 2) on the kernel complement.
/// Throws KernelObstruction if the right-hand side has kernel mass > 1e-10.
ScalarField solve_helmholtz(const ScalarField& rhs);

/// The sharp constant G in ||z||_{W^{1,2}} <= G ||(laplacian+2) z||_{W^{-1,2}}
/// on the kernel complement: max over |k|^2 != 2 of (1+|k|^2)/|2-|k|^2|.
double helmholtz_gap_constant();

/// Residual fields of the first-order Cauchy-Riemann system relating the
/// tangential deviation to the conformal data; identically zero for exactly
/// conformally parametrized surfaces.
std::pair<ScalarField, ScalarField> cr_residual(const DeviationDecomposition& dec,
                                                const ConformalStructure& cs,
                                                const Immersion& f);

/// Weak-form residuals \int (grad k . grad z - (2 + psi) k z) dtheta dphi
/// against the test modes k = cos(m theta + n phi), psi = e^{2u} - 1.
std::vector<double> weak_z_residual(const DeviationDecomposition& dec,
                                    const ConformalStructure& cs,
                                    const std::vector<std::pair<int, int>>& test_modes);

/// Full pipeline: rotation normalization, deviation decomposition, conformal
/// structure, norms. Requires dist_w22 <= 0.5 after normalization.
StabilityReport stability_report(const Immersion& f_raw);

} // namespace wlab

#endif
