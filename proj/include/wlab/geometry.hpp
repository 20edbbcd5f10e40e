#ifndef WLAB_GEOMETRY_HPP
#define WLAB_GEOMETRY_HPP

#include "wlab/immersion.hpp"

namespace wlab {

/// Pointwise first/second fundamental forms and derived curvature fields of
/// a grid immersion, with the surface points and unit normal retained.
/// The normal lies in T S^3, orthogonal to the surface tangent plane, with
/// orientation continuing (-phi, psi) on the minimal flat torus.
struct SurfaceGeometry {
    TorusGrid grid;
    Vec4Field points;
    Vec4Field normal;
    ScalarField g11, g12, g22;   // first fundamental form
    ScalarField a11, a12, a22;   // second fundamental form w.r.t. normal
    ScalarField mean_curvature;  // trace of the shape operator
    ScalarField gauss_curvature; // intrinsic, K = 1 + det(shape)
    ScalarField second_form_sq;  // |A|^2_g
    ScalarField tracefree_sq;    // |A - (H/2) g|^2_g
    ScalarField area_density;    // sqrt(det g)

    explicit SurfaceGeometry(const TorusGrid& g);
};

/// Computes all geometry fields from the cached derivatives.
/// Throws DegenerateImmersion if det g <= 1e-14 at a node.
SurfaceGeometry compute_geometry(const Immersion& f);

/// \int (1 + H^2/4) dA.
double willmore_energy(const SurfaceGeometry& geom);
/// \int dA.
double area(const SurfaceGeometry& geom);
/// \int K dA (zero for tori, Gauss-Bonnet).
double total_gauss_curvature(const SurfaceGeometry& geom);
/// \int |A - (H/2) g|^2 dA, conformally invariant.
double tracefree_energy(const SurfaceGeometry& geom);
/// \int (|A|^2 + 2) dA, the squared full second fundamental form of the
/// surface viewed in R^4; equals 4 W for tori.
double ambient_second_form_energy(const SurfaceGeometry& geom);

} // namespace wlab

#endif
