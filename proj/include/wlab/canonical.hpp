#ifndef WLAB_CANONICAL_HPP
#define WLAB_CANONICAL_HPP

#include <string>
#include <vector>

#include "wlab/geometry.hpp"
#include "wlab/moebius.hpp"

namespace wlab {

/// Index of one member of the five-parameter family: a conformal center v
/// and a signed distance parameter t in [-pi, pi].
struct ConformalParam {
    ConformalCenter v;
    double t = 0.0;
};

/// Normal-exponential image of a surface point under the conformal
/// transform followed by the distance-t geodesic flow:
///   P_{v,t}(x) = cos t F_v(x) + sin t Q_{x,v}(n).
Vec4 parallel_map(const ConformalCenter& v, double t, const Vec4& x, const Vec4& n);

/// Signed Jacobian of the distance-t normal flow at a point with mean
/// curvature h and trace-free second-fundamental-form square tf:
///   J = (1 + h^2/4) - (h/2 cos t - sin t)^2 - (sin^2 t / 2) tf.
/// (tf/2 equals (lambda1 - lambda2)^2 / 4 for surfaces in S^3.)
double hk_jacobian(double h, double tracefree_sq, double t);

/// Area proxy \int max(J, 0) dA over the already-transformed surface.
double hk_area_from_geometry(const SurfaceGeometry& geom, double t);

/// Transforms f by F_v and integrates max(J, 0) over the image surface.
/// Upper-bounds the parallel-surface area for every (v, t).
double canonical_area_hk(const ConformalCenter& v, double t, const Immersion& f);

/// Pushforward route: composes parallel_map over the grid and integrates the
/// spectrally recomputed area element of the image parametrization.
double canonical_area_pushforward(const ConformalCenter& v, double t, const Immersion& f);
double pushforward_area_from_geometry(const SurfaceGeometry& geom,
                                      const ConformalCenter& v, double t);

struct SweepCell {
    double radius = 0.0;
    int dir_index = 0;
    double t = 0.0;
    double area = 0.0;
    bool ok = true;
    std::string status; // "ok" or the failure reason
};

/// Canonical-area table over a (radius x direction x t) grid with the argmax
/// recorded. Failed cells are masked, not fatal.
struct SweepTable {
    std::vector<double> radii;
    std::vector<Vec4> directions;
    std::vector<double> t_grid;
    std::vector<SweepCell> cells; // radius-major, then direction, then t
    int argmax_index = -1;
    double max_area = 0.0;

    const SweepCell& argmax() const { return cells.at(argmax_index); }
};

SweepTable sweep(const Immersion& f, const std::vector<double>& radii,
                 const std::vector<Vec4>& directions, const std::vector<double>& t_grid);

/// Default sweep grids: radii {0, 0.3, 0.6, 0.9, 0.95, 0.99}, 12 fixed
/// low-discrepancy directions, 64 uniform t steps over [-pi, pi).
std::vector<double> default_sweep_radii();
std::vector<double> default_sweep_t_grid();
std::vector<Vec4> low_discrepancy_directions(int count);

struct GeodesicSphereFit {
    Vec4 w = Vec4::Zero(); // unit hyperplane normal
    double c = 0.0;        // offset, <x, w> = c
    double rms_residual = 0.0;
};

/// Least-squares geodesic sphere through a cloud of unit vectors: the
/// hyperplane section <x, w> = c minimizing the sum of squared section
/// residuals, via the smallest principal direction of the centered cloud.
GeodesicSphereFit geodesic_sphere_fit(const std::vector<Vec4>& points);

/// Deterministic quasi-uniform sample of the geodesic sphere {<x,w> = c}.
std::vector<Vec4> sample_geodesic_sphere(const Vec4& w, double c, int count);

/// Symmetric discrete Hausdorff distance in the R^4 chord metric.
double hausdorff_distance(const std::vector<Vec4>& a, const std::vector<Vec4>& b);

/// Largest chord distance from any cloud point to the geodesic sphere
/// {<y, w> = c} as a continuous set (closed form, no sphere sampling).
double sup_distance_to_sphere(const std::vector<Vec4>& cloud, const Vec4& w, double c);

struct AreaComparisonEntry {
    double tau = 0.0;
    double t = 0.0;
    double lhs = 0.0; // AreaHK(v, t)
    double rhs = 0.0; // (sin t / sin tau)^2 AreaHK(v, tau)
    bool violation = false;
};

/// Checks AreaHK(v,t) <= (sin t / sin tau)^2 AreaHK(v,tau) + 1e-6 for each
/// pair (tau, t) with 0 < tau < t.
std::vector<AreaComparisonEntry> area_comparison_check(
    const ConformalCenter& v, const std::vector<std::pair<double, double>>& pairs,
    const Immersion& f);

} // namespace wlab

#endif
