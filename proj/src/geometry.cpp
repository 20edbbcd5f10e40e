#include "wlab/geometry.hpp"

#include <cmath>

namespace wlab {

namespace {

// Generalized cross product: the unique vector with <x, w> = det[a b c w]
// for all w (columns). Orthogonal to a, b, c with |x| = vol(a, b, c).
Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
    Eigen::Matrix3d m;
    Vec4 out;
    for (int k = 0; k < 4; ++k) {
        int r = 0;
        for (int row = 0; row < 4; ++row) {
            if (row == k) continue;
            m(r, 0) = a[row];
            m(r, 1) = b[row];
            m(r, 2) = c[row];
            ++r;
        }
        const double minor = m.determinant();
        out[k] = (k % 2 == 0) ? -minor : minor;
    }
    return out;
}

} // namespace

SurfaceGeometry::SurfaceGeometry(const TorusGrid& g)
    : grid(g),
      points(g, Vec4::Zero()),
      normal(g, Vec4::Zero()),
      g11(g), g12(g), g22(g),
      a11(g), a12(g), a22(g),
      mean_curvature(g),
      gauss_curvature(g),
      second_form_sq(g),
      tracefree_sq(g),
      area_density(g) {}

SurfaceGeometry compute_geometry(const Immersion& f) {
    SurfaceGeometry geom(f.grid());
    geom.points = f.points();

    for (int k = 0; k < f.points().size(); ++k) {
        const Vec4& p = f.points()[k];
        const Vec4& ft = f.d_theta()[k];
        const Vec4& fp = f.d_phi()[k];

        const double g11 = ft.dot(ft);
        const double g12 = ft.dot(fp);
        const double g22 = fp.dot(fp);
        const double det_g = g11 * g22 - g12 * g12;
        if (det_g <= 1e-14) {
            throw DegenerateImmersion("compute_geometry: det g <= 1e-14 at node " +
                                      std::to_string(k));
        }

        // Unit normal in T S^3, oriented so that it continues (-phi, psi)
        // on the minimal flat torus.
        Vec4 n = -cross4(p, ft, fp);
        n.normalize();

        const double a11 = f.d_theta_theta()[k].dot(n);
        const double a12 = f.d_theta_phi()[k].dot(n);
        const double a22 = f.d_phi_phi()[k].dot(n);

        const double mean = (g22 * a11 - 2.0 * g12 * a12 + g11 * a22) / det_g;
        const double det_shape = (a11 * a22 - a12 * a12) / det_g;
        const double a_sq = mean * mean - 2.0 * det_shape;

        geom.normal[k] = n;
        geom.g11[k] = g11;
        geom.g12[k] = g12;
        geom.g22[k] = g22;
        geom.a11[k] = a11;
        geom.a12[k] = a12;
        geom.a22[k] = a22;
        geom.mean_curvature[k] = mean;
        geom.gauss_curvature[k] = 1.0 + det_shape;
        geom.second_form_sq[k] = a_sq;
        geom.tracefree_sq[k] = a_sq - 0.5 * mean * mean;
        geom.area_density[k] = std::sqrt(det_g);
    }
    return geom;
}

double willmore_energy(const SurfaceGeometry& geom) {
    ScalarField integrand(geom.grid);
    for (int k = 0; k < integrand.size(); ++k) {
        const double h = geom.mean_curvature[k];
        integrand[k] = (1.0 + 0.25 * h * h) * geom.area_density[k];
    }
    return integrate(integrand);
}

double area(const SurfaceGeometry& geom) {
    return integrate(geom.area_density);
}

double total_gauss_curvature(const SurfaceGeometry& geom) {
    ScalarField integrand(geom.grid);
    for (int k = 0; k < integrand.size(); ++k) {
        integrand[k] = geom.gauss_curvature[k] * geom.area_density[k];
    }
    return integrate(integrand);
}

double tracefree_energy(const SurfaceGeometry& geom) {
    ScalarField integrand(geom.grid);
    for (int k = 0; k < integrand.size(); ++k) {
        integrand[k] = geom.tracefree_sq[k] * geom.area_density[k];
    }
    return integrate(integrand);
}

double ambient_second_form_energy(const SurfaceGeometry& geom) {
    ScalarField integrand(geom.grid);
    for (int k = 0; k < integrand.size(); ++k) {
        integrand[k] = (geom.second_form_sq[k] + 2.0) * geom.area_density[k];
    }
    return integrate(integrand);
}

} // namespace wlab
