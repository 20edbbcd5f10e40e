#include <doctest.h>

#include <cmath>

#include "wlab/geometry.hpp"

using namespace wlab;

namespace {

constexpr double kTwoPiSq = 2.0 * kPi * kPi;

PerturbationSpec normal_mode(int m, int n, double amp, double phase = 0.0) {
    return PerturbationSpec{{PerturbationMode{PerturbationComponent::Normal, m, n, amp, phase}}};
}

// Product torus S^1(r) x S^1(s) obtained by pushing the minimal torus along
// its normal and reprojecting: r = (1-eps)/sqrt(2(1+eps^2)), s likewise.
struct ProductTorus {
    double r, s;
};

ProductTorus product_radii(double eps) {
    const double scale = std::sqrt(2.0 * (1.0 + eps * eps));
    return {(1.0 - eps) / scale, (1.0 + eps) / scale};
}

} // namespace

TEST_CASE("clifford immersion baseline") {
    const TorusGrid g(32, 32);
    const Immersion f = clifford_immersion(g);

    const Vec4 p00 = f.points()(0, 0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(p00[0] == doctest::Approx(inv_sqrt2).epsilon(1e-15));
    CHECK(p00[1] == doctest::Approx(0.0));
    CHECK(p00[2] == doctest::Approx(inv_sqrt2).epsilon(1e-15));
    CHECK(p00[3] == doctest::Approx(0.0));

    for (int k = 0; k < f.points().size(); ++k) {
        CHECK(std::abs(f.points()[k].norm() - 1.0) <= 1e-12);
    }

    // Pullback metric is (1/2)(dtheta^2 + dphi^2) at every node.
    double worst = 0.0;
    for (int k = 0; k < f.points().size(); ++k) {
        worst = std::max(worst, std::abs(f.d_theta()[k].squaredNorm() - 0.5));
        worst = std::max(worst, std::abs(f.d_phi()[k].squaredNorm() - 0.5));
        worst = std::max(worst, std::abs(f.d_theta()[k].dot(f.d_phi()[k])));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("clifford geometry: minimal, flat, curvature split") {
    const TorusGrid g(48, 32);
    const SurfaceGeometry geom = compute_geometry(clifford_immersion(g));

    double worst_h = 0.0, worst_k = 0.0, worst_tf = 0.0, worst_n = 0.0, worst_orient = 0.0;
    const Immersion f = clifford_immersion(g);
    for (int i = 0; i < g.n_theta(); ++i) {
        for (int j = 0; j < g.n_phi(); ++j) {
            worst_h = std::max(worst_h, std::abs(geom.mean_curvature(i, j)));
            worst_k = std::max(worst_k, std::abs(geom.gauss_curvature(i, j)));
            worst_tf = std::max(worst_tf, std::abs(geom.tracefree_sq(i, j) - 2.0));
            const Vec4& n = geom.normal(i, j);
            worst_n = std::max(worst_n, std::abs(n.dot(f.points()(i, j))));
            worst_n = std::max(worst_n, std::abs(n.dot(f.d_theta()(i, j))));
            worst_n = std::max(worst_n, std::abs(n.dot(f.d_phi()(i, j))));
            worst_orient = std::max(
                worst_orient, (n - clifford_normal(g.theta(i), g.phi(j))).norm());
        }
    }
    CHECK(worst_h < 1e-10);
    CHECK(worst_k < 1e-10);
    CHECK(worst_tf < 1e-10);
    CHECK(worst_n < 1e-10);
    CHECK(worst_orient < 1e-10); // orientation continues (-phi, psi)

    // Principal curvatures {+1, -1}: the shape operator is diag(1, -1) in
    // the coordinate directions on this torus.
    const double s11 = geom.a11(3, 5) / geom.g11(3, 5);
    const double s22 = geom.a22(3, 5) / geom.g22(3, 5);
    CHECK(s11 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s22 == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("clifford integrals at machine precision for any even grid >= 8") {
    for (int n : {8, 12, 64, 128}) {
        const SurfaceGeometry geom = compute_geometry(clifford_immersion(TorusGrid(n, n)));
        CHECK(std::abs(willmore_energy(geom) - kTwoPiSq) < 1e-10);
        CHECK(std::abs(area(geom) - kTwoPiSq) < 1e-10);
        CHECK(std::abs(tracefree_energy(geom) - 4.0 * kPi * kPi) < 1e-10);
    }
}

TEST_CASE("empty perturbation returns the base unchanged") {
    const TorusGrid g(16, 16);
    const Immersion base = clifford_immersion(g);
    const Immersion same = perturb_immersion(base, PerturbationSpec{});
    for (int k = 0; k < base.points().size(); ++k) {
        CHECK(base.points()[k] == same.points()[k]);
    }
}

TEST_CASE("unresolvable modes are rejected") {
    const TorusGrid g(16, 16);
    const Immersion base = clifford_immersion(g);
    CHECK_THROWS_AS(perturb_immersion(base, normal_mode(8, 0, 0.01)), GridError);
    CHECK_THROWS_AS(perturb_immersion(base, normal_mode(0, 9, 0.01)), GridError);
}

TEST_CASE("constant normal mode produces the product torus") {
    const TorusGrid g(64, 64);
    const double eps = 0.1;
    const Immersion f = perturb_immersion(clifford_immersion(g), normal_mode(0, 0, eps));
    const SurfaceGeometry geom = compute_geometry(f);
    const auto [r, s] = product_radii(eps);

    // Closed-form area of S^1(r) x S^1(s).
    CHECK(area(geom) == doctest::Approx(4.0 * kPi * kPi * r * s).epsilon(1e-12));

    // Mean curvature is constant s/r - r/s in the orientation that
    // continues the minimal-torus normal.
    const double h_expect = s / r - r / s;
    double worst = 0.0;
    for (int k = 0; k < geom.mean_curvature.size(); ++k) {
        worst = std::max(worst, std::abs(geom.mean_curvature[k] - h_expect));
    }
    CHECK(worst < 1e-10);

    // Willmore energy of the product torus: pi^2 / (r s).
    CHECK(willmore_energy(geom) == doctest::Approx(kPi * kPi / (r * s)).epsilon(1e-12));

    // Flat: K vanishes pointwise.
    CHECK(sup_norm(geom.gauss_curvature) < 1e-10);
}

TEST_CASE("willmore energy exceeds the minimal value for a genuine perturbation") {
    // Two-resolution agreement serves as the convergence oracle.
    const double w96 = willmore_energy(
        compute_geometry(perturb_immersion(clifford_immersion(TorusGrid(96, 96)),
                                           normal_mode(2, 0, 0.01))));
    const double w128 = willmore_energy(
        compute_geometry(perturb_immersion(clifford_immersion(TorusGrid(128, 128)),
                                           normal_mode(2, 0, 0.01))));
    CHECK(std::abs(w96 - w128) < 1e-10);
    CHECK(w128 > kTwoPiSq);
    CHECK(w128 < kTwoPiSq + 1.0);
}

TEST_CASE("corpus surfaces satisfy the integral identities") {
    const TorusGrid g(96, 96);
    PerturbationSpec mixed;
    mixed.modes.push_back({PerturbationComponent::Normal, 1, 2, 0.01, 0.4});
    mixed.modes.push_back({PerturbationComponent::TangentTheta, 2, 1, 0.008, 0.0});
    mixed.modes.push_back({PerturbationComponent::Ambient, 1, 0, 0.01, 0.1});

    const Immersion surfaces[] = {
        clifford_immersion(g),
        perturb_immersion(clifford_immersion(g), normal_mode(0, 0, 0.12)),
        perturb_immersion(clifford_immersion(g), normal_mode(2, 0, 0.05)),
        perturb_immersion(clifford_immersion(g), mixed),
    };
    for (const Immersion& f : surfaces) {
        const SurfaceGeometry geom = compute_geometry(f);
        const double w = willmore_energy(geom);
        const double a = area(geom);

        // Genus-1 lower bound.
        CHECK(w >= kTwoPiSq - 1e-6);
        // Gauss-Bonnet: total intrinsic curvature vanishes.
        CHECK(std::abs(total_gauss_curvature(geom)) <= 1e-8 * a);
        // Full ambient second fundamental form energy equals 4W.
        CHECK(std::abs(ambient_second_form_energy(geom) - 4.0 * w) <= 1e-6 * 4.0 * w);
        // Pointwise |tracefree|^2 >= 0 within rounding.
        double min_tf = 1e300;
        for (int k = 0; k < geom.tracefree_sq.size(); ++k) {
            min_tf = std::min(min_tf, geom.tracefree_sq[k]);
        }
        CHECK(min_tf >= -1e-10);
        // Gauss equation in S^3: K = 1 + det(shape).
        for (int k : {0, 77, 991}) {
            const double det_g = geom.g11[k] * geom.g22[k] - geom.g12[k] * geom.g12[k];
            const double det_shape =
                (geom.a11[k] * geom.a22[k] - geom.a12[k] * geom.a12[k]) / det_g;
            CHECK(geom.gauss_curvature[k] ==
                  doctest::Approx(1.0 + det_shape).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid refinement leaves integrated quantities fixed") {
    const double vals[2][3] = {};
    double w[2], a[2], tf[2];
    int idx = 0;
    for (int n : {64, 128}) {
        const Immersion f = perturb_immersion(clifford_immersion(TorusGrid(n, n)),
                                              normal_mode(2, 1, 0.02));
        const SurfaceGeometry geom = compute_geometry(f);
        w[idx] = willmore_energy(geom);
        a[idx] = area(geom);
        tf[idx] = tracefree_energy(geom);
        ++idx;
    }
    (void)vals;
    CHECK(std::abs(w[0] - w[1]) <= 1e-10);
    CHECK(std::abs(a[0] - a[1]) <= 1e-10);
    CHECK(std::abs(tf[0] - tf[1]) <= 1e-10);
}

TEST_CASE("degenerate metric is rejected") {
    const TorusGrid g(32, 32);
    // theta -> theta + sin theta has a cusp at theta = pi (a grid node for
    // even sizes), where f_theta vanishes exactly.
    Vec4Field folded(g, Vec4::Zero());
    for (int i = 0; i < g.n_theta(); ++i) {
        for (int j = 0; j < g.n_phi(); ++j) {
            folded(i, j) = clifford_point(g.theta(i) + std::sin(g.theta(i)), g.phi(j));
        }
    }
    const Immersion fold(std::move(folded));
    CHECK_THROWS_AS(compute_geometry(fold), DegenerateImmersion);

    // perturb_immersion re-validates and surfaces the same failure.
    PerturbationSpec nudge;
    nudge.modes.push_back({PerturbationComponent::TangentPhi, 0, 1, 1e-3, 0.0});
    CHECK_THROWS_AS(perturb_immersion(fold, nudge), DegenerateImmersion);
}
