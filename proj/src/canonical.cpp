#include "wlab/canonical.hpp"

#include <algorithm>
#include <cmath>

#include "wlab/spectral.hpp"

namespace wlab {

Vec4 parallel_map(const ConformalCenter& v, double t, const Vec4& x, const Vec4& n) {
    const Vec4 fx = apply_f(v, x);
    const DifferentialF df = differential_f(v, x);
    return std::cos(t) * fx + std::sin(t) * df.reflect(n);
}

double hk_jacobian(double h, double tracefree_sq, double t) {
    const double ct = std::cos(t);
    const double st = std::sin(t);
    const double drift = 0.5 * h * ct - st;
    return 1.0 + 0.25 * h * h - drift * drift - 0.5 * st * st * tracefree_sq;
}

double hk_area_from_geometry(const SurfaceGeometry& geom, double t) {
    ScalarField integrand(geom.grid);
    for (int k = 0; k < integrand.size(); ++k) {
        const double j = hk_jacobian(geom.mean_curvature[k], geom.tracefree_sq[k], t);
        integrand[k] = std::max(j, 0.0) * geom.area_density[k];
    }
    return integrate(integrand);
}

double canonical_area_hk(const ConformalCenter& v, double t, const Immersion& f) {
    return hk_area_from_geometry(compute_geometry(transform_immersion(v, f)), t);
}

double pushforward_area_from_geometry(const SurfaceGeometry& geom,
                                      const ConformalCenter& v, double t) {
    Vec4Field image(geom.grid, Vec4::Zero());
    for (int k = 0; k < image.size(); ++k) {
        image[k] = parallel_map(v, t, geom.points[k], geom.normal[k]);
    }
    const Vec4Field dt = spectral_derivative(image, 1, 0);
    const Vec4Field dp = spectral_derivative(image, 0, 1);
    ScalarField density(geom.grid);
    for (int k = 0; k < density.size(); ++k) {
        const double g11 = dt[k].dot(dt[k]);
        const double g12 = dt[k].dot(dp[k]);
        const double g22 = dp[k].dot(dp[k]);
        density[k] = std::sqrt(std::max(g11 * g22 - g12 * g12, 0.0));
    }
    return integrate(density);
}

double canonical_area_pushforward(const ConformalCenter& v, double t, const Immersion& f) {
    return pushforward_area_from_geometry(compute_geometry(f), v, t);
}

namespace {

// Argmax tie-break: strictly larger area wins; on exact ties prefer the
// slice closest to t = 0, then the nonnegative t.
bool improves(double area, double t, double best_area, double best_t) {
    if (area > best_area) return true;
    if (area < best_area) return false;
    if (std::abs(t) < std::abs(best_t)) return true;
    return std::abs(t) == std::abs(best_t) && t > best_t;
}

double halton(int index, int base) {
    double f = 1.0;
    double r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

} // namespace

SweepTable sweep(const Immersion& f, const std::vector<double>& radii,
                 const std::vector<Vec4>& directions, const std::vector<double>& t_grid) {
    SweepTable table;
    table.radii = radii;
    table.directions = directions;
    table.t_grid = t_grid;
    table.cells.reserve(radii.size() * directions.size() * t_grid.size());

    bool have_max = false;
    double best_t = 0.0;

    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        for (std::size_t di = 0; di < directions.size(); ++di) {
            const Vec4 v_vec = radii[ri] * directions[di].normalized();
            std::string failure;
            bool ok = true;
            SurfaceGeometry geom(f.grid());
            try {
                geom = compute_geometry(transform_immersion(ConformalCenter(v_vec), f));
            } catch (const LabError& e) {
                ok = false;
                failure = e.what();
            }
            for (double t : t_grid) {
                SweepCell cell;
                cell.radius = radii[ri];
                cell.dir_index = static_cast<int>(di);
                cell.t = t;
                if (ok) {
                    cell.area = hk_area_from_geometry(geom, t);
                    cell.status = "ok";
                    if (!have_max || improves(cell.area, t, table.max_area, best_t)) {
                        have_max = true;
                        table.max_area = cell.area;
                        best_t = t;
                        table.argmax_index = static_cast<int>(table.cells.size());
                    }
                } else {
                    cell.ok = false;
                    cell.status = failure;
                }
                table.cells.push_back(std::move(cell));
            }
        }
    }
    return table;
}

std::vector<double> default_sweep_radii() { return {0.0, 0.3, 0.6, 0.9, 0.95, 0.99}; }

std::vector<double> default_sweep_t_grid() {
    std::vector<double> t(64);
    for (int k = 0; k < 64; ++k) t[k] = -kPi + kTwoPi * k / 64.0;
    return t;
}

std::vector<Vec4> low_discrepancy_directions(int count) {
    // Halton-driven uniform directions on S^3. Candidates closer than 0.25
    // (chord metric) to the reference torus are skipped so that transforms
    // with |v| up to 0.99 stay spectrally resolved on desk-scale grids.
    std::vector<Vec4> dirs;
    dirs.reserve(count);
    for (int i = 1; static_cast<int>(dirs.size()) < count && i < 100 * count + 100; ++i) {
        const double u1 = halton(i, 2);
        const double u2 = halton(i, 3);
        const double u3 = halton(i, 5);
        const double a = std::sqrt(1.0 - u1);
        const double b = std::sqrt(u1);
        const Vec4 p(a * std::sin(kTwoPi * u2), a * std::cos(kTwoPi * u2),
                     b * std::sin(kTwoPi * u3), b * std::cos(kTwoPi * u3));
        const double rho1 = std::hypot(p[0], p[1]);
        const double rho2 = std::hypot(p[2], p[3]);
        const double torus_dist_sq = 2.0 - std::sqrt(2.0) * (rho1 + rho2);
        if (torus_dist_sq >= 0.25 * 0.25) dirs.push_back(p);
    }
    if (static_cast<int>(dirs.size()) < count) {
        throw LabError("low_discrepancy_directions: could not place enough directions");
    }
    return dirs;
}

GeodesicSphereFit geodesic_sphere_fit(const std::vector<Vec4>& points) {
    if (points.size() < 5) {
        throw DegenerateCloud("geodesic_sphere_fit: need at least 5 points");
    }
    Vec4 mean = Vec4::Zero();
    for (const Vec4& p : points) mean += p;
    mean /= double(points.size());

    Mat4 cov = Mat4::Zero();
    for (const Vec4& p : points) {
        const Vec4 d = p - mean;
        cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Mat4> eig(cov);
    const Eigen::Vector4d vals = eig.eigenvalues(); // ascending
    if (vals[1] <= 1e-12 * std::max(vals[3], 1e-300)) {
        throw DegenerateCloud("geodesic_sphere_fit: point cloud is rank-deficient");
    }

    GeodesicSphereFit fit;
    fit.w = eig.eigenvectors().col(0);
    fit.c = mean.dot(fit.w);
    if (fit.c < 0.0 || (fit.c == 0.0 && fit.w[0] < 0.0)) {
        fit.w = -fit.w;
        fit.c = -fit.c;
    }
    fit.rms_residual = std::sqrt(std::max(vals[0], 0.0) / double(points.size()));
    return fit;
}

std::vector<Vec4> sample_geodesic_sphere(const Vec4& w, double c, int count) {
    const Vec4 axis = w.normalized();
    // Orthonormal basis of the hyperplane orthogonal to the axis.
    Mat4 basis = Mat4::Identity();
    Eigen::Index drop;
    axis.cwiseAbs().maxCoeff(&drop);
    std::vector<Vec4> frame;
    for (int k = 0; k < 4; ++k) {
        if (k == drop) continue;
        Vec4 e = basis.col(k);
        e -= e.dot(axis) * axis;
        for (const Vec4& prev : frame) e -= e.dot(prev) * prev;
        frame.push_back(e.normalized());
    }

    const double rho = std::sqrt(std::max(1.0 - c * c, 0.0));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec4> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(1.0 - z * z, 0.0));
        const double ang = golden * i;
        const Vec4 unit =
            r * std::cos(ang) * frame[0] + r * std::sin(ang) * frame[1] + z * frame[2];
        pts.push_back(c * axis + rho * unit);
    }
    return pts;
}

namespace {

double directed_hausdorff_sq(const std::vector<Vec4>& a, const std::vector<Vec4>& b) {
    double worst = 0.0;
    for (const Vec4& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec4& q : b) {
            best = std::min(best, (p - q).squaredNorm());
            if (best <= worst) break; // cannot raise the max any more
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hausdorff_distance(const std::vector<Vec4>& a, const std::vector<Vec4>& b) {
    if (a.empty() || b.empty()) {
        throw EmptyCloud("hausdorff_distance: empty point list");
    }
    return std::sqrt(std::max(directed_hausdorff_sq(a, b), directed_hausdorff_sq(b, a)));
}

double sup_distance_to_sphere(const std::vector<Vec4>& cloud, const Vec4& w, double c) {
    if (cloud.empty()) throw EmptyCloud("sup_distance_to_sphere: empty point list");
    const Vec4 axis = w.normalized();
    const double rho = std::sqrt(std::max(1.0 - c * c, 0.0));
    double worst = 0.0;
    for (const Vec4& x : cloud) {
        const double along = x.dot(axis);
        const double off = (x - along * axis).norm();
        const double dist_sq = 2.0 - 2.0 * c * along - 2.0 * rho * off;
        worst = std::max(worst, dist_sq);
    }
    return std::sqrt(std::max(worst, 0.0));
}

std::vector<AreaComparisonEntry> area_comparison_check(
    const ConformalCenter& v, const std::vector<std::pair<double, double>>& pairs,
    const Immersion& f) {
    const SurfaceGeometry geom = compute_geometry(transform_immersion(v, f));
    std::vector<AreaComparisonEntry> out;
    out.reserve(pairs.size());
    for (const auto& [tau, t] : pairs) {
        AreaComparisonEntry e;
        e.tau = tau;
        e.t = t;
        e.lhs = hk_area_from_geometry(geom, t);
        const double ratio = std::sin(t) / std::sin(tau);
        e.rhs = ratio * ratio * hk_area_from_geometry(geom, tau);
        e.violation = e.lhs > e.rhs + 1e-6;
        out.push_back(e);
    }
    return out;
}

} // namespace wlab
