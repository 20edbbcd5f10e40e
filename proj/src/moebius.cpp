#include "wlab/moebius.hpp"

#include <cmath>

namespace wlab {

namespace {

void check_pole(double dist_sq, const std::string& where) {
    if (dist_sq < 1e-14) {
        throw PoleSingularity(where + ": |x - v|^2 < 1e-14");
    }
}

} // namespace

StereographicFrame stereographic_frame(const ConformalCenter& v) {
    const double r = v.norm();
    if (r < 1e-14) {
        throw LabError("stereographic_frame: pole direction undefined at v = 0");
    }
    return StereographicFrame{v.v() / r, (1.0 + r) / (1.0 - r)};
}

Vec4 apply_f(const ConformalCenter& v, const Vec4& x) {
    if (v.v().squaredNorm() == 0.0) return x;
    const Vec4 d = x - v.v();
    const double dist_sq = d.squaredNorm();
    check_pole(dist_sq, "apply_f");
    Vec4 y = (1.0 - v.v().squaredNorm()) / dist_sq * d - v.v();
    return y / y.norm();
}

DifferentialF differential_f(const ConformalCenter& v, const Vec4& x) {
    const Vec4 d = x - v.v();
    const double dist_sq = d.squaredNorm();
    check_pole(dist_sq, "differential_f");
    return DifferentialF{(1.0 - v.v().squaredNorm()) / dist_sq, d / std::sqrt(dist_sq)};
}

Vec4 pushforward_normal(const ConformalCenter& v, const Vec4& x, const Vec4& n) {
    const DifferentialF df = differential_f(v, x);
    Vec4 out = df.reflect(n);
    return out / out.norm();
}

Vec4 stereographic(const ConformalCenter& v, const Vec4& x) {
    const StereographicFrame frame = stereographic_frame(v);
    const double c = x.dot(frame.pole);
    if (std::abs(1.0 + c) < 1e-14) {
        throw PoleSingularity("stereographic: x antipodal to the projection pole");
    }
    return 2.0 / (1.0 + c) * (x - c * frame.pole);
}

Vec4 stereographic_inv(const ConformalCenter& v, const Vec4& y) {
    const StereographicFrame frame = stereographic_frame(v);
    const double y_sq = y.squaredNorm();
    return 4.0 / (4.0 + y_sq) * y + (4.0 - y_sq) / (4.0 + y_sq) * frame.pole;
}

double decompose_check(const ConformalCenter& v, const Vec4& x) {
    const StereographicFrame frame = stereographic_frame(v);
    const Vec4 direct = apply_f(v, x);
    const Vec4 factored = stereographic_inv(v, frame.lambda * stereographic(v, x));
    return (direct - factored).norm();
}

Immersion transform_immersion(const ConformalCenter& v, const Immersion& f) {
    if (v.v().squaredNorm() == 0.0) return f;
    Vec4Field pts(f.grid(), Vec4::Zero());
    for (int k = 0; k < f.points().size(); ++k) {
        try {
            pts[k] = apply_f(v, f.points()[k]);
        } catch (const PoleSingularity&) {
            throw PoleSingularity("transform_immersion: node " + std::to_string(k) +
                                  " hits the pole of F_v");
        }
    }
    return Immersion(std::move(pts));
}

} // namespace wlab
