#ifndef WLAB_MOEBIUS_HPP
#define WLAB_MOEBIUS_HPP

#include "wlab/immersion.hpp"

namespace wlab {

/// Parameter of the conformal transformation
///   F_v(x) = (1 - |v|^2) (x - v) / |x - v|^2 - v
/// of S^3, with v in the open unit ball of R^4.
class ConformalCenter {
public:
    explicit ConformalCenter(const Vec4& v) : v_(v) {
        if (v.norm() > 1.0 - 1e-9) {
            throw LabError("ConformalCenter: |v| must be <= 1 - 1e-9");
        }
    }
    static ConformalCenter zero() { return ConformalCenter(Vec4::Zero()); }

    const Vec4& v() const { return v_; }
    double norm() const { return v_.norm(); }
    ConformalCenter inverse() const { return ConformalCenter(-v_); }

private:
    Vec4 v_;
};

/// Stereographic factorization data of F_v: a projection pole direction and
/// the dilation factor lambda = (1 + |v|) / (1 - |v|) >= 1.
struct StereographicFrame {
    Vec4 pole;     // v / |v|
    double lambda; // (1 + |v|) / (1 - |v|)
};

StereographicFrame stereographic_frame(const ConformalCenter& v);

/// F_v applied to a unit vector; output renormalized to S^3.
/// Throws PoleSingularity when |x - v|^2 < 1e-14.
Vec4 apply_f(const ConformalCenter& v, const Vec4& x);

/// The differential DF_v(x) = scale * Q with Q the reflection through the
/// hyperplane orthogonal to (x - v).
struct DifferentialF {
    double scale;  // (1 - |v|^2) / |x - v|^2
    Vec4 axis;     // (x - v) / |x - v|
    Vec4 apply(const Vec4& w) const { return scale * (w - 2.0 * w.dot(axis) * axis); }
    Vec4 reflect(const Vec4& w) const { return w - 2.0 * w.dot(axis) * axis; }
    Mat4 reflection_matrix() const { return Mat4::Identity() - 2.0 * axis * axis.transpose(); }
};

DifferentialF differential_f(const ConformalCenter& v, const Vec4& x);

/// Unit normal of the transformed surface at F_v(x), given the unit normal
/// at x: DF_v(N) / |DF_v(N)|.
Vec4 pushforward_normal(const ConformalCenter& v, const Vec4& x, const Vec4& n);

/// Stereographic projection to the hyperplane orthogonal to v/|v|,
///   G_v(x) = 2 / (1 + <x, v/|v|>) (x - <x, v/|v|> v/|v|),
/// returned as a 4-vector lying in that hyperplane.
Vec4 stereographic(const ConformalCenter& v, const Vec4& x);
Vec4 stereographic_inv(const ConformalCenter& v, const Vec4& y);

/// Residual |F_v(x) - G_v^{-1}(lambda G_v(x))| of the factorization.
double decompose_check(const ConformalCenter& v, const Vec4& x);

/// Node-wise F_v with the derivative cache recomputed spectrally.
/// v = 0 returns the input unchanged. Throws PoleSingularity with the
/// offending node index.
Immersion transform_immersion(const ConformalCenter& v, const Immersion& f);

} // namespace wlab

#endif
