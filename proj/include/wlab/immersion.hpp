#ifndef WLAB_IMMERSION_HPP
#define WLAB_IMMERSION_HPP

#include <string>
#include <vector>

#include "wlab/grid.hpp"

namespace wlab {

/// A grid-sampled immersion of the torus into S^3, with the spectral
/// derivative fields cached at construction. Immutable after construction.
class Immersion {
public:
    /// Validates the S^3 constraint ( | |p|-1 | <= 1e-12 at every node )
    /// and fills the derivative cache from the points spectrally.
    explicit Immersion(Vec4Field points);

    const TorusGrid& grid() const { return points_.grid(); }
    const Vec4Field& points() const { return points_; }
    const Vec4Field& d_theta() const { return d_theta_; }
    const Vec4Field& d_phi() const { return d_phi_; }
    const Vec4Field& d_theta_theta() const { return d_theta_theta_; }
    const Vec4Field& d_theta_phi() const { return d_theta_phi_; }
    const Vec4Field& d_phi_phi() const { return d_phi_phi_; }

private:
    Vec4Field points_;
    Vec4Field d_theta_;
    Vec4Field d_phi_;
    Vec4Field d_theta_theta_;
    Vec4Field d_theta_phi_;
    Vec4Field d_phi_phi_;
};

/// The minimal flat torus (1/sqrt2)(cos theta, sin theta, cos phi, sin phi).
Immersion clifford_immersion(const TorusGrid& grid);

/// Reference quantities of the minimal flat torus as closed forms.
Vec4 clifford_point(double theta, double phi);
Vec4 clifford_d_theta(double theta, double phi);
Vec4 clifford_d_phi(double theta, double phi);
/// Unit normal (-cos theta, -sin theta, cos phi, sin phi)/sqrt2.
Vec4 clifford_normal(double theta, double phi);

enum class PerturbationComponent { Normal, TangentTheta, TangentPhi, Ambient };

struct PerturbationMode {
    PerturbationComponent component = PerturbationComponent::Normal;
    int m = 0;
    int n = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct PerturbationSpec {
    std::vector<PerturbationMode> modes;
};

PerturbationComponent parse_component(const std::string& name);
std::string component_name(PerturbationComponent c);

/// Adds the requested displacement modes to the base immersion and projects
/// the result radially back to S^3. Normal modes displace along the base
/// surface normal, tangent modes along the raw coordinate derivatives, and
/// ambient modes along the fixed direction (1,1,1,1)/2.
/// Throws DegenerateImmersion if the perturbed metric degenerates, and
/// GridError if a mode is not resolvable on the base grid.
Immersion perturb_immersion(const Immersion& base, const PerturbationSpec& spec);

} // namespace wlab

#endif
