#include "wlab/immersion.hpp"

#include <cmath>

#include "wlab/geometry.hpp"
#include "wlab/spectral.hpp"

namespace wlab {

Immersion::Immersion(Vec4Field points)
    : points_(std::move(points)),
      d_theta_(spectral_derivative(points_, 1, 0)),
      d_phi_(spectral_derivative(points_, 0, 1)),
      d_theta_theta_(spectral_derivative(points_, 2, 0)),
      d_theta_phi_(spectral_derivative(points_, 1, 1)),
      d_phi_phi_(spectral_derivative(points_, 0, 2)) {
    for (int k = 0; k < points_.size(); ++k) {
        if (std::abs(points_[k].norm() - 1.0) > 1e-12) {
            throw DegenerateImmersion("Immersion: node " + std::to_string(k) +
                                      " leaves S^3 by more than 1e-12");
        }
    }
}

Vec4 clifford_point(double theta, double phi) {
    const double r = 1.0 / std::sqrt(2.0);
    return Vec4(r * std::cos(theta), r * std::sin(theta), r * std::cos(phi),
                r * std::sin(phi));
}

Vec4 clifford_d_theta(double theta, double phi) {
    (void)phi;
    const double r = 1.0 / std::sqrt(2.0);
    return Vec4(-r * std::sin(theta), r * std::cos(theta), 0.0, 0.0);
}

Vec4 clifford_d_phi(double theta, double phi) {
    (void)theta;
    const double r = 1.0 / std::sqrt(2.0);
    return Vec4(0.0, 0.0, -r * std::sin(phi), r * std::cos(phi));
}

Vec4 clifford_normal(double theta, double phi) {
    const double r = 1.0 / std::sqrt(2.0);
    return Vec4(-r * std::cos(theta), -r * std::sin(theta), r * std::cos(phi),
                r * std::sin(phi));
}

Immersion clifford_immersion(const TorusGrid& grid) {
    Vec4Field pts(grid, Vec4::Zero());
    for (int i = 0; i < grid.n_theta(); ++i) {
        for (int j = 0; j < grid.n_phi(); ++j) {
            pts(i, j) = clifford_point(grid.theta(i), grid.phi(j));
        }
    }
    return Immersion(std::move(pts));
}

PerturbationComponent parse_component(const std::string& name) {
    if (name == "normal") return PerturbationComponent::Normal;
    if (name == "tangent-theta") return PerturbationComponent::TangentTheta;
    if (name == "tangent-phi") return PerturbationComponent::TangentPhi;
    if (name == "ambient") return PerturbationComponent::Ambient;
    throw ConfigError("unknown perturbation component '" + name + "'");
}

std::string component_name(PerturbationComponent c) {
    switch (c) {
        case PerturbationComponent::Normal: return "normal";
        case PerturbationComponent::TangentTheta: return "tangent-theta";
        case PerturbationComponent::TangentPhi: return "tangent-phi";
        case PerturbationComponent::Ambient: return "ambient";
    }
    return "?";
}

Immersion perturb_immersion(const Immersion& base, const PerturbationSpec& spec) {
    if (spec.modes.empty()) return base;

    const TorusGrid& grid = base.grid();
    for (const PerturbationMode& mode : spec.modes) {
        if (std::abs(mode.m) >= grid.n_theta() / 2 || std::abs(mode.n) >= grid.n_phi() / 2) {
            throw GridError("perturb_immersion: mode (" + std::to_string(mode.m) + "," +
                            std::to_string(mode.n) + ") not resolvable on " +
                            std::to_string(grid.n_theta()) + "x" +
                            std::to_string(grid.n_phi()));
        }
    }

    bool needs_normal = false;
    for (const PerturbationMode& mode : spec.modes) {
        if (mode.component == PerturbationComponent::Normal) needs_normal = true;
    }
    Vec4Field normal(grid, Vec4::Zero());
    if (needs_normal) normal = compute_geometry(base).normal;

    const Vec4 ambient_dir(0.5, 0.5, 0.5, 0.5);

    Vec4Field pts = base.points();
    for (int i = 0; i < grid.n_theta(); ++i) {
        for (int j = 0; j < grid.n_phi(); ++j) {
            Vec4 disp = Vec4::Zero();
            for (const PerturbationMode& mode : spec.modes) {
                const double wave =
                    mode.amplitude *
                    std::cos(mode.m * grid.theta(i) + mode.n * grid.phi(j) + mode.phase);
                switch (mode.component) {
                    case PerturbationComponent::Normal:
                        disp += wave * normal(i, j);
                        break;
                    case PerturbationComponent::TangentTheta:
                        disp += wave * base.d_theta()(i, j);
                        break;
                    case PerturbationComponent::TangentPhi:
                        disp += wave * base.d_phi()(i, j);
                        break;
                    case PerturbationComponent::Ambient:
                        disp += wave * ambient_dir;
                        break;
                }
            }
            Vec4 p = pts(i, j) + disp;
            const double len = p.norm();
            if (len < 1e-8) {
                throw DegenerateImmersion("perturb_immersion: displaced point collapsed "
                                          "to the origin");
            }
            pts(i, j) = p / len;
        }
    }

    Immersion out(std::move(pts));
    compute_geometry(out); // validates det g > 0; throws DegenerateImmersion
    return out;
}

} // namespace wlab
