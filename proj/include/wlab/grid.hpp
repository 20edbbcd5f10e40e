#ifndef WLAB_GRID_HPP
#define WLAB_GRID_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "wlab/errors.hpp"

namespace wlab {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic sample lattice on S^1 x S^1.
/// Node (i, j) sits at theta = 2*pi*i/nTheta, phi = 2*pi*j/nPhi.
class TorusGrid {
public:
    TorusGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
        if (n_theta < 8 || n_phi < 8 || n_theta % 2 != 0 || n_phi % 2 != 0) {
            throw GridError("TorusGrid: sizes must be even and >= 8, got " +
                            std::to_string(n_theta) + "x" + std::to_string(n_phi));
        }
    }

    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    int size() const { return n_theta_ * n_phi_; }
    int index(int i, int j) const { return i * n_phi_ + j; }

    double theta(int i) const { return kTwoPi * i / n_theta_; }
    double phi(int j) const { return kTwoPi * j / n_phi_; }

    /// Quadrature weight of one node (trapezoidal rule on the periodic grid).
    double cell_weight() const { return (kTwoPi / n_theta_) * (kTwoPi / n_phi_); }

    bool operator==(const TorusGrid& o) const {
        return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int n_theta_;
    int n_phi_;
};

/// Dense node-indexed storage over a TorusGrid.
template <typename T>
class GridField {
public:
    explicit GridField(const TorusGrid& grid) : grid_(grid), data_(grid.size(), T{}) {}
    GridField(const TorusGrid& grid, const T& init) : grid_(grid), data_(grid.size(), init) {}

    const TorusGrid& grid() const { return grid_; }

    T& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
    const T& operator()(int i, int j) const { return data_[grid_.index(i, j)]; }

    T& operator[](int k) { return data_[k]; }
    const T& operator[](int k) const { return data_[k]; }

    int size() const { return static_cast<int>(data_.size()); }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

private:
    TorusGrid grid_;
    std::vector<T> data_;
};

using ScalarField = GridField<double>;
using Vec4Field = GridField<Vec4>;

/// Trapezoidal quadrature of a scalar field over the flat torus,
/// spectrally accurate for resolved periodic integrands.
inline double integrate(const ScalarField& f) {
    double s = 0.0;
    for (int k = 0; k < f.size(); ++k) s += f[k];
    return s * f.grid().cell_weight();
}

inline double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (int k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k]));
    return m;
}

inline double sup_norm(const Vec4Field& f) {
    double m = 0.0;
    for (int k = 0; k < f.size(); ++k) m = std::max(m, f[k].norm());
    return m;
}

} // namespace wlab

#endif
