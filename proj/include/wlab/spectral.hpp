#ifndef WLAB_SPECTRAL_HPP
#define WLAB_SPECTRAL_HPP

#include <complex>
#include <vector>

#include "wlab/grid.hpp"

namespace wlab {

/// Fourier coefficients of a scalar field on the periodic grid.
///
/// Coefficients are stored in FFT layout and normalized so that
///   f(theta, phi) = sum_k  c_k  exp(i (k1 theta + k2 phi)),
/// i.e. c_k equals the continuum Fourier coefficient
/// (1 / 4 pi^2) \int f exp(-i k.x) for every resolved mode.
class Spectrum {
public:
    explicit Spectrum(const TorusGrid& grid);

    static Spectrum analyze(const ScalarField& f);
    ScalarField synthesize() const;

    /// Coefficient slot for signed wavenumbers k1 in [-nTheta/2, nTheta/2),
    /// k2 in [-nPhi/2, nPhi/2).
    std::complex<double>& at(int k1, int k2);
    const std::complex<double>& at(int k1, int k2) const;

    /// In-place multiplication by the spectral symbol of d^a/dtheta^a d^b/dphi^b.
    /// Odd-order derivatives zero the Nyquist modes; even orders keep them.
    Spectrum derivative(int d_theta, int d_phi) const;

    /// Signed wavenumber of storage row/column m on an n-point axis.
    static int wavenumber(int m, int n) { return m < n / 2 ? m : m - n; }

    const TorusGrid& grid() const { return grid_; }
    const std::vector<std::complex<double>>& coef() const { return coef_; }
    std::vector<std::complex<double>>& coef() { return coef_; }

private:
    TorusGrid grid_;
    std::vector<std::complex<double>> coef_;
};

/// Spectral partial derivative of a field sampled on a TorusGrid.
ScalarField spectral_derivative(const ScalarField& f, int d_theta, int d_phi);
Vec4Field spectral_derivative(const Vec4Field& f, int d_theta, int d_phi);

/// Sobolev norm with unit-normalized Fourier coefficients:
///   || f ||_{H^s}  =  ( 4 pi^2 sum_k (1 + |k|^2)^s |c_k|^2 )^{1/2}.
/// s = -1 is the spectral dual norm. Supported orders: {-1, 0, 1, 2}.
double sobolev_norm(const ScalarField& f, int s);
double sobolev_norm(const Vec4Field& f, int s);

} // namespace wlab

#endif
