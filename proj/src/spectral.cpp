#include "wlab/spectral.hpp"

#include <fftw3.h>

namespace wlab {

namespace {

// Unnormalized in-place c2c transform. FFTW_ESTIMATE keeps planning
// deterministic (plan choice never depends on runtime measurements).
void fft2(std::vector<std::complex<double>>& buf, int n0, int n1, int sign) {
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = fftw_plan_dft_2d(n0, n1, data, data, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

} // namespace

Spectrum::Spectrum(const TorusGrid& grid) : grid_(grid), coef_(grid.size()) {}

Spectrum Spectrum::analyze(const ScalarField& f) {
    Spectrum s(f.grid());
    const int n = f.size();
    for (int k = 0; k < n; ++k) s.coef_[k] = f[k];
    fft2(s.coef_, f.grid().n_theta(), f.grid().n_phi(), FFTW_FORWARD);
    const double inv = 1.0 / n;
    for (int k = 0; k < n; ++k) s.coef_[k] *= inv;
    return s;
}

ScalarField Spectrum::synthesize() const {
    std::vector<std::complex<double>> buf = coef_;
    fft2(buf, grid_.n_theta(), grid_.n_phi(), FFTW_BACKWARD);
    ScalarField out(grid_);
    for (int k = 0; k < grid_.size(); ++k) out[k] = buf[k].real();
    return out;
}

std::complex<double>& Spectrum::at(int k1, int k2) {
    const int i = k1 >= 0 ? k1 : k1 + grid_.n_theta();
    const int j = k2 >= 0 ? k2 : k2 + grid_.n_phi();
    return coef_[grid_.index(i, j)];
}

const std::complex<double>& Spectrum::at(int k1, int k2) const {
    return const_cast<Spectrum*>(this)->at(k1, k2);
}

Spectrum Spectrum::derivative(int d_theta, int d_phi) const {
    Spectrum out = *this;
    const int nt = grid_.n_theta();
    const int np = grid_.n_phi();
    const std::complex<double> iu(0.0, 1.0);
    for (int i = 0; i < nt; ++i) {
        const int k1 = wavenumber(i, nt);
        std::complex<double> m1(1.0, 0.0);
        if (d_theta == 1) m1 = (i == nt / 2) ? 0.0 : iu * double(k1);
        if (d_theta == 2) m1 = -double(k1) * double(k1);
        for (int j = 0; j < np; ++j) {
            const int k2 = wavenumber(j, np);
            std::complex<double> m2(1.0, 0.0);
            if (d_phi == 1) m2 = (j == np / 2) ? 0.0 : iu * double(k2);
            if (d_phi == 2) m2 = -double(k2) * double(k2);
            out.coef_[grid_.index(i, j)] *= m1 * m2;
        }
    }
    return out;
}

ScalarField spectral_derivative(const ScalarField& f, int d_theta, int d_phi) {
    return Spectrum::analyze(f).derivative(d_theta, d_phi).synthesize();
}

Vec4Field spectral_derivative(const Vec4Field& f, int d_theta, int d_phi) {
    Vec4Field out(f.grid(), Vec4::Zero());
    ScalarField comp(f.grid());
    for (int c = 0; c < 4; ++c) {
        for (int k = 0; k < f.size(); ++k) comp[k] = f[k][c];
        ScalarField d = spectral_derivative(comp, d_theta, d_phi);
        for (int k = 0; k < f.size(); ++k) out[k][c] = d[k];
    }
    return out;
}

namespace {

double sobolev_sq(const Spectrum& s, int order) {
    const TorusGrid& g = s.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n_theta(); ++i) {
        const double k1 = Spectrum::wavenumber(i, g.n_theta());
        for (int j = 0; j < g.n_phi(); ++j) {
            const double k2 = Spectrum::wavenumber(j, g.n_phi());
            const double w = 1.0 + k1 * k1 + k2 * k2;
            double weight = 1.0;
            switch (order) {
                case -1: weight = 1.0 / w; break;
                case 0: weight = 1.0; break;
                case 1: weight = w; break;
                case 2: weight = w * w; break;
            }
            acc += weight * std::norm(s.coef()[g.index(i, j)]);
        }
    }
    return 4.0 * kPi * kPi * acc;
}

void check_order(int s) {
    if (s < -1 || s > 2) {
        throw UnsupportedOrder("sobolev_norm: order must be in {-1, 0, 1, 2}, got " +
                               std::to_string(s));
    }
}

} // namespace

double sobolev_norm(const ScalarField& f, int s) {
    check_order(s);
    return std::sqrt(sobolev_sq(Spectrum::analyze(f), s));
}

double sobolev_norm(const Vec4Field& f, int s) {
    check_order(s);
    double acc = 0.0;
    ScalarField comp(f.grid());
    for (int c = 0; c < 4; ++c) {
        for (int k = 0; k < f.size(); ++k) comp[k] = f[k][c];
        acc += sobolev_sq(Spectrum::analyze(comp), s);
    }
    return std::sqrt(acc);
}

} // namespace wlab
