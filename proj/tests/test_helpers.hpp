#pragma once

// Shared oracles and generators for the test suites. Everything here is
// deliberately independent of the library's transform path: quadrature and
// direct summation only, so library regressions cannot hide.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "fkdv/field.hpp"
#include "fkdv/grid.hpp"

namespace fkdv::test {

inline constexpr double kPi = std::numbers::pi;

/// Trapezoid approximation of the Fourier coefficient integral
/// (1/2L) * integral over [-L, L] of f(x) e^{-i kappa(k) x} dx.
inline std::complex<double> coefficient_by_quadrature(const std::function<double(double)>& f,
                                                      int k, double half_length,
                                                      int n_quad = 10000) {
    const double kap = k * kPi / half_length;
    std::complex<double> acc = 0.0;
    const double h = 2.0 * half_length / n_quad;
    for (int j = 0; j < n_quad; ++j) {
        const double x = -half_length + j * h;
        acc += f(x) * std::exp(std::complex<double>(0.0, -kap * x));
    }
    return acc * (h / (2.0 * half_length));
}

/// Direct evaluation of the finite Fourier sum at x.
inline double direct_sum(const SpectralField& u, double x) {
    std::complex<double> acc = 0.0;
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k)
        acc += u.at(k) * std::exp(std::complex<double>(0.0, u.grid().kappa(k) * x));
    return acc.real();
}

/// Exact truncated convolution (u*v)(m) = sum_j u_hat(j) v_hat(m-j), |m| <= n_out.
inline std::vector<std::complex<double>> convolve(const SpectralField& u,
                                                  const SpectralField& v, int n_out) {
    std::vector<std::complex<double>> out(static_cast<size_t>(2 * n_out + 1));
    for (int m = -n_out; m <= n_out; ++m) {
        std::complex<double> acc = 0.0;
        for (int j = -u.n_modes(); j <= u.n_modes(); ++j) {
            const int i = m - j;
            if (std::abs(i) <= v.n_modes()) acc += u.at(j) * v.at(i);
        }
        out[static_cast<size_t>(m + n_out)] = acc;
    }
    return out;
}

/// Random real band-limited field with coefficients of magnitude ~scale.
inline SpectralField random_field(const PeriodicGrid& grid, unsigned seed, double scale = 1.0,
                                  int max_mode = -1) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SpectralField u(grid);
    const int hi = (max_mode < 0) ? grid.n_modes() : max_mode;
    for (int k = 1; k <= hi; ++k) {
        const std::complex<double> c(dist(rng), dist(rng));
        u.at(k) = scale * c;
        u.at(-k) = std::conj(scale * c);
    }
    u.at(0) = scale * dist(rng);
    return u;
}

/// Trapezoid rule over [-L, L] on n uniform panels (periodic integrand).
inline double trapezoid_periodic(const std::function<double(double)>& f, double half_length,
                                 int n) {
    double acc = 0.0;
    const double h = 2.0 * half_length / n;
    for (int j = 0; j < n; ++j) acc += f(-half_length + j * h);
    return acc * h;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace fkdv::test
