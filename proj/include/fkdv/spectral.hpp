#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/field.hpp"
#include "fkdv/grid.hpp"

namespace fkdv {

/// Fractional Laplacian: multiplies mode k by |kappa(k)|^alpha.
/// Mode 0 maps to itself for alpha = 0 and to zero for alpha > 0.
inline SpectralField frac_laplacian(const SpectralField& u, double alpha) {
    if (alpha < 0.0) throw ParameterError("frac_laplacian: alpha must be >= 0");
    SpectralField out = u;
    const auto& g = u.grid();
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k) {
        const double mult = (k == 0) ? (alpha == 0.0 ? 1.0 : 0.0)
                                     : std::pow(std::abs(g.kappa(k)), alpha);
        out.at(k) *= mult;
    }
    return out;
}

/// Spectral derivative: multiplies mode k by i*kappa(k).
inline SpectralField derivative_x(const SpectralField& u) {
    SpectralField out = u;
    const auto& g = u.grid();
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k)
        out.at(k) *= std::complex<double>(0.0, g.kappa(k));
    return out;
}

/// Sobolev norm in coefficient convention: (sum (1+kappa^2)^r |u_hat|^2)^{1/2}.
/// r = 0 reduces to the coefficient l2 norm.
inline double sobolev_norm(const SpectralField& u, double r) {
    if (r < 0.0) throw ParameterError("sobolev_norm: exponent must be >= 0");
    double s = 0.0;
    const auto& g = u.grid();
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k) {
        const double kap = g.kappa(k);
        s += std::pow(1.0 + kap * kap, r) * std::norm(u.at(k));
    }
    return std::sqrt(s);
}

/// Two-thirds rule: zeroes every mode with |k| > floor(2N/3). Idempotent.
inline SpectralField dealias(const SpectralField& u) {
    SpectralField out = u;
    const int cutoff = (2 * u.n_modes()) / 3;
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k)
        if (std::abs(k) > cutoff) out.at(k) = 0.0;
    return out;
}

/// Pointwise product projected back onto the band |k| <= N.
///
/// Both factors are synthesized on the (padded) collocation grid, multiplied
/// there, and re-analyzed. With n_points >= 4N+1 the result equals the exact
/// truncated convolution sum_j u_hat(j) v_hat(m-j) on every retained mode, so
/// the Galerkin form of the quadratic term is reproduced without aliasing.
inline SpectralField product(const SpectralField& u, const SpectralField& v) {
    if (!(u.grid() == v.grid())) throw DimensionError("product: grids differ");
    const auto us = synthesize(u);
    const auto vs = synthesize(v);
    std::vector<double> w(us.size());
    for (size_t j = 0; j < w.size(); ++j) w[j] = us[j] * vs[j];
    return analyze(w, u.grid());
}

/// Tail norm ||f - P_N f|| of fine-grid samples, measured in the Sobolev
/// coefficient norm of exponent r over the resolved modes |k| > n_small.
inline double projection_error(std::span<const double> f_samples, const PeriodicGrid& grid,
                               int n_small, double r) {
    if (n_small >= grid.n_modes())
        throw ParameterError("projection_error: n_small must be below the sample resolution");
    const SpectralField f = analyze(f_samples, grid);
    double s = 0.0;
    for (int k = -grid.n_modes(); k <= grid.n_modes(); ++k) {
        if (std::abs(k) <= n_small) continue;
        const double kap = grid.kappa(k);
        s += std::pow(1.0 + kap * kap, r) * std::norm(f.at(k));
    }
    return std::sqrt(s);
}

/// Samples a callable at the collocation points and projects onto V_N.
inline SpectralField project(const std::function<double(double)>& f, const PeriodicGrid& grid) {
    std::vector<double> samples(static_cast<size_t>(grid.n_points()));
    for (int j = 0; j < grid.n_points(); ++j)
        samples[static_cast<size_t>(j)] = f(grid.point(j));
    return analyze(samples, grid);
}

inline double max_abs_sample(const SpectralField& u) {
    double m = 0.0;
    for (double s : synthesize(u)) m = std::max(m, std::abs(s));
    return m;
}

} // namespace fkdv
