#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/fft.hpp"
#include "fkdv/grid.hpp"

namespace fkdv {

/// Fourier coefficients u_hat(k), k = -N..N, of a real periodic function.
///
/// Real fields keep Hermitian symmetry u_hat(-k) = conj(u_hat(k)); analyze()
/// enforces it exactly and the solver re-symmetrizes after every step, so the
/// stored coefficients satisfy it to round-off at all times.
class SpectralField {
  public:
    explicit SpectralField(const PeriodicGrid& grid)
        : grid_(grid), coef_(2 * grid.n_modes() + 1) {}

    SpectralField(const PeriodicGrid& grid, std::vector<std::complex<double>> coef)
        : grid_(grid), coef_(std::move(coef)) {
        if (static_cast<int>(coef_.size()) != 2 * grid.n_modes() + 1)
            throw DimensionError("SpectralField: expected 2N+1 coefficients");
    }

    const PeriodicGrid& grid() const { return grid_; }
    int n_modes() const { return grid_.n_modes(); }

    std::complex<double>& at(int k) { return coef_[static_cast<size_t>(k + n_modes())]; }
    const std::complex<double>& at(int k) const {
        return coef_[static_cast<size_t>(k + n_modes())];
    }

    std::span<std::complex<double>> coefficients() { return coef_; }
    std::span<const std::complex<double>> coefficients() const { return coef_; }

    /// max_k |u_hat(-k) - conj(u_hat(k))|, the Hermitian symmetry defect.
    double hermitian_defect() const {
        double d = 0.0;
        for (int k = 1; k <= n_modes(); ++k)
            d = std::max(d, std::abs(at(-k) - std::conj(at(k))));
        d = std::max(d, std::abs(at(0).imag()));
        return d;
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& c : coef_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Averages u_hat(k) with conj(u_hat(-k)); exact projection onto real fields.
    void symmetrize() {
        for (int k = 1; k <= n_modes(); ++k) {
            const auto avg = 0.5 * (at(k) + std::conj(at(-k)));
            at(k) = avg;
            at(-k) = std::conj(avg);
        }
        at(0) = {at(0).real(), 0.0};
    }

  private:
    PeriodicGrid grid_;
    std::vector<std::complex<double>> coef_;
};

/// Coefficient-space l2 norm, (sum |u_hat(k)|^2)^{1/2}.
inline double l2_norm(const SpectralField& u) {
    double s = 0.0;
    for (const auto& c : u.coefficients()) s += std::norm(c);
    return std::sqrt(s);
}

/// Physical L2 norm over [-L, L]; Parseval gives sqrt(2L) times the l2 norm.
inline double physical_l2_norm(const SpectralField& u) {
    return std::sqrt(2.0 * u.grid().half_length()) * l2_norm(u);
}

/// Physical inner product (u, v) = integral of u * conj(v) over [-L, L].
inline std::complex<double> inner_product(const SpectralField& u, const SpectralField& v) {
    if (u.n_modes() != v.n_modes())
        throw DimensionError("inner_product: mode counts differ");
    std::complex<double> s = 0.0;
    for (int k = -u.n_modes(); k <= u.n_modes(); ++k) s += u.at(k) * std::conj(v.at(k));
    return 2.0 * u.grid().half_length() * s;
}

namespace detail {

// Grid starts at -L, not 0, so the DFT picks up the phase e^{+-ik pi} = (-1)^k.
inline double alternating_sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

} // namespace detail

/// Forward transform: samples on the grid points -> truncated coefficients.
/// Realizes the projection P_N: modes beyond |k| = N are discarded.
inline SpectralField analyze(std::span<const double> samples, const PeriodicGrid& grid) {
    const int m = grid.n_points();
    if (static_cast<int>(samples.size()) != m)
        throw DimensionError("analyze: expected " + std::to_string(m) + " samples, got " +
                             std::to_string(samples.size()));
    std::vector<std::complex<double>> in(samples.begin(), samples.end());
    std::vector<std::complex<double>> out(static_cast<size_t>(m));
    Fft fft(m);
    fft.forward(in, out);

    SpectralField u(grid);
    const int n = grid.n_modes();
    for (int k = -n; k <= n; ++k) {
        const int bin = (k >= 0) ? k : m + k;
        u.at(k) = out[static_cast<size_t>(bin)] * (detail::alternating_sign(k) / m);
    }
    u.symmetrize();
    return u;
}

/// Inverse transform: coefficients -> real samples on the grid points.
/// Throws SymmetryError when the field is not Hermitian to within 1e-12
/// relative to its largest coefficient.
inline std::vector<double> synthesize(const SpectralField& u) {
    const double scale = u.max_abs_coefficient();
    if (u.hermitian_defect() > 1e-12 * std::max(scale, 1e-300))
        throw SymmetryError("synthesize: field is not Hermitian-symmetric");

    const auto& grid = u.grid();
    const int m = grid.n_points();
    const int n = grid.n_modes();
    std::vector<std::complex<double>> in(static_cast<size_t>(m));
    for (int k = -n; k <= n; ++k) {
        const int bin = (k >= 0) ? k : m + k;
        in[static_cast<size_t>(bin)] = u.at(k) * detail::alternating_sign(k);
    }
    std::vector<std::complex<double>> out(static_cast<size_t>(m));
    Fft fft(m);
    fft.backward(in, out);

    std::vector<double> samples(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) samples[static_cast<size_t>(j)] = out[static_cast<size_t>(j)].real();
    return samples;
}

/// Evaluates the finite Fourier sum on an arbitrary grid resolution, e.g. for
/// plotting or for comparing against references on a finer mesh.
inline std::vector<double> synthesize_on(const SpectralField& u, int n_points) {
    const PeriodicGrid fine(u.n_modes(), u.grid().half_length(), n_points);
    SpectralField v(fine, std::vector<std::complex<double>>(
                              u.coefficients().begin(), u.coefficients().end()));
    return synthesize(v);
}

} // namespace fkdv
