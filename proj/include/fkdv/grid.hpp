#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/fft.hpp"

namespace fkdv {

/// Uniform periodic grid on [-L, L] carrying 2N+1 Fourier modes k = -N..N.
///
/// The effective wavenumber of mode k is kappa(k) = k*pi/L, so for L = pi the
/// modes are the integer frequencies. The collocation count defaults to
/// 2*(2N+1) rounded up to an FFT-friendly size; the 2x padding makes the
/// pointwise product of two fields alias-free after truncation back to the
/// retained band.
class PeriodicGrid {
  public:
    PeriodicGrid(int n_modes, double half_length)
        : PeriodicGrid(n_modes, half_length, next_fast_size(2 * (2 * n_modes + 1))) {}

    PeriodicGrid(int n_modes, double half_length, int n_points)
        : n_modes_(n_modes), half_length_(half_length), n_points_(n_points) {
        if (n_modes < 1) throw ParameterError("PeriodicGrid: n_modes must be >= 1");
        if (!(half_length > 0.0))
            throw ParameterError("PeriodicGrid: half_length must be positive");
        if (n_points < 2 * n_modes + 1)
            throw ParameterError("PeriodicGrid: n_points must be >= 2N+1, got " +
                                 std::to_string(n_points));
    }

    int n_modes() const { return n_modes_; }
    double half_length() const { return half_length_; }
    int n_points() const { return n_points_; }

    /// Effective wavenumber of mode k.
    double kappa(int k) const { return k * std::numbers::pi / half_length_; }

    /// j-th collocation point, j = 0..n_points-1.
    double point(int j) const {
        return -half_length_ + 2.0 * half_length_ * j / n_points_;
    }

    std::vector<double> points() const {
        std::vector<double> x(n_points_);
        for (int j = 0; j < n_points_; ++j) x[j] = point(j);
        return x;
    }

    friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

  private:
    int n_modes_;
    double half_length_;
    int n_points_;
};

} // namespace fkdv
