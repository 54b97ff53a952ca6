#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "kerrcat/errors.hpp"

namespace kerrcat {

/// Square grid of phase-plane nodes, resolution odd, spacing 2*half_extent/(resolution-1).
class PhaseGrid {
 public:
  PhaseGrid(std::complex<double> center, double half_extent, std::size_t resolution)
      : center_(center), half_extent_(half_extent), resolution_(resolution) {
    if (!(half_extent > 0.0) || !std::isfinite(half_extent))
      throw InvalidArgument("grid half_extent must be positive and finite");
    if (resolution == 0 || resolution % 2 == 0)
      throw InvalidArgument("grid resolution must be odd and positive, got " + std::to_string(resolution));
    if (!std::isfinite(center.real()) || !std::isfinite(center.imag()))
      throw InvalidArgument("grid center must be finite");
  }

  std::complex<double> center() const noexcept { return center_; }
  double half_extent() const noexcept { return half_extent_; }
  std::size_t resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return resolution_ * resolution_; }

  double spacing() const noexcept {
    return resolution_ > 1 ? 2.0 * half_extent_ / static_cast<double>(resolution_ - 1) : 0.0;
  }
  double offset(std::size_t i) const noexcept {
    return resolution_ > 1 ? -half_extent_ + static_cast<double>(i) * spacing() : 0.0;
  }

  /// Node at flat index; the imaginary index is the outer loop.
  std::complex<double> node(std::size_t flat) const noexcept {
    const std::size_t i = flat % resolution_;
    const std::size_t j = flat / resolution_;
    return center_ + std::complex<double>{offset(i), offset(j)};
  }

  /// Flat index of the node mirrored through the center.
  std::size_t mirrored(std::size_t flat) const noexcept { return size() - 1 - flat; }

  double max_abs_node() const noexcept {
    double best = 0.0;
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) {
        const double h = resolution_ > 1 ? half_extent_ : 0.0;
        best = std::max(best, std::abs(center_ + std::complex<double>{sx * h, sy * h}));
      }
    return best;
  }

 private:
  std::complex<double> center_;
  double half_extent_;
  std::size_t resolution_;
};

/// Q sampled on a PhaseGrid at a given time.
struct QSurface {
  PhaseGrid grid;
  double time = 0.0;
  std::vector<double> values;

  /// (1/pi) * Riemann sum of Q; equals 1 on an adequate grid.
  double normalization() const {
    double s = 0.0;
    for (double v : values) s += v;
    const double h = grid.spacing();
    return s * h * h / std::numbers::pi;
  }
};

inline double max_abs_difference(const QSurface& a, const QSurface& b) {
  if (a.values.size() != b.values.size()) throw DimensionMismatch("surfaces have different sizes");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

}  // namespace kerrcat
