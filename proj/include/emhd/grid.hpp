#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "emhd/error.hpp"

namespace emhd {

/// Periodic rectangle [0, lx) x [0, ly) sampled on nx x ny points.
///
/// Wavenumbers follow the FFT ordering: index i carries the signed mode
/// m = i for i < nx/2 and m = i - nx otherwise, so the single Nyquist mode
/// sits at i = nx/2 with m = -nx/2.
struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::vector<double> kx;
  std::vector<double> ky;

  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j);
  }
  [[nodiscard]] int mode_x(int i) const noexcept { return i < nx / 2 ? i : i - nx; }
  [[nodiscard]] int mode_y(int j) const noexcept { return j < ny / 2 ? j : j - ny; }
  [[nodiscard]] bool is_nyquist(int i, int j) const noexcept { return i == nx / 2 || j == ny / 2; }
  [[nodiscard]] double area() const noexcept { return lx * ly; }
  [[nodiscard]] double dx() const noexcept { return lx / nx; }
  [[nodiscard]] double dy() const noexcept { return ly / ny; }
  [[nodiscard]] double x(int i) const noexcept { return dx() * i; }
  [[nodiscard]] double y(int j) const noexcept { return dy() * j; }

  /// Index of the mode (-m) in FFT ordering.
  [[nodiscard]] int mirror_x(int i) const noexcept { return (nx - i) % nx; }
  [[nodiscard]] int mirror_y(int j) const noexcept { return (ny - j) % ny; }

  [[nodiscard]] double max_abs_kx() const noexcept { return (nx / 2) * 2.0 * std::numbers::pi / lx; }
  [[nodiscard]] double max_abs_ky() const noexcept { return (ny / 2) * 2.0 * std::numbers::pi / ly; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.nx == b.nx && a.ny == b.ny && a.lx == b.lx && a.ly == b.ly;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int nx, int ny, double lx = 2.0 * std::numbers::pi,
                         double ly = 2.0 * std::numbers::pi) {
  if (nx % 2 != 0 || ny % 2 != 0)
    throw InvalidArgument("grid sizes must be even, got " + std::to_string(nx) + "x" + std::to_string(ny));
  if (nx < 8 || ny < 8)
    throw InvalidArgument("grid sizes must be >= 8, got " + std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw InvalidArgument("domain lengths must be positive and finite");

  auto g = std::make_shared<Grid>();
  g->nx = nx;
  g->ny = ny;
  g->lx = lx;
  g->ly = ly;
  g->kx.resize(static_cast<std::size_t>(nx));
  g->ky.resize(static_cast<std::size_t>(ny));
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < nx; ++i) g->kx[static_cast<std::size_t>(i)] = two_pi * g->mode_x(i) / lx;
  for (int j = 0; j < ny; ++j) g->ky[static_cast<std::size_t>(j)] = two_pi * g->mode_y(j) / ly;
  return g;
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": operands live on different grids");
}

}  // namespace emhd
