#pragma once

// Hall equilibria: profiles for which both nonlinear brackets vanish.
//
//   shear-x        a = g(x),  b = h(x)
//   shear-y        a = g(y),  b = h(y)
//   radial         a = A exp(-r^2/w^2) W(r),  b = B exp(-r^2/(2w^2)) W(r)
//   current-sheet  a = y,     b = 0
//
// Radial profiles are not periodic, so they are centred in the box and
// multiplied by a smooth window W that is 1 for r <= r0 and 0 for r >= r1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "emhd/error.hpp"
#include "emhd/field.hpp"
#include "emhd/model.hpp"

namespace emhd {

enum class SteadyKind { shear_x, shear_y, radial, current_sheet };

inline std::string_view to_string(SteadyKind k) {
  switch (k) {
    case SteadyKind::shear_x: return "shear-x";
    case SteadyKind::shear_y: return "shear-y";
    case SteadyKind::radial: return "radial";
    case SteadyKind::current_sheet: return "current-sheet";
  }
  return "?";
}

inline std::optional<SteadyKind> parse_steady_kind(std::string_view s) {
  if (s == "shear-x") return SteadyKind::shear_x;
  if (s == "shear-y") return SteadyKind::shear_y;
  if (s == "radial") return SteadyKind::radial;
  if (s == "current-sheet") return SteadyKind::current_sheet;
  return std::nullopt;
}

struct SteadyState {
  SteadyKind kind = SteadyKind::current_sheet;
  double amp_a = 1.0;
  double amp_b = 1.0;
  int mode = 1;        // base wavenumber of the shear profiles
  double width = 0.5;  // Gaussian width of radial profiles (fraction-free, in length units)
};

/// C-infinity step: 1 for t <= 0, 0 for t >= 1.
inline double smooth_step_down(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double f = std::exp(-1.0 / t);
  const double g = std::exp(-1.0 / (1.0 - t));
  return g / (f + g);
}

/// Radial window for a box of size min(lx, ly).
inline double radial_window(double r, double box) {
  const double r0 = 0.35 * box, r1 = 0.48 * box;
  return smooth_step_down((r - r0) / (r1 - r0));
}

/// Periodic potentials (a*, b*) sampled on the grid. For the current sheet
/// the affine part is not representable and a* is returned as zero; use
/// steady_gradient() for the full gradient.
inline std::pair<PhysicalField, PhysicalField> steady_fields(const SteadyState& ss, const GridPtr& g) {
  const double kx = 2.0 * std::numbers::pi * ss.mode / g->lx;
  const double ky = 2.0 * std::numbers::pi * ss.mode / g->ly;
  const double cx = 0.5 * g->lx, cy = 0.5 * g->ly, box = std::min(g->lx, g->ly);
  const double w2 = ss.width * ss.width;
  switch (ss.kind) {
    case SteadyKind::shear_x:
      return {PhysicalField::sample(g, [&](double x, double) { return ss.amp_a * (std::cos(kx * x) + 0.5 * std::sin(2.0 * kx * x)); }),
              PhysicalField::sample(g, [&](double x, double) { return ss.amp_b * std::sin(kx * x + 0.3); })};
    case SteadyKind::shear_y:
      return {PhysicalField::sample(g, [&](double, double y) { return ss.amp_a * (std::cos(ky * y) + 0.5 * std::sin(2.0 * ky * y)); }),
              PhysicalField::sample(g, [&](double, double y) { return ss.amp_b * std::sin(ky * y + 0.3); })};
    case SteadyKind::radial: {
      auto r = [&](double x, double y) { return std::hypot(x - cx, y - cy); };
      return {PhysicalField::sample(g, [&](double x, double y) {
                const double rr = r(x, y);
                return ss.amp_a * std::exp(-rr * rr / w2) * radial_window(rr, box);
              }),
              PhysicalField::sample(g, [&](double x, double y) {
                const double rr = r(x, y);
                return ss.amp_b * std::exp(-0.5 * rr * rr / w2) * radial_window(rr, box);
              })};
    }
    case SteadyKind::current_sheet:
      return {PhysicalField(g), PhysicalField(g)};
  }
  throw InvalidArgument("unknown steady-state kind");
}

inline PotentialGradient steady_gradient(const SteadyState& ss, const GridPtr& g) {
  return PotentialGradient::of(transform_forward(steady_fields(ss, g).first), 0.0,
                               ss.kind == SteadyKind::current_sheet ? 1.0 : 0.0);
}

/// max-norm of both Hall brackets, computed pointwise from spectral
/// derivatives without truncation.
inline double hall_residual(const PotentialGradient& grad, const SpectralField& b) {
  require_same_grid(grad.ax.grid(), b.grid(), "hall_residual");
  PhysicalField ax = transform_inverse(grad.ax), ay = transform_inverse(grad.ay);
  for (auto& v : ax.values()) v += grad.background_x;
  for (auto& v : ay.values()) v += grad.background_y;
  const PhysicalField bx = transform_inverse(dx(b)), by = transform_inverse(dy(b));
  const PhysicalField lapx = transform_inverse(laplacian(grad.ax));
  const PhysicalField lapy = transform_inverse(laplacian(grad.ay));
  double r = 0.0;
  const auto axv = std::as_const(ax).values(), ayv = std::as_const(ay).values();
  const auto bxv = bx.values(), byv = by.values(), lxv = lapx.values(), lyv = lapy.values();
  for (std::size_t n = 0; n < axv.size(); ++n) {
    r = std::max(r, std::abs(ayv[n] * bxv[n] - axv[n] * byv[n]));
    r = std::max(r, std::abs(ayv[n] * lxv[n] - axv[n] * lyv[n]));
  }
  return r;
}

inline double hall_residual(const SpectralField& a, const SpectralField& b) {
  return hall_residual(PotentialGradient::of(a), b);
}

inline double steady_residual(const SteadyState& ss, const GridPtr& g) {
  return hall_residual(steady_gradient(ss, g), transform_forward(steady_fields(ss, g).second));
}

}  // namespace emhd
