#pragma once

// Right-hand sides of the resistive 2D electron-MHD system in potential form
//
//   a_t = mu1 Lap a - (a_y b_x - a_x b_y)
//   b_t = mu2 Lap b + (a_y Lap a_x - a_x Lap a_y)
//
// and of its perturbation around the current sheet a = y + psi, b = 0:
//
//   psi_t = mu1 Lap psi - b_x + b_y psi_x - b_x psi_y
//   b_t   = mu2 Lap b + Lap psi_x + psi_y Lap psi_x - psi_x Lap psi_y
//
// Quadratic products are formed in physical space from two-thirds-truncated
// factors and truncated again afterwards.

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "emhd/error.hpp"
#include "emhd/field.hpp"

namespace emhd {

struct ModelParams {
  double mu1 = 0.0;
  double mu2 = 1.0;

  void validate() const {
    if (!std::isfinite(mu1) || !std::isfinite(mu2) || mu1 < 0.0 || mu2 < 0.0)
      throw InvalidArgument("resistivities must be finite and non-negative");
  }
};

/// Perturbation (psi, b) of the current sheet; psi = a - y.
struct PerturbationState {
  SpectralField psi;
  SpectralField b;
  ModelParams params;
  double time = 0.0;

  [[nodiscard]] const Grid& grid() const { return psi.grid(); }
  [[nodiscard]] const GridPtr& grid_ptr() const { return psi.grid_ptr(); }

  static PerturbationState zero(const GridPtr& g, ModelParams p = {}) {
    return {SpectralField(g), SpectralField(g), p, 0.0};
  }
};

/// Periodic potentials (a, b) of the full system.
struct FullState {
  SpectralField a;
  SpectralField b;
  ModelParams params;
  double time = 0.0;
};

struct Tendency {
  SpectralField first;   // d(psi)/dt or d(a)/dt
  SpectralField second;  // d(b)/dt
};

namespace detail {

/// p*q - r*s evaluated pointwise, returned in spectral space.
inline SpectralField bracket(const PhysicalField& p, const PhysicalField& q, const PhysicalField& r,
                             const PhysicalField& s, bool truncate) {
  PhysicalField out(p.grid_ptr());
  auto o = out.values();
  auto pv = p.values(), qv = q.values(), rv = r.values(), sv = s.values();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = pv[n] * qv[n] - rv[n] * sv[n];
  SpectralField f = transform_forward(out);
  return truncate ? dealias(f) : f;
}

inline void check_pair(const SpectralField& u, const SpectralField& v, const char* what) {
  if (u.empty() || v.empty()) throw InvalidArgument(std::string(what) + ": empty field");
  require_same_grid(u.grid(), v.grid(), what);
}

}  // namespace detail

/// Nonlinear Hall brackets of the full system:
/// (-(a_y b_x - a_x b_y), a_y Lap a_x - a_x Lap a_y).
inline Tendency hall_brackets(const SpectralField& a, const SpectralField& b, bool truncate = true) {
  detail::check_pair(a, b, "hall_brackets");
  const auto ax = physical_derivative(a, 1, 0, truncate);
  const auto ay = physical_derivative(a, 0, 1, truncate);
  const auto bx = physical_derivative(b, 1, 0, truncate);
  const auto by = physical_derivative(b, 0, 1, truncate);
  const SpectralField lap = laplacian(a);
  const auto lax = physical_derivative(lap, 1, 0, truncate);
  const auto lay = physical_derivative(lap, 0, 1, truncate);
  return {-detail::bracket(ay, bx, ax, by, truncate), detail::bracket(ay, lax, ax, lay, truncate)};
}

inline Tendency rhs_full(const FullState& s, bool truncate = true) {
  detail::check_pair(s.a, s.b, "rhs_full");
  Tendency t = hall_brackets(s.a, s.b, truncate);
  t.first.axpy(s.params.mu1, laplacian(s.a));
  t.second.axpy(s.params.mu2, laplacian(s.b));
  return t;
}

inline Tendency linearized_rhs(const PerturbationState& s) {
  detail::check_pair(s.psi, s.b, "linearized_rhs");
  SpectralField dpsi = s.params.mu1 * laplacian(s.psi);
  dpsi -= dx(s.b);
  SpectralField db = s.params.mu2 * laplacian(s.b);
  db += dx(laplacian(s.psi));
  return {std::move(dpsi), std::move(db)};
}

/// Nonlinear part of the perturbed system only:
/// (b_y psi_x - b_x psi_y, psi_y Lap psi_x - psi_x Lap psi_y).
inline Tendency perturbed_nonlinearity(const SpectralField& psi, const SpectralField& b, bool truncate = true) {
  detail::check_pair(psi, b, "perturbed_nonlinearity");
  const auto px = physical_derivative(psi, 1, 0, truncate);
  const auto py = physical_derivative(psi, 0, 1, truncate);
  const auto bx = physical_derivative(b, 1, 0, truncate);
  const auto by = physical_derivative(b, 0, 1, truncate);
  const SpectralField lap = laplacian(psi);
  const auto lpx = physical_derivative(lap, 1, 0, truncate);
  const auto lpy = physical_derivative(lap, 0, 1, truncate);
  return {detail::bracket(by, px, bx, py, truncate), detail::bracket(py, lpx, px, lpy, truncate)};
}

inline Tendency perturbed_nonlinearity(const PerturbationState& s, bool truncate = true) {
  return perturbed_nonlinearity(s.psi, s.b, truncate);
}

inline Tendency rhs_perturbed(const PerturbationState& s, bool truncate = true) {
  Tendency n = perturbed_nonlinearity(s, truncate);
  Tendency l = linearized_rhs(s);
  n.first += l.first;
  n.second += l.second;
  return n;
}

/// Gradient of a potential, split into a periodic part and a constant
/// background (the current sheet a = y contributes (0, 1)).
struct PotentialGradient {
  SpectralField ax;
  SpectralField ay;
  double background_x = 0.0;
  double background_y = 0.0;

  static PotentialGradient of(const SpectralField& periodic, double bgx = 0.0, double bgy = 0.0) {
    return {dx(periodic), dy(periodic), bgx, bgy};
  }
  /// Total gradient of a = y + psi.
  static PotentialGradient current_sheet(const SpectralField& psi) { return of(psi, 0.0, 1.0); }
};

struct MagneticField {
  PhysicalField b1, b2, b3;
};

/// B = (a_y, -a_x, b).
inline MagneticField reconstruct_B(const PotentialGradient& grad, const SpectralField& b) {
  require_same_grid(grad.ax.grid(), grad.ay.grid(), "reconstruct_B");
  require_same_grid(grad.ax.grid(), b.grid(), "reconstruct_B");
  MagneticField out{transform_inverse(grad.ay), transform_inverse(-grad.ax), transform_inverse(b)};
  for (auto& v : out.b1.values()) v += grad.background_y;
  for (auto& v : out.b2.values()) v -= grad.background_x;
  return out;
}

/// max |d_x B1 + d_y B2| evaluated spectrally.
inline double divergence_max(const MagneticField& B) {
  const SpectralField d = dx(transform_forward(B.b1)) + dy(transform_forward(B.b2));
  return transform_inverse(d).max_abs();
}

/// (1/2) d/dt (|grad psi|^2 + |b|^2) for a given tendency, i.e.
/// <grad psi, grad psi_t> + <b, b_t> = -<Lap psi, psi_t> + <b, b_t>.
inline double energy_rate(const SpectralField& psi, const SpectralField& b, const Tendency& t) {
  return -inner(laplacian(psi), t.first) + inner(b, t.second);
}

/// |grad psi|^2 + |b|^2
inline double basic_energy(const SpectralField& psi, const SpectralField& b) {
  return norm_sq(dx(psi)) + norm_sq(dy(psi)) + norm_sq(b);
}

/// mu1 |Lap psi|^2 + mu2 |grad b|^2
inline double basic_dissipation(const PerturbationState& s) {
  return s.params.mu1 * norm_sq(laplacian(s.psi)) + s.params.mu2 * (norm_sq(dx(s.b)) + norm_sq(dy(s.b)));
}

}  // namespace emhd
