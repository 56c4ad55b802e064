#pragma once

// Closed-form solution of the linearized perturbation system with mu1 = 0,
// mu2 = 1. Per Fourier mode xi = (xi1, xi2), q = |xi|^2:
//
//   psi_t = -i xi1 b,      b_t = -i xi1 q psi - q b,
//
// so b solves  b'' + q b' + xi1^2 q b = 0  with roots
//
//   lambda_{+-} = -q/2 (1 +- sqrt(1 - 4 xi1^2 / q)).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string_view>

#include "emhd/error.hpp"
#include "emhd/field.hpp"
#include "emhd/model.hpp"
#include "emhd/phi.hpp"

namespace emhd {

enum class Regime { distinct_real, complex_pair, double_root, zero_xi1 };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::distinct_real: return "distinct-real";
    case Regime::complex_pair: return "complex-pair";
    case Regime::double_root: return "double-root";
    case Regime::zero_xi1: return "zero-xi1";
  }
  return "?";
}

/// |1 - 4 xi1^2/q| below this is treated as an exact double root.
inline constexpr double kDoubleRootTol = 1e-12;
/// Below this the coefficient form loses accuracy and the divided-difference
/// form is used for evaluation.
inline constexpr double kNearDoubleTol = 1e-8;

struct ModeRoots {
  cplx lambda_plus;
  cplx lambda_minus;
  Regime regime;
  double disc;  // 1 - 4 xi1^2 / q
};

inline ModeRoots mode_roots(double xi1, double xi2) {
  const double q = xi1 * xi1 + xi2 * xi2;
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("mode_roots: frequency must be nonzero and finite");
  if (xi1 == 0.0) return {cplx(-q), cplx(0.0), Regime::zero_xi1, 1.0};
  const double disc = 1.0 - 4.0 * xi1 * xi1 / q;
  if (std::abs(disc) < kDoubleRootTol) return {cplx(-0.5 * q), cplx(-0.5 * q), Regime::double_root, disc};
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    // lambda_- = -2 xi1^2 / (1 + sq) avoids cancellation when xi1^2 << q
    return {cplx(-0.5 * q * (1.0 + sq)), cplx(-2.0 * xi1 * xi1 / (1.0 + sq)), Regime::distinct_real, disc};
  }
  const double w = std::sqrt(-disc);
  return {cplx(-0.5 * q, -0.5 * q * w), cplx(-0.5 * q, 0.5 * q * w), Regime::complex_pair, disc};
}

/// Exact solution of one mode.
struct ModeLinearSolution {
  double xi1 = 0.0, xi2 = 0.0;
  cplx lambda_plus, lambda_minus;
  cplx c1, c2;
  Regime regime = Regime::zero_xi1;
  cplx b0_hat, psi0_hat;
  cplx b1_hat;  // db/dt at t = 0
  double disc = 1.0;

  [[nodiscard]] double q() const { return xi1 * xi1 + xi2 * xi2; }

  [[nodiscard]] bool near_double() const {
    return regime != Regime::double_root && regime != Regime::zero_xi1 && std::abs(disc) < kNearDoubleTol;
  }

  [[nodiscard]] cplx b_at(double t) const {
    if (t == 0.0) return b0_hat;
    const cplx lp = lambda_plus, lm = lambda_minus;
    switch (regime) {
      case Regime::zero_xi1: return b0_hat * std::exp(lp * t);
      case Regime::double_root: return (c1 + c2 * t) * std::exp(lp * t);
      default: break;
    }
    if (near_double())
      return b0_hat * std::exp(lp * t) + (b1_hat - lp * b0_hat) * t * phi_divided_difference(0, lp * t, lm * t);
    return c1 * std::exp(lp * t) + c2 * std::exp(lm * t);
  }

  [[nodiscard]] cplx b_dot_at(double t) const {
    const cplx lp = lambda_plus, lm = lambda_minus;
    switch (regime) {
      case Regime::zero_xi1: return lp * b0_hat * std::exp(lp * t);
      case Regime::double_root: return (c2 + lp * (c1 + c2 * t)) * std::exp(lp * t);
      default: break;
    }
    if (near_double()) {
      const cplx b2 = -q() * b1_hat - xi1 * xi1 * q() * b0_hat;
      return b1_hat * std::exp(lp * t) + (b2 - lp * b1_hat) * t * phi_divided_difference(0, lp * t, lm * t);
    }
    return c1 * lp * std::exp(lp * t) + c2 * lm * std::exp(lm * t);
  }

  /// psi(t) = psi0 - i xi1 int_0^t b.
  [[nodiscard]] cplx psi_at(double t) const {
    if (regime == Regime::zero_xi1 || t == 0.0) return psi0_hat;
    const cplx lp = lambda_plus, lm = lambda_minus;
    cplx integral;
    if (regime == Regime::double_root) {
      // int_0^t s e^{lp s} ds = t^2 (phi_1 - phi_2)(lp t)
      integral = c1 * t * phi(1, lp * t) + c2 * t * t * phi_prime(1, lp * t);
    } else if (near_double()) {
      integral = b0_hat * t * phi(1, lp * t) + (b1_hat - lp * b0_hat) * t * t * phi_divided_difference(1, lp * t, lm * t);
    } else {
      integral = c1 * t * phi(1, lp * t) + c2 * t * phi(1, lm * t);
    }
    return psi0_hat - cplx(0.0, xi1) * integral;
  }
};

inline ModeLinearSolution mode_solution(double xi1, double xi2, cplx psi0_hat, cplx b0_hat) {
  const ModeRoots r = mode_roots(xi1, xi2);
  ModeLinearSolution s;
  s.xi1 = xi1;
  s.xi2 = xi2;
  s.lambda_plus = r.lambda_plus;
  s.lambda_minus = r.lambda_minus;
  s.regime = r.regime;
  s.disc = r.disc;
  s.psi0_hat = psi0_hat;
  s.b0_hat = b0_hat;
  const double q = s.q();
  s.b1_hat = cplx(0.0, -xi1 * q) * psi0_hat - q * b0_hat;
  if (r.regime == Regime::double_root) {
    s.c1 = b0_hat;
    s.c2 = s.b1_hat - r.lambda_plus * b0_hat;
  } else {
    const cplx d = r.lambda_minus - r.lambda_plus;
    s.c1 = (r.lambda_minus * b0_hat - s.b1_hat) / d;
    s.c2 = -(r.lambda_plus * b0_hat - s.b1_hat) / d;
  }
  return s;
}

/// Exact linear evolution of a grid state by time t. Zero and Nyquist modes
/// are left unchanged (the discrete operator vanishes there).
inline PerturbationState propagate_linear_grid(const PerturbationState& s0, double t) {
  if (s0.params.mu1 != 0.0 || s0.params.mu2 != 1.0)
    throw InvalidArgument("propagate_linear_grid: closed form requires mu1 = 0, mu2 = 1");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("propagate_linear_grid: t must be finite and >= 0");
  require_same_grid(s0.psi.grid(), s0.b.grid(), "propagate_linear_grid");
  const Grid& g = s0.grid();
  PerturbationState out = s0;
  out.time = s0.time + t;
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      if ((i == 0 && j == 0) || g.is_nyquist(i, j)) continue;
      const auto m = mode_solution(g.kx[static_cast<std::size_t>(i)], g.ky[static_cast<std::size_t>(j)], s0.psi(i, j), s0.b(i, j));
      out.psi(i, j) = m.psi_at(t);
      out.b(i, j) = m.b_at(t);
    }
  }
  return out;
}

/// Per-mode matrix of the linear part for general (mu1, mu2), acting on
/// (psi_hat, b_hat).
inline Mat2 mode_matrix(double xi1, double xi2, const ModelParams& p) {
  const double q = xi1 * xi1 + xi2 * xi2;
  return {cplx(-p.mu1 * q), cplx(0.0, -xi1), cplx(0.0, -xi1 * q), cplx(-p.mu2 * q)};
}

}  // namespace emhd
