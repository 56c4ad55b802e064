#pragma once

// L^2(R^2) norms of exact linear solutions, by quadrature in frequency:
//
//   |d_x^k b(t)|^2 = (2 pi)^-2 int |xi1|^{2k} |b_hat(xi, t)|^2 dxi
//
// The integrand is even in xi1 and xi2, so only the quadrant [0, R]^2 is
// integrated. Each axis is split into geometric panels [R 2^-m, R 2^-m+1]
// which resolve the slow region |xi1| ~ t^-1/2 for every t of interest.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "emhd/error.hpp"
#include "emhd/gauss_legendre.hpp"
#include "emhd/linear_propagator.hpp"

namespace emhd {

enum class ProfileShape {
  /// b0_hat = |xi1|^s exp(-|xi|^2), psi0_hat = 0
  power_gaussian,
};

struct DecayProfile {
  double s = 0.45;
  ProfileShape shape = ProfileShape::power_gaussian;
  double radius = 6.0;   // truncation of the quadrant [0, R]^2
  int points = 16;       // Gauss-Legendre points per panel and axis
  int panels = 24;       // geometric panels per axis

  void validate() const {
    if (!(s > 0.0 && s < 0.5)) throw InvalidArgument("decay profile: s must lie in (0, 1/2)");
    if (!(radius > 0.0)) throw InvalidArgument("decay profile: radius must be positive");
    if (points < 2 || panels < 1) throw InvalidArgument("decay profile: need >= 2 points and >= 1 panel");
  }

  [[nodiscard]] cplx b0(double xi1, double xi2) const {
    return std::pow(std::abs(xi1), s) * std::exp(-(xi1 * xi1 + xi2 * xi2));
  }
  [[nodiscard]] cplx psi0(double, double) const { return 0.0; }
};

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> b_norm;         // |d_x^k b(t)|
  std::vector<double> grad_psi_norm;  // |d_x^k grad psi(t)|
  double max_rel_change = 0.0;        // between the two resolutions
};

namespace detail {

/// Nodes and weights for one axis of the quadrant.
inline QuadratureRule panel_rule(double radius, int panels, int points) {
  const QuadratureRule gl = gauss_legendre(points);
  QuadratureRule out;
  auto add_panel = [&](double lo, double hi) {
    const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
    for (std::size_t n = 0; n < gl.nodes.size(); ++n) {
      out.nodes.push_back(c + h * gl.nodes[n]);
      out.weights.push_back(h * gl.weights[n]);
    }
  };
  add_panel(0.0, radius * std::ldexp(1.0, -panels));
  for (int m = panels; m >= 1; --m) add_panel(radius * std::ldexp(1.0, -m), radius * std::ldexp(1.0, -m + 1));
  return out;
}

/// One series per entry of `ks`; the mode evaluations are shared.
inline std::vector<DecaySeries> decay_series_once(const DecayProfile& p, const std::vector<double>& times,
                                                  const std::vector<int>& ks, int points) {
  const QuadratureRule ax = panel_rule(p.radius, p.panels, points);
  const std::size_t n = ax.nodes.size();
  std::vector<ModeLinearSolution> modes;
  std::vector<double> w, x1sq;
  modes.reserve(n * n);
  w.reserve(n * n);
  x1sq.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      const double x1 = ax.nodes[a], x2 = ax.nodes[c];
      modes.push_back(mode_solution(x1, x2, p.psi0(x1, x2), p.b0(x1, x2)));
      // quadrant symmetry factor 4, Plancherel factor (2 pi)^-2
      w.push_back(ax.weights[a] * ax.weights[c] / (std::numbers::pi * std::numbers::pi));
      x1sq.push_back(x1 * x1);
    }
  }
  std::vector<DecaySeries> out(ks.size());
  for (auto& o : out) o.times = times;
  std::vector<double> nb(modes.size()), np(modes.size()), tb(modes.size()), tp(modes.size());
  for (double t : times) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      nb[m] = w[m] * std::norm(modes[m].b_at(t));
      np[m] = w[m] * modes[m].q() * std::norm(modes[m].psi_at(t));
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const double f = std::pow(x1sq[m], ks[i]);
        tb[m] = f * nb[m];
        tp[m] = f * np[m];
      }
      out[i].b_norm.push_back(std::sqrt(pairwise_sum(tb)));
      out[i].grad_psi_norm.push_back(std::sqrt(pairwise_sum(tp)));
    }
  }
  return out;
}

}  // namespace detail

/// Norm series at the given (increasing, non-negative) times, one per
/// derivative order in `ks`. The result at `points` per panel is compared
/// with the one at 2*points; a relative change above 1e-3 raises
/// NumericalError.
inline std::vector<DecaySeries> decay_quadrature(const DecayProfile& p, const std::vector<double>& times,
                                                 const std::vector<int>& ks) {
  p.validate();
  for (int k : ks)
    if (k < 0 || k > 2) throw InvalidArgument("decay_quadrature: k must be 0, 1 or 2");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw InvalidArgument("decay_quadrature: times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("decay_quadrature: times must be increasing");
  }
  const auto coarse = detail::decay_series_once(p, times, ks, p.points);
  auto fine = detail::decay_series_once(p, times, ks, 2 * p.points);
  double worst = 0.0;
  for (std::size_t s = 0; s < ks.size(); ++s) {
    double change = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (fine[s].b_norm[i] > 0.0)
        change = std::max(change, std::abs(coarse[s].b_norm[i] - fine[s].b_norm[i]) / fine[s].b_norm[i]);
      if (fine[s].grad_psi_norm[i] > 0.0)
        change = std::max(change, std::abs(coarse[s].grad_psi_norm[i] - fine[s].grad_psi_norm[i]) / fine[s].grad_psi_norm[i]);
    }
    fine[s].max_rel_change = change;
    worst = std::max(worst, change);
  }
  if (worst > 1e-3)
    throw NumericalError("decay_quadrature: doubling the resolution changed the result by " + std::to_string(worst));
  return fine;
}

inline DecaySeries decay_quadrature(const DecayProfile& p, const std::vector<double>& times, int k) {
  return decay_quadrature(p, times, std::vector<int>{k}).front();
}

}  // namespace emhd
