#pragma once

// Lebesgue norms of periodic grid functions from their samples (rectangle
// rule, which is spectrally accurate for smooth periodic integrands).
//
//   |f|_{L^p_x L^q_y} = ( int ( int |f(x,y)|^q dy )^{p/q} dx )^{1/p}

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "emhd/error.hpp"
#include "emhd/field.hpp"

namespace emhd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

/// (sum |v_n|^r h)^{1/r}, or max |v_n| for r = inf.
inline double discrete_lr(const std::vector<double>& v, double r, double h) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  // scale by the max to avoid overflow for large r
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / m, r);
  return m * std::pow(s * h, 1.0 / r);
}

inline void check_exponent(double r) {
  if (!(r >= 1.0)) throw InvalidArgument("Lebesgue exponent must be >= 1 (or infinity)");
}

}  // namespace detail

/// Mixed norm L^p_x L^q_y.
inline double lebesgue_norm(const PhysicalField& f, double p, double q) {
  detail::check_exponent(p);
  detail::check_exponent(q);
  const Grid& g = f.grid();
  std::vector<double> row(static_cast<std::size_t>(g.ny)), outer(static_cast<std::size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) row[static_cast<std::size_t>(j)] = f(i, j);
    outer[static_cast<std::size_t>(i)] = detail::discrete_lr(row, q, g.dy());
  }
  return detail::discrete_lr(outer, p, g.dx());
}

/// Isotropic L^r.
inline double lebesgue_norm(const PhysicalField& f, double r) { return lebesgue_norm(f, r, r); }

}  // namespace emhd
