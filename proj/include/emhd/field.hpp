#pragma once

// Scalar fields on a periodic grid: physical samples, Fourier coefficients,
// and the diagonal spectral operators acting on them.
//
// Normalization: forward() divides by nx*ny, so the zero mode is the mean of
// the field and Parseval reads  int |u|^2 = area * sum |u_k|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "emhd/error.hpp"
#include "emhd/fft.hpp"
#include "emhd/grid.hpp"

namespace emhd {

using cplx = std::complex<double>;

/// Real samples u(x_i, y_j) stored row-major (y fastest).
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(GridPtr grid) : grid_(std::move(grid)), v_(grid_->size(), 0.0) {}
  PhysicalField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size()) throw InvalidArgument("physical array shape does not match grid");
  }

  template <class F>
  static PhysicalField sample(GridPtr grid, F&& f) {
    PhysicalField u(grid);
    for (int i = 0; i < grid->nx; ++i)
      for (int j = 0; j < grid->ny; ++j) u.v_[grid->index(i, j)] = f(grid->x(i), grid->y(j));
    return u;
  }

  [[nodiscard]] const Grid& grid() const { return *grid_; }
  [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return v_; }
  [[nodiscard]] std::span<double> values() { return v_; }
  [[nodiscard]] double operator()(int i, int j) const { return v_[grid_->index(i, j)]; }
  double& operator()(int i, int j) { return v_[grid_->index(i, j)]; }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

/// Fourier coefficients of a real scalar field, full nx x ny layout.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(GridPtr grid) : grid_(std::move(grid)), c_(grid_->size(), cplx{}) {}
  SpectralField(GridPtr grid, std::vector<cplx> coeffs) : grid_(std::move(grid)), c_(std::move(coeffs)) {
    if (c_.size() != grid_->size()) throw InvalidArgument("coefficient array shape does not match grid");
  }

  [[nodiscard]] const Grid& grid() const { return *grid_; }
  [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
  [[nodiscard]] std::span<const cplx> coeffs() const { return c_; }
  [[nodiscard]] std::span<cplx> coeffs() { return c_; }
  [[nodiscard]] cplx operator()(int i, int j) const { return c_[grid_->index(i, j)]; }
  cplx& operator()(int i, int j) { return c_[grid_->index(i, j)]; }
  [[nodiscard]] bool empty() const { return !grid_; }

  /// Apply a per-mode multiplier m(i, j) in place.
  template <class M>
  SpectralField& transform(M&& m) {
    for (int i = 0; i < grid_->nx; ++i)
      for (int j = 0; j < grid_->ny; ++j) c_[grid_->index(i, j)] *= m(i, j);
    return *this;
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(*grid_, o.grid(), "operator+=");
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o.c_[n];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(*grid_, o.grid(), "operator-=");
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& c : c_) c *= a;
    return *this;
  }
  /// this += a * o
  SpectralField& axpy(double a, const SpectralField& o) {
    require_same_grid(*grid_, o.grid(), "axpy");
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += a * o.c_[n];
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  GridPtr grid_;
  std::vector<cplx> c_;
};

inline SpectralField transform_forward(const PhysicalField& u) {
  const Grid& g = u.grid();
  SpectralField f(u.grid_ptr());
  fft::forward(g.nx, g.ny, u.values(), f.coeffs());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : f.coeffs()) c *= scale;
  return f;
}

inline SpectralField transform_forward(const GridPtr& grid, std::span<const double> values) {
  if (values.size() != grid->size()) throw InvalidArgument("physical array shape does not match grid");
  return transform_forward(PhysicalField(grid, std::vector<double>(values.begin(), values.end())));
}

inline PhysicalField transform_inverse(const SpectralField& f) {
  const Grid& g = f.grid();
  PhysicalField u(f.grid_ptr());
  fft::inverse(g.nx, g.ny, f.coeffs(), u.values());
  return u;
}

/// Zero every coefficient on the Nyquist row or column.
inline SpectralField& zero_nyquist(SpectralField& f) {
  const Grid& g = f.grid();
  for (int j = 0; j < g.ny; ++j) f(g.nx / 2, j) = 0.0;
  for (int i = 0; i < g.nx; ++i) f(i, g.ny / 2) = 0.0;
  return f;
}

/// Multiply by (i kx)^order_x (i ky)^order_y; Nyquist modes are zeroed.
inline SpectralField derivative(const SpectralField& f, int order_x, int order_y) {
  if (order_x < 0 || order_y < 0 || order_x > 8 || order_y > 8)
    throw InvalidArgument("derivative orders must lie in [0, 8]");
  const Grid& g = f.grid();
  auto ipow = [](cplx z, int n) {
    cplx r(1.0);
    for (int p = 0; p < n; ++p) r *= z;
    return r;
  };
  std::vector<cplx> px(static_cast<std::size_t>(g.nx)), py(static_cast<std::size_t>(g.ny));
  for (int i = 0; i < g.nx; ++i) px[static_cast<std::size_t>(i)] = ipow(cplx(0.0, g.kx[static_cast<std::size_t>(i)]), order_x);
  for (int j = 0; j < g.ny; ++j) py[static_cast<std::size_t>(j)] = ipow(cplx(0.0, g.ky[static_cast<std::size_t>(j)]), order_y);
  SpectralField out = f;
  out.transform([&](int i, int j) { return px[static_cast<std::size_t>(i)] * py[static_cast<std::size_t>(j)]; });
  return zero_nyquist(out);
}

inline SpectralField dx(const SpectralField& f) { return derivative(f, 1, 0); }
inline SpectralField dy(const SpectralField& f) { return derivative(f, 0, 1); }

inline SpectralField laplacian(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out = f;
  out.transform([&](int i, int j) {
    const double kx = g.kx[static_cast<std::size_t>(i)], ky = g.ky[static_cast<std::size_t>(j)];
    return -(kx * kx + ky * ky);
  });
  return zero_nyquist(out);
}

struct MultiplierResult {
  SpectralField field;
  /// L^2 mass (integral of |u|^2) of the modes projected out on singular lines.
  double discarded_mass = 0.0;
};

/// Multiply by |xi_1|^sx |xi|^s. For sx < 0 the line xi_1 = 0 and for s < 0
/// the origin are projected to zero; their mass is reported.
inline MultiplierResult fractional_multiplier(const SpectralField& f, double sx, double s) {
  const Grid& g = f.grid();
  MultiplierResult r{f, 0.0};
  auto& out = r.field;
  for (int i = 0; i < g.nx; ++i) {
    const double k1 = std::abs(g.kx[static_cast<std::size_t>(i)]);
    for (int j = 0; j < g.ny; ++j) {
      const double ky = g.ky[static_cast<std::size_t>(j)];
      const double k = std::hypot(k1, ky);
      cplx& c = out(i, j);
      const bool singular = (sx < 0.0 && k1 == 0.0) || (s < 0.0 && k == 0.0);
      if (singular) {
        if (!g.is_nyquist(i, j)) r.discarded_mass += std::norm(c) * g.area();
        c = 0.0;
        continue;
      }
      const double wx = sx == 0.0 ? 1.0 : std::pow(k1, sx);
      const double w = s == 0.0 ? 1.0 : std::pow(k, s);
      c *= wx * w;
    }
  }
  zero_nyquist(out);
  return r;
}

/// Largest retained |mode index| under the two-thirds rule, chosen so that a
/// product of two retained fields never aliases back into the retained band.
inline int dealias_cutoff(int n) { return (n - 1) / 3; }

inline SpectralField dealias(const SpectralField& f) {
  const Grid& g = f.grid();
  const int cx = dealias_cutoff(g.nx), cy = dealias_cutoff(g.ny);
  SpectralField out = f;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      if (std::abs(g.mode_x(i)) > cx || std::abs(g.mode_y(j)) > cy) out(i, j) = 0.0;
  return out;
}

/// <f, g> = int f g over the domain.
inline double inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double s = 0.0;
  auto a = f.coeffs();
  auto b = g.coeffs();
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n].real() * b[n].real() + a[n].imag() * b[n].imag();
  return s * f.grid().area();
}

/// int |f|^2 over the domain.
inline double norm_sq(const SpectralField& f) { return inner(f, f); }
inline double l2_norm(const SpectralField& f) { return std::sqrt(norm_sq(f)); }

/// int |f|^2 computed from physical samples (trapezoid rule, exact for
/// trigonometric polynomials resolved by the grid).
inline double norm_sq(const PhysicalField& u) {
  double s = 0.0;
  for (double v : u.values()) s += v * v;
  return s * u.grid().dx() * u.grid().dy();
}

/// max over k of |c(k) - conj(c(-k))| relative to max |c|.
inline double hermitian_defect(const SpectralField& f) {
  const Grid& g = f.grid();
  double d = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) d = std::max(d, std::abs(f(i, j) - std::conj(f(g.mirror_x(i), g.mirror_y(j)))));
  const double m = f.max_abs();
  return m > 0.0 ? d / m : 0.0;
}

/// Copy coefficients onto another grid of the same domain, keeping common
/// modes; Nyquist modes of the smaller grid are dropped.
inline SpectralField resample(const SpectralField& f, const GridPtr& target) {
  const Grid& s = f.grid();
  const Grid& t = *target;
  if (s.lx != t.lx || s.ly != t.ly) throw GridMismatch("resample: domains differ");
  SpectralField out(target);
  const int hx = std::min(s.nx, t.nx) / 2, hy = std::min(s.ny, t.ny) / 2;
  for (int mx = -hx + 1; mx < hx; ++mx) {
    const int is = (mx + s.nx) % s.nx, it = (mx + t.nx) % t.nx;
    for (int my = -hy + 1; my < hy; ++my) {
      const int js = (my + s.ny) % s.ny, jt = (my + t.ny) % t.ny;
      out(it, jt) = f(is, js);
    }
  }
  return out;
}

/// Physical samples of d_x^ox d_y^oy f, optionally two-thirds truncated.
/// Equivalent to transform_inverse(dealias(derivative(f, ox, oy))) without
/// the intermediate spectra.
inline PhysicalField physical_derivative(const SpectralField& f, int ox, int oy, bool truncate) {
  if (ox < 0 || oy < 0 || ox > 8 || oy > 8) throw InvalidArgument("derivative orders must lie in [0, 8]");
  const Grid& g = f.grid();
  const int nh = g.ny / 2 + 1;
  const int cx = truncate ? dealias_cutoff(g.nx) : g.nx, cy = truncate ? dealias_cutoff(g.ny) : g.ny;
  const bool nyq = ox + oy > 0 || truncate;
  auto ipow = [](cplx z, int n) {
    cplx r(1.0);
    for (int p = 0; p < n; ++p) r *= z;
    return r;
  };
  std::vector<cplx> py(static_cast<std::size_t>(nh));
  for (int j = 0; j < nh; ++j) py[static_cast<std::size_t>(j)] = ipow(cplx(0.0, g.ky[static_cast<std::size_t>(j)]), oy);
  auto half = fft::allocate<fftw_complex>(static_cast<std::size_t>(g.nx) * nh);
  for (int i = 0; i < g.nx; ++i) {
    const cplx px = ipow(cplx(0.0, g.kx[static_cast<std::size_t>(i)]), ox);
    const bool drop_row = (nyq && i == g.nx / 2) || std::abs(g.mode_x(i)) > cx;
    for (int j = 0; j < nh; ++j) {
      auto& h = half[static_cast<std::size_t>(i) * nh + j];
      if (drop_row || (nyq && j == g.ny / 2) || std::abs(g.mode_y(j)) > cy) {
        h[0] = h[1] = 0.0;
        continue;
      }
      const cplx c = f(i, j) * px * py[static_cast<std::size_t>(j)];
      h[0] = c.real();
      h[1] = c.imag();
    }
  }
  PhysicalField u(f.grid_ptr());
  fft::inverse_half(g.nx, g.ny, half.get(), u.values());
  return u;
}

/// Grid with twice the points on the same domain.
inline GridPtr padded_grid(const Grid& g) { return make_grid(2 * g.nx, 2 * g.ny, g.lx, g.ly); }

/// Alias-free product f*g, computed on the 2x zero-padded grid and truncated
/// back to the grid of f (Nyquist modes dropped).
inline SpectralField product_padded(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "product_padded");
  const GridPtr big = padded_grid(f.grid());
  PhysicalField a = transform_inverse(resample(f, big));
  const PhysicalField b = transform_inverse(resample(g, big));
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) av[n] *= bv[n];
  return resample(transform_forward(a), f.grid_ptr());
}

}  // namespace emhd
