#pragma once

// Exponential-integrator phi functions and analytic functions of 2x2 complex
// matrices.
//
//   phi_0(z) = e^z,   phi_{k+1}(z) = (phi_k(z) - 1/k!) / z.
//
// Matrix functions use the two-point Newton (Hermite) form, valid for every
// 2x2 matrix including defective ones:
//
//   f(A) = f(b) I + f[a, b] (A - b I),   a, b the eigenvalues of A,
//
// with the divided difference f[a, b] evaluated as an integral of f' when a
// and b are close, so the coalescing-root limit is continuous.

#include <array>
#include <cmath>
#include <complex>

#include "emhd/error.hpp"

namespace emhd {

using cplx = std::complex<double>;

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
  cplx a00{}, a01{}, a10{}, a11{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  [[nodiscard]] std::array<cplx, 2> apply(cplx x0, cplx x1) const {
    return {a00 * x0 + a01 * x1, a10 * x0 + a11 * x1};
  }
  friend Mat2 operator*(const Mat2& p, const Mat2& q) {
    return {p.a00 * q.a00 + p.a01 * q.a10, p.a00 * q.a01 + p.a01 * q.a11,
            p.a10 * q.a00 + p.a11 * q.a10, p.a10 * q.a01 + p.a11 * q.a11};
  }
  friend Mat2 operator+(const Mat2& p, const Mat2& q) {
    return {p.a00 + q.a00, p.a01 + q.a01, p.a10 + q.a10, p.a11 + q.a11};
  }
  friend Mat2 operator*(cplx s, const Mat2& p) { return {s * p.a00, s * p.a01, s * p.a10, s * p.a11}; }
};

namespace detail {

inline constexpr std::array<double, 8> kFactorial = {1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0};

/// 10-point Gauss-Legendre rule on [0, 1].
inline constexpr std::array<double, 10> kGl10Nodes = {
    0.013046735741414128, 0.067468316655507732, 0.16029521585048778, 0.28330230293537639,
    0.42556283050918442,  0.57443716949081558,  0.71669769706462361, 0.83970478414951222,
    0.93253168334449227,  0.98695326425858587};
inline constexpr std::array<double, 10> kGl10Weights = {
    0.033335672154344069, 0.074725674575290296, 0.10954318125799102, 0.13463335965499818,
    0.14776211235737644,  0.14776211235737644,  0.13463335965499818, 0.10954318125799102,
    0.074725674575290296, 0.033335672154344069};

}  // namespace detail

/// phi_k(z) for k in [0, 6].
inline cplx phi(int k, cplx z) {
  if (k < 0 || k > 6) throw InvalidArgument("phi: order must lie in [0, 6]");
  if (std::abs(z) < 1.0) {
    // Taylor series sum_n z^n / (n + k)!
    cplx term = 1.0 / detail::kFactorial[static_cast<std::size_t>(k)];
    cplx sum = term;
    for (int n = 1; n < 30; ++n) {
      term *= z / static_cast<double>(n + k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  cplx p = std::exp(z);
  for (int m = 0; m < k; ++m) p = (p - 1.0 / detail::kFactorial[static_cast<std::size_t>(m)]) / z;
  return p;
}

/// d/dz phi_k(z) = phi_k(z) - k phi_{k+1}(z)
inline cplx phi_prime(int k, cplx z) { return k == 0 ? std::exp(z) : phi(k, z) - static_cast<double>(k) * phi(k + 1, z); }

/// Divided difference of phi_k at (z1, z2) in the scaled variable.
inline cplx phi_divided_difference(int k, cplx z1, cplx z2) {
  const cplx d = z1 - z2;
  if (std::abs(d) > 0.5) return (phi(k, z1) - phi(k, z2)) / d;
  cplx s = 0.0;
  for (std::size_t n = 0; n < detail::kGl10Nodes.size(); ++n)
    s += detail::kGl10Weights[n] * phi_prime(k, z2 + detail::kGl10Nodes[n] * d);
  return s;
}

/// Eigenvalues of a 2x2 matrix ordered so that Re(first) <= Re(second).
inline std::array<cplx, 2> eigenvalues(const Mat2& m) {
  const cplx tr = m.a00 + m.a11;
  const cplx det = m.a00 * m.a11 - m.a01 * m.a10;
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  // Pick the root with no cancellation, then the other from the product.
  const cplx q = -0.5 * (tr + (std::real(std::conj(tr) * disc) >= 0.0 ? disc : -disc));
  cplx r1, r2;
  if (q == cplx(0.0)) {
    r1 = r2 = 0.5 * tr;
  } else {
    r1 = -q;  // the larger-magnitude root of lambda^2 - tr lambda + det

    r2 = det / r1;
  }
  if (r1.real() > r2.real()) std::swap(r1, r2);
  return {r1, r2};
}

/// Linear combination of phi functions  sum_k coef[k] phi_k.
struct PhiCombination {
  std::array<double, 5> coef{};  // coefficients of phi_0 .. phi_4
};

/// F(h M) = sum_k coef[k] phi_k(h M) for a 2x2 matrix M and step h.
inline Mat2 matrix_phi(const Mat2& m, double h, const PhiCombination& f) {
  const auto ev = eigenvalues(m);
  const cplx a = ev[0], b = ev[1];  // b is the slower (larger real part) root
  cplx fb = 0.0, dd = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double c = f.coef[static_cast<std::size_t>(k)];
    if (c == 0.0) continue;
    fb += c * phi(k, h * b);
    dd += c * h * phi_divided_difference(k, h * a, h * b);
  }
  Mat2 shifted = m;
  shifted.a00 -= b;
  shifted.a11 -= b;
  Mat2 out = dd * shifted;
  out.a00 += fb;
  out.a11 += fb;
  return out;
}

inline Mat2 matrix_exp(const Mat2& m, double h) { return matrix_phi(m, h, PhiCombination{{1.0, 0, 0, 0, 0}}); }

}  // namespace emhd
