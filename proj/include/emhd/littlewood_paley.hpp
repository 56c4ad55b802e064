#pragma once

// Dyadic frequency decomposition on the grid.
//
//   chi(r)  = 1 for r <= 3/4, 0 for r >= 1, quintic smoothstep in between
//   phi(r)  = chi(r/2) - chi(r),  supported in 3/4 < r < 2
//   Delta_q = phi(|xi| / 2^q) for q >= 0,  chi(|xi|) for q = -1
//   S_q     = chi(|xi| / 2^q) for q >= 0,  0 for q <= -1
//
// Horizontal operators use |xi_1| in place of |xi|. Blocks are evaluated
// from the cutoffs directly, so coefficients outside a block's support are
// exactly zero. Nyquist modes are kept: projections only reweight.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "emhd/error.hpp"
#include "emhd/field.hpp"
#include "emhd/lebesgue.hpp"

namespace emhd::lp {

enum class Axis { isotropic, horizontal };

inline double chi(double r) {
  r = std::abs(r);
  if (r <= 0.75) return 1.0;
  if (r >= 1.0) return 0.0;
  const double t = (r - 0.75) / 0.25;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double phi(double r) { return chi(0.5 * r) - chi(r); }

/// lambda_q = 2^q (q >= -1).
inline double lambda(int q) { return std::ldexp(1.0, q); }

/// Weight of Delta_q at radius r.
inline double block_weight(int q, double r) { return q < 0 ? chi(r) : phi(std::ldexp(r, -q)); }

/// Weight of S_q at radius r.
inline double low_weight(int q, double r) { return q < 0 ? 0.0 : chi(std::ldexp(r, -q)); }

/// Smallest J such that blocks -1..J cover every grid frequency along the axis.
inline int max_index(const Grid& g, Axis axis) {
  const double rmax = axis == Axis::isotropic ? std::hypot(g.max_abs_kx(), g.max_abs_ky()) : g.max_abs_kx();
  int j = -1;
  while (0.75 * lambda(j + 1) < rmax) ++j;
  return j;
}

inline double radius(const Grid& g, int i, int j, Axis axis) {
  const double k1 = g.kx[static_cast<std::size_t>(i)];
  return axis == Axis::isotropic ? std::hypot(k1, g.ky[static_cast<std::size_t>(j)]) : std::abs(k1);
}

/// A diagonal frequency multiplier m(radius_iso, radius_hor).
using Weight = std::function<double(double, double)>;

inline SpectralField apply(const SpectralField& u, const Weight& w) {
  const Grid& g = u.grid();
  SpectralField out = u;
  out.transform([&](int i, int j) { return w(radius(g, i, j, Axis::isotropic), radius(g, i, j, Axis::horizontal)); });
  return out;
}

/// Localization factor for one axis.
struct AxisOp {
  enum Kind { block, low, tilde, identity } kind = identity;
  int q = 0;
  int qmax = 0;  // largest block index on the grid (used by tilde)

  [[nodiscard]] double operator()(double r) const {
    switch (kind) {
      case block: return block_weight(q, r);
      case low: return low_weight(q, r);
      case tilde: {
        double s = 0.0;
        for (int p = std::max(-1, q - 1); p <= std::min(qmax, q + 1); ++p) s += block_weight(p, r);
        return s;
      }
      case identity: return 1.0;
    }
    return 1.0;
  }
};

inline SpectralField apply(const SpectralField& u, const AxisOp& iso, const AxisOp& hor) {
  return apply(u, [&](double ri, double rh) { return iso(ri) * hor(rh); });
}

inline void check_index(const Grid& g, int q, Axis axis) {
  if (q < -1 || q > max_index(g, axis)) throw InvalidArgument("Littlewood-Paley index out of range for this grid");
}

/// Delta_j (isotropic) or Delta_j^h (horizontal).
inline SpectralField project(const SpectralField& u, int j, Axis axis) {
  check_index(u.grid(), j, axis);
  const AxisOp op{AxisOp::block, j, 0};
  return axis == Axis::isotropic ? apply(u, op, AxisOp{}) : apply(u, AxisOp{}, op);
}

/// Delta_j Delta_k^h.
inline SpectralField project2(const SpectralField& u, int j, int k) {
  check_index(u.grid(), j, Axis::isotropic);
  check_index(u.grid(), k, Axis::horizontal);
  return apply(u, AxisOp{AxisOp::block, j, 0}, AxisOp{AxisOp::block, k, 0});
}

struct LPDecomposition {
  SpectralField source;
  int jmax = -1;
  int kmax = -1;
  std::map<std::pair<int, int>, SpectralField> blocks;

  [[nodiscard]] SpectralField sum() const {
    SpectralField s(source.grid_ptr());
    for (const auto& [key, b] : blocks) s += b;
    return s;
  }
};

inline LPDecomposition decompose(const SpectralField& u) {
  LPDecomposition d{u, max_index(u.grid(), Axis::isotropic), max_index(u.grid(), Axis::horizontal), {}};
  for (int j = -1; j <= d.jmax; ++j)
    for (int k = -1; k <= d.kmax; ++k) d.blocks.emplace(std::make_pair(j, k), project2(u, j, k));
  return d;
}

/// Table of per-block quadratic sums  area * sum_xi W_j^2 W_k^2 Q(xi),
/// where Q(i, j) is a non-negative per-mode density (e.g. |u_hat|^2).
class BlockTable {
 public:
  BlockTable(int jmax, int kmax) : jmax_(jmax), kmax_(kmax), v_(static_cast<std::size_t>((jmax + 2) * (kmax + 2)), 0.0) {}
  [[nodiscard]] int jmax() const { return jmax_; }
  [[nodiscard]] int kmax() const { return kmax_; }
  [[nodiscard]] double operator()(int j, int k) const { return v_[idx(j, k)]; }
  double& operator()(int j, int k) { return v_[idx(j, k)]; }

 private:
  [[nodiscard]] std::size_t idx(int j, int k) const { return static_cast<std::size_t>((j + 1) * (kmax_ + 2) + (k + 1)); }
  int jmax_, kmax_;
  std::vector<double> v_;
};

/// Generic block sums of a per-mode density (may be signed, e.g. a cross term).
template <class Density>
BlockTable block_sums(const Grid& g, Density&& density) {
  const int jm = max_index(g, Axis::isotropic), km = max_index(g, Axis::horizontal);
  BlockTable t(jm, km);
  std::vector<double> wj(static_cast<std::size_t>(jm + 2)), wk(static_cast<std::size_t>(km + 2));
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      const double d = density(i, j);
      if (d == 0.0) continue;
      const double ri = radius(g, i, j, Axis::isotropic), rh = radius(g, i, j, Axis::horizontal);
      for (int a = -1; a <= jm; ++a) wj[static_cast<std::size_t>(a + 1)] = block_weight(a, ri);
      for (int b = -1; b <= km; ++b) wk[static_cast<std::size_t>(b + 1)] = block_weight(b, rh);
      for (int a = -1; a <= jm; ++a) {
        const double x = wj[static_cast<std::size_t>(a + 1)];
        if (x == 0.0) continue;
        for (int b = -1; b <= km; ++b) {
          const double y = wk[static_cast<std::size_t>(b + 1)];
          if (y != 0.0) t(a, b) += x * x * y * y * d * g.area();
        }
      }
    }
  }
  return t;
}

/// |Delta_j Delta_k^h u|^2 for all blocks; several components are summed
/// (pass the components of a vector field).
inline BlockTable block_energies(const std::vector<const SpectralField*>& comps) {
  if (comps.empty()) throw InvalidArgument("block_energies: no components");
  const Grid& g = comps.front()->grid();
  for (const auto* c : comps) require_same_grid(g, c->grid(), "block_energies");
  return block_sums(g, [&](int i, int j) {
    double s = 0.0;
    for (const auto* c : comps) s += std::norm((*c)(i, j));
    return s;
  });
}

inline BlockTable block_energies(const SpectralField& u) { return block_energies(std::vector<const SpectralField*>{&u}); }

/// sum_j |Delta_j u|^2 along one axis.
inline double square_sum(const SpectralField& u, Axis axis) {
  const Grid& g = u.grid();
  const int jm = max_index(g, axis);
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double r = radius(g, i, j, axis);
      double w2 = 0.0;
      for (int q = -1; q <= jm; ++q) w2 += block_weight(q, r) * block_weight(q, r);
      s += w2 * std::norm(u(i, j));
    }
  return s * g.area();
}

/// Besov norm  sum_{j,k} lambda_j^{s2} lambda_k^{s1} |Delta_j Delta_k^h u|.
inline double besov_norm(const BlockTable& e, double s1, double s2) {
  double s = 0.0;
  for (int j = -1; j <= e.jmax(); ++j)
    for (int k = -1; k <= e.kmax(); ++k) {
      const double v = e(j, k);
      if (v > 0.0) s += std::pow(lambda(j), s2) * std::pow(lambda(k), s1) * std::sqrt(v);
    }
  return s;
}

inline double besov_norm(const SpectralField& u, double s1, double s2) { return besov_norm(block_energies(u), s1, s2); }

/// Besov norm of a vector field given by its components.
inline double besov_norm(const std::vector<const SpectralField*>& comps, double s1, double s2) {
  return besov_norm(block_energies(comps), s1, s2);
}

/// Homogeneous anisotropic Sobolev norm |(|D_x|^{s1} |D|^{s2}) u|, exact on
/// the grid. Singular lines are projected out; their mass is returned.
inline MultiplierResult sobolev_multiplier(const SpectralField& u, double s1, double s2) { return fractional_multiplier(u, s1, s2); }

inline double sobolev_norm(const SpectralField& u, double s1, double s2) { return l2_norm(fractional_multiplier(u, s1, s2).field); }

/// Square-sum form  (sum lambda_j^{2 s2} lambda_k^{2 s1} |Delta_j Delta_k^h u|^2)^{1/2}.
inline double sobolev_norm_lp(const SpectralField& u, double s1, double s2) {
  const BlockTable e = block_energies(u);
  double s = 0.0;
  for (int j = -1; j <= e.jmax(); ++j)
    for (int k = -1; k <= e.kmax(); ++k) s += std::pow(lambda(j), 2.0 * s2) * std::pow(lambda(k), 2.0 * s1) * e(j, k);
  return std::sqrt(s);
}

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Range over grid modes of  multiplier weight / LP weight  (as norms), on
/// modes where both are nonzero. For a field supported on those modes,
/// sobolev_norm / sobolev_norm_lp lies in this range.
inline Bracket equivalence_bracket(const Grid& g, double s1, double s2) {
  const int jm = max_index(g, Axis::isotropic), km = max_index(g, Axis::horizontal);
  Bracket b{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double ri = radius(g, i, j, Axis::isotropic), rh = radius(g, i, j, Axis::horizontal);
      if (g.is_nyquist(i, j) || ri == 0.0) continue;
      if (rh == 0.0 && s1 != 0.0) continue;
      const double m2 = std::pow(rh, 2.0 * s1) * std::pow(ri, 2.0 * s2);
      double l2 = 0.0;
      for (int a = -1; a <= jm; ++a) {
        const double x = block_weight(a, ri);
        if (x == 0.0) continue;
        for (int c = -1; c <= km; ++c) {
          const double y = block_weight(c, rh);
          l2 += std::pow(lambda(a), 2.0 * s2) * std::pow(lambda(c), 2.0 * s1) * x * x * y * y;
        }
      }
      if (m2 == 0.0 || l2 == 0.0) continue;
      const double r = std::sqrt(m2 / l2);
      b.lo = std::min(b.lo, r);
      b.hi = std::max(b.hi, r);
    }
  return b;
}

// ---------------------------------------------------------------------------
// Paraproducts

/// The nine terms B^1..B^9 of Delta_j Delta_k^h (f g). Term m = 1 + a + 3 c
/// where a (isotropic) and c (horizontal) select the interaction:
/// 0 low-high, 1 high-low, 2 high-high.
inline std::array<SpectralField, 9> bony_terms(const SpectralField& f, const SpectralField& g, int j, int k) {
  require_same_grid(f.grid(), g.grid(), "bony_terms");
  const Grid& gr = f.grid();
  check_index(gr, j, Axis::isotropic);
  check_index(gr, k, Axis::horizontal);
  const int jm = max_index(gr, Axis::isotropic), km = max_index(gr, Axis::horizontal);

  // f and g localizations for one axis, one entry per summation index
  struct Piece {
    AxisOp fop, gop;
  };
  auto pieces = [](int type, int target, int qmax) {
    std::vector<Piece> out;
    const int hi = type == 2 ? qmax : target + 2;
    for (int p = std::max(-1, target - 2); p <= std::min(qmax, hi); ++p) {
      const AxisOp blk{AxisOp::block, p, qmax};
      const AxisOp low{AxisOp::low, p - 1, qmax};
      const AxisOp til{AxisOp::tilde, p, qmax};
      if (type == 0) out.push_back({low, blk});
      else if (type == 1) out.push_back({blk, low});
      else out.push_back({til, blk});
    }
    return out;
  };

  const AxisOp target_iso{AxisOp::block, j, jm}, target_hor{AxisOp::block, k, km};
  std::array<SpectralField, 9> terms;
  for (int c = 0; c < 3; ++c) {
    const auto hp = pieces(c, k, km);
    for (int a = 0; a < 3; ++a) {
      const auto ip = pieces(a, j, jm);
      SpectralField acc(f.grid_ptr());
      for (const auto& pi : ip)
        for (const auto& ph : hp) {
          const SpectralField ff = apply(f, pi.fop, ph.fop);
          const SpectralField gg = apply(g, pi.gop, ph.gop);
          if (ff.max_abs() == 0.0 || gg.max_abs() == 0.0) continue;
          acc += product_padded(ff, gg);
        }
      terms[static_cast<std::size_t>(a + 3 * c)] = apply(acc, target_iso, target_hor);
    }
  }
  return terms;
}

/// Delta_j Delta_k^h (f g) with an alias-free product.
inline SpectralField localized_product(const SpectralField& f, const SpectralField& g, int j, int k) {
  return project2(product_padded(f, g), j, k);
}

// ---------------------------------------------------------------------------
// Commutator and inequality probes

/// [Delta_j Delta_k^h, u.grad] v = Delta_j Delta_k^h (u.grad v) - u.grad(Delta_j Delta_k^h v)
inline SpectralField commutator(const SpectralField& u1, const SpectralField& u2, const SpectralField& v, int j, int k) {
  require_same_grid(u1.grid(), u2.grid(), "commutator");
  require_same_grid(u1.grid(), v.grid(), "commutator");
  const SpectralField adv = product_padded(u1, dx(v)) + product_padded(u2, dy(v));
  const SpectralField pv = project2(v, j, k);
  const SpectralField adv_local = product_padded(u1, dx(pv)) + product_padded(u2, dy(pv));
  return project2(adv, j, k) - adv_local;
}

struct ProbeResult {
  double lhs = 0.0;
  double rhs = 0.0;  // without the implicit constant
  [[nodiscard]] double ratio() const { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? kInf : 0.0); }
};

/// |commutator|_{L^{r1}} against |grad u|_{L^{r2}} |v|_{L^{r3}}.
inline ProbeResult commutator_bound_probe(const SpectralField& u1, const SpectralField& u2, const SpectralField& v, int j, int k,
                                          double r1, double r2, double r3) {
  if (!(r1 > 1.0) || std::isinf(r1)) throw InvalidArgument("commutator probe: need 1 < r1 < inf");
  if (!(r2 >= 2.0)) throw InvalidArgument("commutator probe: need r2 >= 2");
  if (!(r3 >= 1.0)) throw InvalidArgument("commutator probe: need r3 >= 1");
  const double inv = 1.0 / r2 + 1.0 / r3;
  if (std::abs(1.0 / r1 - inv) > 1e-12) throw InvalidArgument("commutator probe: need 1/r1 = 1/r2 + 1/r3");
  const PhysicalField c = transform_inverse(commutator(u1, u2, v, j, k));
  // |grad u| pointwise (Frobenius norm of the Jacobian)
  const PhysicalField a = transform_inverse(dx(u1)), b = transform_inverse(dy(u1));
  const PhysicalField cc = transform_inverse(dx(u2)), d = transform_inverse(dy(u2));
  PhysicalField gu(u1.grid_ptr());
  for (std::size_t n = 0; n < gu.values().size(); ++n)
    gu.values()[n] = std::sqrt(a.values()[n] * a.values()[n] + b.values()[n] * b.values()[n] +
                               cc.values()[n] * cc.values()[n] + d.values()[n] * d.values()[n]);
  return {lebesgue_norm(c, r1), lebesgue_norm(gu, r2) * lebesgue_norm(transform_inverse(v), r3)};
}

/// |Delta_j Delta_k^h u|_{L^p_x L^q_y} against
/// lambda_j^{1/2 - 1/q} lambda_k^{1/2 - 1/p} |Delta_j Delta_k^h u|_{L^2}.
inline ProbeResult bernstein_probe(const SpectralField& u, int j, int k, double p, double q) {
  if (!(p >= 2.0) || !(q >= 2.0)) throw InvalidArgument("bernstein probe: exponents must be >= 2");
  const SpectralField blk = project2(u, j, k);
  const PhysicalField x = transform_inverse(blk);
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p, iq = std::isinf(q) ? 0.0 : 1.0 / q;
  return {lebesgue_norm(x, p, q), std::pow(lambda(j), 0.5 - iq) * std::pow(lambda(k), 0.5 - ip) * l2_norm(blk)};
}

}  // namespace emhd::lp
