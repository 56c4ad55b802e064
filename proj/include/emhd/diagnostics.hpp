#pragma once

// Energy functionals of the perturbation (psi, b) and trajectory probes.
//
//   E   = |b|^2 + |grad psi|^2 + |grad b|^2 + |grad^2 psi|^2 + 2 e1 <b, psi_x>
//   D   = |grad b|^2 + |grad^2 b|^2 + e1 |grad psi_x|^2 - e1 |b_x|^2 - e1 <Lap b, psi_x>
//   E_s = sum over f in {b, grad psi} of |(|d_x|^-s) f|^2 + |(|D|^{1+s} |d_x|^-s) f|^2
//
// Along the exact linear flow (mu1 = 0, mu2 = 1):  (1/2) dE/dt + D = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "emhd/error.hpp"
#include "emhd/field.hpp"
#include "emhd/littlewood_paley.hpp"
#include "emhd/model.hpp"

namespace emhd {

struct FitWindow {
  double t_lo = 10.0;
  double t_hi = 1000.0;
};

struct DiagnosticsConfig {
  double eps1 = 0.1;
  double s = 0.45;
  std::vector<double> s1_list{1.0};
  FitWindow fit_window{};

  /// Throws on invalid values; returns advisory warnings.
  [[nodiscard]] std::vector<std::string> validate() const {
    if (!(eps1 > 0.0) || !std::isfinite(eps1)) throw InvalidArgument("diagnostics: eps1 must be positive");
    if (!(s > 0.0 && s < 0.5)) throw InvalidArgument("diagnostics: s must lie in (0, 1/2)");
    for (double s1 : s1_list)
      if (!(s1 > -0.5) || !std::isfinite(s1)) throw InvalidArgument("diagnostics: every s1 must be > -1/2");
    if (!(fit_window.t_lo >= 0.0) || !(fit_window.t_hi > fit_window.t_lo))
      throw InvalidArgument("diagnostics: fit window must satisfy 0 <= t_lo < t_hi");
    std::vector<std::string> w;
    if (s <= 1.0 / 3.0) w.emplace_back("s <= 1/3: the higher-order interpolation estimates need s > 1/3");
    return w;
  }
};

// ---------------------------------------------------------------------------
// Coercivity certification

inline double hermitian_min_eig(double a, double d, double h_abs) {
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + h_abs * h_abs);
}

struct Certification {
  double eps1 = 0.0;
  double e_min = 0.0;  // min eigenvalue of E's form, normalized by |b|^2+|grad psi|^2+|grad b|^2+|grad^2 psi|^2
  double d_min = 0.0;  // min eigenvalue of D's form, normalized by |grad b|^2+|grad^2 b|^2+|d_x grad psi|^2
  double c = 0.0;      // min(e_min, d_min)
  bool certified = false;
};

/// Per-mode minimum eigenvalues of the normalized E and D forms over all
/// nonzero, non-Nyquist grid modes. Certified when e_min >= 0.1, d_min > 0.
inline Certification certify(const Grid& g, double eps1) {
  Certification c{eps1, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0, false};
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      if ((i == 0 && j == 0) || g.is_nyquist(i, j)) continue;
      const double x1 = g.kx[static_cast<std::size_t>(i)], x2 = g.ky[static_cast<std::size_t>(j)];
      const double q = x1 * x1 + x2 * x2;
      // E: (1+q)|b|^2 + (q+q^2)|psi|^2 + 2 e1 Re(conj(b) i xi1 psi)
      {
        const double nb = 1.0 + q, np = q + q * q;
        c.e_min = std::min(c.e_min, hermitian_min_eig(1.0, 1.0, eps1 * std::abs(x1) / std::sqrt(nb * np)));
      }
      // D: (q+q^2 - e1 xi1^2)|b|^2 + e1 xi1^2 q |psi|^2 + 2 Re(conj(b) (e1 q i xi1 / 2) psi)
      {
        const double nb = q + q * q, np = x1 * x1 * q;
        const double a = (q + q * q - eps1 * x1 * x1) / nb;
        const double dmin = np == 0.0 ? a : hermitian_min_eig(a, eps1, 0.5 * eps1 * q * std::abs(x1) / std::sqrt(nb * np));
        c.d_min = std::min(c.d_min, dmin);
      }
    }
  c.c = std::min(c.e_min, c.d_min);
  c.certified = c.e_min >= 0.1 && c.d_min > 0.0;
  return c;
}

/// Largest eps1 in {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, ...} that certifies.
inline Certification largest_certified_eps1(const Grid& g) {
  double e = 0.5;
  for (int n = 0; n < 30; ++n) {
    const Certification c = certify(g, e);
    if (c.certified) return c;
    e *= n % 3 == 0 ? 0.4 : 0.5;
  }
  throw NumericalError("no eps1 in the ladder certifies coercivity");
}

// ---------------------------------------------------------------------------
// Evaluators

struct EnergyPair {
  double E = 0.0;
  double D = 0.0;
};

inline double grad_norm_sq(const SpectralField& f) { return norm_sq(dx(f)) + norm_sq(dy(f)); }

/// |grad^2 f|^2 = sum over second partials.
inline double hessian_norm_sq(const SpectralField& f) {
  return norm_sq(derivative(f, 2, 0)) + 2.0 * norm_sq(derivative(f, 1, 1)) + norm_sq(derivative(f, 0, 2));
}

inline EnergyPair eval_E_D(const PerturbationState& st, const DiagnosticsConfig& cfg) {
  require_same_grid(st.psi.grid(), st.b.grid(), "eval_E_D");
  const double e1 = cfg.eps1;
  const SpectralField px = dx(st.psi);
  EnergyPair r;
  r.E = norm_sq(st.b) + grad_norm_sq(st.psi) + grad_norm_sq(st.b) + hessian_norm_sq(st.psi) + 2.0 * e1 * inner(st.b, px);
  r.D = grad_norm_sq(st.b) + hessian_norm_sq(st.b) + e1 * grad_norm_sq(px) - e1 * norm_sq(dx(st.b)) -
        e1 * inner(laplacian(st.b), px);
  return r;
}

struct NegativeNorm {
  double value = 0.0;
  double discarded_mass = 0.0;  // mass projected out on xi1 = 0
};

/// E_s; the |d_x|^-s factors project out the line xi1 = 0.
inline NegativeNorm eval_E_s(const PerturbationState& st, const DiagnosticsConfig& cfg) {
  NegativeNorm r;
  const SpectralField px = dx(st.psi), py = dy(st.psi);
  for (const SpectralField* f : {&st.b, &px, &py}) {
    const MultiplierResult lo = fractional_multiplier(*f, -cfg.s, 0.0);
    const MultiplierResult hi = fractional_multiplier(*f, -cfg.s, 1.0 + cfg.s);
    r.value += norm_sq(lo.field) + norm_sq(hi.field);
    r.discarded_mass += lo.discarded_mass;
  }
  return r;
}

/// E_l, D_l: horizontal-block weighted versions of E, D (l = 0, 1, 2).
inline EnergyPair eval_El_Dl(const PerturbationState& st, const DiagnosticsConfig& cfg, int l) {
  if (l < 0 || l > 2) throw InvalidArgument("eval_El_Dl: l must be 0, 1 or 2");
  require_same_grid(st.psi.grid(), st.b.grid(), "eval_El_Dl");
  const Grid& g = st.grid();
  const double e1 = cfg.eps1;
  auto mode = [&](int i, int j, bool dissipation) {
    const cplx b = st.b(i, j), p = st.psi(i, j);
    if (g.is_nyquist(i, j)) return dissipation ? 0.0 : std::norm(b);
    const double x1 = g.kx[static_cast<std::size_t>(i)], x2 = g.ky[static_cast<std::size_t>(j)];
    const double q = x1 * x1 + x2 * x2;
    const double cross = std::real(std::conj(b) * cplx(0.0, x1) * p);  // Re(conj(b) psi_x)
    if (!dissipation) return (1.0 + q) * std::norm(b) + (q + q * q) * std::norm(p) + 2.0 * e1 * cross;
    return (q + q * q) * std::norm(b) + e1 * x1 * x1 * q * std::norm(p) - e1 * x1 * x1 * std::norm(b) + e1 * q * cross;
  };
  const lp::BlockTable te = lp::block_sums(g, [&](int i, int j) { return mode(i, j, false); });
  const lp::BlockTable td = lp::block_sums(g, [&](int i, int j) { return mode(i, j, true); });
  EnergyPair r;
  for (int j = -1; j <= te.jmax(); ++j)
    for (int k = -1; k <= te.kmax(); ++k) {
      const double w = std::pow(lp::lambda(k), 2.0 * l);
      r.E += w * te(j, k);
      r.D += w * td(j, k);
    }
  return r;
}

/// E_{s,s1} = |b|^2 + |grad psi|^2 in H^{-s,s1} plus the same in H^{-s,s1+1}.
inline NegativeNorm eval_E_high(const PerturbationState& st, const DiagnosticsConfig& cfg, double s1) {
  NegativeNorm r;
  const SpectralField px = dx(st.psi), py = dy(st.psi);
  for (const SpectralField* f : {&st.b, &px, &py}) {
    const MultiplierResult a = fractional_multiplier(*f, -cfg.s, s1);
    const MultiplierResult c = fractional_multiplier(*f, -cfg.s, s1 + 1.0);
    r.value += norm_sq(a.field) + norm_sq(c.field);
    r.discarded_mass += a.discarded_mass;
  }
  return r;
}

struct GTriple {
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

inline GTriple eval_g(const PerturbationState& st) {
  const SpectralField bx = dx(st.b), by = dy(st.b), px = dx(st.psi), py = dy(st.psi);
  const std::vector<const SpectralField*> grad_b{&bx, &by}, grad_psi{&px, &py};
  const lp::BlockTable eb = lp::block_energies(st.b), ep = lp::block_energies(st.psi);
  const lp::BlockTable egb = lp::block_energies(grad_b), egp = lp::block_energies(grad_psi);
  GTriple r;
  r.g1 = lp::besov_norm(egb, 0.5, 1.5) + lp::besov_norm(egp, 1.5, 0.5) + lp::besov_norm(egp, 0.5, 1.5);
  r.g2 = lp::besov_norm(eb, 1.5, 0.5);
  const double p_12 = lp::besov_norm(ep, 0.5, 1.5), gp_12 = lp::besov_norm(egp, 0.5, 1.5);
  r.g3 = lp::besov_norm(eb, 0.5, 1.5) + r.g2 + lp::besov_norm(ep, 1.5, 0.5) + lp::besov_norm(egp, 1.5, 0.5) +
         p_12 * p_12 + gp_12 * gp_12;
  return r;
}

/// Relative residual of  (1/2) d/dt(|grad psi|^2 + |b|^2) + mu1 |Lap psi|^2 + mu2 |grad b|^2 = 0
/// evaluated from the instantaneous tendency.
inline double energy_law_residual(const PerturbationState& st, bool truncate = true) {
  const double rate = energy_rate(st.psi, st.b, rhs_perturbed(st, truncate));
  const double diss = basic_dissipation(st);
  const double scale = std::max(std::abs(rate), diss);
  return scale > 0.0 ? std::abs(rate + diss) / scale : 0.0;
}

// ---------------------------------------------------------------------------
// Records

struct DiagnosticsRecord {
  double time = 0.0;
  double E = 0.0, D = 0.0;
  double E_s = 0.0;
  double E_1 = 0.0, D_1 = 0.0, E_2 = 0.0, D_2 = 0.0;
  std::vector<double> E_high;  // one per cfg.s1_list entry
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
  double energy_law_residual = 0.0;
};

inline DiagnosticsRecord evaluate(const PerturbationState& st, const DiagnosticsConfig& cfg) {
  DiagnosticsRecord r;
  r.time = st.time;
  const EnergyPair ed = eval_E_D(st, cfg);
  r.E = ed.E;
  r.D = ed.D;
  r.E_s = eval_E_s(st, cfg).value;
  const EnergyPair l1 = eval_El_Dl(st, cfg, 1), l2 = eval_El_Dl(st, cfg, 2);
  r.E_1 = l1.E;
  r.D_1 = l1.D;
  r.E_2 = l2.E;
  r.D_2 = l2.D;
  for (double s1 : cfg.s1_list) r.E_high.push_back(eval_E_high(st, cfg, s1).value);
  const GTriple g = eval_g(st);
  r.g1 = g.g1;
  r.g2 = g.g2;
  r.g3 = g.g3;
  r.energy_law_residual = energy_law_residual(st);
  return r;
}

// ---------------------------------------------------------------------------
// Trajectory tools

struct DecayFit {
  double exponent = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of log(value) against log(1 + t) over t in the window.
inline DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, FitWindow window = {}) {
  if (times.size() != values.size()) throw InvalidArgument("fit_decay: times and values differ in length");
  std::vector<double> x, y;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (times[n] < window.t_lo || times[n] > window.t_hi) continue;
    if (!(values[n] > 0.0)) throw InvalidArgument("fit_decay: values must be positive");
    x.push_back(std::log1p(times[n]));
    y.push_back(std::log(values[n]));
  }
  if (x.size() < 8) throw InvalidArgument("fit_decay: fewer than 8 samples in the fit window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_decay: all samples at the same time");
  DecayFit f;
  f.exponent = sxy / sxx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  f.samples = x.size();
  return f;
}

/// Logarithmically spaced times in [t0, t1].
inline std::vector<double> log_times(double t0, double t1, int n) {
  if (!(t0 > 0.0) || !(t1 > t0) || n < 2) throw InvalidArgument("log_times: need 0 < t0 < t1 and n >= 2");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = t0 * std::pow(t1 / t0, static_cast<double>(k) / (n - 1));
  t.front() = t0;
  t.back() = t1;
  return t;
}

struct MonotonicityReport {
  std::size_t intervals = 0;
  std::vector<std::size_t> flagged;  // snapshot indices where dE/dt + c D > tol
  std::vector<std::size_t> increases;  // indices i with E[i+1] > E[i]
  double max_violation = 0.0;          // largest (dE/dt + c D) / scale
  [[nodiscard]] bool passed() const { return flagged.empty() && increases.empty(); }
};

/// Checks E non-increasing and dE/dt + c D <= tol at interior snapshots,
/// with dE/dt from centered differences. tol is relative to |dE/dt| + c D.
inline MonotonicityReport monotonicity_probe(const std::vector<double>& times, const std::vector<double>& E,
                                             const std::vector<double>& D, double c, double rel_tol = 1e-6) {
  if (times.size() != E.size() || E.size() != D.size()) throw InvalidArgument("monotonicity_probe: length mismatch");
  if (times.size() < 3) throw InvalidArgument("monotonicity_probe: need at least 3 snapshots");
  MonotonicityReport r;
  const double emax = *std::max_element(E.begin(), E.end());
  for (std::size_t i = 0; i + 1 < E.size(); ++i)
    if (E[i + 1] > E[i] + 1e-13 * emax) r.increases.push_back(i);
  for (std::size_t i = 1; i + 1 < E.size(); ++i) {
    ++r.intervals;
    const double dE = (E[i + 1] - E[i - 1]) / (times[i + 1] - times[i - 1]);
    const double v = dE + c * D[i];
    const double scale = std::abs(dE) + c * std::abs(D[i]);
    const double rel = scale > 0.0 ? v / scale : 0.0;
    r.max_violation = std::max(r.max_violation, rel);
    if (v > rel_tol * scale + 1e-300) r.flagged.push_back(i);
  }
  return r;
}

template <class Snapshots>
MonotonicityReport monotonicity_probe(const Snapshots& states, const DiagnosticsConfig& cfg, double c, double rel_tol = 1e-6) {
  std::vector<double> t, E, D;
  for (const PerturbationState& s : states) {
    const EnergyPair ed = eval_E_D(s, cfg);
    t.push_back(s.time);
    E.push_back(ed.E);
    D.push_back(ed.D);
  }
  return monotonicity_probe(t, E, D, c, rel_tol);
}

}  // namespace emhd
