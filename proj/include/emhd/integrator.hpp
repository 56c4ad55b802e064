#pragma once

// Time stepping for the perturbed system  u' = M u + N(u),  u = (psi, b).
// M is the per-mode linear operator (resistive diffusion plus the skew
// coupling with the background field); N holds the Hall brackets.
//
//   etd-rk4      Cox-Matthews exponential RK4. M is integrated exactly, so
//                with N = 0 a step is the exact linear propagator.
//   imex-cn-ab2  Crank-Nicolson on M, Adams-Bashforth 2 on N (Euler start).

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emhd/error.hpp"
#include "emhd/field.hpp"
#include "emhd/linear_propagator.hpp"
#include "emhd/model.hpp"
#include "emhd/phi.hpp"

namespace emhd {

enum class Scheme { imex_cn_ab2, etd_rk4 };

inline std::string_view to_string(Scheme s) { return s == Scheme::etd_rk4 ? "etd-rk4" : "imex-cn-ab2"; }

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  if (s == "etd-rk4") return Scheme::etd_rk4;
  if (s == "imex-cn-ab2") return Scheme::imex_cn_ab2;
  return std::nullopt;
}

struct IntegratorConfig {
  Scheme scheme = Scheme::etd_rk4;
  double dt = 1e-3;
  double t_end = 1.0;
  int output_stride = 1;
  bool dealias = true;
  bool nonlinear = true;  // false drops N entirely

  /// Number of steps; t_end must be an integer multiple of dt.
  [[nodiscard]] long steps() const {
    validate();
    return std::lround(t_end / dt);
  }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("integrator: dt must be positive and finite");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("integrator: t_end must be finite and >= 0");
    if (output_stride < 1) throw InvalidArgument("integrator: output_stride must be >= 1");
    const double n = t_end / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
      throw InvalidArgument("integrator: t_end must be an integer multiple of dt");
  }
};

/// Raised when a step produces a non-finite value; carries the last finite state.
class IntegrationAborted : public NumericalError {
 public:
  IntegrationAborted(const std::string& what, PerturbationState last)
      : NumericalError(what), last_good(std::move(last)) {}
  PerturbationState last_good;
};

namespace detail {

inline void apply_modes(const std::vector<Mat2>& m, const SpectralField& psi, const SpectralField& b,
                        SpectralField& out_psi, SpectralField& out_b, bool accumulate) {
  auto p = psi.coeffs(), q = b.coeffs();
  auto op = out_psi.coeffs(), ob = out_b.coeffs();
  for (std::size_t n = 0; n < m.size(); ++n) {
    const auto r = m[n].apply(p[n], q[n]);
    if (accumulate) {
      op[n] += r[0];
      ob[n] += r[1];
    } else {
      op[n] = r[0];
      ob[n] = r[1];
    }
  }
}

inline bool all_finite(const SpectralField& f) {
  for (const auto& c : f.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace detail

class Integrator {
 public:
  Integrator(const GridPtr& grid, const ModelParams& params, IntegratorConfig cfg)
      : grid_(grid), params_(params), cfg_(cfg) {
    cfg_.validate();
    params_.validate();
    build();
  }

  [[nodiscard]] const IntegratorConfig& config() const { return cfg_; }
  [[nodiscard]] int cfl_warnings() const { return cfl_warnings_; }
  [[nodiscard]] double last_cfl() const { return last_cfl_; }

  /// dt * max |grad Lap psi|; values above 1 are counted as warnings.
  double check_cfl(const PerturbationState& s) {
    const SpectralField lap = laplacian(s.psi);
    const PhysicalField gx = transform_inverse(dx(lap)), gy = transform_inverse(dy(lap));
    double m = 0.0;
    for (std::size_t n = 0; n < gx.values().size(); ++n) m = std::max(m, std::hypot(gx.values()[n], gy.values()[n]));
    last_cfl_ = cfg_.dt * m;
    if (last_cfl_ > 1.0) ++cfl_warnings_;
    return last_cfl_;
  }

  /// Nonlinear tendency N(psi, b).
  [[nodiscard]] Tendency nonlinear(const SpectralField& psi, const SpectralField& b) const {
    if (!cfg_.nonlinear) return {SpectralField(grid_), SpectralField(grid_)};
    return perturbed_nonlinearity(psi, b, cfg_.dealias);
  }

  /// Advance one step of length dt.
  PerturbationState step(const PerturbationState& s) {
    require_same_grid(*grid_, s.psi.grid(), "step");
    require_same_grid(*grid_, s.b.grid(), "step");
    PerturbationState out = cfg_.scheme == Scheme::etd_rk4 ? step_etdrk4(s) : step_cnab2(s);
    out.params = params_;
    if (!detail::all_finite(out.psi) || !detail::all_finite(out.b))
      throw IntegrationAborted("non-finite value at t = " + std::to_string(out.time), s);
    return out;
  }

  /// Forget the multistep history (used when a new trajectory starts).
  void reset() { prev_n_.reset(); }

 private:
  void build() {
    const Grid& g = *grid_;
    const double h = cfg_.dt;
    const std::size_t n = g.size();
    for (auto* v : {&e_, &e2_, &qh_, &f1_, &f2_, &f3_, &cn_a_, &cn_b_}) v->assign(n, Mat2{});
    for (int i = 0; i < g.nx; ++i) {
      for (int j = 0; j < g.ny; ++j) {
        const std::size_t k = g.index(i, j);
        const Mat2 m = g.is_nyquist(i, j) ? Mat2{} : mode_matrix(g.kx[static_cast<std::size_t>(i)], g.ky[static_cast<std::size_t>(j)], params_);
        if (cfg_.scheme == Scheme::etd_rk4) {
          e_[k] = matrix_phi(m, h, {{1.0, 0, 0, 0, 0}});
          e2_[k] = matrix_phi(m, 0.5 * h, {{1.0, 0, 0, 0, 0}});
          qh_[k] = cplx(0.5 * h) * matrix_phi(m, 0.5 * h, {{0, 1.0, 0, 0, 0}});
          f1_[k] = cplx(h) * matrix_phi(m, h, {{0, 1.0, -3.0, 4.0, 0}});
          f2_[k] = cplx(h) * matrix_phi(m, h, {{0, 0, 1.0, -2.0, 0}});
          f3_[k] = cplx(h) * matrix_phi(m, h, {{0, 0, -1.0, 4.0, 0}});
        } else {
          // (I - h/2 M)^-1 (I + h/2 M)  and  h (I - h/2 M)^-1
          const cplx a00 = 1.0 - 0.5 * h * m.a00, a01 = -0.5 * h * m.a01, a10 = -0.5 * h * m.a10, a11 = 1.0 - 0.5 * h * m.a11;
          const cplx det = a00 * a11 - a01 * a10;
          const Mat2 inv{a11 / det, -a01 / det, -a10 / det, a00 / det};
          const Mat2 plus{1.0 + 0.5 * h * m.a00, 0.5 * h * m.a01, 0.5 * h * m.a10, 1.0 + 0.5 * h * m.a11};
          cn_a_[k] = inv * plus;
          cn_b_[k] = cplx(h) * inv;
        }
      }
    }
  }

  PerturbationState make(SpectralField psi, SpectralField b, double t) const {
    return PerturbationState{std::move(psi), std::move(b), params_, t};
  }

  PerturbationState step_etdrk4(const PerturbationState& s) {
    const SpectralField& u0 = s.psi;
    const SpectralField& v0 = s.b;
    SpectralField ap(grid_), ab(grid_), bp(grid_), bb(grid_), cp(grid_), cb(grid_), up(grid_), ub(grid_);

    const Tendency nu = nonlinear(u0, v0);
    detail::apply_modes(e2_, u0, v0, ap, ab, false);
    bp = ap;
    bb = ab;
    detail::apply_modes(qh_, nu.first, nu.second, ap, ab, true);

    const Tendency na = nonlinear(ap, ab);
    detail::apply_modes(qh_, na.first, na.second, bp, bb, true);

    const Tendency nb = nonlinear(bp, bb);
    detail::apply_modes(e2_, ap, ab, cp, cb, false);
    {
      SpectralField rp = 2.0 * nb.first, rb = 2.0 * nb.second;
      rp -= nu.first;
      rb -= nu.second;
      detail::apply_modes(qh_, rp, rb, cp, cb, true);
    }

    const Tendency nc = nonlinear(cp, cb);
    detail::apply_modes(e_, u0, v0, up, ub, false);
    detail::apply_modes(f1_, nu.first, nu.second, up, ub, true);
    {
      SpectralField sp = 2.0 * (na.first + nb.first), sb = 2.0 * (na.second + nb.second);
      detail::apply_modes(f2_, sp, sb, up, ub, true);
    }
    detail::apply_modes(f3_, nc.first, nc.second, up, ub, true);
    return make(std::move(up), std::move(ub), s.time + cfg_.dt);
  }

  PerturbationState step_cnab2(const PerturbationState& s) {
    Tendency n = nonlinear(s.psi, s.b);
    SpectralField rp = n.first, rb = n.second;
    if (prev_n_) {
      rp = 1.5 * n.first - 0.5 * prev_n_->first;
      rb = 1.5 * n.second - 0.5 * prev_n_->second;
    }
    SpectralField up(grid_), ub(grid_);
    detail::apply_modes(cn_a_, s.psi, s.b, up, ub, false);
    detail::apply_modes(cn_b_, rp, rb, up, ub, true);
    prev_n_ = std::move(n);
    return make(std::move(up), std::move(ub), s.time + cfg_.dt);
  }

  GridPtr grid_;
  ModelParams params_;
  IntegratorConfig cfg_;
  std::vector<Mat2> e_, e2_, qh_, f1_, f2_, f3_, cn_a_, cn_b_;
  std::optional<Tendency> prev_n_;
  int cfl_warnings_ = 0;
  double last_cfl_ = 0.0;
};

struct Trajectory {
  IntegratorConfig config;
  std::vector<PerturbationState> snapshots;
  int cfl_warnings = 0;
};

using SnapshotObserver = std::function<void(const PerturbationState&)>;

/// Run from s0 to s0.time + t_end, calling `observe` on the initial state
/// and after every output_stride steps. Returns the final state.
inline PerturbationState integrate(const PerturbationState& s0, const IntegratorConfig& cfg, const SnapshotObserver& observe,
                                   int* cfl_warnings = nullptr) {
  Integrator integ(s0.grid_ptr(), s0.params, cfg);
  const long n = cfg.steps();
  PerturbationState s = s0;
  integ.check_cfl(s);
  observe(s);
  for (long k = 1; k <= n; ++k) {
    s = integ.step(s);
    s.time = s0.time + static_cast<double>(k) * cfg.dt;
    if (k % cfg.output_stride == 0) {
      integ.check_cfl(s);
      observe(s);
    }
  }
  if (cfl_warnings) *cfl_warnings = integ.cfl_warnings();
  return s;
}

inline Trajectory integrate(const PerturbationState& s0, const IntegratorConfig& cfg) {
  Trajectory tr{cfg, {}, 0};
  integrate(s0, cfg, [&](const PerturbationState& s) { tr.snapshots.push_back(s); }, &tr.cfl_warnings);
  return tr;
}

}  // namespace emhd
