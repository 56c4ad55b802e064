#pragma once

// Acceptance suite: one check per numbered criterion. Each check returns
// pass/fail, the measured quantities and the threshold it was held to.
// Wall-clock times are reported separately so the JSON summary is
// reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emhd/decay.hpp"
#include "emhd/diagnostics.hpp"
#include "emhd/integrator.hpp"
#include "emhd/io/checkpoint.hpp"
#include "emhd/io/config.hpp"
#include "emhd/io/run.hpp"
#include "emhd/linear_propagator.hpp"
#include "emhd/littlewood_paley.hpp"
#include "emhd/model.hpp"
#include "emhd/random_fields.hpp"

namespace emhd::io {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;  // one line: measured vs threshold
  json details = json::object();
  double seconds = 0.0;
};

inline json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"details", r.details}};
}

namespace verify_detail {

inline CriterionResult start(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::string fix(double v, int d = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", d, v);
  return buf;
}

// 1 ---------------------------------------------------------------------------
inline CriterionResult dispersion_invariants() {
  CriterionResult r = start(1, "dispersion invariants");
  Rng rng(20240601);
  double worst_sum = 0.0, worst_prod = 0.0;
  int skipped = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double mag = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double x1 = mag * std::cos(ang), x2 = mag * std::sin(ang);
    const double q = x1 * x1 + x2 * x2;
    const ModeRoots m = mode_roots(x1, x2);
    worst_sum = std::max(worst_sum, std::abs(m.lambda_plus + m.lambda_minus + q) / q);
    const double p = x1 * x1 * q;
    if (p == 0.0) {
      ++skipped;
      continue;
    }
    worst_prod = std::max(worst_prod, std::abs(m.lambda_plus * m.lambda_minus - p) / p);
  }
  r.passed = worst_sum <= 1e-10 && worst_prod <= 1e-10;
  r.summary = "max rel |l+ + l- + |xi|^2| = " + sci(worst_sum) + ", max rel |l+ l- - xi1^2 |xi|^2| = " + sci(worst_prod) +
              " (tol 1e-10, " + std::to_string(n) + " samples)";
  r.details = {{"sum_residual", worst_sum}, {"product_residual", worst_prod}, {"samples", n}, {"tolerance", 1e-10}};
  return r;
}

// 2 ---------------------------------------------------------------------------
/// Central-difference residual of b'' + |xi|^2 b' + xi1^2 |xi|^2 b at t.
inline double ode_residual(const ModeLinearSolution& m, double t, double h) {
  const double q = m.q();
  const cplx bp = m.b_at(t + h), b0 = m.b_at(t), bm = m.b_at(t - h);
  return std::abs((bp - 2.0 * b0 + bm) / (h * h) + q * (bp - bm) / (2.0 * h) + m.xi1 * m.xi1 * q * b0);
}

inline CriterionResult ode_convergence() {
  CriterionResult r = start(2, "exact mode solutions satisfy the ODE");
  struct Case {
    const char* label;
    double x1, x2;
    Regime expect;
  };
  const Case cases[] = {{"distinct-real", 0.3, 1.0, Regime::distinct_real},
                        {"complex-pair", 1.0, 0.5, Regime::complex_pair},
                        {"double-root", 1.0, std::sqrt(3.0), Regime::double_root},
                        {"zero-xi1", 0.0, 1.5, Regime::zero_xi1}};
  const double t = 0.7;
  const double steps[] = {0.04, 0.02, 0.01, 0.005};
  r.passed = true;
  r.details = json::array();
  double worst = INFINITY;
  for (const auto& c : cases) {
    const ModeLinearSolution m = mode_solution(c.x1, c.x2, cplx(0.3, 0.2), cplx(1.0, -0.4));
    std::vector<double> res, orders;
    for (double h : steps) res.push_back(ode_residual(m, t, h));
    double order = INFINITY;
    for (std::size_t k = 0; k + 1 < res.size(); ++k) {
      const double o = std::log2(res[k] / res[k + 1]);
      orders.push_back(o);
      order = std::min(order, o);
    }
    const bool regime_ok = m.regime == c.expect;
    const bool ok = regime_ok && order >= 1.9;
    r.passed = r.passed && ok;
    worst = std::min(worst, order);
    r.details.push_back({{"case", c.label}, {"regime", std::string(to_string(m.regime))}, {"residuals", res}, {"orders", orders}});
  }
  r.summary = "min observed order " + fix(worst, 3) + " over 4 regimes incl. xi = (1, sqrt 3) (need >= 1.9)";
  return r;
}

// 3 ---------------------------------------------------------------------------
inline CriterionResult linear_decay_rates() {
  CriterionResult r = start(3, "linear decay rates");
  DecayProfile p;
  p.s = 0.45;
  const std::vector<double> times = log_times(1e2, 1e4, 17);
  const auto series = decay_quadrature(p, times, std::vector<int>{0, 1, 2});
  r.passed = true;
  r.details = json::array();
  std::string parts;
  for (int k = 0; k < 3; ++k) {
    const DecayFit f = fit_decay(times, series[static_cast<std::size_t>(k)].b_norm, {1e2, 1e4});
    const double target = -(p.s + k) / 2.0;
    const bool ok = std::abs(f.exponent - target) <= 0.05;
    r.passed = r.passed && ok;
    parts += (k ? ", " : "") + std::string("k=") + std::to_string(k) + ": " + fix(f.exponent, 3) + " vs " + fix(target, 3);
    r.details.push_back({{"k", k},
                         {"exponent", f.exponent},
                         {"target", target},
                         {"r_squared", f.r_squared},
                         {"quadrature_rel_change", series[static_cast<std::size_t>(k)].max_rel_change}});
  }
  r.summary = parts + " (tol 0.05)";
  return r;
}

// 4 ---------------------------------------------------------------------------
inline CriterionResult energy_law() {
  CriterionResult r = start(4, "energy law");
  const GridPtr g = make_grid(128, 128);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;

  // ideal: conserved
  const PerturbationState s0 = random_state(g, 4, 2, 1e-2, ModelParams{0.0, 0.0});
  const double e0 = basic_energy(s0.psi, s0.b);
  const PerturbationState s1 = integrate(s0, cfg, [](const PerturbationState&) {});
  const double drift = std::abs(basic_energy(s1.psi, s1.b) - e0) / e0;

  // resistive: d/dt(|grad psi|^2 + |b|^2) = -2 mu2 |grad b|^2, checked with a
  // fourth-order centred difference of the energy at every interior step
  const PerturbationState d0 = random_state(g, 5, 2, 1e-2, ModelParams{0.0, 1.0});
  std::vector<double> en, diss;
  integrate(d0, cfg, [&](const PerturbationState& s) {
    en.push_back(basic_energy(s.psi, s.b));
    diss.push_back(basic_dissipation(s));
  });
  double worst = 0.0;
  for (std::size_t n = 2; n + 2 < en.size(); ++n) {
    const double de = (-en[n + 2] + 8.0 * en[n + 1] - 8.0 * en[n - 1] + en[n - 2]) / (12.0 * cfg.dt);
    worst = std::max(worst, std::abs(de + 2.0 * diss[n]) / (2.0 * diss[n]));
  }
  r.passed = drift <= 1e-6 && worst <= 1e-5;
  r.summary = "ideal drift " + sci(drift) + " (tol 1e-6), resistive max rel |dE/dt + 2 mu2 |grad b|^2| " + sci(worst) +
              " (tol 1e-5)";
  r.details = {{"ideal_drift", drift}, {"resistive_residual", worst}, {"steps", cfg.steps()}};
  return r;
}

// 5 ---------------------------------------------------------------------------
inline CriterionResult consistency_identity() {
  CriterionResult r = start(5, "consistency identity");
  const GridPtr g = make_grid(32, 32);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const ModelParams p{0.1 * (n % 3), 1.0 - 0.2 * (n % 4)};
    const PerturbationState s = random_state(g, 1000 + static_cast<std::uint64_t>(n), 2 + n % 9, 0.05, p);
    const Tendency lhs = rhs_perturbed(s);
    Tendency rhs = rhs_full(FullState{s.psi, s.b, p, 0.0});
    rhs.first -= dx(s.b);
    rhs.second += dx(laplacian(s.psi));
    worst = std::max({worst, transform_inverse(lhs.first - rhs.first).max_abs(),
                      transform_inverse(lhs.second - rhs.second).max_abs()});
  }
  r.passed = worst <= 1e-11;
  r.summary = "max-norm gap " + sci(worst) + " over 200 random states (tol 1e-11)";
  r.details = {{"max_gap", worst}, {"states", 200}};
  return r;
}

// 6 ---------------------------------------------------------------------------
inline CriterionResult littlewood_paley_checks() {
  CriterionResult r = start(6, "Littlewood-Paley");
  // partition of unity on a fine radial sample
  double pou = 0.0;
  const int J = 14;
  for (int n = 0; n <= 200000; ++n) {
    const double rad = 0.75 * lp::lambda(J + 1) * n / 200000.0;
    double s = 0.0;
    for (int q = -1; q <= J; ++q) s += lp::block_weight(q, rad);
    pou = std::max(pou, std::abs(s - 1.0));
  }

  // two-parameter reconstruction
  const GridPtr g = make_grid(64, 64);
  const SpectralField u = random_field(g, 77, 30, 1.0);
  const double recon = (lp::decompose(u).sum() - u).max_abs();

  // nine-term paraproduct sum
  const GridPtr gs = make_grid(32, 32);
  const SpectralField f = random_field(gs, 78, 12, 1.0), h = random_field(gs, 79, 12, 1.0);
  double bony = 0.0;
  const int jm = lp::max_index(*gs, lp::Axis::isotropic), km = lp::max_index(*gs, lp::Axis::horizontal);
  for (int j = -1; j <= jm; ++j)
    for (int k = -1; k <= km; ++k) {
      const auto terms = lp::bony_terms(f, h, j, k);
      SpectralField sum(gs);
      for (const auto& t : terms) sum += t;
      bony = std::max(bony, (sum - lp::localized_product(f, h, j, k)).max_abs());
    }

  // Bernstein: |Delta_j Delta_k^h u|_{L^p_x L^q_y} <= C lambda_j^{1/2-1/q} lambda_k^{1/2-1/p} |.|_2.
  // On the 2 pi torus a block has at most (4 lambda_k + 1)(4 lambda_j + 1) modes, and
  // |f|_inf <= sqrt(#modes / area) |f|_2 gives C <= sqrt(25 / (4 pi^2)) < 1 for j, k >= 0;
  // p = q = 2 is an identity, so the largest ratio is 1 up to rounding.
  const double kBernstein = 1.0;
  double bern = 0.0;
  int probes = 0;
  const double exps[][2] = {{2, 2}, {2, kInf}, {kInf, 2}, {kInf, kInf}, {4, 4}, {4, kInf}};
  for (int j = 0; j <= 5; ++j)
    for (int k = 0; k <= 5; ++k)
      for (const auto& e : exps) {
        const lp::ProbeResult pr = lp::bernstein_probe(u, j, k, e[0], e[1]);
        if (pr.rhs == 0.0) continue;
        bern = std::max(bern, pr.ratio());
        ++probes;
      }

  r.passed = pou <= 1e-12 && recon <= 1e-10 && bony <= 1e-10 && bern <= kBernstein * (1.0 + 1e-12);
  r.summary = "partition " + sci(pou) + " (1e-12), reconstruction " + sci(recon) + " (1e-10), Bony " + sci(bony) +
              " (1e-10), Bernstein max ratio " + fix(bern, 3) + " (<= 1)";
  r.details = {{"partition_of_unity", pou},
               {"reconstruction", recon},
               {"bony", bony},
               {"bernstein_max_ratio", bern},
               {"bernstein_probes", probes}};
  return r;
}

// 7 ---------------------------------------------------------------------------
inline CriterionResult coercivity() {
  CriterionResult r = start(7, "coercivity certification");
  const Certification c = certify(*make_grid(128, 128), 0.1);
  r.passed = c.e_min >= 0.1 && c.d_min >= 0.0;
  r.summary = "eps1 = 0.1: min eig E " + fix(c.e_min) + " (>= 0.1), min eig D " + fix(c.d_min) + " (>= 0), c = " + fix(c.c);
  r.details = {{"e_min", c.e_min}, {"d_min", c.d_min}, {"c", c.c}};
  return r;
}

// 8 ---------------------------------------------------------------------------
inline double state_gap(const PerturbationState& a, const PerturbationState& b) {
  return std::sqrt(grad_norm_sq(a.psi - b.psi) + norm_sq(a.b - b.b));
}

inline CriterionResult linearization() {
  CriterionResult r = start(8, "linearization consistency");
  const GridPtr g = make_grid(128, 128);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 1.0;
  const PerturbationState unit = random_state(g, 8, 4, 1.0);
  auto gap = [&](double eps) {
    PerturbationState s0 = unit;
    s0.psi *= eps;
    s0.b *= eps;
    const PerturbationState nl = integrate(s0, cfg, [](const PerturbationState&) {});
    return state_gap(nl, propagate_linear_grid(s0, cfg.t_end));
  };
  const double eps = 1e-2;
  const double g1 = gap(eps), g2 = gap(0.5 * eps);
  const double ratio = g1 / g2;
  r.passed = ratio >= 3.0 && ratio <= 5.0;
  r.summary = "gap(eps)/gap(eps/2) = " + fix(ratio, 4) + " (need [3, 5]), eps = 1e-2";
  r.details = {{"gap_eps", g1}, {"gap_half", g2}, {"ratio", ratio}, {"eps", eps}};
  return r;
}

// 9 ---------------------------------------------------------------------------
inline CriterionResult monotonicity() {
  CriterionResult r = start(9, "monotonicity");
  const GridPtr g = make_grid(128, 128);
  DiagnosticsConfig dc;
  const Certification cert = certify(*g, dc.eps1);

  // exact linear trajectory
  const PerturbationState s0 = random_state(g, 9, 6, 1.0);
  std::vector<double> E, Es;
  for (int n = 0; n <= 40; ++n) {
    const PerturbationState s = propagate_linear_grid(s0, 0.05 * n);
    E.push_back(eval_E_D(s, dc).E);
    Es.push_back(eval_E_s(s, dc).value);
  }
  int lin_increases = 0;
  for (std::size_t n = 0; n + 1 < E.size(); ++n) {
    if (E[n + 1] > E[n] * (1.0 + 1e-13)) ++lin_increases;
    if (Es[n + 1] > Es[n] * (1.0 + 1e-13)) ++lin_increases;
  }

  // small nonlinear run
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 5.0;
  const PerturbationState n0 = random_state(g, 10, 4, 1e-3);
  std::vector<double> t, En, Dn;
  integrate(n0, cfg, [&](const PerturbationState& s) {
    const EnergyPair ed = eval_E_D(s, dc);
    t.push_back(s.time);
    En.push_back(ed.E);
    Dn.push_back(ed.D);
  });
  const MonotonicityReport rep = monotonicity_probe(t, En, Dn, cert.c);

  r.passed = lin_increases == 0 && rep.passed();
  r.summary = "linear: " + std::to_string(lin_increases) + " increasing pairs of E/E_s over 40 intervals; nonlinear (amp 1e-3, t in [0,5]): " +
              std::to_string(rep.flagged.size()) + " flagged of " + std::to_string(rep.intervals) + ", " +
              std::to_string(rep.increases.size()) + " E increases";
  r.details = {{"linear_increases", lin_increases},
               {"nonlinear_intervals", rep.intervals},
               {"nonlinear_flagged", rep.flagged.size()},
               {"nonlinear_increases", rep.increases.size()},
               {"max_relative_violation", rep.max_violation},
               {"c", cert.c}};
  return r;
}

// 10 --------------------------------------------------------------------------
inline CriterionResult determinism(const std::filesystem::path& scratch) {
  CriterionResult r = start(10, "determinism and persistence");
  const json doc = {{"schema_version", 1},
                    {"seed", 11},
                    {"grid", {{"nx", 32}, {"ny", 32}}},
                    {"initial", {{"kind", "random"}, {"band", 4}, {"amplitude", 1e-2}}},
                    {"integrator", {{"dt", 1e-2}, {"t_end", 0.2}, {"output_stride", 5}}},
                    {"output", {{"plots", true}, {"checkpoint", true}}}};
  const RunConfig cfg = parse_config(doc);
  const auto d1 = scratch / "run1", d2 = scratch / "run2";
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  const json m1 = run_simulate(cfg, d1), m2 = run_simulate(cfg, d2);
  const bool manifests = manifest_without_timestamps(m1) == manifest_without_timestamps(m2);
  const bool csv = read_file(d1 / "diagnostics.csv") == read_file(d2 / "diagnostics.csv");

  const PerturbationState s = random_state(make_grid(64, 48, 3.0, 5.0), 12, 20, 1.0, ModelParams{0.25, 0.75});
  const auto path = scratch / "roundtrip.ckpt";
  checkpoint_write(s, path);
  const PerturbationState back = checkpoint_read(path, &s.grid());
  bool exact = back.time == s.time && back.params.mu1 == s.params.mu1 && back.params.mu2 == s.params.mu2;
  for (auto [a, b] : {std::pair{&s.psi, &back.psi}, {&s.b, &back.b}})
    exact = exact && std::memcmp(a->coeffs().data(), b->coeffs().data(), a->coeffs().size_bytes()) == 0;

  r.passed = manifests && csv && exact;
  r.summary = std::string("manifests ") + (manifests ? "identical" : "DIFFER") + ", CSV bytes " + (csv ? "identical" : "DIFFER") +
              ", checkpoint roundtrip " + (exact ? "bit-exact" : "NOT exact");
  r.details = {{"manifests_identical", manifests}, {"csv_identical", csv}, {"checkpoint_bit_exact", exact},
               {"manifest_digest", m1.at("deterministic_sha256")}};
  return r;
}

}  // namespace verify_detail

inline constexpr int kCriteria = 10;

/// Run one criterion. `scratch` is a writable directory for criterion 10.
inline CriterionResult run_criterion(int id, const std::filesystem::path& scratch) {
  using namespace verify_detail;
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = dispersion_invariants(); break;
      case 2: r = ode_convergence(); break;
      case 3: r = linear_decay_rates(); break;
      case 4: r = energy_law(); break;
      case 5: r = consistency_identity(); break;
      case 6: r = littlewood_paley_checks(); break;
      case 7: r = coercivity(); break;
      case 8: r = linearization(); break;
      case 9: r = monotonicity(); break;
      case 10: r = determinism(scratch); break;
      default: throw InvalidArgument("unknown criterion " + std::to_string(id));
    }
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::exception& e) {
    r = start(id, "criterion " + std::to_string(id));
    r.summary = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // runtime budgets
  if (id == 1 && r.seconds >= 1.0) {
    r.passed = false;
    r.summary += "; runtime " + fix(r.seconds, 2) + " s exceeds 1 s";
  }
  if (id == 3 && r.seconds >= 30.0) {
    r.passed = false;
    r.summary += "; runtime " + fix(r.seconds, 2) + " s exceeds 30 s";
  }
  return r;
}

inline std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d %-40s ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
  char tail[32];
  std::snprintf(tail, sizeof tail, "  (%.2f s)", r.seconds);
  return std::string(head) + r.summary + tail;
}

}  // namespace emhd::io
