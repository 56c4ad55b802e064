#pragma once

// Subcommand pipelines. Each writes its artifacts through a ManifestBuilder
// and returns the manifest.

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emhd/decay.hpp"
#include "emhd/diagnostics.hpp"
#include "emhd/integrator.hpp"
#include "emhd/io/checkpoint.hpp"
#include "emhd/io/config.hpp"
#include "emhd/io/report.hpp"
#include "emhd/io/svg.hpp"
#include "emhd/linear_propagator.hpp"
#include "emhd/littlewood_paley.hpp"
#include "emhd/steady_state.hpp"

namespace emhd::io {

namespace detail {

inline json certification_json(const Certification& c) {
  return {{"eps1", c.eps1}, {"c", c.c}, {"e_min", c.e_min}, {"d_min", c.d_min}, {"certified", c.certified}};
}

/// Fit over the configured window if it holds enough samples.
inline std::optional<double> try_fit(const std::vector<double>& t, const std::vector<double>& v, FitWindow w) {
  try {
    return fit_decay(t, v, w).exponent;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline void emit_trajectory(ManifestBuilder& mb, const RunConfig& cfg, const std::vector<DiagnosticsRecord>& rows) {
  mb.emit("diagnostics.csv", diagnostics_csv(cfg.diagnostics, rows));
  if (!cfg.output.plots) return;
  std::vector<double> t, E, D, Es;
  for (const auto& r : rows) {
    t.push_back(r.time);
    E.push_back(r.E);
    D.push_back(r.D);
    Es.push_back(r.E_s);
  }
  const FitWindow w = cfg.diagnostics.fit_window;
  mb.emit("norms.svg", loglog_svg("energy functionals", "t", "value",
                                  {{"E", t, E, try_fit(t, E, w)}, {"D", t, D, try_fit(t, D, w)}, {"E_s", t, Es, try_fit(t, Es, w)}}));
}

inline void common_manifest(ManifestBuilder& mb, const RunConfig& cfg) {
  mb.set("config", to_json(cfg));
  mb.set("certification", certification_json(certify(*cfg.make_grid(), cfg.diagnostics.eps1)));
  mb.set("steady_residual", steady_residual(cfg.steady, cfg.make_grid()));
  mb.set("warnings", cfg.diagnostics.validate());
}

}  // namespace detail

/// Nonlinear trajectory with diagnostics. On a non-finite step the last
/// finite state is checkpointed to <dir>/aborted.ckpt and NumericalError is
/// raised naming that path.
inline json run_simulate(const RunConfig& cfg, const std::filesystem::path& dir) {
  ManifestBuilder mb(dir, "simulate");
  detail::common_manifest(mb, cfg);
  const PerturbationState s0 = initial_state(cfg);
  std::vector<DiagnosticsRecord> rows;
  int cfl = 0;
  PerturbationState last;
  try {
    last = integrate(s0, cfg.integrator, [&](const PerturbationState& s) { rows.push_back(evaluate(s, cfg.diagnostics)); }, &cfl);
  } catch (const IntegrationAborted& e) {
    const auto path = dir / "aborted.ckpt";
    checkpoint_write(e.last_good, path);
    throw NumericalError(std::string(e.what()) + "; last finite state written to " + path.string());
  }
  detail::emit_trajectory(mb, cfg, rows);
  if (cfg.output.checkpoint) mb.emit("final.ckpt", checkpoint_encode(last));
  mb.set("cfl_warnings", cfl);
  mb.set("snapshots", rows.size());
  return mb.finish();
}

/// Exact linear trajectory (mu1 = 0, mu2 = 1) sampled like `simulate`.
inline json run_linear(const RunConfig& cfg, const std::filesystem::path& dir) {
  if (cfg.model.mu1 != 0.0 || cfg.model.mu2 != 1.0)
    throw ConfigError("/model", "the exact linear propagator needs mu1 = 0 and mu2 = 1");
  ManifestBuilder mb(dir, "linear");
  detail::common_manifest(mb, cfg);
  const PerturbationState s0 = initial_state(cfg);
  std::vector<DiagnosticsRecord> rows;
  const long n = cfg.integrator.steps();
  PerturbationState last = s0;
  for (long k = 0; k <= n; k += cfg.integrator.output_stride) {
    last = propagate_linear_grid(s0, static_cast<double>(k) * cfg.integrator.dt);
    rows.push_back(evaluate(last, cfg.diagnostics));
  }
  detail::emit_trajectory(mb, cfg, rows);
  if (cfg.output.checkpoint) mb.emit("final.ckpt", checkpoint_encode(last));
  mb.set("snapshots", rows.size());
  return mb.finish();
}

struct DecayFitOptions {
  double s = 0.45;
  std::vector<int> ks{0, 1, 2};
  FitWindow window{10.0, 1000.0};
  int samples = 17;
  bool plots = true;
};

/// Quadrature decay series of the exact linear solution and fitted
/// exponents of |d_x^k b(t)| and |d_x^k grad psi(t)|.
inline json run_decay_fit(const DecayFitOptions& opt, const std::filesystem::path& dir) {
  DecayProfile p;
  p.s = opt.s;
  p.validate();
  if (!(opt.window.t_hi > opt.window.t_lo) || !(opt.window.t_lo > 0.0))
    throw InvalidArgument("decay-fit: window must satisfy 0 < t_lo < t_hi");
  if (opt.samples < 8) throw InvalidArgument("decay-fit: need at least 8 samples");
  ManifestBuilder mb(dir, "decay-fit");
  const std::vector<double> times = log_times(opt.window.t_lo, opt.window.t_hi, opt.samples);
  const auto series = decay_quadrature(p, times, opt.ks);

  std::string csv = "k,time,b_norm,grad_psi_norm\n";
  json fits = json::array();
  std::vector<PlotSeries> plot;
  for (std::size_t i = 0; i < opt.ks.size(); ++i) {
    const auto& s = series[i];
    for (std::size_t n = 0; n < times.size(); ++n)
      csv += std::to_string(opt.ks[i]) + "," + format_double(times[n]) + "," + format_double(s.b_norm[n]) + "," +
             format_double(s.grad_psi_norm[n]) + "\n";
    const DecayFit fb = fit_decay(times, s.b_norm, opt.window);
    const DecayFit fp = fit_decay(times, s.grad_psi_norm, opt.window);
    fits.push_back({{"k", opt.ks[i]},
                    {"b_exponent", fb.exponent},
                    {"b_r_squared", fb.r_squared},
                    {"grad_psi_exponent", fp.exponent},
                    {"grad_psi_r_squared", fp.r_squared},
                    {"rate_bound", -(opt.s + opt.ks[i]) / 2.0},
                    {"max_rel_change", s.max_rel_change}});
    plot.push_back({"|d_x^" + std::to_string(opt.ks[i]) + " b|", times, s.b_norm, fb.exponent});
  }
  const json report = {{"s", opt.s}, {"window", {opt.window.t_lo, opt.window.t_hi}}, {"samples", opt.samples}, {"fits", fits}};
  mb.emit("decay.csv", csv);
  mb.emit("decay_fit.json", report.dump(2) + "\n");
  if (opt.plots) mb.emit("decay.svg", loglog_svg("linear decay", "t", "norm", plot));
  mb.set("report", report);
  return mb.finish();
}

/// Per-block energies of b and grad psi and a set of norms for a checkpointed state.
inline json run_lp_analyze(const std::filesystem::path& snapshot, double s, const std::filesystem::path& dir) {
  const PerturbationState st = checkpoint_read(snapshot);
  ManifestBuilder mb(dir, "lp-analyze");
  const SpectralField px = dx(st.psi), py = dy(st.psi);
  const lp::BlockTable eb = lp::block_energies(st.b);
  const lp::BlockTable ep = lp::block_energies({&px, &py});
  std::string blocks = "field,j,k,energy\n";
  for (const auto& [name, tab] : {std::pair<const char*, const lp::BlockTable*>{"b", &eb}, {"grad_psi", &ep}})
    for (int j = -1; j <= tab->jmax(); ++j)
      for (int k = -1; k <= tab->kmax(); ++k)
        blocks += std::string(name) + "," + std::to_string(j) + "," + std::to_string(k) + "," + format_double((*tab)(j, k)) + "\n";

  std::string norms = "field,norm,s1,s2,value,discarded_mass\n";
  auto row = [&](const char* field, const char* kind, double s1, double s2, double v, double lost) {
    norms += std::string(field) + "," + kind + "," + format_double(s1) + "," + format_double(s2) + "," + format_double(v) +
             "," + format_double(lost) + "\n";
  };
  const std::pair<double, double> besov[] = {{0.5, 0.5}, {0.5, 1.5}, {1.5, 0.5}};
  row("b", "L2", 0, 0, l2_norm(st.b), 0);
  row("grad_psi", "L2", 0, 0, std::sqrt(norm_sq(px) + norm_sq(py)), 0);
  for (auto [s1, s2] : besov) {
    row("b", "besov", s1, s2, lp::besov_norm(eb, s1, s2), 0);
    row("grad_psi", "besov", s1, s2, lp::besov_norm(ep, s1, s2), 0);
  }
  for (double s2 : {0.0, 1.0}) {
    const auto mb_b = fractional_multiplier(st.b, -s, s2);
    const auto mx = fractional_multiplier(px, -s, s2), my = fractional_multiplier(py, -s, s2);
    row("b", "sobolev", -s, s2, l2_norm(mb_b.field), mb_b.discarded_mass);
    row("grad_psi", "sobolev", -s, s2, std::sqrt(norm_sq(mx.field) + norm_sq(my.field)), mx.discarded_mass + my.discarded_mass);
  }
  mb.emit("lp_blocks.csv", blocks);
  mb.emit("lp_norms.csv", norms);
  mb.set("snapshot", snapshot.filename().string());
  mb.set("time", st.time);
  mb.set("grid", {{"nx", st.grid().nx}, {"ny", st.grid().ny}, {"lx", st.grid().lx}, {"ly", st.grid().ly}});
  return mb.finish();
}

/// Roots, regime and solution coefficients for one frequency.
inline json dispersion_report(double xi1, double xi2, cplx psi0 = 0.0, cplx b0 = 1.0) {
  const ModeLinearSolution m = mode_solution(xi1, xi2, psi0, b0);
  auto c = [](cplx z) { return json::array({z.real(), z.imag()}); };
  return {{"xi", {xi1, xi2}},
          {"lambda_plus", c(m.lambda_plus)},
          {"lambda_minus", c(m.lambda_minus)},
          {"regime", std::string(to_string(m.regime))},
          {"discriminant", m.disc},
          {"psi0", c(psi0)},
          {"b0", c(b0)},
          {"b1", c(m.b1_hat)},
          {"c1", c(m.c1)},
          {"c2", c(m.c2)}};
}

}  // namespace emhd::io
