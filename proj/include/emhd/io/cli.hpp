#pragma once

// Command-line front end:
//
//   emhd simulate   --config run.json [--out DIR]
//   emhd linear     --config run.json [--out DIR]
//   emhd decay-fit  [--config run.json] [--s 0.45] [--k 0,1,2] [--out DIR]
//   emhd lp-analyze --snapshot state.ckpt [--config run.json] [--s 0.45] [--out DIR]
//   emhd dispersion --xi XI1,XI2 [--psi0 RE,IM] [--b0 RE,IM] [--out DIR]
//   emhd verify     [--only 1,2,...] [--out DIR]
//
// The output directory is --out, else $EMHD_OUTPUT_DIR, else the config's
// output.dir, else "out".
//
// Exit status: 0 success, 1 a verify criterion failed, 2 invalid input,
// 3 numerical failure, 4 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "emhd/error.hpp"
#include "emhd/io/config.hpp"
#include "emhd/io/report.hpp"
#include "emhd/io/run.hpp"
#include "emhd/io/verify.hpp"

namespace emhd::io {

enum ExitCode { kExitOk = 0, kExitFailed = 1, kExitInvalid = 2, kExitNumerical = 3, kExitIo = 4 };

namespace cli_detail {

inline std::filesystem::path output_dir(const std::string& flag, const std::optional<RunConfig>& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  if (cfg) return cfg->output.dir;
  return "out";
}

inline std::vector<double> parse_pair(const std::string& text, const char* what) {
  std::vector<double> v;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(cur, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cur.size() || !std::isfinite(x))
        throw InvalidArgument(std::string(what) + ": expected two comma-separated numbers, got '" + text + "'");
      v.push_back(x);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (v.size() != 2) throw InvalidArgument(std::string(what) + ": expected two comma-separated numbers, got '" + text + "'");
  return v;
}

}  // namespace cli_detail

/// Parse arguments and run one subcommand, writing human-readable progress to `out`
/// and errors to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Electron-MHD pseudo-spectral simulator and analysis toolkit", "emhd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EMHD_VERSION);

  std::string config_path, out_flag, snapshot, xi_text, psi0_text = "0,0", b0_text = "1,0";
  std::optional<double> s_flag;
  std::vector<int> ks{0, 1, 2}, only;

  auto* sim = app.add_subcommand("simulate", "nonlinear trajectory with diagnostics");
  sim->add_option("--config", config_path, "run configuration (JSON)")->required();
  sim->add_option("--out", out_flag, "output directory");

  auto* lin = app.add_subcommand("linear", "exact linear trajectory with diagnostics");
  lin->add_option("--config", config_path, "run configuration (JSON)")->required();
  lin->add_option("--out", out_flag, "output directory");

  auto* dec = app.add_subcommand("decay-fit", "quadrature decay series and fitted exponents");
  dec->add_option("--config", config_path, "run configuration (JSON); supplies s and the fit window");
  dec->add_option("--s", s_flag, "negative regularity index s in (0, 1/2)");
  dec->add_option("--k", ks, "derivative orders (subset of 0,1,2)")->delimiter(',');
  dec->add_option("--out", out_flag, "output directory");

  auto* lpa = app.add_subcommand("lp-analyze", "block energies and norms of a checkpointed state");
  lpa->add_option("--snapshot", snapshot, "checkpoint file")->required();
  lpa->add_option("--config", config_path, "run configuration (JSON); supplies s");
  lpa->add_option("--s", s_flag, "negative regularity index s in (0, 1/2)");
  lpa->add_option("--out", out_flag, "output directory");

  auto* dis = app.add_subcommand("dispersion", "roots, regime and coefficients for one frequency");
  dis->add_option("--xi", xi_text, "frequency XI1,XI2")->required();
  dis->add_option("--psi0", psi0_text, "initial psi coefficient RE,IM");
  dis->add_option("--b0", b0_text, "initial b coefficient RE,IM");
  dis->add_option("--out", out_flag, "also write dispersion.json to this directory");

  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  ver->add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  ver->add_option("--out", out_flag, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    std::optional<RunConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);

    if (sim->parsed() || lin->parsed()) {
      const auto dir = cli_detail::output_dir(out_flag, cfg);
      const json m = sim->parsed() ? run_simulate(*cfg, dir) : run_linear(*cfg, dir);
      out << m.at("subcommand").get<std::string>() << ": " << m.at("snapshots") << " snapshots written to " << dir.string()
          << "\n";
      out << "certified eps1 = " << m["certification"]["eps1"] << ", c = " << m["certification"]["c"] << "\n";
      for (const auto& w : m["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
      if (m.contains("cfl_warnings") && m["cfl_warnings"].get<int>() > 0)
        out << "warning: step-size guard exceeded at " << m["cfl_warnings"] << " snapshots\n";
      return kExitOk;
    }

    if (dec->parsed()) {
      DecayFitOptions opt;
      if (cfg) {
        opt.s = cfg->diagnostics.s;
        opt.window = cfg->diagnostics.fit_window;
        opt.plots = cfg->output.plots;
      }
      if (s_flag) opt.s = *s_flag;
      for (int k : ks)
        if (k < 0 || k > 2) throw InvalidArgument("--k: orders must be 0, 1 or 2");
      opt.ks = ks;
      const auto dir = cli_detail::output_dir(out_flag, cfg);
      const json m = run_decay_fit(opt, dir);
      for (const auto& f : m["report"]["fits"])
        out << "k = " << f["k"] << ": |d_x^k b| exponent " << f["b_exponent"].get<double>() << ", |d_x^k grad psi| exponent "
            << f["grad_psi_exponent"].get<double>() << "\n";
      out << "report written to " << (dir / "decay_fit.json").string() << "\n";
      return kExitOk;
    }

    if (lpa->parsed()) {
      double s = cfg ? cfg->diagnostics.s : 0.45;
      if (s_flag) s = *s_flag;
      if (!(s > 0.0 && s < 0.5)) throw InvalidArgument("--s must lie in (0, 1/2)");
      const auto dir = cli_detail::output_dir(out_flag, cfg);
      run_lp_analyze(snapshot, s, dir);
      out << "block energies and norms written to " << dir.string() << "\n";
      return kExitOk;
    }

    if (dis->parsed()) {
      const auto xi = cli_detail::parse_pair(xi_text, "--xi");
      const auto p0 = cli_detail::parse_pair(psi0_text, "--psi0");
      const auto b0 = cli_detail::parse_pair(b0_text, "--b0");
      const json rep = dispersion_report(xi[0], xi[1], cplx(p0[0], p0[1]), cplx(b0[0], b0[1]));
      auto z = [](const json& c) {
        const double re = c[0].get<double>(), im = c[1].get<double>();
        return format_double(re) + (im < 0 ? " - " : " + ") + format_double(std::abs(im)) + "i";
      };
      out << "lambda+ = " << z(rep["lambda_plus"]) << "\n"
          << "lambda- = " << z(rep["lambda_minus"]) << "\n"
          << "regime  = " << rep["regime"].get<std::string>() << "\n"
          << "c1      = " << z(rep["c1"]) << "\n"
          << "c2      = " << z(rep["c2"]) << "\n";
      if (!out_flag.empty()) {
        ManifestBuilder mb(out_flag, "dispersion");
        mb.emit("dispersion.json", rep.dump(2) + "\n");
        mb.finish();
      }
      return kExitOk;
    }

    if (ver->parsed()) {
      if (only.empty())
        for (int i = 1; i <= kCriteria; ++i) only.push_back(i);
      for (int id : only)
        if (id < 1 || id > kCriteria) throw InvalidArgument("--only: criteria are numbered 1.." + std::to_string(kCriteria));
      const auto dir = cli_detail::output_dir(out_flag, std::nullopt);
      ManifestBuilder mb(dir, "verify");
      json results = json::array();
      bool all = true;
      for (int id : only) {
        const CriterionResult r = run_criterion(id, dir / "scratch");
        out << format_line(r) << std::endl;
        results.push_back(to_json(r));
        all = all && r.passed;
      }
      std::filesystem::remove_all(dir / "scratch");
      mb.emit("verify.json", json{{"criteria", results}, {"all_passed", all}}.dump(2) + "\n");
      mb.set("all_passed", all);
      mb.finish();
      return all ? kExitOk : kExitFailed;
    }
  } catch (const ConfigError& e) {
    err << "error: invalid configuration at " << (e.pointer().empty() ? "/" : e.pointer()) << ": " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const GridMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitInvalid;
}

}  // namespace emhd::io
