#pragma once

// Run configuration: a JSON document with a versioned schema.
//
//   {
//     "schema_version": 1,
//     "seed": 1,
//     "grid":        {"nx": 64, "ny": 64, "lx": 6.283185307179586, "ly": 6.283185307179586},
//     "model":       {"mu1": 0, "mu2": 1},
//     "initial":     {"kind": "random", "band": 4, "amplitude": 0.01},
//     "steady":      {"kind": "current-sheet", "amp_a": 1, "amp_b": 1, "mode": 1, "width": 0.5},
//     "integrator":  {"scheme": "etd-rk4", "dt": 0.001, "t_end": 1, "output_stride": 10,
//                     "dealias": true, "nonlinear": true},
//     "diagnostics": {"eps1": 0.1, "s": 0.45, "s1": [1.0], "fit_window": [10, 1000]},
//     "output":      {"dir": "out", "plots": true, "checkpoint": true}
//   }
//
// Every section and key is optional; missing keys take the defaults above.
// Unknown keys, wrong types and out-of-range values raise ConfigError with
// the JSON pointer of the offending key.
//
// Initial-data kinds:
//   zero
//   random      band >= 1, amplitude >= 0 (coefficient scale), uses seed
//   modes       list of {"field": "psi"|"b", "mx", "my", "re", "im"}; the
//               conjugate mode is filled in automatically
//   checkpoint  path to a checkpoint written on the same grid

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "emhd/diagnostics.hpp"
#include "emhd/error.hpp"
#include "emhd/grid.hpp"
#include "emhd/integrator.hpp"
#include "emhd/io/atomic_file.hpp"
#include "emhd/io/checkpoint.hpp"
#include "emhd/model.hpp"
#include "emhd/random_fields.hpp"
#include "emhd/steady_state.hpp"

namespace emhd::io {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "EMHD_OUTPUT_DIR";

class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string pointer, const std::string& msg)
      : InvalidArgument((pointer.empty() ? std::string("/") : pointer) + ": " + msg), pointer_(std::move(pointer)) {}
  /// JSON pointer of the offending key ("" for the document root).
  [[nodiscard]] const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class InitialKind { zero, random, modes, checkpoint };

inline std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::zero: return "zero";
    case InitialKind::random: return "random";
    case InitialKind::modes: return "modes";
    case InitialKind::checkpoint: return "checkpoint";
  }
  return "?";
}

struct ModeSpec {
  std::string field = "b";  // "psi" or "b"
  int mx = 1;
  int my = 0;
  double re = 0.0;
  double im = 0.0;
};

struct InitialSpec {
  InitialKind kind = InitialKind::zero;
  int band = 4;
  double amplitude = 1e-2;
  std::vector<ModeSpec> modes;
  std::string path;
};

struct GridSpec {
  int nx = 64;
  int ny = 64;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
};

struct OutputSpec {
  std::string dir = "out";
  bool plots = true;
  bool checkpoint = true;
};

struct RunConfig {
  std::uint64_t seed = 1;
  GridSpec grid;
  ModelParams model;
  InitialSpec initial;
  SteadyState steady;
  IntegratorConfig integrator;
  DiagnosticsConfig diagnostics;
  OutputSpec output;

  [[nodiscard]] GridPtr make_grid() const { return emhd::make_grid(grid.nx, grid.ny, grid.lx, grid.ly); }
};

namespace detail {

inline std::string child(const std::string& ptr, const std::string& key) {
  std::string esc;
  for (char c : key) {
    if (c == '~') esc += "~0";
    else if (c == '/') esc += "~1";
    else esc += c;
  }
  return ptr + "/" + esc;
}

inline void require_object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(child(ptr, key), "unknown key");
  }
}

inline void read_number(const json& j, const std::string& ptr, const char* key, double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(child(ptr, key), "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ConfigError(child(ptr, key), "must be finite");
}

template <class Int>
inline void read_integer(const json& j, const std::string& ptr, const char* key, Int& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(child(ptr, key), "expected an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) {
      out = v.get<Int>();
      return;
    }
    if (v.get<std::int64_t>() < 0) throw ConfigError(child(ptr, key), "must be non-negative");
    out = static_cast<Int>(v.get<std::int64_t>());
  } else {
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<Int>::min() || x > std::numeric_limits<Int>::max())
      throw ConfigError(child(ptr, key), "integer out of range");
    out = static_cast<Int>(x);
  }
}

inline void read_bool(const json& j, const std::string& ptr, const char* key, bool& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) throw ConfigError(child(ptr, key), "expected a boolean");
  out = j.at(key).get<bool>();
}

inline void read_string(const json& j, const std::string& ptr, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string()) throw ConfigError(child(ptr, key), "expected a string");
  out = j.at(key).get<std::string>();
}

inline void check(bool ok, const std::string& ptr, const std::string& msg) {
  if (!ok) throw ConfigError(ptr, msg);
}

}  // namespace detail

/// Parse and fully validate a configuration document.
inline RunConfig parse_config(const json& doc) {
  using namespace detail;
  RunConfig c;
  require_object(doc, "", {"schema_version", "seed", "grid", "model", "initial", "steady", "integrator", "diagnostics", "output"});
  if (!doc.contains("schema_version")) throw ConfigError("/schema_version", "missing schema version");
  {
    int v = 0;
    read_integer(doc, "", "schema_version", v);
    check(v == kConfigSchemaVersion, "/schema_version",
          "unsupported schema version " + std::to_string(v) + " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  read_integer(doc, "", "seed", c.seed);

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    require_object(g, "/grid", {"nx", "ny", "lx", "ly"});
    read_integer(g, "/grid", "nx", c.grid.nx);
    read_integer(g, "/grid", "ny", c.grid.ny);
    read_number(g, "/grid", "lx", c.grid.lx);
    read_number(g, "/grid", "ly", c.grid.ly);
  }
  check(c.grid.nx >= 8 && c.grid.nx % 2 == 0 && c.grid.nx <= 8192, "/grid/nx", "must be even and in [8, 8192]");
  check(c.grid.ny >= 8 && c.grid.ny % 2 == 0 && c.grid.ny <= 8192, "/grid/ny", "must be even and in [8, 8192]");
  check(c.grid.lx > 0.0, "/grid/lx", "must be positive");
  check(c.grid.ly > 0.0, "/grid/ly", "must be positive");

  if (doc.contains("model")) {
    const json& m = doc["model"];
    require_object(m, "/model", {"mu1", "mu2"});
    read_number(m, "/model", "mu1", c.model.mu1);
    read_number(m, "/model", "mu2", c.model.mu2);
  }
  check(c.model.mu1 >= 0.0, "/model/mu1", "must be >= 0");
  check(c.model.mu2 >= 0.0, "/model/mu2", "must be >= 0");

  if (doc.contains("initial")) {
    const json& in = doc["initial"];
    require_object(in, "/initial", {"kind", "band", "amplitude", "modes", "path"});
    std::string kind = "zero";
    read_string(in, "/initial", "kind", kind);
    if (kind == "zero") c.initial.kind = InitialKind::zero;
    else if (kind == "random") c.initial.kind = InitialKind::random;
    else if (kind == "modes") c.initial.kind = InitialKind::modes;
    else if (kind == "checkpoint") c.initial.kind = InitialKind::checkpoint;
    else throw ConfigError("/initial/kind", "unknown kind '" + kind + "' (zero, random, modes, checkpoint)");
    read_integer(in, "/initial", "band", c.initial.band);
    read_number(in, "/initial", "amplitude", c.initial.amplitude);
    read_string(in, "/initial", "path", c.initial.path);
    if (in.contains("modes")) {
      const json& ms = in["modes"];
      check(ms.is_array(), "/initial/modes", "expected an array");
      for (std::size_t n = 0; n < ms.size(); ++n) {
        const std::string p = "/initial/modes/" + std::to_string(n);
        require_object(ms[n], p, {"field", "mx", "my", "re", "im"});
        ModeSpec s;
        read_string(ms[n], p, "field", s.field);
        read_integer(ms[n], p, "mx", s.mx);
        read_integer(ms[n], p, "my", s.my);
        read_number(ms[n], p, "re", s.re);
        read_number(ms[n], p, "im", s.im);
        check(s.field == "psi" || s.field == "b", p + "/field", "must be 'psi' or 'b'");
        check(s.mx != 0 || s.my != 0, p, "the mean mode is not evolved");
        check(std::abs(s.mx) < c.grid.nx / 2, p + "/mx", "must satisfy |mx| < nx/2");
        check(std::abs(s.my) < c.grid.ny / 2, p + "/my", "must satisfy |my| < ny/2");
        c.initial.modes.push_back(s);
      }
    }
  }
  switch (c.initial.kind) {
    case InitialKind::random:
      check(c.initial.band >= 1 && c.initial.band < std::min(c.grid.nx, c.grid.ny) / 2, "/initial/band",
            "must be in [1, min(nx, ny)/2)");
      check(c.initial.amplitude >= 0.0, "/initial/amplitude", "must be >= 0");
      break;
    case InitialKind::modes:
      check(!c.initial.modes.empty(), "/initial/modes", "at least one mode is required");
      break;
    case InitialKind::checkpoint:
      check(!c.initial.path.empty(), "/initial/path", "a checkpoint path is required");
      break;
    case InitialKind::zero: break;
  }

  if (doc.contains("steady")) {
    const json& s = doc["steady"];
    require_object(s, "/steady", {"kind", "amp_a", "amp_b", "mode", "width"});
    std::string kind(to_string(c.steady.kind));
    read_string(s, "/steady", "kind", kind);
    const auto k = parse_steady_kind(kind);
    check(k.has_value(), "/steady/kind", "unknown kind '" + kind + "' (shear-x, shear-y, radial, current-sheet)");
    c.steady.kind = *k;
    read_number(s, "/steady", "amp_a", c.steady.amp_a);
    read_number(s, "/steady", "amp_b", c.steady.amp_b);
    read_integer(s, "/steady", "mode", c.steady.mode);
    read_number(s, "/steady", "width", c.steady.width);
  }
  check(c.steady.mode >= 1 && c.steady.mode < std::min(c.grid.nx, c.grid.ny) / 4, "/steady/mode",
        "must be in [1, min(nx, ny)/4)");
  check(c.steady.width > 0.0, "/steady/width", "must be positive");

  if (doc.contains("integrator")) {
    const json& t = doc["integrator"];
    require_object(t, "/integrator", {"scheme", "dt", "t_end", "output_stride", "dealias", "nonlinear"});
    std::string scheme(to_string(c.integrator.scheme));
    read_string(t, "/integrator", "scheme", scheme);
    const auto s = parse_scheme(scheme);
    check(s.has_value(), "/integrator/scheme", "unknown scheme '" + scheme + "' (etd-rk4, imex-cn-ab2)");
    c.integrator.scheme = *s;
    read_number(t, "/integrator", "dt", c.integrator.dt);
    read_number(t, "/integrator", "t_end", c.integrator.t_end);
    read_integer(t, "/integrator", "output_stride", c.integrator.output_stride);
    read_bool(t, "/integrator", "dealias", c.integrator.dealias);
    read_bool(t, "/integrator", "nonlinear", c.integrator.nonlinear);
  }
  check(c.integrator.dt > 0.0, "/integrator/dt", "must be positive");
  check(c.integrator.t_end >= 0.0, "/integrator/t_end", "must be >= 0");
  check(c.integrator.output_stride >= 1, "/integrator/output_stride", "must be >= 1");
  try {
    c.integrator.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("/integrator/t_end", e.what());
  }
  check(c.integrator.steps() <= 100'000'000, "/integrator/t_end", "more than 1e8 steps");

  if (doc.contains("diagnostics")) {
    const json& d = doc["diagnostics"];
    require_object(d, "/diagnostics", {"eps1", "s", "s1", "fit_window"});
    read_number(d, "/diagnostics", "eps1", c.diagnostics.eps1);
    read_number(d, "/diagnostics", "s", c.diagnostics.s);
    if (d.contains("s1")) {
      check(d["s1"].is_array(), "/diagnostics/s1", "expected an array of numbers");
      c.diagnostics.s1_list.clear();
      for (std::size_t n = 0; n < d["s1"].size(); ++n) {
        const std::string p = "/diagnostics/s1/" + std::to_string(n);
        check(d["s1"][n].is_number(), p, "expected a number");
        const double v = d["s1"][n].get<double>();
        check(std::isfinite(v) && v > -0.5, p, "must be > -1/2");
        c.diagnostics.s1_list.push_back(v);
      }
    }
    if (d.contains("fit_window")) {
      const json& w = d["fit_window"];
      check(w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number(), "/diagnostics/fit_window",
            "expected [t_lo, t_hi]");
      c.diagnostics.fit_window = {w[0].get<double>(), w[1].get<double>()};
    }
  }
  check(c.diagnostics.eps1 > 0.0, "/diagnostics/eps1", "must be positive");
  check(c.diagnostics.s > 0.0 && c.diagnostics.s < 0.5, "/diagnostics/s", "must lie in (0, 1/2)");
  check(c.diagnostics.fit_window.t_lo >= 0.0 && c.diagnostics.fit_window.t_hi > c.diagnostics.fit_window.t_lo,
        "/diagnostics/fit_window", "must satisfy 0 <= t_lo < t_hi");
  {
    const Certification cert = certify(*c.make_grid(), c.diagnostics.eps1);
    check(cert.certified, "/diagnostics/eps1",
          "coercivity certification failed (E min eigenvalue " + std::to_string(cert.e_min) + ", D min eigenvalue " +
              std::to_string(cert.d_min) + ")");
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_object(o, "/output", {"dir", "plots", "checkpoint"});
    read_string(o, "/output", "dir", c.output.dir);
    read_bool(o, "/output", "plots", c.output.plots);
    read_bool(o, "/output", "checkpoint", c.output.checkpoint);
  }
  check(!c.output.dir.empty(), "/output/dir", "must not be empty");
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output.dir = env;
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

/// Canonical echo of a configuration (keys sorted, all defaults explicit).
/// The output directory is omitted so that relocated runs hash alike.
inline json to_json(const RunConfig& c) {
  json modes = json::array();
  for (const auto& m : c.initial.modes) modes.push_back({{"field", m.field}, {"mx", m.mx}, {"my", m.my}, {"re", m.re}, {"im", m.im}});
  json initial = {{"kind", to_string(c.initial.kind)}};
  switch (c.initial.kind) {
    case InitialKind::random:
      initial["band"] = c.initial.band;
      initial["amplitude"] = c.initial.amplitude;
      break;
    case InitialKind::modes: initial["modes"] = modes; break;
    case InitialKind::checkpoint: initial["path"] = c.initial.path; break;
    case InitialKind::zero: break;
  }
  return {
      {"schema_version", kConfigSchemaVersion},
      {"seed", c.seed},
      {"grid", {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"lx", c.grid.lx}, {"ly", c.grid.ly}}},
      {"model", {{"mu1", c.model.mu1}, {"mu2", c.model.mu2}}},
      {"initial", initial},
      {"steady",
       {{"kind", std::string(to_string(c.steady.kind))}, {"amp_a", c.steady.amp_a}, {"amp_b", c.steady.amp_b}, {"mode", c.steady.mode}, {"width", c.steady.width}}},
      {"integrator",
       {{"scheme", std::string(to_string(c.integrator.scheme))},
        {"dt", c.integrator.dt},
        {"t_end", c.integrator.t_end},
        {"output_stride", c.integrator.output_stride},
        {"dealias", c.integrator.dealias},
        {"nonlinear", c.integrator.nonlinear}}},
      {"diagnostics",
       {{"eps1", c.diagnostics.eps1},
        {"s", c.diagnostics.s},
        {"s1", c.diagnostics.s1_list},
        {"fit_window", {c.diagnostics.fit_window.t_lo, c.diagnostics.fit_window.t_hi}}}},
      {"output", {{"plots", c.output.plots}, {"checkpoint", c.output.checkpoint}}},
  };
}

/// Build the initial perturbation described by the configuration.
inline PerturbationState initial_state(const RunConfig& c) {
  const GridPtr g = c.make_grid();
  switch (c.initial.kind) {
    case InitialKind::zero: return PerturbationState::zero(g, c.model);
    case InitialKind::random: return random_state(g, c.seed, c.initial.band, c.initial.amplitude, c.model);
    case InitialKind::modes: {
      PerturbationState s = PerturbationState::zero(g, c.model);
      for (const auto& m : c.initial.modes) {
        SpectralField& f = m.field == "psi" ? s.psi : s.b;
        const int i = (m.mx + g->nx) % g->nx, j = (m.my + g->ny) % g->ny;
        f(i, j) += cplx(m.re, m.im);
        f(g->mirror_x(i), g->mirror_y(j)) += cplx(m.re, -m.im);
      }
      return s;
    }
    case InitialKind::checkpoint: {
      PerturbationState s;
      try {
        s = checkpoint_read(c.initial.path, g.get());
      } catch (const GridMismatch& e) {
        throw ConfigError("/initial/path", std::string("checkpoint grid differs from /grid: ") + e.what());
      }
      s.params = c.model;
      return s;
    }
  }
  throw ConfigError("/initial/kind", "unknown kind");
}

}  // namespace emhd::io
