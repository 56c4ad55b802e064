#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "emhd/io/checkpoint.hpp"
#include "emhd/io/config.hpp"
#include "emhd/io/report.hpp"
#include "emhd/io/run.hpp"
#include "emhd/io/svg.hpp"

using namespace emhd;
using namespace emhd::io;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("emhd_io_" + name);
  fs::remove_all(p);
  return p;
}

std::string pointer_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

PerturbationState sample_state() {
  PerturbationState s = random_state(make_grid(16, 8, 3.0, 2.0), 91, 4, 0.5, ModelParams{0.25, 1.5});
  s.time = 2.5;
  return s;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
  const PerturbationState s = sample_state();
  const std::string bytes = checkpoint_encode(s);
  EXPECT_EQ(bytes.size(), kCheckpointHeaderSize + 32u * 16u * 8u);
  const PerturbationState r = checkpoint_decode(bytes);
  EXPECT_EQ(r.grid(), s.grid());
  EXPECT_EQ(r.params.mu1, 0.25);
  EXPECT_EQ(r.params.mu2, 1.5);
  EXPECT_EQ(r.time, 2.5);
  EXPECT_EQ((r.psi - s.psi).max_abs(), 0.0);
  EXPECT_EQ((r.b - s.b).max_abs(), 0.0);
  EXPECT_EQ(checkpoint_encode(r), bytes);
}

TEST(Checkpoint, HeaderLayout) {
  const std::string bytes = checkpoint_encode(sample_state());
  EXPECT_EQ(bytes.substr(0, 8), "EMHDCKPT");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 16);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 8);
  EXPECT_EQ(bytes.substr(64, 8), std::string("psi\0b\0\0\0", 8));
  double lx = 0.0;
  std::memcpy(&lx, bytes.data() + 20, 8);
  EXPECT_EQ(lx, 3.0);
}

TEST(Checkpoint, RejectsDamagedInput) {
  const std::string good = checkpoint_encode(sample_state());
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(checkpoint_decode(bad), CorruptCheckpoint);
  EXPECT_THROW(checkpoint_decode(good.substr(0, 40)), TruncatedCheckpoint);
  EXPECT_THROW(checkpoint_decode(good.substr(0, good.size() - 1)), TruncatedCheckpoint);
  EXPECT_THROW(checkpoint_decode(good + "x"), CorruptCheckpoint);
  bad = good;
  bad[8] = 2;
  EXPECT_THROW(checkpoint_decode(bad), CheckpointVersionMismatch);
  const auto other = make_grid(16, 8);
  EXPECT_THROW(checkpoint_decode(good, other.get()), GridMismatch);
  EXPECT_THROW(checkpoint_read(scratch("missing") / "none.ckpt"), IoError);
}

TEST(AtomicFile, WritesWithoutLeftovers) {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "sub" / "a.txt", "hello");
  write_atomic(dir / "sub" / "a.txt", "world");
  EXPECT_EQ(read_file(dir / "sub" / "a.txt"), "world");
  EXPECT_FALSE(fs::exists(dir / "sub" / "a.txt.tmp"));
  fs::remove_all(dir);
}

TEST(Config, DefaultsAndEcho) {
  const RunConfig c = parse_config_text(R"({"schema_version": 1})");
  EXPECT_EQ(c.grid.nx, 64);
  EXPECT_EQ(c.initial.kind, InitialKind::zero);
  EXPECT_EQ(c.integrator.scheme, Scheme::etd_rk4);
  const json echo = to_json(c);
  EXPECT_EQ(parse_config(echo).grid.ny, c.grid.ny);
  EXPECT_EQ(to_json(parse_config(echo)), echo);
  EXPECT_FALSE(echo["output"].contains("dir"));
}

TEST(Config, ErrorsCarryJsonPointers) {
  EXPECT_EQ(pointer_of("{"), "");
  EXPECT_EQ(pointer_of("{}"), "/schema_version");
  EXPECT_EQ(pointer_of(R"({"schema_version": 2})"), "/schema_version");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "bogus": 0})"), "/bogus");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "grid": {"nx": 63}})"), "/grid/nx");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "grid": {"nx": "64"}})"), "/grid/nx");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "model": {"mu2": -1}})"), "/model/mu2");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "integrator": {"dt": 0.3, "t_end": 1}})"), "/integrator/t_end");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "integrator": {"scheme": "rk4"}})"), "/integrator/scheme");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "diagnostics": {"s": 0.7}})"), "/diagnostics/s");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "diagnostics": {"eps1": 1.9}})"), "/diagnostics/eps1");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "diagnostics": {"s1": [1, -2]}})"), "/diagnostics/s1/1");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "initial": {"kind": "modes", "modes": [{"field": "q", "mx": 1}]}})"),
            "/initial/modes/0/field");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "initial": {"kind": "random", "band": 40}})"), "/initial/band");
  EXPECT_EQ(pointer_of(R"({"schema_version": 1, "steady": {"mode": 16}})"), "/steady/mode");
}

TEST(Config, EnvironmentOverridesOutputDir) {
  ::setenv(kOutputDirEnv, "/tmp/emhd_env_out", 1);
  EXPECT_EQ(parse_config_text(R"({"schema_version": 1, "output": {"dir": "x"}})").output.dir, "/tmp/emhd_env_out");
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(parse_config_text(R"({"schema_version": 1, "output": {"dir": "x"}})").output.dir, "x");
}

TEST(Config, ModesInitialIsRealValued) {
  const RunConfig c = parse_config_text(R"({"schema_version": 1, "grid": {"nx": 16, "ny": 16},
    "initial": {"kind": "modes", "modes": [{"field": "b", "mx": 2, "my": -1, "re": 0.5, "im": 0.25},
                                           {"field": "psi", "mx": 0, "my": 3, "re": 1.0}]}})");
  const PerturbationState s = initial_state(c);
  EXPECT_EQ(hermitian_defect(s.b), 0.0);
  EXPECT_EQ(hermitian_defect(s.psi), 0.0);
  const PhysicalField b = transform_inverse(s.b);
  // b = 2 Re((0.5 + 0.25 i) e^{i(2x - y)}) at the origin = 1
  EXPECT_NEAR(b(0, 0), 1.0, 1e-14);
}

TEST(Config, CheckpointInitialChecksGrid) {
  const fs::path dir = scratch("ckpt_init");
  checkpoint_write(sample_state(), dir / "s.ckpt");
  const std::string base = R"({"schema_version": 1, "initial": {"kind": "checkpoint", "path": ")" + (dir / "s.ckpt").string() + "\"}";
  const RunConfig ok = parse_config_text(base + R"(, "grid": {"nx": 16, "ny": 8, "lx": 3, "ly": 2}})");
  EXPECT_EQ(initial_state(ok).time, 2.5);
  const RunConfig bad = parse_config_text(base + "}");
  try {
    initial_state(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.pointer(), "/initial/path");
  }
  fs::remove_all(dir);
}

TEST(Report, DigestAndNumberFormatting) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, CsvColumns) {
  DiagnosticsConfig c;
  c.s1_list = {0.5, 1.0};
  EXPECT_EQ(csv_header(c), "time,E,D,E_s,E_1,D_1,E_2,D_2,E_high:0.5,E_high:1,g1,g2,g3,energy_law_residual\n");
  DiagnosticsRecord r;
  r.E_high = {1.0, 2.0};
  r.time = 0.5;
  const std::string row = csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 13);
  EXPECT_EQ(row.substr(0, 4), "0.5,");
}

TEST(Report, ManifestDeterministicPart) {
  const fs::path d1 = scratch("man1"), d2 = scratch("man2");
  json m[2];
  int n = 0;
  for (const auto& d : {d1, d2}) {
    ManifestBuilder mb(d, "test");
    mb.emit("a.txt", "payload");
    mb.set("note", 3);
    m[n++] = mb.finish();
  }
  EXPECT_EQ(manifest_without_timestamps(m[0]), manifest_without_timestamps(m[1]));
  EXPECT_EQ(m[0]["files"][0]["sha256"], sha256_hex("payload"));
  EXPECT_TRUE(m[0]["timestamps"].contains("start"));
  const json on_disk = json::parse(read_file(d1 / "manifest.json"));
  EXPECT_EQ(on_disk["deterministic_sha256"], m[0]["deterministic_sha256"]);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Run, ZeroInitialDataGivesZeroDiagnostics) {
  const fs::path dir = scratch("zero_run");
  const RunConfig c = parse_config_text(R"({"schema_version": 1, "grid": {"nx": 16, "ny": 16},
    "integrator": {"dt": 0.1, "t_end": 0.5}})");
  const json m = run_simulate(c, dir);
  EXPECT_EQ(m["snapshots"], 6);
  const std::string csv = read_file(dir / "diagnostics.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0) << line;
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(checkpoint_read(dir / "final.ckpt").time, 0.5);
  fs::remove_all(dir);
}

TEST(Run, LinearRequiresUnitResistivity) {
  const RunConfig c = parse_config_text(R"({"schema_version": 1, "model": {"mu1": 0.1}})");
  EXPECT_THROW(run_linear(c, scratch("lin_bad")), ConfigError);
}

TEST(Svg, SeriesAndSlopeAnnotation) {
  const std::string svg = loglog_svg("t<1>", "x", "y", {{"a", {1, 10, 100}, {1, 0.1, 0.01}, -1.0}});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("t&lt;1&gt;"), std::string::npos);
  EXPECT_NE(svg.find("slope -1.000"), std::string::npos);
  EXPECT_NE(loglog_svg("empty", "x", "y", {}).find("</svg>"), std::string::npos);
}
