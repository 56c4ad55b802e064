#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emhd/io/cli.hpp"

using namespace emhd;
using namespace emhd::io;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "emhd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("emhd_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  write_atomic(dir / "config.json", text);
  return dir / "config.json";
}

}  // namespace

TEST(Cli, DispersionPrintsRootsAndRegime) {
  const Result r = cli({"dispersion", "--xi", "0,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lambda+ = -1 + 0i"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lambda- = 0 + 0i"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("regime  = zero-xi1"), std::string::npos);

  const fs::path dir = scratch("dispersion");
  const Result c = cli({"dispersion", "--xi", "1,0.5", "--out", dir.string()});
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("complex-pair"), std::string::npos);
  const json rep = json::parse(read_file(dir / "dispersion.json"));
  EXPECT_EQ(rep["regime"], "complex-pair");
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_EQ(cli({"dispersion", "--xi", "0,0"}).code, 2);
  EXPECT_EQ(cli({"dispersion", "--xi", "1"}).code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"simulate"}).code, 2);
  EXPECT_EQ(cli({"verify", "--only", "11"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, InvalidConfigReportsPointer) {
  const fs::path dir = scratch("bad_config");
  const auto path = write_config(dir, R"({"schema_version": 1, "grid": {"nx": 7}})");
  const Result r = cli({"simulate", "--config", path.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/grid/nx"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"simulate", "--config", (dir / "nope.json").string()}).code, 4);
}

TEST(Cli, SimulateAndLinearWriteOutputs) {
  const fs::path dir = scratch("simulate");
  const auto path = write_config(dir, R"({"schema_version": 1, "grid": {"nx": 16, "ny": 16},
    "initial": {"kind": "random", "band": 3, "amplitude": 0.01}, "integrator": {"dt": 0.05, "t_end": 0.5, "output_stride": 2}})");
  for (const std::string sub : {"simulate", "linear"}) {
    const fs::path out = dir / sub;
    const Result r = cli({sub, "--config", path.string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("6 snapshots"), std::string::npos) << r.out;
    for (const char* f : {"diagnostics.csv", "norms.svg", "final.ckpt", "manifest.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    const json m = json::parse(read_file(out / "manifest.json"));
    EXPECT_EQ(m["subcommand"], sub);
    EXPECT_EQ(m["config"]["integrator"]["output_stride"], 2);
  }
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path dir = scratch("env");
  const auto path = write_config(dir, R"({"schema_version": 1, "grid": {"nx": 8, "ny": 8}, "integrator": {"dt": 0.1, "t_end": 0.1}})");
  ::setenv(kOutputDirEnv, (dir / "from_env").string().c_str(), 1);
  const Result r = cli({"simulate", "--config", path.string()});
  ::unsetenv(kOutputDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "from_env" / "manifest.json"));
}

TEST(Cli, NumericalBlowUpExitsThreeWithCheckpoint) {
  const fs::path dir = scratch("blowup");
  const auto path = write_config(dir, R"({"schema_version": 1, "grid": {"nx": 32, "ny": 32}, "model": {"mu1": 0, "mu2": 0},
    "initial": {"kind": "random", "band": 10, "amplitude": 1000}, "integrator": {"dt": 0.5, "t_end": 500, "dealias": false}})");
  const Result r = cli({"simulate", "--config", path.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3) << r.out << r.err;
  EXPECT_NE(r.err.find("aborted.ckpt"), std::string::npos) << r.err;
  ASSERT_TRUE(fs::exists(dir / "o" / "aborted.ckpt"));
  const PerturbationState s = checkpoint_read(dir / "o" / "aborted.ckpt");
  EXPECT_TRUE(std::isfinite(s.psi.max_abs()));
}

TEST(Cli, DecayFitMatchesLinearRate) {
  const fs::path dir = scratch("decay");
  const auto path = write_config(dir, R"({"schema_version": 1, "diagnostics": {"fit_window": [100, 10000]}})");
  const Result r = cli({"decay-fit", "--config", path.string(), "--s", "0.45", "--k", "1", "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(read_file(dir / "o" / "decay_fit.json"));
  ASSERT_EQ(rep["fits"].size(), 1u);
  // the exact linear solution decays like t^{-(s + k + 1)/2}
  EXPECT_NEAR(rep["fits"][0]["b_exponent"].get<double>(), -(0.45 + 2.0) / 2.0, 0.03);
  EXPECT_NEAR(rep["fits"][0]["grad_psi_exponent"].get<double>(), -(0.45 + 2.0) / 2.0, 0.03);
  EXPECT_EQ(rep["fits"][0]["rate_bound"].get<double>(), -(0.45 + 1.0) / 2.0);
  EXPECT_TRUE(fs::exists(dir / "o" / "decay.svg"));
  EXPECT_EQ(cli({"decay-fit", "--s", "0.6"}).code, 2);
  EXPECT_EQ(cli({"decay-fit", "--k", "3"}).code, 2);
}

TEST(Cli, LpAnalyzeOfCheckpoint) {
  const fs::path dir = scratch("lp");
  PerturbationState s = random_state(make_grid(32, 32), 95, 8, 1.0);
  checkpoint_write(s, dir / "s.ckpt");
  const Result r = cli({"lp-analyze", "--snapshot", (dir / "s.ckpt").string(), "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string blocks = read_file(dir / "o" / "lp_blocks.csv");
  EXPECT_EQ(blocks.substr(0, blocks.find('\n')), "field,j,k,energy");
  // block energies of b add up to |b|^2 only up to the squared-weight factor; check the count instead
  EXPECT_EQ(std::count(blocks.begin(), blocks.end(), '\n'), 1 + 2 * 6 * 6);
  EXPECT_NE(read_file(dir / "o" / "lp_norms.csv").find("b,besov,0.5,1.5,"), std::string::npos);
  EXPECT_EQ(cli({"lp-analyze", "--snapshot", (dir / "missing.ckpt").string()}).code, 4);
}

TEST(Cli, VerifySubsetIsReproducible) {
  const fs::path d1 = scratch("verify1"), d2 = scratch("verify2");
  const Result a = cli({"verify", "--only", "1,5,7", "--out", d1.string()});
  const Result b = cli({"verify", "--only", "1,5,7", "--out", d2.string()});
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 3);
  EXPECT_NE(a.out.find("[PASS]  5"), std::string::npos) << a.out;
  const json m1 = json::parse(read_file(d1 / "manifest.json")), m2 = json::parse(read_file(d2 / "manifest.json"));
  EXPECT_EQ(manifest_without_timestamps(m1), manifest_without_timestamps(m2));
  EXPECT_EQ(read_file(d1 / "verify.json"), read_file(d2 / "verify.json"));
  EXPECT_FALSE(fs::exists(d1 / "scratch"));
}
