#include "stagsbp/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace stagsbp;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STAGSBP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

int count_lines(const fs::path& p) {
  std::ifstream is(p);
  int n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("stagsbp_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, SpectrumWritesOneRowPerVertex) {
  const fs::path d = temp_dir("spec");
  ASSERT_EQ(run_cli("spectrum --order 42 --n 24 --method projection --out " + (d / "eig.csv").string()), 0);
  EXPECT_EQ(count_lines(d / "eig.csv"), 26);
  const RunManifest m = RunManifest::from_kv(KeyValueFile::load((d / "manifest.kv").string()));
  EXPECT_EQ(m.command, "spectrum");
  EXPECT_EQ(m.config.get("method"), "projection");
  fs::remove_all(d);
}

TEST(Cli, ParseAndValidationErrorsExitOne) {
  const fs::path d = temp_dir("err");
  EXPECT_EQ(run_cli("spectrum --bogus 1"), 1);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("run --case gauss9 --out " + d.string()), 1);
  EXPECT_EQ(run_cli("run --nc abc --out " + d.string()), 1);
  EXPECT_EQ(run_cli("spectrum --order 99 --out " + (d / "e.csv").string()), 1);
  EXPECT_EQ(run_cli("converge --nc-list 12,,24 --out " + d.string()), 1);
  EXPECT_EQ(run_cli("--help"), 0);
  fs::remove_all(d);
}

TEST(Cli, FlagsOverrideConfigOverridesDefaults) {
  const fs::path d = temp_dir("cfg");
  {
    std::ofstream os(d / "c.kv");
    os << "# spectrum settings\norder = 21\nn = 12\nmethod = sat\n";
  }
  ASSERT_EQ(run_cli("spectrum --config " + (d / "c.kv").string() + " --n 16 --out " + (d / "eig.csv").string()), 0);
  EXPECT_EQ(count_lines(d / "eig.csv"), 18);
  const KeyValueFile kv = KeyValueFile::load((d / "manifest.kv").string());
  EXPECT_EQ(kv.get("config.order"), "21");
  EXPECT_EQ(kv.get("config.n"), "16");
  {
    std::ofstream os(d / "bad.kv");
    os << "colour = red\n";
  }
  EXPECT_EQ(run_cli("spectrum --config " + (d / "bad.kv").string() + " --out " + (d / "x.csv").string()), 1);
  fs::remove_all(d);
}

TEST(Cli, ShortRunWritesOutputs) {
  const fs::path d = temp_dir("run");
  ASSERT_EQ(run_cli("run --case gauss3 --order 21 --nc 12 --days 0.5 --diag-hours 4 --out " + d.string()), 0);
  for (const char* f : {"manifest.kv", "diagnostics.csv", "h_final.sbpf", "v1_final.sbpf", "v2_final.sbpf"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  EXPECT_EQ(count_lines(d / "diagnostics.csv"), 1 + 4);
  const Snapshot h = read_snapshot((d / "h_final.sbpf").string());
  EXPECT_EQ(h.Nc, 12u);
  EXPECT_EQ(h.values.size(), 6u * 13 * 13);
  fs::remove_all(d);
}

TEST(Cli, OperatorsAndGrid) {
  const fs::path d = temp_dir("ops");
  ASSERT_EQ(run_cli("operators --order 63-wave --n 24 --out " + d.string()), 0);
  EXPECT_TRUE(fs::exists(d / "operators.csv"));
  EXPECT_EQ(count_lines(d / "norms.csv"), 1 + 25 + 24);
  const fs::path g = temp_dir("grid");
  ASSERT_EQ(run_cli("grid --nc 12 --out " + g.string()), 0);
  EXPECT_EQ(count_lines(g / "h_points.csv"), 1 + 6 * 13 * 13);
  fs::remove_all(d);
  fs::remove_all(g);
}
