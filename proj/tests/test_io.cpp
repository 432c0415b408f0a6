#include "stagsbp/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace stagsbp;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("stagsbp_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Snapshot, RoundTripIsBitExact) {
  const fs::path d = temp_dir("snap");
  Snapshot s;
  s.Nc = 12;
  s.pointset = PointSet::X2;
  s.values = {1.0, -0.0, 1e-300, std::numeric_limits<double>::max(), 0.1 + 0.2};
  write_snapshot((d / "a.sbpf").string(), s);
  EXPECT_EQ(fs::file_size(d / "a.sbpf"), 4u + 4 + 4 + 1 + 1 + 8 * s.values.size());
  const Snapshot b = read_snapshot((d / "a.sbpf").string());
  EXPECT_EQ(b.Nc, 12u);
  EXPECT_EQ(b.pointset, PointSet::X2);
  EXPECT_EQ(b.panels, 6);
  ASSERT_EQ(b.values.size(), s.values.size());
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    EXPECT_EQ(b.values[k], s.values[k]);
    EXPECT_EQ(std::signbit(b.values[k]), std::signbit(s.values[k]));
  }
  fs::remove_all(d);
}

TEST(Snapshot, RejectsCorruptFiles) {
  const fs::path d = temp_dir("bad");
  {
    std::ofstream os(d / "magic.sbpf", std::ios::binary);
    os << "XXXX0000000000";
  }
  EXPECT_THROW(read_snapshot((d / "magic.sbpf").string()), std::runtime_error);
  {
    std::ofstream os(d / "short.sbpf", std::ios::binary);
    os << "SBPF";
  }
  EXPECT_THROW(read_snapshot((d / "short.sbpf").string()), std::runtime_error);
  Snapshot s;
  s.values = {1.0, 2.0};
  write_snapshot((d / "ok.sbpf").string(), s);
  fs::resize_file(d / "ok.sbpf", fs::file_size(d / "ok.sbpf") - 3);
  EXPECT_THROW(read_snapshot((d / "ok.sbpf").string()), std::runtime_error);
  EXPECT_THROW(read_snapshot((d / "missing.sbpf").string()), std::runtime_error);
  fs::remove_all(d);
}

TEST(Format, Fmt17RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-310, 6.371229e6, 1e308})
    EXPECT_EQ(std::strtod(fmt17(x).c_str(), nullptr), x);
}

TEST(KeyValue, ParseCommentsAndWhitespace) {
  const KeyValueFile kv = KeyValueFile::parse("# header\n  order = 42  \n\nnc=48 # trailing\nout=a=b\n");
  EXPECT_EQ(kv.keys().size(), 3u);
  EXPECT_EQ(kv.get("order"), "42");
  EXPECT_EQ(kv.get("nc"), "48");
  EXPECT_EQ(kv.get("out"), "a=b");
  EXPECT_EQ(kv.get_or("days", "1"), "1");
  EXPECT_THROW(kv.get("days"), std::invalid_argument);
}

TEST(KeyValue, Errors) {
  EXPECT_THROW(KeyValueFile::parse("novalue\n"), std::invalid_argument);
  EXPECT_THROW(KeyValueFile::parse("=3\n"), std::invalid_argument);
  KeyValueFile kv;
  EXPECT_THROW(kv.set("k", "a\nb"), std::invalid_argument);
  EXPECT_THROW(KeyValueFile::load("/nonexistent/dir/x.kv"), std::invalid_argument);
}

TEST(KeyValue, SaveLoadKeepsOrderAndOverwrites) {
  const fs::path d = temp_dir("kv");
  KeyValueFile kv;
  kv.set("z", "1");
  kv.set("a", "2");
  kv.set("z", "3");
  kv.save((d / "x.kv").string());
  const KeyValueFile b = KeyValueFile::load((d / "x.kv").string());
  ASSERT_EQ(b.keys().size(), 2u);
  EXPECT_EQ(b.keys()[0], "z");
  EXPECT_EQ(b.get("z"), "3");
  EXPECT_EQ(b.str(), kv.str());
  fs::remove_all(d);
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.command = "run";
  m.version = version_string();
  m.started_utc = utc_now();
  m.outputs = {"diagnostics.csv", "h_final.sbpf"};
  m.config.set("case", "poor:32");
  m.config.set("nc", "64");
  const RunManifest b = RunManifest::from_kv(KeyValueFile::parse(m.to_kv().str()));
  EXPECT_EQ(b.command, m.command);
  EXPECT_EQ(b.version, m.version);
  EXPECT_EQ(b.started_utc, m.started_utc);
  EXPECT_EQ(b.outputs, m.outputs);
  EXPECT_EQ(b.config.str(), m.config.str());
  EXPECT_EQ(m.started_utc.size(), 20u);
  EXPECT_EQ(m.started_utc.back(), 'Z');
}

TEST(Diagnostics, CsvHeaderAndRows) {
  const fs::path d = temp_dir("csv");
  std::vector<Diagnostics> s(2);
  s[1].t = 3600;
  s[1].mass = 1.5;
  write_diagnostics_csv((d / "d.csv").string(), s);
  std::ifstream is(d / "d.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t_seconds,mass,energy,tangential_jump");
  std::getline(is, line);
  std::getline(is, line);
  EXPECT_EQ(line, "3600,1.5,0,0");
  fs::remove_all(d);
}
