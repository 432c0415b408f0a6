#pragma once

#include "stagsbp/grid.hpp"
#include "stagsbp/swe_model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stagsbp {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  std::uint32_t Nc = 0;
  PointSet pointset = PointSet::H;
  std::uint8_t panels = 6;
  std::vector<double> values;
};

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

/// Formats a double with 17 significant digits.
std::string fmt17(double x);

void write_diagnostics_csv(const std::string& path, const std::vector<Diagnostics>& series);

/// Ordered key=value store. '#' starts a comment; blank lines are ignored.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::string& path);
  std::string str() const;
  void save(const std::string& path) const;

  bool has(const std::string& key) const { return map_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& def) const;
  void set(const std::string& key, const std::string& value);
  const std::vector<std::string>& keys() const { return order_; }

 private:
  std::map<std::string, std::string> map_;
  std::vector<std::string> order_;
};

struct RunManifest {
  std::string command;
  KeyValueFile config;               // resolved configuration, all defaults materialised
  std::string version;
  std::string started_utc;
  std::vector<std::string> outputs;  // file names relative to the output directory

  KeyValueFile to_kv() const;
  static RunManifest from_kv(const KeyValueFile& kv);
};

std::string version_string();
std::string utc_now();

}  // namespace stagsbp
