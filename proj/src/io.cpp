#include "stagsbp/io.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef STAGSBP_VERSION
#define STAGSBP_VERSION "0.1.0"
#endif

namespace stagsbp {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("io/write_snapshot: cannot open " + path);
  os.write("SBPF", 4);
  const std::uint32_t ver = kSnapshotVersion, nc = s.Nc;
  const std::uint8_t ps = static_cast<std::uint8_t>(s.pointset), np = s.panels;
  os.write(reinterpret_cast<const char*>(&ver), 4);
  os.write(reinterpret_cast<const char*>(&nc), 4);
  os.write(reinterpret_cast<const char*>(&ps), 1);
  os.write(reinterpret_cast<const char*>(&np), 1);
  os.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * 8));
  if (!os) throw std::runtime_error("io/write_snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("io/read_snapshot: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SBPF", 4) != 0) throw std::runtime_error("io/read_snapshot: bad magic in " + path);
  std::uint32_t ver = 0;
  Snapshot s;
  std::uint8_t ps = 0;
  is.read(reinterpret_cast<char*>(&ver), 4);
  is.read(reinterpret_cast<char*>(&s.Nc), 4);
  is.read(reinterpret_cast<char*>(&ps), 1);
  is.read(reinterpret_cast<char*>(&s.panels), 1);
  if (!is) throw std::runtime_error("io/read_snapshot: truncated header in " + path);
  if (ver != kSnapshotVersion) throw std::runtime_error("io/read_snapshot: unsupported version " + std::to_string(ver));
  if (ps > 3) throw std::runtime_error("io/read_snapshot: bad point set " + std::to_string(ps));
  s.pointset = static_cast<PointSet>(ps);
  std::vector<char> rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (rest.size() % 8) throw std::runtime_error("io/read_snapshot: payload is not a whole number of float64");
  s.values.resize(rest.size() / 8);
  std::memcpy(s.values.data(), rest.data(), rest.size());
  return s;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_diagnostics_csv(const std::string& path, const std::vector<Diagnostics>& series) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("io/write_diagnostics_csv: cannot open " + path);
  os << "t_seconds,mass,energy,tangential_jump\n";
  for (const Diagnostics& d : series)
    os << fmt17(d.t) << ',' << fmt17(d.mass) << ',' << fmt17(d.energy) << ',' << fmt17(d.tangential_jump) << '\n';
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv.set(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string KeyValueFile::str() const {
  std::string out;
  for (const std::string& k : order_) out += k + "=" + map_.at(k) + "\n";
  return out;
}

void KeyValueFile::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << str();
}

const std::string& KeyValueFile::get(const std::string& key) const {
  auto it = map_.find(key);
  if (it == map_.end()) throw std::invalid_argument("missing key: " + key);
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& def) const {
  auto it = map_.find(key);
  return it == map_.end() ? def : it->second;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  if (value.find('\n') != std::string::npos) throw std::invalid_argument("newline in value for " + key);
  if (!map_.count(key)) order_.push_back(key);
  map_[key] = value;
}

KeyValueFile RunManifest::to_kv() const {
  KeyValueFile kv;
  kv.set("manifest.command", command);
  kv.set("manifest.version", version);
  kv.set("manifest.started_utc", started_utc);
  std::string outs;
  for (std::size_t i = 0; i < outputs.size(); ++i) outs += (i ? "," : "") + outputs[i];
  kv.set("manifest.outputs", outs);
  for (const std::string& k : config.keys()) kv.set("config." + k, config.get(k));
  return kv;
}

RunManifest RunManifest::from_kv(const KeyValueFile& kv) {
  RunManifest m;
  m.command = kv.get("manifest.command");
  m.version = kv.get("manifest.version");
  m.started_utc = kv.get("manifest.started_utc");
  std::stringstream ss(kv.get("manifest.outputs"));
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) m.outputs.push_back(item);
  for (const std::string& k : kv.keys())
    if (k.rfind("config.", 0) == 0) m.config.set(k.substr(7), kv.get(k));
  return m;
}

std::string version_string() { return STAGSBP_VERSION; }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace stagsbp
