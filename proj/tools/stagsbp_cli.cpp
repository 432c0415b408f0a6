// stagsbp command-line driver: operators | spectrum | grid | run | converge

#include "stagsbp/experiments.hpp"
#include "stagsbp/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace stagsbp;
namespace fs = std::filesystem;

namespace {

void log_line(const std::string& s) { std::cerr << "[stagsbp] " << s << std::endl; }

/// Flag values layered over a --config file over built-in defaults.
class Settings {
 public:
  void add(CLI::App* app, const std::string& key, const std::string& def, const std::string& help) {
    defaults_[key] = def;
    order_.push_back(key);
    opts_[key] = app->add_option("--" + key, values_[key], help + " (default: " + def + ")");
  }
  void resolve(const std::string& config_path) {
    KeyValueFile file;
    if (!config_path.empty()) file = KeyValueFile::load(config_path);
    for (const std::string& k : file.keys())
      if (!defaults_.count(k)) throw std::invalid_argument("unknown key '" + k + "' in " + config_path);
    for (const std::string& k : order_) {
      std::string v = defaults_[k];
      if (file.has(k)) v = file.get(k);
      if (opts_[k]->count() > 0) v = values_[k];
      resolved_.set(k, v);
    }
  }
  const std::string& str(const std::string& k) const { return resolved_.get(k); }
  int integer(const std::string& k) const {
    const std::string& v = str(k);
    std::size_t pos = 0;
    int x = 0;
    try {
      x = std::stoi(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (v.empty() || pos != v.size()) throw std::invalid_argument("--" + k + ": expected an integer, got '" + v + "'");
    return x;
  }
  double real(const std::string& k) const {
    const std::string& v = str(k);
    std::size_t pos = 0;
    double x = 0;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (v.empty() || pos != v.size()) throw std::invalid_argument("--" + k + ": expected a number, got '" + v + "'");
    return x;
  }
  const KeyValueFile& resolved() const { return resolved_; }

 private:
  std::map<std::string, std::string> defaults_, values_;
  std::map<std::string, CLI::Option*> opts_;
  std::vector<std::string> order_;
  KeyValueFile resolved_;
};

struct Command {
  CLI::App* app = nullptr;
  Settings settings;
  std::string config;
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (item.empty() || pos != item.size() || v <= 0) throw std::invalid_argument("bad integer list '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

InterfaceMethod1D parse_method(const std::string& s) {
  if (s == "sat") return InterfaceMethod1D::SAT;
  if (s == "projection" || s == "sat-projection") return InterfaceMethod1D::SATProjection;
  if (s == "pure") return InterfaceMethod1D::Pure;
  throw std::invalid_argument("unknown method '" + s + "' (sat | projection | pure)");
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::invalid_argument("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream os(probe);
    if (!os) throw std::invalid_argument("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const Settings& s,
                    const std::vector<std::string>& outputs) {
  RunManifest m;
  m.command = command;
  m.config = s.resolved();
  m.version = version_string();
  m.started_utc = utc_now();
  m.outputs = outputs;
  m.to_kv().save((dir / "manifest.kv").string());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::invalid_argument("cannot write " + p.string());
  return os;
}

int cmd_operators(const Settings& s) {
  const OperatorOrder order = parse_order(s.str("order"));
  const int N = s.integer("n");
  const fs::path dir = prepare_dir(s.str("out"));
  write_manifest(dir, "operators", s, {"operators.csv", "norms.csv", "accuracy.csv"});
  const Operator1DSet set = build_operator_set(order, N, 1.0 / N);
  {
    auto os = open_out(dir / "operators.csv");
    os << "matrix,row,col,value\n";
    const std::pair<const char*, const BandedOperator*> mats[] = {
        {"Dcv", &set.Dcv}, {"Dvc", &set.Dvc}, {"Pvc", &set.Pvc}, {"Pcv", &set.Pcv}};
    for (const auto& [name, op] : mats)
      for (int i = 0; i < op->rows; ++i) {
        const SparseRow r = op->row(i);
        for (std::size_t k = 0; k < r.c.size(); ++k)
          if (r.c[k] != 0) os << name << ',' << i << ',' << r.first + static_cast<int>(k) << ',' << fmt17(r.c[k]) << '\n';
      }
    for (int j = 0; j < N; ++j) {
      if (set.l[j] != 0) os << "l,0," << j << ',' << fmt17(set.l[j]) << '\n';
      if (set.r[j] != 0) os << "r,0," << j << ',' << fmt17(set.r[j]) << '\n';
    }
  }
  {
    auto os = open_out(dir / "norms.csv");
    os << "pointset,index,weight\n";
    for (int i = 0; i <= N; ++i) os << "v," << i << ',' << fmt17(set.Hv[i]) << '\n';
    for (int i = 0; i < N; ++i) os << "c," << i << ',' << fmt17(set.Hc[i]) << '\n';
  }
  const AccuracyReport acc = verify_accuracy_orders(set);
  {
    auto os = open_out(dir / "accuracy.csv");
    os << "operator,interior,boundary\n";
    os << "Dcv," << acc.Dcv.interior << ',' << acc.Dcv.boundary << '\n';
    os << "Dvc," << acc.Dvc.interior << ',' << acc.Dvc.boundary << '\n';
    os << "Pvc," << acc.Pvc.interior << ',' << acc.Pvc.boundary << '\n';
    os << "Pcv," << acc.Pcv.interior << ',' << acc.Pcv.boundary << '\n';
    os << "l,," << acc.l << '\n';
    os << "r,," << acc.r << '\n';
  }
  log_line("sbp residual " + fmt17(sbp_residual(set)) + ", interpolation adjoint residual " +
           fmt17(interpolation_adjoint_residual(set)));
  return 0;
}

int cmd_spectrum(const Settings& s) {
  const OperatorOrder order = parse_order(s.str("order"));
  const int N = s.integer("n");
  const InterfaceMethod1D method = parse_method(s.str("method"));
  const fs::path out = s.str("out");
  const fs::path dir = prepare_dir(out.has_parent_path() ? out.parent_path() : fs::path("."));
  write_manifest(dir, "spectrum", s, {out.filename().string()});
  const Operator1DSet set = build_operator_set(order, N, 1.0 / N);
  const Eigen::MatrixXd L = laplace_matrix(set, method);
  const Eigen::VectorXcd ev = L.eigenvalues();
  std::vector<std::pair<double, double>> vals;
  for (int k = 0; k < ev.size(); ++k) vals.emplace_back(ev[k].real(), ev[k].imag());
  std::sort(vals.begin(), vals.end());
  auto os = open_out(out);
  os << "index,real,imag\n";
  for (std::size_t k = 0; k < vals.size(); ++k) os << k << ',' << fmt17(vals[k].first) << ',' << fmt17(vals[k].second) << '\n';
  log_line("wrote " + std::to_string(vals.size()) + " eigenvalues of dx^2 L to " + out.string());
  return 0;
}

int cmd_grid(const Settings& s) {
  const int Nc = s.integer("nc");
  const fs::path dir = prepare_dir(s.str("out"));
  write_manifest(dir, "grid", s, {"h_points.csv", "summary.csv"});
  const Grid2D g = build_cubed_sphere(Nc, s.real("radius"));
  {
    auto os = open_out(dir / "h_points.csv");
    os << "panel,i,j,x,y,z,lon,lat,J\n";
    for (int p = 0; p < g.nblocks; ++p)
      for (int j = 0; j <= Nc; ++j)
        for (int i = 0; i <= Nc; ++i) {
          const int m = g.idx_h(p, i, j);
          double lon = 0, lat = 0;
          to_lonlat(g.pos_h[m], lon, lat);
          os << p << ',' << i << ',' << j << ',' << fmt17(g.pos_h[m][0]) << ',' << fmt17(g.pos_h[m][1]) << ','
             << fmt17(g.pos_h[m][2]) << ',' << fmt17(lon) << ',' << fmt17(lat) << ',' << fmt17(g.J_h[m]) << '\n';
        }
  }
  auto os = open_out(dir / "summary.csv");
  os << "quantity,value\n";
  os << "jacobian_edge_jump," << fmt17(jacobian_edge_jump(g)) << '\n';
  os << "min_cell_angle_rad," << fmt17(min_cell_angle(g)) << '\n';
  os << "interface_groups," << g.pairing->group_count() << '\n';
  return 0;
}

int cmd_run(const Settings& s) {
  const TestCase tc = parse_test_case(s.str("case"));
  const OperatorOrder order = parse_order(s.str("order"));
  const int Nc = s.integer("nc");
  const double days = s.real("days");
  const double snap_hours = s.real("snapshot-hours");
  const double diag_hours = s.real("diag-hours");
  ModelConfig cfg = default_config(tc, order, Nc);
  cfg.coriolis_variant = parse_coriolis_variant(s.str("variant"));
  if (s.real("dt") > 0) cfg.dt = s.real("dt");
  cfg.validate();
  if (days < 0 || snap_hours < 0 || diag_hours < 0) throw std::invalid_argument("durations must be non-negative");
  const fs::path dir = prepare_dir(s.str("out"));

  std::vector<std::string> outputs{"diagnostics.csv", "h_final.sbpf", "v1_final.sbpf", "v2_final.sbpf"};
  if (snap_hours > 0) {
    const long n = static_cast<long>(std::floor(days * 24 / snap_hours + 1e-9));
    for (long k = 0; k <= n; ++k) outputs.push_back("h_" + std::to_string(k) + ".sbpf");
  }
  write_manifest(dir, "run", s, outputs);

  const Grid2D g = build_cubed_sphere(Nc, tc.a);
  const Operators2D ops(g, order);
  ShallowWaterModel model(cfg, g, ops);
  std::vector<Observer> obs;
  long snap_id = 0;
  if (snap_hours > 0)
    obs.push_back({snap_hours * 3600.0, [&](const ModelState& st) {
                     Snapshot sn{static_cast<std::uint32_t>(Nc), PointSet::H, 6, st.h};
                     write_snapshot((dir / ("h_" + std::to_string(snap_id++) + ".sbpf")).string(), sn);
                   }});
  log_line("run " + to_string(tc) + " order " + to_string(order) + " Nc=" + std::to_string(Nc) +
           " dt=" + fmt17(cfg.dt) + " days=" + fmt17(days));
  const IntegrationResult res = integrate(model, initial_condition(tc, g), days * kDay, obs, diag_hours * 3600.0);
  write_diagnostics_csv((dir / "diagnostics.csv").string(), res.series);
  write_snapshot((dir / "h_final.sbpf").string(), {static_cast<std::uint32_t>(Nc), PointSet::H, 6, res.state.h});
  write_snapshot((dir / "v1_final.sbpf").string(), {static_cast<std::uint32_t>(Nc), PointSet::X1, 6, res.state.v1});
  write_snapshot((dir / "v2_final.sbpf").string(), {static_cast<std::uint32_t>(Nc), PointSet::X2, 6, res.state.v2});
  log_line("relative energy drift " + fmt17(relative_drift(res.series, &Diagnostics::energy)) + ", mass drift " +
           fmt17(relative_drift(res.series, &Diagnostics::mass)));
  return 0;
}

int cmd_converge(const Settings& s) {
  const TestCase tc = parse_test_case(s.str("case"));
  const OperatorOrder order = parse_order(s.str("order"));
  const std::vector<int> ncs = parse_int_list(s.str("nc-list"));
  const int ref_nc = s.integer("ref-nc");
  const OperatorOrder ref_order = parse_order(s.str("ref-order"));
  ConvergenceOptions opt;
  opt.days = s.real("days");
  opt.sample_interval = s.real("sample-hours") * 3600.0;
  opt.variant = parse_coriolis_variant(s.str("variant"));
  opt.log = log_line;
  const fs::path dir = prepare_dir(s.str("out"));
  write_manifest(dir, "converge", s, {"rates.csv"});

  GaussianReference ref;
  const GaussianReference* refp = nullptr;
  if (tc.gaussian()) {
    const double days = opt.days > 0 ? opt.days : 25.0;
    const int finest = *std::max_element(ncs.begin(), ncs.end());
    const std::string cache = s.str("ref-cache");
    if (cache.empty() || !load_reference(cache, tc, ref_order, ref_nc, finest, days, opt.sample_interval, ref)) {
      ref = compute_gaussian_reference(tc, ref_order, ref_nc, finest, days, opt.sample_interval, log_line);
      if (!cache.empty()) save_reference(cache, ref);
    } else {
      log_line("loaded cached reference from " + cache);
    }
    refp = &ref;
  }
  const ConvergenceResult r = convergence_study(tc, order, ncs, opt, refp);
  auto os = open_out(dir / "rates.csv");
  os << "Nc,l2,linf,rate_l2,rate_linf\n";
  for (const auto& row : r.rows)
    os << row.Nc << ',' << fmt17(row.l2) << ',' << fmt17(row.linf) << ',' << fmt17(row.rate_l2) << ','
       << fmt17(row.rate_linf) << '\n';
  os << "fit,,," << fmt17(r.fitted_l2) << ',' << fmt17(r.fitted_linf) << '\n';
  log_line("fitted rates l2 " + fmt17(r.fitted_l2) + ", linf " + fmt17(r.fitted_linf) +
           (r.exact_match ? " (exact match)" : ""));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staggered SBP operators and cubed-sphere shallow-water experiments"};
  app.require_subcommand(1);
  int threads = -1;
  app.add_option("--threads", threads, "worker threads (overrides SBP_THREADS; 0 = auto)");

  std::map<std::string, Command> cmds;
  auto sub = [&](const std::string& name, const std::string& help) -> Command& {
    Command& c = cmds[name];
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", c.config, "key=value file; flags take precedence");
    return c;
  };

  Command& op = sub("operators", "Write 1D operator coefficients, norms and measured accuracy orders");
  op.settings.add(op.app, "order", "63-wave", "21 | 42 | 63-poly | 63-wave");
  op.settings.add(op.app, "n", "24", "number of cells");
  op.settings.add(op.app, "out", "operators_out", "output directory");

  Command& sp = sub("spectrum", "Eigenvalues of dx^2 L for the 1D Laplace model problem on [0, 1]");
  sp.settings.add(sp.app, "order", "42", "21 | 42 | 63-poly | 63-wave");
  sp.settings.add(sp.app, "n", "24", "number of cells");
  sp.settings.add(sp.app, "method", "sat", "sat | projection | pure");
  sp.settings.add(sp.app, "out", "eig.csv", "output CSV file");

  Command& gr = sub("grid", "Cubed-sphere grid coordinates and metric summary");
  gr.settings.add(gr.app, "nc", "24", "cells per panel edge");
  gr.settings.add(gr.app, "radius", fmt17(kEarthRadius), "sphere radius (m)");
  gr.settings.add(gr.app, "out", "grid_out", "output directory");

  Command& rn = sub("run", "Integrate one test case");
  rn.settings.add(rn.app, "case", "gauss1", "gauss1 | gauss2 | gauss3 | solid | poor:NU");
  rn.settings.add(rn.app, "order", "63-wave", "21 | 42 | 63-poly | 63-wave");
  rn.settings.add(rn.app, "nc", "48", "cells per panel edge");
  rn.settings.add(rn.app, "days", "1", "simulated days");
  rn.settings.add(rn.app, "dt", "0", "time step (s); 0 = CFL-matched 600*48/Nc");
  rn.settings.add(rn.app, "variant", "main", "Coriolis variant: basic | full | simplified | main | main-discontinuous");
  rn.settings.add(rn.app, "diag-hours", "1", "diagnostics cadence (h); 0 = start and end only");
  rn.settings.add(rn.app, "snapshot-hours", "0", "h snapshot cadence (h); 0 = final only");
  rn.settings.add(rn.app, "out", "run_out", "output directory");

  Command& cv = sub("converge", "Grid-convergence study with fitted rates");
  cv.settings.add(cv.app, "case", "solid", "gauss1 | gauss2 | gauss3 | solid | poor:NU");
  cv.settings.add(cv.app, "order", "21", "21 | 42 | 63-poly | 63-wave");
  cv.settings.add(cv.app, "nc-list", "24,48,96", "comma separated grid sizes");
  cv.settings.add(cv.app, "ref-nc", "192", "reference grid for Gaussian cases");
  cv.settings.add(cv.app, "ref-order", "63-wave", "reference operator order for Gaussian cases");
  cv.settings.add(cv.app, "ref-cache", "", "directory to cache the Gaussian reference run");
  cv.settings.add(cv.app, "days", "0", "simulated days; 0 = 25 (Gaussian) or 10 (solid rotation)");
  cv.settings.add(cv.app, "sample-hours", "6", "error sampling cadence for Gaussian cases (h)");
  cv.settings.add(cv.app, "variant", "main", "Coriolis variant");
  cv.settings.add(cv.app, "out", "converge_out", "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (threads >= 0) set_worker_threads(threads);
    for (auto& [name, c] : cmds) {
      if (!c.app->parsed()) continue;
      c.settings.resolve(c.config);
      if (name == "operators") return cmd_operators(c.settings);
      if (name == "spectrum") return cmd_spectrum(c.settings);
      if (name == "grid") return cmd_grid(c.settings);
      if (name == "run") return cmd_run(c.settings);
      if (name == "converge") return cmd_converge(c.settings);
    }
  } catch (const NumericalFailure& e) {
    log_line(std::string("numerical failure: ") + e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    log_line(std::string("error: ") + e.what());
    return 1;
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return 1;
  }
  return 1;
}
