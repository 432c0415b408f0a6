#include "stagsbp/experiments.hpp"

#include "stagsbp/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace stagsbp {

namespace {

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

Vec3 from_lonlat(double lon, double lat) {
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

std::string fmt_g(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

double TestCase::mean_depth() const {
  if (tag == CaseTag::SolidRotation) return h0;
  const double c = 2.0 * std::numbers::pi * a / (wave_period_days * kDay);
  return c * c / g;
}

CoriolisSpec TestCase::coriolis() const {
  CoriolisSpec s;
  switch (tag) {
    case CaseTag::GaussHill1:
    case CaseTag::GaussHill2: break;
    case CaseTag::GaussHill3:
    case CaseTag::PoorlyResolved:
      s.kind = CoriolisSpec::Kind::Constant;
      s.value = f_const;
      break;
    case CaseTag::SolidRotation:
      s.kind = CoriolisSpec::Kind::Spherical;
      s.value = omega;
      s.pole = pole();
      break;
  }
  return s;
}

Vec3 TestCase::centre() const {
  if (tag == CaseTag::GaussHill2 || tag == CaseTag::GaussHill3)
    return from_lonlat(std::numbers::pi / 4, std::asin(std::sqrt(1.0 / 3.0)));
  return from_lonlat(std::numbers::pi, 0.0);
}

Vec3 TestCase::pole() const { return from_lonlat(0.0, std::numbers::pi / 4); }

TestCase parse_test_case(const std::string& s) {
  TestCase c;
  if (s == "gauss1") c.tag = CaseTag::GaussHill1;
  else if (s == "gauss2") c.tag = CaseTag::GaussHill2;
  else if (s == "gauss3") c.tag = CaseTag::GaussHill3;
  else if (s == "solid") c.tag = CaseTag::SolidRotation;
  else if (s.rfind("poor:", 0) == 0) {
    c.tag = CaseTag::PoorlyResolved;
    std::size_t pos = 0;
    const std::string num = s.substr(5);
    try {
      c.nu = std::stoi(num, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (num.empty() || pos != num.size() || c.nu <= 0) throw std::invalid_argument("bad wavenumber in case '" + s + "'");
  } else {
    throw std::invalid_argument("unknown test case '" + s + "'");
  }
  return c;
}

std::string to_string(const TestCase& c) {
  switch (c.tag) {
    case CaseTag::GaussHill1: return "gauss1";
    case CaseTag::GaussHill2: return "gauss2";
    case CaseTag::GaussHill3: return "gauss3";
    case CaseTag::SolidRotation: return "solid";
    case CaseTag::PoorlyResolved: return "poor:" + std::to_string(c.nu);
  }
  return "?";
}

double cfl_matched_dt(int Nc) {
  if (Nc <= 0) throw std::invalid_argument("cfl_matched_dt: Nc must be positive");
  return 600.0 * 48.0 / Nc;
}

ModelConfig default_config(const TestCase& c, OperatorOrder order, int Nc) {
  ModelConfig m;
  m.H = c.mean_depth();
  m.g = c.g;
  m.coriolis = c.coriolis();
  m.order = order;
  m.dt = cfl_matched_dt(Nc);
  m.Nc = Nc;
  m.a = c.a;
  return m;
}

double initial_height(const TestCase& c, const Vec3& x) {
  const double r = norm3(x);
  const Vec3 xh{x[0] / r, x[1] / r, x[2] / r};
  if (c.tag == CaseTag::SolidRotation) {
    const double s = dot3(xh, c.pole());
    return c.h0 - c.a * c.omega * c.u0 / c.g * s * s;
  }
  const Vec3 cc = c.centre();
  const Vec3 cr{xh[1] * cc[2] - xh[2] * cc[1], xh[2] * cc[0] - xh[0] * cc[2], xh[0] * cc[1] - xh[1] * cc[0]};
  const double ang = std::atan2(norm3(cr), dot3(xh, cc));  // accurate near the centre, unlike acos
  double h = std::exp(-16.0 * ang * ang);  // r^2 / a^2 with r = a * angle
  if (c.tag == CaseTag::PoorlyResolved) {
    double lon = 0, lat = 0;
    to_lonlat(xh, lon, lat);
    const double cl = std::cos(c.nu * lon), cp = std::cos(c.nu * lat);
    h *= cl * cl * cp * cp;
  }
  return h;
}

ModelState initial_condition(const TestCase& c, const Grid2D& g) {
  if (!g.spherical) throw std::invalid_argument("initial_condition: test cases are defined on the cubed sphere");
  ModelState s;
  s.h.resize(g.n_h());
  for (int m = 0; m < g.n_h(); ++m) s.h[m] = initial_height(c, g.pos_h[m]);
  s.v1.assign(g.n_v(), 0.0);
  s.v2.assign(g.n_v(), 0.0);
  if (c.tag == CaseTag::SolidRotation) {
    const Vec3 p = c.pole();
    const double w = c.u0 / c.a;
    const int N = g.N;
    for (int q = 0; q < g.nblocks; ++q)
      for (int j = 0; j <= N; ++j)
        for (int i = 0; i < N; ++i) {
          // v1 at (x^c_i, x^v_j), v2 at (x^v_j, x^c_i)
          const PointMetric m1 = metric_at(q, g.xc[i], g.xv[j], g.a);
          const Vec3 x1 = equiangular_mapping(q, g.xc[i], g.xv[j], g.a);
          const Vec3 u1 = cross3(p, x1);
          s.v1[g.idx_1(q, i, j)] = w * dot3(u1, m1.e1);
          const PointMetric m2 = metric_at(q, g.xv[j], g.xc[i], g.a);
          const Vec3 x2 = equiangular_mapping(q, g.xv[j], g.xc[i], g.a);
          const Vec3 u2 = cross3(p, x2);
          s.v2[g.idx_2(q, j, i)] = w * dot3(u2, m2.e2);
        }
  }
  return s;
}

std::vector<double> restrict_h(const std::vector<double>& fine, int Nc_fine, int Nc_coarse) {
  if (Nc_coarse <= 0 || Nc_fine < Nc_coarse || Nc_fine % Nc_coarse != 0)
    throw std::invalid_argument("restrict_h: grids " + std::to_string(Nc_coarse) + " and " + std::to_string(Nc_fine) +
                                " are not nested");
  const int r = Nc_fine / Nc_coarse;
  const int nf = Nc_fine + 1, nc = Nc_coarse + 1;
  if (fine.size() != static_cast<std::size_t>(6 * nf * nf))
    throw std::invalid_argument("restrict_h: fine field has the wrong size");
  std::vector<double> out(6 * nc * nc);
  for (int p = 0; p < 6; ++p)
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < nc; ++i) out[(p * nc + j) * nc + i] = fine[(p * nf + r * j) * nf + r * i];
  return out;
}

ErrorNorms error_norms(const std::vector<double>& h, const std::vector<double>& h_ref, const Operators2D& ops) {
  const int n = ops.n_h();
  if (h.size() != static_cast<std::size_t>(n) || h_ref.size() != h.size())
    throw std::invalid_argument("error_norms: field sizes do not match the grid");
  const std::vector<double>& Hh = ops.H_h();
  const std::vector<double>& J = ops.grid().J_h;
  double num = 0, den = 0, emax = 0, rmax = 0;
  for (int m = 0; m < n; ++m) {
    const double w = Hh[m] * J[m], e = h[m] - h_ref[m];
    num += w * e * e;
    den += w * h_ref[m] * h_ref[m];
    emax = std::max(emax, std::abs(e));
    rmax = std::max(rmax, std::abs(h_ref[m]));
  }
  if (den == 0 || rmax == 0) throw std::invalid_argument("error_norms: reference field is zero");
  return {std::sqrt(num / den), emax / rmax};
}

void fit_rates(ConvergenceResult& r) {
  const std::size_t n = r.rows.size();
  if (n < 2) throw std::invalid_argument("fit_rates: need at least two grids");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.exact_match = std::all_of(r.rows.begin(), r.rows.end(), [](const ConvergenceRow& x) { return x.l2 == 0 && x.linf == 0; });
  if (r.exact_match) {
    for (auto& row : r.rows) row.rate_l2 = row.rate_linf = nan;
    r.fitted_l2 = r.fitted_linf = nan;
    return;
  }
  r.rows[0].rate_l2 = r.rows[0].rate_linf = nan;
  for (std::size_t k = 1; k < n; ++k) {
    const double ratio = std::log2(static_cast<double>(r.rows[k].Nc) / r.rows[k - 1].Nc);
    r.rows[k].rate_l2 = std::log2(r.rows[k - 1].l2 / r.rows[k].l2) / ratio;
    r.rows[k].rate_linf = std::log2(r.rows[k - 1].linf / r.rows[k].linf) / ratio;
  }
  auto slope = [&](double ConvergenceRow::*e) {
    double sx = 0, sy = 0;
    for (const auto& row : r.rows) {
      sx += std::log2(row.Nc);
      sy += std::log2(row.*e);
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0;
    for (const auto& row : r.rows) {
      const double dx = std::log2(row.Nc) - mx;
      sxy += dx * (std::log2(row.*e) - my);
      sxx += dx * dx;
    }
    return -sxy / sxx;
  };
  r.fitted_l2 = slope(&ConvergenceRow::l2);
  r.fitted_linf = slope(&ConvergenceRow::linf);
}

GaussianReference compute_gaussian_reference(const TestCase& c, OperatorOrder order, int Nc_ref, int Nc_sample,
                                             double days, double interval, const LogFn& log) {
  if (!c.gaussian()) throw std::invalid_argument("compute_gaussian_reference: not a Gaussian case");
  if (Nc_ref % Nc_sample != 0) throw std::invalid_argument("compute_gaussian_reference: sample grid not nested");
  GaussianReference ref;
  ref.test_case = c;
  ref.order = order;
  ref.Nc_ref = Nc_ref;
  ref.Nc_sample = Nc_sample;
  ref.interval = interval;
  const ModelConfig cfg = default_config(c, order, Nc_ref);
  const Grid2D g = build_cubed_sphere(Nc_ref, c.a);
  const Operators2D ops(g, order);
  ShallowWaterModel model(cfg, g, ops);
  if (log) log("reference " + to_string(c) + " order " + to_string(order) + " Nc=" + std::to_string(Nc_ref));
  Observer obs{interval, [&](const ModelState& s) {
                 ref.samples.push_back(restrict_h(s.h, Nc_ref, Nc_sample));
                 if (log && ref.samples.size() % 20 == 1) log("  reference t = " + fmt_g(s.t / kDay) + " days");
               }};
  integrate(model, initial_condition(c, g), days * kDay, {obs});
  return ref;
}

namespace {

KeyValueFile reference_kv(const TestCase& c, OperatorOrder order, int Nc_ref, int Nc_sample, double interval) {
  KeyValueFile kv;
  kv.set("case", to_string(c));
  kv.set("order", to_string(order));
  kv.set("nc_ref", std::to_string(Nc_ref));
  kv.set("nc_sample", std::to_string(Nc_sample));
  kv.set("interval", fmt17(interval));
  return kv;
}

std::string reference_stem(const TestCase& c, OperatorOrder order, int Nc_ref) {
  std::string s = "ref_" + to_string(c) + "_" + to_string(order) + "_" + std::to_string(Nc_ref);
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

}  // namespace

void save_reference(const std::string& dir, const GaussianReference& r) {
  std::filesystem::create_directories(dir);
  const std::string stem = (std::filesystem::path(dir) / reference_stem(r.test_case, r.order, r.Nc_ref)).string();
  KeyValueFile kv = reference_kv(r.test_case, r.order, r.Nc_ref, r.Nc_sample, r.interval);
  kv.set("samples", std::to_string(r.samples.size()));
  Snapshot snap;
  snap.Nc = static_cast<std::uint32_t>(r.Nc_sample);
  for (const auto& s : r.samples) snap.values.insert(snap.values.end(), s.begin(), s.end());
  write_snapshot(stem + ".sbpf", snap);
  kv.save(stem + ".kv");
}

bool load_reference(const std::string& dir, const TestCase& c, OperatorOrder order, int Nc_ref, int Nc_sample,
                    double days, double interval, GaussianReference& out) {
  const std::string stem = (std::filesystem::path(dir) / reference_stem(c, order, Nc_ref)).string();
  if (!std::filesystem::exists(stem + ".kv") || !std::filesystem::exists(stem + ".sbpf")) return false;
  const KeyValueFile kv = KeyValueFile::load(stem + ".kv");
  const KeyValueFile want = reference_kv(c, order, Nc_ref, Nc_sample, interval);
  for (const std::string& k : want.keys())
    if (kv.get_or(k, "") != want.get(k)) return false;
  const std::size_t count = std::stoul(kv.get("samples"));
  const long needed = std::lround(days * kDay / interval) + 1;
  if (static_cast<long>(count) < needed) return false;
  const Snapshot snap = read_snapshot(stem + ".sbpf");
  const std::size_t per = static_cast<std::size_t>(6 * (Nc_sample + 1) * (Nc_sample + 1));
  if (snap.values.size() != per * count) return false;
  out = GaussianReference{};
  out.test_case = c;
  out.order = order;
  out.Nc_ref = Nc_ref;
  out.Nc_sample = Nc_sample;
  out.interval = interval;
  for (std::size_t k = 0; k < count; ++k)
    out.samples.emplace_back(snap.values.begin() + k * per, snap.values.begin() + (k + 1) * per);
  return true;
}

ConvergenceResult convergence_study(const TestCase& c, OperatorOrder order, const std::vector<int>& Nc_list,
                                    const ConvergenceOptions& opt, const GaussianReference* ref) {
  if (Nc_list.size() < 2) throw std::invalid_argument("convergence_study: need at least two grids");
  const double days = opt.days > 0 ? opt.days : (c.gaussian() ? 25.0 : 10.0);
  if (c.gaussian()) {
    if (!ref) throw std::invalid_argument("convergence_study: Gaussian cases need a reference solution");
    if (to_string(ref->test_case) != to_string(c)) throw std::invalid_argument("convergence_study: reference case mismatch");
    if (std::abs(ref->interval - opt.sample_interval) > 1e-9)
      throw std::invalid_argument("convergence_study: reference sampling interval mismatch");
    const long needed = std::lround(days * kDay / opt.sample_interval) + 1;
    if (static_cast<long>(ref->samples.size()) < needed)
      throw std::invalid_argument("convergence_study: reference run is shorter than the study");
  }
  ConvergenceResult res;
  for (int Nc : Nc_list) {
    if (c.gaussian() && (ref->Nc_sample % Nc != 0))
      throw std::invalid_argument("convergence_study: Nc=" + std::to_string(Nc) + " is not nested in the reference");
    ModelConfig cfg = default_config(c, order, Nc);
    cfg.coriolis_variant = opt.variant;
    const Grid2D g = build_cubed_sphere(Nc, c.a);
    const Operators2D ops(g, order);
    ShallowWaterModel model(cfg, g, ops);
    const ModelState ic = initial_condition(c, g);
    ConvergenceRow row;
    row.Nc = Nc;
    row.dt = cfg.dt;
    if (c.gaussian()) {
      std::vector<Observer> obs{{opt.sample_interval, [&](const ModelState& s) {
                                   const long k = std::lround(s.t / opt.sample_interval);
                                   const auto href = restrict_h(ref->samples.at(k), ref->Nc_sample, Nc);
                                   const ErrorNorms e = error_norms(s.h, href, ops);
                                   row.l2 = std::max(row.l2, e.l2);
                                   row.linf = std::max(row.linf, e.linf);
                                 }}};
      integrate(model, ic, days * kDay, obs);
    } else {
      const IntegrationResult out = integrate(model, ic, days * kDay);
      const ErrorNorms e = error_norms(out.state.h, ic.h, ops);
      row.l2 = e.l2;
      row.linf = e.linf;
    }
    if (opt.log)
      opt.log(to_string(c) + " order " + to_string(order) + " Nc=" + std::to_string(Nc) + " l2=" + fmt17(row.l2) +
              " linf=" + fmt17(row.linf));
    res.rows.push_back(row);
  }
  fit_rates(res);
  return res;
}

double checkerboard_fraction(const std::vector<double>& h, const Grid2D& g, const Operators2D& ops) {
  if (h.size() != static_cast<std::size_t>(g.n_h())) throw std::invalid_argument("checkerboard_fraction: size mismatch");
  static constexpr double w[3] = {1.0, -2.0, 1.0};
  const int N = g.N;
  double num = 0, den = 0;
  for (int p = 0; p < g.nblocks; ++p)
    for (int j = 1; j < N; ++j)
      for (int i = 1; i < N; ++i) {
        double c = 0;
        for (int b = -1; b <= 1; ++b)
          for (int a = -1; a <= 1; ++a) c += w[a + 1] * w[b + 1] * h[g.idx_h(p, i + a, j + b)];
        c /= 16.0;
        const int m = g.idx_h(p, i, j);
        const double wt = ops.H_h()[m] * g.J_h[m];
        num += wt * c * c;
        den += wt * h[m] * h[m];
      }
  return den > 0 ? num / den : 0.0;
}

double relative_drift(const std::vector<Diagnostics>& s, double Diagnostics::*field) {
  if (s.empty()) return 0.0;
  const double ref = s.front().*field;
  double d = 0;
  for (const auto& x : s) d = std::max(d, std::abs(x.*field - ref));
  return ref != 0 ? d / std::abs(ref) : d;
}

StationaryResult stationary_mode(const TestCase& c, OperatorOrder order, int Nc, double hours, CoriolisVariant variant,
                                 const LogFn& log) {
  ModelConfig cfg = default_config(c, order, Nc);
  cfg.coriolis_variant = variant;
  const Grid2D g = build_cubed_sphere(Nc, c.a);
  const Operators2D ops(g, order);
  ShallowWaterModel model(cfg, g, ops);
  StationaryResult res;
  res.mean_h.assign(g.n_h(), 0.0);
  long count = 0;
  Observer acc{cfg.dt, [&](const ModelState& s) {
                 if (s.t == 0) return;
                 for (std::size_t m = 0; m < s.h.size(); ++m) res.mean_h[m] += s.h[m];
                 ++count;
               }};
  if (log) log("stationary mode " + to_string(c) + " order " + to_string(order) + " Nc=" + std::to_string(Nc));
  const IntegrationResult out = integrate(model, initial_condition(c, g), hours * 3600.0, {acc}, 3600.0);
  if (count > 0)
    for (double& x : res.mean_h) x /= count;
  res.series = out.series;
  res.checkerboard = checkerboard_fraction(res.mean_h, g, ops);
  res.max_energy_drift = relative_drift(res.series, &Diagnostics::energy);
  res.max_mass_drift = relative_drift(res.series, &Diagnostics::mass);
  return res;
}

}  // namespace stagsbp
