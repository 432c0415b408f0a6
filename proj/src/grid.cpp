#include "stagsbp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stagsbp {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double dist(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

const std::array<PanelFrame, 6> kFrames = {{
    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}},
    {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}},
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
    {{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}},
    {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}},
}};

void check_range(double x1, double x2) {
  const double lim = kQuarterPi * (1 + 1e-12);
  if (!(std::abs(x1) <= lim && std::abs(x2) <= lim))
    throw std::out_of_range("equiangular_mapping: coordinates outside [-pi/4, pi/4]");
}

// Local edge point k in [0, N] as (i, j).
void edge_ij(int edge, int k, int N, int& i, int& j) {
  switch (edge) {
    case West: i = 0; j = k; break;
    case East: i = N; j = k; break;
    case South: i = k; j = 0; break;
    default: i = k; j = N; break;
  }
}

}  // namespace

const PanelFrame& panel_frame(int panel) {
  if (panel < 0 || panel >= 6) throw std::out_of_range("panel index");
  return kFrames[panel];
}

Vec3 equiangular_mapping(int panel, double x1, double x2, double a) {
  check_range(x1, x2);
  const PanelFrame& f = panel_frame(panel);
  const double X = std::tan(x1), Y = std::tan(x2);
  const double d = std::sqrt(1 + X * X + Y * Y);
  Vec3 w = add(f.c, add(scale(f.ex, X), scale(f.ey, Y)));
  return scale(w, a / d);
}

PointMetric metric_at(int panel, double x1, double x2, double a) {
  check_range(x1, x2);
  const PanelFrame& f = panel_frame(panel);
  const double X = std::tan(x1), Y = std::tan(x2);
  const double d2 = 1 + X * X + Y * Y;
  const double d = std::sqrt(d2), d3 = d2 * d;
  const double sx = 1 + X * X, sy = 1 + Y * Y;
  Vec3 w = add(f.c, add(scale(f.ex, X), scale(f.ey, Y)));
  PointMetric m;
  m.e1 = scale(add(scale(f.ex, d2), scale(w, -X)), a * sx / d3);
  m.e2 = scale(add(scale(f.ey, d2), scale(w, -Y)), a * sy / d3);
  m.J = a * a * sx * sy / d3;
  const double a2 = a * a;
  m.Q11 = d2 / (a2 * sx);
  m.Q22 = d2 / (a2 * sy);
  m.Q12 = X * Y * d2 / (a2 * sx * sy);
  return m;
}

PanelTopology build_topology() {
  PanelTopology t;
  auto endpoint = [](int p, int e, int end) {
    const double lo = -kQuarterPi, hi = kQuarterPi;
    const double s = end == 0 ? lo : hi;
    switch (e) {
      case West: return equiangular_mapping(p, lo, s, 1.0);
      case East: return equiangular_mapping(p, hi, s, 1.0);
      case South: return equiangular_mapping(p, s, lo, 1.0);
      default: return equiangular_mapping(p, s, hi, 1.0);
    }
  };
  const double tol = 1e-12;
  for (int p = 0; p < 6; ++p) {
    for (int e = 0; e < 4; ++e) {
      Vec3 a0 = endpoint(p, e, 0), a1 = endpoint(p, e, 1);
      int found = 0;
      for (int q = 0; q < 6; ++q) {
        if (q == p) continue;
        for (int f = 0; f < 4; ++f) {
          Vec3 b0 = endpoint(q, f, 0), b1 = endpoint(q, f, 1);
          if (dist(a0, b0) < tol && dist(a1, b1) < tol) {
            t.edges[p][e] = {q, f, false};
            ++found;
          } else if (dist(a0, b1) < tol && dist(a1, b0) < tol) {
            t.edges[p][e] = {q, f, true};
            ++found;
          }
        }
      }
      if (found != 1)
        throw std::runtime_error("build_topology: panel " + std::to_string(p) + " edge " + std::to_string(e) +
                                 " matched " + std::to_string(found) + " neighbours");
    }
  }
  for (int p = 0; p < 6; ++p)
    for (int e = 0; e < 4; ++e) {
      const EdgeLink& l = t.edges[p][e];
      const EdgeLink& back = t.edges[l.panel][l.edge];
      if (back.panel != p || back.edge != e || back.reversed != l.reversed)
        throw std::runtime_error("build_topology: asymmetric link at panel " + std::to_string(p) + " edge " +
                                 std::to_string(e));
    }
  // corners
  std::vector<Vec3> verts;
  std::vector<std::vector<CornerRef>> members;
  for (int p = 0; p < 6; ++p)
    for (int c = 0; c < 4; ++c) {
      const double x1 = (c & 1) ? kQuarterPi : -kQuarterPi;
      const double x2 = (c & 2) ? kQuarterPi : -kQuarterPi;
      Vec3 v = equiangular_mapping(p, x1, x2, 1.0);
      std::size_t k = 0;
      for (; k < verts.size(); ++k)
        if (dist(verts[k], v) < tol) break;
      if (k == verts.size()) {
        verts.push_back(v);
        members.emplace_back();
      }
      members[k].push_back({p, c});
    }
  if (verts.size() != 8) throw std::runtime_error("build_topology: expected 8 cube corners");
  for (int k = 0; k < 8; ++k) {
    if (members[k].size() != 3) throw std::runtime_error("build_topology: corner not shared by 3 panels");
    for (int m = 0; m < 3; ++m) t.corners[k][m] = members[k][m];
  }
  return t;
}

int Grid2D::edge_h(int p, int edge, int k) const {
  int i, j;
  edge_ij(edge, k, N, i, j);
  return idx_h(p, i, j);
}

namespace {

std::vector<double> symmetric_coords(int n, double lo, double dx, bool centres) {
  // Mirror-exact coordinates on [lo, -lo]: x[k] = -x[n-1-k], middle point exactly 0.
  std::vector<double> x(n);
  for (int k = 0; 2 * k < n; ++k) {
    x[k] = lo + (centres ? (k + 0.5) * dx : k * dx);
    x[n - 1 - k] = -x[k];
  }
  if (n % 2) x[n / 2] = 0.0;
  return x;
}

}  // namespace

Grid2D build_cubed_sphere(int Nc, double a) {
  if (Nc < 12) throw std::invalid_argument("build_cubed_sphere: Nc must be >= 12");
  if (!(a > 0)) throw std::invalid_argument("build_cubed_sphere: radius must be positive");
  Grid2D g;
  g.nblocks = 6;
  g.N = Nc;
  g.a = a;
  g.spherical = true;
  g.dx = (std::numbers::pi / 2) / Nc;
  g.xv = symmetric_coords(Nc + 1, -kQuarterPi, g.dx, false);
  g.xc = symmetric_coords(Nc, -kQuarterPi, g.dx, true);
  const int N = Nc;
  g.pos_h.resize(g.n_h());
  g.J_h.resize(g.n_h());
  g.Q12_h.resize(g.n_h());
  g.e1_h.resize(g.n_h());
  g.e2_h.resize(g.n_h());
  g.d1_h.resize(g.n_h());
  g.d2_h.resize(g.n_h());
  g.pos_1.resize(g.n_v());
  g.J_1.resize(g.n_v());
  g.Q11_1.resize(g.n_v());
  g.pos_2.resize(g.n_v());
  g.J_2.resize(g.n_v());
  g.Q22_2.resize(g.n_v());
  g.pos_z.resize(g.n_z());
  g.J_z.resize(g.n_z());
  for (int p = 0; p < 6; ++p) {
    for (int j = 0; j <= N; ++j)
      for (int i = 0; i <= N; ++i) {
        const int m = g.idx_h(p, i, j);
        PointMetric pm = metric_at(p, g.xv[i], g.xv[j], a);
        g.pos_h[m] = equiangular_mapping(p, g.xv[i], g.xv[j], a);
        g.J_h[m] = pm.J;
        g.Q12_h[m] = pm.Q12;
        g.e1_h[m] = pm.e1;
        g.e2_h[m] = pm.e2;
        g.d1_h[m] = add(scale(pm.e1, pm.Q11), scale(pm.e2, pm.Q12));
        g.d2_h[m] = add(scale(pm.e1, pm.Q12), scale(pm.e2, pm.Q22));
      }
    for (int j = 0; j <= N; ++j)
      for (int i = 0; i < N; ++i) {
        const int m = g.idx_1(p, i, j);
        PointMetric pm = metric_at(p, g.xc[i], g.xv[j], a);
        g.pos_1[m] = equiangular_mapping(p, g.xc[i], g.xv[j], a);
        g.J_1[m] = pm.J;
        g.Q11_1[m] = pm.Q11;
      }
    for (int j = 0; j < N; ++j)
      for (int i = 0; i <= N; ++i) {
        const int m = g.idx_2(p, i, j);
        PointMetric pm = metric_at(p, g.xv[i], g.xc[j], a);
        g.pos_2[m] = equiangular_mapping(p, g.xv[i], g.xc[j], a);
        g.J_2[m] = pm.J;
        g.Q22_2[m] = pm.Q22;
      }
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const int m = g.idx_z(p, i, j);
        g.pos_z[m] = equiangular_mapping(p, g.xc[i], g.xc[j], a);
        g.J_z[m] = metric_at(p, g.xc[i], g.xc[j], a).J;
      }
  }
  g.topology = build_topology();
  g.pairing = build_interface_pairing(g, *g.topology);
  g.j_continuous = jacobian_edge_jump(g) <= 1e-12;
  return g;
}

Grid2D build_skew_block(int N, double alpha, double L) {
  if (N < 2) throw std::invalid_argument("build_skew_block: N too small");
  Grid2D g;
  g.nblocks = 1;
  g.N = N;
  g.a = L;
  g.dx = L / N;
  g.xv.resize(N + 1);
  g.xc.resize(N);
  for (int i = 0; i <= N; ++i) g.xv[i] = i * g.dx;
  for (int i = 0; i < N; ++i) g.xc[i] = (i + 0.5) * g.dx;
  const Vec3 e1{1, 0, 0}, e2{std::cos(alpha), std::sin(alpha), 0};
  const double s = std::sin(alpha), c = std::cos(alpha);
  const double Q11 = 1 / (s * s), Q12 = -c / (s * s);
  auto pos = [&](double x1, double x2) { return add(scale(e1, x1), scale(e2, x2)); };
  g.pos_h.resize(g.n_h());
  g.pos_1.resize(g.n_v());
  g.pos_2.resize(g.n_v());
  g.pos_z.resize(g.n_z());
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i <= N; ++i) g.pos_h[g.idx_h(0, i, j)] = pos(g.xv[i], g.xv[j]);
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i < N; ++i) g.pos_1[g.idx_1(0, i, j)] = pos(g.xc[i], g.xv[j]);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i <= N; ++i) g.pos_2[g.idx_2(0, i, j)] = pos(g.xv[i], g.xc[j]);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) g.pos_z[g.idx_z(0, i, j)] = pos(g.xc[i], g.xc[j]);
  g.J_h.assign(g.n_h(), s);
  g.J_1.assign(g.n_v(), s);
  g.J_2.assign(g.n_v(), s);
  g.J_z.assign(g.n_z(), s);
  g.Q11_1.assign(g.n_v(), Q11);
  g.Q22_2.assign(g.n_v(), Q11);
  g.Q12_h.assign(g.n_h(), Q12);
  g.e1_h.assign(g.n_h(), e1);
  g.e2_h.assign(g.n_h(), e2);
  g.d1_h.assign(g.n_h(), add(scale(e1, Q11), scale(e2, Q12)));
  g.d2_h.assign(g.n_h(), add(scale(e1, Q12), scale(e2, Q11)));
  g.j_continuous = true;
  return g;
}

InterfacePairing build_interface_pairing(const Grid2D& g, const PanelTopology& topo) {
  const int N = g.N;
  InterfacePairing ip;
  ip.h_partner.assign(g.n_h(), -1);
  ip.group_offsets.push_back(0);
  const double tol = 1e-12 * g.a;

  auto fail = [](int p, int e, const std::string& what) {
    throw std::runtime_error("build_interface_pairing: panel " + std::to_string(p) + " edge " +
                             std::to_string(e) + ": " + what);
  };

  // edge pairs (non-corner), each physical edge once
  for (int p = 0; p < 6; ++p)
    for (int e = 0; e < 4; ++e) {
      const EdgeLink& l = topo.edges[p][e];
      for (int k = 1; k < N; ++k) {
        const int kk = l.reversed ? N - k : k;
        const int m = g.edge_h(p, e, k), ms = g.edge_h(l.panel, l.edge, kk);
        if (dist(g.pos_h[m], g.pos_h[ms]) > tol) fail(p, e, "paired h-points do not coincide");
        ip.h_partner[m] = ms;
        if (m < ms) {
          ip.group_members.push_back(m);
          ip.group_members.push_back(ms);
          ip.group_offsets.push_back(static_cast<int>(ip.group_members.size()));
        }
      }
    }
  for (const auto& corner : topo.corners) {
    for (const CornerRef& c : corner) {
      const int i = (c.corner & 1) ? N : 0, j = (c.corner & 2) ? N : 0;
      ip.group_members.push_back(g.idx_h(c.panel, i, j));
    }
    const int n = static_cast<int>(ip.group_members.size());
    if (dist(g.pos_h[ip.group_members[n - 1]], g.pos_h[ip.group_members[n - 2]]) > tol ||
        dist(g.pos_h[ip.group_members[n - 1]], g.pos_h[ip.group_members[n - 3]]) > tol)
      throw std::runtime_error("build_interface_pairing: corner points do not coincide");
    ip.group_offsets.push_back(n);
  }

  // flux slots, corners included; each slot pairs with the neighbour's slot for the same edge
  const int ns = 6 * 4 * (N + 1);
  ip.slot_h.resize(ns);
  ip.slot_partner.resize(ns);
  for (int p = 0; p < 6; ++p)
    for (int e = 0; e < 4; ++e) {
      const EdgeLink& l = topo.edges[p][e];
      for (int k = 0; k <= N; ++k) {
        const int s = (p * 4 + e) * (N + 1) + k;
        const int kk = l.reversed ? N - k : k;
        ip.slot_h[s] = g.edge_h(p, e, k);
        ip.slot_partner[s] = (l.panel * 4 + l.edge) * (N + 1) + kk;
        if (dist(g.pos_h[ip.slot_h[s]], g.pos_h[g.edge_h(l.panel, l.edge, kk)]) > tol)
          fail(p, e, "flux slots do not coincide");
      }
    }

  // tangential velocity components on shared edges; sign from the covariant basis on both sides
  auto tangent = [&](int p, int e, int m, int& comp, int& idx, Vec3& pos, Vec3& et) {
    if (e == West || e == East) {
      comp = 2;
      const int i = e == West ? 0 : N;
      idx = g.idx_2(p, i, m);
      pos = g.pos_2[idx];
      et = metric_at(p, g.xv[i], g.xc[m], g.a).e2;
    } else {
      comp = 1;
      const int j = e == South ? 0 : N;
      idx = g.idx_1(p, m, j);
      pos = g.pos_1[idx];
      et = metric_at(p, g.xc[m], g.xv[j], g.a).e1;
    }
  };
  for (int p = 0; p < 6; ++p)
    for (int e = 0; e < 4; ++e) {
      const EdgeLink& l = topo.edges[p][e];
      if (l.panel < p) continue;
      for (int m = 0; m < N; ++m) {
        const int mm = l.reversed ? N - 1 - m : m;
        TangentPair tp;
        Vec3 pa, pb, ea, eb;
        tangent(p, e, m, tp.comp_a, tp.idx_a, pa, ea);
        tangent(l.panel, l.edge, mm, tp.comp_b, tp.idx_b, pb, eb);
        if (dist(pa, pb) > tol) fail(p, e, "tangential velocity points do not coincide");
        const double c = dot(ea, eb);
        if (std::abs(std::abs(c) - std::sqrt(dot(ea, ea) * dot(eb, eb))) > 1e-10 * std::abs(c))
          fail(p, e, "tangent basis vectors are not parallel");
        tp.sign = c > 0 ? 1.0 : -1.0;
        ip.tangent_pairs.push_back(tp);
      }
    }
  return ip;
}

double jacobian_edge_jump(const Grid2D& g) {
  if (!g.pairing) return 0.0;
  const auto& ip = *g.pairing;
  double worst = 0.0;
  for (int gi = 0; gi < ip.group_count(); ++gi) {
    const int b = ip.group_offsets[gi], e = ip.group_offsets[gi + 1];
    for (int k = b + 1; k < e; ++k) {
      const double j0 = g.J_h[ip.group_members[b]], jk = g.J_h[ip.group_members[k]];
      worst = std::max(worst, std::abs(j0 - jk) / std::abs(j0));
    }
  }
  return worst;
}

double min_cell_angle(const Grid2D& g) {
  double best = std::numbers::pi;
  for (int m = 0; m < g.n_h(); ++m) {
    const Vec3& a = g.e1_h[m];
    const Vec3& b = g.e2_h[m];
    const double c = dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
    best = std::min(best, std::acos(std::clamp(std::abs(c), -1.0, 1.0)));
  }
  return best;
}

void to_lonlat(const Vec3& x, double& lon, double& lat) {
  const double r = std::sqrt(dot(x, x));
  lat = std::asin(std::clamp(x[2] / r, -1.0, 1.0));
  lon = std::atan2(x[1], x[0]);
  if (lon < 0) lon += 2 * std::numbers::pi;
}

}  // namespace stagsbp
