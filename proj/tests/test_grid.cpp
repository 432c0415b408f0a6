#include "stagsbp/grid.hpp"
#include "stagsbp/ops2d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace stagsbp;

namespace {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

TEST(Mapping, PointsLieOnSphere) {
  for (int p = 0; p < 6; ++p)
    for (double x1 : {-0.7, 0.0, 0.3, std::numbers::pi / 4})
      for (double x2 : {-std::numbers::pi / 4, 0.1, 0.5}) {
        const Vec3 x = equiangular_mapping(p, x1, x2, 2.5);
        EXPECT_NEAR(norm(x), 2.5, 1e-14);
      }
  EXPECT_THROW(equiangular_mapping(0, 1.0, 0.0, 1.0), std::out_of_range);
  EXPECT_THROW(equiangular_mapping(6, 0.0, 0.0, 1.0), std::out_of_range);
}

TEST(Mapping, PanelCentres) {
  const Vec3 expect[6] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int p = 0; p < 6; ++p) {
    const Vec3 x = equiangular_mapping(p, 0, 0, 1);
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(x[d], expect[p][d], 1e-15);
    const PanelFrame& f = panel_frame(p);
    const Vec3 c = cross(f.ex, f.ey);
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(c[d], f.c[d], 0.0);
  }
}

TEST(Metric, MatchesFiniteDifferencesOfMapping) {
  const double a = 3.0, h = 1e-6;
  for (int p = 0; p < 6; ++p) {
    const double x1 = 0.31, x2 = -0.52;
    const PointMetric m = metric_at(p, x1, x2, a);
    const Vec3 xp = equiangular_mapping(p, x1 + h, x2, a), xm = equiangular_mapping(p, x1 - h, x2, a);
    const Vec3 yp = equiangular_mapping(p, x1, x2 + h, a), ym = equiangular_mapping(p, x1, x2 - h, a);
    for (int d = 0; d < 3; ++d) {
      EXPECT_NEAR(m.e1[d], (xp[d] - xm[d]) / (2 * h), 1e-7);
      EXPECT_NEAR(m.e2[d], (yp[d] - ym[d]) / (2 * h), 1e-7);
    }
    EXPECT_NEAR(m.J, norm(cross(m.e1, m.e2)), 1e-12);
    // Q is the inverse of the covariant metric tensor
    const double g11 = dot(m.e1, m.e1), g12 = dot(m.e1, m.e2), g22 = dot(m.e2, m.e2);
    EXPECT_NEAR(m.Q11 * g11 + m.Q12 * g12, 1.0, 1e-12);
    EXPECT_NEAR(m.Q11 * g12 + m.Q12 * g22, 0.0, 1e-12);
    EXPECT_NEAR(m.Q12 * g12 + m.Q22 * g22, 1.0, 1e-12);
  }
}

TEST(Topology, EveryEdgeHasOnePartnerAndCornersAreTriples) {
  const PanelTopology t = build_topology();
  std::set<std::pair<int, int>> seen;
  for (int p = 0; p < 6; ++p)
    for (int e = 0; e < 4; ++e) {
      const EdgeLink& l = t.edges[p][e];
      EXPECT_NE(l.panel, p);
      EXPECT_EQ(t.edges[l.panel][l.edge].panel, p);
      seen.insert({std::min(p * 4 + e, l.panel * 4 + l.edge), std::max(p * 4 + e, l.panel * 4 + l.edge)});
    }
  EXPECT_EQ(seen.size(), 12u);
  std::set<std::pair<int, int>> corner_refs;
  for (const auto& c : t.corners) {
    std::set<int> panels;
    for (const CornerRef& r : c) {
      panels.insert(r.panel);
      corner_refs.insert({r.panel, r.corner});
    }
    EXPECT_EQ(panels.size(), 3u);
  }
  EXPECT_EQ(corner_refs.size(), 24u);
}

class SphereGrid : public ::testing::TestWithParam<int> {};

TEST_P(SphereGrid, CoincidentPointsAndContinuousJacobian) {
  const Grid2D g = build_cubed_sphere(GetParam(), 1.0);
  ASSERT_TRUE(g.pairing.has_value());
  const auto& ip = *g.pairing;
  const int N = g.N;
  // 12 edges with N - 1 interior pairs each, plus 8 corners
  EXPECT_EQ(ip.group_count(), 12 * (N - 1) + 8);
  for (int gi = 0; gi < ip.group_count(); ++gi) {
    const int b = ip.group_offsets[gi], e = ip.group_offsets[gi + 1];
    EXPECT_TRUE(e - b == 2 || e - b == 3);
    for (int k = b + 1; k < e; ++k) {
      const Vec3& x = g.pos_h[ip.group_members[b]];
      const Vec3& y = g.pos_h[ip.group_members[k]];
      EXPECT_LT(norm({x[0] - y[0], x[1] - y[1], x[2] - y[2]}), 1e-13);
    }
  }
  EXPECT_TRUE(g.j_continuous);
  EXPECT_LE(jacobian_edge_jump(g), 1e-12);
  // every slot's partner slot refers to a coincident point
  for (std::size_t s = 0; s < ip.slot_h.size(); ++s) {
    const Vec3& x = g.pos_h[ip.slot_h[s]];
    const Vec3& y = g.pos_h[ip.slot_h[ip.slot_partner[s]]];
    EXPECT_LT(norm({x[0] - y[0], x[1] - y[1], x[2] - y[2]}), 1e-13);
    EXPECT_EQ(ip.slot_partner[ip.slot_partner[s]], static_cast<int>(s));
  }
}

TEST_P(SphereGrid, MirrorExactCoordinates) {
  const Grid2D g = build_cubed_sphere(GetParam(), 1.0);
  const int n = g.N + 1;
  for (int k = 0; k < n; ++k) EXPECT_EQ(g.xv[k], -g.xv[n - 1 - k]);
  for (int k = 0; k < g.N; ++k) EXPECT_EQ(g.xc[k], -g.xc[g.N - 1 - k]);
  EXPECT_NEAR(g.xv[0], -std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(g.dx, std::numbers::pi / 2 / g.N, 1e-15);
}

TEST_P(SphereGrid, TangentPairsAgreeForAContinuousField) {
  const Grid2D g = build_cubed_sphere(GetParam(), 1.0);
  // covariant components of a smooth tangent field: rotation about a tilted axis
  const Vec3 w{0.3, -0.5, 0.8};
  std::vector<double> v1(g.n_v()), v2(g.n_v());
  for (int p = 0; p < 6; ++p)
    for (int j = 0; j <= g.N; ++j)
      for (int i = 0; i < g.N; ++i) {
        const PointMetric m1 = metric_at(p, g.xc[i], g.xv[j], 1.0);
        v1[g.idx_1(p, i, j)] = dot(cross(w, equiangular_mapping(p, g.xc[i], g.xv[j], 1.0)), m1.e1);
        const PointMetric m2 = metric_at(p, g.xv[j], g.xc[i], 1.0);
        v2[g.idx_2(p, j, i)] = dot(cross(w, equiangular_mapping(p, g.xv[j], g.xc[i], 1.0)), m2.e2);
      }
  const auto& tp = g.pairing->tangent_pairs;
  EXPECT_EQ(tp.size(), static_cast<std::size_t>(12 * g.N));
  double worst = 0;
  for (const TangentPair& t : tp) {
    const double a = (t.comp_a == 1 ? v1 : v2)[t.idx_a];
    const double b = (t.comp_b == 1 ? v1 : v2)[t.idx_b];
    worst = std::max(worst, std::abs(a - t.sign * b));
  }
  EXPECT_LT(worst, 1e-14);
}

TEST_P(SphereGrid, QuadratureApproximatesSphereArea) {
  const Grid2D g = build_cubed_sphere(GetParam(), 1.0);
  const Operators2D ops(g, OperatorOrder::Order42);
  std::vector<double> one(g.n_h(), 1.0);
  // fourth-order boundary quadrature: the area error shrinks like N^-4
  const double n4 = std::pow(static_cast<double>(g.N), 4);
  EXPECT_NEAR(ops.dot_h(one.data(), one.data()), 4 * std::numbers::pi, 20.0 / n4);
}

INSTANTIATE_TEST_SUITE_P(Sizes, SphereGrid, ::testing::Values(12, 16, 24));

TEST(SphereGridBasics, RejectsSmallGrids) { EXPECT_THROW(build_cubed_sphere(8), std::invalid_argument); }

TEST(SphereGridBasics, MinimumAngleIsAtCubeCorners) {
  const Grid2D g = build_cubed_sphere(12, 1.0);
  EXPECT_NEAR(min_cell_angle(g), std::numbers::pi / 3, 1e-12);
}

TEST(SphereGridBasics, DualBasis) {
  const Grid2D g = build_cubed_sphere(12, 2.0);
  for (int m = 0; m < g.n_h(); m += 7) {
    EXPECT_NEAR(dot(g.d1_h[m], g.e1_h[m]), 1.0, 1e-12);
    EXPECT_NEAR(dot(g.d1_h[m], g.e2_h[m]), 0.0, 1e-12);
    EXPECT_NEAR(dot(g.d2_h[m], g.e2_h[m]), 1.0, 1e-12);
  }
}

TEST(LonLat, KnownPoints) {
  double lon, lat;
  to_lonlat({-1, 0, 0}, lon, lat);
  EXPECT_NEAR(lon, std::numbers::pi, 1e-15);
  EXPECT_NEAR(lat, 0, 1e-15);
  to_lonlat({0, -2, 0}, lon, lat);
  EXPECT_NEAR(lon, 1.5 * std::numbers::pi, 1e-15);
  to_lonlat({1, 1, std::sqrt(2.0)}, lon, lat);
  EXPECT_NEAR(lon, std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(lat, std::numbers::pi / 4, 1e-15);
}

TEST(SkewBlock, ConstantMetric) {
  const double alpha = 1.1;
  const Grid2D g = build_skew_block(10, alpha);
  EXPECT_EQ(g.nblocks, 1);
  EXPECT_FALSE(g.pairing.has_value());
  EXPECT_NEAR(g.J_h[5], std::sin(alpha), 1e-15);
  const double g12 = std::cos(alpha);
  EXPECT_NEAR(g.Q11_1[3] + g.Q12_h[3] * g12, 1.0, 1e-14);
}
