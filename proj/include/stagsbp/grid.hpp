#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace stagsbp {

using Vec3 = std::array<double, 3>;

inline constexpr double kEarthRadius = 6.371229e6;

enum class PointSet : std::uint8_t { H = 0, X1 = 1, X2 = 2, Zeta = 3 };

/// Panel-local edges: West (i = 0), East (i = N), South (j = 0), North (j = N).
enum Edge : int { West = 0, East = 1, South = 2, North = 3 };

struct PanelFrame {
  Vec3 c, ex, ey;  // centre direction and in-plane axes, ex x ey = c
};

const PanelFrame& panel_frame(int panel);

/// Equiangular gnomonic map of panel-local (x1, x2) in [-pi/4, pi/4]^2 onto the sphere of radius a.
/// Panels 0..3 are equatorial (centres at longitude 0, pi/2, pi, 3pi/2), 4 is north, 5 is south.
Vec3 equiangular_mapping(int panel, double x1, double x2, double a);

struct PointMetric {
  double J = 0;
  double Q11 = 0, Q12 = 0, Q22 = 0;
  Vec3 e1{}, e2{};
};

PointMetric metric_at(int panel, double x1, double x2, double a);

struct EdgeLink {
  int panel = -1;
  int edge = -1;
  bool reversed = false;
};

struct CornerRef {
  int panel = -1;
  int corner = -1;  // 0: (i=0,j=0), 1: (N,0), 2: (0,N), 3: (N,N)
};

struct PanelTopology {
  std::array<std::array<EdgeLink, 4>, 6> edges;
  std::array<std::array<CornerRef, 3>, 8> corners;
};

/// Derived from the mapping by matching edge endpoints; throws on inconsistency.
PanelTopology build_topology();

struct TangentPair {
  int comp_a = 0;  // 1 -> v1 array, 2 -> v2 array
  int idx_a = 0;
  int comp_b = 0;
  int idx_b = 0;
  double sign = 1.0;  // v_a = sign * v_b for a continuous field
};

struct InterfacePairing {
  /// Groups of coincident h-points (pairs on edges, triples at cube corners), CSR layout.
  std::vector<int> group_offsets;
  std::vector<int> group_members;
  std::vector<int> h_partner;  // non-corner edge partner, -1 elsewhere
  /// Flux slot s = (panel*4 + edge)*(N+1) + k along each edge.
  std::vector<int> slot_h;
  std::vector<int> slot_partner;
  std::vector<TangentPair> tangent_pairs;

  int group_count() const { return static_cast<int>(group_offsets.size()) - 1; }
};

struct Grid2D {
  int nblocks = 0;
  int N = 0;
  double dx = 0;  // coordinate spacing
  double a = 0;
  bool spherical = false;
  std::vector<double> xv, xc;  // local coordinates of vertices / centres along one direction

  std::vector<Vec3> pos_h, pos_1, pos_2, pos_z;
  std::vector<double> J_h, J_1, J_2, J_z;
  std::vector<double> Q11_1, Q22_2, Q12_h;
  std::vector<Vec3> e1_h, e2_h;   // covariant basis at h points
  std::vector<Vec3> d1_h, d2_h;   // dual (contravariant) basis e^1, e^2 at h points

  std::optional<PanelTopology> topology;
  std::optional<InterfacePairing> pairing;
  bool j_continuous = false;

  int n_h() const { return nblocks * (N + 1) * (N + 1); }
  int n_v() const { return nblocks * N * (N + 1); }
  int n_z() const { return nblocks * N * N; }
  int idx_h(int p, int i, int j) const { return (p * (N + 1) + j) * (N + 1) + i; }
  int idx_1(int p, int i, int j) const { return p * N * (N + 1) + j * N + i; }
  int idx_2(int p, int i, int j) const { return p * N * (N + 1) + j * (N + 1) + i; }
  int idx_z(int p, int i, int j) const { return (p * N + j) * N + i; }
  /// h-point on an edge at position k.
  int edge_h(int p, int edge, int k) const;
};

/// Equiangular cubed sphere with Nc cells per panel edge.
Grid2D build_cubed_sphere(int Nc, double a = kEarthRadius);

/// Single flat block of side L with constant angle alpha between coordinate lines; no interfaces.
Grid2D build_skew_block(int N, double alpha, double L = 1.0);

InterfacePairing build_interface_pairing(const Grid2D& g, const PanelTopology& topo);

/// Max relative J mismatch over coincident h-points.
double jacobian_edge_jump(const Grid2D& g);
/// Minimum angle (radians) between covariant basis vectors over all h points.
double min_cell_angle(const Grid2D& g);

/// Geographic longitude / latitude of a Cartesian point.
void to_lonlat(const Vec3& x, double& lon, double& lat);

}  // namespace stagsbp
