#pragma once

#include "stagsbp/grid.hpp"
#include "stagsbp/sbp1d.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <vector>

namespace stagsbp {

enum class Basis { Covariant, Contravariant, MassFlux };

enum class CoriolisVariant { Basic, FullContinuous, SimplifiedContinuous, Main, MainDiscontinuous };

std::string to_string(CoriolisVariant v);
CoriolisVariant parse_coriolis_variant(const std::string& s);

struct ScalarFieldH {
  std::vector<double> v;
};

struct VectorFieldV {
  std::vector<double> v1, v2;
  Basis basis = Basis::Covariant;
};

/// Scratch buffers for the raw operator kernels; one per concurrent caller.
struct Workspace {
  std::vector<double> h0, h1, h2, h3;
  std::vector<double> v0, v1, v2, v3;
};

/// Number of worker threads used by block-parallel sweeps (SBP_THREADS, 0 or unset = hardware).
int worker_threads();
void set_worker_threads(int n);

/// Matrix-free 2D multi-block operators built from one 1D operator set.
/// Raw kernels take flat arrays in the grid's index layout; velocity arrays have length n_v().
class Operators2D {
 public:
  Operators2D(const Grid2D& grid, OperatorOrder order);

  const Grid2D& grid() const { return *g_; }
  const Operator1DSet& set() const { return set_; }
  int n_h() const { return g_->n_h(); }
  int n_v() const { return g_->n_v(); }
  int n_z() const { return g_->n_z(); }
  Workspace make_workspace() const;

  const std::vector<double>& H_h() const { return Hh_; }
  const std::vector<double>& H_1() const { return H1_; }
  const std::vector<double>& H_2() const { return H2_; }

  // Kronecker primitives, all blocks
  void D_h1(const double* h, double* v1, double alpha = 1, bool acc = false) const;
  void D_h2(const double* h, double* v2, double alpha = 1, bool acc = false) const;
  void D_1h(const double* v1, double* h, double alpha = 1, bool acc = false) const;
  void D_2h(const double* v2, double* h, double alpha = 1, bool acc = false) const;
  void P_h1(const double* h, double* v1, double alpha = 1, bool acc = false) const;
  void P_h2(const double* h, double* v2, double alpha = 1, bool acc = false) const;
  void P_1h(const double* v1, double* h, double alpha = 1, bool acc = false) const;
  void P_2h(const double* v2, double* h, double alpha = 1, bool acc = false) const;

  /// Outward boundary fluxes R u for every edge slot (length 24 (N+1) on the cubed sphere).
  void boundary_flux(const double* u1, const double* u2, double* slots) const;
  /// h += S u: each edge h-point receives -(R_self + R_partner) / (2 Hv_0).
  void add_sat(const double* u1, const double* u2, double* h) const;

  /// J_h H_h weighted average over coincident h-points; in == out allowed.
  void apply_Ah(const double* in, double* out) const;
  /// D_hv A_h h
  void grad(const double* h, double* g1, double* g2, Workspace& ws) const;
  /// A_h J_h^{-1} (D_vh + S) J_v c for contravariant c
  void div(const double* c1, const double* c2, double* out, Workspace& ws) const;
  /// Contravariant components Q v
  void co2contra(const double* v1, const double* v2, double* c1, double* c2, Workspace& ws) const;
  /// Coriolis tendency (covariant) from contravariant c, f sampled at h points
  void coriolis(CoriolisVariant var, const double* f, const double* c1, const double* c2, double* o1, double* o2,
                Workspace& ws) const;
  /// J_z^{-1} (-D_vc along x2 of v1 + D_vc along x1 of v2)
  void curl(const double* v1, const double* v2, double* z) const;

  /// V: covariant components at h points made continuous through Cartesian averaging (in place).
  void apply_V(double* a, double* b) const;
  /// V~: same for contravariant components (in place).
  void apply_Vt(double* a, double* b) const;

  double dot_h(const double* a, const double* b) const;
  /// w^T H_v J_v Q v
  double dot_v(const double* w1, const double* w2, const double* v1, const double* v2, Workspace& ws) const;
  /// w^T H_v J_v c for an already contravariant c
  double dot_v_contra(const double* w1, const double* w2, const double* c1, const double* c2) const;

  /// Largest eigenvalue of W22^{-1/2} W12^T W11^{-1} W12 W22^{-1/2} over blocks (Lanczos;
  /// max_iter caps the Krylov dimension).
  double pd_criterion(double tol = 1e-8, int max_iter = 1000) const;

  /// max |v_a - sign v_b| over shared-edge tangential components.
  double tangential_jump(const double* v1, const double* v2) const;

  // Typed wrappers with basis checks
  ScalarFieldH apply_Ah(const ScalarFieldH& h) const;
  VectorFieldV grad(const ScalarFieldH& h) const;
  ScalarFieldH div(const VectorFieldV& v) const;
  VectorFieldV co2contra(const VectorFieldV& v) const;
  VectorFieldV coriolis(const VectorFieldV& v, CoriolisVariant var, const std::vector<double>& f) const;
  std::vector<double> curl(const VectorFieldV& v) const;
  double quadrature_dot(const VectorFieldV& w, const VectorFieldV& v) const;
  double quadrature_h(const ScalarFieldH& a, const ScalarFieldH& b) const;

 private:
  template <class F>
  void per_block(F&& f) const;

  const Grid2D* g_;
  Operator1DSet set_;
  std::vector<double> Hh_, H1_, H2_;
  std::vector<double> JQ12_h_, invJ_h_, invJ_1_, invJ_2_, invHh_;
  std::vector<double> group_w_;  // normalised J_h H_h weights aligned with pairing group_members
  int lw_ = 0;                   // extrapolation width
};

/// Assembles a linear map by probing unit vectors (intended for small grids).
Eigen::SparseMatrix<double> assemble_operator(int n_in, int n_out,
                                              const std::function<void(const double*, double*)>& op,
                                              double drop_tol = 0.0);

}  // namespace stagsbp
