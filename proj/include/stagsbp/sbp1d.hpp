#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace stagsbp {

enum class OperatorOrder { Order21, Order42, Order63Poly, Order63Wave };
enum class InterfaceMethod1D { Pure, SAT, SATProjection };

std::string to_string(OperatorOrder o);
/// Accepts "21", "42", "63-poly", "63-wave" (and "63" as an alias for 63-wave).
OperatorOrder parse_order(const std::string& s);
/// Nominal interior accuracy 2s; boundary accuracy is s.
int nominal_s(OperatorOrder o);

struct SparseRow {
  int first = 0;
  std::vector<double> c;
};

/// Banded matrix stored as explicit head/tail rows and one repeated interior stencil.
/// Interior row i touches columns i + offset, ..., i + offset + stencil.size() - 1.
struct BandedOperator {
  int rows = 0;
  int cols = 0;
  std::vector<SparseRow> head;
  std::vector<SparseRow> tail;  // tail[k] is row rows - tail.size() + k
  std::vector<double> stencil;
  int offset = 0;

  int interior_begin() const { return static_cast<int>(head.size()); }
  int interior_end() const { return rows - static_cast<int>(tail.size()); }

  SparseRow row(int i) const;
  double at(int i, int j) const;
  void scale(double s);

  /// y = A x for contiguous vectors.
  void apply(const double* x, double* y) const;
  /// Applies A along the fast index of a (nlines x cols) block: y[l*rows + i].
  void apply_x(const double* x, double* y, int nlines, double alpha = 1.0, bool accumulate = false) const;
  /// Applies A along the slow index of a (cols x width) block: y[i*width + k].
  void apply_y(const double* x, double* y, int width, double alpha = 1.0, bool accumulate = false) const;

  Eigen::MatrixXd dense() const;

  /// Compresses arbitrary row data; rows identical (to tol) to the middle row's shifted pattern
  /// become the interior. With `layout`, its head/tail sizes, stencil and offset are used instead
  /// (needed when the two closures meet and no interior row is left); throws if a row disagrees.
  static BandedOperator from_rows(int rows, int cols, const std::vector<SparseRow>& all, double tol = 1e-13,
                                  const BandedOperator* layout = nullptr);
  /// Builds head rows, the interior stencil and a mirrored tail with
  /// a(rows-1-i, cols-1-j) = sign * a(i, j).
  static BandedOperator mirrored(int rows, int cols, const std::vector<SparseRow>& head,
                                 const std::vector<double>& stencil, int offset, double sign);
};

struct Operator1DSet {
  OperatorOrder order = OperatorOrder::Order21;
  int N = 0;
  double dx = 1.0;
  std::vector<double> Hc, Hv;
  BandedOperator Dcv, Dvc, Pvc, Pcv;
  std::vector<double> l, r;  // length N
  int extrapolation_width = 0;
};

/// Minimum cell count so that the boundary closures do not overlap.
int min_cells(OperatorOrder o);

Operator1DSet build_operator_set(OperatorOrder order, int N, double dx);

/// Dvc from the SBP identity Hv Dcv + Dvc^T Hc = e_r r^T - e_l l^T.
BandedOperator derive_dual_operator(const BandedOperator& Dcv, const std::vector<double>& Hc,
                                    const std::vector<double>& Hv, const std::vector<double>& l,
                                    const std::vector<double>& r, const BandedOperator* layout = nullptr);

/// Pcv from Hv Pcv = Pvc^T Hc.
BandedOperator derive_dual_interpolation(const BandedOperator& Pvc, const std::vector<double>& Hc,
                                         const std::vector<double>& Hv, const BandedOperator* layout = nullptr);

/// max |Hv Dcv + Dvc^T Hc - (e_r r^T - e_l l^T)| (dimensionless).
double sbp_residual(const Operator1DSet& s);
/// max |Hc Pvc - (Hv Pcv)^T|.
double interpolation_adjoint_residual(const Operator1DSet& s);

struct OrderPair {
  int interior = 0;
  int boundary = 0;
};

struct AccuracyReport {
  OrderPair Dcv, Dvc, Pvc, Pcv;
  int l = 0;
  int r = 0;
};

/// Largest exact monomial degree per row class. Derivative order = degree, interpolation and
/// extrapolation order = degree + 1.
AccuracyReport verify_accuracy_orders(const Operator1DSet& s, int max_degree = 10);

struct SATOperators {
  Eigen::MatrixXd DSvc, DScv;
};
struct ProjectionOperators {
  Eigen::MatrixXd DPvc, DPcv, A;
};

SATOperators sat_corrected(const Operator1DSet& s);
ProjectionOperators sat_projection_corrected(const Operator1DSet& s);

/// dx^2 L for L = DScv DSvc (SAT) or DPcv DPvc (SATProjection); Pure uses Dcv Dvc.
Eigen::MatrixXd laplace_matrix(const Operator1DSet& s, InterfaceMethod1D method);

/// Sorted eigenvalues of dx^2 L. Throws if any imaginary part exceeds imag_tol.
std::vector<double> laplace_spectrum(const Operator1DSet& s, InterfaceMethod1D method,
                                     double imag_tol = 1e-9);

/// Orthonormal basis of the numerical null space of dx^2 L (singular values <= tol).
Eigen::MatrixXd laplace_null_space(const Operator1DSet& s, InterfaceMethod1D method, double tol = 1e-9);

/// Cosine similarity between (1,0,...,0,-1) and the part of the null space orthogonal to constants.
double endpoint_mode_similarity(const Operator1DSet& s, InterfaceMethod1D method);

struct ObjectiveValues {
  double poly63 = 0;
  double wave63 = 0;
  double interp42 = 0;
  double interp63a = 0;
  double interp63b = 0;
};

/// Evaluates the parameter-selection objectives on the given set (x^v_m = m dx).
ObjectiveValues evaluate_objectives(const Operator1DSet& s);

/// Set used for the objective regression anchors: N = 48, dx = 1/48.
Operator1DSet objective_reference_set(OperatorOrder order);

double spectral_radius_interp(const Operator1DSet& s);

}  // namespace stagsbp
