#include "stagsbp/sbp1d.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace stagsbp {

std::string to_string(OperatorOrder o) {
  switch (o) {
    case OperatorOrder::Order21: return "21";
    case OperatorOrder::Order42: return "42";
    case OperatorOrder::Order63Poly: return "63-poly";
    case OperatorOrder::Order63Wave: return "63-wave";
  }
  throw std::invalid_argument("unknown operator order");
}

OperatorOrder parse_order(const std::string& s) {
  if (s == "21") return OperatorOrder::Order21;
  if (s == "42") return OperatorOrder::Order42;
  if (s == "63-poly") return OperatorOrder::Order63Poly;
  if (s == "63-wave" || s == "63") return OperatorOrder::Order63Wave;
  throw std::invalid_argument("unknown operator order '" + s + "'");
}

int nominal_s(OperatorOrder o) {
  switch (o) {
    case OperatorOrder::Order21: return 1;
    case OperatorOrder::Order42: return 2;
    default: return 3;
  }
}

int min_cells(OperatorOrder o) {
  switch (o) {
    case OperatorOrder::Order21: return 4;
    case OperatorOrder::Order42: return 8;
    default: return 12;
  }
}

// ---------------------------------------------------------------------------
// BandedOperator

SparseRow BandedOperator::row(int i) const {
  if (i < interior_begin()) return head[i];
  if (i >= interior_end()) return tail[i - interior_end()];
  return SparseRow{i + offset, stencil};
}

double BandedOperator::at(int i, int j) const {
  SparseRow rw = row(i);
  int k = j - rw.first;
  if (k < 0 || k >= static_cast<int>(rw.c.size())) return 0.0;
  return rw.c[k];
}

void BandedOperator::scale(double s) {
  for (auto& rw : head)
    for (auto& v : rw.c) v *= s;
  for (auto& rw : tail)
    for (auto& v : rw.c) v *= s;
  for (auto& v : stencil) v *= s;
}

void BandedOperator::apply(const double* x, double* y) const { apply_x(x, y, 1); }

void BandedOperator::apply_x(const double* x, double* y, int nlines, double alpha, bool accumulate) const {
  const int ib = interior_begin(), ie = interior_end();
  const int ns = static_cast<int>(stencil.size());
  for (int ln = 0; ln < nlines; ++ln) {
    const double* xl = x + static_cast<std::ptrdiff_t>(ln) * cols;
    double* yl = y + static_cast<std::ptrdiff_t>(ln) * rows;
    auto edge_row = [&](const SparseRow& rw, int i) {
      double s = 0.0;
      for (std::size_t k = 0; k < rw.c.size(); ++k) s += rw.c[k] * xl[rw.first + k];
      yl[i] = accumulate ? yl[i] + alpha * s : alpha * s;
    };
    for (int i = 0; i < ib; ++i) edge_row(head[i], i);
    for (int i = ie; i < rows; ++i) edge_row(tail[i - ie], i);
    if (ie <= ib) continue;
    const double c0 = alpha * stencil[0];
    const double* xs = xl + offset;
    if (accumulate) {
      for (int i = ib; i < ie; ++i) yl[i] += c0 * xs[i];
    } else {
      for (int i = ib; i < ie; ++i) yl[i] = c0 * xs[i];
    }
    for (int k = 1; k < ns; ++k) {
      const double ck = alpha * stencil[k];
      const double* xk = xs + k;
      for (int i = ib; i < ie; ++i) yl[i] += ck * xk[i];
    }
  }
}

void BandedOperator::apply_y(const double* x, double* y, int width, double alpha, bool accumulate) const {
  auto do_row = [&](int i, int first, const double* c, int n) {
    double* yr = y + static_cast<std::ptrdiff_t>(i) * width;
    const double* xr = x + static_cast<std::ptrdiff_t>(first) * width;
    const double c0 = alpha * c[0];
    if (accumulate) {
      for (int k = 0; k < width; ++k) yr[k] += c0 * xr[k];
    } else {
      for (int k = 0; k < width; ++k) yr[k] = c0 * xr[k];
    }
    for (int m = 1; m < n; ++m) {
      const double cm = alpha * c[m];
      const double* xm = xr + static_cast<std::ptrdiff_t>(m) * width;
      for (int k = 0; k < width; ++k) yr[k] += cm * xm[k];
    }
  };
  const int ib = interior_begin(), ie = interior_end();
  for (int i = 0; i < ib; ++i) do_row(i, head[i].first, head[i].c.data(), static_cast<int>(head[i].c.size()));
  for (int i = ib; i < ie; ++i) do_row(i, i + offset, stencil.data(), static_cast<int>(stencil.size()));
  for (int i = ie; i < rows; ++i) {
    const SparseRow& rw = tail[i - ie];
    do_row(i, rw.first, rw.c.data(), static_cast<int>(rw.c.size()));
  }
}

Eigen::MatrixXd BandedOperator::dense() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    SparseRow rw = row(i);
    for (std::size_t k = 0; k < rw.c.size(); ++k) M(i, rw.first + static_cast<int>(k)) = rw.c[k];
  }
  return M;
}

static SparseRow trim(const SparseRow& rw) {
  int b = 0, e = static_cast<int>(rw.c.size());
  while (b < e && rw.c[b] == 0.0) ++b;
  while (e > b && rw.c[e - 1] == 0.0) --e;
  SparseRow out;
  out.first = rw.first + b;
  out.c.assign(rw.c.begin() + b, rw.c.begin() + e);
  return out;
}

BandedOperator BandedOperator::from_rows(int rows, int cols, const std::vector<SparseRow>& all, double tol,
                                         const BandedOperator* layout) {
  if (static_cast<int>(all.size()) != rows) throw std::invalid_argument("from_rows: row count mismatch");
  std::vector<SparseRow> t(rows);
  for (int i = 0; i < rows; ++i) t[i] = trim(all[i]);
  std::vector<double> stencil;
  int off = 0, ib = 0, ie = 0;
  if (layout) {
    stencil = layout->stencil;
    off = layout->offset;
    ib = static_cast<int>(layout->head.size());
    ie = rows - static_cast<int>(layout->tail.size());
    if (ie < ib) throw std::invalid_argument("from_rows: layout closures overlap");
  } else {
    const int mid = rows / 2;
    stencil = t[mid].c;
    off = t[mid].first - mid;
  }
  double scale = 0.0;
  for (double v : stencil) scale = std::max(scale, std::abs(v));
  auto matches = [&](int i) {
    const SparseRow& rw = t[i];
    if (rw.c.size() != stencil.size() || rw.first - i != off) return false;
    for (std::size_t k = 0; k < rw.c.size(); ++k)
      if (std::abs(rw.c[k] - stencil[k]) > tol * scale) return false;
    return true;
  };
  if (layout) {
    for (int i = ib; i < ie; ++i)
      if (!matches(i)) throw std::invalid_argument("from_rows: row " + std::to_string(i) + " differs from the stencil");
  } else {
    ib = rows / 2;
    ie = ib + 1;
    while (ib > 0 && matches(ib - 1)) --ib;
    while (ie < rows && matches(ie)) ++ie;
  }
  BandedOperator B;
  B.rows = rows;
  B.cols = cols;
  B.offset = off;
  B.stencil = stencil;
  B.head.assign(t.begin(), t.begin() + ib);
  B.tail.assign(t.begin() + ie, t.end());
  return B;
}

BandedOperator BandedOperator::mirrored(int rows, int cols, const std::vector<SparseRow>& head,
                                        const std::vector<double>& stencil, int offset, double sign) {
  BandedOperator B;
  B.rows = rows;
  B.cols = cols;
  B.head = head;
  B.stencil = stencil;
  B.offset = offset;
  const int nh = static_cast<int>(head.size());
  for (int k = nh - 1; k >= 0; --k) {
    const SparseRow& h = head[k];
    SparseRow m;
    const int n = static_cast<int>(h.c.size());
    m.first = cols - 1 - (h.first + n - 1);
    m.c.resize(n);
    for (int q = 0; q < n; ++q) m.c[q] = sign * h.c[n - 1 - q];
    B.tail.push_back(std::move(m));
  }
  if (2 * nh > rows) throw std::invalid_argument("stencil overlap");
  return B;
}

// ---------------------------------------------------------------------------
// Coefficient tables (unit spacing)

namespace {

struct UnitTables {
  std::vector<double> hv, hc;  // boundary quadrature weights, interior = 1
  std::vector<SparseRow> dcv_head;
  std::vector<double> dcv_stencil;
  int dcv_offset = 0;
  std::vector<SparseRow> pvc_head;
  std::vector<double> pvc_stencil;
  int pvc_offset = 0;
  std::vector<double> l;
};

UnitTables tables21() {
  UnitTables t;
  t.hv = {0.5};
  t.hc = {};
  t.dcv_head = {{0, {-1.0, 1.0}}};
  t.dcv_stencil = {-1.0, 1.0};
  t.dcv_offset = -1;
  t.pvc_head = {};
  t.pvc_stencil = {0.5, 0.5};
  t.pvc_offset = 0;
  t.l = {1.5, -0.5};
  return t;
}

UnitTables tables42() {
  UnitTables t;
  t.hv = {7.0 / 18, 9.0 / 8, 1.0, 71.0 / 72};
  t.hc = {13.0 / 12, 7.0 / 8, 25.0 / 24};
  t.dcv_head = {
      {0, {-2.0, 3.0, -1.0}},
      {0, {-1.0, 1.0}},
      {0, {1.0 / 24, -9.0 / 8, 9.0 / 8, -1.0 / 24}},
      {0, {-1.0 / 71, 6.0 / 71, -83.0 / 71, 81.0 / 71, -3.0 / 71}},
  };
  t.dcv_stencil = {1.0 / 24, -9.0 / 8, 9.0 / 8, -1.0 / 24};
  t.dcv_offset = -2;

  const double c13 = 102207746025903.0 / 808013506696916.0;
  const double c14 = -289843969221617.0 / 9696162080362992.0;
  t.pvc_head = {
      {0, {0.5 + c13 + 2 * c14, 0.5 - 2 * c13 - 3 * c14, c13, c14}},
      {0,
       {-8.0 / 63 - 52.0 / 21 * c13 - 104.0 / 21 * c14, 29.0 / 42 + 104.0 / 21 * c13 + 52.0 / 7 * c14,
        -52.0 / 21 * c13 + 0.5, -4.0 / 63 - 52.0 / 21 * c14}},
      {0,
       {26.0 / 25 * c13 + 52.0 / 25 * c14 - 1.0 / 25, -1.0 / 50 - 52.0 / 25 * c13 - 78.0 / 25 * c14,
        3.0 / 5 + 26.0 / 25 * c13, 13.0 / 25 + 26.0 / 25 * c14, -3.0 / 50}},
  };
  t.pvc_stencil = {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
  t.pvc_offset = -1;
  t.l = {15.0 / 8, -10.0 / 8, 3.0 / 8};
  return t;
}

UnitTables tables63(double c34, double c55) {
  UnitTables t;
  t.hv = {95.0 / 288, 317.0 / 240, 23.0 / 30, 793.0 / 720, 157.0 / 160};
  t.hc = {325363.0 / 276480, 144001.0 / 276480, 43195.0 / 27648,
          86857.0 / 138240, 312623.0 / 276480, 271229.0 / 276480};
  t.dcv_head = {
      {0,
       {(-60711983 + 15005904 * c55 + 5183400 * c34) / 21888000.0,
        (101173243 - 30011808 * c55 - 15550200 * c34) / 17510400.0, (-7780959 + 1727800 * c34) / 1459200.0,
        (-5183400 * c34 + 35609465 + 30011808 * c55) / 8755200.0, (-7502952 * c55 - 5209847) / 2188800.0,
        (18712829 + 30011808 * c55 + 1727800 * c34) / 29184000.0}},
      {0,
       {(-53376169 - 30011808 * c55 - 10366800 * c34) / 43822080.0,
        (7190801 + 10003936 * c55 + 5183400 * c34) / 5842944.0, -(2591700 * c34 - 2846555) / 2191104.0,
        (-27181195 - 30011808 * c55 + 5183400 * c34) / 8764416.0, (7223559 + 10003936 * c55) / 2921472.0,
        (-59866697 - 90035424 * c55 - 5183400 * c34) / 87644160.0}},
      {0,
       {(332488 + 625246 * c55 + 215975 * c34) / 353280.0,
        (-6326795 - 10003936 * c55 - 5183400 * c34) / 2260992.0, (1727800 * c34 - 665205) / 565248.0,
        (8940511 + 10003936 * c55 - 1727800 * c34) / 1130496.0, (-3843253 - 5001968 * c55) / 565248.0,
        (21758409 + 30011808 * c55 + 1727800 * c34) / 11304960.0}},
      {0,
       {(-17586239 - 30011808 * c55 - 10366800 * c34) / 36541440.0,
        (14084351 + 30011808 * c55 + 15550200 * c34) / 14616576.0, -(215975 * c34) / 152256.0,
        (5183400 * c34 - 30011808 * c55 - 21697151) / 7308288.0, (25503551 + 30011808 * c55) / 7308288.0,
        (-24437759 - 30011808 * c55 - 1727800 * c34) / 24360960.0}},
      {0,
       {(9606527 + 15005904 * c55 + 5183400 * c34) / 65111040.0,
        (-4598783 - 10003936 * c55 - 5183400 * c34) / 17362944.0, (-4811905 + 5183400 * c34) / 13022208.0,
        (5665537 - 5183400 * c34 + 30011808 * c55) / 26044416.0, -(312623 * c55) / 271296.0,
        (68894207 + 90035424 * c55 + 5183400 * c34) / 260444160.0, 3.0 / 628}},
  };
  t.dcv_stencil = {-3.0 / 640, 25.0 / 384, -75.0 / 64, 75.0 / 64, -25.0 / 384, 3.0 / 640};
  t.dcv_offset = -3;

  const double c42 = -0.3332211159670528, c43 = 0.3310769312612241, c52 = -0.07099703081266314;
  const double c53 = -0.2916164053358880, c62 = 0.05753938634775091, c64 = -0.1230378129758785;
  t.pvc_head = {
      {0,
       {4474753.0 / 7808712 + 312623 * c53 / 650726 + 937869 * c52 / 650726 - 813687 * c64 / 1301452 +
            2441061 * c62 / 1301452 + 86857 * c42 / 325363 + 86857 * c43 / 976089,
        136944.0 / 325363 - 173714 * c42 / 325363 - 1627374 * c62 / 325363 - 937869 * c52 / 325363,
        -848457.0 / 2602904 - 173714 * c43 / 325363 + 2441061 * c64 / 650726 + 2441061 * c62 / 650726 -
            937869 * c53 / 325363,
        2331127.0 / 3904356 + 173714 * c42 / 325363 + 694856 * c43 / 976089 - 1627374 * c64 / 325363 +
            1250492 * c53 / 325363 + 937869 * c52 / 325363,
        -10145.0 / 38278 - 937869 * c53 / 650726 - 937869 * c52 / 650726 + 2441061 * c64 / 1301452 -
            813687 * c62 / 1301452 - 86857 * c42 / 325363 - 86857 * c43 / 325363}},
      {0,
       {-373145.0 / 354464 - 86857 * c43 / 144001 + 4068435 * c64 / 1152008 - 12205305 * c62 / 1152008 -
            1250492 * c53 / 432003 - 260571 * c42 / 144001 - 1250492 * c52 / 144001,
        273888.0 / 144001 + 521142 * c42 / 144001 + 4068435 * c62 / 144001 + 2500984 * c52 / 144001,
        520551.0 / 209456 + 521142 * c43 / 144001 - 12205305 * c64 / 576004 - 12205305 * c62 / 576004 +
            2500984 * c53 / 144001,
        -1142117.0 / 288002 - 521142 * c42 / 144001 - 694856 * c43 / 144001 + 4068435 * c64 / 144001 -
            10003936 * c53 / 432003 - 2500984 * c52 / 144001,
        7516251.0 / 4608032 + 260571 * c43 / 144001 - 12205305 * c64 / 1152008 + 4068435 * c62 / 1152008 +
            1250492 * c53 / 144001 + 260571 * c42 / 144001 + 1250492 * c52 / 144001}},
      {0,
       {930131.0 / 6911200 + 312623 * c53 / 431950 - 271229 * c64 / 345560 + 86857 * c43 / 431950 +
            813687 * c62 / 345560 + 937869 * c52 / 431950 + 260571 * c42 / 431950,
        -22824.0 / 215975 - 260571 * c42 / 215975 - 271229 * c62 / 43195 - 937869 * c52 / 215975,
        -424911.0 / 3455600 - 937869 * c53 / 215975 + 813687 * c64 / 172780 - 260571 * c43 / 215975 +
            813687 * c62 / 172780,
        330902.0 / 215975 + 1250492 * c53 / 215975 + 937869 * c52 / 215975 - 271229 * c64 / 43195 +
            260571 * c42 / 215975 + 347428 * c43 / 215975,
        -615889.0 / 1382240 - 937869 * c53 / 431950 + 813687 * c64 / 345560 - 260571 * c43 / 431950 -
            271229 * c62 / 345560 - 937869 * c52 / 431950 - 260571 * c42 / 431950,
        324.0 / 43195}},
      {0,
       {-17737.0 / 4169136 - (3 * c42 + c43) / 6, c42, c43, 415759.0 / 1042284 - (3 * c42 + 4 * c43) / 3,
        1031359.0 / 1389712 + c42 / 2 + c43 / 2, -13500.0 / 86857, 1620.0 / 86857}},
      {0,
       {44783.0 / 5001968 - (c53 + 3 * c52) / 6, c52, c53, -199149.0 / 1250492 - (4 * c53 + 3 * c52) / 3,
        3541941.0 / 5001968 + c53 / 2 + c52 / 2, 162000.0 / 312623, -27000.0 / 312623, 3240.0 / 312623}},
      {0,
       {-123231.0 / 8679328 + c64 / 8 - 3.0 / 8 * c62, c62, 30309.0 / 619952 - 0.75 * c64 - 0.75 * c62, c64,
        -1229447.0 / 8679328 - 3.0 / 8 * c64 + c62 / 8, 162000.0 / 271229, 162000.0 / 271229,
        -27000.0 / 271229, 3240.0 / 271229}},
  };
  t.pvc_stencil = {3.0 / 256, -25.0 / 256, 150.0 / 256, 150.0 / 256, -25.0 / 256, 3.0 / 256};
  t.pvc_offset = -2;
  t.l = {35.0 / 16, -35.0 / 16, 21.0 / 16, -5.0 / 16};
  return t;
}

UnitTables tables_for(OperatorOrder o) {
  switch (o) {
    case OperatorOrder::Order21: return tables21();
    case OperatorOrder::Order42: return tables42();
    case OperatorOrder::Order63Poly: return tables63(0.6690374220138081, -0.7930390145751754);
    case OperatorOrder::Order63Wave: return tables63(0.467391226104632, -0.723617281756727);
  }
  throw std::invalid_argument("unknown operator order");
}

std::vector<double> mirrored_weights(const std::vector<double>& b, int n) {
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    w[i] = b[i];
    w[n - 1 - i] = b[i];
  }
  return w;
}

}  // namespace

BandedOperator derive_dual_operator(const BandedOperator& Dcv, const std::vector<double>& Hc,
                                    const std::vector<double>& Hv, const std::vector<double>& l,
                                    const std::vector<double>& r, const BandedOperator* layout) {
  const int N = Dcv.cols;
  std::vector<std::vector<double>> dense_rows(N, std::vector<double>(N + 1, 0.0));
  // Dvc(i, j) = (E(j, i) - Hv_j Dcv(j, i)) / Hc_i with E = e_r r^T - e_l l^T
  for (int j = 0; j <= N; ++j) {
    SparseRow rw = Dcv.row(j);
    for (std::size_t k = 0; k < rw.c.size(); ++k) dense_rows[rw.first + k][j] -= Hv[j] * rw.c[k];
  }
  for (int i = 0; i < N; ++i) {
    dense_rows[i][N] += r[i];
    dense_rows[i][0] -= l[i];
  }
  std::vector<SparseRow> rows(N);
  for (int i = 0; i < N; ++i) {
    rows[i].first = 0;
    rows[i].c = dense_rows[i];
    for (double& v : rows[i].c) v /= Hc[i];
  }
  return BandedOperator::from_rows(N, N + 1, rows, 1e-13, layout);
}

BandedOperator derive_dual_interpolation(const BandedOperator& Pvc, const std::vector<double>& Hc,
                                         const std::vector<double>& Hv, const BandedOperator* layout) {
  const int N = Pvc.rows;
  std::vector<std::vector<double>> dense_rows(N + 1, std::vector<double>(N, 0.0));
  for (int i = 0; i < N; ++i) {
    SparseRow rw = Pvc.row(i);
    for (std::size_t k = 0; k < rw.c.size(); ++k) dense_rows[rw.first + k][i] += rw.c[k] * Hc[i];
  }
  std::vector<SparseRow> rows(N + 1);
  for (int j = 0; j <= N; ++j) {
    rows[j].first = 0;
    rows[j].c = dense_rows[j];
    for (double& v : rows[j].c) v /= Hv[j];
  }
  return BandedOperator::from_rows(N + 1, N, rows, 1e-13, layout);
}

Operator1DSet build_operator_set(OperatorOrder order, int N, double dx) {
  if (N < min_cells(order))
    throw std::invalid_argument("stencil overlap: N=" + std::to_string(N) + " < " +
                                std::to_string(min_cells(order)) + " for order " + to_string(order));
  if (!(dx > 0)) throw std::invalid_argument("dx must be positive");
  UnitTables t = tables_for(order);
  Operator1DSet s;
  s.order = order;
  s.N = N;
  s.dx = dx;
  s.Hv = mirrored_weights(t.hv, N + 1);
  s.Hc = mirrored_weights(t.hc, N);
  s.Dcv = BandedOperator::mirrored(N + 1, N, t.dcv_head, t.dcv_stencil, t.dcv_offset, -1.0);
  s.Pvc = BandedOperator::mirrored(N, N + 1, t.pvc_head, t.pvc_stencil, t.pvc_offset, 1.0);
  s.l.assign(N, 0.0);
  s.r.assign(N, 0.0);
  for (std::size_t k = 0; k < t.l.size(); ++k) {
    s.l[k] = t.l[k];
    s.r[N - 1 - k] = t.l[k];
  }
  s.extrapolation_width = static_cast<int>(t.l.size());
  // on short grids the dual closures can meet; take the band layout from a longer grid
  const int n_aux = 3 * min_cells(order);
  if (N < n_aux) {
    const Operator1DSet aux = build_operator_set(order, n_aux, 1.0);
    s.Dvc = derive_dual_operator(s.Dcv, s.Hc, s.Hv, s.l, s.r, &aux.Dvc);
    s.Pcv = derive_dual_interpolation(s.Pvc, s.Hc, s.Hv, &aux.Pcv);
  } else {
    s.Dvc = derive_dual_operator(s.Dcv, s.Hc, s.Hv, s.l, s.r);
    s.Pcv = derive_dual_interpolation(s.Pvc, s.Hc, s.Hv);
  }

  for (double& h : s.Hv) h *= dx;
  for (double& h : s.Hc) h *= dx;
  s.Dcv.scale(1.0 / dx);
  s.Dvc.scale(1.0 / dx);
  return s;
}

double sbp_residual(const Operator1DSet& s) {
  const int N = s.N;
  Eigen::MatrixXd M = Eigen::Map<const Eigen::VectorXd>(s.Hv.data(), N + 1).asDiagonal() * s.Dcv.dense();
  M += s.Dvc.dense().transpose() * Eigen::Map<const Eigen::VectorXd>(s.Hc.data(), N).asDiagonal();
  for (int j = 0; j < N; ++j) {
    M(N, j) -= s.r[j];
    M(0, j) += s.l[j];
  }
  return M.cwiseAbs().maxCoeff();
}

double interpolation_adjoint_residual(const Operator1DSet& s) {
  const int N = s.N;
  Eigen::MatrixXd A = Eigen::Map<const Eigen::VectorXd>(s.Hc.data(), N).asDiagonal() * s.Pvc.dense();
  Eigen::MatrixXd B = Eigen::Map<const Eigen::VectorXd>(s.Hv.data(), N + 1).asDiagonal() * s.Pcv.dense();
  return (A - B.transpose()).cwiseAbs().maxCoeff() / s.dx;
}

// ---------------------------------------------------------------------------
// Accuracy orders

namespace {

// Largest degree k such that every row in [b, e) is exact for all monomials of degree <= k.
// Each row is tested with monomials centred at its own output point, keeping values O(1).
template <class RowFn, class ExactFn>
int exact_degree(int b, int e, RowFn row, const std::vector<double>& xin, const std::vector<double>& xout,
                 ExactFn exact, int max_degree) {
  if (b >= e) return max_degree;
  int best = -1;
  for (int k = 0; k <= max_degree; ++k) {
    for (int i = b; i < e; ++i) {
      SparseRow rw = row(i);
      double s = 0.0, mag = 0.0;
      for (std::size_t q = 0; q < rw.c.size(); ++q) {
        double t = rw.c[q] * std::pow(xin[rw.first + q] - xout[i], k);
        s += t;
        mag += std::abs(t);
      }
      double ex = exact(k);
      double res = std::abs(s - ex);
      if (res > 1e-10 * std::max({mag, std::abs(ex), 1e-300})) return best;
    }
    best = k;
  }
  return best;
}

}  // namespace

AccuracyReport verify_accuracy_orders(const Operator1DSet& s, int max_degree) {
  const int N = s.N;
  std::vector<double> xv(N + 1), xc(N);
  for (int i = 0; i <= N; ++i) xv[i] = i * s.dx;
  for (int i = 0; i < N; ++i) xc[i] = (i + 0.5) * s.dx;
  // d/dx (x - x0)^k at x0
  auto dexact = [&](int k) { return k == 1 ? 1.0 : 0.0; };
  auto iexact = [&](int k) { return k == 0 ? 1.0 : 0.0; };

  auto pair = [&](const BandedOperator& A, const std::vector<double>& xin, const std::vector<double>& xout,
                  bool derivative) {
    auto rowf = [&](int i) { return A.row(i); };
    // the interior stencil alone, placed at output point 0 (covers grids where the closures meet)
    const SparseRow st{0, A.stencil};
    std::vector<double> sin(A.stencil.size()), sout{xout[0]};
    for (std::size_t q = 0; q < sin.size(); ++q) sin[q] = (A.offset + static_cast<int>(q)) * s.dx + xin[0];
    auto stf = [&](int) { return st; };
    OrderPair p;
    int bi, bb1, bb2;
    if (derivative) {
      bi = std::min(exact_degree(A.interior_begin(), A.interior_end(), rowf, xin, xout, dexact, max_degree),
                    exact_degree(0, 1, stf, sin, sout, dexact, max_degree));
      bb1 = exact_degree(0, A.interior_begin(), rowf, xin, xout, dexact, max_degree);
      bb2 = exact_degree(A.interior_end(), A.rows, rowf, xin, xout, dexact, max_degree);
      p.interior = bi;
      p.boundary = std::min(bb1, bb2);
    } else {
      bi = std::min(exact_degree(A.interior_begin(), A.interior_end(), rowf, xin, xout, iexact, max_degree),
                    exact_degree(0, 1, stf, sin, sout, iexact, max_degree));
      bb1 = exact_degree(0, A.interior_begin(), rowf, xin, xout, iexact, max_degree);
      bb2 = exact_degree(A.interior_end(), A.rows, rowf, xin, xout, iexact, max_degree);
      p.interior = bi + 1;
      p.boundary = std::min(bb1, bb2) + 1;
    }
    return p;
  };

  AccuracyReport rep;
  rep.Dcv = pair(s.Dcv, xc, xv, true);
  rep.Dvc = pair(s.Dvc, xv, xc, true);
  rep.Pvc = pair(s.Pvc, xv, xc, false);
  rep.Pcv = pair(s.Pcv, xc, xv, false);
  // Pvc for 2/1 has no boundary rows; its boundary order equals the interior one.
  if (s.Pvc.interior_begin() == 0 && s.Pvc.interior_end() == s.Pvc.rows) rep.Pvc.boundary = rep.Pvc.interior;

  auto extrap = [&](const std::vector<double>& w, double x0) {
    SparseRow rw{0, w};
    std::vector<double> out{x0};
    return exact_degree(0, 1, [&](int) { return rw; }, xc, out, iexact, max_degree) + 1;
  };
  rep.l = extrap(s.l, 0.0);
  rep.r = extrap(s.r, N * s.dx);
  return rep;
}

// ---------------------------------------------------------------------------
// SAT and projection

SATOperators sat_corrected(const Operator1DSet& s) {
  const int N = s.N;
  SATOperators o;
  o.DSvc = s.Dvc.dense();
  o.DScv = s.Dcv.dense();
  for (int i = 0; i < N; ++i) {
    double w = 0.5 * (s.r[i] + s.l[i]) / s.Hc[i];
    o.DSvc(i, N) -= w;
    o.DSvc(i, 0) += w;
  }
  for (int j = 0; j < N; ++j) {
    double d = s.r[j] - s.l[j];
    o.DScv(0, j) -= 0.5 * d / s.Hv[0];
    o.DScv(N, j) -= 0.5 * d / s.Hv[N];
  }
  return o;
}

ProjectionOperators sat_projection_corrected(const Operator1DSet& s) {
  const int N = s.N;
  SATOperators sat = sat_corrected(s);
  ProjectionOperators p;
  p.A = Eigen::MatrixXd::Identity(N + 1, N + 1);
  const double w = s.Hv[0] + s.Hv[N];
  p.A(0, 0) = p.A(N, 0) = s.Hv[0] / w;
  p.A(0, N) = p.A(N, N) = s.Hv[N] / w;
  p.DPcv = p.A * sat.DScv;
  p.DPvc = s.Dvc.dense() * p.A;
  return p;
}

Eigen::MatrixXd laplace_matrix(const Operator1DSet& s, InterfaceMethod1D method) {
  Eigen::MatrixXd L;
  switch (method) {
    case InterfaceMethod1D::Pure: L = s.Dcv.dense() * s.Dvc.dense(); break;
    case InterfaceMethod1D::SAT: {
      SATOperators o = sat_corrected(s);
      L = o.DScv * o.DSvc;
      break;
    }
    case InterfaceMethod1D::SATProjection: {
      ProjectionOperators o = sat_projection_corrected(s);
      L = o.DPcv * o.DPvc;
      break;
    }
  }
  return L * (s.dx * s.dx);
}

std::vector<double> laplace_spectrum(const Operator1DSet& s, InterfaceMethod1D method, double imag_tol) {
  Eigen::MatrixXd L = laplace_matrix(s, method);
  Eigen::EigenSolver<Eigen::MatrixXd> es(L, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("laplace_spectrum: eigensolver did not converge");
  std::vector<double> ev;
  ev.reserve(L.rows());
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > imag_tol)
      throw std::runtime_error("laplace_spectrum: eigenvalue " + std::to_string(i) + " has imaginary part " +
                               std::to_string(z.imag()));
    ev.push_back(z.real());
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

Eigen::MatrixXd laplace_null_space(const Operator1DSet& s, InterfaceMethod1D method, double tol) {
  Eigen::MatrixXd L = laplace_matrix(s, method);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] <= tol) ++k;
  return svd.matrixV().rightCols(k);
}

double endpoint_mode_similarity(const Operator1DSet& s, InterfaceMethod1D method) {
  Eigen::MatrixXd Z = laplace_null_space(s, method);
  const int n = s.N + 1;
  Eigen::VectorXd one = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  d[0] = 1.0;
  d[n - 1] = -1.0;
  d.normalize();
  // project the null space onto the complement of constants
  Eigen::MatrixXd W = Z - one * (one.transpose() * Z);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU);
  double best = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] < 1e-6) continue;
    best = std::max(best, std::abs(svd.matrixU().col(i).dot(d)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Objectives

ObjectiveValues evaluate_objectives(const Operator1DSet& s) {
  const int N = s.N;
  const double dx = s.dx;
  Eigen::VectorXd xv(N + 1), xc(N);
  for (int i = 0; i <= N; ++i) xv[i] = i * dx;
  for (int i = 0; i < N; ++i) xc[i] = (i + 0.5) * dx;
  Eigen::MatrixXd Dcv = s.Dcv.dense(), Dvc = s.Dvc.dense(), Pcv = s.Pcv.dense(), Pvc = s.Pvc.dense();

  auto pw = [](const Eigen::VectorXd& x, int k) { return x.array().pow(k).matrix(); };
  ObjectiveValues o;
  Eigen::VectorXd e1 = Dcv * pw(xc, 4) - 4.0 * pw(xv, 3);
  Eigen::VectorXd e2 = Dvc * pw(xv, 4) - 4.0 * pw(xc, 3);
  o.poly63 = e1.squaredNorm() + e2.squaredNorm();

  Eigen::MatrixXcd L = (Dcv * Dvc).cast<std::complex<double>>();
  for (int k : {4, 8}) {
    const double kappa = 2.0 * std::numbers::pi / (k * dx);
    Eigen::VectorXcd t(N + 1);
    for (int m = 0; m <= N; ++m) t[m] = std::exp(std::complex<double>(0.0, kappa * xv[m]));
    Eigen::VectorXcd err = (L * t) / (kappa * kappa) + t;
    o.wave63 += err.squaredNorm();
  }

  auto interp = [&](int k) {
    Eigen::VectorXd a = Pcv * pw(xc, k) - pw(xv, k);
    Eigen::VectorXd b = Pvc * pw(xv, k) - pw(xc, k);
    return a.squaredNorm() + b.squaredNorm();
  };
  o.interp42 = interp(2);
  o.interp63a = interp(3);
  o.interp63b = interp(4);
  return o;
}

Operator1DSet objective_reference_set(OperatorOrder order) { return build_operator_set(order, 48, 1.0 / 48); }

double spectral_radius_interp(const Operator1DSet& s) {
  Eigen::MatrixXd M = s.Pcv.dense() * s.Pvc.dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
  return rho;
}

}  // namespace stagsbp
