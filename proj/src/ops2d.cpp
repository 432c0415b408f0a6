#include "stagsbp/ops2d.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace stagsbp {

std::string to_string(CoriolisVariant v) {
  switch (v) {
    case CoriolisVariant::Basic: return "basic";
    case CoriolisVariant::FullContinuous: return "full";
    case CoriolisVariant::SimplifiedContinuous: return "simplified";
    case CoriolisVariant::Main: return "main";
    case CoriolisVariant::MainDiscontinuous: return "main-discontinuous";
  }
  throw std::invalid_argument("unknown Coriolis variant");
}

CoriolisVariant parse_coriolis_variant(const std::string& s) {
  if (s == "basic") return CoriolisVariant::Basic;
  if (s == "full") return CoriolisVariant::FullContinuous;
  if (s == "simplified") return CoriolisVariant::SimplifiedContinuous;
  if (s == "main") return CoriolisVariant::Main;
  if (s == "main-discontinuous") return CoriolisVariant::MainDiscontinuous;
  throw std::invalid_argument("unknown Coriolis variant '" + s + "'");
}

namespace {

std::atomic<int> g_threads{-1};

int env_threads() {
  const char* s = std::getenv("SBP_THREADS");
  int n = s ? std::atoi(s) : 0;
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

}  // namespace

int worker_threads() {
  int n = g_threads.load();
  if (n < 0) {
    n = env_threads();
    g_threads.store(n);
  }
  return n;
}

void set_worker_threads(int n) { g_threads.store(n <= 0 ? env_threads() : n); }

template <class F>
void Operators2D::per_block(F&& f) const {
  const int nb = g_->nblocks;
  const int nt = std::min(worker_threads(), nb);
  if (nt <= 1) {
    for (int p = 0; p < nb; ++p) f(p);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (int p = t; p < nb; p += nt) f(p);
    });
  for (auto& th : pool) th.join();
}

Operators2D::Operators2D(const Grid2D& grid, OperatorOrder order)
    : g_(&grid), set_(build_operator_set(order, grid.N, grid.dx)) {
  const Grid2D& g = grid;
  const int N = g.N;
  Hh_.resize(g.n_h());
  H1_.resize(g.n_v());
  H2_.resize(g.n_v());
  for (int p = 0; p < g.nblocks; ++p) {
    for (int j = 0; j <= N; ++j)
      for (int i = 0; i <= N; ++i) Hh_[g.idx_h(p, i, j)] = set_.Hv[i] * set_.Hv[j];
    for (int j = 0; j <= N; ++j)
      for (int i = 0; i < N; ++i) H1_[g.idx_1(p, i, j)] = set_.Hc[i] * set_.Hv[j];
    for (int j = 0; j < N; ++j)
      for (int i = 0; i <= N; ++i) H2_[g.idx_2(p, i, j)] = set_.Hv[i] * set_.Hc[j];
  }
  JQ12_h_.resize(g.n_h());
  invJ_h_.resize(g.n_h());
  invHh_.resize(g.n_h());
  for (int m = 0; m < g.n_h(); ++m) {
    JQ12_h_[m] = g.J_h[m] * g.Q12_h[m];
    invJ_h_[m] = 1.0 / g.J_h[m];
    invHh_[m] = 1.0 / Hh_[m];
  }
  invJ_1_.resize(g.n_v());
  invJ_2_.resize(g.n_v());
  for (int m = 0; m < g.n_v(); ++m) {
    invJ_1_[m] = 1.0 / g.J_1[m];
    invJ_2_[m] = 1.0 / g.J_2[m];
  }
  if (g.pairing) {
    const auto& ip = *g.pairing;
    group_w_.resize(ip.group_members.size());
    for (int gi = 0; gi < ip.group_count(); ++gi) {
      double s = 0;
      for (int k = ip.group_offsets[gi]; k < ip.group_offsets[gi + 1]; ++k) {
        const int m = ip.group_members[k];
        group_w_[k] = g.J_h[m] * Hh_[m];
        s += group_w_[k];
      }
      for (int k = ip.group_offsets[gi]; k < ip.group_offsets[gi + 1]; ++k) group_w_[k] /= s;
    }
  }
  lw_ = set_.extrapolation_width;
}

Workspace Operators2D::make_workspace() const {
  Workspace w;
  for (auto* v : {&w.h0, &w.h1, &w.h2, &w.h3}) v->assign(n_h(), 0.0);
  for (auto* v : {&w.v0, &w.v1, &w.v2, &w.v3}) v->assign(n_v(), 0.0);
  return w;
}

// ---------------------------------------------------------------------------
// Kronecker primitives

#define STAGSBP_SIZES                                \
  const int N = g_->N;                               \
  const std::ptrdiff_t sh = (N + 1) * (N + 1);       \
  const std::ptrdiff_t sv = static_cast<std::ptrdiff_t>(N) * (N + 1)

void Operators2D::D_h1(const double* h, double* v1, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Dvc.apply_x(h + p * sh, v1 + p * sv, N + 1, alpha, acc); });
}
void Operators2D::D_h2(const double* h, double* v2, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Dvc.apply_y(h + p * sh, v2 + p * sv, N + 1, alpha, acc); });
}
void Operators2D::D_1h(const double* v1, double* h, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Dcv.apply_x(v1 + p * sv, h + p * sh, N + 1, alpha, acc); });
}
void Operators2D::D_2h(const double* v2, double* h, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Dcv.apply_y(v2 + p * sv, h + p * sh, N + 1, alpha, acc); });
}
void Operators2D::P_h1(const double* h, double* v1, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Pvc.apply_x(h + p * sh, v1 + p * sv, N + 1, alpha, acc); });
}
void Operators2D::P_h2(const double* h, double* v2, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Pvc.apply_y(h + p * sh, v2 + p * sv, N + 1, alpha, acc); });
}
void Operators2D::P_1h(const double* v1, double* h, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Pcv.apply_x(v1 + p * sv, h + p * sh, N + 1, alpha, acc); });
}
void Operators2D::P_2h(const double* v2, double* h, double alpha, bool acc) const {
  STAGSBP_SIZES;
  per_block([&](int p) { set_.Pcv.apply_y(v2 + p * sv, h + p * sh, N + 1, alpha, acc); });
}

// ---------------------------------------------------------------------------
// Interfaces

void Operators2D::boundary_flux(const double* u1, const double* u2, double* slots) const {
  const Grid2D& g = *g_;
  const int N = g.N;
  const std::vector<double>& l = set_.l;
  for (int p = 0; p < g.nblocks; ++p)
    for (int k = 0; k <= N; ++k) {
      double w = 0, e = 0, s = 0, n = 0;
      for (int q = 0; q < lw_; ++q) {
        w += l[q] * u1[g.idx_1(p, q, k)];
        e += l[q] * u1[g.idx_1(p, N - 1 - q, k)];
        s += l[q] * u2[g.idx_2(p, k, q)];
        n += l[q] * u2[g.idx_2(p, k, N - 1 - q)];
      }
      slots[(p * 4 + West) * (N + 1) + k] = -w;
      slots[(p * 4 + East) * (N + 1) + k] = e;
      slots[(p * 4 + South) * (N + 1) + k] = -s;
      slots[(p * 4 + North) * (N + 1) + k] = n;
    }
}

void Operators2D::add_sat(const double* u1, const double* u2, double* h) const {
  if (!g_->pairing) throw std::logic_error("add_sat: grid has no interface pairing");
  const auto& ip = *g_->pairing;
  std::vector<double> R(ip.slot_h.size());
  boundary_flux(u1, u2, R.data());
  // the transverse weight cancels, leaving the normal-direction boundary weight
  const double w = 1.0 / set_.Hv[0];
  for (std::size_t s = 0; s < R.size(); ++s) h[ip.slot_h[s]] -= 0.5 * w * (R[s] + R[ip.slot_partner[s]]);
}

void Operators2D::apply_Ah(const double* in, double* out) const {
  if (in != out) std::copy(in, in + n_h(), out);
  if (!g_->pairing) return;
  const auto& ip = *g_->pairing;
  for (int gi = 0; gi < ip.group_count(); ++gi) {
    const int b = ip.group_offsets[gi], e = ip.group_offsets[gi + 1];
    double avg = 0;
    for (int k = b; k < e; ++k) avg += group_w_[k] * in[ip.group_members[k]];
    for (int k = b; k < e; ++k) out[ip.group_members[k]] = avg;
  }
}

void Operators2D::apply_V(double* a, double* b) const {
  if (!g_->pairing) return;
  const auto& ip = *g_->pairing;
  const Grid2D& g = *g_;
  for (int gi = 0; gi < ip.group_count(); ++gi) {
    const int bg = ip.group_offsets[gi], e = ip.group_offsets[gi + 1];
    Vec3 c{0, 0, 0};
    for (int k = bg; k < e; ++k) {
      const int m = ip.group_members[k];
      for (int d = 0; d < 3; ++d) c[d] += group_w_[k] * (a[m] * g.d1_h[m][d] + b[m] * g.d2_h[m][d]);
    }
    for (int k = bg; k < e; ++k) {
      const int m = ip.group_members[k];
      a[m] = c[0] * g.e1_h[m][0] + c[1] * g.e1_h[m][1] + c[2] * g.e1_h[m][2];
      b[m] = c[0] * g.e2_h[m][0] + c[1] * g.e2_h[m][1] + c[2] * g.e2_h[m][2];
    }
  }
}

void Operators2D::apply_Vt(double* a, double* b) const {
  if (!g_->pairing) return;
  const auto& ip = *g_->pairing;
  const Grid2D& g = *g_;
  for (int gi = 0; gi < ip.group_count(); ++gi) {
    const int bg = ip.group_offsets[gi], e = ip.group_offsets[gi + 1];
    Vec3 c{0, 0, 0};
    for (int k = bg; k < e; ++k) {
      const int m = ip.group_members[k];
      for (int d = 0; d < 3; ++d) c[d] += group_w_[k] * (a[m] * g.e1_h[m][d] + b[m] * g.e2_h[m][d]);
    }
    for (int k = bg; k < e; ++k) {
      const int m = ip.group_members[k];
      a[m] = c[0] * g.d1_h[m][0] + c[1] * g.d1_h[m][1] + c[2] * g.d1_h[m][2];
      b[m] = c[0] * g.d2_h[m][0] + c[1] * g.d2_h[m][1] + c[2] * g.d2_h[m][2];
    }
  }
}

// ---------------------------------------------------------------------------
// Composite operators

void Operators2D::grad(const double* h, double* g1, double* g2, Workspace& ws) const {
  apply_Ah(h, ws.h0.data());
  D_h1(ws.h0.data(), g1);
  D_h2(ws.h0.data(), g2);
}

void Operators2D::div(const double* c1, const double* c2, double* out, Workspace& ws) const {
  const int nv = n_v(), nh = n_h();
  double* u1 = ws.v0.data();
  double* u2 = ws.v1.data();
  const double* J1 = g_->J_1.data();
  const double* J2 = g_->J_2.data();
  for (int m = 0; m < nv; ++m) {
    u1[m] = J1[m] * c1[m];
    u2[m] = J2[m] * c2[m];
  }
  double* t = ws.h1.data();
  D_1h(u1, t);
  D_2h(u2, t, 1.0, true);
  add_sat(u1, u2, t);
  for (int m = 0; m < nh; ++m) t[m] *= invJ_h_[m];
  apply_Ah(t, out);
}

void Operators2D::co2contra(const double* v1, const double* v2, double* c1, double* c2, Workspace& ws) const {
  const int nv = n_v(), nh = n_h();
  double* a = ws.h1.data();
  double* b = ws.h2.data();
  P_2h(v2, a);
  P_1h(v1, b);
  for (int m = 0; m < nh; ++m) {
    a[m] *= JQ12_h_[m];
    b[m] *= JQ12_h_[m];
  }
  double* t1 = ws.v2.data();
  double* t2 = ws.v3.data();
  P_h1(a, t1);
  P_h2(b, t2);
  const double* Q11 = g_->Q11_1.data();
  const double* Q22 = g_->Q22_2.data();
  for (int m = 0; m < nv; ++m) {
    const double x1 = Q11[m] * v1[m] + invJ_1_[m] * t1[m];
    const double x2 = Q22[m] * v2[m] + invJ_2_[m] * t2[m];
    c1[m] = x1;
    c2[m] = x2;
  }
}

void Operators2D::coriolis(CoriolisVariant var, const double* f, const double* c1, const double* c2, double* o1,
                           double* o2, Workspace& ws) const {
  const int nv = n_v(), nh = n_h();
  if ((var == CoriolisVariant::SimplifiedContinuous || var == CoriolisVariant::Main) && !g_->j_continuous)
    throw std::logic_error("coriolis: variant " + to_string(var) + " requires an edge-continuous Jacobian");
  double* a = ws.h1.data();
  double* b = ws.h2.data();
  const double* Jh = g_->J_h.data();

  if (var == CoriolisVariant::Main || var == CoriolisVariant::MainDiscontinuous) {
    P_1h(c1, a);
    P_2h(c2, b);
    for (int m = 0; m < nh; ++m) {
      const double fj = f[m] * Jh[m] * Jh[m];
      const double x = a[m];
      a[m] = fj * b[m];
      b[m] = -fj * x;
    }
    if (var == CoriolisVariant::Main) apply_V(a, b);
    P_h1(a, o1);
    P_h2(b, o2);
    for (int m = 0; m < nv; ++m) {
      o1[m] *= invJ_1_[m];
      o2[m] *= invJ_2_[m];
    }
    return;
  }

  double* u1 = ws.v0.data();
  double* u2 = ws.v1.data();
  for (int m = 0; m < nv; ++m) {
    u1[m] = g_->J_1[m] * c1[m];
    u2[m] = g_->J_2[m] * c2[m];
  }
  P_1h(u1, a);
  P_2h(u2, b);

  if (var == CoriolisVariant::FullContinuous) {
    // 1/2 (V J C + J C V~) J^{-1} applied to (a, b)
    double* a2 = ws.h3.data();
    double* b2 = ws.h0.data();
    for (int m = 0; m < nh; ++m) {
      a[m] *= invJ_h_[m];
      b[m] *= invJ_h_[m];
      a2[m] = a[m];
      b2[m] = b[m];
    }
    // first term: V J C
    for (int m = 0; m < nh; ++m) {
      const double fj = f[m] * Jh[m];
      const double x = a[m];
      a[m] = fj * b[m];
      b[m] = -fj * x;
    }
    apply_V(a, b);
    // second term: J C V~
    apply_Vt(a2, b2);
    for (int m = 0; m < nh; ++m) {
      const double fj = f[m] * Jh[m];
      a[m] = 0.5 * (a[m] + fj * b2[m]);
      b[m] = 0.5 * (b[m] - fj * a2[m]);
    }
  } else {
    for (int m = 0; m < nh; ++m) {
      const double x = a[m];
      a[m] = f[m] * b[m];
      b[m] = -f[m] * x;
    }
    if (var == CoriolisVariant::SimplifiedContinuous) apply_V(a, b);
  }
  P_h1(a, o1);
  P_h2(b, o2);
}

void Operators2D::curl(const double* v1, const double* v2, double* z) const {
  const int N = g_->N;
  const std::ptrdiff_t sv = static_cast<std::ptrdiff_t>(N) * (N + 1), sz = static_cast<std::ptrdiff_t>(N) * N;
  per_block([&](int p) {
    set_.Dvc.apply_y(v1 + p * sv, z + p * sz, N, -1.0, false);
    set_.Dvc.apply_x(v2 + p * sv, z + p * sz, N, 1.0, true);
  });
  for (int m = 0; m < n_z(); ++m) z[m] /= g_->J_z[m];
}

double Operators2D::dot_h(const double* a, const double* b) const {
  double s = 0;
  const double* Jh = g_->J_h.data();
  for (int m = 0; m < n_h(); ++m) s += Hh_[m] * Jh[m] * a[m] * b[m];
  return s;
}

double Operators2D::dot_v_contra(const double* w1, const double* w2, const double* c1, const double* c2) const {
  double s = 0;
  const double* J1 = g_->J_1.data();
  const double* J2 = g_->J_2.data();
  for (int m = 0; m < n_v(); ++m) s += H1_[m] * J1[m] * w1[m] * c1[m] + H2_[m] * J2[m] * w2[m] * c2[m];
  return s;
}

double Operators2D::dot_v(const double* w1, const double* w2, const double* v1, const double* v2,
                          Workspace& ws) const {
  std::vector<double> c1(n_v()), c2(n_v());
  co2contra(v1, v2, c1.data(), c2.data(), ws);
  return dot_v_contra(w1, w2, c1.data(), c2.data());
}

double Operators2D::tangential_jump(const double* v1, const double* v2) const {
  if (!g_->pairing) return 0.0;
  double worst = 0;
  for (const TangentPair& tp : g_->pairing->tangent_pairs) {
    const double a = (tp.comp_a == 1 ? v1 : v2)[tp.idx_a];
    const double b = (tp.comp_b == 1 ? v1 : v2)[tp.idx_b];
    worst = std::max(worst, std::abs(a - tp.sign * b));
  }
  return worst;
}

double Operators2D::pd_criterion(double tol, int max_iter) const {
  const Grid2D& g = *g_;
  const int N = g.N;
  const std::ptrdiff_t sh = (N + 1) * (N + 1), sv = static_cast<std::ptrdiff_t>(N) * (N + 1);
  std::vector<double> rho(g.nblocks, 0.0);
  std::vector<int> failed(g.nblocks, 0);
  per_block([&](int p) {
    const double* JQ = JQ12_h_.data() + p * sh;
    const double* H1 = H1_.data() + p * sv;
    const double* H2 = H2_.data() + p * sv;
    const double* J1 = g.J_1.data() + p * sv;
    const double* J2 = g.J_2.data() + p * sv;
    const double* Q11 = g.Q11_1.data() + p * sv;
    const double* Q22 = g.Q22_2.data() + p * sv;
    std::vector<double> isw22(sv), x(sv), y(sv), hb(sh), z(sv);
    for (std::ptrdiff_t m = 0; m < sv; ++m) isw22[m] = 1.0 / std::sqrt(H2[m] * J2[m] * Q22[m]);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (std::ptrdiff_t m = 0; m < sv; ++m) y[m] = in[m] * isw22[m];
      set_.Pcv.apply_y(y.data(), hb.data(), N + 1);  // P_2h
      for (std::ptrdiff_t m = 0; m < sh; ++m) hb[m] *= JQ[m];
      set_.Pvc.apply_x(hb.data(), z.data(), N + 1);  // P_h1
      for (std::ptrdiff_t m = 0; m < sv; ++m) z[m] *= H1[m] / (H1[m] * J1[m] * Q11[m]);
      set_.Pcv.apply_x(z.data(), hb.data(), N + 1);  // P_1h
      for (std::ptrdiff_t m = 0; m < sh; ++m) hb[m] *= JQ[m];
      set_.Pvc.apply_y(hb.data(), out.data(), N + 1);  // P_h2
      for (std::ptrdiff_t m = 0; m < sv; ++m) out[m] *= H2[m] * isw22[m];
    };
    // Lanczos with full reorthogonalisation; the operator is symmetric positive semidefinite
    const int kmax = static_cast<int>(std::min<std::ptrdiff_t>({max_iter, sv, 1000}));
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta, w(sv);
    std::mt19937_64 rng(12345 + p);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    for (auto& v : x) v = U(rng);
    auto normalise = [&](std::vector<double>& v) {
      double n = 0;
      for (double e : v) n += e * e;
      n = std::sqrt(n);
      for (double& e : v) e /= n;
      return n;
    };
    normalise(x);
    for (int k = 0; k < kmax; ++k) {
      basis.push_back(x);
      apply(basis.back(), w);
      double a = 0;
      for (std::ptrdiff_t m = 0; m < sv; ++m) a += basis.back()[m] * w[m];
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) {
          double c = 0;
          for (std::ptrdiff_t m = 0; m < sv; ++m) c += q[m] * w[m];
          for (std::ptrdiff_t m = 0; m < sv; ++m) w[m] -= c * q[m];
        }
      double b = 0;
      for (double e : w) b += e * e;
      b = std::sqrt(b);
      const int n = k + 1;
      const Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), n);
      const Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), n - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub);
      const double theta = es.eigenvalues()[n - 1];
      const double resid = b * std::abs(es.eigenvectors()(n - 1, n - 1));
      if (theta <= 0.0 && k > 0) {
        rho[p] = 0.0;
        return;
      }
      if (resid <= tol * std::abs(theta) || b <= 1e-14 * std::abs(theta) || n == sv) {
        rho[p] = theta;
        return;
      }
      beta.push_back(b);
      for (std::ptrdiff_t m = 0; m < sv; ++m) x[m] = w[m] / b;
    }
    failed[p] = 1;
  });
  for (int p = 0; p < g.nblocks; ++p)
    if (failed[p])
      throw std::runtime_error("pd_criterion: Lanczos did not converge on block " + std::to_string(p));
  return *std::max_element(rho.begin(), rho.end());
}

// ---------------------------------------------------------------------------
// Typed API

namespace {
void require(Basis have, Basis want, const char* op) {
  if (have != want) throw std::invalid_argument(std::string(op) + ": basis tag mismatch");
}
}  // namespace

ScalarFieldH Operators2D::apply_Ah(const ScalarFieldH& h) const {
  ScalarFieldH out;
  out.v.resize(n_h());
  apply_Ah(h.v.data(), out.v.data());
  return out;
}

VectorFieldV Operators2D::grad(const ScalarFieldH& h) const {
  Workspace ws = make_workspace();
  VectorFieldV v;
  v.v1.resize(n_v());
  v.v2.resize(n_v());
  v.basis = Basis::Covariant;
  grad(h.v.data(), v.v1.data(), v.v2.data(), ws);
  return v;
}

ScalarFieldH Operators2D::div(const VectorFieldV& v) const {
  require(v.basis, Basis::Contravariant, "div");
  Workspace ws = make_workspace();
  ScalarFieldH out;
  out.v.resize(n_h());
  div(v.v1.data(), v.v2.data(), out.v.data(), ws);
  return out;
}

VectorFieldV Operators2D::co2contra(const VectorFieldV& v) const {
  require(v.basis, Basis::Covariant, "co2contra");
  Workspace ws = make_workspace();
  VectorFieldV c;
  c.v1.resize(n_v());
  c.v2.resize(n_v());
  c.basis = Basis::Contravariant;
  co2contra(v.v1.data(), v.v2.data(), c.v1.data(), c.v2.data(), ws);
  return c;
}

VectorFieldV Operators2D::coriolis(const VectorFieldV& v, CoriolisVariant var, const std::vector<double>& f) const {
  require(v.basis, Basis::Contravariant, "coriolis");
  Workspace ws = make_workspace();
  VectorFieldV o;
  o.v1.resize(n_v());
  o.v2.resize(n_v());
  o.basis = Basis::Covariant;
  coriolis(var, f.data(), v.v1.data(), v.v2.data(), o.v1.data(), o.v2.data(), ws);
  return o;
}

std::vector<double> Operators2D::curl(const VectorFieldV& v) const {
  require(v.basis, Basis::Covariant, "curl");
  std::vector<double> z(n_z());
  curl(v.v1.data(), v.v2.data(), z.data());
  return z;
}

double Operators2D::quadrature_dot(const VectorFieldV& w, const VectorFieldV& v) const {
  require(w.basis, Basis::Covariant, "quadrature_dot");
  require(v.basis, Basis::Covariant, "quadrature_dot");
  Workspace ws = make_workspace();
  return dot_v(w.v1.data(), w.v2.data(), v.v1.data(), v.v2.data(), ws);
}

double Operators2D::quadrature_h(const ScalarFieldH& a, const ScalarFieldH& b) const {
  return dot_h(a.v.data(), b.v.data());
}

Eigen::SparseMatrix<double> assemble_operator(int n_in, int n_out,
                                              const std::function<void(const double*, double*)>& op,
                                              double drop_tol) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> e(n_in, 0.0), y(n_out, 0.0);
  for (int j = 0; j < n_in; ++j) {
    e[j] = 1.0;
    op(e.data(), y.data());
    for (int i = 0; i < n_out; ++i)
      if (std::abs(y[i]) > drop_tol && y[i] != 0.0) trip.emplace_back(i, j, y[i]);
    e[j] = 0.0;
  }
  Eigen::SparseMatrix<double> M(n_out, n_in);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

}  // namespace stagsbp
