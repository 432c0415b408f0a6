#include "stagsbp/swe_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stagsbp {

void ModelConfig::validate() const {
  if (!(dt > 0)) throw std::invalid_argument("ModelConfig: dt must be positive");
  if (!(H > 0)) throw std::invalid_argument("ModelConfig: H must be positive");
  if (!(g > 0)) throw std::invalid_argument("ModelConfig: g must be positive");
  if (!(a > 0)) throw std::invalid_argument("ModelConfig: a must be positive");
}

std::vector<double> coriolis_at_h(const CoriolisSpec& c, const Grid2D& g) {
  std::vector<double> f(g.n_h(), 0.0);
  switch (c.kind) {
    case CoriolisSpec::Kind::Zero: break;
    case CoriolisSpec::Kind::Constant: std::fill(f.begin(), f.end(), c.value); break;
    case CoriolisSpec::Kind::Spherical: {
      const double pn = std::sqrt(c.pole[0] * c.pole[0] + c.pole[1] * c.pole[1] + c.pole[2] * c.pole[2]);
      for (int m = 0; m < g.n_h(); ++m) {
        const Vec3& x = g.pos_h[m];
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        f[m] = 2.0 * c.value * (x[0] * c.pole[0] + x[1] * c.pole[1] + x[2] * c.pole[2]) / (r * pn);
      }
      break;
    }
  }
  return f;
}

ShallowWaterModel::ShallowWaterModel(const ModelConfig& cfg, const Grid2D& grid, const Operators2D& ops)
    : cfg_(cfg), g_(&grid), ops_(&ops) {
  cfg_.validate();
  f_ = coriolis_at_h(cfg_.coriolis, grid);
  has_coriolis_ = std::any_of(f_.begin(), f_.end(), [](double x) { return x != 0.0; });
  if (has_coriolis_ &&
      (cfg_.coriolis_variant == CoriolisVariant::SimplifiedContinuous || cfg_.coriolis_variant == CoriolisVariant::Main) &&
      !grid.j_continuous)
    throw std::invalid_argument("ShallowWaterModel: Coriolis variant requires an edge-continuous Jacobian");
  ws_ = ops.make_workspace();
  c1_.resize(ops.n_v());
  c2_.resize(ops.n_v());
  t1_.resize(ops.n_v());
  t2_.resize(ops.n_v());
  k_ = zero_state();
  acc_ = zero_state();
  tmp_ = zero_state();
}

ModelState ShallowWaterModel::zero_state() const {
  ModelState s;
  s.h.assign(ops_->n_h(), 0.0);
  s.v1.assign(ops_->n_v(), 0.0);
  s.v2.assign(ops_->n_v(), 0.0);
  return s;
}

void ShallowWaterModel::rhs(const ModelState& s, std::vector<double>& dh, std::vector<double>& dv1,
                            std::vector<double>& dv2) {
  const Operators2D& op = *ops_;
  const int nv = op.n_v(), nh = op.n_h();
  dh.resize(nh);
  dv1.resize(nv);
  dv2.resize(nv);
  op.co2contra(s.v1.data(), s.v2.data(), c1_.data(), c2_.data(), ws_);
  op.grad(s.h.data(), t1_.data(), t2_.data(), ws_);
  if (has_coriolis_) {
    op.coriolis(cfg_.coriolis_variant, f_.data(), c1_.data(), c2_.data(), dv1.data(), dv2.data(), ws_);
    for (int m = 0; m < nv; ++m) {
      dv1[m] -= cfg_.g * t1_[m];
      dv2[m] -= cfg_.g * t2_[m];
    }
  } else {
    for (int m = 0; m < nv; ++m) {
      dv1[m] = -cfg_.g * t1_[m];
      dv2[m] = -cfg_.g * t2_[m];
    }
  }
  op.div(c1_.data(), c2_.data(), dh.data(), ws_);
  for (int m = 0; m < nh; ++m) dh[m] *= -cfg_.H;
}

namespace {

// y = x + a k
void axpy_state(const ModelState& x, double a, const ModelState& k, ModelState& y) {
  for (std::size_t m = 0; m < x.h.size(); ++m) y.h[m] = x.h[m] + a * k.h[m];
  for (std::size_t m = 0; m < x.v1.size(); ++m) {
    y.v1[m] = x.v1[m] + a * k.v1[m];
    y.v2[m] = x.v2[m] + a * k.v2[m];
  }
}

void acc_state(ModelState& y, double a, const ModelState& k) {
  for (std::size_t m = 0; m < y.h.size(); ++m) y.h[m] += a * k.h[m];
  for (std::size_t m = 0; m < y.v1.size(); ++m) {
    y.v1[m] += a * k.v1[m];
    y.v2[m] += a * k.v2[m];
  }
}

}  // namespace

void ShallowWaterModel::rk4_step(ModelState& s, long step_index) {
  const double dt = cfg_.dt;
  rhs(s, k_.h, k_.v1, k_.v2);
  axpy_state(s, dt / 6, k_, acc_);
  axpy_state(s, dt / 2, k_, tmp_);
  rhs(tmp_, k_.h, k_.v1, k_.v2);
  acc_state(acc_, dt / 3, k_);
  axpy_state(s, dt / 2, k_, tmp_);
  rhs(tmp_, k_.h, k_.v1, k_.v2);
  acc_state(acc_, dt / 3, k_);
  axpy_state(s, dt, k_, tmp_);
  rhs(tmp_, k_.h, k_.v1, k_.v2);
  acc_state(acc_, dt / 6, k_);

  double sum = 0;
  for (double x : acc_.h) sum += x;
  for (double x : acc_.v1) sum += x;
  for (double x : acc_.v2) sum += x;
  if (!std::isfinite(sum)) {
    auto first_bad = [](const std::vector<double>& v) {
      for (std::size_t m = 0; m < v.size(); ++m)
        if (!std::isfinite(v[m])) return static_cast<long>(m);
      return -1L;
    };
    long ih = first_bad(acc_.h), i1 = first_bad(acc_.v1), i2 = first_bad(acc_.v2);
    std::string where = ih >= 0 ? "h[" + std::to_string(ih) + "]"
                        : i1 >= 0 ? "v1[" + std::to_string(i1) + "]"
                                  : "v2[" + std::to_string(i2) + "]";
    throw NumericalFailure("swe_model/rk4_step: non-finite value at step " + std::to_string(step_index) +
                           ", first offending index " + where);
  }
  s.h.swap(acc_.h);
  s.v1.swap(acc_.v1);
  s.v2.swap(acc_.v2);
  s.t += dt;
}

Diagnostics ShallowWaterModel::diagnostics(const ModelState& s) {
  const Operators2D& op = *ops_;
  Diagnostics d;
  d.t = s.t;
  std::vector<double> one(op.n_h(), 1.0);
  d.mass = op.dot_h(one.data(), s.h.data());
  const double kin = op.dot_v(s.v1.data(), s.v2.data(), s.v1.data(), s.v2.data(), ws_);
  d.energy = 0.5 * cfg_.H * kin + 0.5 * cfg_.g * op.dot_h(s.h.data(), s.h.data());
  d.tangential_jump = op.tangential_jump(s.v1.data(), s.v2.data());
  double vm = 0;
  for (double x : s.v1) vm = std::max(vm, std::abs(x));
  for (double x : s.v2) vm = std::max(vm, std::abs(x));
  d.max_speed = vm;
  return d;
}

namespace {

long steps_for(double interval, double dt, const char* what) {
  const double r = interval / dt;
  const long n = std::lround(r);
  if (n <= 0 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
    throw std::invalid_argument(std::string("integrate: ") + what + " is not a positive multiple of dt");
  return n;
}

}  // namespace

IntegrationResult integrate(ShallowWaterModel& model, const ModelState& ic, double T,
                            const std::vector<Observer>& observers, double diag_interval) {
  const double dt = model.config().dt;
  if (T < 0) throw std::invalid_argument("integrate: negative duration");
  long nsteps = 0;
  if (T > 0) nsteps = steps_for(T, dt, "duration");
  std::vector<long> every;
  for (const Observer& o : observers) every.push_back(o.interval > 0 ? steps_for(o.interval, dt, "observer interval") : 0);
  const long diag_every = diag_interval > 0 ? steps_for(diag_interval, dt, "diagnostic interval") : 0;

  IntegrationResult res;
  res.state = ic;
  const double t0 = ic.t;
  res.series.push_back(model.diagnostics(res.state));
  for (const Observer& o : observers) o.fn(res.state);
  for (long n = 1; n <= nsteps; ++n) {
    model.rk4_step(res.state, n);
    res.state.t = t0 + n * dt;  // avoid accumulated round-off in t
    if ((diag_every && n % diag_every == 0) || n == nsteps) res.series.push_back(model.diagnostics(res.state));
    for (std::size_t k = 0; k < observers.size(); ++k)
      if (every[k] && n % every[k] == 0) observers[k].fn(res.state);
  }
  return res;
}

}  // namespace stagsbp
