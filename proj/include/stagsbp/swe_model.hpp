#pragma once

#include "stagsbp/grid.hpp"
#include "stagsbp/ops2d.hpp"
#include "stagsbp/sbp1d.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagsbp {

inline constexpr double kGravity = 9.80616;
inline constexpr double kOmega = 7.292e-5;
inline constexpr double kDay = 86400.0;

struct CoriolisSpec {
  enum class Kind { Zero, Constant, Spherical };
  Kind kind = Kind::Zero;
  double value = 0.0;        // f for Constant, Omega for Spherical
  Vec3 pole{0.0, 0.0, 1.0};  // rotation axis for Spherical: f = 2 Omega (x . pole) / |x|
};

struct ModelConfig {
  double H = 1.0;
  double g = kGravity;
  CoriolisSpec coriolis;
  OperatorOrder order = OperatorOrder::Order63Wave;
  CoriolisVariant coriolis_variant = CoriolisVariant::Main;
  double dt = 600.0;
  int Nc = 48;
  double a = kEarthRadius;

  void validate() const;
};

struct ModelState {
  double t = 0.0;
  std::vector<double> h, v1, v2;  // h at h-points, covariant velocity at x^1 / x^2 points
};

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double tangential_jump = 0.0;
  double max_speed = 0.0;  // max |v_i| over covariant components
};

/// Thrown when the integration produces non-finite values.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coriolis parameter sampled at h-points.
std::vector<double> coriolis_at_h(const CoriolisSpec& c, const Grid2D& g);

/// Linearised rotating shallow-water system on a multi-block grid.
class ShallowWaterModel {
 public:
  ShallowWaterModel(const ModelConfig& cfg, const Grid2D& grid, const Operators2D& ops);

  const ModelConfig& config() const { return cfg_; }
  const Operators2D& ops() const { return *ops_; }
  const std::vector<double>& f() const { return f_; }

  ModelState zero_state() const;
  /// dh/dt and dv/dt at the given state.
  void rhs(const ModelState& s, std::vector<double>& dh, std::vector<double>& dv1, std::vector<double>& dv2);
  /// One classical RK4 step; throws NumericalFailure with the step index on NaN/Inf.
  void rk4_step(ModelState& s, long step_index = 0);
  Diagnostics diagnostics(const ModelState& s);

 private:
  ModelConfig cfg_;
  const Grid2D* g_;
  const Operators2D* ops_;
  std::vector<double> f_;
  bool has_coriolis_ = false;
  Workspace ws_;
  std::vector<double> c1_, c2_, t1_, t2_;
  ModelState k_, acc_, tmp_;
};

struct Observer {
  double interval = 0.0;  // seconds, multiple of dt; 0 disables
  std::function<void(const ModelState&)> fn;
};

struct IntegrationResult {
  ModelState state;
  std::vector<Diagnostics> series;
};

/// Steps RK4 to time T (a multiple of dt). Diagnostics are recorded every diag_interval seconds
/// (plus t = 0 and t = T); observers fire at t = 0 and every interval.
IntegrationResult integrate(ShallowWaterModel& model, const ModelState& ic, double T,
                            const std::vector<Observer>& observers = {}, double diag_interval = 0.0);

}  // namespace stagsbp
