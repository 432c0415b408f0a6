#pragma once

#include "stagsbp/grid.hpp"
#include "stagsbp/ops2d.hpp"
#include "stagsbp/sbp1d.hpp"
#include "stagsbp/swe_model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace stagsbp {

enum class CaseTag { GaussHill1, GaussHill2, GaussHill3, SolidRotation, PoorlyResolved };

struct TestCase {
  CaseTag tag = CaseTag::GaussHill1;
  int nu = 0;                                 // PoorlyResolved modulation wavenumber
  double a = kEarthRadius;
  double g = kGravity;
  double omega = kOmega;
  double f_const = 1e-4;                      // GaussHill3, PoorlyResolved
  double u0 = 2.0 * 3.14159265358979323846 * kEarthRadius / (12.0 * kDay);  // solid rotation
  double h0 = 29400.0 / kGravity;             // solid rotation background depth (also its H)
  double wave_period_days = 5.0;              // Gaussian cases: H = (2 pi a / (period))^2 / g

  bool gaussian() const { return tag != CaseTag::SolidRotation; }
  double mean_depth() const;
  CoriolisSpec coriolis() const;
  /// Gaussian centre (unit vector).
  Vec3 centre() const;
  /// Rotation axis for the solid-rotation case (unit vector).
  Vec3 pole() const;
};

/// "gauss1", "gauss2", "gauss3", "solid", "poor:NU"
TestCase parse_test_case(const std::string& s);
std::string to_string(const TestCase& c);

/// Time step keeping the Courant number of the Nc = 48, dt = 600 s setting.
double cfl_matched_dt(int Nc);

ModelConfig default_config(const TestCase& c, OperatorOrder order, int Nc);

/// Analytic initial height at a point (full depth for solid rotation, perturbation otherwise).
double initial_height(const TestCase& c, const Vec3& x);
ModelState initial_condition(const TestCase& c, const Grid2D& g);

/// Coarse h-point values sampled from a nested finer cubed-sphere field.
std::vector<double> restrict_h(const std::vector<double>& fine, int Nc_fine, int Nc_coarse);

struct ErrorNorms {
  double l2 = 0, linf = 0;
};

ErrorNorms error_norms(const std::vector<double>& h, const std::vector<double>& h_ref, const Operators2D& ops);

struct ConvergenceRow {
  int Nc = 0;
  double dt = 0;
  double l2 = 0, linf = 0;
  double rate_l2 = 0, rate_linf = 0;  // against the previous row; NaN for the first
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double fitted_l2 = 0, fitted_linf = 0;  // least-squares slope of -log2(err) against log2(Nc)
  bool exact_match = false;               // all errors zero; rates undefined
};

/// Fills per-row rates and the fitted slopes; at least two rows.
void fit_rates(ConvergenceResult& r);

struct GaussianReference {
  TestCase test_case;
  OperatorOrder order = OperatorOrder::Order63Wave;
  int Nc_ref = 192;
  int Nc_sample = 96;              // stored on this nested subgrid
  double interval = 6.0 * 3600.0;  // sample spacing (s)
  std::vector<std::vector<double>> samples;  // sample k at t = k * interval
};

using LogFn = std::function<void(const std::string&)>;

GaussianReference compute_gaussian_reference(const TestCase& c, OperatorOrder order, int Nc_ref, int Nc_sample,
                                             double days, double interval = 6.0 * 3600.0, const LogFn& log = {});
void save_reference(const std::string& dir, const GaussianReference& r);
/// Loads a reference written by save_reference; returns false when absent or mismatched.
bool load_reference(const std::string& dir, const TestCase& c, OperatorOrder order, int Nc_ref, int Nc_sample,
                    double days, double interval, GaussianReference& out);

struct ConvergenceOptions {
  double days = 0;  // 0: 25 for Gaussian cases, 10 for solid rotation
  double sample_interval = 6.0 * 3600.0;
  CoriolisVariant variant = CoriolisVariant::Main;
  LogFn log;
};

/// Solid rotation: day-D norms against the exact stationary solution.
/// Gaussian cases: max-over-time norms against `ref` (required).
ConvergenceResult convergence_study(const TestCase& c, OperatorOrder order, const std::vector<int>& Nc_list,
                                    const ConvergenceOptions& opt, const GaussianReference* ref = nullptr);

/// Weighted energy fraction of the checkerboard component ([1 -2 1] x [1 -2 1] / 16 over panel interiors).
double checkerboard_fraction(const std::vector<double>& h, const Grid2D& g, const Operators2D& ops);

struct StationaryResult {
  std::vector<double> mean_h;
  double checkerboard = 0;
  double max_energy_drift = 0;  // relative, over the diagnostic series
  double max_mass_drift = 0;
  std::vector<Diagnostics> series;
};

StationaryResult stationary_mode(const TestCase& c, OperatorOrder order, int Nc, double hours = 600.0,
                                 CoriolisVariant variant = CoriolisVariant::Main, const LogFn& log = {});

double relative_drift(const std::vector<Diagnostics>& s, double Diagnostics::*field);

}  // namespace stagsbp
