#include "stagsbp/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace stagsbp;

TEST(TestCases, ParseAndName) {
  for (const char* s : {"gauss1", "gauss2", "gauss3", "solid", "poor:32"})
    EXPECT_EQ(to_string(parse_test_case(s)), s);
  EXPECT_EQ(parse_test_case("poor:64").nu, 64);
  for (const char* s : {"gauss4", "poor:", "poor:x", "poor:-2", "poor:3x", ""})
    EXPECT_THROW(parse_test_case(s), std::invalid_argument) << s;
}

TEST(TestCases, GaussianHillPeaksAtCentre) {
  const TestCase c1 = parse_test_case("gauss1");
  EXPECT_DOUBLE_EQ(initial_height(c1, {-kEarthRadius, 0, 0}), 1.0);
  EXPECT_LT(initial_height(c1, {kEarthRadius, 0, 0}), 1e-60);
  const TestCase c2 = parse_test_case("gauss2");
  const double s = kEarthRadius / std::sqrt(3.0);
  EXPECT_NEAR(initial_height(c2, {s, s, s}), 1.0, 1e-15);
}

TEST(TestCases, GaussianWaveSpeedAndRossbyRadius) {
  const TestCase c = parse_test_case("gauss3");
  const double speed = std::sqrt(c.g * c.mean_depth());
  EXPECT_NEAR(speed, 2 * std::numbers::pi * kEarthRadius / (5 * kDay), 1e-9);
  EXPECT_NEAR(speed, 90.0, 5.0);
  const TestCase p = parse_test_case("poor:32");
  EXPECT_NEAR(std::sqrt(p.g * p.mean_depth()) / p.f_const, 9e5, 0.5e5);
}

TEST(TestCases, CoriolisSettings) {
  EXPECT_EQ(parse_test_case("gauss1").coriolis().kind, CoriolisSpec::Kind::Zero);
  EXPECT_EQ(parse_test_case("gauss2").coriolis().kind, CoriolisSpec::Kind::Zero);
  const CoriolisSpec c3 = parse_test_case("gauss3").coriolis();
  EXPECT_EQ(c3.kind, CoriolisSpec::Kind::Constant);
  EXPECT_EQ(c3.value, 1e-4);
  const CoriolisSpec cs = parse_test_case("solid").coriolis();
  EXPECT_EQ(cs.kind, CoriolisSpec::Kind::Spherical);
  EXPECT_NEAR(cs.pole[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(cs.pole[2], std::sqrt(0.5), 1e-15);
}

TEST(TestCases, PoorlyResolvedModulationWavelength) {
  // cos^2(nu lambda) has period pi / nu in longitude; grid spacing on the equator is (pi/2) / Nc
  const int nu = 32, Nc = 64;
  const double period = std::numbers::pi / nu, dx = std::numbers::pi / 2 / Nc;
  EXPECT_NEAR(period / dx, 4.0, 1e-12);
  const TestCase c = parse_test_case("poor:32");
  // zero on the modulation nodes next to the centre
  const double lon = std::numbers::pi + std::numbers::pi / (2 * nu);
  const Vec3 x{kEarthRadius * std::cos(lon), kEarthRadius * std::sin(lon), 0};
  EXPECT_NEAR(initial_height(c, x), 0.0, 1e-15);
}

TEST(TestCases, SolidRotationIsInitiallyBalanced) {
  // the momentum tendency is a truncation error: small against the pressure gradient and shrinking with refinement
  const TestCase c = parse_test_case("solid");
  for (OperatorOrder o : {OperatorOrder::Order42, OperatorOrder::Order63Wave}) {
    double prev = 0;
    for (int Nc : {24, 48}) {
      const Grid2D g = build_cubed_sphere(Nc);
      const Operators2D ops(g, o);
      ShallowWaterModel m(default_config(c, o, Nc), g, ops);
      const ModelState s = initial_condition(c, g);
      std::vector<double> dh, d1, d2, g1(ops.n_v()), g2(ops.n_v());
      m.rhs(s, dh, d1, d2);
      Workspace ws = ops.make_workspace();
      ops.grad(s.h.data(), g1.data(), g2.data(), ws);
      double tend = 0, term = 0;
      for (int k = 0; k < ops.n_v(); ++k) {
        tend = std::max({tend, std::abs(d1[k]), std::abs(d2[k])});
        term = std::max({term, std::abs(c.g * g1[k]), std::abs(c.g * g2[k])});
      }
      EXPECT_LT(tend, 1e-2 * term) << to_string(o) << " Nc=" << Nc;
      if (prev > 0) EXPECT_LT(tend, 0.5 * prev) << to_string(o);
      prev = tend;
    }
  }
}

TEST(Restriction, NestedIndexArithmetic) {
  const int Nf = 24, Nc = 12;
  std::vector<double> fine(6 * (Nf + 1) * (Nf + 1));
  for (std::size_t k = 0; k < fine.size(); ++k) fine[k] = static_cast<double>(k);
  const auto coarse = restrict_h(fine, Nf, Nc);
  const Grid2D gf = build_cubed_sphere(Nf, 1.0), gc = build_cubed_sphere(Nc, 1.0);
  for (int p = 0; p < 6; ++p)
    for (int j = 0; j <= Nc; ++j)
      for (int i = 0; i <= Nc; ++i) {
        EXPECT_EQ(coarse[gc.idx_h(p, i, j)], fine[gf.idx_h(p, 2 * i, 2 * j)]);
        const Vec3& a = gc.pos_h[gc.idx_h(p, i, j)];
        const Vec3& b = gf.pos_h[gf.idx_h(p, 2 * i, 2 * j)];
        for (int d = 0; d < 3; ++d) EXPECT_NEAR(a[d], b[d], 1e-15);
      }
  EXPECT_THROW(restrict_h(fine, Nf, 7), std::invalid_argument);
  EXPECT_THROW(restrict_h(fine, Nf, 48), std::invalid_argument);
}

TEST(ErrorNorms, TrivialCases) {
  const Grid2D g = build_cubed_sphere(12, 1.0);
  const Operators2D ops(g, OperatorOrder::Order21);
  std::vector<double> h(ops.n_h());
  for (int m = 0; m < ops.n_h(); ++m) h[m] = 1.0 + 0.5 * std::sin(m * 0.1);
  const ErrorNorms z = error_norms(h, h, ops);
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.linf, 0.0);
  auto p = h;
  p[100] += 1e-3;
  double hmax = 0;
  for (double x : h) hmax = std::max(hmax, std::abs(x));
  EXPECT_NEAR(error_norms(p, h, ops).linf, 1e-3 / hmax, 1e-15 * (1e-3 / hmax));
  // invariant under common positive scaling
  auto hs = h, ps = p;
  for (auto& x : hs) x *= 7.5;
  for (auto& x : ps) x *= 7.5;
  const ErrorNorms a = error_norms(p, h, ops), b = error_norms(ps, hs, ops);
  EXPECT_NEAR(a.l2, b.l2, 1e-15);
  EXPECT_NEAR(a.linf, b.linf, 1e-15);
  std::vector<double> zero(ops.n_h(), 0.0);
  EXPECT_THROW(error_norms(h, zero, ops), std::invalid_argument);
}

TEST(Rates, FitAndSentinel) {
  ConvergenceResult r;
  r.rows = {{24, 0, 1.0, 2.0}, {48, 0, 0.25, 1.0}, {96, 0, 1.0 / 16, 0.5}};
  fit_rates(r);
  EXPECT_NEAR(r.rows[1].rate_l2, 2.0, 1e-14);
  EXPECT_NEAR(r.rows[2].rate_linf, 1.0, 1e-14);
  EXPECT_NEAR(r.fitted_l2, 2.0, 1e-14);
  EXPECT_NEAR(r.fitted_linf, 1.0, 1e-14);
  EXPECT_TRUE(std::isnan(r.rows[0].rate_l2));
  EXPECT_FALSE(r.exact_match);

  ConvergenceResult z;
  z.rows = {{24, 0, 0, 0}, {48, 0, 0, 0}};
  fit_rates(z);
  EXPECT_TRUE(z.exact_match);
  EXPECT_TRUE(std::isnan(z.fitted_l2));
}

TEST(Rates, LeastSquaresSlopeIsMeanOfSuccessiveRates) {
  ConvergenceResult r;
  r.rows = {{24, 0, 1.0, 1.0}, {48, 0, 0.2, 0.3}, {96, 0, 0.01, 0.1}};
  fit_rates(r);
  EXPECT_NEAR(r.fitted_l2, 0.5 * (r.rows[1].rate_l2 + r.rows[2].rate_l2), 1e-14);
}

TEST(Checkerboard, ConstantAndPureModes) {
  const Grid2D g = build_cubed_sphere(12, 1.0);
  const Operators2D ops(g, OperatorOrder::Order21);
  std::vector<double> h(g.n_h(), 3.0);
  EXPECT_EQ(checkerboard_fraction(h, g, ops), 0.0);
  for (int p = 0; p < 6; ++p)
    for (int j = 0; j <= 12; ++j)
      for (int i = 0; i <= 12; ++i) h[g.idx_h(p, i, j)] = ((i + j) % 2) ? 1.0 : -1.0;
  EXPECT_NEAR(checkerboard_fraction(h, g, ops), 1.0, 1e-14);
  for (int p = 0; p < 6; ++p)
    for (int j = 0; j <= 12; ++j)
      for (int i = 0; i <= 12; ++i) h[g.idx_h(p, i, j)] = 0.3 * i - 0.2 * j + 1.0;
  EXPECT_NEAR(checkerboard_fraction(h, g, ops), 0.0, 1e-28);
}

TEST(Convergence, SolidRotationShortRunDecreases) {
  ConvergenceOptions opt;
  opt.days = 1.0;
  const ConvergenceResult r =
      convergence_study(parse_test_case("solid"), OperatorOrder::Order42, {12, 24}, opt);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_LT(r.rows[1].l2, r.rows[0].l2);
  EXPECT_GT(r.fitted_l2, 1.0);
}

TEST(Convergence, GaussianNeedsReference) {
  ConvergenceOptions opt;
  EXPECT_THROW(convergence_study(parse_test_case("gauss1"), OperatorOrder::Order21, {12, 24}, opt),
               std::invalid_argument);
}

TEST(Convergence, ReferenceIsDeterministic) {
  const TestCase c = parse_test_case("gauss1");
  const GaussianReference ref = compute_gaussian_reference(c, OperatorOrder::Order42, 24, 24, 0.5, 6 * 3600.0);
  EXPECT_EQ(ref.samples.size(), 3u);
  const GaussianReference ref2 = compute_gaussian_reference(c, OperatorOrder::Order42, 24, 24, 0.5, 6 * 3600.0);
  EXPECT_EQ(ref.samples, ref2.samples);
}

TEST(Convergence, ReferenceCacheRoundTrip) {
  const TestCase c = parse_test_case("gauss3");
  const GaussianReference ref = compute_gaussian_reference(c, OperatorOrder::Order21, 24, 12, 0.5, 6 * 3600.0);
  const std::string dir = (std::filesystem::temp_directory_path() / "stagsbp_ref_cache_test").string();
  std::filesystem::remove_all(dir);
  save_reference(dir, ref);
  GaussianReference back;
  ASSERT_TRUE(load_reference(dir, c, OperatorOrder::Order21, 24, 12, 0.5, 6 * 3600.0, back));
  EXPECT_EQ(back.samples, ref.samples);
  EXPECT_FALSE(load_reference(dir, c, OperatorOrder::Order21, 24, 12, 1.0, 6 * 3600.0, back));
  EXPECT_FALSE(load_reference(dir, c, OperatorOrder::Order42, 24, 12, 0.5, 6 * 3600.0, back));
  std::filesystem::remove_all(dir);
}

TEST(Stationary, ShortRunProducesMeanField) {
  const StationaryResult r = stationary_mode(parse_test_case("poor:8"), OperatorOrder::Order42, 16, 2.0);
  EXPECT_EQ(r.mean_h.size(), static_cast<std::size_t>(6 * 17 * 17));
  EXPECT_GE(r.checkerboard, 0.0);
  EXPECT_LT(r.checkerboard, 1.0);
  EXPECT_LT(r.max_mass_drift, 1e-12);
  EXPECT_EQ(r.series.size(), 3u);
}

TEST(Timestep, CflMatched) {
  EXPECT_DOUBLE_EQ(cfl_matched_dt(48), 600.0);
  EXPECT_DOUBLE_EQ(cfl_matched_dt(64), 450.0);
  EXPECT_DOUBLE_EQ(cfl_matched_dt(96), 300.0);
  EXPECT_DOUBLE_EQ(cfl_matched_dt(192), 150.0);
  EXPECT_THROW(cfl_matched_dt(0), std::invalid_argument);
}
