#include "ciss/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ciss/qubit.hpp"
#include "oracles.hpp"

namespace ciss::bench {
namespace {

using scan::AngleTriple;

CountRecord record_with(std::int64_t c13, std::int64_t c23) {
  CountRecord r;
  r.coinc_13 = c13;
  r.coinc_23 = c23;
  r.duration = 1.0;
  return r;
}

TEST(ExperimentConfigTest, Validation) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  auto broken = [&](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(broken([](auto& c) { c.heralded_rate = -1; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.eff_d2 = 1.2; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.dark_rate_d3 = -5; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.coincidence_window = 0; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.p2_step = 0; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.hwp_step = -3; }).validate(), ConfigError);
  EXPECT_THROW(simulate_setting(broken([](auto& c) { c.eff_d1 = -0.1; }), Setting{}),
               ConfigError);
}

TEST(SettingTest, HalfWavePlateMapping) {
  const auto s = Setting::prepare_measure(20.0, 50.0);
  EXPECT_DOUBLE_EQ(s.hwp_angle, 25.0);
  EXPECT_DOUBLE_EQ(s.theta_meas(), 50.0);
  EXPECT_DOUBLE_EQ(Setting::prepare_measure(0.0, 190.0).hwp_angle, 5.0);
  EXPECT_THROW(Setting(Angle(0.0), 91.0), ConfigError);
  EXPECT_THROW(Setting(Angle(0.0), -1.0), ConfigError);
}

TEST(SimulateSettingTest, AlignedAnalyzerSendsNothingToD1) {
  const auto cfg = ExperimentConfig::ideal(1e5);
  for (double deg : {0.0, 30.0, 77.5, 156.0}) {
    const auto r = simulate_setting(cfg, Setting::prepare_measure(deg, deg));
    EXPECT_EQ(r.coinc_13, 0) << deg;
    EXPECT_EQ(r.singles_d1, 0) << deg;
  }
}

TEST(SimulateSettingTest, BornFractionAt45Degrees) {
  const auto cfg = ExperimentConfig::ideal(1e6);
  const auto r = simulate_setting(cfg, Setting::prepare_measure(0.0, 45.0));
  const double n = static_cast<double>(r.coinc_13 + r.coinc_23);
  EXPECT_GT(n, 9e5);
  EXPECT_NEAR(r.coinc_13 / n, 0.5, 3.0 / std::sqrt(n));
  EXPECT_EQ(r.singles_d3, r.coinc_13 + r.coinc_23);
}

TEST(SimulateSettingTest, ZeroRateLeavesOnlyBackground) {
  auto cfg = ExperimentConfig::ideal(0.0);
  auto r = simulate_setting(cfg, Setting::prepare_measure(0.0, 45.0));
  EXPECT_EQ(r.singles_d1 + r.singles_d2 + r.singles_d3, 0);
  EXPECT_EQ(r.coinc_13 + r.coinc_23, 0);

  cfg.dark_rate_d1 = cfg.dark_rate_d2 = cfg.dark_rate_d3 = 1e4;
  cfg.coincidence_window = 1e-6;
  cfg.integration_time = 10.0;
  r = simulate_setting(cfg, Setting::prepare_measure(0.0, 45.0));
  EXPECT_NEAR(r.singles_d1, 1e5, 5 * std::sqrt(1e5));
  EXPECT_NEAR(r.singles_d3, 1e5, 5 * std::sqrt(1e5));
  // Accidentals only: mean = dark_counts * trigger_rate * window = 1e5*1e4*1e-6.
  EXPECT_NEAR(r.coinc_13, 1000.0, 5 * std::sqrt(1000.0));
  EXPECT_THROW(estimate_joint(simulate_setting(ExperimentConfig::ideal(0.0), Setting{}),
                              record_with(5, 5)),
               InsufficientStatistics);
}

TEST(SimulateSettingTest, DeterministicPerSeedAndStream) {
  ExperimentConfig cfg;
  const auto s = Setting::prepare_measure(156.0, 78.0);
  EXPECT_EQ(simulate_setting(cfg, s, 3), simulate_setting(cfg, s, 3));
  EXPECT_FALSE(simulate_setting(cfg, s, 3) == simulate_setting(cfg, s, 4));
  auto other = cfg;
  other.rng_seed = 2;
  EXPECT_FALSE(simulate_setting(cfg, s, 3) == simulate_setting(other, s, 3));
}

TEST(EstimateJointTest, NoD1Coincidences) {
  const auto p = estimate_joint(record_with(0, 400), record_with(300, 700));
  EXPECT_EQ(p.value, 0.0);
}

TEST(EstimateJointTest, InsufficientStatistics) {
  EXPECT_THROW(estimate_joint(record_with(0, 0), record_with(10, 10)),
               InsufficientStatistics);
  EXPECT_THROW(estimate_joint(record_with(3, 3), record_with(0, 0)),
               InsufficientStatistics);
}

TEST(EstimateJointTest, HandComputedErrorBars) {
  // f = 0.25, m = 0.4: J = 0.1,
  // var = m^2 f(1-f)/n + f^2 m^2 (1/n + 1/n_ref) = J^2 (1/c13 + 1/n_ref).
  const auto p = estimate_joint(record_with(100, 300), record_with(500, 500));
  EXPECT_DOUBLE_EQ(p.value, 0.1);
  EXPECT_NEAR(p.std_error, 0.1 * std::sqrt(1.0 / 100 + 1.0 / 1000), 1e-15);
}

TEST(EstimateJointTest, MatchesAnalyticJoint) {
  const auto cfg = ExperimentConfig::ideal(1e6, 11);
  const auto rec = simulate_setting(cfg, Setting::prepare_measure(20.0, 50.0), 0);
  const auto ref = simulate_setting(cfg, Setting::prepare_measure(0.0, 50.0), 1);
  const auto p = estimate_joint(rec, ref);
  const double analytic = static_cast<double>(oracle::joint(20.0L, +1, 50.0L, -1));
  EXPECT_NEAR(analytic, 0.2207, 1e-4);
  EXPECT_NEAR(p.value, analytic, 3.0 * p.std_error);
  EXPECT_LT(p.std_error, 0.001);
}

TEST(EstimateJointTest, OrthogonalAnalyzerGivesMarginal) {
  const auto cfg = ExperimentConfig::ideal(1e5);
  const auto r = simulate_setting(cfg, Setting::prepare_measure(0.0, 90.0));
  EXPECT_EQ(r.coinc_23, 0);
  const auto p = estimate_joint(r, r);
  EXPECT_DOUBLE_EQ(p.value, 1.0);
}

TEST(EstimateJointTest, AccidentalSubtraction) {
  auto cfg = ExperimentConfig::ideal(2e4, 5);
  cfg.dark_rate_d1 = cfg.dark_rate_d2 = 2e5;
  cfg.coincidence_window = 2e-6;
  cfg.integration_time = 10.0;
  EstimatorOptions sub;
  sub.subtract_accidentals = true;
  sub.dark_rate_d1 = cfg.dark_rate_d1;
  sub.dark_rate_d2 = cfg.dark_rate_d2;
  sub.coincidence_window = cfg.coincidence_window;

  const double analytic = static_cast<double>(oracle::joint(30.0L, +1, 70.0L, -1));
  double raw_bias = 0, sub_bias = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto rec = simulate_setting(cfg, Setting::prepare_measure(30.0, 70.0), 2 * k);
    const auto ref = simulate_setting(cfg, Setting::prepare_measure(0.0, 70.0), 2 * k + 1);
    raw_bias += estimate_joint(rec, ref).value - analytic;
    sub_bias += estimate_joint(rec, ref, sub).value - analytic;
  }
  EXPECT_GT(std::abs(raw_bias / 20), 0.01);
  EXPECT_LT(std::abs(sub_bias / 20), 0.005);
}

TEST(EstimateSTest, IdealAtOptimum) {
  const auto cfg = ExperimentConfig::ideal(1e6, 3);
  const auto m = measure_S(cfg, AngleTriple(157.0, 123.5, 77.5));
  EXPECT_LT(m.s.std_error, 0.005);
  EXPECT_NEAR(m.s.value, -0.403, 5.0 * m.s.std_error);
  EXPECT_GT(m.s.sigma_violation, 50.0);
  EXPECT_EQ(m.records.size(), 6u);
  EXPECT_EQ(m.records[1].setting.theta_prep.degrees(), 0.0);
  EXPECT_DOUBLE_EQ(m.records[1].setting.theta_meas(), 123.5);
}

TEST(EstimateSTest, ZeroTriple) {
  const auto s = estimate_S(ExperimentConfig::ideal(1e5), AngleTriple(0, 0, 0));
  EXPECT_LE(std::abs(s.value), 3.0 * s.std_error);
  EXPECT_EQ(s.sigma_violation, 0.0);
}

TEST(EstimateSTest, CalibratedErrorBars) {
  const AngleTriple t(157.0, 123.5, 77.5);
  const double truth = scan::s_quantum(t);
  std::vector<double> z;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = estimate_S(ExperimentConfig::ideal(1e6, seed), t);
    z.push_back((s.value - truth) / s.std_error);
  }
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
  double var = 0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= z.size() - 1;
  EXPECT_GE(mean, -0.3);
  EXPECT_LE(mean, 0.3);
  EXPECT_GE(var, 0.6);
  EXPECT_LE(var, 1.6);
}

TEST(EstimateSTest, ErrorScalesAsInverseSqrtTime) {
  auto cfg = ExperimentConfig::ideal(1e4, 9);
  const AngleTriple t(157.0, 123.5, 77.5);
  cfg.integration_time = 1.0;
  const double short_run = estimate_S(cfg, t).std_error;
  cfg.integration_time = 100.0;
  const double long_run = estimate_S(cfg, t).std_error;
  EXPECT_NEAR(short_run / long_run, 10.0, 2.0);
}

TEST(EstimateSTest, JointsStayPhysical) {
  const auto cfg = ExperimentConfig::ideal(1e4, 21);
  for (double a = 0.0; a < 180.0; a += 24.0)
    for (double b = 0.0; b < 180.0; b += 20.0) {
      const auto m = measure_S(cfg, AngleTriple(a, b, a + b));
      for (const auto* p : {&m.p_ab, &m.p_bc, &m.p_ac}) {
        EXPECT_GE(p->value, -0.05);
        EXPECT_LE(p->value, 1.05);
        EXPECT_GE(p->std_error, 0.0);
      }
    }
}

TEST(EstimateSTest, PropagatesInsufficientStatistics) {
  EXPECT_THROW(estimate_S(ExperimentConfig::ideal(0.0), AngleTriple(157, 123.5, 77.5)),
               InsufficientStatistics);
  // P2 crossed with the |H> source: nothing reaches the analyzer.
  EXPECT_THROW(estimate_S(ExperimentConfig::ideal(1e4), AngleTriple(90, 30, 60)),
               InsufficientStatistics);
}

TEST(MakeSEstimateTest, Significance) {
  EXPECT_DOUBLE_EQ(make_s_estimate(-0.4, 0.02).sigma_violation, 20.0);
  EXPECT_EQ(make_s_estimate(0.1, 0.02).sigma_violation, 0.0);
  EXPECT_EQ(make_s_estimate(-0.1, 0.0).sigma_violation, 0.0);
}

TEST(RunFullScanTest, SingleSettingGrid) {
  FullScanOptions opts;
  opts.theta_a = 0.0;
  opts.theta_b = 0.0;
  opts.prep_grid = scan::ScanGrid::fixed(0.0);
  opts.hwp_grid = scan::ScanGrid::fixed(0.0);
  const auto scan = run_full_scan(ExperimentConfig::ideal(1e4), opts);
  EXPECT_EQ(scan.joints.size(), 1u);
  ASSERT_EQ(scan.profile.size(), 1u);
  ASSERT_TRUE(scan.profile[0].simulated.has_value());
  EXPECT_EQ(scan.profile[0].simulated->value, 0.0);
}

TEST(RunFullScanTest, RejectsAnglesOffGrid) {
  FullScanOptions opts;
  opts.theta_a = 157.0;
  EXPECT_THROW(run_full_scan(ExperimentConfig::ideal(1e3), opts), ConfigError);
}

TEST(RunFullScanTest, DefaultConfigReproducesProfile) {
  const ExperimentConfig cfg;
  const auto scan = run_full_scan(cfg);
  EXPECT_EQ(scan.prep_angles.size(), 31u);
  EXPECT_EQ(scan.meas_angles.size(), 31u);
  EXPECT_EQ(scan.joints.size(), 31u * 31u);
  EXPECT_EQ(scan.surface.size(), 31u * 31u);
  ASSERT_EQ(scan.profile.size(), 31u);

  const ScanNode* best = nullptr;
  int within = 0;
  for (const auto& n : scan.profile) {
    ASSERT_TRUE(n.simulated.has_value()) << n.theta_c;
    EXPECT_NEAR(n.theory, static_cast<double>(oracle::s_value(156, 126, n.theta_c)),
                1e-12);
    within += std::abs(n.simulated->value - n.theory) <=
              3.0 * n.simulated->std_error + 1e-12;
    if (!best || n.simulated->value < best->simulated->value) best = &n;
  }
  EXPECT_EQ(best->theta_c, 78.0);
  EXPECT_GE(within, 30);

  // Dark-count accidentals give even the P2 = 90 row some statistics.
  std::size_t surface_within = 0;
  for (const auto& n : scan.surface) {
    ASSERT_TRUE(n.simulated.has_value());
    surface_within += std::abs(n.simulated->value - n.theory) <=
                      3.0 * n.simulated->std_error + 1e-12;
  }
  EXPECT_GE(surface_within, 0.95 * scan.surface.size());
}

TEST(RunFullScanTest, IdealConfigLeavesCrossedPolarizerEmpty) {
  FullScanOptions opts;
  opts.prep_grid = scan::ScanGrid(78.0, 156.0, 6.0);
  opts.hwp_grid = scan::ScanGrid(39.0, 63.0, 3.0);
  const auto scan = run_full_scan(ExperimentConfig::ideal(1e4), opts);
  std::size_t missing = 0;
  for (const auto& n : scan.surface) missing += !n.simulated.has_value();
  // Rows with theta_b = 90 need P2 at 90, which blocks every |H> photon.
  EXPECT_EQ(missing, scan.meas_angles.size());
}

TEST(RunFullScanTest, Deterministic) {
  FullScanOptions opts;
  opts.theta_b = 84.0;
  opts.prep_grid = scan::ScanGrid(72.0, 156.0, 6.0);
  opts.hwp_grid = scan::ScanGrid(36.0, 45.0, 3.0);
  ExperimentConfig cfg;
  const auto a = run_full_scan(cfg, opts);
  const auto b = run_full_scan(cfg, opts);
  ASSERT_EQ(a.joints.size(), b.joints.size());
  for (std::size_t i = 0; i < a.joints.size(); ++i) {
    ASSERT_EQ(a.joints[i].has_value(), b.joints[i].has_value());
    if (a.joints[i]) EXPECT_EQ(a.joints[i]->value, b.joints[i]->value);
  }
}

}  // namespace
}  // namespace ciss::bench
