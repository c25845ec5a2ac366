#include "ciss/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ciss/parallel.hpp"
#include "ciss/qubit.hpp"

namespace ciss::bench {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid experiment config: " + what);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

std::int64_t draw_poisson(Engine& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

std::int64_t draw_binomial(Engine& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::int64_t>(n, p)(rng);
}

}  // namespace

void ExperimentConfig::validate() const {
  auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  auto efficiency = [](double x) { return x >= 0.0 && x <= 1.0; };
  require(finite_nonneg(heralded_rate), "heralded_rate must be >= 0");
  require(finite_nonneg(integration_time), "integration_time must be >= 0");
  require(efficiency(eff_d1) && efficiency(eff_d2) && efficiency(eff_d3),
          "efficiencies must lie in [0, 1]");
  require(finite_nonneg(dark_rate_d1) && finite_nonneg(dark_rate_d2) &&
              finite_nonneg(dark_rate_d3),
          "dark rates must be >= 0");
  require(std::isfinite(coincidence_window) && coincidence_window > 0.0,
          "coincidence_window must be > 0");
  require(std::isfinite(p2_step) && p2_step > 0.0, "p2_step must be > 0");
  require(std::isfinite(hwp_step) && hwp_step > 0.0, "hwp_step must be > 0");
}

ExperimentConfig ExperimentConfig::ideal(double heralds_per_setting,
                                         std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.heralded_rate = heralds_per_setting;
  cfg.integration_time = 1.0;
  cfg.eff_d1 = cfg.eff_d2 = cfg.eff_d3 = 1.0;
  cfg.dark_rate_d1 = cfg.dark_rate_d2 = cfg.dark_rate_d3 = 0.0;
  cfg.rng_seed = seed;
  return cfg;
}

Setting::Setting(Angle prep, double hwp) : theta_prep(prep), hwp_angle(hwp) {
  if (!(hwp >= 0.0 && hwp <= 90.0)) {
    throw ConfigError("HWP angle must lie in [0, 90] degrees");
  }
}

Setting Setting::prepare_measure(double prep, double meas) {
  return Setting(Angle(prep), Angle::canonicalize(meas) / 2.0);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Each herald is classified as: photon clicks D1, photon clicks D2, or photon
// lost (absorbed by P2 or missed by its detector); independently the trigger
// either clicks D3 or is missed. Drawing the class counts as a multinomial is
// distributionally identical to flipping every herald one at a time.
CountRecord simulate_setting(const ExperimentConfig& cfg, const Setting& s,
                             std::uint64_t stream) {
  cfg.validate();
  Engine rng(derive_seed(cfg.rng_seed, stream));

  using qubit::Outcome;
  const qubit::Projection prep{qubit::PropertySetting(s.theta_prep), Outcome::Plus};
  const qubit::Projection meas_minus{qubit::PropertySetting(s.theta_meas()),
                                     Outcome::Minus};
  const double pass = qubit::marginal_probability(qubit::PureState::horizontal(), prep);
  const double to_d1 = qubit::conditional_probability(meas_minus, prep);

  const double p_d1 = std::clamp(pass * to_d1 * cfg.eff_d1, 0.0, 1.0);
  const double p_d2 = std::clamp(pass * (1.0 - to_d1) * cfg.eff_d2, 0.0, 1.0);
  const double duration = cfg.integration_time;

  const std::int64_t heralds = draw_poisson(rng, cfg.heralded_rate * duration);
  const std::int64_t hits_d1 = draw_binomial(rng, heralds, p_d1);
  const double rest = 1.0 - p_d1;
  const std::int64_t hits_d2 =
      rest > 0.0 ? draw_binomial(rng, heralds - hits_d1, std::min(1.0, p_d2 / rest))
                 : 0;
  const std::int64_t lost = heralds - hits_d1 - hits_d2;

  const std::int64_t trig_d1 = draw_binomial(rng, hits_d1, cfg.eff_d3);
  const std::int64_t trig_d2 = draw_binomial(rng, hits_d2, cfg.eff_d3);
  const std::int64_t trig_lost = draw_binomial(rng, lost, cfg.eff_d3);

  const std::int64_t dark_d1 = draw_poisson(rng, cfg.dark_rate_d1 * duration);
  const std::int64_t dark_d2 = draw_poisson(rng, cfg.dark_rate_d2 * duration);
  const std::int64_t dark_d3 = draw_poisson(rng, cfg.dark_rate_d3 * duration);

  CountRecord rec;
  rec.setting = s;
  rec.duration = duration;
  rec.singles_d1 = hits_d1 + dark_d1;
  rec.singles_d2 = hits_d2 + dark_d2;
  rec.singles_d3 = trig_d1 + trig_d2 + trig_lost + dark_d3;

  // Dark clicks on D1/D2 landing inside the window of an uncorrelated D3
  // click: mean = dark counts * trigger singles * window / duration.
  const double trigger_rate = duration > 0.0 ? rec.singles_d3 / duration : 0.0;
  const double window = cfg.coincidence_window;
  rec.coinc_13 = trig_d1 + draw_poisson(rng, dark_d1 * trigger_rate * window);
  rec.coinc_23 = trig_d2 + draw_poisson(rng, dark_d2 * trigger_rate * window);
  return rec;
}

EstimatedProbability estimate_joint(const CountRecord& record,
                                    const CountRecord& reference,
                                    const EstimatorOptions& options) {
  auto corrected = [&](const CountRecord& r) {
    double c13 = static_cast<double>(r.coinc_13);
    double c23 = static_cast<double>(r.coinc_23);
    if (options.subtract_accidentals) {
      const double per_dark = r.singles_d3 * options.coincidence_window;
      c13 = std::max(0.0, c13 - options.dark_rate_d1 * per_dark);
      c23 = std::max(0.0, c23 - options.dark_rate_d2 * per_dark);
    }
    return std::pair{c13, c23};
  };
  const auto [c13, c23] = corrected(record);
  const auto [r13, r23] = corrected(reference);
  const double n = c13 + c23;
  const double n_ref = r13 + r23;
  if (!(n > 0.0)) {
    throw InsufficientStatistics("no coincidences in the measurement run");
  }
  if (!(n_ref > 0.0)) {
    throw InsufficientStatistics("no coincidences in the reference run");
  }

  const double fraction = c13 / n;     // P(mu- | pi+)
  const double marginal = n / n_ref;   // P(pi+)
  const double var_fraction = fraction * (1.0 - fraction) / n;
  const double var_marginal = marginal * marginal * (1.0 / n + 1.0 / n_ref);

  EstimatedProbability out;
  out.value = fraction * marginal;
  out.std_error = std::sqrt(marginal * marginal * var_fraction +
                            fraction * fraction * var_marginal);
  return out;
}

SEstimate make_s_estimate(double value, double std_error) {
  SEstimate s;
  s.value = value;
  s.std_error = std_error;
  s.sigma_violation = (value < 0.0 && std_error > 0.0) ? -value / std_error : 0.0;
  return s;
}

SMeasurement measure_S(const ExperimentConfig& cfg, const scan::AngleTriple& t,
                       const EstimatorOptions& options) {
  cfg.validate();
  const double a = t.theta_a.degrees();
  const double b = t.theta_b.degrees();
  const double c = t.theta_c.degrees();
  const std::array<std::pair<double, double>, 3> pairs{{{a, b}, {b, c}, {a, c}}};

  std::vector<CountRecord> records(6);
  parallel_for(records.size(), [&](std::size_t i) {
    const auto& [prep, meas] = pairs[i / 2];
    const Setting s = Setting::prepare_measure(i % 2 == 0 ? prep : 0.0, meas);
    records[i] = simulate_setting(cfg, s, i);
  });

  std::array<EstimatedProbability, 3> joints;
  for (std::size_t k = 0; k < 3; ++k) {
    joints[k] = estimate_joint(records[2 * k], records[2 * k + 1], options);
  }

  SMeasurement m;
  m.angles = t;
  m.p_ab = joints[0];
  m.p_bc = joints[1];
  m.p_ac = joints[2];
  m.s = make_s_estimate(
      m.p_ab.value + m.p_bc.value - m.p_ac.value,
      std::hypot(m.p_ab.std_error, m.p_bc.std_error, m.p_ac.std_error));
  m.records = std::move(records);
  return m;
}

namespace {

std::size_t locate(const std::vector<double>& axis, double value,
                   const char* what) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i] - value) < 1e-9) return i;
  }
  throw ConfigError(std::string(what) + " is not a node of the scan grid");
}

bool contains(const std::vector<double>& axis, double value) {
  return std::any_of(axis.begin(), axis.end(),
                     [&](double x) { return std::abs(x - value) < 1e-9; });
}

}  // namespace

FullScan run_full_scan(const ExperimentConfig& cfg,
                       const FullScanOptions& options) {
  cfg.validate();
  const scan::ScanGrid prep_grid =
      options.prep_grid.value_or(scan::ScanGrid(0.0, 180.0, cfg.p2_step));
  const scan::ScanGrid hwp_grid =
      options.hwp_grid.value_or(scan::ScanGrid(0.0, 90.0, cfg.hwp_step));
  if (hwp_grid.start() < 0.0 || hwp_grid.stop() > 90.0) {
    throw ConfigError("HWP grid must lie within [0, 90] degrees");
  }

  FullScan out;
  out.prep_angles = prep_grid.nodes();
  for (double h : hwp_grid.nodes()) out.meas_angles.push_back(2.0 * h);
  const std::size_t n_meas = out.meas_angles.size();
  const std::size_t n_settings = out.prep_angles.size() * n_meas;

  // Run 2i is the setting itself, run 2i + 1 its P2 = 0 reference.
  out.joints.resize(n_settings);
  parallel_for(n_settings, [&](std::size_t i) {
    const double prep = out.prep_angles[i / n_meas];
    const double hwp = out.meas_angles[i % n_meas] / 2.0;
    const CountRecord rec = simulate_setting(cfg, Setting(Angle(prep), hwp), 2 * i);
    const CountRecord ref =
        simulate_setting(cfg, Setting(Angle(0.0), hwp), 2 * i + 1);
    try {
      out.joints[i] = estimate_joint(rec, ref, options.estimator);
    } catch (const InsufficientStatistics&) {
      out.joints[i] = std::nullopt;
    }
  });

  const std::size_t ia = locate(out.prep_angles, options.theta_a, "theta_a");
  auto joint = [&](std::size_t prep_idx, std::size_t meas_idx) {
    return out.joints[prep_idx * n_meas + meas_idx];
  };
  auto node = [&](double b, double c) {
    const std::size_t ib_prep = locate(out.prep_angles, b, "theta_b");
    const std::size_t ib_meas = locate(out.meas_angles, b, "theta_b");
    const std::size_t ic = locate(out.meas_angles, c, "theta_c");
    ScanNode n;
    n.theta_a = options.theta_a;
    n.theta_b = b;
    n.theta_c = c;
    n.theory = scan::s_quantum(options.theta_a, b, c);
    const auto ab = joint(ia, ib_meas);
    const auto bc = joint(ib_prep, ic);
    const auto ac = joint(ia, ic);
    if (ab && bc && ac) {
      n.simulated = make_s_estimate(
          ab->value + bc->value - ac->value,
          std::hypot(ab->std_error, bc->std_error, ac->std_error));
    }
    return n;
  };

  for (double b : out.prep_angles) {
    if (!contains(out.meas_angles, b)) continue;
    for (double c : out.meas_angles) out.surface.push_back(node(b, c));
  }
  for (double c : out.meas_angles) out.profile.push_back(node(options.theta_b, c));
  return out;
}

}  // namespace ciss::bench
