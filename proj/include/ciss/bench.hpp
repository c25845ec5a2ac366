#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ciss/angle.hpp"
#include "ciss/s_scan.hpp"

namespace ciss::bench {

/// Invalid bench parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A joint probability cannot be formed because a run recorded no
/// coincidences.
class InsufficientStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of the virtual heralded-photon bench. The defaults describe a
/// plausible desk setup; none of them are measured lab values.
struct ExperimentConfig {
  double heralded_rate = 2.0e5;     // pairs / s reaching P2
  double integration_time = 50.0;   // s per setting
  double eff_d1 = 0.65;
  double eff_d2 = 0.65;
  double eff_d3 = 0.65;
  double dark_rate_d1 = 250.0;      // counts / s
  double dark_rate_d2 = 250.0;
  double dark_rate_d3 = 250.0;
  double coincidence_window = 9e-9; // s
  double p2_step = 6.0;             // degrees
  double hwp_step = 3.0;            // degrees
  std::uint64_t rng_seed = 1;

  /// Throws ConfigError on negative rates, efficiencies outside [0, 1],
  /// non-positive window or steps.
  void validate() const;

  /// Unit efficiencies, no dark counts.
  static ExperimentConfig ideal(double heralds_per_setting,
                                std::uint64_t seed = 1);
};

/// Polarizer P2 at theta_prep; HWP fast axis at hwp_angle in [0, 90], so the
/// analyzer sits at 2 * hwp_angle.
struct Setting {
  Angle theta_prep;
  double hwp_angle = 0.0;

  Setting() = default;
  /// Throws ConfigError for hwp_angle outside [0, 90].
  Setting(Angle prep, double hwp);

  /// Setting that prepares along `prep` and analyzes along `meas` (degrees).
  static Setting prepare_measure(double prep, double meas);

  double theta_meas() const { return 2.0 * hwp_angle; }
};

struct CountRecord {
  std::int64_t singles_d1 = 0;
  std::int64_t singles_d2 = 0;
  std::int64_t singles_d3 = 0;
  std::int64_t coinc_13 = 0;
  std::int64_t coinc_23 = 0;
  Setting setting;
  double duration = 0.0;

  friend bool operator==(const CountRecord& a, const CountRecord& b) {
    return a.singles_d1 == b.singles_d1 && a.singles_d2 == b.singles_d2 &&
           a.singles_d3 == b.singles_d3 && a.coinc_13 == b.coinc_13 &&
           a.coinc_23 == b.coinc_23 && a.setting.theta_prep == b.setting.theta_prep &&
           a.setting.hwp_angle == b.setting.hwp_angle && a.duration == b.duration;
  }
};

/// Seed of an independent random stream for one run, mixed from the config
/// seed and a run index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// One integration period at one setting. Heralded photons start in |H>;
/// `stream` selects the independent random stream for this run.
CountRecord simulate_setting(const ExperimentConfig& cfg, const Setting& s,
                             std::uint64_t stream = 0);

struct EstimatedProbability {
  double value = 0.0;
  double std_error = 0.0;
};

struct EstimatorOptions {
  /// Subtract the expected dark-induced accidentals from each coincidence
  /// count. Requires the dark rates and window the run was taken with.
  bool subtract_accidentals = false;
  double dark_rate_d1 = 0.0;
  double dark_rate_d2 = 0.0;
  double coincidence_window = 0.0;
};

/// P(pi+ mu-) = [c13 / (c13 + c23)] * [(c13 + c23) / (ref c13 + ref c23)],
/// where `reference` is the same analyzer with P2 at 0 degrees.
/// Throws InsufficientStatistics when either run has no coincidences.
EstimatedProbability estimate_joint(const CountRecord& record,
                                    const CountRecord& reference,
                                    const EstimatorOptions& options = {});

struct SEstimate {
  double value = 0.0;
  double std_error = 0.0;
  /// -value / std_error when value < 0 and std_error > 0, else 0.
  double sigma_violation = 0.0;
};

SEstimate make_s_estimate(double value, double std_error);

/// Full result of one S reconstruction at a single angle triple.
struct SMeasurement {
  scan::AngleTriple angles;
  EstimatedProbability p_ab;
  EstimatedProbability p_bc;
  EstimatedProbability p_ac;
  SEstimate s;
  /// (a+ -> b-), (b+ -> c-), (a+ -> c-), each followed by its reference.
  std::vector<CountRecord> records;
};

SMeasurement measure_S(const ExperimentConfig& cfg, const scan::AngleTriple& t,
                       const EstimatorOptions& options = {});

inline SEstimate estimate_S(const ExperimentConfig& cfg,
                            const scan::AngleTriple& t) {
  return measure_S(cfg, t).s;
}

/// One node of a reconstructed S slice: theory and (when every joint had
/// statistics) the simulated estimate.
struct ScanNode {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double theta_c = 0.0;
  double theory = 0.0;
  std::optional<SEstimate> simulated;
};

struct FullScanOptions {
  double theta_a = 156.0;
  double theta_b = 126.0;
  /// Override the P2 / HWP grids derived from the config steps.
  std::optional<scan::ScanGrid> prep_grid;
  std::optional<scan::ScanGrid> hwp_grid;
  EstimatorOptions estimator;
};

struct FullScan {
  std::vector<double> prep_angles;
  std::vector<double> meas_angles;
  /// Row-major over (prep, meas); nullopt where a run lacked coincidences.
  std::vector<std::optional<EstimatedProbability>> joints;
  /// S(theta_a, theta_b, theta_c) with theta_a pinned, row-major (b, c).
  std::vector<ScanNode> surface;
  /// S(theta_a, theta_b, theta_c) with theta_a and theta_b pinned.
  std::vector<ScanNode> profile;
};

/// Every (P2, HWP) combination, each with its own P2 = 0 reference run,
/// then S rebuilt from the joint table on the slices.
FullScan run_full_scan(const ExperimentConfig& cfg,
                       const FullScanOptions& options = {});

}  // namespace ciss::bench
