#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ciss/angle.hpp"

namespace ciss::scan {

struct AngleTriple {
  Angle theta_a;
  Angle theta_b;
  Angle theta_c;

  AngleTriple() = default;
  AngleTriple(double a, double b, double c) : theta_a(a), theta_b(b), theta_c(c) {}
};

/// Closed-interval grid of angles in degrees: start, start + step, ..., stop.
/// A grid with start == stop holds one node.
class ScanGrid {
 public:
  static constexpr double kDefaultStep = 6.0;

  /// Throws std::invalid_argument unless step > 0, start <= stop and
  /// (stop - start) is an integer multiple of step.
  ScanGrid(double start, double stop, double step = kDefaultStep);

  static ScanGrid full(double step = kDefaultStep) { return {0.0, 180.0, step}; }
  static ScanGrid fixed(double degrees) { return {degrees, degrees, 1.0}; }

  double start() const { return start_; }
  double stop() const { return stop_; }
  double step() const { return step_; }
  std::size_t size() const { return count_; }
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

 private:
  double start_;
  double stop_;
  double step_;
  std::size_t count_;
};

/// S sampled on a rectilinear grid; values are row-major over
/// (theta_a, theta_b, theta_c).
struct SLandscape {
  std::array<std::vector<double>, 3> axes;
  std::vector<double> values;

  std::size_t index(std::size_t ia, std::size_t ib, std::size_t ic) const {
    return (ia * axes[1].size() + ib) * axes[2].size() + ic;
  }
  double at(std::size_t ia, std::size_t ib, std::size_t ic) const {
    return values[index(ia, ib, ic)];
  }
  /// Axes (0 = a, 1 = b, 2 = c) with more than one node.
  std::vector<int> varying_axes() const;
};

inline const std::array<std::string, 3> kAxisNames{"theta_a", "theta_b",
                                                  "theta_c"};

/// S = sin^2(b-a) cos^2 a + sin^2(c-b) cos^2 b - sin^2(c-a) cos^2 a
double s_quantum(const AngleTriple& t);
inline double s_quantum(double a, double b, double c) {
  return s_quantum(AngleTriple(a, b, c));
}

/// Evaluates S at every node. Pin an angle with ScanGrid::fixed.
SLandscape grid_scan(const std::array<ScanGrid, 3>& grids);

struct Optimum {
  double s_min = 0.0;
  AngleTriple argmin;
  /// Every refined point within kDegeneracyTolerance of s_min, canonical
  /// angles, best first.
  std::vector<AngleTriple> degenerate;
  std::uint64_t evaluations = 0;
  double coarse_min = 0.0;
};

inline constexpr int kDefaultStarts = 5;
inline constexpr double kDegeneracyTolerance = 1e-4;

/// Coarse scan of `seed` on all three axes, then compass-search refinement
/// from the best `starts` nodes until the step drops below `tolerance`
/// degrees. Throws std::invalid_argument for tolerance <= 0.
Optimum minimize_s(const ScanGrid& seed, double tolerance,
                   int starts = kDefaultStarts);

}  // namespace ciss::scan
