#pragma once

#include <cmath>
#include <numbers>

namespace ciss {

/// Orientation of a linear polarizer in degrees, held in its canonical
/// representative in [0, 180).
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double degrees) : degrees_(canonicalize(degrees)) {}

  static double canonicalize(double degrees) {
    double r = std::fmod(degrees, 180.0);
    if (r < 0.0) r += 180.0;
    // fmod of a tiny negative number can round up to exactly 180.
    if (r >= 180.0) r = 0.0;
    return r;
  }

  double degrees() const { return degrees_; }
  double radians() const { return degrees_ * std::numbers::pi / 180.0; }

  friend bool operator==(Angle, Angle) = default;

 private:
  double degrees_ = 0.0;
};

inline double to_radians(double degrees) {
  return degrees * std::numbers::pi / 180.0;
}

}  // namespace ciss
