#pragma once

#include <complex>

#include "ciss/angle.hpp"

namespace ciss::qubit {

using complex_t = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;

/// Polarization state in the {H, V} basis. Construction enforces
/// |amp_H|^2 + |amp_V|^2 = 1 within kNormTolerance.
class PureState {
 public:
  PureState(complex_t amp_h, complex_t amp_v);

  static PureState horizontal() { return {1.0, 0.0}; }
  static PureState vertical() { return {0.0, 1.0}; }

  complex_t amp_h() const { return amp_h_; }
  complex_t amp_v() const { return amp_v_; }

  /// <this|other>
  complex_t inner(const PureState& other) const;

 private:
  complex_t amp_h_;
  complex_t amp_v_;
};

enum class Outcome : int { Plus = +1, Minus = -1 };

inline int sign(Outcome o) { return static_cast<int>(o); }
inline Outcome flip(Outcome o) {
  return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus;
}

/// Dichotomic linear-polarization observable; its +1 eigenstate is
/// polarized along `orientation`.
struct PropertySetting {
  Angle orientation;

  PropertySetting() = default;
  explicit PropertySetting(Angle a) : orientation(a) {}
  explicit PropertySetting(double degrees) : orientation(degrees) {}
};

/// One eigenvalue of one property, e.g. pi+ or mu-.
struct Projection {
  PropertySetting property;
  Outcome outcome;
};

inline Projection plus(double degrees) {
  return {PropertySetting(degrees), Outcome::Plus};
}
inline Projection minus(double degrees) {
  return {PropertySetting(degrees), Outcome::Minus};
}

/// |q+> = cos t |H> + sin t |V>,  |q-> = sin t |H> - cos t |V>.
PureState eigenstate(PropertySetting prop, Outcome out);
inline PureState eigenstate(const Projection& p) {
  return eigenstate(p.property, p.outcome);
}

/// |<s1|s2>|^2
double transition_probability(const PureState& s1, const PureState& s2);

/// Born probability of `meas` for a system prepared in the eigenstate `prep`.
double conditional_probability(const Projection& meas, const Projection& prep);

/// Probability that `initial` passes the preparation projector `prep`.
double marginal_probability(const PureState& initial, const Projection& prep);

/// P(first, second) = P(first | initial) * P(second | first): prepare `first`
/// out of `initial`, then measure `second`. Not symmetric in its arguments.
double joint_probability(const PureState& initial, const Projection& first,
                         const Projection& second);

}  // namespace ciss::qubit
