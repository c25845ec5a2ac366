#include "ciss/qubit.hpp"

#include <cmath>
#include <stdexcept>

namespace ciss::qubit {

PureState::PureState(complex_t amp_h, complex_t amp_v)
    : amp_h_(amp_h), amp_v_(amp_v) {
  const double norm = std::norm(amp_h) + std::norm(amp_v);
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("PureState: amplitudes are not normalized");
  }
}

complex_t PureState::inner(const PureState& other) const {
  return std::conj(amp_h_) * other.amp_h_ + std::conj(amp_v_) * other.amp_v_;
}

PureState eigenstate(PropertySetting prop, Outcome out) {
  const double t = prop.orientation.radians();
  const double c = std::cos(t);
  const double s = std::sin(t);
  if (out == Outcome::Plus) return {c, s};
  return {s, -c};
}

double transition_probability(const PureState& s1, const PureState& s2) {
  return std::norm(s1.inner(s2));
}

double conditional_probability(const Projection& meas, const Projection& prep) {
  return transition_probability(eigenstate(meas), eigenstate(prep));
}

double marginal_probability(const PureState& initial, const Projection& prep) {
  return transition_probability(eigenstate(prep), initial);
}

double joint_probability(const PureState& initial, const Projection& first,
                         const Projection& second) {
  return marginal_probability(initial, first) *
         conditional_probability(second, first);
}

}  // namespace ciss::qubit
