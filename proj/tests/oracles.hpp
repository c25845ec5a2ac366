#pragma once

// Test-only reference computations. They deliberately avoid the library's
// code paths: probabilities come from 2x2 projector matrices and traces,
// angle arithmetic is done in long double.

#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

using Mat2 = std::array<std::array<long double, 2>, 2>;

inline long double rad(long double deg) {
  return deg * std::numbers::pi_v<long double> / 180.0L;
}

// Projector onto linear polarization at `deg` from horizontal.
inline Mat2 projector(long double deg) {
  const long double c = std::cos(rad(deg));
  const long double s = std::sin(rad(deg));
  return {{{c * c, c * s}, {c * s, s * s}}};
}

// Outcome -1 of the property at `deg` is polarization at deg + 90.
inline Mat2 projector(long double deg, int outcome) {
  return projector(outcome > 0 ? deg : deg + 90.0L);
}

// tr(P Q) for rank-1 projectors equals |<p|q>|^2.
inline long double trace_product(const Mat2& p, const Mat2& q) {
  long double t = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t += p[i][j] * q[j][i];
  return t;
}

inline long double born(long double meas_deg, int meas_out, long double prep_deg,
                        int prep_out) {
  return trace_product(projector(meas_deg, meas_out), projector(prep_deg, prep_out));
}

// P(first, second) starting from |H>.
inline long double joint(long double first_deg, int first_out,
                         long double second_deg, int second_out) {
  return born(first_deg, first_out, 0.0L, +1) *
         born(second_deg, second_out, first_deg, first_out);
}

inline long double s_value(long double a, long double b, long double c) {
  return joint(a, +1, b, -1) + joint(b, +1, c, -1) - joint(a, +1, c, -1);
}

}  // namespace oracle
