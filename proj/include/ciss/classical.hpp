#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ciss/qubit.hpp"

namespace ciss::classical {

using qubit::Outcome;

enum class Property { A, B, C };

/// One simultaneous value assignment (a^alpha b^beta c^gamma).
struct GeneralizedState {
  Outcome alpha = Outcome::Plus;
  Outcome beta = Outcome::Plus;
  Outcome gamma = Outcome::Plus;

  Outcome value_of(Property p) const;

  /// Index in [0, 8); alpha is the most significant digit and + sorts
  /// before -, so 0 is (a+b+c+) and 7 is (a-b-c-).
  int index() const;
  static GeneralizedState from_index(int i);

  /// Renders e.g. "a+b-c-".
  std::string label() const;

  friend bool operator==(const GeneralizedState&,
                         const GeneralizedState&) = default;
};

inline constexpr int kAtomCount = 8;

/// All eight atoms in index order.
std::array<GeneralizedState, kAtomCount> all_states();

struct PropertyValue {
  Property property;
  Outcome outcome;
};

using PropertyPair = std::pair<PropertyValue, PropertyValue>;

inline constexpr double kWeightSumTolerance = 1e-9;

/// Probability weighting over the eight generalized states.
class ClassicalEnsemble {
 public:
  /// Throws std::invalid_argument unless every weight is in [0, 1] and the
  /// weights sum to 1 within kWeightSumTolerance.
  explicit ClassicalEnsemble(const std::array<double, kAtomCount>& weights);

  static ClassicalEnsemble point_mass(const GeneralizedState& s);
  static ClassicalEnsemble uniform();

  double weight(const GeneralizedState& s) const { return weights_[s.index()]; }
  const std::array<double, kAtomCount>& weights() const { return weights_; }

 private:
  std::array<double, kAtomCount> weights_{};
};

/// The three joints entering S.
struct JointTriple {
  double p_ac = 0.0;
  double p_ab = 0.0;
  double p_bc = 0.0;

  JointTriple() = default;
  /// Throws std::invalid_argument for entries outside [0, 1].
  JointTriple(double ac, double ab, double bc);

  double s() const { return p_ab + p_bc - p_ac; }
};

/// 1 when the state carries both requested values, else 0. Throws
/// std::invalid_argument when both entries name the same property.
double atom_joint(const GeneralizedState& state, const PropertyPair& pair);

double ensemble_joint(const ClassicalEnsemble& ens, const PropertyPair& pair);

/// The triple (P(a+c-), P(a+b-), P(b+c-)) of an ensemble.
JointTriple ensemble_triple(const ClassicalEnsemble& ens);

/// S = P(a+b-) + P(b+c-) - P(a+c-)
double s_classical(const ClassicalEnsemble& ens);

inline constexpr double kCissEpsilon = 1e-9;

/// P(a+c-) <= P(a+b-) + P(b+c-) + kCissEpsilon
bool ciss_check(const JointTriple& t);

struct Vertex {
  GeneralizedState state;
  double s = 0.0;
};

/// S of every point-mass ensemble, in atom index order.
std::vector<Vertex> enumerate_vertices();

inline constexpr double kFitTolerance = 1e-6;

/// An ensemble reproducing the triple within kFitTolerance, or nullopt when
/// no classical ensemble does.
std::optional<ClassicalEnsemble> fit_classical(const JointTriple& t);

}  // namespace ciss::classical
