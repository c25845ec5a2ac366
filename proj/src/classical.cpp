#include "ciss/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ciss::classical {

Outcome GeneralizedState::value_of(Property p) const {
  switch (p) {
    case Property::A: return alpha;
    case Property::B: return beta;
    case Property::C: return gamma;
  }
  throw std::invalid_argument("unknown property");
}

int GeneralizedState::index() const {
  auto bit = [](Outcome o) { return o == Outcome::Plus ? 0 : 1; };
  return bit(alpha) * 4 + bit(beta) * 2 + bit(gamma);
}

GeneralizedState GeneralizedState::from_index(int i) {
  if (i < 0 || i >= kAtomCount) {
    throw std::out_of_range("generalized state index out of range");
  }
  auto val = [](int bit) { return bit ? Outcome::Minus : Outcome::Plus; };
  return {val((i >> 2) & 1), val((i >> 1) & 1), val(i & 1)};
}

std::string GeneralizedState::label() const {
  auto c = [](Outcome o) { return o == Outcome::Plus ? '+' : '-'; };
  return std::string{'a', c(alpha), 'b', c(beta), 'c', c(gamma)};
}

std::array<GeneralizedState, kAtomCount> all_states() {
  std::array<GeneralizedState, kAtomCount> out;
  for (int i = 0; i < kAtomCount; ++i) out[i] = GeneralizedState::from_index(i);
  return out;
}

ClassicalEnsemble::ClassicalEnsemble(
    const std::array<double, kAtomCount>& weights)
    : weights_(weights) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw std::invalid_argument("ensemble weight outside [0, 1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("ensemble weights do not sum to 1");
  }
}

ClassicalEnsemble ClassicalEnsemble::point_mass(const GeneralizedState& s) {
  std::array<double, kAtomCount> w{};
  w[s.index()] = 1.0;
  return ClassicalEnsemble(w);
}

ClassicalEnsemble ClassicalEnsemble::uniform() {
  std::array<double, kAtomCount> w;
  w.fill(1.0 / kAtomCount);
  return ClassicalEnsemble(w);
}

JointTriple::JointTriple(double ac, double ab, double bc)
    : p_ac(ac), p_ab(ab), p_bc(bc) {
  for (double p : {ac, ab, bc}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("joint probability outside [0, 1]");
    }
  }
}

double atom_joint(const GeneralizedState& state, const PropertyPair& pair) {
  const auto& [first, second] = pair;
  if (first.property == second.property) {
    throw std::invalid_argument("joint must name two distinct properties");
  }
  return state.value_of(first.property) == first.outcome &&
                 state.value_of(second.property) == second.outcome
             ? 1.0
             : 0.0;
}

double ensemble_joint(const ClassicalEnsemble& ens, const PropertyPair& pair) {
  double total = 0.0;
  for (const auto& s : all_states()) total += ens.weight(s) * atom_joint(s, pair);
  return total;
}

namespace {

const PropertyPair kPairAC{{Property::A, Outcome::Plus},
                           {Property::C, Outcome::Minus}};
const PropertyPair kPairAB{{Property::A, Outcome::Plus},
                           {Property::B, Outcome::Minus}};
const PropertyPair kPairBC{{Property::B, Outcome::Plus},
                           {Property::C, Outcome::Minus}};

// Solves the 4x4 system m * x = rhs in place by Gaussian elimination with
// partial pivoting. Returns false for (numerically) singular systems.
bool solve4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> rhs,
            std::array<double, 4>& x) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (std::abs(m[piv][col]) < 1e-12) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < 4; ++c) acc -= m[r][c] * x[c];
    x[r] = acc / m[r][r];
  }
  return true;
}

double max_triple_error(const JointTriple& a, const JointTriple& b) {
  return std::max({std::abs(a.p_ac - b.p_ac), std::abs(a.p_ab - b.p_ab),
                   std::abs(a.p_bc - b.p_bc)});
}

}  // namespace

JointTriple ensemble_triple(const ClassicalEnsemble& ens) {
  JointTriple t;
  t.p_ac = ensemble_joint(ens, kPairAC);
  t.p_ab = ensemble_joint(ens, kPairAB);
  t.p_bc = ensemble_joint(ens, kPairBC);
  return t;
}

double s_classical(const ClassicalEnsemble& ens) {
  return ensemble_joint(ens, kPairAB) + ensemble_joint(ens, kPairBC) -
         ensemble_joint(ens, kPairAC);
}

bool ciss_check(const JointTriple& t) {
  return t.p_ac <= t.p_ab + t.p_bc + kCissEpsilon;
}

std::vector<Vertex> enumerate_vertices() {
  std::vector<Vertex> out;
  out.reserve(kAtomCount);
  for (const auto& s : all_states()) {
    out.push_back({s, s_classical(ClassicalEnsemble::point_mass(s))});
  }
  return out;
}

// The feasible set {w >= 0 : sum w = 1, A w = t} is a polytope; if it is
// non-empty it has a vertex, and every vertex is a basic solution supported
// on 4 of the 8 atoms. Trying all 70 supports decides feasibility exactly.
std::optional<ClassicalEnsemble> fit_classical(const JointTriple& t) {
  const auto states = all_states();
  std::array<std::array<double, 4>, kAtomCount> column{};
  for (int i = 0; i < kAtomCount; ++i) {
    column[i] = {1.0, atom_joint(states[i], kPairAC),
                 atom_joint(states[i], kPairAB), atom_joint(states[i], kPairBC)};
  }
  const std::array<double, 4> rhs{1.0, t.p_ac, t.p_ab, t.p_bc};

  for (int i0 = 0; i0 < kAtomCount; ++i0)
    for (int i1 = i0 + 1; i1 < kAtomCount; ++i1)
      for (int i2 = i1 + 1; i2 < kAtomCount; ++i2)
        for (int i3 = i2 + 1; i3 < kAtomCount; ++i3) {
          const std::array<int, 4> support{i0, i1, i2, i3};
          std::array<std::array<double, 4>, 4> m{};
          for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m[r][c] = column[support[c]][r];
          std::array<double, 4> x{};
          if (!solve4(m, rhs, x)) continue;
          if (*std::min_element(x.begin(), x.end()) < -kFitTolerance) continue;

          std::array<double, kAtomCount> w{};
          for (int c = 0; c < 4; ++c) {
            w[support[c]] = x[c] < 1e-12 ? 0.0 : x[c];
          }
          const double sum = std::accumulate(w.begin(), w.end(), 0.0);
          if (sum <= 0.0) continue;
          for (double& v : w) v = std::min(v / sum, 1.0);

          ClassicalEnsemble ens(w);
          if (max_triple_error(ensemble_triple(ens), t) <= kFitTolerance) {
            return ens;
          }
        }
  return std::nullopt;
}

}  // namespace ciss::classical
