#include "ciss/s_scan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ciss/parallel.hpp"

namespace ciss::scan {

ScanGrid::ScanGrid(double start, double stop, double step)
    : start_(start), stop_(stop), step_(step), count_(1) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw std::invalid_argument("scan grid: non-finite bound");
  }
  if (!(step > 0.0)) throw std::invalid_argument("scan grid: step must be > 0");
  if (start > stop) throw std::invalid_argument("scan grid: start > stop");
  const double intervals = (stop - start) / step;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, intervals)) {
    throw std::invalid_argument(
        "scan grid: range is not an integer multiple of step");
  }
  count_ = static_cast<std::size_t>(rounded) + 1;
}

double ScanGrid::node(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("scan grid node");
  if (i + 1 == count_) return stop_;
  return start_ + static_cast<double>(i) * step_;
}

std::vector<double> ScanGrid::nodes() const {
  std::vector<double> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = node(i);
  return out;
}

std::vector<int> SLandscape::varying_axes() const {
  std::vector<int> out;
  for (int k = 0; k < 3; ++k) {
    if (axes[k].size() > 1) out.push_back(k);
  }
  return out;
}

double s_quantum(const AngleTriple& t) {
  const double a = t.theta_a.radians();
  const double b = t.theta_b.radians();
  const double c = t.theta_c.radians();
  auto sq = [](double x) { return x * x; };
  const double cos2a = sq(std::cos(a));
  const double p_ab = sq(std::sin(b - a)) * cos2a;
  const double p_bc = sq(std::sin(c - b)) * sq(std::cos(b));
  const double p_ac = sq(std::sin(c - a)) * cos2a;
  return p_ab + p_bc - p_ac;
}

SLandscape grid_scan(const std::array<ScanGrid, 3>& grids) {
  SLandscape land;
  for (int k = 0; k < 3; ++k) land.axes[k] = grids[k].nodes();
  const std::size_t nb = land.axes[1].size();
  const std::size_t nc = land.axes[2].size();
  land.values.resize(land.axes[0].size() * nb * nc);
  parallel_for(land.values.size(), [&](std::size_t i) {
    const std::size_t ia = i / (nb * nc);
    const std::size_t ib = (i / nc) % nb;
    const std::size_t ic = i % nc;
    land.values[i] =
        s_quantum(land.axes[0][ia], land.axes[1][ib], land.axes[2][ic]);
  });
  return land;
}

namespace {

struct Point {
  std::array<double, 3> x;
  double s;
};

double eval(const std::array<double, 3>& x) { return s_quantum(x[0], x[1], x[2]); }

// Compass search: try +-h along each axis, move to the best improving
// neighbour, halve h when none improves.
Point refine(Point p, double h, double tolerance, std::uint64_t& evaluations) {
  while (h >= tolerance) {
    Point best = p;
    for (int axis = 0; axis < 3; ++axis) {
      for (double dir : {+1.0, -1.0}) {
        Point q = p;
        q.x[axis] += dir * h;
        q.s = eval(q.x);
        ++evaluations;
        if (q.s < best.s) best = q;
      }
    }
    if (best.s < p.s) {
      p = best;
    } else {
      h *= 0.5;
    }
  }
  return p;
}

double periodic_distance(double x, double y) {
  const double d = std::abs(Angle::canonicalize(x) - Angle::canonicalize(y));
  return std::min(d, 180.0 - d);
}

}  // namespace

Optimum minimize_s(const ScanGrid& seed, double tolerance, int starts) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("minimize_s: tolerance must be > 0");
  }
  if (starts < 1) throw std::invalid_argument("minimize_s: starts must be >= 1");

  const SLandscape coarse = grid_scan({seed, seed, seed});
  Optimum result;
  result.evaluations = coarse.values.size();

  std::vector<std::size_t> order(coarse.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable sort keeps the lowest row-major index first among equal values.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return coarse.values[i] < coarse.values[j];
  });
  result.coarse_min = coarse.values[order.front()];

  const std::size_t n = seed.size();
  const std::size_t k = std::min<std::size_t>(starts, order.size());
  const double initial_step =
      n > 1 ? seed.step() / 2.0 : std::max(seed.step(), tolerance);

  std::vector<Point> refined(k);
  std::vector<std::uint64_t> evals(k, 0);
  parallel_for(k, [&](std::size_t r) {
    const std::size_t i = order[r];
    Point p{{seed.node(i / (n * n)), seed.node((i / n) % n), seed.node(i % n)},
            coarse.values[i]};
    refined[r] = refine(p, initial_step, tolerance, evals[r]);
  });
  for (auto e : evals) result.evaluations += e;

  std::stable_sort(refined.begin(), refined.end(),
                   [](const Point& p, const Point& q) { return p.s < q.s; });
  result.s_min = refined.front().s;

  // Distinct representatives of the degenerate minima.
  const double same_point = std::max(10.0 * tolerance, 0.05);
  std::vector<Point> distinct;
  for (const Point& p : refined) {
    if (p.s > result.s_min + kDegeneracyTolerance) break;
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const Point& q) {
      for (int a = 0; a < 3; ++a) {
        if (periodic_distance(p.x[a], q.x[a]) > same_point) return false;
      }
      return true;
    });
    if (!seen) distinct.push_back(p);
  }
  for (const Point& p : distinct) {
    result.degenerate.emplace_back(p.x[0], p.x[1], p.x[2]);
  }
  result.argmin = result.degenerate.front();
  return result;
}

}  // namespace ciss::scan
