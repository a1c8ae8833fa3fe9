#pragma once

// Brute-force reference implementations and seeded generators shared by the
// unit and acceptance tests. Nothing here calls the routine it checks.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "rankone/lattice_geometry.hpp"
#include "rankone/rank_one_construction.hpp"
#include "rankone/rational.hpp"
#include "rankone/tower_algebra.hpp"

namespace oracle {

using rankone::Index;
using rankone::LatticePoint;
using rankone::Rational;
using Point = std::vector<Index>;
using PointSet = std::set<Point>;

inline Point to_vec(const LatticePoint& p) { return Point(p.data(), p.data() + p.size()); }

inline PointSet to_set(const rankone::Shape& s) {
  PointSet out;
  for (Index i = 0; i < s.size(); ++i) out.insert(to_vec(s.point(i)));
  return out;
}

inline rankone::Shape to_shape(int dim, const PointSet& s) {
  std::vector<LatticePoint> pts;
  for (const Point& p : s) {
    LatticePoint q(dim);
    for (int i = 0; i < dim; ++i) q(i) = p[static_cast<std::size_t>(i)];
    pts.push_back(q);
  }
  return rankone::Shape(dim, pts);
}

inline Point add(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Point sub(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// All points of the box [lo, hi].
inline PointSet box(const Point& lo, const Point& hi) {
  PointSet out;
  Point p = lo;
  for (;;) {
    out.insert(p);
    std::size_t i = p.size();
    while (i > 0 && p[i - 1] == hi[i - 1]) {
      p[i - 1] = lo[i - 1];
      --i;
    }
    if (i == 0) return out;
    ++p[i - 1];
  }
}

/// ∂_S(R) with anchors ranging over R.
inline PointSet anchored_boundary(const PointSet& r, const PointSet& s) {
  PointSet out;
  for (const Point& v : r) {
    bool straddles = false;
    for (const Point& x : s) straddles = straddles || !r.count(add(x, v));
    if (!straddles) continue;
    for (const Point& x : s)
      if (r.count(add(x, v))) out.insert(add(x, v));
  }
  return out;
}

inline PointSet symmetric_difference(const PointSet& a, const PointSet& b) {
  PointSet out;
  for (const Point& p : a)
    if (!b.count(p)) out.insert(p);
  for (const Point& p : b)
    if (!a.count(p)) out.insert(p);
  return out;
}

inline PointSet translate(const PointSet& a, const Point& v) {
  PointSet out;
  for (const Point& p : a) out.insert(add(p, v));
  return out;
}

inline bool pairwise_disjoint(const PointSet& r, const PointSet& j) {
  std::vector<PointSet> copies;
  for (const Point& v : j) copies.push_back(translate(r, v));
  for (std::size_t a = 0; a < copies.size(); ++a)
    for (std::size_t b = a + 1; b < copies.size(); ++b)
      for (const Point& p : copies[a])
        if (copies[b].count(p)) return false;
  return true;
}

/// A random subset of the box [0, side)^d containing each point with probability p
/// (never empty: the origin is forced in when nothing was drawn).
inline PointSet random_set(int d, Index side, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  PointSet out;
  for (const Point& q : box(Point(static_cast<std::size_t>(d), 0), Point(static_cast<std::size_t>(d), side - 1)))
    if (keep(rng)) out.insert(q);
  if (out.empty()) out.insert(Point(static_cast<std::size_t>(d), 0));
  return out;
}

/// Label of `cell` in tower j found by scanning the placements directly.
inline std::int32_t placement_label(const rankone::LevelKModel& model, int j, const LatticePoint& cell) {
  const auto& placements = model.placements(j);
  const auto& r = model.rect(j);
  for (Index c = 0; c < placements.cols(); ++c) {
    const LatticePoint local = cell - placements.col(c);
    if (r.contains(local)) return static_cast<std::int32_t>(r.linear_index(local));
  }
  return rankone::kErrorLabel;
}

/// Name distribution at j = K recomputed from scanned placements (no label
/// arrays, no stage maps). Windows leaving R_K are lumped.
struct Distribution {
  std::map<std::vector<std::int32_t>, Rational> names;
  Rational bad = 0;
};

inline Distribution names_by_scan(const rankone::LevelKModel& model, int k, const rankone::Shape& window) {
  Distribution out;
  const auto& space = model.space();
  const Rational unit = model.cell_measure();
  for (Index c = 0; c < space.cardinality(); ++c) {
    const LatticePoint x = space.point_at(c);
    std::vector<std::int32_t> name;
    bool inside = true;
    for (Index w = 0; w < window.size() && inside; ++w) {
      const LatticePoint y = x + window.point(w);
      inside = space.contains(y);
      if (inside) name.push_back(placement_label(model, k, y));
    }
    if (inside) out.names[name] += unit;
    else out.bad += unit;
  }
  return out;
}

/// -Σ p log p in double precision.
inline double entropy(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

/// Entropy of the partition whose good cells are grouped by W-name and whose
/// bad cells are grouped by their own W-names, with cells outside R_K read as
/// the error label. Computed from placement scans only.
inline double split_entropy(const rankone::LevelKModel& model, int k, int j, const rankone::Shape& window) {
  const auto& space = model.space();
  const auto& rj = model.rect(j);
  std::map<std::pair<bool, std::vector<std::int32_t>>, Index> counts;
  for (Index c = 0; c < space.cardinality(); ++c) {
    const LatticePoint x = space.point_at(c);
    bool good = false;
    const std::int32_t lab = placement_label(model, j, x);
    if (lab != rankone::kErrorLabel) {
      const LatticePoint v = rj.point_at(lab);
      good = true;
      for (Index w = 0; w < window.size(); ++w) good = good && rj.contains(LatticePoint(v + window.point(w)));
    }
    std::vector<std::int32_t> name;
    for (Index w = 0; w < window.size(); ++w) {
      const LatticePoint y = x + window.point(w);
      name.push_back(space.contains(y) ? placement_label(model, k, y) : rankone::kErrorLabel);
    }
    ++counts[{good, name}];
  }
  std::vector<double> p;
  for (const auto& [key, n] : counts) p.push_back(static_cast<double>(n) / static_cast<double>(space.cardinality()));
  return oracle::entropy(p);
}

/// Entropy of the W-name partition of R_K in tower-k labels, cells outside
/// R_K read as the error label.
inline double name_entropy(const rankone::LevelKModel& model, int k, const rankone::Shape& window) {
  const auto& space = model.space();
  std::map<std::vector<std::int32_t>, Index> counts;
  for (Index c = 0; c < space.cardinality(); ++c) {
    std::vector<std::int32_t> name;
    for (Index w = 0; w < window.size(); ++w) {
      const LatticePoint y = space.point_at(c) + window.point(w);
      name.push_back(space.contains(y) ? placement_label(model, k, y) : rankone::kErrorLabel);
    }
    ++counts[name];
  }
  std::vector<double> p;
  for (const auto& [name, n] : counts) p.push_back(static_cast<double>(n) / static_cast<double>(space.cardinality()));
  return entropy(p);
}

/// Cellwise tower distance from level sets: Σ_a |P_a △ Q_a| / N, including the error set.
inline Rational distance_by_levels(const rankone::LabeledTower& p, const rankone::LabeledTower& q) {
  const Index n = p.cell_count();
  Index total = 0;
  auto as_set = [](const rankone::CellSet& c) { return std::set<Index>(c.begin(), c.end()); };
  for (Index a = 0; a < p.shape().size(); ++a) {
    const auto pa = as_set(p.level(a));
    const auto qa = as_set(q.level(a));
    for (Index c : pa) total += !qa.count(c);
    for (Index c : qa) total += !pa.count(c);
  }
  const auto pe = as_set(p.error_set());
  const auto qe = as_set(q.error_set());
  for (Index c : pe) total += !qe.count(c);
  for (Index c : qe) total += !pe.count(c);
  return rankone::make_rational(total, n);
}

}  // namespace oracle
