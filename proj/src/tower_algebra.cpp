#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "rankone/tower_algebra.hpp"

namespace rankone {

namespace {

void require_same_space(const LabeledTower& p, const LabeledTower& q) {
  if (!(p.space() == q.space())) throw std::invalid_argument("towers live in different spaces");
}

CellSet sorted_unique(CellSet cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

Index symmetric_difference_count(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return static_cast<Index>(out.size());
}

Shape shape_from_columns(const Shape& s, const std::vector<Index>& columns) {
  PointMatrix pts(s.dim(), static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) pts.col(static_cast<Index>(i)) = s.point(columns[i]);
  return Shape(pts);
}

}  // namespace

LabeledTower::LabeledTower(Rectangle space, Shape shape, CellSet base)
    : space_(std::move(space)), shape_(std::move(shape)), base_(sorted_unique(std::move(base))) {
  if (shape_.dim() != space_.dim()) throw DimensionMismatch(space_.dim(), shape_.dim());
  if (shape_.empty()) throw std::invalid_argument("tower shape must be nonempty");
  const Index n = space_.cardinality();
  labels_.assign(static_cast<std::size_t>(n), kErrorLabel);
  LatticePoint q(space_.dim());
  for (Index b : base_) {
    if (b < 0 || b >= n) throw std::out_of_range("base cell outside the space");
    const LatticePoint p = space_.point_at(b);
    for (Index a = 0; a < shape_.size(); ++a) {
      q = p + shape_.point(a);
      if (!space_.contains(q)) throw std::invalid_argument("tower level leaves the space");
      auto& slot = labels_[static_cast<std::size_t>(space_.linear_index(q))];
      if (slot != kErrorLabel) throw std::invalid_argument("tower levels overlap");
      slot = static_cast<std::int32_t>(a);
    }
  }
}

CellSet LabeledTower::level(Index a) const {
  if (a < 0 || a >= shape_.size()) throw std::out_of_range("level label outside the shape");
  return translate_cells(space_, base_, LatticePoint(shape_.point(a)));
}

CellSet LabeledTower::error_set() const {
  CellSet out;
  for (Index c = 0; c < cell_count(); ++c)
    if (label(c) == kErrorLabel) out.push_back(c);
  return out;
}

Rational LabeledTower::error_mass() const {
  return 1 - make_rational(static_cast<Index>(base_.size()) * shape_.size(), cell_count());
}

LabeledTower tower_from_model(const LevelKModel& model, int j) {
  const PointMatrix& placements = model.placements(j);
  CellSet base;
  base.reserve(static_cast<std::size_t>(placements.cols()));
  for (Index c = 0; c < placements.cols(); ++c) base.push_back(model.space().linear_index(placements.col(c)));
  return LabeledTower(model.space(), model.rect(j).to_shape(), std::move(base));
}

CellSet translate_cells(const Rectangle& space, const CellSet& cells, const LatticePoint& v) {
  CellSet out;
  out.reserve(cells.size());
  for (Index c : cells) {
    const LatticePoint q = space.point_at(c) + v;
    if (!space.contains(q)) throw std::out_of_range("translated cell leaves the space");
    out.push_back(space.linear_index(q));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool refines(const LabeledTower& p, const LabeledTower& q) {
  require_same_space(p, q);
  std::unordered_map<std::int32_t, std::int32_t> image;
  for (Index c = 0; c < p.cell_count(); ++c) {
    const auto [it, inserted] = image.emplace(q.label(c), p.label(c));
    if (!inserted && it->second != p.label(c)) return false;
  }
  return true;
}

Rational tower_distance(const LabeledTower& p, const LabeledTower& q) {
  require_same_space(p, q);
  if (!(p.shape() == q.shape())) throw std::invalid_argument("tower_distance needs towers of the same shape");
  Index mismatched = 0;
  for (Index c = 0; c < p.cell_count(); ++c)
    if (p.label(c) != q.label(c)) ++mismatched;
  // A mismatched cell lies in exactly two of the symmetric differences.
  return make_rational(2 * mismatched, p.cell_count());
}

std::vector<Index> majority_labels(const CellSet& a, const LabeledTower& p) {
  std::vector<Index> hits(static_cast<std::size_t>(p.shape().size()), 0);
  for (Index c : sorted_unique(a)) {
    if (c < 0 || c >= p.cell_count()) throw std::out_of_range("cell outside the space");
    const std::int32_t lab = p.label(c);
    if (lab != kErrorLabel) ++hits[static_cast<std::size_t>(lab)];
  }
  const Index level_size = static_cast<Index>(p.base().size());
  std::vector<Index> out;
  for (Index lab = 0; lab < p.shape().size(); ++lab)
    if (2 * hits[static_cast<std::size_t>(lab)] > level_size) out.push_back(lab);
  return out;
}

CellSet majority_set(const CellSet& a, const LabeledTower& p) {
  CellSet out;
  for (Index lab : majority_labels(a, p)) {
    const CellSet level = p.level(lab);
    out.insert(out.end(), level.begin(), level.end());
  }
  return sorted_unique(std::move(out));
}

LabeledTower restrict_tower(const LabeledTower& q, const Shape& r, const Shape& j) {
  if (r.dim() != q.shape().dim()) throw DimensionMismatch(q.shape().dim(), r.dim());
  if (j.dim() != r.dim()) throw DimensionMismatch(r.dim(), j.dim());
  if (!is_separated(r, j)) throw std::invalid_argument("J is not R-separated");
  if (!minkowski_sum(r, j).is_subset_of(q.shape())) throw std::invalid_argument("R + J is not contained in S");
  CellSet base;
  for (Index i = 0; i < j.size(); ++i) {
    const CellSet part = translate_cells(q.space(), q.base(), LatticePoint(j.point(i)));
    base.insert(base.end(), part.begin(), part.end());
  }
  LabeledTower out(q.space(), r, std::move(base));
  if (!refines(out, q)) throw std::logic_error("Q_J is not refined by Q");
  return out;
}

DerivedTower derived_tower(const LabeledTower& p, const LabeledTower& q, bool require_refinement) {
  require_same_space(p, q);
  const Shape& r = p.shape();
  const Shape& s = q.shape();
  if (!r.contains(LatticePoint::Zero(r.dim()))) throw std::invalid_argument("shape of P must contain 0");
  if (!r.is_subset_of(s)) throw std::invalid_argument("shape of P must lie inside the shape of Q");
  if (require_refinement && !refines(p, q)) throw std::invalid_argument("P is not refined by Q");

  DerivedTower out{std::nullopt, Shape(r.dim()), shape_from_columns(s, majority_labels(p.base(), q)),
                   inner_boundary(s, r)};
  if (out.majority.empty()) throw std::invalid_argument("A(Q) is empty");
  std::vector<LatticePoint> kept;
  for (Index i = 0; i < out.majority.size(); ++i)
    if (!out.boundary.contains(out.majority.point(i))) kept.emplace_back(out.majority.point(i));
  out.stacking = Shape(r.dim(), kept);
  if (out.stacking.empty()) return out;
  if (!is_separated(r, out.stacking)) throw std::logic_error("derived stacking set is not R-separated");
  out.tower = restrict_tower(q, r, out.stacking);
  return out;
}

NeedgeomSides needgeom_sides(const LabeledTower& p, const LabeledTower& q, bool require_refinement) {
  const DerivedTower derived = derived_tower(p, q, require_refinement);
  const Index n = p.cell_count();
  const Index r_size = p.shape().size();
  const Rational mu_b = q.level_mass();
  const Rational a_diff = make_rational(symmetric_difference_count(majority_set(p.base(), q), p.base()), n);
  Index majority_in_boundary = 0;
  for (Index i = 0; i < derived.majority.size(); ++i)
    if (derived.boundary.contains(derived.majority.point(i))) ++majority_in_boundary;

  NeedgeomSides out;
  out.paper_rhs = r_size * a_diff + derived.boundary.size() * mu_b + r_size * q.error_mass();
  out.corrected_rhs = 2 * r_size * (a_diff + majority_in_boundary * mu_b);
  if (derived.empty()) return out;
  out.defined = true;
  out.lhs = tower_distance(*derived.tower, p);
  return out;
}

RefinementError::RefinementError(int k, int ell, const std::string& what)
    : std::runtime_error("refinement failed at (k=" + std::to_string(k) + ", ell=" + std::to_string(ell) +
                         "): " + what),
      k_(k),
      ell_(ell) {}

std::vector<Rational> default_deltas(int count) {
  std::vector<Rational> out;
  Rational d = 1;
  for (int j = 0; j < count; ++j) {
    out.push_back(d);
    d /= 2;
  }
  return out;
}

const LabeledTower& RefinementTrace::at(int k, int ell) const {
  if (k < 1 || k > towers() || ell < 0 || ell > depth(k)) throw std::out_of_range("grid index outside the trace");
  return grid[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(ell)];
}

Rational RefinementTrace::distance_to_next(int k, int ell) const {
  if (ell + 1 > depth(k)) throw std::out_of_range("no next column");
  return tower_distance(at(k, ell), at(k, ell + 1));
}

Rational RefinementTrace::tail_bound(int ell) const {
  Rational sum = 0;
  for (std::size_t j = static_cast<std::size_t>(std::max(ell, 0)); j < deltas.size(); ++j) sum += deltas[j];
  return sum;
}

int RefinementTrace::violations() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CauchyCheck& c) { return !c.holds(); }));
}

int RefinementTrace::sharp_violations() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const CauchyCheck& c) { return !c.sharp_holds(); }));
}

RefinementTrace refine_sequence(const std::vector<LabeledTower>& towers, const std::vector<Rational>& deltas,
                                int depth) {
  const int n = static_cast<int>(towers.size());
  if (n < 2) throw std::invalid_argument("refine_sequence needs at least two towers");
  if (depth < 1) throw std::invalid_argument("refine_sequence needs depth >= 1");
  if (static_cast<int>(deltas.size()) < std::max(n, depth)) {
    throw std::invalid_argument("refine_sequence needs deltas δ_0..δ_" + std::to_string(std::max(n, depth) - 1));
  }
  for (const Rational& d : deltas) {
    if (d < 0) throw std::invalid_argument("deltas must be nonnegative");
  }
  for (int k = 1; k <= n; ++k) {
    const LabeledTower& t = towers[static_cast<std::size_t>(k - 1)];
    if (!(t.space() == towers.front().space())) throw RefinementError(k, 0, "towers live in different spaces");
    if (!t.shape().contains(LatticePoint::Zero(t.shape().dim()))) throw RefinementError(k, 0, "0 not in R_k");
    if (k < n && !t.shape().is_subset_of(towers[static_cast<std::size_t>(k)].shape())) {
      throw RefinementError(k, 0, "R_k is not contained in R_{k+1}");
    }
  }

  RefinementTrace trace;
  trace.deltas = deltas;
  trace.grid.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) trace.grid[static_cast<std::size_t>(k - 1)].push_back(towers[static_cast<std::size_t>(k - 1)]);

  auto cell = [&](int k, int ell) -> LabeledTower& {
    return trace.grid[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(ell)];
  };

  for (int k = 1; k < n; ++k) {
    DerivedTower derived;
    try {
      derived = derived_tower(cell(k, 0), cell(k + 1, 0), false);
    } catch (const std::exception& e) {
      throw RefinementError(k, 1, e.what());
    }
    if (derived.empty()) throw RefinementError(k, 1, "empty stacking set");
    const Rational gap = tower_distance(*derived.tower, cell(k, 0));
    if (gap > deltas[static_cast<std::size_t>(k)]) {
      throw RefinementError(k, 1, "d(P_k(P_{k+1}), P_k) = " + to_string(gap) + " exceeds δ_k = " +
                                      to_string(deltas[static_cast<std::size_t>(k)]));
    }
    trace.hypothesis.push_back(gap);
    trace.stacking.push_back(derived.stacking);
    trace.grid[static_cast<std::size_t>(k - 1)].push_back(std::move(*derived.tower));
    if (!refines(cell(k, 1), cell(k + 1, 0))) throw RefinementError(k, 1, "P_{k,1} is not refined by P_{k+1,0}");
  }

  for (int ell = 2; ell <= depth; ++ell) {
    for (int k = 1; k + ell <= n; ++k) {
      const Shape& r = cell(k, 0).shape();
      try {
        LabeledTower next = restrict_tower(cell(k + 1, ell - 1), r, trace.stacking[static_cast<std::size_t>(k - 1)]);
        trace.grid[static_cast<std::size_t>(k - 1)].push_back(std::move(next));
      } catch (const std::exception& e) {
        throw RefinementError(k, ell, e.what());
      }
      if (!refines(cell(k, ell), cell(k + 1, ell - 1))) {
        throw RefinementError(k, ell, "P_{k,ell} is not refined by P_{k+1,ell-1}");
      }
    }
  }

  for (int k = 1; k <= n; ++k) {
    const int top = trace.depth(k);
    for (int ell = 0; ell < top; ++ell) {
      Rational bound = 0;
      Rational sharp = 0;
      for (int m = 1; ell + m <= top; ++m) {
        bound += deltas[static_cast<std::size_t>(ell + m - 1)];
        sharp += deltas[static_cast<std::size_t>(k + ell + m - 1)];
        trace.checks.push_back({k, ell, m, tower_distance(cell(k, ell), cell(k, ell + m)), bound, sharp});
      }
    }
  }
  return trace;
}

std::vector<LabeledTower> perturbed_odometer_towers(int K, int count, int perturbed_levels, int swaps,
                                                    std::uint64_t seed) {
  if (count < 1 || count > K) throw std::invalid_argument("need 1 <= count <= K");
  if (swaps < 0) throw std::invalid_argument("swaps must be nonnegative");
  const LevelKModel model = build_model(odometer_schedule(1, 2, K), K);
  std::vector<LabeledTower> out;
  for (int k = 1; k <= count; ++k) {
    LabeledTower exact = tower_from_model(model, k);
    if (k > perturbed_levels || swaps == 0 || k == K) {
      out.push_back(std::move(exact));
      continue;
    }
    const Index side = Index{1} << k;
    std::vector<Index> pairs;  // left cells p of aligned pairs (p, p + side)
    for (Index p = 0; p + 2 * side <= model.cell_count(); p += 2 * side) pairs.push_back(p);
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(std::min(pairs.size(), static_cast<std::size_t>(swaps)));
    CellSet base = exact.base();
    for (Index p : pairs) {
      base.erase(std::remove_if(base.begin(), base.end(), [&](Index c) { return c == p || c == p + side; }),
                 base.end());
      base.push_back(p + side / 2);
    }
    out.emplace_back(exact.space(), exact.shape(), std::move(base));
  }
  return out;
}

LabeledTower random_tower(const Rectangle& space, const Shape& shape, double density, std::mt19937_64& rng) {
  const Index n = space.cardinality();
  CellSet candidates;
  LatticePoint q(space.dim());
  for (Index c = 0; c < n; ++c) {
    const LatticePoint p = space.point_at(c);
    bool fits = true;
    for (Index a = 0; a < shape.size() && fits; ++a) {
      q = p + shape.point(a);
      fits = space.contains(q);
    }
    if (fits) candidates.push_back(c);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto target = static_cast<std::size_t>(std::max(1.0, density * static_cast<double>(n) / shape.size()));
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  CellSet base;
  std::vector<Index> cells(static_cast<std::size_t>(shape.size()));
  for (Index c : candidates) {
    if (base.size() >= target) break;
    const LatticePoint p = space.point_at(c);
    bool free = true;
    for (Index a = 0; a < shape.size() && free; ++a) {
      cells[static_cast<std::size_t>(a)] = space.linear_index(p + shape.point(a));
      free = !used[static_cast<std::size_t>(cells[static_cast<std::size_t>(a)])];
    }
    if (!free) continue;
    for (Index x : cells) used[static_cast<std::size_t>(x)] = 1;
    base.push_back(c);
  }
  return LabeledTower(space, shape, std::move(base));
}

Shape random_stacking_set(const Shape& r, const Shape& s, double density, std::mt19937_64& rng) {
  if (r.dim() != s.dim()) throw DimensionMismatch(s.dim(), r.dim());
  if (r.empty() || s.empty()) throw std::invalid_argument("random_stacking_set needs nonempty shapes");
  const LatticePoint lo = s.min_corner() - r.min_corner();
  const LatticePoint hi = s.max_corner() - r.max_corner();
  std::vector<LatticePoint> candidates;
  if ((lo.array() <= hi.array()).all()) {
    const Rectangle box(lo, hi);
    for (Index c = 0; c < box.cardinality(); ++c) {
      const LatticePoint v = box.point_at(c);
      bool fits = true;
      for (Index a = 0; a < r.size() && fits; ++a) fits = s.contains(LatticePoint(r.point(a) + v));
      if (fits) candidates.push_back(v);
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto target = static_cast<std::size_t>(density * static_cast<double>(s.size()) / r.size());
  std::vector<char> used(static_cast<std::size_t>(s.size()), 0);
  std::vector<LatticePoint> kept;
  std::vector<Index> slots(static_cast<std::size_t>(r.size()));
  for (const LatticePoint& v : candidates) {
    if (kept.size() >= target) break;
    bool free = true;
    for (Index a = 0; a < r.size() && free; ++a) {
      slots[static_cast<std::size_t>(a)] = s.find(LatticePoint(r.point(a) + v));
      free = !used[static_cast<std::size_t>(slots[static_cast<std::size_t>(a)])];
    }
    if (!free) continue;
    for (Index x : slots) used[static_cast<std::size_t>(x)] = 1;
    kept.push_back(v);
  }
  return Shape(r.dim(), kept);
}

}  // namespace rankone
