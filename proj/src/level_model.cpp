#include <string>

#include "rankone/rank_one_construction.hpp"

namespace rankone {

namespace {

/// Stamps every translate p + R (p a column of `placements`) into a label
/// array over `space`; the label is the linear index inside R.
std::vector<std::int32_t> stamp_labels(const Rectangle& space, const Rectangle& r, const PointMatrix& placements) {
  std::vector<std::int32_t> labels(static_cast<std::size_t>(space.cardinality()), kErrorLabel);
  const Index n = r.cardinality();
  std::vector<Index> offsets(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) offsets[static_cast<std::size_t>(i)] = space.linear_offset(LatticePoint(r.point_at(i) - r.lo()));
  for (Index c = 0; c < placements.cols(); ++c) {
    const LatticePoint corner = placements.col(c) + r.lo();
    const Index base = space.linear_index(corner);
    for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(base + offsets[static_cast<std::size_t>(i)])] = static_cast<std::int32_t>(i);
  }
  return labels;
}

}  // namespace

LevelKModel::LevelKModel(ConstructionSchedule schedule, int K, Index cell_budget)
    : schedule_(std::move(schedule)), K_(K) {
  if (K < 1 || K > schedule_.levels()) {
    throw std::invalid_argument("normalisation level K=" + std::to_string(K) + " outside 1.." +
                                std::to_string(schedule_.levels()));
  }
  const ValidationReport report = validate_schedule(schedule_);
  if (!report.valid()) {
    const auto& v = report.violations.front();
    throw std::invalid_argument("invalid schedule at stage " + std::to_string(v.stage) + " (" + v.condition +
                                "): " + v.detail);
  }
  if (space().cardinality() > cell_budget) {
    throw BudgetExceeded("|R_K| = " + std::to_string(space().cardinality()) + " exceeds cell budget " +
                         std::to_string(cell_budget));
  }
  const int d = schedule_.dim();
  placements_.resize(static_cast<std::size_t>(K));
  placements_[static_cast<std::size_t>(K - 1)] = PointMatrix::Zero(d, 1);
  for (int j = K - 1; j >= 1; --j) {
    const PointMatrix& above = placements_[static_cast<std::size_t>(j)];
    const Shape& stack = schedule_.stacking(j);
    PointMatrix pts(d, above.cols() * stack.size());
    Index c = 0;
    for (Index a = 0; a < above.cols(); ++a)
      for (Index s = 0; s < stack.size(); ++s) pts.col(c++) = above.col(a) + stack.point(s);
    placements_[static_cast<std::size_t>(j - 1)] = std::move(pts);
  }
  const Index total = space().cardinality();
  for (int j = 1; j <= K; ++j) {
    const Index covered = placements(j).cols() * rect(j).cardinality();
    error_mass_.push_back(1 - make_rational(covered, total));
    labels_.push_back(stamp_labels(space(), rect(j), placements(j)));
  }
  for (int j = 1; j < K; ++j) {
    const Rectangle& next = rect(j + 1);
    // Stage maps work in coordinates relative to R_{j+1}: a copy of R_j at v
    // occupies v + R_j, expressed in next's own frame.
    stage_maps_.push_back(stamp_labels(next, rect(j), schedule_.stacking(j).points()));
  }
}

void LevelKModel::check_level(int j) const {
  if (j < 1 || j > K_) throw std::out_of_range("level " + std::to_string(j) + " outside 1..K");
}

const PointMatrix& LevelKModel::placements(int j) const {
  check_level(j);
  return placements_[static_cast<std::size_t>(j - 1)];
}

Rational LevelKModel::level_mass(int j) const { return make_rational(placement_count(j), cell_count()); }

const Rational& LevelKModel::error_mass(int j) const {
  check_level(j);
  return error_mass_[static_cast<std::size_t>(j - 1)];
}

std::span<const std::int32_t> LevelKModel::labels(int j) const {
  check_level(j);
  return labels_[static_cast<std::size_t>(j - 1)];
}

std::vector<std::int32_t> LevelKModel::local_labels(int k, int j) const {
  check_level(k);
  check_level(j);
  if (k > j) throw std::invalid_argument("local_labels requires k <= j");
  const Index n = rect(j).cardinality();
  std::vector<std::int32_t> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
  for (int level = j - 1; level >= k; --level) {
    const auto& map = stage_maps_[static_cast<std::size_t>(level - 1)];
    for (auto& lab : out) {
      if (lab != kErrorLabel) lab = map[static_cast<std::size_t>(lab)];
    }
  }
  return out;
}

LevelKModel LevelKModel::corrupted_copy(int j) const {
  check_level(j);
  LevelKModel copy = *this;
  for (auto& lab : copy.labels_[static_cast<std::size_t>(j - 1)]) {
    if (lab != kErrorLabel) {
      lab = kErrorLabel;
      break;
    }
  }
  return copy;
}

LevelKModel build_model(const ConstructionSchedule& schedule, int K, Index cell_budget) {
  return LevelKModel(schedule, K, cell_budget);
}

std::optional<LatticePoint> label_of_cell(const LevelKModel& model, int j, const LatticePoint& cell) {
  if (!model.space().contains(cell)) throw std::out_of_range("cell outside R_K");
  const std::int32_t lab = model.label_index(j, model.space().linear_index(cell));
  if (lab == kErrorLabel) return std::nullopt;
  return model.rect(j).point_at(lab);
}

std::optional<LatticePoint> translate_cell(const LevelKModel& model, const LatticePoint& cell,
                                           const LatticePoint& v) {
  if (!model.space().contains(cell)) throw std::out_of_range("cell outside R_K");
  LatticePoint moved = cell + v;
  if (!model.space().contains(moved)) return std::nullopt;
  return moved;
}

LevelClassification classify_levels(const LevelKModel& model, int j, const Shape& window) {
  if (window.empty()) throw std::invalid_argument("classify_levels needs a nonempty window");
  if (window.dim() != model.dim()) throw DimensionMismatch(model.dim(), window.dim());
  const Rectangle& r = model.rect(j);
  const LatticePoint wmin = window.min_corner();
  const LatticePoint wmax = window.max_corner();
  // v + W ⊆ R_j iff every axis satisfies lo <= v + wmin and v + wmax <= hi.
  LatticePoint good_lo = r.lo() - wmin;
  LatticePoint good_hi = r.hi() - wmax;
  LevelClassification out;
  bool any = true;
  for (int i = 0; i < r.dim(); ++i) {
    good_lo(i) = std::max(good_lo(i), r.lo()(i));
    good_hi(i) = std::min(good_hi(i), r.hi()(i));
    if (good_lo(i) > good_hi(i)) any = false;
  }
  if (any) {
    const Rectangle good(good_lo, good_hi);
    out.good_labels.reserve(static_cast<std::size_t>(good.cardinality()));
    for (Index i = 0; i < good.cardinality(); ++i) out.good_labels.push_back(r.linear_index(good.point_at(i)));
  }
  const Index total = r.cardinality();
  out.boundary_count = total - static_cast<Index>(out.good_labels.size());
  const Rational& e = model.error_mass(j);
  out.bad_mass = make_rational(out.boundary_count, total) * (1 - e) + e;
  return out;
}

}  // namespace rankone
