#include <algorithm>
#include <string>

#include "rankone/rank_one_construction.hpp"

namespace rankone {

ConstructionSchedule::ConstructionSchedule(int dim, std::vector<Stage> stages, Rectangle final_rect)
    : dim_(dim), stages_(std::move(stages)), final_rect_(std::move(final_rect)) {
  if (dim < 1) throw std::invalid_argument("schedule dimension must be >= 1");
  if (final_rect_.dim() != dim) throw DimensionMismatch(dim, final_rect_.dim());
  for (const Stage& s : stages_) {
    if (s.rect.dim() != dim) throw DimensionMismatch(dim, s.rect.dim());
    if (s.stacking.dim() != dim) throw DimensionMismatch(dim, s.stacking.dim());
  }
}

const Rectangle& ConstructionSchedule::rect(int j) const {
  if (j < 1 || j > levels()) throw std::out_of_range("level " + std::to_string(j) + " outside schedule");
  return j == levels() ? final_rect_ : stages_[static_cast<std::size_t>(j - 1)].rect;
}

const Shape& ConstructionSchedule::stacking(int j) const {
  if (j < 1 || j >= levels()) throw std::out_of_range("no stacking set at level " + std::to_string(j));
  return stages_[static_cast<std::size_t>(j - 1)].stacking;
}

Rational ConstructionSchedule::coverage(int j) const {
  return make_rational(stacking(j).size() * rect(j).cardinality(), rect(j + 1).cardinality());
}

std::vector<Rectangle> ConstructionSchedule::rects() const {
  std::vector<Rectangle> out;
  out.reserve(static_cast<std::size_t>(levels()));
  for (int j = 1; j <= levels(); ++j) out.push_back(rect(j));
  return out;
}

namespace {

/// Two translates of the same box overlap iff their offsets differ by less
/// than the extent on every axis.
bool box_translates_overlap(const Rectangle& r, const LatticePoint& a, const LatticePoint& b) {
  for (int i = 0; i < r.dim(); ++i) {
    Index diff = a(i) - b(i);
    if (diff < 0) diff = -diff;
    if (diff >= r.extent(i)) return false;
  }
  return true;
}

std::string point_string(const LatticePoint& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p(i));
  return s + ")";
}

}  // namespace

ValidationReport validate_schedule(const ConstructionSchedule& schedule, double eccentricity_threshold) {
  ValidationReport report;
  const int L = schedule.levels();
  const LatticePoint origin = LatticePoint::Zero(schedule.dim());

  for (int j = 1; j <= L; ++j) {
    if (!schedule.rect(j).contains(origin)) {
      report.violations.push_back({j, "origin", "R_" + std::to_string(j) + " does not contain 0"});
    }
  }
  bool coverage_ok = true;
  for (int j = 1; j < L; ++j) {
    const Rectangle& r = schedule.rect(j);
    const Rectangle& next = schedule.rect(j + 1);
    const Shape& stack = schedule.stacking(j);
    if (stack.empty()) {
      report.violations.push_back({j, "nonempty", "stacking set is empty"});
      coverage_ok = false;
      continue;
    }
    bool separated = true;
    for (Index a = 0; a < stack.size() && separated; ++a) {
      for (Index b = a + 1; b < stack.size() && separated; ++b) {
        if (box_translates_overlap(r, stack.point(a), stack.point(b))) {
          separated = false;
          report.violations.push_back({j, "separated",
                                       "copies at " + point_string(stack.point(a)) + " and " +
                                           point_string(stack.point(b)) + " overlap"});
        }
      }
    }
    for (Index a = 0; a < stack.size(); ++a) {
      const LatticePoint v = stack.point(a);
      if (!next.contains(LatticePoint(r.lo() + v)) || !next.contains(LatticePoint(r.hi() + v))) {
        report.violations.push_back({j, "containment",
                                     "R_" + std::to_string(j) + " + " + point_string(v) + " not inside R_" +
                                         std::to_string(j + 1)});
        break;
      }
    }
    const Rational q = schedule.coverage(j);
    report.coverage.push_back(q);
    if (!separated || q <= 0 || q > 1) coverage_ok = false;
  }
  for (int j = 1; j <= L; ++j) {
    const Rectangle& r = schedule.rect(j);
    Index min_extent = r.extent(0);
    for (int i = 1; i < r.dim(); ++i) min_extent = std::min(min_extent, r.extent(i));
    // |R △ (R + e_i)| = 2 |R| / extent_i for a box.
    report.folner_trend.push_back(make_rational(2, min_extent));
  }
  if (coverage_ok) {
    report.error_mass.assign(static_cast<std::size_t>(L), Rational(0));
    for (int j = L - 1; j >= 1; --j) {
      const Rational& above = report.error_mass[static_cast<std::size_t>(j)];
      report.error_mass[static_cast<std::size_t>(j - 1)] = 1 - (1 - above) * report.coverage[static_cast<std::size_t>(j - 1)];
    }
  }
  const std::vector<Rectangle> rects = schedule.rects();
  report.eccentricity = eccentricity_stats(rects, eccentricity_threshold);
  return report;
}

}  // namespace rankone
