#include <cmath>
#include <string>

#include "rankone/rank_one_construction.hpp"

namespace rankone {

namespace {

/// Product grid: axis i takes the values in coords[i].
Shape grid(const std::vector<std::vector<Index>>& coords) {
  const int d = static_cast<int>(coords.size());
  Index n = 1;
  for (const auto& c : coords) n *= static_cast<Index>(c.size());
  PointMatrix pts(d, n);
  for (Index idx = 0; idx < n; ++idx) {
    Index rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      const auto& axis = coords[static_cast<std::size_t>(i)];
      pts(i, idx) = axis[static_cast<std::size_t>(rest % static_cast<Index>(axis.size()))];
      rest /= static_cast<Index>(axis.size());
    }
  }
  return Shape(pts);
}

Rectangle cube(int d, Index count) {
  return Rectangle(LatticePoint::Zero(d), LatticePoint::Constant(d, count - 1));
}

}  // namespace

ConstructionSchedule odometer_schedule(int d, Index base, int levels) {
  if (d < 1 || base < 2 || levels < 1) throw std::invalid_argument("odometer needs d >= 1, base >= 2, levels >= 1");
  std::vector<Stage> stages;
  Index side = base;
  for (int k = 1; k < levels; ++k) {
    std::vector<Index> offsets;
    for (Index i = 0; i < base; ++i) offsets.push_back(i * side);
    stages.push_back({cube(d, side), grid(std::vector<std::vector<Index>>(static_cast<std::size_t>(d), offsets))});
    side *= base;
  }
  return ConstructionSchedule(d, std::move(stages), cube(d, side));
}

ConstructionSchedule spacered_schedule(int d, const SpaceredSpec& spec) {
  if (d < 1 || spec.initial_side < 1 || spec.copies_per_axis < 1) {
    throw std::invalid_argument("spacered schedule needs d, initial_side, copies_per_axis >= 1");
  }
  std::vector<Stage> stages;
  Index side = spec.initial_side;
  for (Index spacer : spec.spacers) {
    if (spacer < 0) throw std::invalid_argument("spacer widths must be >= 0");
    std::vector<Index> offsets;
    for (Index i = 0; i + 1 < spec.copies_per_axis; ++i) offsets.push_back(i * side);
    offsets.push_back((spec.copies_per_axis - 1) * side + spacer);
    stages.push_back({cube(d, side), grid(std::vector<std::vector<Index>>(static_cast<std::size_t>(d), offsets))});
    side = spec.copies_per_axis * side + spacer;
  }
  return ConstructionSchedule(d, std::move(stages), cube(d, side));
}

ConstructionSchedule eccentric_schedule(const std::vector<std::function<Index(int)>>& side_along_axis, int levels,
                                        Index cell_budget) {
  const int d = static_cast<int>(side_along_axis.size());
  if (d < 1 || levels < 1) throw std::invalid_argument("eccentric schedule needs d >= 1 and levels >= 1");
  auto rect_at = [&](int j) {
    LatticePoint w(d);
    for (int i = 0; i < d; ++i) {
      w(i) = side_along_axis[static_cast<std::size_t>(i)](j);
      if (w(i) < 0) throw std::invalid_argument("negative side length at level " + std::to_string(j));
    }
    return Rectangle::from_sides(w);
  };
  std::vector<Stage> stages;
  for (int j = 1; j < levels; ++j) {
    const Rectangle r = rect_at(j);
    const Rectangle next = rect_at(j + 1);
    std::vector<std::vector<Index>> coords(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const Index copies = next.extent(i) / r.extent(i);
      if (copies < 1) {
        throw std::invalid_argument("R_" + std::to_string(j + 1) + " is narrower than R_" + std::to_string(j) +
                                    " along axis " + std::to_string(i));
      }
      for (Index c = 0; c < copies; ++c) coords[static_cast<std::size_t>(i)].push_back(c * r.extent(i));
    }
    stages.push_back({r, grid(coords)});
  }
  Rectangle last = rect_at(levels);
  if (last.cardinality() > cell_budget) {
    throw BudgetExceeded("R_" + std::to_string(levels) + " has " + std::to_string(last.cardinality()) +
                         " cells, budget " + std::to_string(cell_budget));
  }
  return ConstructionSchedule(d, std::move(stages), std::move(last));
}

ConstructionSchedule exponential_eccentric_schedule(double beta, int levels, Index cell_budget) {
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  std::vector<std::function<Index(int)>> sides{
      [beta](int j) { return static_cast<Index>(std::floor(std::exp(beta * (j + 1)))); },
      [](int j) { return static_cast<Index>(j + 1); },
  };
  return eccentric_schedule(sides, levels, cell_budget);
}

}  // namespace rankone
