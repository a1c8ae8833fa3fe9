#include <string>
#include <unordered_map>

#include "rankone/rank_one_construction.hpp"

namespace rankone {

namespace {

struct NameHash {
  std::size_t operator()(const Name& n) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int32_t x : n) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

using NameCounts = std::unordered_map<Name, Index, NameHash>;

std::map<Name, Rational> to_masses(const NameCounts& counts, const Rational& unit) {
  std::map<Name, Rational> out;
  for (const auto& [name, count] : counts) out.emplace(name, unit * count);
  return out;
}

void check_window(const LevelKModel& model, const Shape& window) {
  if (window.empty()) throw std::invalid_argument("window must be nonempty");
  if (window.dim() != model.dim()) throw DimensionMismatch(model.dim(), window.dim());
}

}  // namespace

Rational NameDistribution::total() const {
  Rational sum = bad_mass;
  for (const auto& [name, mass] : entries) sum += mass;
  return sum;
}

std::vector<Rational> NameDistribution::good_masses() const {
  std::vector<Rational> out;
  out.reserve(entries.size());
  for (const auto& [name, mass] : entries) out.push_back(mass);
  return out;
}

NameDistribution name_distribution(const LevelKModel& model, int k, int j, const Shape& window, Index work_budget) {
  check_window(model, window);
  if (k < 1 || j > model.K()) throw std::out_of_range("levels must satisfy 1 <= k <= j <= K");
  if (k > j) throw std::invalid_argument("name_distribution requires k <= j");

  const LevelClassification levels = classify_levels(model, j, window);
  const Index work = static_cast<Index>(levels.good_labels.size()) * window.size();
  if (work > work_budget) {
    throw BudgetExceeded("name enumeration needs " + std::to_string(work) + " label reads, budget " +
                         std::to_string(work_budget));
  }
  const Rectangle& r = model.rect(j);
  const std::vector<std::int32_t> local = model.local_labels(k, j);
  std::vector<Index> offsets(static_cast<std::size_t>(window.size()));
  for (Index w = 0; w < window.size(); ++w) offsets[static_cast<std::size_t>(w)] = r.linear_offset(window.point(w));

  NameCounts counts;
  Name name(static_cast<std::size_t>(window.size()));
  for (Index v : levels.good_labels) {
    for (std::size_t w = 0; w < offsets.size(); ++w) name[w] = local[static_cast<std::size_t>(v + offsets[w])];
    ++counts[name];
  }

  NameDistribution dist{window, k, j, to_masses(counts, model.level_mass(j)), levels.bad_mass,
                        model.rect(k).cardinality() + 1};
  return dist;
}

NameDistribution brute_force_name_distribution(const LevelKModel& model, int k, const Shape& window,
                                               Index cell_budget) {
  check_window(model, window);
  const Rectangle& space = model.space();
  if (space.cardinality() > cell_budget) {
    throw BudgetExceeded("brute force over " + std::to_string(space.cardinality()) + " cells exceeds budget " +
                         std::to_string(cell_budget));
  }
  const auto labels = model.labels(k);
  NameCounts counts;
  Index bad = 0;
  Name name(static_cast<std::size_t>(window.size()));
  LatticePoint y(model.dim());
  for (Index c = 0; c < space.cardinality(); ++c) {
    const LatticePoint x = space.point_at(c);
    bool inside = true;
    for (Index w = 0; w < window.size(); ++w) {
      y = x + window.point(w);
      if (!space.contains(y)) {
        inside = false;
        break;
      }
      name[static_cast<std::size_t>(w)] = labels[static_cast<std::size_t>(space.linear_index(y))];
    }
    if (inside) ++counts[name];
    else ++bad;
  }
  const Rational unit = model.cell_measure();
  NameDistribution dist{window, k, model.K(), to_masses(counts, unit), unit * bad, model.rect(k).cardinality() + 1};
  return dist;
}

}  // namespace rankone
