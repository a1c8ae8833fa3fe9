#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankone/lattice_geometry.hpp"
#include "rankone/rational.hpp"

namespace rankone {

/// One cutting-and-stacking step: copies of `rect` placed at `stacking`
/// inside the next rectangle.
struct Stage {
  Rectangle rect;
  Shape stacking;
};

/// A finite cutting-and-stacking schedule R_1, J_1, ..., R_{L-1}, J_{L-1}, R_L.
///
/// Levels are numbered from 1 as in the construction itself; `levels()` is L.
/// The constructor only checks dimensions; use validate_schedule for the
/// stacking invariants.
class ConstructionSchedule {
 public:
  ConstructionSchedule(int dim, std::vector<Stage> stages, Rectangle final_rect);

  int dim() const { return dim_; }
  int levels() const { return static_cast<int>(stages_.size()) + 1; }
  const std::vector<Stage>& stages() const { return stages_; }
  const Rectangle& final_rect() const { return final_rect_; }

  const Rectangle& rect(int j) const;
  /// J_j, for 1 <= j < levels().
  const Shape& stacking(int j) const;
  /// q_j = |J_j| |R_j| / |R_{j+1}|.
  Rational coverage(int j) const;
  std::vector<Rectangle> rects() const;

 private:
  int dim_;
  std::vector<Stage> stages_;
  Rectangle final_rect_;
};

struct ScheduleViolation {
  int stage = 0;
  std::string condition;
  std::string detail;
};

struct ValidationReport {
  std::vector<ScheduleViolation> violations;
  std::vector<Rational> coverage;        // q_1 .. q_{L-1}
  std::vector<Rational> folner_trend;    // max_i |R_j △ (R_j + e_i)| / |R_j|
  std::vector<Rational> error_mass;      // μ(E_j) at normalisation level L, j = 1..L
  EccentricityReport eccentricity;

  bool valid() const { return violations.empty(); }
};

ValidationReport validate_schedule(const ConstructionSchedule& schedule,
                                   double eccentricity_threshold = 1.0);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Index kDefaultCellBudget = Index{1} << 22;
inline constexpr Index kBruteForceCellBudget = 100000;
inline constexpr std::int32_t kErrorLabel = -1;

/// The level-K realisation of a schedule: R_K is the whole space, every cell
/// has measure 1/|R_K|, and placements[j] lists the copies of R_j in R_K.
///
/// Immutable once built. Labels are stored per level as the linear index of
/// the label inside R_j (kErrorLabel for the error label).
class LevelKModel {
 public:
  LevelKModel(ConstructionSchedule schedule, int K, Index cell_budget = kDefaultCellBudget);

  const ConstructionSchedule& schedule() const { return schedule_; }
  int K() const { return K_; }
  int dim() const { return schedule_.dim(); }
  const Rectangle& space() const { return schedule_.rect(K_); }
  const Rectangle& rect(int j) const { return schedule_.rect(j); }
  Index cell_count() const { return space().cardinality(); }
  Rational cell_measure() const { return make_rational(1, cell_count()); }

  /// Columns are J_{j,K}.
  const PointMatrix& placements(int j) const;
  Index placement_count(int j) const { return placements(j).cols(); }
  /// |J_{j,K}| / |R_K|, the measure of one level of tower j.
  Rational level_mass(int j) const;
  /// μ(E_j) = 1 - |J_{j,K}| |R_j| / |R_K|.
  const Rational& error_mass(int j) const;

  /// Label of every cell of R_K for tower j.
  std::span<const std::int32_t> labels(int j) const;
  std::int32_t label_index(int j, Index cell) const { return labels(j)[static_cast<std::size_t>(cell)]; }

  /// Labels of tower k inside one copy of R_j, composed stage by stage
  /// (independent of the placement lists).
  std::vector<std::int32_t> local_labels(int k, int j) const;

  /// Copy whose level-j labels have one covered cell relabelled as error
  /// while error_mass is left stale. Used to exercise consistency checks.
  LevelKModel corrupted_copy(int j) const;

 private:
  void check_level(int j) const;

  ConstructionSchedule schedule_;
  int K_;
  std::vector<PointMatrix> placements_;              // index j-1
  std::vector<Rational> error_mass_;                 // index j-1
  std::vector<std::vector<std::int32_t>> labels_;    // index j-1
  std::vector<std::vector<std::int32_t>> stage_maps_;  // index j-1: R_{j+1} cell -> R_j label
};

LevelKModel build_model(const ConstructionSchedule& schedule, int K,
                        Index cell_budget = kDefaultCellBudget);

/// Label of `cell` in tower j: the level it lies in, or nullopt for the
/// error label.
std::optional<LatticePoint> label_of_cell(const LevelKModel& model, int j, const LatticePoint& cell);

/// cell + v if it stays in R_K.
std::optional<LatticePoint> translate_cell(const LevelKModel& model, const LatticePoint& cell,
                                           const LatticePoint& v);

struct LevelClassification {
  std::vector<Index> good_labels;  // linear indices in R_j
  Index boundary_count = 0;        // |R_j| - #good
  Rational bad_mass;               // μ(Y_j)
};

/// Good levels of tower j for window W are those v with v + W ⊆ R_j.
LevelClassification classify_levels(const LevelKModel& model, int j, const Shape& window);

using Name = std::vector<std::int32_t>;

/// Exact distribution of W-names over the good levels of tower j, in the
/// labels of tower k; the rest of the space is one lump of mass bad_mass.
struct NameDistribution {
  Shape window;
  int k = 0;
  int j = 0;
  std::map<Name, Rational> entries;
  Rational bad_mass;
  Index alphabet_size_bound = 0;  // |R_k| + 1

  Rational total() const;
  std::vector<Rational> good_masses() const;

  friend bool operator==(const NameDistribution& a, const NameDistribution& b) {
    return a.window == b.window && a.k == b.k && a.entries == b.entries && a.bad_mass == b.bad_mass;
  }
};

/// Budget on |good levels| x |W| work for a single name distribution.
inline constexpr Index kDefaultNameWorkBudget = Index{1} << 31;

NameDistribution name_distribution(const LevelKModel& model, int k, int j, const Shape& window,
                                   Index work_budget = kDefaultNameWorkBudget);

/// Enumerates every cell of R_K directly; cells whose window leaves R_K are
/// lumped. Ground truth for name_distribution at j = K.
NameDistribution brute_force_name_distribution(const LevelKModel& model, int k, const Shape& window,
                                               Index cell_budget = kBruteForceCellBudget);

// --- example families --------------------------------------------------------

/// R_k = [0, base^k - 1]^d, J_k = {0, base^k, ..., (base-1) base^k}^d.
ConstructionSchedule odometer_schedule(int d, Index base, int levels);

/// Cubes of side a_{k+1} = c a_k + spacers[k-1] (counted in lattice points).
/// Copies sit on a c^d grid with the spacer gap before the last copy on each
/// axis; for c = 2 that is the four-corner layout.
struct SpaceredSpec {
  Index initial_side = 8;
  Index copies_per_axis = 2;
  std::vector<Index> spacers;  // one per stage; levels = spacers.size() + 1
};

ConstructionSchedule spacered_schedule(int d, const SpaceredSpec& spec);

/// side_along_axis[i](j) gives w_i^j, the side of R_j along axis i. Copies of
/// R_j are placed on the largest grid that fits in R_{j+1}.
ConstructionSchedule eccentric_schedule(
    const std::vector<std::function<Index(int)>>& side_along_axis, int levels,
    Index cell_budget = kDefaultCellBudget);

/// Two-dimensional eccentric family with s_j = j + 1 and ℓ_j = floor(exp(beta s_j)).
ConstructionSchedule exponential_eccentric_schedule(double beta, int levels,
                                                    Index cell_budget = kDefaultCellBudget);

}  // namespace rankone
