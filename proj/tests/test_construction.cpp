#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rankone/rank_one_construction.hpp"

using namespace rankone;
using oracle::Point;
using oracle::PointSet;

namespace {

Rectangle box(std::initializer_list<Index> lo, std::initializer_list<Index> hi) {
  return Rectangle(make_point(lo), make_point(hi));
}

ConstructionSchedule small_spacered() { return spacered_schedule(2, {2, 2, {1, 1, 1}}); }

/// Y_j by walking every cell: uncovered, or in a copy whose window leaves R_j.
Rational bad_mass_by_cells(const LevelKModel& model, int j, const Shape& window) {
  const auto& space = model.space();
  const auto& r = model.rect(j);
  const auto& placements = model.placements(j);
  Index bad = 0;
  for (Index c = 0; c < space.cardinality(); ++c) {
    const LatticePoint x = space.point_at(c);
    bool good = false;
    for (Index p = 0; p < placements.cols() && !good; ++p) {
      const LatticePoint local = x - placements.col(p);
      if (!r.contains(local)) continue;
      good = true;
      for (Index w = 0; w < window.size(); ++w) good = good && r.contains(LatticePoint(local + window.point(w)));
    }
    bad += !good;
  }
  return make_rational(bad, space.cardinality());
}

void check_against_scan(const LevelKModel& model, int k, const Shape& window) {
  const NameDistribution fast = name_distribution(model, k, model.K(), window);
  const oracle::Distribution slow = oracle::names_by_scan(model, k, window);
  CHECK(fast.bad_mass == slow.bad);
  CHECK(fast.entries == slow.names);
  CHECK(fast == brute_force_name_distribution(model, k, window));
}

}  // namespace

TEST_CASE("validate: dyadic odometer is an exact tiling") {
  const ValidationReport report = validate_schedule(odometer_schedule(1, 2, 6));
  CHECK(report.valid());
  for (const Rational& q : report.coverage) CHECK(q == 1);
  for (const Rational& e : report.error_mass) CHECK(e == 0);
}

TEST_CASE("validate: overlapping stacking is reported with its stage") {
  const ConstructionSchedule s(1, {{box({0}, {1}), Shape(1, {make_point({0}), make_point({1})})}}, box({0}, {3}));
  const ValidationReport report = validate_schedule(s);
  REQUIRE_FALSE(report.valid());
  CHECK(report.violations.front().stage == 1);
  CHECK(report.violations.front().condition == "separated");
}

TEST_CASE("validate: spacered family has partial coverage and exact error mass") {
  const ConstructionSchedule s = small_spacered();
  const ValidationReport report = validate_schedule(s);
  CHECK(report.valid());
  Index side = 2;
  Rational covered = 1;
  for (int j = 1; j < s.levels(); ++j) {
    const Index next = 2 * side + 1;
    const Rational q = make_rational(4 * side * side, next * next);
    CHECK(report.coverage[static_cast<std::size_t>(j - 1)] == q);
    CHECK(q < 1);
    covered *= q;
    side = next;
  }
  CHECK(report.error_mass.front() == 1 - covered);
  CHECK(report.error_mass.front() > 0);
}

TEST_CASE("build_model placements and normalisation") {
  const LevelKModel odo = build_model(odometer_schedule(1, 2, 5), 3);
  CHECK(odo.placement_count(1) == 4);
  CHECK(odo.error_mass(1) == 0);
  CHECK(odo.placement_count(3) == 1);
  CHECK(odo.placements(3).col(0).isZero());
  CHECK(odo.error_mass(3) == 0);

  const LevelKModel sp = build_model(small_spacered(), 3);
  Index uncovered = 0;
  for (Index c = 0; c < sp.cell_count(); ++c) uncovered += oracle::placement_label(sp, 1, sp.space().point_at(c)) == kErrorLabel;
  CHECK(sp.error_mass(1) == make_rational(uncovered, sp.cell_count()));
  CHECK(sp.error_mass(1) == 1 - make_rational(16 * 4, sp.cell_count()));

  CHECK_THROWS_AS(build_model(odometer_schedule(2, 2, 12), 12, 1000), BudgetExceeded);
  CHECK_THROWS(build_model(odometer_schedule(1, 2, 3), 4));
}

TEST_CASE("labels agree with a placement scan") {
  for (const ConstructionSchedule& s : {odometer_schedule(2, 2, 4), small_spacered(), odometer_schedule(1, 3, 4)}) {
    const LevelKModel model = build_model(s, s.levels());
    for (int j = 1; j <= model.K(); ++j)
      for (Index c = 0; c < model.cell_count(); ++c)
        CHECK(model.label_index(j, c) == oracle::placement_label(model, j, model.space().point_at(c)));
  }
}

TEST_CASE("label_of_cell examples") {
  const LevelKModel odo = build_model(odometer_schedule(1, 2, 3), 2);
  CHECK(*label_of_cell(odo, 1, make_point({3})) == make_point({1}));
  CHECK(*label_of_cell(odo, 2, make_point({3})) == make_point({3}));
  CHECK_THROWS_AS(label_of_cell(odo, 1, make_point({4})), std::out_of_range);

  const LevelKModel sp = build_model(small_spacered(), 2);
  // R_2 = [0,4]^2 holds copies of [0,1]^2 at 0 and 3 on each axis; column 2 is spacer.
  CHECK_FALSE(label_of_cell(sp, 1, make_point({2, 0})).has_value());
  CHECK(*label_of_cell(sp, 1, make_point({4, 3})) == make_point({1, 0}));
}

TEST_CASE("translate_cell examples") {
  const LevelKModel model = build_model(odometer_schedule(2, 2, 2), 2);
  CHECK(*translate_cell(model, make_point({0, 0}), make_point({1, 0})) == make_point({1, 0}));
  CHECK_FALSE(translate_cell(model, make_point({3, 3}), make_point({1, 0})).has_value());
  CHECK(*translate_cell(model, make_point({2, 1}), make_point({0, 0})) == make_point({2, 1}));
}

TEST_CASE("classify_levels examples") {
  const LevelKModel model = build_model(odometer_schedule(2, 2, 3), 3);
  const Shape unit = Rectangle(make_point({0, 0}), make_point({1, 1})).to_shape();
  const LevelClassification c = classify_levels(model, 2, unit);
  CHECK(c.bad_mass == make_rational(7, 16));
  PointSet good;
  for (Index i : c.good_labels) good.insert(oracle::to_vec(model.rect(2).point_at(i)));
  CHECK(good == oracle::box({0, 0}, {2, 2}));

  const Shape origin(2, {make_point({0, 0})});
  for (int j = 1; j <= 3; ++j) CHECK(classify_levels(model, j, origin).bad_mass == model.error_mass(j));

  const Shape wide = Rectangle(make_point({0, 0}), make_point({4, 0})).to_shape();
  CHECK(classify_levels(model, 2, wide).bad_mass == 1);
  CHECK(classify_levels(model, 2, wide).good_labels.empty());
}

TEST_CASE("classify_levels bad mass matches a cell walk") {
  std::mt19937_64 rng(23);
  const LevelKModel model = build_model(small_spacered(), 4);
  for (int trial = 0; trial < 20; ++trial) {
    PointSet w = oracle::random_set(2, 4, 0.3, rng);
    const Shape window = oracle::to_shape(2, oracle::translate(w, {-1, -1}));
    for (int j = 1; j <= model.K(); ++j) CHECK(classify_levels(model, j, window).bad_mass == bad_mass_by_cells(model, j, window));
  }
}

TEST_CASE("name_distribution examples") {
  const LevelKModel odo = build_model(odometer_schedule(1, 2, 4), 4);
  const Shape origin(1, {make_point({0})});
  const NameDistribution own = name_distribution(odo, 2, 2, origin);
  CHECK(own.entries.size() == static_cast<std::size_t>(odo.rect(2).cardinality()));
  for (const auto& [name, mass] : own.entries) CHECK(mass == odo.level_mass(2));
  CHECK(own.bad_mass == odo.error_mass(2));

  const LevelKModel k3 = build_model(odometer_schedule(1, 2, 3), 3);
  CHECK(name_distribution(k3, 1, 3, Shape(1, {make_point({0}), make_point({1})})) ==
        brute_force_name_distribution(k3, 1, Shape(1, {make_point({0}), make_point({1})})));

  const LevelKModel sp = build_model(small_spacered(), 3);
  const Shape pair(2, {make_point({0, 0}), make_point({1, 0})});
  const NameDistribution d = name_distribution(sp, 1, 3, pair);
  const oracle::Distribution truth = oracle::names_by_scan(sp, 1, pair);
  bool saw_error_label = false;
  for (const auto& [name, mass] : d.entries) {
    if (std::find(name.begin(), name.end(), kErrorLabel) == name.end()) continue;
    saw_error_label = true;
    CHECK(mass == truth.names.at(name));
  }
  CHECK(saw_error_label);

  CHECK_THROWS(name_distribution(odo, 3, 2, origin));
  CHECK_THROWS(name_distribution(odo, 1, 2, Shape(1, {})));
}

TEST_CASE("brute force name distribution trivial cases") {
  const LevelKModel model = build_model(odometer_schedule(2, 2, 3), 3);
  const Shape origin(2, {make_point({0, 0})});
  const NameDistribution top = brute_force_name_distribution(model, 3, origin);
  CHECK(top.entries.size() == static_cast<std::size_t>(model.cell_count()));
  for (const auto& [name, mass] : top.entries) CHECK(mass == model.cell_measure());

  const NameDistribution freq = brute_force_name_distribution(model, 1, origin);
  CHECK(freq.entries.size() == 4);
  for (const auto& [name, mass] : freq.entries) CHECK(mass == make_rational(1, 4));
  CHECK_THROWS_AS(brute_force_name_distribution(build_model(odometer_schedule(2, 2, 10), 10), 1, origin, 1000),
                  BudgetExceeded);
}

TEST_CASE("hierarchical names equal the placement-scan oracle") {
  std::mt19937_64 rng(31);
  const std::vector<LevelKModel> models{build_model(odometer_schedule(1, 2, 6), 6), build_model(odometer_schedule(2, 2, 4), 4),
                                        build_model(small_spacered(), 4), build_model(odometer_schedule(2, 3, 3), 3)};
  for (const LevelKModel& model : models) {
    const int d = model.dim();
    for (int trial = 0; trial < 6; ++trial) {
      const Shape window = oracle::to_shape(d, oracle::random_set(d, 3, 0.4, rng));
      for (int k = 1; k <= model.K(); ++k) check_against_scan(model, k, window);
    }
  }
}

TEST_CASE("masses sum to one exactly") {
  std::mt19937_64 rng(41);
  const LevelKModel model = build_model(small_spacered(), 4);
  for (int trial = 0; trial < 10; ++trial) {
    const Shape window = oracle::to_shape(2, oracle::random_set(2, 5, 0.3, rng));
    for (int j = 1; j <= model.K(); ++j)
      for (int k = 1; k <= j; ++k) {
        const NameDistribution dist = name_distribution(model, k, j, window);
        Rational sum = dist.bad_mass;
        for (const Rational& m : dist.good_masses()) sum += m;
        CHECK(sum == 1);
        CHECK(dist.total() == 1);
        for (const auto& [name, mass] : dist.entries)
          for (std::int32_t lab : name) CHECK((lab == kErrorLabel || (lab >= 0 && lab < model.rect(k).cardinality())));
      }
  }
}

TEST_CASE("tower j labels determine tower k labels") {
  const LevelKModel model = build_model(small_spacered(), 4);
  for (int j = 1; j <= model.K(); ++j)
    for (int k = 1; k <= j; ++k) {
      const auto local = model.local_labels(k, j);
      for (Index c = 0; c < model.cell_count(); ++c) {
        const std::int32_t lj = model.label_index(j, c);
        if (lj != kErrorLabel) CHECK(local[static_cast<std::size_t>(lj)] == model.label_index(k, c));
      }
    }
}

TEST_CASE("error mass recursion") {
  for (const ConstructionSchedule& s : {small_spacered(), odometer_schedule(2, 2, 4), exponential_eccentric_schedule(1.5, 3)}) {
    const LevelKModel model = build_model(s, s.levels());
    for (int j = 1; j < model.K(); ++j) {
      CHECK(model.error_mass(j) == 1 - (1 - model.error_mass(j + 1)) * s.coverage(j));
      CHECK(model.error_mass(j) >= model.error_mass(j + 1));
    }
  }
}

TEST_CASE("builders") {
  const ConstructionSchedule odo = odometer_schedule(2, 2, 4);
  for (int j = 1; j <= 4; ++j) {
    CHECK(odo.rect(j).extent(0) == (Index{1} << j));
    CHECK(odo.rect(j).extent(1) == (Index{1} << j));
  }
  for (int j = 1; j < 4; ++j) CHECK(odo.coverage(j) == 1);

  const ConstructionSchedule sp = spacered_schedule(2, {16, 2, {1, 1, 1, 1}});
  Rational covered = 1;
  for (int j = 1; j < sp.levels(); ++j) {
    CHECK(sp.coverage(j) < 1);
    covered *= sp.coverage(j);
  }
  const LevelKModel model = build_model(sp, 5);
  CHECK(model.error_mass(1) == 1 - covered);
  CHECK(model.error_mass(1) < make_rational(1, 5));

  CHECK_FALSE(validate_schedule(exponential_eccentric_schedule(1.5, 3)).eccentricity.verdict);
  CHECK(validate_schedule(odometer_schedule(2, 2, 8)).eccentricity.verdict);
  CHECK_THROWS_AS(exponential_eccentric_schedule(1.5, 12), BudgetExceeded);
}
