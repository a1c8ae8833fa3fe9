#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rankone/entropy_analysis.hpp"

using namespace rankone;

// Finite-size readings of asymptotic statements. Each is checked as stated on
// the standard odometer fixture; none is expected to be an exact identity.

namespace {

const LevelKModel& odometer10() {
  static const LevelKModel model = build_model(odometer_schedule(2, 2, 10), 10);
  return model;
}

ScanResult axis_scan(std::vector<Rational> ms, std::pair<int, int> js) {
  ScanOptions options;
  options.threads = 4;
  return directional_scan(odometer10(), 1, DirectionSubspace::from_vectors({make_point({1, 0})}), ms, js,
                          TimeVariant::theorem_main, options);
}

}  // namespace

TEST_CASE("normalised upper bounds for m in {1,2,4} agree within 10% at the top j") {
  const MStabilityReport report = m_stability_report(axis_scan({Rational(1), Rational(2), Rational(4)}, {10, 10}));
  REQUIRE(report.rows.size() == 1);
  const MStabilityRow& row = report.rows.front();
  for (const auto& [m, v] : row.normalized_upper) MESSAGE("m = " << to_string(m) << ": " << v);
  CHECK(row.relative_spread <= 0.10);
}

TEST_CASE("each decaying summand decreases along the axis scan") {
  const ScanResult scan = axis_scan({Rational(1)}, {3, 8});
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    const ScanRow& a = scan.rows[i - 1];
    const ScanRow& b = scan.rows[i];
    CAPTURE(a.j);
    CHECK(b.side_summand() < a.side_summand());
    CHECK(b.alphabet_summand() < a.alphabet_summand());
    CHECK(b.tail_summand() < a.tail_summand());
  }
}

TEST_CASE("enlarging the window never lowers the lumped entropy") {
  std::mt19937_64 rng(131);
  const std::vector<LevelKModel> models{build_model(odometer_schedule(2, 2, 5), 5),
                                        build_model(spacered_schedule(2, {2, 2, {1, 1, 1}}), 4)};
  int comparisons = 0;
  int lumped_drops = 0;
  for (const LevelKModel& model : models) {
    for (int trial = 0; trial < 10; ++trial) {
      const oracle::PointSet small = oracle::random_set(2, 3, 0.4, rng);
      oracle::PointSet large = small;
      for (const oracle::Point& p : oracle::random_set(2, 4, 0.3, rng)) large.insert(p);
      const Shape ws = oracle::to_shape(2, small);
      const Shape wl = oracle::to_shape(2, large);
      // The unlumped name partition for the larger window refines the smaller one.
      CHECK(oracle::name_entropy(model, 1, wl) >= oracle::name_entropy(model, 1, ws) - 1e-12);
      for (int j = 1; j <= model.K(); ++j) {
        const double a = bracket_from_distribution(model, name_distribution(model, 1, j, ws), 1, 1).lower;
        const double b = bracket_from_distribution(model, name_distribution(model, 1, j, wl), 1, 1).lower;
        ++comparisons;
        if (b < a - 1e-12) {
          if (lumped_drops == 0) MESSAGE("first drop at j = " << j << ": " << a << " -> " << b);
          ++lumped_drops;
        }
      }
    }
  }
  MESSAGE(lumped_drops << " of " << comparisons << " window enlargements lower good_part + lump");
  CHECK(lumped_drops == 0);
}
