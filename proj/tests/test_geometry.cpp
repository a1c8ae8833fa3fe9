#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rankone/lattice_geometry.hpp"

using namespace rankone;
using oracle::Point;
using oracle::PointSet;

namespace {

Shape box_shape(const Point& lo, const Point& hi) {
  return oracle::to_shape(static_cast<int>(lo.size()), oracle::box(lo, hi));
}

Shape points(int d, std::initializer_list<Point> pts) { return oracle::to_shape(d, PointSet(pts)); }

}  // namespace

TEST_CASE("shape stores canonical sorted points") {
  const Shape s(2, {make_point({1, 0}), make_point({0, 2}), make_point({1, 0})});
  CHECK(s.size() == 2);
  CHECK(s.point(0) == make_point({0, 2}));
  CHECK(s.contains(make_point({1, 0})));
  CHECK_FALSE(s.contains(make_point({2, 0})));
  CHECK_THROWS_AS(s.contains(make_point({1})), DimensionMismatch);
}

TEST_CASE("rectangle cardinality and linear order agree with the shape") {
  const Rectangle r(make_point({-1, 2}), make_point({1, 5}));
  CHECK(r.cardinality() == 12);
  CHECK(r.min_side() == 2);
  CHECK(r.max_side() == 3);
  const Shape s = r.to_shape();
  REQUIRE(s.size() == 12);
  for (Index i = 0; i < s.size(); ++i) {
    CHECK(r.linear_index(s.point(i)) == i);
    CHECK(r.point_at(i) == s.point(i));
  }
  CHECK_THROWS_AS(Rectangle(make_point({0, 0}), make_point({1, -1})), std::invalid_argument);
}

TEST_CASE("inner boundary examples") {
  const Shape r = box_shape({0, 0}, {2, 2});
  CHECK(inner_boundary(r, points(2, {{0, 0}})).empty());
  CHECK(inner_boundary(r, points(2, {{0, 0}, {1, 0}})) == points(2, {{2, 0}, {2, 1}, {2, 2}}));
  for (Index n = 1; n <= 20; ++n) {
    const PointSet rs = oracle::box({0}, {n});
    const PointSet ss{{0}, {1}};
    const PointSet expected = oracle::anchored_boundary(rs, ss);
    CHECK(expected.size() == 1);
    CHECK(oracle::to_set(inner_boundary(oracle::to_shape(1, rs), oracle::to_shape(1, ss))) == expected);
  }
  CHECK_THROWS_AS(inner_boundary(r, points(1, {{0}})), DimensionMismatch);
}

TEST_CASE("inner boundary matches the brute-force definition on random shapes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + trial % 2;
    const PointSet r = oracle::random_set(d, d == 1 ? 12 : 6, 0.6, rng);
    const PointSet s = oracle::random_set(d, 3, 0.5, rng);
    CHECK(oracle::to_set(inner_boundary(oracle::to_shape(d, r), oracle::to_shape(d, s))) ==
          oracle::anchored_boundary(r, s));
  }
}

TEST_CASE("folner ratio examples") {
  CHECK(folner_ratio(box_shape({0}, {9}), make_point({1})) == make_rational(2, 10));
  CHECK(folner_ratio(box_shape({0, 0}, {1, 1}), make_point({1, 0})) == 1);
  CHECK(folner_ratio(box_shape({0, 0}, {3, 2}), make_point({0, 0})) == 0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const PointSet r = oracle::random_set(2, 6, 0.5, rng);
    const Point n{static_cast<Index>(trial % 3) - 1, static_cast<Index>(trial % 5) - 2};
    const auto expected = make_rational(static_cast<Index>(oracle::symmetric_difference(r, oracle::translate(r, n)).size()),
                                        static_cast<Index>(r.size()));
    CHECK(folner_ratio(oracle::to_shape(2, r), make_point({n[0], n[1]})) == expected);
  }
}

TEST_CASE("boundary ratio examples") {
  const Shape cross = points(2, {{0, 0}, {1, 0}, {0, 1}});
  const PointSet big = oracle::box({0, 0}, {99, 99});
  const Rational ratio = boundary_ratio(oracle::to_shape(2, big), cross);
  CHECK(ratio == make_rational(static_cast<Index>(oracle::anchored_boundary(big, oracle::to_set(cross)).size()), 10000));
  CHECK(ratio == make_rational(199, 10000));
  CHECK(ratio < make_rational(6, 100));
  CHECK(boundary_ratio(box_shape({0, 0}, {4, 4}), points(2, {{0, 0}})) == 0);
  CHECK(boundary_ratio(box_shape({0}, {1}), box_shape({0}, {3})) == 1);
}

TEST_CASE("boundary containment holds on random shapes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 2;
    const Shape r = oracle::to_shape(d, oracle::random_set(d, d == 1 ? 10 : 5, 0.6, rng));
    const Shape s = oracle::to_shape(d, oracle::random_set(d, 3, 0.4, rng));
    CHECK(boundary_containment_holds(r, s));
  }
}

TEST_CASE("boundary ratio of growing squares decreases to zero") {
  const Shape s = points(2, {{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  Rational previous = 2;
  for (Index k = 1; k <= 200; k += (k < 20 ? 1 : 9)) {
    const Rational ratio = boundary_ratio(box_shape({0, 0}, {k, k}), s);
    CHECK(ratio <= previous);
    previous = ratio;
  }
  CHECK(previous < make_rational(1, 20));
}

TEST_CASE("minkowski sums and separation") {
  const Shape r = box_shape({0}, {1});
  CHECK(is_separated(r, points(1, {{0}, {2}})));
  CHECK(minkowski_sum(r, points(1, {{0}, {2}})) == box_shape({0}, {3}));
  CHECK_FALSE(is_separated(r, points(1, {{0}, {1}})));
  const Shape sq = box_shape({0, 0}, {1, 1});
  const Shape j = points(2, {{0, 0}, {2, 0}, {0, 2}, {2, 2}});
  CHECK(is_separated(sq, j));
  CHECK(minkowski_sum(sq, j).size() == 16);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const PointSet rs = oracle::random_set(2, 3, 0.5, rng);
    const PointSet js = oracle::random_set(2, 5, 0.15, rng);
    const bool separated = is_separated(oracle::to_shape(2, rs), oracle::to_shape(2, js));
    CHECK(separated == oracle::pairwise_disjoint(rs, js));
    if (separated) CHECK(minkowski_sum(oracle::to_shape(2, rs), oracle::to_shape(2, js)).size() == Index(rs.size() * js.size()));
  }
}

TEST_CASE("direction subspace bases are orthogonal and complementary") {
  const auto v = DirectionSubspace::from_vectors({make_point({1, 2, 0}), make_point({0, 1, 1})});
  CHECK(v.dim() == 2);
  CHECK(v.ambient_dim() == 3);
  std::vector<std::vector<Rational>> columns;
  for (const auto* m : {&v.basis(), &v.complement_basis()})
    for (Eigen::Index c = 0; c < m->cols(); ++c) {
      std::vector<Rational> col;
      for (Eigen::Index r = 0; r < m->rows(); ++r) col.push_back((*m)(r, c));
      columns.push_back(col);
    }
  REQUIRE(columns.size() == 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      Rational dot = 0;
      for (std::size_t r = 0; r < 3; ++r) dot += columns[a][r] * columns[b][r];
      CHECK(dot == 0);
    }
  CHECK(DirectionSubspace::from_vectors({make_point({0, 3})}).coordinate_axis() == 1);
  CHECK(DirectionSubspace::from_vectors({make_point({1, 1})}).coordinate_axis() == -1);
  CHECK_THROWS_AS(DirectionSubspace::from_vectors({make_point({1, 2}), make_point({2, 4})}), std::invalid_argument);
}

TEST_CASE("slab examples") {
  const auto e1 = DirectionSubspace::from_vectors({make_point({1, 0})});
  CHECK(slab_points(e1, 3, 2) == box_shape({0, -1}, {3, 1}));

  const auto diag = DirectionSubspace::from_vectors({make_point({1, 1})});
  CHECK(slab_points(diag, parse_rational("2.83"), 1) == points(2, {{0, 0}, {1, 1}, {2, 2}}));

  for (const auto& v : {e1, diag, DirectionSubspace::from_vectors({make_point({1, 2})})})
    CHECK(slab_points(v, make_rational(1, 3), 1).contains(make_point({0, 0})));

  CHECK_THROWS_AS(slab_points(DirectionSubspace::full(2), 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(slab_points(e1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(slab_points(e1, 1, 0), std::invalid_argument);
}

TEST_CASE("slab membership agrees with floating point away from the boundary") {
  std::mt19937_64 rng(19);
  const std::vector<std::vector<LatticePoint>> directions{
      {make_point({1, 0})}, {make_point({1, 1})}, {make_point({1, 2})}, {make_point({2, -1, 1})},
      {make_point({1, 0, 1}), make_point({0, 1, -1})}};
  std::uniform_int_distribution<int> tenths(5, 60);
  for (const auto& dir : directions) {
    const DirectionSubspace v = DirectionSubspace::from_vectors(dir);
    const int d = v.ambient_dim();
    // Orthonormal frame from the library's exact orthogonal bases.
    std::vector<Eigen::VectorXd> along, across;
    for (int c = 0; c < v.basis().cols(); ++c) {
      Eigen::VectorXd g(d);
      for (int i = 0; i < d; ++i) g(i) = to_double(v.basis()(i, c));
      along.push_back(g.normalized());
    }
    for (int c = 0; c < v.complement_basis().cols(); ++c) {
      Eigen::VectorXd h(d);
      for (int i = 0; i < d; ++i) h(i) = to_double(v.complement_basis()(i, c));
      across.push_back(h.normalized());
    }
    for (int trial = 0; trial < 8; ++trial) {
      const Rational t = make_rational(tenths(rng), 10);
      const Rational m = make_rational(tenths(rng), 10);
      const Shape slab = slab_points(v, t, m);
      const double td = to_double(t), md = to_double(m);
      const Index reach = static_cast<Index>(std::ceil(td + md)) + 1;
      for (const Point& z : oracle::box(Point(static_cast<std::size_t>(d), -reach), Point(static_cast<std::size_t>(d), reach))) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x(i) = static_cast<double>(z[static_cast<std::size_t>(i)]);
        double margin = 1e9;
        bool inside = true;
        for (const auto& g : along) {
          const double a = g.dot(x);
          margin = std::min({margin, std::abs(a), std::abs(a - td)});
          inside = inside && a >= 0 && a <= td;
        }
        for (const auto& h : across) {
          const double b = h.dot(x);
          margin = std::min(margin, std::abs(std::abs(b) - md / 2));
          inside = inside && std::abs(b) <= md / 2;
        }
        if (margin < 1e-9) continue;
        LatticePoint zp(d);
        for (int i = 0; i < d; ++i) zp(i) = z[static_cast<std::size_t>(i)];
        CHECK(slab.contains(zp) == inside);
      }
    }
  }
}

TEST_CASE("slabs grow with t and m") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> tenths(3, 50);
  for (const auto& vec : {make_point({1, 0}), make_point({1, 1}), make_point({2, 1}), make_point({1, -3})}) {
    const DirectionSubspace v = DirectionSubspace::from_vectors({vec});
    for (int trial = 0; trial < 10; ++trial) {
      const Rational t = make_rational(tenths(rng), 10), m = make_rational(tenths(rng), 10);
      const Rational t2 = t + make_rational(tenths(rng), 10), m2 = m + make_rational(tenths(rng), 10);
      CHECK(slab_points(v, t, m).is_subset_of(slab_points(v, t2, m2)));
    }
  }
}

TEST_CASE("cube examples") {
  CHECK(cube_points(2, 2).size() == 9);
  CHECK(cube_points(make_rational(1, 2), 1) == points(1, {{0}}));
  CHECK(cube_points(3, 3).size() == 64);
  CHECK_THROWS_AS(cube_points(0, 2), std::invalid_argument);
}

TEST_CASE("eccentricity examples") {
  std::vector<Rectangle> squares;
  for (int j = 1; j <= 8; ++j) {
    const Index w = (Index{1} << j) - 1;
    squares.push_back(Rectangle(make_point({0, 0}), make_point({w, w})));
  }
  const EccentricityReport sq = eccentricity_stats(squares, 1.0);
  REQUIRE(sq.rows.size() == 8);
  for (int j = 1; j <= 8; ++j) {
    const double w = std::pow(2.0, j) - 1;
    CHECK(sq.rows[static_cast<std::size_t>(j - 1)].ratio == doctest::Approx(std::log(w) / w));
    if (j > 2) CHECK(sq.rows[static_cast<std::size_t>(j - 1)].ratio < sq.rows[static_cast<std::size_t>(j - 2)].ratio);
  }
  CHECK(sq.verdict);

  std::vector<Rectangle> thin;
  for (int j = 1; j <= 4; ++j) {
    thin.push_back(Rectangle(make_point({0, 0}), make_point({Index{1} << (Index{1} << j), j})));
  }
  const EccentricityReport th = eccentricity_stats(thin, 1.0);
  for (int j = 1; j <= 4; ++j)
    CHECK(th.rows[static_cast<std::size_t>(j - 1)].ratio == doctest::Approx(std::pow(2.0, j) * std::log(2.0) / j));
  CHECK_FALSE(th.verdict);

  const EccentricityReport one = eccentricity_stats(std::vector<Rectangle>{Rectangle(make_point({0}), make_point({7}))}, 1.0);
  CHECK(one.rows[0].ratio == doctest::Approx(std::log(7.0) / 7.0));

  const EccentricityReport flat = eccentricity_stats(std::vector<Rectangle>{Rectangle(make_point({0, 0}), make_point({5, 0}))}, 1.0);
  CHECK(std::isinf(flat.rows[0].ratio));
  CHECK_FALSE(flat.verdict);
}
