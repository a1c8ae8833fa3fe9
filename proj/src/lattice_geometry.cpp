#include "rankone/lattice_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

namespace rankone {

LatticePoint make_point(std::initializer_list<Index> coords) {
  LatticePoint p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (Index c : coords) p(i++) = c;
  return p;
}

DimensionMismatch::DimensionMismatch(int expected, int got)
    : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                            ", got " + std::to_string(got)) {}

namespace {

PointMatrix canonical_columns(const PointMatrix& raw) {
  std::vector<Index> order(static_cast<std::size_t>(raw.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return lex_compare(raw.col(a), raw.col(b)) < 0; });
  std::vector<Index> kept;
  kept.reserve(order.size());
  for (Index idx : order) {
    if (kept.empty() || lex_compare(raw.col(kept.back()), raw.col(idx)) != 0) kept.push_back(idx);
  }
  PointMatrix out(raw.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = raw.col(kept[i]);
  return out;
}

Shape from_point_list(int dim, const std::vector<LatticePoint>& pts) { return Shape(dim, pts); }

}  // namespace

Shape::Shape(int dim) : dim_(dim), points_(dim, 0) {
  if (dim < 1) throw std::invalid_argument("shape dimension must be >= 1");
}

Shape::Shape(int dim, const std::vector<LatticePoint>& points) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("shape dimension must be >= 1");
  PointMatrix raw(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) throw DimensionMismatch(dim, static_cast<int>(points[i].size()));
    raw.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  points_ = canonical_columns(raw);
}

Shape::Shape(const PointMatrix& points) : dim_(static_cast<int>(points.rows())) {
  if (dim_ < 1) throw std::invalid_argument("shape dimension must be >= 1");
  points_ = canonical_columns(points);
}

LatticePoint Shape::min_corner() const {
  if (empty()) throw std::invalid_argument("min_corner of empty shape");
  return points_.rowwise().minCoeff();
}

LatticePoint Shape::max_corner() const {
  if (empty()) throw std::invalid_argument("max_corner of empty shape");
  return points_.rowwise().maxCoeff();
}

Shape Shape::translated(const LatticePoint& v) const {
  if (v.size() != dim_) throw DimensionMismatch(dim_, static_cast<int>(v.size()));
  Shape out(dim_);
  out.points_ = points_.colwise() + v;  // translation preserves lexicographic order
  return out;
}

bool Shape::is_subset_of(const Shape& other) const {
  if (other.dim_ != dim_) throw DimensionMismatch(dim_, other.dim_);
  for (Index i = 0; i < size(); ++i) {
    if (!other.contains(point(i))) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const Shape& s) {
  os << '{';
  for (Index i = 0; i < s.size(); ++i) {
    if (i) os << ", ";
    os << '(';
    for (int c = 0; c < s.dim(); ++c) os << (c ? "," : "") << s.points()(c, i);
    os << ')';
  }
  return os << '}';
}

Rectangle::Rectangle(LatticePoint lo, LatticePoint hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw DimensionMismatch(static_cast<int>(lo_.size()), static_cast<int>(hi_.size()));
  if (lo_.size() < 1) throw std::invalid_argument("rectangle dimension must be >= 1");
  if ((hi_.array() < lo_.array()).any()) throw std::invalid_argument("rectangle requires lo <= hi");
}

Rectangle Rectangle::from_sides(const LatticePoint& w) {
  return Rectangle(LatticePoint::Zero(w.size()), w);
}

Index Rectangle::cardinality() const {
  Index n = 1;
  for (int i = 0; i < dim(); ++i) n *= extent(i);
  return n;
}

bool Rectangle::contains(const Rectangle& other) const {
  return contains(other.lo()) && contains(other.hi());
}

LatticePoint Rectangle::point_at(Index linear) const {
  LatticePoint p(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    p(i) = lo_(i) + linear % extent(i);
    linear /= extent(i);
  }
  return p;
}

Index Rectangle::linear_offset(const LatticePoint& v) const {
  Index off = 0;
  for (int i = 0; i < dim(); ++i) off = off * extent(i) + v(i);
  return off;
}

Shape Rectangle::to_shape() const {
  const Index n = cardinality();
  PointMatrix pts(dim(), n);
  for (Index i = 0; i < n; ++i) pts.col(i) = point_at(i);
  Shape out(pts);
  return out;
}

namespace {

void require_same_dim(const Shape& a, const Shape& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

}  // namespace

Shape inner_boundary(const Shape& r, const Shape& s) {
  require_same_dim(r, s);
  std::vector<LatticePoint> out;
  LatticePoint q(r.dim());
  for (Index i = 0; i < r.size(); ++i) {
    const auto v = r.point(i);
    bool leaves = false;
    for (Index k = 0; k < s.size() && !leaves; ++k) {
      q = v + s.point(k);
      leaves = !r.contains(q);
    }
    if (!leaves) continue;
    for (Index k = 0; k < s.size(); ++k) {
      q = v + s.point(k);
      if (r.contains(q)) out.push_back(q);
    }
  }
  return from_point_list(r.dim(), out);
}

Shape window_exit_set(const Shape& r, const Shape& w) {
  require_same_dim(r, w);
  std::vector<LatticePoint> out;
  LatticePoint q(r.dim());
  for (Index i = 0; i < r.size(); ++i) {
    for (Index k = 0; k < w.size(); ++k) {
      q = r.point(i) + w.point(k);
      if (!r.contains(q)) {
        out.emplace_back(r.point(i));
        break;
      }
    }
  }
  return from_point_list(r.dim(), out);
}

Rational folner_ratio(const Shape& r, const LatticePoint& n) {
  if (n.size() != r.dim()) throw DimensionMismatch(r.dim(), static_cast<int>(n.size()));
  if (r.empty()) throw std::invalid_argument("folner_ratio of empty shape");
  Index sym = 0;
  LatticePoint q(r.dim());
  for (Index i = 0; i < r.size(); ++i) {
    q = r.point(i) - n;  // x ∈ R \ (R + n)
    if (!r.contains(q)) ++sym;
    q = r.point(i) + n;  // x + n ∈ (R + n) \ R
    if (!r.contains(q)) ++sym;
  }
  return make_rational(sym, r.size());
}

Rational boundary_ratio(const Shape& r, const Shape& s) {
  if (r.empty()) throw std::invalid_argument("boundary_ratio of empty shape");
  return make_rational(inner_boundary(r, s).size(), r.size());
}

Shape difference_set(const Shape& a, const Shape& b) {
  require_same_dim(a, b);
  PointMatrix pts(a.dim(), a.size() * b.size());
  Index c = 0;
  for (Index i = 0; i < a.size(); ++i)
    for (Index k = 0; k < b.size(); ++k) pts.col(c++) = a.point(i) - b.point(k);
  return Shape(pts);
}

Shape symmetric_difference(const Shape& a, const Shape& b) {
  require_same_dim(a, b);
  std::vector<LatticePoint> out;
  for (Index i = 0; i < a.size(); ++i)
    if (!b.contains(a.point(i))) out.emplace_back(a.point(i));
  for (Index i = 0; i < b.size(); ++i)
    if (!a.contains(b.point(i))) out.emplace_back(b.point(i));
  return from_point_list(a.dim(), out);
}

Shape set_union(const Shape& a, const Shape& b) {
  require_same_dim(a, b);
  PointMatrix pts(a.dim(), a.size() + b.size());
  pts << a.points(), b.points();
  return Shape(pts);
}

bool boundary_containment_holds(const Shape& r, const Shape& s) {
  const Shape boundary = inner_boundary(r, s);
  const Shape diffs = difference_set(s, s);
  LatticePoint q(r.dim());
  for (Index i = 0; i < boundary.size(); ++i) {
    const auto x = boundary.point(i);
    bool covered = false;
    for (Index k = 0; k < diffs.size() && !covered; ++k) {
      // x ∈ R, so x ∈ R △ (R + n) iff x - n ∉ R.
      q = x - diffs.point(k);
      covered = r.contains(x) && !r.contains(q);
    }
    if (!covered) return false;
  }
  return true;
}

Shape minkowski_sum(const Shape& r, const Shape& j) {
  require_same_dim(r, j);
  PointMatrix pts(r.dim(), r.size() * j.size());
  Index c = 0;
  for (Index k = 0; k < j.size(); ++k)
    for (Index i = 0; i < r.size(); ++i) pts.col(c++) = r.point(i) + j.point(k);
  return Shape(pts);
}

bool is_separated(const Shape& r, const Shape& j) {
  require_same_dim(r, j);
  return minkowski_sum(r, j).size() == r.size() * j.size();
}

// --- DirectionSubspace ------------------------------------------------------

namespace {

using RationalVector = DenseVector<Rational>;

Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational acc = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += a(i) * b(i);
  return acc;
}

/// Positive rescaling of a rational vector to a primitive integer vector.
RationalVector primitive(const RationalVector& v) {
  BigInt lcm = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    lcm = boost::multiprecision::lcm(lcm, BigInt(boost::multiprecision::denominator(v(i))));
  }
  BigInt g = 0;
  std::vector<BigInt> ints(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Rational scaled = v(i) * Rational(lcm);
    ints[static_cast<std::size_t>(i)] = boost::multiprecision::numerator(scaled);
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(ints[static_cast<std::size_t>(i)]));
  }
  RationalVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = Rational(ints[static_cast<std::size_t>(i)] / g);
  return out;
}

/// Gram-Schmidt step: residual of v against the orthogonal vectors in `basis`.
RationalVector residual(const RationalVector& v, const std::vector<RationalVector>& basis) {
  RationalVector r = v;
  for (const auto& g : basis) {
    r -= g * (dot(v, g) / dot(g, g));
  }
  return r;
}

bool is_zero(const RationalVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) return false;
  return true;
}

DenseMatrix<Rational> to_matrix(const std::vector<RationalVector>& cols, Eigen::Index rows) {
  DenseMatrix<Rational> m(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return m;
}

}  // namespace

DirectionSubspace::DirectionSubspace(const PointMatrix& spanning) : spanning_(spanning) {
  const auto d = spanning.rows();
  const auto n = spanning.cols();
  if (d < 1 || n < 1 || n > d) throw std::invalid_argument("subspace needs 1 <= n <= d spanning vectors");
  std::vector<RationalVector> v_basis;
  for (Eigen::Index c = 0; c < n; ++c) {
    RationalVector col = spanning.col(c).cast<Rational>();
    RationalVector g = residual(col, v_basis);
    if (is_zero(g)) throw std::invalid_argument("spanning vectors are linearly dependent");
    v_basis.push_back(primitive(g));
  }
  std::vector<RationalVector> all = v_basis;
  std::vector<RationalVector> perp;
  for (Eigen::Index axis = 0; axis < d && static_cast<Eigen::Index>(perp.size()) < d - n; ++axis) {
    RationalVector e = RationalVector::Zero(d);
    e(axis) = 1;
    RationalVector g = residual(e, all);
    if (is_zero(g)) continue;
    g = primitive(g);
    all.push_back(g);
    perp.push_back(g);
  }
  basis_ = to_matrix(v_basis, d);
  complement_ = to_matrix(perp, d);
}

DirectionSubspace DirectionSubspace::from_vectors(const std::vector<LatticePoint>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("subspace needs at least one vector");
  PointMatrix m(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != m.rows()) throw DimensionMismatch(static_cast<int>(m.rows()), static_cast<int>(vectors[i].size()));
    m.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  return DirectionSubspace(m);
}

DirectionSubspace DirectionSubspace::full(int d) {
  return DirectionSubspace(PointMatrix::Identity(d, d));
}

DenseMatrix<Rational> DirectionSubspace::gram() const {
  DenseMatrix<Rational> s = spanning_.cast<Rational>();
  DenseMatrix<Rational> g(s.cols(), s.cols());
  for (Eigen::Index a = 0; a < s.cols(); ++a)
    for (Eigen::Index b = 0; b < s.cols(); ++b) g(a, b) = dot(s.col(a), s.col(b));
  return g;
}

int DirectionSubspace::coordinate_axis() const {
  if (dim() != 1) return -1;
  int axis = -1;
  for (int i = 0; i < ambient_dim(); ++i) {
    if (spanning_(i, 0) != 0) {
      if (axis >= 0) return -1;
      axis = i;
    }
  }
  return axis;
}

bool in_slab(const DirectionSubspace& v, const Rational& t, const Rational& m, const LatticePoint& z) {
  const auto& basis = v.basis();
  const auto& perp = v.complement_basis();
  if (z.size() != basis.rows()) throw DimensionMismatch(static_cast<int>(basis.rows()), static_cast<int>(z.size()));
  const RationalVector zr = z.cast<Rational>();
  const Rational t2 = t * t;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const RationalVector g = basis.col(i);
    const Rational a = dot(zr, g);
    if (a < 0 || a * a > t2 * dot(g, g)) return false;
  }
  const Rational half_m2 = m * m / 4;
  for (Eigen::Index i = 0; i < perp.cols(); ++i) {
    const RationalVector h = perp.col(i);
    const Rational b = dot(zr, h);
    if (b * b > half_m2 * dot(h, h)) return false;
  }
  return true;
}

Shape slab_points(const DirectionSubspace& v, const Rational& t, const Rational& m) {
  if (v.is_full()) throw std::invalid_argument("slab_points requires n < d; use cube_points for V = R^d");
  if (t <= 0) throw std::invalid_argument("slab_points requires t > 0");
  if (m <= 0) throw std::invalid_argument("slab_points requires m > 0");
  const int d = v.ambient_dim();
  const double td = to_double(t);
  const double half_m = to_double(m) / 2.0;
  // Bounding box from the unit vectors, padded; the exact test decides.
  std::vector<double> lo(static_cast<std::size_t>(d), 0.0), hi(static_cast<std::size_t>(d), 0.0);
  auto unit = [](const RationalVector& g) {
    Eigen::VectorXd u(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) u(i) = to_double(g(i));
    return Eigen::VectorXd(u / u.norm());
  };
  for (Eigen::Index i = 0; i < v.basis().cols(); ++i) {
    const Eigen::VectorXd u = unit(v.basis().col(i));
    for (int c = 0; c < d; ++c) {
      lo[static_cast<std::size_t>(c)] += td * std::min(0.0, u(c));
      hi[static_cast<std::size_t>(c)] += td * std::max(0.0, u(c));
    }
  }
  for (Eigen::Index i = 0; i < v.complement_basis().cols(); ++i) {
    const Eigen::VectorXd u = unit(v.complement_basis().col(i));
    for (int c = 0; c < d; ++c) {
      lo[static_cast<std::size_t>(c)] -= half_m * std::abs(u(c));
      hi[static_cast<std::size_t>(c)] += half_m * std::abs(u(c));
    }
  }
  LatticePoint box_lo(d), box_hi(d);
  for (int c = 0; c < d; ++c) {
    box_lo(c) = static_cast<Index>(std::floor(lo[static_cast<std::size_t>(c)])) - 1;
    box_hi(c) = static_cast<Index>(std::ceil(hi[static_cast<std::size_t>(c)])) + 1;
  }
  const Rectangle box(box_lo, box_hi);
  std::vector<LatticePoint> pts;
  for (Index i = 0; i < box.cardinality(); ++i) {
    LatticePoint z = box.point_at(i);
    if (in_slab(v, t, m, z)) pts.push_back(std::move(z));
  }
  return Shape(d, pts);
}

Shape cube_points(const Rational& t, int d) {
  if (t <= 0) throw std::invalid_argument("cube_points requires t > 0");
  if (d < 1) throw std::invalid_argument("cube_points requires d >= 1");
  const Index side = floor_to_int(t);
  return Rectangle(LatticePoint::Zero(d), LatticePoint::Constant(d, side)).to_shape();
}

EccentricityReport eccentricity_stats(std::span<const Rectangle> rects, double threshold) {
  if (rects.empty()) throw std::invalid_argument("eccentricity_stats needs at least one rectangle");
  EccentricityReport report;
  report.threshold = threshold;
  double running = -std::numeric_limits<double>::infinity();
  int stage = 1;
  for (const Rectangle& r : rects) {
    EccentricityRow row;
    row.stage = stage++;
    row.s = r.min_side();
    row.ell = r.max_side();
    row.ratio = row.s == 0 ? std::numeric_limits<double>::infinity()
                           : std::log(static_cast<double>(row.ell)) / static_cast<double>(row.s);
    running = std::max(running, row.ratio);
    row.running_max = running;
    report.rows.push_back(row);
  }
  report.tail_max = running;
  report.verdict = std::isfinite(running) && running <= threshold;
  return report;
}

}  // namespace rankone
