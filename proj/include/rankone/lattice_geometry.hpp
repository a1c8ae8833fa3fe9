#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "rankone/rational.hpp"

namespace rankone {

using Index = std::int64_t;

/// A point of Z^d. The dimension is the vector length.
using LatticePoint = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

/// d x N integer matrix; column i is the i-th point.
using PointMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

LatticePoint make_point(std::initializer_list<Index> coords);

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(int expected, int got);
};

/// Lexicographic comparison of two equal-length integer vectors.
template <typename A, typename B>
int lex_compare(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return -1;
    if (a(i) > b(i)) return 1;
  }
  return 0;
}

/// A finite subset of Z^d.
///
/// Points are stored as the columns of a d x N matrix, sorted
/// lexicographically and without duplicates, so iteration order is canonical
/// and equality is structural.
class Shape {
 public:
  explicit Shape(int dim = 1);
  Shape(int dim, const std::vector<LatticePoint>& points);
  /// Columns of `points` are the points; duplicates are dropped.
  explicit Shape(const PointMatrix& points);

  int dim() const { return dim_; }
  Index size() const { return points_.cols(); }
  bool empty() const { return points_.cols() == 0; }

  const PointMatrix& points() const { return points_; }
  auto point(Index i) const { return points_.col(i); }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& p) const {
    return find(p) >= 0;
  }

  /// Column index of p, or -1.
  template <typename Derived>
  Index find(const Eigen::MatrixBase<Derived>& p) const {
    if (p.size() != dim_) throw DimensionMismatch(dim_, static_cast<int>(p.size()));
    Index lo = 0, hi = size();
    while (lo < hi) {
      Index mid = lo + (hi - lo) / 2;
      int c = lex_compare(points_.col(mid), p);
      if (c == 0) return mid;
      if (c < 0) lo = mid + 1;
      else hi = mid;
    }
    return -1;
  }

  /// Componentwise minimum / maximum over the points. Requires nonempty.
  LatticePoint min_corner() const;
  LatticePoint max_corner() const;

  Shape translated(const LatticePoint& v) const;
  bool is_subset_of(const Shape& other) const;

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_;
  }

 private:
  int dim_;
  PointMatrix points_;
};

std::ostream& operator<<(std::ostream& os, const Shape& s);

/// The box [lo, hi] of Z^d, with side vector w = hi - lo.
class Rectangle {
 public:
  Rectangle(LatticePoint lo, LatticePoint hi);
  /// [0, w] for the given side vector.
  static Rectangle from_sides(const LatticePoint& w);

  int dim() const { return static_cast<int>(lo_.size()); }
  const LatticePoint& lo() const { return lo_; }
  const LatticePoint& hi() const { return hi_; }
  LatticePoint sides() const { return hi_ - lo_; }
  /// Number of lattice points along axis i, w_i + 1.
  Index extent(int axis) const { return hi_(axis) - lo_(axis) + 1; }
  /// Exact cardinality prod(w_i + 1).
  Index cardinality() const;
  Index min_side() const { return (hi_ - lo_).minCoeff(); }
  Index max_side() const { return (hi_ - lo_).maxCoeff(); }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& p) const {
    if (p.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(p.size()));
    for (int i = 0; i < dim(); ++i) {
      if (p(i) < lo_(i) || p(i) > hi_(i)) return false;
    }
    return true;
  }

  bool contains(const Rectangle& other) const;

  /// Row-major index (last axis fastest); agrees with the lexicographic
  /// order used by Shape.
  template <typename Derived>
  Index linear_index(const Eigen::MatrixBase<Derived>& p) const {
    Index idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * extent(i) + (p(i) - lo_(i));
    return idx;
  }
  LatticePoint point_at(Index linear) const;
  /// Change of the linear index under translation by v (valid while the
  /// translate stays inside the box).
  Index linear_offset(const LatticePoint& v) const;

  Shape to_shape() const;

  friend bool operator==(const Rectangle& a, const Rectangle& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  LatticePoint lo_;
  LatticePoint hi_;
};

/// Inner S-boundary of R: the union of R ∩ (S + v) over anchors v ∈ R whose
/// translate S + v leaves R.
Shape inner_boundary(const Shape& r, const Shape& s);

/// Points v of R with v + W not contained in R.
Shape window_exit_set(const Shape& r, const Shape& w);

/// |R △ (R + n)| / |R|.
Rational folner_ratio(const Shape& r, const LatticePoint& n);

/// |∂_S(R)| / |R|.
Rational boundary_ratio(const Shape& r, const Shape& s);

/// S - S = {a - b : a, b ∈ S}.
Shape difference_set(const Shape& a, const Shape& b);

Shape symmetric_difference(const Shape& a, const Shape& b);
Shape set_union(const Shape& a, const Shape& b);

/// Checks ∂_S(R) ⊆ ⋃_{n ∈ S-S} R △ (R + n).
bool boundary_containment_holds(const Shape& r, const Shape& s);

/// R + J as a set.
Shape minkowski_sum(const Shape& r, const Shape& j);

/// True iff the translates R + v, v ∈ J, are pairwise disjoint.
bool is_separated(const Shape& r, const Shape& j);

/// An n-dimensional subspace V of R^d given by integer spanning vectors.
///
/// Orthogonal (unnormalised) bases of V and of its complement are kept over
/// the rationals. Coordinates along a unit vector g/|g| are compared through
/// squares, so slab membership never touches floating point.
class DirectionSubspace {
 public:
  /// Columns of `spanning` (d x n) span V; they must be linearly independent.
  explicit DirectionSubspace(const PointMatrix& spanning);
  static DirectionSubspace from_vectors(const std::vector<LatticePoint>& vectors);
  /// V = R^d.
  static DirectionSubspace full(int d);

  int ambient_dim() const { return static_cast<int>(spanning_.rows()); }
  int dim() const { return static_cast<int>(spanning_.cols()); }
  bool is_full() const { return dim() == ambient_dim(); }

  const PointMatrix& spanning_vectors() const { return spanning_; }
  /// Orthogonal basis of V (columns), Gram-Schmidt of the spanning vectors.
  const DenseMatrix<Rational>& basis() const { return basis_; }
  /// Orthogonal basis of V⊥ (columns).
  const DenseMatrix<Rational>& complement_basis() const { return complement_; }
  /// Gram matrix of the spanning vectors.
  DenseMatrix<Rational> gram() const;

  /// True when V is spanned by a single coordinate axis; returns that axis.
  int coordinate_axis() const;

 private:
  PointMatrix spanning_;
  DenseMatrix<Rational> basis_;
  DenseMatrix<Rational> complement_;
};

/// S(V, t, m) ∩ Z^d where S(V, t, m) = tQ + mQ', Q the unit cube [0,1]^n in
/// V and Q' the unit cube in V⊥ centred at the origin. Closed inequalities.
Shape slab_points(const DirectionSubspace& v, const Rational& t, const Rational& m);

/// Exact membership test used by slab_points.
bool in_slab(const DirectionSubspace& v, const Rational& t, const Rational& m,
             const LatticePoint& z);

/// [0, floor(t)]^d.
Shape cube_points(const Rational& t, int d);

struct EccentricityRow {
  int stage = 0;
  Index s = 0;
  Index ell = 0;
  double ratio = 0.0;  // log(ell)/s; +inf when s == 0
  double running_max = 0.0;
};

/// Per-stage log(ℓ_j)/s_j statistics. `tail_max` is the maximum over the
/// computed stages; it stands in for the limsup and is only that.
struct EccentricityReport {
  std::vector<EccentricityRow> rows;
  double threshold = 0.0;
  double tail_max = 0.0;
  bool verdict = false;
};

EccentricityReport eccentricity_stats(std::span<const Rectangle> rects, double threshold);

}  // namespace rankone
