#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankone/lattice_geometry.hpp"
#include "rankone/rank_one_construction.hpp"
#include "rankone/rational.hpp"

namespace rankone {

/// Sorted linear indices of cells of the ambient box.
using CellSet = std::vector<Index>;

/// A Rohlin tower inside a finite box of cells: levels base + v for v in the
/// shape, plus the error set (everything else).
///
/// The constructor rejects bases whose translates overlap or leave the box.
class LabeledTower {
 public:
  LabeledTower(Rectangle space, Shape shape, CellSet base);

  const Rectangle& space() const { return space_; }
  const Shape& shape() const { return shape_; }
  const CellSet& base() const { return base_; }
  Index cell_count() const { return space_.cardinality(); }

  /// Column index of the shape point labelling `cell`, or kErrorLabel.
  std::int32_t label(Index cell) const { return labels_[static_cast<std::size_t>(cell)]; }
  const std::vector<std::int32_t>& labels() const { return labels_; }

  /// Cells of the level labelled by shape column `a`.
  CellSet level(Index a) const;
  CellSet error_set() const;
  Rational level_mass() const { return make_rational(static_cast<Index>(base_.size()), cell_count()); }
  Rational error_mass() const;

 private:
  Rectangle space_;
  Shape shape_;
  CellSet base_;
  std::vector<std::int32_t> labels_;
};

/// Tower j of a level-K model as a LabeledTower on R_K.
LabeledTower tower_from_model(const LevelKModel& model, int j);

/// Cells b + v for b in `cells`; throws std::out_of_range if any leaves the box.
CellSet translate_cells(const Rectangle& space, const CellSet& cells, const LatticePoint& v);

/// P ≤ Q: every atom of P (error set included) is a union of atoms of Q.
bool refines(const LabeledTower& p, const LabeledTower& q);

/// Σ_a μ(P_a △ Q_a) over the shape labels and the error label.
Rational tower_distance(const LabeledTower& p, const LabeledTower& q);

/// Shape columns a with μ(A ∩ P_a) > μ(P_a)/2.
std::vector<Index> majority_labels(const CellSet& a, const LabeledTower& p);

/// Union of the levels selected by majority_labels.
CellSet majority_set(const CellSet& a, const LabeledTower& p);

/// Q_J: the tower of shape R with base ⋃_{v∈J} (base(Q) + v).
LabeledTower restrict_tower(const LabeledTower& q, const Shape& r, const Shape& j);

struct DerivedTower {
  std::optional<LabeledTower> tower;  // empty when J is empty
  Shape stacking;                     // J
  Shape majority;                     // labels of A(Q)
  Shape boundary;                     // ∂_R(S)

  bool empty() const { return !tower.has_value(); }
};

/// P(Q) = Q_J with J the majority labels of base(P) outside ∂_R(S).
/// `require_refinement` checks P ≤ Q first.
DerivedTower derived_tower(const LabeledTower& p, const LabeledTower& q, bool require_refinement = true);

struct NeedgeomSides {
  bool defined = false;  // false when J is empty
  Rational lhs;          // d(P(Q), P)
  /// |R| μ(A(Q) △ A) + |∂_R(S)| μ(B) + |R| μ(E_Q)
  Rational paper_rhs;
  /// 2|R| (μ(A(Q) △ A) + |I ∩ ∂_R(S)| μ(B)), I the majority labels
  Rational corrected_rhs;

  bool paper_holds() const { return !defined || lhs <= paper_rhs; }
  bool corrected_holds() const { return !defined || lhs <= corrected_rhs; }
};

NeedgeomSides needgeom_sides(const LabeledTower& p, const LabeledTower& q, bool require_refinement = true);

class RefinementError : public std::runtime_error {
 public:
  RefinementError(int k, int ell, const std::string& what);
  int k() const { return k_; }
  int ell() const { return ell_; }

 private:
  int k_;
  int ell_;
};

/// δ_j = 2^{-j} for j = 0..count-1.
std::vector<Rational> default_deltas(int count);

struct CauchyCheck {
  int k = 0;
  int ell = 0;
  int m = 0;
  Rational distance;
  Rational bound;        // Σ_{i=ℓ}^{ℓ+m-1} δ_i
  Rational sharp_bound;  // Σ_{i=ℓ}^{ℓ+m-1} δ_{k+i}
  bool holds() const { return distance <= bound; }
  bool sharp_holds() const { return distance <= sharp_bound; }
};

/// The grid P_{k,ℓ}, k = 1..N, ℓ = 0..N-k (capped at depth), with
/// P_{k,0} = P_k, P_{k,1} = P_k(P_{k+1}) and P_{k,ℓ} = (P_{k+1,ℓ-1})_{I_k}.
struct RefinementTrace {
  std::vector<std::vector<LabeledTower>> grid;  // grid[k-1][ℓ]
  std::vector<Shape> stacking;                  // I_k, k = 1..N-1
  std::vector<Rational> deltas;                 // δ_0, δ_1, ...
  std::vector<Rational> hypothesis;             // d(P_k(P_{k+1}), P_k), k = 1..N-1
  std::vector<CauchyCheck> checks;

  int towers() const { return static_cast<int>(grid.size()); }
  int depth(int k) const { return static_cast<int>(grid[static_cast<std::size_t>(k - 1)].size()) - 1; }
  const LabeledTower& at(int k, int ell) const;
  /// d(P_{k,ℓ}, P_{k,ℓ+1}); requires ℓ < depth(k).
  Rational distance_to_next(int k, int ell) const;
  /// Σ_{j≥ℓ} δ_j over the supplied deltas.
  Rational tail_bound(int ell) const;
  int violations() const;
  int sharp_violations() const;
};

/// Builds the refinement grid up to `depth` columns. Throws RefinementError
/// with the offending (k, ℓ) when a hypothesis or an invariant fails.
RefinementTrace refine_sequence(const std::vector<LabeledTower>& towers, const std::vector<Rational>& deltas,
                                int depth);

/// Towers of a one-dimensional base-2 odometer at normalisation K, k = 1..count.
/// At each level k <= perturbed_levels, `swaps` adjacent pairs of copies p, p + 2^k
/// are replaced by a single copy at p + 2^{k-1}.
std::vector<LabeledTower> perturbed_odometer_towers(int K, int count, int perturbed_levels, int swaps,
                                                    std::uint64_t seed);

/// A random tower of the given shape: candidate base cells are tried in a
/// random order and kept while the translates stay disjoint and inside the box.
LabeledTower random_tower(const Rectangle& space, const Shape& shape, double density, std::mt19937_64& rng);

/// A random R-separated J with R + J ⊆ S (possibly empty).
Shape random_stacking_set(const Shape& r, const Shape& s, double density, std::mt19937_64& rng);

}  // namespace rankone
