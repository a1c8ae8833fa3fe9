#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankone/lattice_geometry.hpp"
#include "rankone/rank_one_construction.hpp"
#include "rankone/rational.hpp"

namespace rankone {

enum class LogBase { natural, two };
enum class BadTermMode { strict, paper };
enum class TimeVariant { theorem_all, theorem_main };

/// Slack used when comparing floating-point entropies against their bounds.
inline constexpr double kEntropySlack = 1e-12;

double log_in(double x, LogBase base);

/// -Σ p log p with 0 log 0 = 0. The masses must be nonnegative and sum to
/// exactly one.
double partition_entropy(std::span<const Rational> probs, LogBase base = LogBase::natural);

/// -Σ p log p over a sub-collection of atoms (no normalisation check).
double partial_entropy(std::span<const Rational> masses, LogBase base = LogBase::natural);

/// β log|M| - β log β, zero at β = 0.
double shields_bound(double beta, double alphabet_size, LogBase base = LogBase::natural);
/// Same bound with log|M| given as a natural logarithm (for huge alphabets).
double shields_bound_from_log(double beta, double ln_alphabet_size, LogBase base = LogBase::natural);

/// -log(1 - μ(E_j)) + Σ_i log(w_i^j + 1).
double lemma_good_rhs(const LevelKModel& model, int j, LogBase base = LogBase::natural);

/// Shields applied to the lumped complement of the good atoms.
///   strict: μ(Y) |W| log(|R_k| + 1) - μ(Y) log μ(Y)
///   paper:  2 μ(Y) |W| log|R_k|     - μ(Y) log μ(Y)
double lemma_bad_rhs(const LevelKModel& model, int k, int j, const Shape& window, const Rational& bad_mass,
                     BadTermMode mode = BadTermMode::strict, LogBase base = LogBase::natural);

/// First (alphabet) term of lemma_bad_rhs.
double lemma_bad_alphabet_term(const LevelKModel& model, int k, const Shape& window, const Rational& bad_mass,
                               BadTermMode mode, LogBase base);

struct BracketOptions {
  LogBase base = LogBase::natural;
  BadTermMode mode = BadTermMode::strict;
  Index work_budget = kDefaultNameWorkBudget;
};

struct EntropyBracket {
  double good_part = 0.0;
  double tail_term = 0.0;     // -μ(Y) log μ(Y)
  double shields_term = 0.0;  // alphabet term of lemma_bad_rhs
  double lower = 0.0;
  double upper = 0.0;
  double good_bound_rhs = 0.0;
  double bad_bound_rhs = 0.0;
  Rational bad_mass;
  Index window_size = 0;
  Index distinct_names = 0;
  double t = 0.0;
  int n = 0;
  double normalized_lower = 0.0;
  double normalized_upper = 0.0;

  bool good_lemma_holds() const { return good_part <= good_bound_rhs + kEntropySlack; }
  bool bad_lemma_holds() const { return tail_term <= bad_bound_rhs + kEntropySlack; }
};

/// The window S(V,t,m) ∩ Z^d, or S(t) = [0,t]^d when V is the whole space.
Shape entropy_window(const DirectionSubspace& v, const Rational& t, const Rational& m);

/// Bracket for an already computed name distribution, normalised by t^n.
EntropyBracket bracket_from_distribution(const LevelKModel& model, const NameDistribution& dist, double t, int n,
                                         const BracketOptions& options = {});

EntropyBracket entropy_bracket(const LevelKModel& model, int k, int j, const DirectionSubspace& v,
                               const Rational& t, const Rational& m, const BracketOptions& options = {});

/// Exact μ(Y_j) against its closed-form bound. The axis variant
/// t/w_axis + Σ_{i≠axis} m/w_i + μ(E_j) applies when V is a coordinate axis;
/// otherwise Σ_i (√n t + √(d-n) m)/w_i + μ(E_j), which for n = 1, d = 2 is
/// Σ_i (t + m)/w_i.
struct YMassCheck {
  Rational exact;
  double bound = 0.0;
  bool axis_variant = false;
  bool holds = false;
};

YMassCheck y_mass_bound_check(const LevelKModel& model, int j, const DirectionSubspace& v, const Rational& t,
                              const Rational& m);

struct TimeSchedule {
  TimeVariant variant = TimeVariant::theorem_main;
  std::vector<double> t;
};

/// t = √(ℓ log ℓ) (theorem_all) or √(s log ℓ) (theorem_main); needs ℓ >= 2.
double time_for(TimeVariant variant, const Rectangle& r);
TimeSchedule time_schedule(TimeVariant variant, std::span<const Rectangle> rects);

std::string to_string(TimeVariant v);
TimeVariant parse_time_variant(const std::string& s);

struct ScanOptions {
  std::string schedule_id = "schedule";
  double decay_factor = 0.25;
  LogBase base = LogBase::natural;
  BadTermMode mode = BadTermMode::strict;
  Index work_budget = kDefaultNameWorkBudget;
  unsigned threads = 1;
};

struct ScanRow {
  std::string schedule_id;
  int K = 0;
  int k = 0;
  int j = 0;
  int n = 0;
  Rational m;
  double t = 0.0;
  TimeVariant variant = TimeVariant::theorem_main;
  LogBase base = LogBase::natural;
  bool skipped = false;
  std::string skip_reason;
  Rational error_mass;
  EntropyBracket bracket;
  YMassCheck y_check;
  double log_ell = 0.0;
  std::string verdict;

  double good_rhs_normalized() const;
  double bad_rhs_normalized() const;
  /// The three summands of the normalised upper bound that carry the decay:
  /// Σ log(w_i + 1)/t^n, alphabet term / t^n and -μ(Y) log μ(Y)/t^n.
  double side_summand() const;
  double alphabet_summand() const;
  double tail_summand() const;
};

/// One (direction, m) series of a scan.
struct ScanSeries {
  Rational m;
  int first_j = 0;
  int last_j = 0;
  int computed_rows = 0;
  double first_value = 0.0;
  double last_value = 0.0;
  bool strictly_decreasing = false;
  bool decays = false;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<ScanSeries> series;
  double decay_factor = 0.25;

  bool decay_verdict() const;
  bool any_feasible() const;
};

/// Entropy brackets at t = t_j for each j in [first, last] and each m.
ScanResult directional_scan(const LevelKModel& model, int k, const DirectionSubspace& v,
                            std::span<const Rational> m_list, std::pair<int, int> j_range, TimeVariant variant,
                            const ScanOptions& options = {});

struct MStabilityRow {
  int j = 0;
  std::vector<std::pair<Rational, double>> normalized_upper;  // by m
  double relative_spread = 0.0;                               // (max - min) / max
  bool has_all_bad = false;
};

struct MStabilityReport {
  std::vector<MStabilityRow> rows;
};

MStabilityReport m_stability_report(const ScanResult& scan);

}  // namespace rankone
