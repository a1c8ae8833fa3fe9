#include <cmath>
#include <limits>

#include "rankone/entropy_analysis.hpp"

namespace rankone {

double log_in(double x, LogBase base) { return base == LogBase::two ? std::log2(x) : std::log(x); }

namespace {

double to_base(double natural_log, LogBase base) {
  return base == LogBase::two ? natural_log / std::log(2.0) : natural_log;
}

double plogp_term(const Rational& p, LogBase base) {
  if (p == 0) return 0.0;
  const double x = to_double(p);
  return -x * log_in(x, base);
}

}  // namespace

double partial_entropy(std::span<const Rational> masses, LogBase base) {
  double h = 0.0;
  for (const Rational& p : masses) {
    if (p < 0) throw std::invalid_argument("negative mass " + to_string(p));
    h += plogp_term(p, base);
  }
  return h;
}

double partition_entropy(std::span<const Rational> probs, LogBase base) {
  Rational sum = 0;
  for (const Rational& p : probs) {
    if (p < 0) throw std::invalid_argument("negative mass " + to_string(p));
    sum += p;
  }
  if (sum != 1) throw std::invalid_argument("masses sum to " + to_string(sum) + ", not 1");
  return partial_entropy(probs, base);
}

double shields_bound_from_log(double beta, double ln_alphabet_size, LogBase base) {
  if (beta < 0 || beta > 1) throw std::invalid_argument("shields_bound needs beta in [0,1]");
  if (ln_alphabet_size < 0) throw std::invalid_argument("shields_bound needs |M| >= 1");
  if (beta == 0) return 0.0;
  return beta * to_base(ln_alphabet_size, base) - beta * log_in(beta, base);
}

double shields_bound(double beta, double alphabet_size, LogBase base) {
  if (alphabet_size < 1) throw std::invalid_argument("shields_bound needs |M| >= 1");
  return shields_bound_from_log(beta, std::log(alphabet_size), base);
}

double lemma_good_rhs(const LevelKModel& model, int j, LogBase base) {
  const Rational& e = model.error_mass(j);
  if (e == 1) throw std::invalid_argument("lemma_good_rhs undefined when μ(E_j) = 1");
  double rhs = -log_in(to_double(1 - e), base);
  const Rectangle& r = model.rect(j);
  for (int i = 0; i < r.dim(); ++i) rhs += log_in(static_cast<double>(r.extent(i)), base);
  return rhs;
}

double lemma_bad_alphabet_term(const LevelKModel& model, int k, const Shape& window, const Rational& bad_mass,
                               BadTermMode mode, LogBase base) {
  if (bad_mass < 0 || bad_mass > 1) throw std::invalid_argument("bad mass outside [0,1]");
  if (bad_mass == 0) return 0.0;
  const double b = to_double(bad_mass);
  const double rk = static_cast<double>(model.rect(k).cardinality());
  const double w = static_cast<double>(window.size());
  if (mode == BadTermMode::paper) return 2.0 * b * w * log_in(rk, base);
  return b * w * log_in(rk + 1.0, base);
}

double lemma_bad_rhs(const LevelKModel& model, int k, int /*j*/, const Shape& window, const Rational& bad_mass,
                     BadTermMode mode, LogBase base) {
  const double alphabet = lemma_bad_alphabet_term(model, k, window, bad_mass, mode, base);
  return alphabet + plogp_term(bad_mass, base);
}

Shape entropy_window(const DirectionSubspace& v, const Rational& t, const Rational& m) {
  if (v.is_full()) return cube_points(t, v.ambient_dim());
  return slab_points(v, t, m);
}

EntropyBracket bracket_from_distribution(const LevelKModel& model, const NameDistribution& dist, double t, int n,
                                         const BracketOptions& options) {
  if (!(t > 0)) throw std::invalid_argument("bracket needs t > 0");
  EntropyBracket b;
  const std::vector<Rational> good = dist.good_masses();
  b.good_part = partial_entropy(good, options.base);
  b.bad_mass = dist.bad_mass;
  b.tail_term = plogp_term(dist.bad_mass, options.base);
  b.shields_term = lemma_bad_alphabet_term(model, dist.k, dist.window, dist.bad_mass, options.mode, options.base);
  b.lower = b.good_part + b.tail_term;
  b.upper = b.good_part + b.shields_term + b.tail_term;
  b.good_bound_rhs = lemma_good_rhs(model, dist.j, options.base);
  b.bad_bound_rhs = b.shields_term + b.tail_term;
  b.window_size = dist.window.size();
  b.distinct_names = static_cast<Index>(dist.entries.size());
  b.t = t;
  b.n = n;
  const double scale = std::pow(t, n);
  b.normalized_lower = b.lower / scale;
  b.normalized_upper = b.upper / scale;
  return b;
}

EntropyBracket entropy_bracket(const LevelKModel& model, int k, int j, const DirectionSubspace& v,
                               const Rational& t, const Rational& m, const BracketOptions& options) {
  if (v.ambient_dim() != model.dim()) throw DimensionMismatch(model.dim(), v.ambient_dim());
  const Shape window = entropy_window(v, t, m);
  const NameDistribution dist = name_distribution(model, k, j, window, options.work_budget);
  return bracket_from_distribution(model, dist, to_double(t), v.dim(), options);
}

YMassCheck y_mass_bound_check(const LevelKModel& model, int j, const DirectionSubspace& v, const Rational& t,
                              const Rational& m) {
  const Shape window = entropy_window(v, t, m);
  YMassCheck out;
  out.exact = classify_levels(model, j, window).bad_mass;
  const Rectangle& r = model.rect(j);
  const int d = r.dim();
  const int n = v.dim();
  const double td = to_double(t);
  const double md = to_double(m);
  const int axis = v.is_full() ? -1 : v.coordinate_axis();
  out.axis_variant = axis >= 0;
  double bound = to_double(model.error_mass(j));
  for (int i = 0; i < d; ++i) {
    const double w = static_cast<double>(r.hi()(i) - r.lo()(i));
    double reach;
    if (out.axis_variant) reach = i == axis ? td : md;
    else reach = std::sqrt(static_cast<double>(n)) * td + std::sqrt(static_cast<double>(d - n)) * md;
    if (reach == 0.0) continue;
    bound += w == 0.0 ? std::numeric_limits<double>::infinity() : reach / w;
  }
  out.bound = bound;
  out.holds = to_double(out.exact) <= bound + kEntropySlack;
  return out;
}

double time_for(TimeVariant variant, const Rectangle& r) {
  const Index ell = r.max_side();
  if (ell < 2) throw std::invalid_argument("time schedule needs ℓ_j >= 2");
  const double log_ell = std::log(static_cast<double>(ell));
  const double scale = variant == TimeVariant::theorem_all ? static_cast<double>(ell) : static_cast<double>(r.min_side());
  const double t = std::sqrt(scale * log_ell);
  if (!(t > 0)) throw std::invalid_argument("time schedule needs s_j >= 1");
  return t;
}

TimeSchedule time_schedule(TimeVariant variant, std::span<const Rectangle> rects) {
  TimeSchedule ts{variant, {}};
  for (const Rectangle& r : rects) ts.t.push_back(time_for(variant, r));
  return ts;
}

std::string to_string(TimeVariant v) { return v == TimeVariant::theorem_all ? "theorem_all" : "theorem_main"; }

TimeVariant parse_time_variant(const std::string& s) {
  if (s == "theorem_all" || s == "all") return TimeVariant::theorem_all;
  if (s == "theorem_main" || s == "main") return TimeVariant::theorem_main;
  throw std::invalid_argument("unknown time variant: " + s);
}

}  // namespace rankone
