#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "rankone/entropy_analysis.hpp"

namespace rankone {

namespace {

double scale_of(const ScanRow& row) { return std::pow(row.bracket.t, row.n); }

void compute_row(const LevelKModel& model, const DirectionSubspace& v, ScanRow& row, const ScanOptions& options) {
  if (row.j < row.k) {
    row.skipped = true;
    row.skip_reason = "j<k";
    return;
  }
  if (row.j > model.K()) {
    row.skipped = true;
    row.skip_reason = "j>K";
    return;
  }
  const Rectangle& r = model.rect(row.j);
  if (r.max_side() < 2) {
    row.skipped = true;
    row.skip_reason = "ell<2";
    return;
  }
  row.error_mass = model.error_mass(row.j);
  row.log_ell = std::log(static_cast<double>(r.max_side()));
  row.t = time_for(row.variant, r);
  const Rational t(row.t);
  try {
    const BracketOptions bo{options.base, options.mode, options.work_budget};
    row.bracket = entropy_bracket(model, row.k, row.j, v, t, row.m, bo);
    row.y_check = y_mass_bound_check(model, row.j, v, t, row.m);
  } catch (const BudgetExceeded&) {
    row.skipped = true;
    row.skip_reason = "budget";
    return;
  }
  const bool ok = row.bracket.good_lemma_holds() && row.bracket.bad_lemma_holds() && row.y_check.holds &&
                  row.bracket.lower <= row.bracket.upper + kEntropySlack;
  row.verdict = ok ? "pass" : "fail";
}

}  // namespace

double ScanRow::good_rhs_normalized() const { return bracket.good_bound_rhs / scale_of(*this); }
double ScanRow::bad_rhs_normalized() const { return bracket.bad_bound_rhs / scale_of(*this); }

double ScanRow::side_summand() const {
  return (bracket.good_bound_rhs + log_in(to_double(1 - error_mass), base)) / scale_of(*this);
}

double ScanRow::alphabet_summand() const { return bracket.shields_term / scale_of(*this); }
double ScanRow::tail_summand() const { return bracket.tail_term / scale_of(*this); }

bool ScanResult::decay_verdict() const {
  if (series.empty()) return false;
  return std::all_of(series.begin(), series.end(), [](const ScanSeries& s) { return s.decays; });
}

bool ScanResult::any_feasible() const {
  return std::any_of(rows.begin(), rows.end(), [](const ScanRow& r) { return !r.skipped; });
}

ScanResult directional_scan(const LevelKModel& model, int k, const DirectionSubspace& v,
                            std::span<const Rational> m_list, std::pair<int, int> j_range, TimeVariant variant,
                            const ScanOptions& options) {
  if (v.ambient_dim() != model.dim()) throw DimensionMismatch(model.dim(), v.ambient_dim());
  if (m_list.empty()) throw std::invalid_argument("scan needs at least one m");
  if (j_range.first > j_range.second) throw std::invalid_argument("empty j range");
  if (k < 1 || k > model.K()) throw std::out_of_range("k outside 1..K");
  for (const Rational& m : m_list) {
    if (m <= 0) throw std::invalid_argument("m must be positive");
  }

  ScanResult result;
  result.decay_factor = options.decay_factor;
  for (const Rational& m : m_list) {
    for (int j = j_range.first; j <= j_range.second; ++j) {
      ScanRow row;
      row.schedule_id = options.schedule_id;
      row.K = model.K();
      row.k = k;
      row.j = j;
      row.n = v.dim();
      row.m = m;
      row.variant = variant;
      row.base = options.base;
      row.verdict = "skipped";
      result.rows.push_back(std::move(row));
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      try {
        compute_row(model, v, result.rows[i], options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(result.rows.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (ScanRow& row : result.rows) {
    if (row.skipped) row.verdict = "skipped:" + row.skip_reason;
  }

  for (const Rational& m : m_list) {
    ScanSeries s;
    s.m = m;
    s.strictly_decreasing = true;
    double previous = 0.0;
    for (const ScanRow& row : result.rows) {
      if (row.m != m || row.skipped) continue;
      const double value = row.bracket.normalized_upper;
      if (s.computed_rows == 0) {
        s.first_j = row.j;
        s.first_value = value;
      } else if (!(value < previous)) {
        s.strictly_decreasing = false;
      }
      s.last_j = row.j;
      s.last_value = value;
      previous = value;
      ++s.computed_rows;
    }
    if (s.computed_rows < 2) s.strictly_decreasing = false;
    s.decays = s.computed_rows >= 2 && s.last_value <= options.decay_factor * s.first_value;
    result.series.push_back(s);
  }
  return result;
}

MStabilityReport m_stability_report(const ScanResult& scan) {
  std::set<Rational> ms;
  std::set<int> js;
  for (const ScanRow& row : scan.rows) {
    ms.insert(row.m);
    js.insert(row.j);
  }
  if (ms.size() < 2) throw std::invalid_argument("m stability needs at least two values of m");
  MStabilityReport report;
  for (int j : js) {
    MStabilityRow out;
    out.j = j;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const ScanRow& row : scan.rows) {
      if (row.j != j || row.skipped) continue;
      const double value = row.bracket.normalized_upper;
      out.normalized_upper.emplace_back(row.m, value);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      if (row.bracket.bad_mass == 1) out.has_all_bad = true;
    }
    if (out.normalized_upper.empty()) continue;
    out.relative_spread = hi > 0 ? (hi - lo) / hi : 0.0;
    report.rows.push_back(std::move(out));
  }
  return report;
}

}  // namespace rankone
