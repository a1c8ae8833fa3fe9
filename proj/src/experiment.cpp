#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rankone/experiment.hpp"

namespace rankone {

namespace fs = std::filesystem;

namespace {

template <typename T>
T get_or(const Json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

std::optional<std::vector<LatticePoint>> parse_direction(const Json& d) {
  if (d.is_string()) {
    if (d.get<std::string>() == "full") return std::nullopt;
    throw ConfigError("unknown direction keyword " + d.dump());
  }
  if (!d.is_array() || d.empty()) throw ConfigError("direction must be \"full\" or a list of integer vectors");
  std::vector<LatticePoint> vectors;
  for (const Json& v : d) vectors.push_back(point_from_json(v));
  return vectors;
}

std::string direction_label(const std::optional<std::vector<LatticePoint>>& dir) {
  if (!dir) return "full";
  std::string out;
  for (std::size_t i = 0; i < dir->size(); ++i) {
    if (i) out += '+';
    const LatticePoint& v = (*dir)[i];
    for (Eigen::Index c = 0; c < v.size(); ++c) {
      if (c) out += '_';
      out += std::to_string(v(c));
    }
  }
  return out;
}

DirectionSubspace make_direction(const std::optional<std::vector<LatticePoint>>& dir, int d) {
  if (!dir) return DirectionSubspace::full(d);
  for (const LatticePoint& v : *dir) {
    if (v.size() != d) throw ConfigError("direction vector has dimension " + std::to_string(v.size()) + ", model has " + std::to_string(d));
  }
  try {
    return DirectionSubspace::from_vectors(*dir);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad direction: ") + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

Json verdict(const std::string& name, bool pass) { return Json{{"name", name}, {"pass", pass}}; }

struct Context {
  ExperimentConfig cfg;
  fs::path out;
  unsigned threads = 1;
  std::ostream& err;
  Json verdicts = Json::array();
};

int cmd_validate(Context& ctx) {
  const ConstructionSchedule schedule = build_schedule(ctx.cfg);
  const ValidationReport report = validate_schedule(schedule, ctx.cfg.eccentricity_threshold);

  Json doc{{"valid", report.valid()}};
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"stage", v.stage}, {"condition", v.condition}, {"detail", v.detail}});
    ctx.err << "stage " << v.stage << ": " << v.condition << ": " << v.detail << '\n';
  }
  doc["violations"] = violations;
  auto strings = [](const std::vector<Rational>& xs) {
    Json a = Json::array();
    for (const Rational& x : xs) a.push_back(to_string(x));
    return a;
  };
  doc["coverage"] = strings(report.coverage);
  doc["folner_trend"] = strings(report.folner_trend);
  doc["error_mass"] = strings(report.error_mass);
  doc["eccentricity"] = {{"threshold", report.eccentricity.threshold},
                         {"tail_max", report.eccentricity.tail_max},
                         {"verdict", report.eccentricity.verdict}};
  open_out(ctx.out / "validate_report.json") << doc.dump(2) << '\n';
  auto csv = open_out(ctx.out / "eccentricity.csv");
  write_eccentricity_csv(csv, report.eccentricity, ctx.cfg.hash);

  Json v = verdict("schedule_valid", report.valid());
  if (!report.valid()) v["first_stage"] = report.violations.front().stage;
  ctx.verdicts.push_back(v);
  Json ecc = verdict("eccentricity", report.eccentricity.verdict);
  ecc["informational"] = true;
  ecc["tail_max"] = report.eccentricity.tail_max;
  ctx.verdicts.push_back(ecc);
  return report.valid() ? kExitPass : kExitDomain;
}

LevelKModel make_model(const ExperimentConfig& cfg) {
  const ConstructionSchedule schedule = build_schedule(cfg);
  const int K = cfg.K.value_or(schedule.levels());
  return LevelKModel(schedule, K, cfg.cell_budget);
}

struct ScanBatch {
  std::vector<std::string> labels;
  std::vector<ScanResult> results;
};

ScanBatch run_scans(Context& ctx, const LevelKModel& model) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::pair<int, int> range = cfg.j_range.value_or(std::pair<int, int>{cfg.k, model.K()});
  ScanBatch batch;
  auto csv = open_out(ctx.out / "scan.csv");
  write_scan_header(csv, cfg.hash);
  for (const auto& dir : cfg.directions) {
    const DirectionSubspace v = make_direction(dir, model.dim());
    ScanOptions opts;
    opts.schedule_id = cfg.schedule_id + "@" + direction_label(dir);
    opts.decay_factor = cfg.decay_factor;
    opts.base = cfg.log_base;
    opts.mode = cfg.mode;
    opts.work_budget = cfg.work_budget;
    opts.threads = ctx.threads;
    batch.labels.push_back(direction_label(dir));
    batch.results.push_back(directional_scan(model, cfg.k, v, cfg.m_list, range, cfg.variant, opts));
    write_scan_rows(csv, batch.results.back());
  }
  return batch;
}

int cmd_scan(Context& ctx) {
  const LevelKModel model = make_model(ctx.cfg);
  auto model_csv = open_out(ctx.out / "model.csv");
  write_model_csv(model_csv, model, ctx.cfg.hash);
  const ScanBatch batch = run_scans(ctx, model);
  bool all_pass = true;
  bool starved = false;
  for (std::size_t i = 0; i < batch.results.size(); ++i) {
    const ScanResult& r = batch.results[i];
    const bool decays = r.decay_verdict();
    const bool pass = ctx.cfg.expect_decay ? decays : !decays;
    Json v = verdict("decay[" + batch.labels[i] + "]", pass && r.any_feasible());
    v["decays"] = decays;
    v["expected"] = ctx.cfg.expect_decay ? "decay" : "no_decay";
    Json series = Json::array();
    for (const ScanSeries& s : r.series) {
      series.push_back({{"m", to_string(s.m)},
                        {"first_j", s.first_j},
                        {"last_j", s.last_j},
                        {"first", s.first_value},
                        {"last", s.last_value},
                        {"strictly_decreasing", s.strictly_decreasing}});
    }
    v["series"] = series;
    if (!r.any_feasible()) {
      starved = true;
      ctx.err << "direction " << batch.labels[i] << ": no feasible rows\n";
    }
    all_pass = all_pass && pass;
    ctx.verdicts.push_back(v);
  }
  if (starved) return kExitBudget;
  return all_pass ? kExitPass : kExitDomain;
}

/// Label arrays must agree with the stored error masses.
bool model_consistent(const LevelKModel& model, std::ostream& err) {
  bool ok = true;
  for (int j = 1; j <= model.K(); ++j) {
    Index errors = 0;
    for (std::int32_t lab : model.labels(j))
      if (lab == kErrorLabel) ++errors;
    if (make_rational(errors, model.cell_count()) != model.error_mass(j)) {
      err << "level " << j << ": label array has " << errors << " error cells, error mass says "
          << to_string(model.error_mass(j)) << '\n';
      ok = false;
    }
  }
  return ok;
}

int cmd_bounds(Context& ctx) {
  LevelKModel model = make_model(ctx.cfg);
  if (ctx.cfg.corrupt_level) model = model.corrupted_copy(*ctx.cfg.corrupt_level);
  const bool consistent = model_consistent(model, ctx.err);
  ctx.verdicts.push_back(verdict("model_consistency", consistent));
  const ScanBatch batch = run_scans(ctx, model);
  bool all_pass = consistent;
  bool starved = false;
  for (std::size_t i = 0; i < batch.results.size(); ++i) {
    int rows = 0, good = 0, bad = 0, y = 0, order = 0;
    for (const ScanRow& row : batch.results[i].rows) {
      if (row.skipped) continue;
      ++rows;
      good += !row.bracket.good_lemma_holds();
      bad += !row.bracket.bad_lemma_holds();
      y += !row.y_check.holds;
      order += row.bracket.lower > row.bracket.upper + kEntropySlack;
    }
    const bool pass = rows > 0 && good == 0 && bad == 0 && y == 0 && order == 0;
    Json v = verdict("bounds[" + batch.labels[i] + "]", pass);
    v["rows"] = rows;
    v["good_violations"] = good;
    v["bad_violations"] = bad;
    v["y_mass_violations"] = y;
    v["order_violations"] = order;
    ctx.verdicts.push_back(v);
    if (rows == 0) {
      starved = true;
      ctx.err << "direction " << batch.labels[i] << ": no feasible rows\n";
    }
    all_pass = all_pass && pass;
  }
  if (starved) return kExitBudget;
  return all_pass ? kExitPass : kExitDomain;
}

int cmd_refine(Context& ctx) {
  const RefineConfig& rc = ctx.cfg.refine;
  const std::vector<LabeledTower> towers =
      perturbed_odometer_towers(rc.K, rc.towers, rc.perturbed_levels, rc.swaps, ctx.cfg.seed);
  const std::vector<Rational> deltas =
      rc.deltas.empty() ? default_deltas(std::max(rc.towers, rc.depth) + 1) : rc.deltas;
  try {
    const RefinementTrace trace = refine_sequence(towers, deltas, rc.depth);
    auto csv = open_out(ctx.out / "trace.csv");
    write_trace_csv(csv, trace, ctx.cfg.hash);
    Json v = verdict("cauchy_bound", trace.violations() == 0);
    v["checks"] = trace.checks.size();
    v["violations"] = trace.violations();
    v["sharp_violations"] = trace.sharp_violations();
    v["tail_bound_at_depth"] = to_string(trace.tail_bound(rc.depth));
    ctx.verdicts.push_back(v);
    return trace.violations() == 0 ? kExitPass : kExitDomain;
  } catch (const RefinementError& e) {
    ctx.err << e.what() << '\n';
    Json v = verdict("refinement", false);
    v["k"] = e.k();
    v["ell"] = e.ell();
    v["detail"] = e.what();
    ctx.verdicts.push_back(v);
    return kExitDomain;
  }
}

}  // namespace

void ExperimentConfig::rehash() { hash = hash_hex(fnv1a64(canonical + "|seed=" + std::to_string(seed))); }

ExperimentConfig parse_config(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.canonical = doc.dump();
  if (doc.contains("schedule")) cfg.schedule_spec = doc.at("schedule");
  cfg.schedule_id = get_or<std::string>(doc, "schedule_id",
                                        cfg.schedule_spec.is_object() && cfg.schedule_spec.contains("builder")
                                            ? cfg.schedule_spec.at("builder").get<std::string>()
                                            : std::string("schedule"));
  if (doc.contains("K")) cfg.K = get_or<int>(doc, "K", 0);
  cfg.k = get_or<int>(doc, "k", 1);
  if (doc.contains("directions")) {
    for (const Json& d : doc.at("directions")) cfg.directions.push_back(parse_direction(d));
  }
  if (doc.contains("m_list")) {
    cfg.m_list.clear();
    for (const Json& m : doc.at("m_list")) cfg.m_list.push_back(rational_from_json(m));
    if (cfg.m_list.empty()) throw ConfigError("m_list must be nonempty");
    for (const Rational& m : cfg.m_list)
      if (m <= 0) throw ConfigError("m values must be positive");
  }
  if (doc.contains("j_range")) {
    const auto r = get_or<std::vector<int>>(doc, "j_range", {});
    if (r.size() != 2 || r[0] > r[1]) throw ConfigError("j_range must be [first, last] with first <= last");
    cfg.j_range = std::pair<int, int>{r[0], r[1]};
  }
  try {
    cfg.variant = parse_time_variant(get_or<std::string>(doc, "variant", "theorem_main"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string base = get_or<std::string>(doc, "log_base", "e");
  if (base == "e" || base == "natural") cfg.log_base = LogBase::natural;
  else if (base == "2" || base == "two") cfg.log_base = LogBase::two;
  else throw ConfigError("log_base must be \"e\" or \"2\"");
  const std::string mode = get_or<std::string>(doc, "mode", "strict");
  if (mode == "strict") cfg.mode = BadTermMode::strict;
  else if (mode == "paper") cfg.mode = BadTermMode::paper;
  else throw ConfigError("mode must be \"strict\" or \"paper\"");
  cfg.decay_factor = get_or<double>(doc, "decay_factor", 0.25);
  cfg.eccentricity_threshold = get_or<double>(doc, "eccentricity_threshold", 1.0);
  cfg.cell_budget = get_or<Index>(doc, "cell_budget", kDefaultCellBudget);
  cfg.work_budget = get_or<Index>(doc, "work_budget", kDefaultNameWorkBudget);
  if (cfg.cell_budget <= 0 || cfg.work_budget <= 0) throw ConfigError("budgets must be positive");
  const std::string expect = get_or<std::string>(doc, "expect", "decay");
  if (expect != "decay" && expect != "no_decay") throw ConfigError("expect must be \"decay\" or \"no_decay\"");
  cfg.expect_decay = expect == "decay";
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
  cfg.out_dir = get_or<std::string>(doc, "out", cfg.out_dir);
  if (doc.contains("refine")) {
    const Json& r = doc.at("refine");
    cfg.refine.K = get_or<int>(r, "K", cfg.refine.K);
    cfg.refine.towers = get_or<int>(r, "towers", cfg.refine.towers);
    cfg.refine.perturbed_levels = get_or<int>(r, "perturbed_levels", cfg.refine.perturbed_levels);
    cfg.refine.swaps = get_or<int>(r, "swaps", cfg.refine.swaps);
    cfg.refine.depth = get_or<int>(r, "depth", cfg.refine.depth);
    if (r.contains("deltas"))
      for (const Json& d : r.at("deltas")) cfg.refine.deltas.push_back(rational_from_json(d));
  }
  if (doc.contains("test_hook")) {
    const Json& h = doc.at("test_hook");
    if (h.contains("corrupt_model")) cfg.corrupt_level = get_or<int>(h, "corrupt_model", 1);
  }
  if (cfg.directions.empty()) cfg.directions.push_back(std::nullopt);
  cfg.rehash();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_json_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

ConstructionSchedule build_schedule(const ExperimentConfig& cfg) {
  const Json& s = cfg.schedule_spec;
  if (s.is_null()) throw ConfigError("config needs a schedule");
  if (!s.is_object()) throw ConfigError("schedule must be an object");
  try {
    if (s.contains("file")) {
      fs::path p = s.at("file").get<std::string>();
      if (p.is_relative()) p = cfg.base_dir / p;
      return schedule_from_json(read_json_file(p));
    }
    if (!s.contains("builder")) return schedule_from_json(s);
    const std::string builder = s.at("builder").get<std::string>();
    if (builder == "odometer") {
      return odometer_schedule(get_or<int>(s, "dim", 2), get_or<Index>(s, "base", 2), get_or<int>(s, "levels", 10));
    }
    if (builder == "spacered") {
      SpaceredSpec spec;
      spec.initial_side = get_or<Index>(s, "initial_side", spec.initial_side);
      spec.copies_per_axis = get_or<Index>(s, "copies_per_axis", spec.copies_per_axis);
      spec.spacers = get_or<std::vector<Index>>(s, "spacers", {});
      return spacered_schedule(get_or<int>(s, "dim", 2), spec);
    }
    if (builder == "eccentric_exponential") {
      return exponential_eccentric_schedule(get_or<double>(s, "beta", 1.5), get_or<int>(s, "levels", 4),
                                            cfg.cell_budget);
    }
    throw ConfigError("unknown schedule builder '" + builder + "'");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad schedule: ") + e.what());
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad schedule: ") + e.what());
  }
}

RunResult run_command(const CliOptions& options, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  Context* live = nullptr;
  std::optional<Context> ctx;
  std::string hash;
  try {
    if (options.command != "validate" && options.command != "scan" && options.command != "bounds" &&
        options.command != "refine") {
      throw ConfigError("unknown command '" + options.command + "'");
    }
    ExperimentConfig cfg = load_config(options.config);
    if (options.seed) {
      cfg.seed = *options.seed;
      cfg.rehash();
    }
    hash = cfg.hash;
    std::string out = cfg.out_dir;
    if (const char* env = std::getenv("RANKONE_OUT_DIR"); env && *env) out = env;
    if (options.out) out = *options.out;
    ensure_dir(out);
    ctx.emplace(Context{std::move(cfg), fs::path(out), std::max(1u, options.threads), err, Json::array()});
    live = &*ctx;
    if (options.command == "validate") result.exit_code = cmd_validate(*live);
    else if (options.command == "scan") result.exit_code = cmd_scan(*live);
    else if (options.command == "bounds") result.exit_code = cmd_bounds(*live);
    else result.exit_code = cmd_refine(*live);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    result.exit_code = kExitConfig;
  } catch (const Json::exception& e) {
    err << "config error: " << e.what() << '\n';
    result.exit_code = kExitConfig;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    result.exit_code = kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = kExitDomain;
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  result.summary = Json{{"command", options.command},
                        {"config_hash", hash},
                        {"verdicts", live ? live->verdicts : Json::array()},
                        {"exit_code", result.exit_code},
                        {"elapsed_ms", elapsed}};
  if (live) {
    std::ofstream out(live->out / "summary.json");
    if (out) out << result.summary.dump(2) << '\n';
  }
  return result;
}

}  // namespace rankone
