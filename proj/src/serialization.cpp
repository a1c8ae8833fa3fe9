#include <iomanip>
#include <ostream>
#include <sstream>

#include "rankone/serialization.hpp"

namespace rankone {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void header_comment(std::ostream& os, const std::string& config_hash) { os << "# config_hash=" << config_hash << '\n'; }

}  // namespace

Json point_to_json(const LatticePoint& p) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(p(i));
  return out;
}

LatticePoint point_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("point must be a nonempty integer array");
  LatticePoint p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) throw ConfigError("point coordinates must be integers");
    p(static_cast<Eigen::Index>(i)) = j[i].get<Index>();
  }
  return p;
}

Json shape_to_json(const Shape& s) {
  Json out = Json::array();
  for (Index i = 0; i < s.size(); ++i) out.push_back(point_to_json(s.point(i)));
  return out;
}

Shape shape_from_json(const Json& j, int dim) {
  if (!j.is_array()) throw ConfigError("shape must be an array of points");
  std::vector<LatticePoint> pts;
  for (const Json& p : j) {
    pts.push_back(point_from_json(p));
    if (pts.back().size() != dim) throw ConfigError("shape point has the wrong dimension");
  }
  return Shape(dim, pts);
}

Json rect_to_json(const Rectangle& r) { return Json{{"lo", point_to_json(r.lo())}, {"hi", point_to_json(r.hi())}}; }

Rectangle rect_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) throw ConfigError("rectangle needs lo and hi");
  try {
    return Rectangle(point_from_json(j.at("lo")), point_from_json(j.at("hi")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad rectangle: ") + e.what());
  }
}

Json schedule_to_json(const ConstructionSchedule& s) {
  Json stages = Json::array();
  for (const Stage& st : s.stages()) stages.push_back({{"rect", rect_to_json(st.rect)}, {"stacking", shape_to_json(st.stacking)}});
  return Json{{"dim", s.dim()}, {"stages", stages}, {"final_rect", rect_to_json(s.final_rect())}};
}

ConstructionSchedule schedule_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("stages") || !j.contains("final_rect")) {
    throw ConfigError("schedule needs dim, stages and final_rect");
  }
  const int dim = j.at("dim").get<int>();
  std::vector<Stage> stages;
  for (const Json& st : j.at("stages")) {
    if (!st.contains("rect") || !st.contains("stacking")) throw ConfigError("stage needs rect and stacking");
    stages.push_back({rect_from_json(st.at("rect")), shape_from_json(st.at("stacking"), dim)});
  }
  try {
    return ConstructionSchedule(dim, std::move(stages), rect_from_json(j.at("final_rect")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad schedule: ") + e.what());
  }
}

Rational rational_from_json(const Json& j) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return parse_rational(j.dump());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("expected a rational number, got " + j.dump());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_eccentricity_csv(std::ostream& os, const EccentricityReport& report, const std::string& config_hash) {
  header_comment(os, config_hash);
  os << "stage,s,ell,ratio\n";
  for (const auto& row : report.rows) os << row.stage << ',' << row.s << ',' << row.ell << ',' << num(row.ratio) << '\n';
}

void write_model_csv(std::ostream& os, const LevelKModel& model, const std::string& config_hash) {
  header_comment(os, config_hash);
  os << "j,cells,coverage,error_mass,error_mass_value\n";
  for (int j = 1; j <= model.K(); ++j) {
    os << j << ',' << model.rect(j).cardinality() << ',';
    if (j < model.schedule().levels()) os << to_string(model.schedule().coverage(j));
    os << ',' << to_string(model.error_mass(j)) << ',' << num(to_double(model.error_mass(j))) << '\n';
  }
}

void write_scan_header(std::ostream& os, const std::string& config_hash) {
  header_comment(os, config_hash);
  os << "schedule_id,K,k,j,n,m,t,variant,E_mass,Y_mass,lower,upper,norm_lower,norm_upper,good_rhs,bad_rhs,verdict\n";
}

void write_scan_rows(std::ostream& os, const ScanResult& scan) {
  for (const ScanRow& r : scan.rows) {
    os << r.schedule_id << ',' << r.K << ',' << r.k << ',' << r.j << ',' << r.n << ',' << to_string(r.m) << ',';
    if (r.skipped) {
      os << ',' << to_string(r.variant) << ",,,,,,,,," << r.verdict << '\n';
      continue;
    }
    const EntropyBracket& b = r.bracket;
    os << num(r.t) << ',' << to_string(r.variant) << ',' << to_string(r.error_mass) << ',' << to_string(b.bad_mass)
       << ',' << num(b.lower) << ',' << num(b.upper) << ',' << num(b.normalized_lower) << ','
       << num(b.normalized_upper) << ',' << num(b.good_bound_rhs) << ',' << num(b.bad_bound_rhs) << ',' << r.verdict
       << '\n';
  }
}

void write_trace_csv(std::ostream& os, const RefinementTrace& trace, const std::string& config_hash) {
  header_comment(os, config_hash);
  os << "k,ell,distance_to_next,cauchy_bound\n";
  for (int k = 1; k <= trace.towers(); ++k) {
    for (int ell = 0; ell < trace.depth(k); ++ell) {
      os << k << ',' << ell << ',' << to_string(trace.distance_to_next(k, ell)) << ','
         << to_string(trace.deltas[static_cast<std::size_t>(ell)]) << '\n';
    }
  }
}

}  // namespace rankone
