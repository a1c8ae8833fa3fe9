#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rankone/entropy_analysis.hpp"
#include "rankone/lattice_geometry.hpp"
#include "rankone/rank_one_construction.hpp"
#include "rankone/tower_algebra.hpp"

namespace rankone {

using Json = nlohmann::json;

/// Thrown for malformed JSON documents and configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json point_to_json(const LatticePoint& p);
LatticePoint point_from_json(const Json& j);

/// Shapes are arrays of integer arrays.
Json shape_to_json(const Shape& s);
Shape shape_from_json(const Json& j, int dim);

/// Rectangles are {"lo": [...], "hi": [...]}.
Json rect_to_json(const Rectangle& r);
Rectangle rect_from_json(const Json& j);

/// {"dim", "stages": [{"rect", "stacking"}], "final_rect"}.
Json schedule_to_json(const ConstructionSchedule& s);
ConstructionSchedule schedule_from_json(const Json& j);

/// Rationals accept "p/q", decimal strings and JSON numbers (read exactly
/// from their decimal text).
Rational rational_from_json(const Json& j);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

void write_eccentricity_csv(std::ostream& os, const EccentricityReport& report, const std::string& config_hash);
void write_model_csv(std::ostream& os, const LevelKModel& model, const std::string& config_hash);
void write_scan_header(std::ostream& os, const std::string& config_hash);
void write_scan_rows(std::ostream& os, const ScanResult& scan);
void write_trace_csv(std::ostream& os, const RefinementTrace& trace, const std::string& config_hash);

}  // namespace rankone
