#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "minsurf/analysis.hpp"

namespace minsurf {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "minsurf-lab/report/v1";

enum class CheckKind {
  at_most,       // every value <= threshold
  at_least,      // every value >= threshold
  order,         // fitted order >= threshold, or every value at the round-off floor
  non_decaying,  // finest two values do not decay
  below,         // every value < threshold
};

std::string to_string(CheckKind kind);

struct Check {
  std::string name;
  std::string anchor;  // the identity or property being tested
  std::string metric;
  CheckKind kind = CheckKind::at_most;
  double threshold = 0.0;
  std::vector<double> values;
  std::optional<double> order;
  bool pass = false;
  std::string note;
};

// Evaluates a check against per-resolution metrics; missing metrics fail the check.
Check evaluate_check(std::string name, std::string anchor, const std::string& metric, CheckKind kind,
                     double threshold, const std::vector<ResolutionAnalysis>& runs);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

Json check_to_json(const Check& check);
Json resolution_to_json(const ResolutionAnalysis& run);

// Report body without the run block, as written to disk.
std::string report_body(const Json& report);

// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// Rows u, v, then the named fields; NaN marks nodes where a field is undefined.
std::string fields_csv(const FieldTable& table);

}  // namespace minsurf
