#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "exclab/chords.hpp"
#include "exclab/mc.hpp"

namespace exclab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const ProcessSpec& spec);
Json to_json(const ExcursionOptions& opt);
Json to_json(const EventSpec& spec);
Json to_json(const McEstimate& est);
Json to_json(const ChordDiagram& d);

/// Parsers validate every field and report errors as ErrorCode::config with
/// the offending key path, e.g. "experiment.tubes.eps".
ProcessSpec process_from_json(const Json& j, const std::string& path);
ExcursionOptions sampler_from_json(const Json& j, const std::string& path);
EventSpec event_from_json(const Json& j, const std::string& path);
ChordDiagram diagram_from_json(const Json& j, const std::string& path);

/// Field access for command-specific sections, with the same error style.
const Json& require_field(const Json& j, const std::string& path, const char* key);
/// Number in the open interval (lo, hi).
double number_field(const Json& j, const std::string& path, const char* key, double lo, double hi);
std::uint64_t count_field(const Json& j, const std::string& path, const char* key, std::uint64_t min);
/// Strictly decreasing list of tube widths in (0, 2).
std::vector<double> eps_grid_from_json(const Json& j, const std::string& path);

struct McParams {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};
McParams mc_from_json(const Json& j, const std::string& path);

/// FNV-1a hash of the compact dump, as 16 hex digits.
std::string digest_of(const Json& j);

}  // namespace exclab
