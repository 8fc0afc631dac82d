#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace umbilic4 {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1.0";

/// JSON text with doubles at 17 significant digits and object keys in sorted order.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// FNV-1a (64-bit) of the report serialized without its timing_ms field, as 16 hex digits.
std::string deterministic_hash(const nlohmann::json& report);

struct Report {
  std::vector<std::string> command;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;
  nlohmann::json results = nlohmann::json::object();
  int passed = 0, failed = 0;
  double timing_ms = 0;

  bool ok() const { return failed == 0; }
  /// schema_version, tool, version, command, seed, tolerances, results, summary, hash, timing_ms.
  nlohmann::json to_json() const;
};

/// UMBILIC4_SEED if set, else the fallback.
std::uint64_t seed_from_env(std::uint64_t fallback);
/// UMBILIC4_TOL_SCALE if set, else 1.
double tol_scale_from_env();

}  // namespace umbilic4
