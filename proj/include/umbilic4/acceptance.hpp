#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "umbilic4/report.hpp"

namespace umbilic4 {

struct CriterionInfo {
  int id;
  std::string name;
  std::string module;  // groups, cubics, torus, geom, eds
};

const std::vector<CriterionInfo>& acceptance_criteria();

/// Pinned defaults. Names ending in a bound ("_min", "_max", "_runtime_s") and rank thresholds are
/// fixed; the rest are residual upper bounds and scale with tol_scale.
const std::map<std::string, double>& default_tolerances();
bool tolerance_scales(const std::string& name);

struct AcceptanceConfig {
  std::uint64_t seed = 1;
  double tol_scale = 1;
  std::map<std::string, double> tol_overrides;  // applied after scaling; unknown names rejected
  std::vector<std::string> filter;              // module names or criterion ids; empty = all
  std::string data_dir;                         // tableau directory; empty = built-in default
};

/// Scaled defaults with overrides; throws std::invalid_argument on unknown names or non-positive values.
std::map<std::string, double> resolve_tolerances(const AcceptanceConfig& config);
/// Throws std::invalid_argument on a filter token that names no module or criterion.
std::vector<CriterionInfo> select_criteria(const std::vector<std::string>& filter);

struct CriterionResult {
  CriterionInfo info;
  bool pass = false;
  std::vector<std::string> failures;  // one line per failed check
  nlohmann::json metrics = nlohmann::json::object();
};

CriterionResult run_criterion(int id, const std::map<std::string, double>& tol, const AcceptanceConfig& config);

/// Runs the selected criteria; results.criteria holds one entry per criterion in id order.
Report suite_acceptance(const AcceptanceConfig& config, const std::vector<std::string>& command = {});

std::string default_data_dir();

}  // namespace umbilic4
