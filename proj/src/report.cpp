#include "umbilic4/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace umbilic4 {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep it recognizably floating point
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write(std::ostringstream& out, const nlohmann::json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string((depth + 1) * indent, ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(depth * indent, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{" << nl;
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out << pad << nlohmann::json(it.key()).dump() << colon;
        write(out, it.value(), indent, depth + 1);
        out << (i + 1 < j.size() ? "," : "") << nl;
      }
      out << close_pad << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[" << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        out << pad;
        write(out, j[i], indent, depth + 1);
        out << (i + 1 < j.size() ? "," : "") << nl;
      }
      out << close_pad << "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::ostringstream out;
  write(out, j, indent, 0);
  return out.str();
}

std::string deterministic_hash(const nlohmann::json& report) {
  nlohmann::json copy = report;
  if (copy.is_object()) {
    copy.erase("timing_ms");
    copy.erase("hash");
  }
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump_json(copy, 0)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json Report::to_json() const {
  nlohmann::json tol = nlohmann::json::object();
  for (const auto& [k, v] : tolerances) tol[k] = v;
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"tool", "umbilic4"},
                      {"version", kToolVersion},
                      {"command", command},
                      {"seed", seed},
                      {"tolerances", tol},
                      {"results", results},
                      {"summary", {{"passed", passed}, {"failed", failed}, {"pass", ok()}}}};
  j["hash"] = deterministic_hash(j);
  j["timing_ms"] = timing_ms;
  return j;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* v = std::getenv("UMBILIC4_SEED");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end) throw std::invalid_argument("UMBILIC4_SEED must be a non-negative integer");
  return s;
}

double tol_scale_from_env() {
  const char* v = std::getenv("UMBILIC4_TOL_SCALE");
  if (!v || !*v) return 1.0;
  char* end = nullptr;
  const double s = std::strtod(v, &end);
  if (*end || !(s > 0)) throw std::invalid_argument("UMBILIC4_TOL_SCALE must be a positive number");
  return s;
}

}  // namespace umbilic4
