#include "paraboloid/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace paraboloid {
namespace {

nlohmann::ordered_json number_or_null(double x) {
  // JSON has no inf/nan; encode them as strings so the report stays parseable.
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

const char* library_version() { return PARABOLOID_VERSION; }

double ExperimentReport::value_of(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw std::out_of_range("report '" + name + "' has no value '" + key + "'");
}

bool ExperimentReport::all_checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string ExperimentReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["name"] = name;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [key, v] : params) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) {
            p[key] = number_or_null(x);
          } else {
            p[key] = x;
          }
        },
        v);
  }
  j["params"] = std::move(p);
  j["samples"] = samples;
  j["constant"] = number_or_null(constant);
  if (seed) {
    j["seed"] = *seed;
  } else {
    j["seed"] = nullptr;
  }
  nlohmann::ordered_json vals = nlohmann::ordered_json::object();
  for (const auto& [key, v] : values) vals[key] = number_or_null(v);
  j["values"] = std::move(vals);
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = std::move(cs);
  j["provenance"] = {{"library", "paraboloid"}, {"version", library_version()}};
  return j.dump(indent);
}

}  // namespace paraboloid
