#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace paraboloid {

using ParamValue = std::variant<std::int64_t, double, std::string, bool>;

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Named scalar results of one experiment.
///
/// `constant` is the headline empirical constant (a sup, ratio or slope);
/// `values` carries the remaining named scalars in insertion order. `checks`
/// are hard invariants: identities and oracle agreements. Property-style
/// observations (uniform boundedness of an implicit constant) are reported as
/// values and never as checks.
struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, ParamValue>> params;
  std::int64_t samples = 0;
  double constant = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, double>> values;
  std::vector<Check> checks;

  ExperimentReport& param(std::string key, ParamValue v) {
    params.emplace_back(std::move(key), std::move(v));
    return *this;
  }
  ExperimentReport& value(std::string key, double v) {
    values.emplace_back(std::move(key), v);
    return *this;
  }
  ExperimentReport& check(std::string key, bool passed, std::string detail = {}) {
    checks.push_back({std::move(key), passed, std::move(detail)});
    return *this;
  }

  // Throws std::out_of_range when the key is absent.
  double value_of(const std::string& key) const;
  bool all_checks_passed() const;

  // JSON with the versioned schema
  // {schema_version, name, params, samples, constant, seed, values, checks,
  //  provenance: {library, version}}.
  std::string to_json(int indent = 2) const;
};

// Library version string baked in at build time.
const char* library_version();

}  // namespace paraboloid
