#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace paraboloid::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

// Bad flags, bad config values, or experiment preconditions that fail before
// any work starts.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything one run needs. Empty lists and zero counts select the
/// experiment's defaults (see `resolved`).
struct RunConfig {
  std::string experiment;
  int n = 2;
  std::vector<std::int64_t> Ns;
  std::vector<double> ps;
  std::optional<double> q;
  std::vector<std::int64_t> Qs;
  std::vector<int> ls;
  std::string piece = "dyadic";
  std::string cutoff;
  int spline_order = 8;
  double eps = 0.2;
  int resolution = 8;
  std::int64_t samples = 0;
  std::int64_t iters = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> sources;
  std::vector<double> Ds;
  double B = 2.0;
  double tau = 0.5;
  std::int64_t qmax = 128;
  std::int64_t kmax = 2048;
  std::vector<std::int64_t> ks;
  int shifts = 3;
  std::size_t workers = 0;
  std::string out_dir = "results";
  bool write_csv = true;
  bool write_json = true;

  std::string plot_csv;
  std::string plot_kind = "loglog";
  std::string plot_svg;
  std::string plot_x;
  std::string plot_y;
};

const std::vector<std::string>& experiment_names();

// Fills experiment defaults and checks every precondition. Throws UsageError.
RunConfig resolved(const RunConfig& config);

// Parses flags and an optional --config file (flat `key = value` lines named
// like the long flags; flags given on the command line win). Returns nullopt
// after printing help. Throws UsageError.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

// Runs a resolved or raw config: writes <out_dir>/<experiment>.csv and .json
// (plot writes only the SVG) and prints a summary. Returns kExitPass or
// kExitInvariant; throws UsageError and the library's errors.
int run(const RunConfig& config, std::ostream& out);

// parse_args + run with every error mapped to an exit status:
// 0 pass, 1 invariant failure, 2 usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Accepts decimals and fractions a/b.
double parse_exponent(const std::string& text);

}  // namespace paraboloid::cli
