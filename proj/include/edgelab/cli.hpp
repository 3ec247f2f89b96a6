#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace edgelab::cli {

enum ExitCode : int { kOk = 0, kDiagnosticFailure = 1, kUsage = 2, kNumerical = 3 };

/// Inclusive lo:hi:step grid.
struct SRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  std::vector<double> points() const;
};

SRange parse_s_range(const std::string& text);

struct RunConfig {
  std::string command;
  std::string potential;
  std::vector<int> n_list;
  std::optional<SRange> s_range;
  std::string output_dir = ".";
  int quad_order = 40;
  double tol = 1e-10;
  std::string kind = "auto";

  /// Canonical key=value rendering; the config hash is taken over it.
  std::string canonical() const;
};

/// Flat key=value file; '#' starts a comment, blank lines are ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies key=value entries (potential, n, n_list, s_range, quad_order, tol,
/// kind, out) to a config.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& entries);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);
std::string config_hash(const RunConfig& config);

/// Runs the front end on argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgelab::cli
