#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "finsler/errors.hpp"

namespace finsler {

inline constexpr std::string_view kVersion = "finsler-lab 0.1.0";

enum class Subcommand { report, check, classify, metrize };
std::string_view to_string(Subcommand c);
Subcommand subcommand_from_string(std::string_view name);

// Invalid run configuration (bad range, missing expression, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Evenly spaced values "start:stop:count"; count = 1 yields start alone.
struct Range {
  double start = 0;
  double stop = 0;
  int count = 1;

  static Range parse(std::string_view text);
  std::vector<double> values() const;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::report;
  std::string phi;
  std::optional<std::string> p_expr;
  std::optional<std::string> q_expr;
  int dim = 2;
  Range r{0.5, 2.0, 4};
  Range s_fraction{-0.8, 0.8, 5};
  Range u{1.0, 1.0, 1};
  std::optional<std::uint64_t> seed;  // enables a random rotation per point
  double tol_abs = 1e-9;
  double tol_rel = 1e-7;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string output;    // JSON path; empty = none, "-" = stdout
};

// Throws ConfigError.
void validate(const RunConfig& config);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int parse_failed = 2;
inline constexpr int all_points_failed = 3;
}  // namespace exit_code

struct CheckSummary {
  std::string name;
  double max_residual = 0;  // largest raw residual over the grid
  double max_ratio = 0;     // largest residual / (tol_abs + tol_rel * magnitude); pass iff <= 1
  bool pass = true;
};

struct ReportDocument {
  nlohmann::json json;  // keys: config, points, checks, verdicts, version
  std::vector<CheckSummary> checks;
  int exit_code = exit_code::ok;
  std::string summary;  // human-readable rendering

  // Sorted keys, shortest round-trip floats, two-space indent, trailing newline.
  std::string serialize() const;
};

// Builds the grid, evaluates every point (in parallel, deterministic order)
// and dispatches on the subcommand. Never throws for expression or point
// failures: they are reported through exit_code and the document.
ReportDocument run(const RunConfig& config);

}  // namespace finsler
