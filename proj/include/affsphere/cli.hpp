#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include "affsphere/verify.hpp"

namespace affsphere::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kClassification = 3, kDomain = 4, kNumeric = 5 };

/// Bad flags, config keys or values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  double alpha_rel_tol = 1e-13;  // alpha(c) quadrature
  double cell_tol = 1e-13;       // cumulative quadrature tables of the elliptic branch
  double rk_rtol = 1e-10;
  double rk_atol = 1e-12;
  VerifyTolerances verify;
  int grid_param = 64;
  int grid_mu = 64;
  int samples = 1000;
  std::uint64_t seed = 1;
  int precision = 17;
  int table_nodes = 2048;
};

/// Sets one key; throws UsageError on unknown keys or invalid values.
void set_config_key(CliConfig& cfg, const std::string& key, const std::string& value);
/// Applies "key=value" lines; '#' starts a comment.
void apply_config_text(CliConfig& cfg, const std::string& text);
/// "key=value" as given to --set.
void apply_assignment(CliConfig& cfg, const std::string& assignment);
/// Throws UsageError unless tolerances are positive and precision is in [6, 17].
void validate(const CliConfig& cfg);
/// Every key with its current value, one "key=value" per line.
std::string dump_config(const CliConfig& cfg);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace affsphere::cli
