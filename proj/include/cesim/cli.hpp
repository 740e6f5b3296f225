// Copyright 2026 The cesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cesim/circuits.hpp"
#include "cesim/common.hpp"

namespace cesim {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr long kMaxGridPoints = 1000000;

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitConfigError = 64 };

struct GridSpec {
  double x_min = -4.0;
  double x_max = 4.0;
  int x_steps = 41;
  double p_min = -4.0;
  double p_max = 4.0;
  int p_steps = 41;
};

/// Everything a command needs. Defaults: weights (1,1,1), labels beta = 1,
/// gamma = i (N = 3) or beta_i = 0.5 (other N), x = 0.7, reg_r = 2, seed 42,
/// 10^6 Monte Carlo samples, cutoff 30 for N = 3 (60, 10, 8, 6 for N = 2, 4,
/// 5, >= 6).
struct RunConfig {
  std::vector<double> weights{1.0, 1.0, 1.0};
  /// Empty means the defaults above. For N = 3 one value (gamma separate) or
  /// two; otherwise N-1 values.
  std::vector<cplx> beta;
  std::optional<cplx> gamma;
  double x = 0.7;
  double reg_r = 2.0;
  std::optional<int> cutoff;
  std::uint64_t seed = 42;
  std::int64_t samples = 1000000;
  std::string suite = "all";
  /// Output path; empty writes to standard output.
  std::string out;
  /// wigner: "ces" or "vacuum"; engine "gaussian" or "fock".
  std::string state = "ces";
  std::string engine = "gaussian";
  Provenance displacement = Provenance::ConstraintSolve;
  /// Squeeze parameter l of the squeezing-operator suite.
  double squeeze_l = 2.718281828459045;
  GridSpec grid;
  /// Per-check tolerance overrides, keyed by check name.
  std::map<std::string, double> tolerances;

  int num_modes() const { return static_cast<int>(weights.size()); }
  /// The N-1 ladder labels with defaults applied.
  std::vector<cplx> labels() const;
  int default_cutoff() const;
  int effective_cutoff() const { return cutoff.value_or(default_cutoff()); }
  double tolerance(const std::string& check, double fallback) const;

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

/// Parses "a+bi", "a-bi", "bi", "a", "i", "-i" (whitespace ignored, 'j'
/// accepted for 'i').
cplx parse_complex(const std::string& text);
std::string format_complex(cplx z);
std::vector<double> parse_double_list(const std::string& text);
std::vector<cplx> parse_complex_list(const std::string& text);

/// Config files are JSON objects whose keys are the long flag names with
/// dashes replaced by underscores, plus "grid" and "tolerances".
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

enum class CheckStatus { Pass, Fail, Inconclusive, Finding };

std::string to_string(CheckStatus s);

/// One line of a verification report. Findings record a measured value that
/// does not gate the exit code (for instance a printed formula that fails).
struct Check {
  std::string name;
  double value = 0.0;
  nlohmann::json expected;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Pass;
  std::string provenance;
  std::string note;

  bool pass() const { return status == CheckStatus::Pass; }
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::string> skipped;

  int exit_code() const;
  const Check* find(const std::string& name) const;
  nlohmann::json to_json(const RunConfig& config, const std::string& timestamp) const;
};

const std::vector<std::string>& suite_names();

/// Runs the selected suite (or all applicable ones).
Report run_verify(const RunConfig& config);

/// Wigner grid rows "x,p,w_literal,w_normalized", x outer, p inner.
void write_wigner_csv(const RunConfig& config, std::ostream& os);

/// The solved circuit plus its eigen-residuals.
nlohmann::json circuit_summary(const RunConfig& config);

std::string utc_timestamp();

/// Entry point shared by the executable and the tests. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cesim
