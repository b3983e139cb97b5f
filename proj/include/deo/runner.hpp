#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deo/optim.hpp"
#include "deo/problem.hpp"
#include "deo/record.hpp"
#include "deo/vec.hpp"

namespace deo {

/// Everything one benchmark run needs. Fully serializable; the echo of
/// this struct inside the JSON summary makes every output self-describing.
struct RunConfig {
  std::string landscape = "quadratic";  // quadratic | monkey | rosenbrock | mlp
  std::string optimizer = "adam";  // sgd | adam | adamw | deo-sgd | deo-adam | deo-adamw
  long steps = 1000;
  double lr_max = 6e-4;
  double lr_min = 0.0;
  std::uint64_t seed_data = 42;
  std::uint64_t seed_init = 42;
  std::uint64_t seed_dimer = 42;

  long f = 10;  // kNeverRefresh = cached direction kept forever
  double alpha = 5.0;
  double delta_r = 6e-3;
  double eta_rot = 1e-3;
  std::string sign = "as-written";  // as-written | force
  bool refresh_at_start = false;

  int batch_size = 32;  // mlp only
  bool oracle = false;
  std::string out;  // output stem; empty = $DEO_OUT_DIR/<landscape>-<optimizer>

  // landscape parameters
  Vec lambdas = {1.0, 2.0, -1.0};  // quadratic
  int dim = 2;                     // rosenbrock
  int hidden = 16;                 // mlp
  int data_n = 200;                // mlp, generated dataset size
  double data_noise = 0.1;         // mlp, moons noise sigma
  std::string mlp_data;            // mlp, CSV path; empty = generate

  // base-optimizer constants
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  double weight_decay = 0.1;  // adamw
  double momentum = 0.0;      // sgd
};

bool is_deo_optimizer(const std::string& name);
BaseOpt base_of(const std::string& optimizer);
SignConvention sign_of(const std::string& name);

/// Throws ConfigError with a one-line message naming the offending field.
void validate(const RunConfig& cfg);

/// Builds the configured landscape. Construction problems surface as
/// ConfigError.
ProblemPtr make_problem(const RunConfig& cfg);

/// Starting parameters: MLP init for "mlp", a seeded random unit vector
/// for the analytic landscapes.
Vec initial_theta(const RunConfig& cfg, const Problem& problem);

struct RunResult {
  std::string status = "ok";  // ok | numeric_failure
  long failing_step = -1;     // only meaningful when status != ok
  std::vector<RunRecord> records;
  double initial_loss = 0.0;  // full-data loss at theta0
  double final_loss = 0.0;    // full-data loss at the last finite theta
  double min_loss = 0.0;      // min over per-step telemetry losses
  long grad_evals = 0;
  double wall_seconds = 0.0;
  Vec final_theta;
  Vec eigenvalues;  // spectrum at final theta, filled when oracle is on
  std::string csv;  // header + one row per completed step
  nlohmann::json summary;
};

/// The pinned column line, with trailing newline.
std::string csv_header();
/// Data rows only (no header), one per record, with trailing newlines.
std::string csv_rows(const std::vector<RunRecord>& records,
                     const std::string& optimizer_name);

/// Executes one seeded run. Numeric failures do not throw: the records
/// produced so far are kept and the status/failing_step fields are set.
/// Configuration problems throw ConfigError.
RunResult run(const RunConfig& cfg);

struct CompareResult {
  std::string status = "ok";  // numeric_failure if any member run failed
  std::vector<RunResult> runs;
  std::string csv;  // single header, member rows merged in config order
  nlohmann::json summary;
};

/// Runs each config and merges the telemetry. All configs must share the
/// landscape, steps, and seeds (ConfigError otherwise); they may differ
/// only in optimizer settings.
CompareResult compare(const std::vector<RunConfig>& configs);

nlohmann::json config_to_json(const RunConfig& cfg);

/// cfg.out if set (a trailing .csv/.json extension is dropped), else
/// $DEO_OUT_DIR (default ".") / "<landscape>-<optimizer>".
std::string resolve_out_stem(const RunConfig& cfg);
/// Writes content to path, creating parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace deo
