#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "deo/errors.hpp"
#include "deo/mlp.hpp"
#include "deo/optim.hpp"
#include "deo/runner.hpp"

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Flat key=value config support. CLI11 only applies set_config on the
/// top-level app, so the file is expanded into long-option tokens placed
/// right after the subcommand name instead; keys that were also given as
/// real flags are skipped, which makes flags override file values, and
/// unknown keys fail option lookup like any unrecognized flag would.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::size_t sub_pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "run" || args[i] == "compare" || args[i] == "dataset") {
      sub_pos = i;
      break;
    }
  }

  std::unordered_set<std::string> explicit_flags;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) == 0) {
      explicit_flags.insert(a.substr(0, a.find('=')));
    }
  }

  std::ifstream in(config_path);
  if (!in) throw deo::ConfigError("config: cannot open file '" + config_path + "'");
  std::vector<std::string> injected;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw deo::ConfigError("config: line " + std::to_string(line_no) +
                             " is not key=value: '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "config") {
      throw deo::ConfigError("config: cannot nest config files");
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (explicit_flags.count("--" + key) > 0) continue;
    injected.push_back("--" + key + "=" + value);
  }

  const std::size_t insert_at = (sub_pos == args.size()) ? args.size() : sub_pos + 1;
  args.insert(args.begin() + static_cast<long>(insert_at), injected.begin(), injected.end());
  return args;
}

struct Staging {
  deo::RunConfig cfg;
  std::uint64_t seed_all = 42;
  std::string f_str = "10";
};

long parse_f(const std::string& s) {
  if (s == "inf") return deo::kNeverRefresh;
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || value < 1) {
    throw deo::ConfigError("f: must be a positive integer or inf (got '" + s + "')");
  }
  return value;
}

// Options shared by `run` and `compare`. The optimizer flag differs
// between the two, so it is added by the caller.
void add_run_options(CLI::App* sub, Staging& s) {
  // Expanded into tokens before parsing (see expand_config_args); the
  // option exists so the file is documented in --help.
  sub->add_option("--config", "flat key=value config file; flags override file values");

  sub->add_option("--landscape", s.cfg.landscape,
                  "loss surface: quadratic, monkey, rosenbrock, mlp")
      ->capture_default_str();
  sub->add_option("--steps", s.cfg.steps, "optimization steps T")->capture_default_str();
  sub->add_option("--lr", s.cfg.lr_max, "peak learning rate (cosine-decayed)")
      ->capture_default_str();
  sub->add_option("--lr-min", s.cfg.lr_min, "cosine floor")->capture_default_str();
  sub->add_option("--seed", s.seed_all, "sets data/init/dimer seeds at once")
      ->capture_default_str();
  sub->add_option("--seed-data", s.cfg.seed_data, "dataset + batching stream");
  sub->add_option("--seed-init", s.cfg.seed_init, "parameter init stream");
  sub->add_option("--seed-dimer", s.cfg.seed_dimer, "initial dimer direction stream");
  sub->add_option("--f", s.f_str, "dimer refresh period (positive integer or inf)")
      ->capture_default_str();
  sub->add_option("--alpha", s.cfg.alpha, "gradient correction coefficient, >= 0")
      ->capture_default_str();
  sub->add_option("--delta-r", s.cfg.delta_r, "dimer displacement")->capture_default_str();
  sub->add_option("--eta-rot", s.cfg.eta_rot, "rotation step size")->capture_default_str();
  sub->add_option("--sign", s.cfg.sign, "rotation convention: as-written or force")
      ->capture_default_str();
  sub->add_flag("--refresh-at-start", s.cfg.refresh_at_start,
                "also rotate the dimer at step 1");
  sub->add_option("--batch-size", s.cfg.batch_size, "minibatch size (mlp)")
      ->capture_default_str();
  sub->add_flag("--oracle", s.cfg.oracle,
                "per-step eigensolver diagnostics (align_vmin column, spectrum in summary)");
  sub->add_option("--out", s.cfg.out,
                  "output stem; default $DEO_OUT_DIR/<landscape>-<optimizer>");
  sub->add_option("--lambdas", s.cfg.lambdas, "quadratic eigenvalues")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--dim", s.cfg.dim, "rosenbrock dimension")->capture_default_str();
  sub->add_option("--hidden", s.cfg.hidden, "mlp hidden width")->capture_default_str();
  sub->add_option("--data-n", s.cfg.data_n, "generated dataset size (mlp)")
      ->capture_default_str();
  sub->add_option("--data-noise", s.cfg.data_noise, "moons noise sigma")
      ->capture_default_str();
  sub->add_option("--mlp-data", s.cfg.mlp_data, "load dataset CSV instead of generating");
  sub->add_option("--beta1", s.cfg.beta1, "Adam first-moment decay")->capture_default_str();
  sub->add_option("--beta2", s.cfg.beta2, "Adam second-moment decay")->capture_default_str();
  sub->add_option("--epsilon", s.cfg.epsilon, "Adam denominator floor")->capture_default_str();
  sub->add_option("--weight-decay", s.cfg.weight_decay, "AdamW decoupled decay")
      ->capture_default_str();
  sub->add_option("--momentum", s.cfg.momentum, "SGD momentum, [0, 1)")
      ->capture_default_str();
}

deo::RunConfig finalize(CLI::App* sub, Staging& s) {
  deo::RunConfig cfg = s.cfg;
  if (sub->count("--seed") > 0) {
    if (sub->count("--seed-data") == 0) cfg.seed_data = s.seed_all;
    if (sub->count("--seed-init") == 0) cfg.seed_init = s.seed_all;
    if (sub->count("--seed-dimer") == 0) cfg.seed_dimer = s.seed_all;
  }
  cfg.f = parse_f(s.f_str);
  return cfg;
}

int do_run(CLI::App* sub, Staging& s) {
  const deo::RunConfig cfg = finalize(sub, s);
  const deo::RunResult res = deo::run(cfg);
  const std::string stem = deo::resolve_out_stem(cfg);
  deo::write_text_file(stem + ".csv", res.csv);
  deo::write_text_file(stem + ".json", res.summary.dump(2) + "\n");
  std::cerr << "wrote " << stem << ".csv and " << stem << ".json\n";
  std::cout << res.summary.dump(2) << std::endl;
  if (res.status != "ok") {
    std::cerr << "numeric failure at step " << res.failing_step << "\n";
    return 3;
  }
  return 0;
}

int do_compare(CLI::App* sub, Staging& s, const std::vector<std::string>& optimizers) {
  const deo::RunConfig base = finalize(sub, s);
  std::vector<deo::RunConfig> configs;
  configs.reserve(optimizers.size());
  for (const std::string& name : optimizers) {
    deo::RunConfig c = base;
    c.optimizer = name;
    configs.push_back(std::move(c));
  }
  const deo::CompareResult res = deo::compare(configs);

  deo::RunConfig stem_cfg = base;
  stem_cfg.optimizer = "compare";
  const std::string stem = deo::resolve_out_stem(stem_cfg);
  deo::write_text_file(stem + ".csv", res.csv);
  deo::write_text_file(stem + ".json", res.summary.dump(2) + "\n");
  std::cerr << "wrote " << stem << ".csv and " << stem << ".json\n";
  std::cout << res.summary.dump(2) << std::endl;
  return res.status == "ok" ? 0 : 3;
}

int do_dataset(int n, double noise, std::uint64_t seed, std::string out,
               const std::string& load) {
  deo::Dataset d;
  if (!load.empty()) {
    try {
      d = deo::Dataset::load_csv(load);
    } catch (const std::exception& e) {
      throw deo::ConfigError("load: " + std::string(e.what()));
    }
  } else {
    try {
      d = deo::Dataset::moons(n, noise, seed);
    } catch (const std::exception& e) {
      throw deo::ConfigError("dataset: " + std::string(e.what()));
    }
    if (out.empty()) {
      const char* dir = std::getenv("DEO_OUT_DIR");
      out = std::string((dir != nullptr && *dir != '\0') ? dir : ".") + "/moons.csv";
    }
    d.save_csv(out);
    std::cerr << "wrote " << out << "\n";
  }
  int count0 = 0;
  for (int lbl : d.label) count0 += (lbl == 0) ? 1 : 0;
  nlohmann::json info;
  info["n"] = d.size();
  info["count0"] = count0;
  info["count1"] = d.size() - count0;
  std::cout << info.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimer-guided optimization benchmark runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "deo 0.1.0");

  Staging run_s;
  CLI::App* run_sub = app.add_subcommand("run", "one seeded optimization run");
  run_sub->add_option("--opt", run_s.cfg.optimizer,
                      "optimizer: sgd, adam, adamw, deo-sgd, deo-adam, deo-adamw")
      ->capture_default_str();
  add_run_options(run_sub, run_s);

  Staging cmp_s;
  std::vector<std::string> cmp_opts;
  CLI::App* cmp_sub = app.add_subcommand(
      "compare", "shared-seed runs of several optimizers, merged CSV");
  cmp_sub->add_option("--opt", cmp_opts, "optimizer to include (repeatable)")
      ->delimiter(',');
  add_run_options(cmp_sub, cmp_s);

  CLI::App* ds_sub = app.add_subcommand("dataset", "dump or inspect the moons dataset");
  int ds_n = 200;
  double ds_noise = 0.1;
  std::uint64_t ds_seed = 42;
  std::string ds_out;
  std::string ds_load;
  ds_sub->add_option("--n", ds_n, "points to generate")->capture_default_str();
  ds_sub->add_option("--noise", ds_noise, "noise sigma")->capture_default_str();
  ds_sub->add_option("--seed", ds_seed, "generator seed")->capture_default_str();
  ds_sub->add_option("--out", ds_out, "CSV path; default $DEO_OUT_DIR/moons.csv");
  ds_sub->add_option("--load", ds_load, "read an existing CSV and report label counts");

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
    if (run_sub->parsed()) return do_run(run_sub, run_s);
    if (cmp_sub->parsed()) return do_compare(cmp_sub, cmp_s, cmp_opts);
    if (ds_sub->parsed()) return do_dataset(ds_n, ds_noise, ds_seed, ds_out, ds_load);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const deo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const deo::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const deo::ConvergenceFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
