#include "deo/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>

#include "deo/dimer.hpp"
#include "deo/errors.hpp"
#include "deo/io.hpp"
#include "deo/landscapes.hpp"
#include "deo/mlp.hpp"
#include "deo/oracle.hpp"

namespace deo {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

nlohmann::json json_num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

int problem_dim_for(const RunConfig& cfg) {
  if (cfg.landscape == "quadratic") return static_cast<int>(cfg.lambdas.size());
  if (cfg.landscape == "monkey") return 2;
  if (cfg.landscape == "rosenbrock") return cfg.dim;
  MlpShape shape;
  shape.hidden = cfg.hidden;
  return shape.param_count();
}

}  // namespace

bool is_deo_optimizer(const std::string& name) {
  return name.rfind("deo-", 0) == 0;
}

BaseOpt base_of(const std::string& optimizer) {
  std::string base = optimizer;
  if (is_deo_optimizer(base)) base = base.substr(4);
  if (base == "sgd") return BaseOpt::kSgd;
  if (base == "adam") return BaseOpt::kAdam;
  if (base == "adamw") return BaseOpt::kAdamW;
  throw ConfigError("optimizer: unknown optimizer '" + optimizer +
                    "' (supported: sgd, adam, adamw, deo-sgd, deo-adam, deo-adamw)");
}

SignConvention sign_of(const std::string& name) {
  if (name == "as-written") return SignConvention::kAsWritten;
  if (name == "force") return SignConvention::kForceConvention;
  throw ConfigError("sign: unknown convention '" + name +
                    "' (supported: as-written, force)");
}

void validate(const RunConfig& cfg) {
  if (cfg.landscape != "quadratic" && cfg.landscape != "monkey" &&
      cfg.landscape != "rosenbrock" && cfg.landscape != "mlp") {
    throw ConfigError("landscape: unknown landscape '" + cfg.landscape +
                      "' (supported: quadratic, monkey, rosenbrock, mlp)");
  }
  base_of(cfg.optimizer);
  sign_of(cfg.sign);
  if (cfg.steps < 1) throw ConfigError("steps: must be >= 1");
  if (!(cfg.lr_max > 0.0)) throw ConfigError("lr_max: must be > 0");
  if (!(cfg.lr_min >= 0.0 && cfg.lr_min <= cfg.lr_max)) {
    throw ConfigError("lr_min: must satisfy 0 <= lr_min <= lr_max");
  }
  if (cfg.f < 1) throw ConfigError("f: must be a positive integer or inf");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha: must be >= 0");
  if (!(cfg.delta_r > 0.0)) throw ConfigError("delta_r: must be > 0");
  if (!(cfg.eta_rot > 0.0)) throw ConfigError("eta_rot: must be > 0");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) throw ConfigError("beta1: must be in [0, 1)");
  if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) throw ConfigError("beta2: must be in [0, 1)");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon: must be > 0");
  if (!(cfg.weight_decay >= 0.0)) throw ConfigError("weight_decay: must be >= 0");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw ConfigError("momentum: must be in [0, 1)");
  }
  if (cfg.landscape == "quadratic") {
    if (cfg.lambdas.empty()) throw ConfigError("lambdas: must be non-empty");
    if (!all_finite(cfg.lambdas)) throw ConfigError("lambdas: must be finite");
  }
  if (cfg.landscape == "rosenbrock" && cfg.dim < 2) {
    throw ConfigError("dim: rosenbrock needs dim >= 2");
  }
  if (cfg.landscape == "mlp") {
    if (cfg.hidden < 1) throw ConfigError("hidden: must be >= 1");
    if (!(cfg.data_noise >= 0.0)) throw ConfigError("data_noise: must be >= 0");
    if (cfg.batch_size < 1) throw ConfigError("batch_size: must be >= 1");
    if (cfg.mlp_data.empty()) {
      if (cfg.data_n < 2) throw ConfigError("data_n: must be >= 2");
      if (cfg.batch_size > cfg.data_n) {
        throw ConfigError("batch_size: must be <= data_n");
      }
    }
  }
  if (cfg.oracle && problem_dim_for(cfg) > 500) {
    throw ConfigError("oracle: problem dimension " +
                      std::to_string(problem_dim_for(cfg)) +
                      " exceeds the dense-oracle limit (500)");
  }
}

ProblemPtr make_problem(const RunConfig& cfg) {
  try {
    if (cfg.landscape == "quadratic") return make_quadratic(cfg.lambdas);
    if (cfg.landscape == "monkey") return make_monkey_saddle();
    if (cfg.landscape == "rosenbrock") return make_rosenbrock(cfg.dim);
    if (cfg.landscape == "mlp") {
      Dataset d = cfg.mlp_data.empty()
                      ? Dataset::moons(cfg.data_n, cfg.data_noise, cfg.seed_data)
                      : Dataset::load_csv(cfg.mlp_data);
      MlpShape shape;
      shape.hidden = cfg.hidden;
      return make_mlp(shape, std::move(d), cfg.batch_size);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("landscape: " + std::string(e.what()));
  }
  throw ConfigError("landscape: unknown landscape '" + cfg.landscape + "'");
}

Vec initial_theta(const RunConfig& cfg, const Problem& problem) {
  const RngSeed seed{cfg.seed_init, "init"};
  if (cfg.landscape == "mlp") {
    MlpShape shape;
    shape.hidden = cfg.hidden;
    return init_params(shape, seed);
  }
  return random_unit_vector(problem.dim(), seed);
}

std::string csv_header() {
  return "step,optimizer,lr,loss,grad_norm,g_dot_n,curv_paper,curv_grad,"
         "curv_2nd,dimer_refreshed,grad_evals,align_vmin\n";
}

namespace {

void append_cell(std::string& out, const std::optional<double>& x) {
  if (x.has_value()) out += format_double(*x);
  out += ',';
}

}  // namespace

std::string csv_rows(const std::vector<RunRecord>& records,
                     const std::string& optimizer_name) {
  std::string out;
  out.reserve(records.size() * 140);
  for (const RunRecord& r : records) {
    out += std::to_string(r.step);
    out += ',';
    out += optimizer_name;
    out += ',';
    out += format_double(r.lr);
    out += ',';
    out += format_double(r.loss);
    out += ',';
    out += format_double(r.grad_norm);
    out += ',';
    append_cell(out, r.g_dot_n);
    append_cell(out, r.curv_paper);
    append_cell(out, r.curv_grad);
    append_cell(out, r.curv_2nd);
    out += std::to_string(r.dimer_refreshed);
    out += ',';
    out += std::to_string(r.grad_evals);
    out += ',';
    if (r.align_vmin.has_value()) out += format_double(*r.align_vmin);
    out += '\n';
  }
  return out;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["landscape"] = cfg.landscape;
  j["optimizer"] = cfg.optimizer;
  j["steps"] = cfg.steps;
  j["lr_max"] = cfg.lr_max;
  j["lr_min"] = cfg.lr_min;
  j["seed_data"] = cfg.seed_data;
  j["seed_init"] = cfg.seed_init;
  j["seed_dimer"] = cfg.seed_dimer;
  if (cfg.f == kNeverRefresh) {
    j["f"] = "inf";
  } else {
    j["f"] = cfg.f;
  }
  j["alpha"] = cfg.alpha;
  j["delta_r"] = cfg.delta_r;
  j["eta_rot"] = cfg.eta_rot;
  j["sign"] = cfg.sign;
  j["refresh_at_start"] = cfg.refresh_at_start;
  j["batch_size"] = cfg.batch_size;
  j["oracle"] = cfg.oracle;
  j["out"] = cfg.out;
  j["lambdas"] = cfg.lambdas;
  j["dim"] = cfg.dim;
  j["hidden"] = cfg.hidden;
  j["data_n"] = cfg.data_n;
  j["data_noise"] = cfg.data_noise;
  j["mlp_data"] = cfg.mlp_data;
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["epsilon"] = cfg.epsilon;
  j["weight_decay"] = cfg.weight_decay;
  j["momentum"] = cfg.momentum;
  return j;
}

namespace {

nlohmann::json run_summary(const RunConfig& cfg, const RunResult& res) {
  nlohmann::json s;
  s["status"] = res.status;
  if (res.status != "ok") s["failing_step"] = res.failing_step;
  s["landscape"] = cfg.landscape;
  s["optimizer"] = cfg.optimizer;
  s["steps_completed"] = static_cast<long>(res.records.size());
  s["initial_loss"] = json_num(res.initial_loss);
  s["final_loss"] = json_num(res.final_loss);
  s["min_loss"] = json_num(res.min_loss);
  s["grad_evals"] = res.grad_evals;
  s["wall_seconds"] = res.wall_seconds;
  s["config"] = config_to_json(cfg);
  if (cfg.oracle && !res.eigenvalues.empty()) {
    s["eigenvalues_final"] = res.eigenvalues;
  }
  return s;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  validate(cfg);
  const auto clock_start = std::chrono::steady_clock::now();

  ProblemPtr problem = make_problem(cfg);
  const int dim = problem->dim();
  const bool deo_run = is_deo_optimizer(cfg.optimizer);
  const bool mlp_run = cfg.landscape == "mlp";

  DimerConfig dimer_cfg;
  dimer_cfg.delta_r = cfg.delta_r;
  dimer_cfg.eta_rot = cfg.eta_rot;
  dimer_cfg.alpha = cfg.alpha;
  dimer_cfg.sign = sign_of(cfg.sign);

  DeoConfig deo_cfg;
  deo_cfg.frequency = cfg.f;
  deo_cfg.dimer = dimer_cfg;
  deo_cfg.base = base_of(cfg.optimizer);
  deo_cfg.refresh_at_start = cfg.refresh_at_start;

  AdamConfig adam_cfg;
  adam_cfg.beta1 = cfg.beta1;
  adam_cfg.beta2 = cfg.beta2;
  adam_cfg.epsilon = cfg.epsilon;
  adam_cfg.weight_decay = cfg.weight_decay;

  OptState opt;
  opt.sgd.config.momentum = cfg.momentum;
  opt.adam = AdamState::zeros(dim);

  LrSchedule sched;
  sched.lr_max = cfg.lr_max;
  sched.lr_min = cfg.lr_min;
  sched.total_steps = cfg.steps;

  DimerState dimer;
  if (deo_run) dimer = DimerState::init_random(dim, dimer_cfg, cfg.seed_dimer);

  // The quadratic Hessian is constant, so its spectrum is solved once.
  std::optional<EigenPairs> cached_eig;
  auto eigen_at = [&](const Vec& th) -> const EigenPairs& {
    if (cfg.landscape == "quadratic" && cached_eig.has_value()) return *cached_eig;
    SymMatrix h = problem->has_hessian()
                      ? problem->hessian(th)
                      : hessian_fd(*problem, th).hessian;
    cached_eig = eig_sym(h);
    return *cached_eig;
  };

  RunResult res;
  res.initial_loss = kNan;
  res.final_loss = kNan;
  res.min_loss = kNan;

  Vec theta = initial_theta(cfg, *problem);
  long grad_evals = 0;
  long t = 0;

  try {
    res.initial_loss = problem->loss(theta, std::nullopt);
  } catch (const NumericFailure&) {
    res.initial_loss = kNan;
  }
  if (!std::isfinite(res.initial_loss)) {
    res.status = "numeric_failure";
    res.failing_step = 0;
  } else {
    try {
      for (t = 1; t <= cfg.steps; ++t) {
        const std::optional<Batch> batch =
            mlp_run ? std::optional<Batch>(Batch{cfg.seed_data, t - 1})
                    : std::nullopt;
        if (deo_run) {
          DeoStepResult r = deo_step(*problem, theta, t, deo_cfg, dimer, opt,
                                     adam_cfg, sched, batch, grad_evals);
          if (cfg.oracle) {
            const EigenPairs& ep = eigen_at(theta);
            r.record.align_vmin = alignment(r.dimer.direction, ep.vectors[0]);
          }
          grad_evals = r.record.grad_evals;
          res.records.push_back(r.record);
          theta = std::move(r.theta);
          dimer = std::move(r.dimer);
          opt = std::move(r.opt);
        } else {
          const double lr = sched.at(t);
          const double loss = problem->loss(theta, batch);
          Vec g = problem->grad(theta, batch);
          grad_evals += 1;
          if (!std::isfinite(loss) || !all_finite(g)) {
            throw NumericFailure("run: non-finite evaluation", t);
          }
          RunRecord rec;
          rec.step = t;
          rec.lr = lr;
          rec.loss = loss;
          rec.grad_norm = norm(g);
          rec.grad_evals = grad_evals;
          res.records.push_back(rec);
          theta = apply_base(deo_cfg.base, theta, g, lr, opt, adam_cfg);
        }
      }
    } catch (const NumericFailure& e) {
      res.status = "numeric_failure";
      res.failing_step = e.step() >= 0 ? e.step() : t;
    } catch (const ConvergenceFailure&) {
      res.status = "numeric_failure";
      res.failing_step = t;
    }
  }

  res.grad_evals = grad_evals;
  res.final_theta = theta;
  if (std::isfinite(res.initial_loss)) {
    try {
      res.final_loss = problem->loss(theta, std::nullopt);
    } catch (const NumericFailure&) {
      res.final_loss = kNan;
    }
  }
  for (const RunRecord& r : res.records) {
    if (std::isnan(res.min_loss) || r.loss < res.min_loss) res.min_loss = r.loss;
  }
  if (cfg.oracle) {
    try {
      res.eigenvalues = eigen_at(theta).values;
    } catch (const std::exception&) {
      res.eigenvalues.clear();
    }
  }

  res.csv = csv_header() + csv_rows(res.records, cfg.optimizer);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start)
          .count();
  res.summary = run_summary(cfg, res);
  return res;
}

CompareResult compare(const std::vector<RunConfig>& configs) {
  if (configs.empty()) throw ConfigError("compare: empty config list");
  const RunConfig& first = configs.front();
  for (const RunConfig& c : configs) {
    auto require = [&](bool same, const char* field) {
      if (!same) {
        throw ConfigError("compare: configs disagree on shared field '" +
                          std::string(field) + "'");
      }
    };
    require(c.landscape == first.landscape, "landscape");
    require(c.steps == first.steps, "steps");
    require(c.seed_data == first.seed_data, "seed_data");
    require(c.seed_init == first.seed_init, "seed_init");
    require(c.seed_dimer == first.seed_dimer, "seed_dimer");
    require(c.batch_size == first.batch_size, "batch_size");
    require(c.lambdas == first.lambdas, "lambdas");
    require(c.dim == first.dim, "dim");
    require(c.hidden == first.hidden, "hidden");
    require(c.data_n == first.data_n, "data_n");
    require(c.data_noise == first.data_noise, "data_noise");
    require(c.mlp_data == first.mlp_data, "mlp_data");
  }
  for (const RunConfig& c : configs) validate(c);

  CompareResult out;
  out.csv = csv_header();
  nlohmann::json table = nlohmann::json::array();
  nlohmann::json runs = nlohmann::json::array();
  for (const RunConfig& c : configs) {
    RunResult r = run(c);
    out.csv += csv_rows(r.records, c.optimizer);
    if (r.status != "ok") out.status = "numeric_failure";
    nlohmann::json row;
    row["optimizer"] = c.optimizer;
    row["status"] = r.status;
    row["final_loss"] = json_num(r.final_loss);
    row["min_loss"] = json_num(r.min_loss);
    row["grad_evals"] = r.grad_evals;
    table.push_back(row);
    runs.push_back(r.summary);
    out.runs.push_back(std::move(r));
  }
  nlohmann::json s;
  s["status"] = out.status;
  s["landscape"] = first.landscape;
  s["steps"] = first.steps;
  s["table"] = table;
  s["runs"] = runs;
  out.summary = s;
  return out;
}

std::string resolve_out_stem(const RunConfig& cfg) {
  std::string stem = cfg.out;
  if (stem.empty()) {
    const char* dir = std::getenv("DEO_OUT_DIR");
    const std::string base = (dir != nullptr && *dir != '\0') ? dir : ".";
    return base + "/" + cfg.landscape + "-" + cfg.optimizer;
  }
  for (const char* ext : {".csv", ".json"}) {
    const std::string_view sv(ext);
    if (stem.size() > sv.size() &&
        stem.compare(stem.size() - sv.size(), sv.size(), sv) == 0) {
      stem.resize(stem.size() - sv.size());
      break;
    }
  }
  return stem;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace deo
