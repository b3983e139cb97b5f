#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "deo/dimer.hpp"
#include "deo/errors.hpp"
#include "deo/landscapes.hpp"
#include "deo/mlp.hpp"
#include "deo/optim.hpp"
#include "deo/oracle.hpp"
#include "deo/runner.hpp"
#include "deo/vec.hpp"

namespace py = pybind11;

namespace {

std::optional<deo::Batch> make_batch(std::optional<std::uint64_t> seed,
                                     std::int64_t step) {
  if (!seed.has_value()) return std::nullopt;
  return deo::Batch{*seed, step};
}

std::vector<std::vector<double>> matrix_rows(const deo::SymMatrix& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i) {
    rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.n));
    for (int j = 0; j < m.n; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return rows;
}

deo::SymMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  deo::SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw std::invalid_argument("matrix rows must form a square matrix");
    }
    for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dimer-guided optimization core";
#ifdef DEOPT_VERSION
  m.attr("__version__") = DEOPT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
  m.attr("NEVER_REFRESH") = deo::kNeverRefresh;

  py::register_exception<deo::NumericFailure>(m, "NumericFailure");
  py::register_exception<deo::ConvergenceFailure>(m, "ConvergenceFailure");
  py::register_exception<deo::ConfigError>(m, "ConfigError");

  m.def("dot", &deo::dot);
  m.def("norm", &deo::norm);
  m.def("normalize", &deo::normalize);
  m.def(
      "random_unit_vector",
      [](int dim, std::uint64_t seed, const std::string& label) {
        return deo::random_unit_vector(dim, deo::RngSeed{seed, label});
      },
      py::arg("dim"), py::arg("seed"), py::arg("label") = "dimer");
  m.def("cosine_lr", [](long t, long total, double lr_max, double lr_min) {
    return deo::cosine_lr(t, total, lr_max, lr_min);
  });

  py::class_<deo::Problem, std::shared_ptr<deo::Problem>>(m, "Problem")
      .def_property_readonly("name", &deo::Problem::name)
      .def_property_readonly("dim", &deo::Problem::dim)
      .def(
          "loss",
          [](const deo::Problem& p, const deo::Vec& theta,
             std::optional<std::uint64_t> batch_seed, std::int64_t batch_step) {
            return p.loss(theta, make_batch(batch_seed, batch_step));
          },
          py::arg("theta"), py::arg("batch_seed") = py::none(),
          py::arg("batch_step") = 0)
      .def(
          "grad",
          [](const deo::Problem& p, const deo::Vec& theta,
             std::optional<std::uint64_t> batch_seed, std::int64_t batch_step) {
            return p.grad(theta, make_batch(batch_seed, batch_step));
          },
          py::arg("theta"), py::arg("batch_seed") = py::none(),
          py::arg("batch_step") = 0)
      .def("has_hessian", &deo::Problem::has_hessian)
      .def("hessian", [](const deo::Problem& p, const deo::Vec& theta) {
        return matrix_rows(p.hessian(theta));
      });

  m.def(
      "quadratic",
      [](const deo::Vec& lambdas) {
        return std::const_pointer_cast<deo::Problem>(deo::make_quadratic(lambdas));
      },
      py::arg("lambdas"));
  m.def("monkey_saddle", [] {
    return std::const_pointer_cast<deo::Problem>(deo::make_monkey_saddle());
  });
  m.def(
      "rosenbrock",
      [](int dim) { return std::const_pointer_cast<deo::Problem>(deo::make_rosenbrock(dim)); },
      py::arg("dim") = 2);
  m.def(
      "mlp_moons",
      [](int hidden, int n, double noise, std::uint64_t seed, int batch_size) {
        deo::MlpShape shape;
        shape.hidden = hidden;
        return std::const_pointer_cast<deo::Problem>(
            deo::make_mlp(shape, deo::Dataset::moons(n, noise, seed), batch_size));
      },
      py::arg("hidden") = 16, py::arg("n") = 200, py::arg("noise") = 0.1,
      py::arg("seed") = 42, py::arg("batch_size") = 32);
  m.def(
      "moons_csv",
      [](int n, double noise, std::uint64_t seed) {
        std::ostringstream out;
        deo::Dataset::moons(n, noise, seed).save_csv(out);
        return out.str();
      },
      py::arg("n") = 200, py::arg("noise") = 0.1, py::arg("seed") = 42);
  m.def(
      "init_params",
      [](int hidden, std::uint64_t seed) {
        deo::MlpShape shape;
        shape.hidden = hidden;
        return deo::init_params(shape, deo::RngSeed{seed, "init"});
      },
      py::arg("hidden") = 16, py::arg("seed") = 42);

  py::enum_<deo::SignConvention>(m, "SignConvention")
      .value("AS_WRITTEN", deo::SignConvention::kAsWritten)
      .value("FORCE_CONVENTION", deo::SignConvention::kForceConvention);

  py::class_<deo::DimerConfig>(m, "DimerConfig")
      .def(py::init<>())
      .def_readwrite("delta_r", &deo::DimerConfig::delta_r)
      .def_readwrite("eta_rot", &deo::DimerConfig::eta_rot)
      .def_readwrite("alpha", &deo::DimerConfig::alpha)
      .def_readwrite("sign", &deo::DimerConfig::sign);

  py::class_<deo::RotationDiagnostics>(m, "RotationDiagnostics")
      .def_readonly("rotational_force", &deo::RotationDiagnostics::rotational_force)
      .def_readonly("curvature_paper", &deo::RotationDiagnostics::curvature_paper)
      .def_readonly("curvature_grad", &deo::RotationDiagnostics::curvature_grad)
      .def_readonly("curvature_second_order",
                    &deo::RotationDiagnostics::curvature_second_order)
      .def_readonly("loss_at_theta2", &deo::RotationDiagnostics::loss_at_theta2);

  py::class_<deo::DimerState>(m, "DimerState")
      .def_static("init_random", &deo::DimerState::init_random, py::arg("dim"),
                  py::arg("config"), py::arg("seed"))
      .def_readonly("direction", &deo::DimerState::direction)
      .def_readonly("config", &deo::DimerState::config);

  m.def(
      "rotate_once",
      [](const std::shared_ptr<deo::Problem>& problem, const deo::Vec& theta, const deo::Vec& g,
         const deo::DimerState& state, std::optional<std::uint64_t> batch_seed,
         std::int64_t batch_step) {
        return deo::rotate_once(*problem, theta, g, state,
                                make_batch(batch_seed, batch_step));
      },
      py::arg("problem"), py::arg("theta"), py::arg("g"), py::arg("state"),
      py::arg("batch_seed") = py::none(), py::arg("batch_step") = 0);
  m.def("project_gradient", &deo::project_gradient, py::arg("g"),
        py::arg("direction"), py::arg("alpha"));

  py::class_<deo::AdamConfig>(m, "AdamConfig")
      .def(py::init<>())
      .def_readwrite("beta1", &deo::AdamConfig::beta1)
      .def_readwrite("beta2", &deo::AdamConfig::beta2)
      .def_readwrite("epsilon", &deo::AdamConfig::epsilon)
      .def_readwrite("weight_decay", &deo::AdamConfig::weight_decay);

  py::class_<deo::AdamState>(m, "AdamState")
      .def_static("zeros", &deo::AdamState::zeros, py::arg("dim"))
      .def_readonly("m", &deo::AdamState::m)
      .def_readonly("v", &deo::AdamState::v)
      .def_readonly("t", &deo::AdamState::t);

  m.def("adam_step", &deo::adam_step, py::arg("theta"), py::arg("g"),
        py::arg("lr"), py::arg("state"), py::arg("config"));
  m.def("adamw_step", &deo::adamw_step, py::arg("theta"), py::arg("g"),
        py::arg("lr"), py::arg("state"), py::arg("config"));
  m.def(
      "sgd_step",
      [](const deo::Vec& theta, const deo::Vec& g, double lr, double momentum,
         std::optional<deo::Vec> velocity) {
        deo::SgdState state;
        state.config.momentum = momentum;
        if (velocity.has_value()) state.velocity = std::move(*velocity);
        deo::Vec out = deo::sgd_step(theta, g, lr, state);
        return py::make_tuple(out, state.velocity);
      },
      py::arg("theta"), py::arg("g"), py::arg("lr"), py::arg("momentum") = 0.0,
      py::arg("velocity") = py::none());

  m.def(
      "hessian_fd",
      [](const std::shared_ptr<deo::Problem>& problem, const deo::Vec& theta, double h) {
        const deo::FdHessianResult res = deo::hessian_fd(*problem, theta, h);
        return py::make_tuple(matrix_rows(res.hessian), res.asymmetry);
      },
      py::arg("problem"), py::arg("theta"), py::arg("h") = 1e-5);
  m.def("eig_sym", [](const std::vector<std::vector<double>>& rows) {
    const deo::EigenPairs ep = deo::eig_sym(matrix_from_rows(rows));
    return py::make_tuple(ep.values, ep.vectors);
  });
  m.def("alignment", &deo::alignment, py::arg("a"), py::arg("b"));

  py::class_<deo::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("landscape", &deo::RunConfig::landscape)
      .def_readwrite("optimizer", &deo::RunConfig::optimizer)
      .def_readwrite("steps", &deo::RunConfig::steps)
      .def_readwrite("lr_max", &deo::RunConfig::lr_max)
      .def_readwrite("lr_min", &deo::RunConfig::lr_min)
      .def_readwrite("seed_data", &deo::RunConfig::seed_data)
      .def_readwrite("seed_init", &deo::RunConfig::seed_init)
      .def_readwrite("seed_dimer", &deo::RunConfig::seed_dimer)
      .def_readwrite("f", &deo::RunConfig::f)
      .def_readwrite("alpha", &deo::RunConfig::alpha)
      .def_readwrite("delta_r", &deo::RunConfig::delta_r)
      .def_readwrite("eta_rot", &deo::RunConfig::eta_rot)
      .def_readwrite("sign", &deo::RunConfig::sign)
      .def_readwrite("refresh_at_start", &deo::RunConfig::refresh_at_start)
      .def_readwrite("batch_size", &deo::RunConfig::batch_size)
      .def_readwrite("oracle", &deo::RunConfig::oracle)
      .def_readwrite("out", &deo::RunConfig::out)
      .def_readwrite("lambdas", &deo::RunConfig::lambdas)
      .def_readwrite("dim", &deo::RunConfig::dim)
      .def_readwrite("hidden", &deo::RunConfig::hidden)
      .def_readwrite("data_n", &deo::RunConfig::data_n)
      .def_readwrite("data_noise", &deo::RunConfig::data_noise)
      .def_readwrite("mlp_data", &deo::RunConfig::mlp_data)
      .def_readwrite("beta1", &deo::RunConfig::beta1)
      .def_readwrite("beta2", &deo::RunConfig::beta2)
      .def_readwrite("epsilon", &deo::RunConfig::epsilon)
      .def_readwrite("weight_decay", &deo::RunConfig::weight_decay)
      .def_readwrite("momentum", &deo::RunConfig::momentum);

  m.def("run_strings", [](const deo::RunConfig& cfg) {
    const deo::RunResult res = deo::run(cfg);
    return py::make_tuple(res.csv, res.summary.dump());
  });
  m.def("compare_strings", [](const std::vector<deo::RunConfig>& configs) {
    const deo::CompareResult res = deo::compare(configs);
    return py::make_tuple(res.csv, res.summary.dump());
  });
}
