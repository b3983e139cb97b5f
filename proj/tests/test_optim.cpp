#include <cmath>
#include <stdexcept>

#include "deo/landscapes.hpp"
#include "deo/optim.hpp"
#include "deo/vec.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace deo;
using deo::test::close;

namespace {

/// Wraps a problem and counts evaluations, to pin the expensive/cheap
/// scheduling contract observably.
class CountingProblem final : public Problem {
 public:
  explicit CountingProblem(ProblemPtr inner)
      : Problem(inner->name(), inner->dim()), inner_(std::move(inner)) {}

  double loss(const Vec& theta, const std::optional<Batch>& batch) const override {
    ++loss_evals;
    return inner_->loss(theta, batch);
  }
  Vec grad(const Vec& theta, const std::optional<Batch>& batch) const override {
    ++grad_evals;
    return inner_->grad(theta, batch);
  }

  mutable long loss_evals = 0;
  mutable long grad_evals = 0;

 private:
  ProblemPtr inner_;
};

}  // namespace

TEST_CASE("plain sgd") {
  SgdState state;
  const Vec next = sgd_step({1.0, 1.0}, {1.0, -1.0}, 0.1, state);
  CHECK(next[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(next[1] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(state.velocity.empty());  // no buffer without momentum

  SUBCASE("zero gradient leaves parameters untouched") {
    const Vec same = sgd_step({1.0, -2.0}, {0.0, 0.0}, 0.1, state);
    CHECK(same == Vec{1.0, -2.0});
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS((void)sgd_step({1.0}, {1.0, 2.0}, 0.1, state),
                    std::invalid_argument);
  }
}

TEST_CASE("sgd with momentum") {
  SgdState state;
  state.config.momentum = 0.9;
  Vec theta = {0.0};
  theta = sgd_step(theta, {1.0}, 0.1, state);
  CHECK(theta[0] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(state.velocity.size() == 1);
  CHECK(state.velocity[0] == 1.0);
  theta = sgd_step(theta, {1.0}, 0.1, state);
  CHECK(theta[0] == doctest::Approx(-0.29).epsilon(1e-15));
  CHECK(state.velocity[0] == doctest::Approx(1.9).epsilon(1e-15));
}

TEST_CASE("adam single step from zero moments") {
  AdamState state = AdamState::zeros(1);
  const AdamConfig cfg;
  const Vec g = {0.5};  // dyadic, so the moment algebra is exact
  const auto [theta, next] = adam_step({0.0}, g, 1e-2, state, cfg);

  CHECK(next.t == 1);
  // Bias correction cancels the (1 - beta) factors exactly at t = 1.
  const double m_hat = next.m[0] / (1.0 - cfg.beta1);
  const double v_hat = next.v[0] / (1.0 - cfg.beta2);
  CHECK(m_hat == 0.5);
  CHECK(v_hat == 0.25);

  const double expect = -1e-2 * 0.5 / (0.5 + cfg.epsilon);
  CHECK(std::abs(theta[0] - expect) <= 1e-12 * 1e-2);

  SUBCASE("zero gradient from zero state is a no-op") {
    const auto [same, st] = adam_step({3.0, -4.0}, {0.0, 0.0}, 1e-2,
                                      AdamState::zeros(2), cfg);
    CHECK(same == Vec{3.0, -4.0});
    CHECK(st.t == 1);
  }
}

TEST_CASE("adam step sizes stay bounded") {
  const AdamConfig cfg;

  SUBCASE("constant gradient: per-coordinate step within lr") {
    AdamState state = AdamState::zeros(1);
    Vec theta = {0.0};
    const double lr = 1e-2;
    for (int i = 0; i < 10; ++i) {
      const auto [next, st] = adam_step(theta, {0.7}, lr, state, cfg);
      const double step = std::abs(next[0] - theta[0]);
      CHECK(step > 0.0);
      CHECK(step <= lr * (1.0 + 1e-9));
      theta = next;
      state = st;
    }
  }

  SUBCASE("random gradients: empirical bound of 10 lr") {
    Rng rng(16, "adam");
    AdamState state = AdamState::zeros(4);
    Vec theta(4, 0.0);
    const double lr = 3e-3;
    for (int i = 0; i < 200; ++i) {
      const Vec g = deo::test::normal_vec(rng, 4, 2.0);
      const auto [next, st] = adam_step(theta, g, lr, state, cfg);
      for (std::size_t k = 0; k < theta.size(); ++k) {
        CHECK(std::abs(next[k] - theta[k]) <= 10.0 * lr);
        CHECK(st.v[k] >= 0.0);
      }
      theta = next;
      state = st;
      CHECK(state.t == i + 1);
    }
  }
}

TEST_CASE("adamw decoupled decay") {
  const Vec theta = {1.0};
  AdamState state = AdamState::zeros(1);

  SUBCASE("zero weight decay is bitwise adam") {
    AdamConfig cfg;
    cfg.weight_decay = 0.0;
    Rng rng(17, "adamw");
    AdamState sa = AdamState::zeros(3);
    AdamState sw = AdamState::zeros(3);
    Vec ta(3, 1.0), tw(3, 1.0);
    for (int i = 0; i < 50; ++i) {
      const Vec g = deo::test::normal_vec(rng, 3, 1.0);
      auto [na, nsa] = adam_step(ta, g, 1e-2, sa, cfg);
      auto [nw, nsw] = adamw_step(tw, g, 1e-2, sw, cfg);
      CHECK(deo::test::bitwise_equal(na, nw));
      ta = std::move(na);
      tw = std::move(nw);
      sa = std::move(nsa);
      sw = std::move(nsw);
    }
  }

  SUBCASE("pure decay with zero gradient") {
    AdamConfig cfg;
    cfg.weight_decay = 0.1;
    const auto [next, st] = adamw_step(theta, {0.0}, 0.1, state, cfg);
    CHECK(next[0] == doctest::Approx(0.99).epsilon(1e-15));
  }

  SUBCASE("decay contributes nothing at the origin") {
    AdamConfig with_decay;
    with_decay.weight_decay = 0.3;
    AdamConfig no_decay;
    no_decay.weight_decay = 0.0;
    const Vec zero = {0.0, 0.0};
    const Vec g = {0.25, -1.5};
    const auto [a, s1] = adamw_step(zero, g, 1e-2, AdamState::zeros(2), with_decay);
    const auto [b, s2] = adamw_step(zero, g, 1e-2, AdamState::zeros(2), no_decay);
    CHECK(deo::test::bitwise_equal(a, b));
  }
}

TEST_CASE("learning-rate schedule indexing") {
  LrSchedule sched;
  sched.lr_max = 6e-4;
  sched.lr_min = 0.0;
  sched.total_steps = 100;
  CHECK(sched.at(1) == 6e-4);  // step 1 gets lr_max
  CHECK(sched.at(2) < sched.at(1));
  CHECK(sched.at(100) > 0.0);
  CHECK(sched.at(101) == 0.0);  // one past the horizon reaches lr_min
}

TEST_CASE("deo wrapper scheduling") {
  auto counting = std::make_shared<CountingProblem>(make_quadratic({1.0, 2.0, -1.0}));
  const AdamConfig adam_cfg;
  LrSchedule sched;
  sched.total_steps = 100;

  DeoConfig deo;
  deo.frequency = 10;
  deo.base = BaseOpt::kAdam;

  SUBCASE("one hundred steps at f = 10 cost 110 gradients") {
    DimerState dimer = DimerState::init_random(3, deo.dimer, 42);
    OptState opt;
    opt.adam = AdamState::zeros(3);
    Vec theta = random_unit_vector(3, RngSeed{1, "init"});

    long evals = 0;
    for (long t = 1; t <= 100; ++t) {
      DeoStepResult r = deo_step(*counting, theta, t, deo, dimer, opt, adam_cfg,
                                 sched, std::nullopt, evals);
      CHECK(r.record.grad_evals >= evals);  // non-decreasing
      evals = r.record.grad_evals;
      CHECK(evals == t + t / deo.frequency);  // the accounting contract
      CHECK(r.record.dimer_refreshed == ((t % 10 == 0) ? 1 : 0));
      if (t < 10) {
        CHECK_FALSE(r.record.curv_paper.has_value());
      } else {
        CHECK(r.record.curv_paper.has_value());
        CHECK(r.record.curv_grad.has_value());
        CHECK(r.record.curv_2nd.has_value());
      }
      CHECK(r.record.g_dot_n.has_value());
      theta = std::move(r.theta);
      dimer = std::move(r.dimer);
      opt = std::move(r.opt);
    }
    CHECK(evals == 110);
    CHECK(counting->grad_evals == 110);  // the wrapper's count is honest
    // One loss per step plus two per refresh.
    CHECK(counting->loss_evals == 100 + 2 * 10);
  }

  SUBCASE("f = 1 refreshes every step") {
    deo.frequency = 1;
    DimerState dimer = DimerState::init_random(3, deo.dimer, 42);
    OptState opt;
    opt.adam = AdamState::zeros(3);
    Vec theta = random_unit_vector(3, RngSeed{1, "init"});
    long evals = 0;
    for (long t = 1; t <= 5; ++t) {
      DeoStepResult r = deo_step(*counting, theta, t, deo, dimer, opt, adam_cfg,
                                 sched, std::nullopt, evals);
      CHECK(r.record.dimer_refreshed == 1);
      evals = r.record.grad_evals;
      CHECK(evals == 2 * t);
      theta = std::move(r.theta);
      dimer = std::move(r.dimer);
      opt = std::move(r.opt);
    }
  }

  SUBCASE("frequency infinity keeps the initial direction forever") {
    deo.frequency = kNeverRefresh;
    DimerState dimer = DimerState::init_random(3, deo.dimer, 42);
    const Vec initial_direction = dimer.direction;
    OptState opt;
    opt.adam = AdamState::zeros(3);
    Vec theta = random_unit_vector(3, RngSeed{1, "init"});
    long evals = 0;
    for (long t = 1; t <= 30; ++t) {
      DeoStepResult r = deo_step(*counting, theta, t, deo, dimer, opt, adam_cfg,
                                 sched, std::nullopt, evals);
      CHECK(r.record.dimer_refreshed == 0);
      CHECK_FALSE(r.record.curv_paper.has_value());
      evals = r.record.grad_evals;
      CHECK(evals == t);
      theta = std::move(r.theta);
      dimer = std::move(r.dimer);
      opt = std::move(r.opt);
    }
    CHECK(deo::test::bitwise_equal(dimer.direction, initial_direction));
  }

  SUBCASE("refresh_at_start makes the first step expensive") {
    deo.refresh_at_start = true;
    DimerState dimer = DimerState::init_random(3, deo.dimer, 42);
    OptState opt;
    opt.adam = AdamState::zeros(3);
    Vec theta = random_unit_vector(3, RngSeed{1, "init"});
    DeoStepResult r = deo_step(*counting, theta, 1, deo, dimer, opt, adam_cfg,
                               sched, std::nullopt, 0);
    CHECK(r.record.dimer_refreshed == 1);
    CHECK(r.record.grad_evals == 2);
    CHECK(r.record.curv_paper.has_value());
  }

  SUBCASE("guards") {
    DimerState dimer = DimerState::init_random(3, deo.dimer, 42);
    OptState opt;
    opt.adam = AdamState::zeros(3);
    const Vec theta = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS((void)deo_step(*counting, theta, 0, deo, dimer, opt, adam_cfg,
                                   sched, std::nullopt, 0),
                    std::invalid_argument);
    deo.frequency = 0;
    CHECK_THROWS_AS((void)deo_step(*counting, theta, 1, deo, dimer, opt, adam_cfg,
                                   sched, std::nullopt, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("alpha zero makes the wrapper transparent") {
  const ProblemPtr p = make_rosenbrock(2);
  const AdamConfig adam_cfg;
  LrSchedule sched;
  sched.lr_max = 1e-3;
  sched.total_steps = 100;

  for (long f : {1L, 10L, kNeverRefresh}) {
    CAPTURE(f);
    DeoConfig deo;
    deo.frequency = f;
    deo.base = BaseOpt::kAdam;
    deo.dimer.alpha = 0.0;

    // Wrapped run.
    DimerState dimer = DimerState::init_random(2, deo.dimer, 42);
    OptState wrapped;
    wrapped.adam = AdamState::zeros(2);
    Vec theta_wrapped = random_unit_vector(2, RngSeed{5, "init"});

    // Bare run.
    OptState bare;
    bare.adam = AdamState::zeros(2);
    Vec theta_bare = theta_wrapped;

    for (long t = 1; t <= 100; ++t) {
      DeoStepResult r = deo_step(*p, theta_wrapped, t, deo, dimer, wrapped,
                                 adam_cfg, sched, std::nullopt, 0);
      theta_wrapped = std::move(r.theta);
      dimer = std::move(r.dimer);
      wrapped = std::move(r.opt);

      const Vec g = p->grad(theta_bare, std::nullopt);
      theta_bare = apply_base(BaseOpt::kAdam, theta_bare, g, sched.at(t), bare,
                              adam_cfg);

      CHECK(deo::test::bitwise_equal(theta_wrapped, theta_bare));
    }
  }
}

TEST_CASE("apply_base dispatches all three optimizers") {
  const AdamConfig cfg;
  OptState opt;
  opt.adam = AdamState::zeros(2);
  const Vec theta = {1.0, 1.0};
  const Vec g = {1.0, -1.0};

  const Vec s = apply_base(BaseOpt::kSgd, theta, g, 0.1, opt, cfg);
  CHECK(s[0] == doctest::Approx(0.9).epsilon(1e-15));

  const Vec a = apply_base(BaseOpt::kAdam, theta, g, 0.1, opt, cfg);
  CHECK(opt.adam.t == 1);
  CHECK(a[0] < theta[0]);

  opt.adam = AdamState::zeros(2);
  const Vec w = apply_base(BaseOpt::kAdamW, theta, g, 0.1, opt, cfg);
  CHECK(opt.adam.t == 1);
  CHECK(w[0] < a[0]);  // same step plus decay
}
