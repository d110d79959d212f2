/*
 * Copyright 2026 The amclab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "amclab/adversary.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "amclab/error.hpp"
#include "amclab/rng.hpp"

namespace amclab {
namespace {

// Softmax-linear classifier: logit_k = Re(sum_n conj(w_kn) x_n).
struct LinearModel {
  std::vector<std::vector<cplx>> w;

  LossGradFn fn() const {
    return [this](std::span<const cplx> x, const SoftLabel& target, std::span<cplx> grad) {
      std::vector<double> logits(w.size());
      for (std::size_t k = 0; k < w.size(); ++k) {
        double acc = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) acc += (std::conj(w[k][n]) * x[n]).real();
        logits[k] = acc;
      }
      const double peak = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double l : logits) z += std::exp(l - peak);
      double loss = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double logp = logits[k] - peak - std::log(z);
        loss -= target.probs[k] * logp;
        if (!grad.empty()) {
          const double d = std::exp(logp) - target.probs[k];
          for (std::size_t n = 0; n < x.size(); ++n) grad[n] += d * w[k][n];
        }
      }
      return loss;
    };
  }
};

LinearModel random_model(std::size_t classes, std::size_t n, Rng& rng) {
  std::normal_distribution<double> g;
  LinearModel m;
  m.w.assign(classes, std::vector<cplx>(n));
  for (auto& row : m.w)
    for (auto& v : row) v = {g(rng), g(rng)};
  return m;
}

std::vector<cplx> random_frame(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  std::vector<cplx> x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  return x;
}

void expect_in_box(const AdversarialResult& r, std::span<const cplx> x) {
  ASSERT_EQ(x.size(), r.perturbed.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_LE(std::abs(r.delta[i].real()), r.eps);
    EXPECT_LE(std::abs(r.delta[i].imag()), r.eps);
    EXPECT_EQ(x[i] + r.delta[i], r.perturbed[i]);
  }
}

TEST(SprTest, KnownValues) {
  EXPECT_NEAR(0.07071, spr_to_eps(20.0, 0.5), 1e-5);
  EXPECT_NEAR(0.7071, spr_to_eps(0.0, 0.5), 1e-4);
  EXPECT_EQ(0.0, spr_to_eps(std::numeric_limits<double>::infinity(), 0.5));
  EXPECT_THROW(spr_to_eps(20.0, 0.0), ParameterError);
  EXPECT_THROW(spr_to_eps(20.0, -1.0), ParameterError);
}

TEST(SprTest, ComponentPower) {
  const std::vector<cplx> x = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
  EXPECT_DOUBLE_EQ(0.5, mean_power_per_component(x));
}

TEST(FgsmTest, ZeroEpsIsIdentity) {
  Rng rng(1);
  const auto m = random_model(4, 32, rng);
  const auto x = random_frame(32, rng);
  const auto r = fgsm(m.fn(), x, one_hot(1, 4), 0.0);
  EXPECT_EQ(x, r.perturbed);
  EXPECT_EQ(r.loss_before, r.loss_after);
}

TEST(FgsmTest, SaturatesBoxAndRaisesLoss) {
  Rng rng(2);
  const auto m = random_model(4, 32, rng);
  const auto x = random_frame(32, rng);
  const auto r = fgsm(m.fn(), x, one_hot(2, 4), 0.05);
  expect_in_box(r, x);
  for (const auto& d : r.delta) {
    EXPECT_EQ(0.05, std::abs(d.real()));
    EXPECT_EQ(0.05, std::abs(d.imag()));
  }
  EXPECT_GT(r.loss_after, r.loss_before);
}

TEST(FgsmTest, InterfaceErrors) {
  const std::vector<cplx> x(4);
  EXPECT_THROW(fgsm(LossGradFn{}, x, one_hot(0, 2), 0.1), InterfaceError);
  LossGradFn nan_fn = [](std::span<const cplx>, const SoftLabel&, std::span<cplx>) { return std::nan(""); };
  EXPECT_THROW(fgsm(nan_fn, x, one_hot(0, 2), 0.1), InterfaceError);
  LossGradFn ok = [](std::span<const cplx>, const SoftLabel&, std::span<cplx>) { return 0.0; };
  EXPECT_THROW(fgsm(ok, x, one_hot(0, 2), -0.1), ParameterError);
}

TEST(PgdTest, ZeroEpsIsIdentity) {
  Rng rng(3);
  const auto m = random_model(3, 16, rng);
  const auto x = random_frame(16, rng);
  AttackConfig c;
  c.random_start = true;
  const auto r = pgd(m.fn(), x, one_hot(0, 3), c, 0.0);
  EXPECT_EQ(x, r.perturbed);
  c.spr_db = std::numeric_limits<double>::infinity();
  EXPECT_EQ(x, pgd(m.fn(), x, one_hot(0, 3), c).perturbed);
}

TEST(PgdTest, SingleFullStepEqualsFgsm) {
  Rng rng(4);
  const auto m = random_model(5, 24, rng);
  const auto x = random_frame(24, rng);
  AttackConfig c;
  c.steps = 1;
  c.step_size_fraction = 1.5;
  const auto p = pgd(m.fn(), x, one_hot(3, 5), c, 0.02);
  const auto f = fgsm(m.fn(), x, one_hot(3, 5), 0.02);
  EXPECT_EQ(f.perturbed, p.perturbed);
  EXPECT_EQ(f.loss_after, p.loss_after);
}

TEST(PgdTest, StaysInBoxAndNeverLowersLoss) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_model(4, 32, rng);
    const auto x = random_frame(32, rng);
    AttackConfig c;
    c.steps = 1 + trial % 10;
    c.step_size_fraction = 0.5 + 0.25 * (trial % 7);
    c.random_start = trial % 2 == 1;
    c.seed = static_cast<std::uint64_t>(trial);
    c.spr_db = 5.0 + trial % 20;
    const auto r = pgd(m.fn(), x, one_hot(static_cast<std::size_t>(trial % 4), 4), c);
    EXPECT_DOUBLE_EQ(spr_to_eps(c.spr_db, mean_power_per_component(x)), r.eps);
    expect_in_box(r, x);
    if (!c.random_start) EXPECT_GE(r.loss_after, r.loss_before);
  }
}

TEST(PgdTest, MeasuredSprRespectsFloor) {
  Rng rng(6);
  const auto m = random_model(4, 64, rng);
  const auto x = random_frame(64, rng);
  for (double spr : {0.0, 10.0, 20.0, 30.0}) {
    AttackConfig c;
    c.spr_db = spr;
    c.random_start = true;
    const auto r = pgd(m.fn(), x, one_hot(1, 4), c);
    const double measured = 10.0 * std::log10(mean_power(x) / mean_power(r.delta));
    EXPECT_GE(measured, spr - 3.02);
    EXPECT_GE(measured, spr - 1e-9);
  }
}

TEST(PgdTest, SeededRandomStartIsDeterministic) {
  Rng rng(7);
  const auto m = random_model(4, 32, rng);
  const auto x = random_frame(32, rng);
  AttackConfig c;
  // Short, small steps so the random start is not washed out at the corners.
  c.steps = 1;
  c.step_size_fraction = 0.5;
  c.random_start = true;
  c.seed = 99;
  const auto a = pgd(m.fn(), x, one_hot(0, 4), c);
  const auto b = pgd(m.fn(), x, one_hot(0, 4), c);
  EXPECT_EQ(a.perturbed, b.perturbed);
  c.seed = 100;
  EXPECT_NE(a.perturbed, pgd(m.fn(), x, one_hot(0, 4), c).perturbed);
}

TEST(PgdTest, FinalStepAsksForLossOnly) {
  Rng rng(8);
  const auto m = random_model(3, 16, rng);
  const auto x = random_frame(16, rng);
  int with_grad = 0, loss_only = 0;
  const LossGradFn inner = m.fn();
  LossGradFn counting = [&](std::span<const cplx> v, const SoftLabel& t, std::span<cplx> g) {
    (g.empty() ? loss_only : with_grad) += 1;
    return inner(v, t, g);
  };
  AttackConfig c;
  c.steps = 7;
  pgd(counting, x, one_hot(0, 3), c, 0.05);
  EXPECT_EQ(7, with_grad);
  EXPECT_EQ(1, loss_only);
}

TEST(PgdTest, ConfigValidation) {
  AttackConfig c;
  c.steps = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c.steps = 7;
  c.step_size_fraction = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
  c.step_size_fraction = 2.5;
  c.spr_db = std::nan("");
  EXPECT_THROW(validate(c), ConfigError);
}

}  // namespace
}  // namespace amclab
