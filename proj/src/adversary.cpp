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

#include <algorithm>
#include <cmath>
#include <string>

#include "amclab/error.hpp"
#include "amclab/rng.hpp"

namespace amclab {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double evaluate(const LossGradFn& loss_grad, std::span<const cplx> x, const SoftLabel& target,
                std::vector<cplx>& grad, bool need_grad = true) {
  if (!loss_grad) throw InterfaceError("attack: no loss-gradient function");
  grad.assign(need_grad ? x.size() : 0, cplx(0.0, 0.0));
  const double loss = loss_grad(x, target, grad);
  if (std::isnan(loss)) throw InterfaceError("attack: loss-gradient function returned NaN");
  return loss;
}

void check_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParameterError("attack: eps must be finite and >= 0");
}

}  // namespace

void validate(const AttackConfig& config) {
  if (config.steps < 1) throw ConfigError("attack: steps must be >= 1");
  if (!(config.step_size_fraction > 0.0)) throw ConfigError("attack: step_size_fraction must be > 0");
  if (std::isnan(config.spr_db)) throw ConfigError("attack: SPR is NaN");
}

double mean_power_per_component(std::span<const cplx> x) { return mean_power(x) / 2.0; }

double spr_to_eps(double spr_db, double mean_power_per_real_component) {
  if (!(mean_power_per_real_component > 0.0)) throw ParameterError("spr_to_eps: signal power must be > 0");
  if (std::isnan(spr_db)) throw ParameterError("spr_to_eps: SPR is NaN");
  if (std::isinf(spr_db) && spr_db > 0) return 0.0;
  return std::sqrt(mean_power_per_real_component * std::pow(10.0, -spr_db / 10.0));
}

AdversarialResult fgsm(const LossGradFn& loss_grad, std::span<const cplx> x,
                       const SoftLabel& target, double eps) {
  check_eps(eps);
  std::vector<cplx> grad;
  AdversarialResult r;
  r.eps = eps;
  r.loss_before = evaluate(loss_grad, x, target, grad);
  r.delta.resize(x.size());
  r.perturbed.resize(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    r.delta[n] = cplx(eps * sign(grad[n].real()), eps * sign(grad[n].imag()));
    r.perturbed[n] = x[n] + r.delta[n];
  }
  r.loss_after = eps == 0.0 ? r.loss_before : evaluate(loss_grad, r.perturbed, target, grad, false);
  return r;
}

AdversarialResult pgd(const LossGradFn& loss_grad, std::span<const cplx> x, const SoftLabel& target,
                      const AttackConfig& config, double eps) {
  validate(config);
  check_eps(eps);
  const std::size_t n = x.size();
  std::vector<cplx> grad;
  AdversarialResult best;
  best.eps = eps;
  best.delta.assign(n, cplx(0.0, 0.0));
  best.perturbed.assign(x.begin(), x.end());
  best.loss_before = evaluate(loss_grad, x, target, grad, !config.random_start);
  best.loss_after = best.loss_before;
  if (eps == 0.0) return best;

  std::vector<cplx> delta(n, cplx(0.0, 0.0));
  std::vector<cplx> current(x.begin(), x.end());
  double loss = best.loss_before;
  if (config.random_start) {
    Rng rng(config.seed);
    std::uniform_real_distribution<double> box(-eps, eps);
    for (std::size_t i = 0; i < n; ++i) {
      const double re = box(rng);
      const double im = box(rng);
      delta[i] = cplx(re, im);
      current[i] = x[i] + delta[i];
    }
    loss = evaluate(loss_grad, current, target, grad);
    // The clean input is not a candidate when starting at random.
    best.loss_after = loss;
    best.delta = delta;
    best.perturbed = current;
  }

  const double step = config.step_size_fraction * eps / static_cast<double>(config.steps);
  for (int s = 0; s < config.steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double re = std::clamp(delta[i].real() + step * sign(grad[i].real()), -eps, eps);
      const double im = std::clamp(delta[i].imag() + step * sign(grad[i].imag()), -eps, eps);
      delta[i] = cplx(re, im);
      current[i] = x[i] + delta[i];
    }
    loss = evaluate(loss_grad, current, target, grad, s + 1 < config.steps);
    if (loss > best.loss_after) {
      best.loss_after = loss;
      best.delta = delta;
      best.perturbed = current;
    }
  }
  return best;
}

AdversarialResult pgd(const LossGradFn& loss_grad, std::span<const cplx> x, const SoftLabel& target,
                      const AttackConfig& config) {
  if (std::isinf(config.spr_db) && config.spr_db > 0) return pgd(loss_grad, x, target, config, 0.0);
  return pgd(loss_grad, x, target, config, spr_to_eps(config.spr_db, mean_power_per_component(x)));
}

}  // namespace amclab
