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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "amclab/ml_oracle.hpp"
#include "amclab/modem.hpp"

namespace amclab {

// Loss-gradient interface of an attacked classifier. Returns CE(f(x), target)
// and writes dCE/dRe(x_n) + i dCE/dIm(x_n) into grad. An empty grad span
// asks for the loss only. Must be safe to call concurrently.
using LossGradFn =
    std::function<double(std::span<const cplx> x, const SoftLabel& target, std::span<cplx> grad)>;

struct AttackConfig {
  double spr_db = 20.0;
  int steps = 7;
  // Per-step move is step_size_fraction * eps / steps.
  double step_size_fraction = 2.5;
  bool random_start = false;
  std::uint64_t seed = 0;
};

void validate(const AttackConfig& config);

struct AdversarialResult {
  std::vector<cplx> perturbed;
  std::vector<cplx> delta;
  double eps = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;
};

// Mean power per real component, i.e. mean |x|^2 / 2.
double mean_power_per_component(std::span<const cplx> x);

// Per-real-component L-inf radius for a signal-to-perturbation ratio:
// eps = sqrt(P * 10^(-spr_db / 10)). spr_db = +inf gives 0.
double spr_to_eps(double spr_db, double mean_power_per_real_component);

// Single signed-gradient step of size eps on every real component.
AdversarialResult fgsm(const LossGradFn& loss_grad, std::span<const cplx> x,
                       const SoftLabel& target, double eps);

// Projected signed-gradient ascent in the eps box around x. Returns the
// iterate with the highest loss seen, the starting point included.
AdversarialResult pgd(const LossGradFn& loss_grad, std::span<const cplx> x, const SoftLabel& target,
                      const AttackConfig& config, double eps);

// Same, with eps derived from x's own power and config.spr_db.
AdversarialResult pgd(const LossGradFn& loss_grad, std::span<const cplx> x, const SoftLabel& target,
                      const AttackConfig& config);

}  // namespace amclab
