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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "amclab/adversary.hpp"
#include "amclab/dataset.hpp"
#include "amclab/ml_oracle.hpp"
#include "amclab/toy_classifier.hpp"

namespace amclab {

enum class Regime : std::uint8_t { kSt, kStLnr, kStMl, kAt, kAtLnr, kAtMl, kAtNml, kAtAml };

inline constexpr Regime kAllRegimes[] = {Regime::kSt,   Regime::kStLnr, Regime::kStMl,
                                         Regime::kAt,   Regime::kAtLnr, Regime::kAtMl,
                                         Regime::kAtNml, Regime::kAtAml};

std::string_view regime_name(Regime regime);  // "st", "st_lnr", ...
Regime parse_regime(std::string_view name);

enum class InputMode : std::uint8_t { kClean, kAdversarial };
enum class TargetMode : std::uint8_t {
  kOneHot,
  kMlClean,
  // ML label of r(x') at sigma2 + eps^2.
  kMlOnAdversarialInput,
  // ML label of r(g)' (PGD against the ML oracle) at sigma2 + eps^2.
  kMlOnAdversarialMlInput,
};
enum class LnrFilter : std::uint8_t { kNone, kClean, kAdversarial };

struct RegimeSpec {
  InputMode input = InputMode::kClean;
  TargetMode target = TargetMode::kOneHot;
  LnrFilter filter = LnrFilter::kNone;

  bool operator==(const RegimeSpec&) const = default;
};

RegimeSpec regime_spec(Regime regime);

struct TrainConfig {
  std::size_t epochs = 100;
  double lr = 0.01;
  double momentum = 0.9;
  double lr_decay_per_epoch = 0.95;
  double grad_clip = 5.0;
  double weight_decay = 5e-4;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // The input attack's eps grows linearly from 0 over this many epochs
  // (epoch e < W uses e / W of the full eps).
  std::size_t attack_warmup_epochs = 0;
};

void validate(const TrainConfig& config);
// Strict JSON object; unknown keys are a ConfigError.
TrainConfig parse_train_config(std::string_view json_text);
std::string describe(const TrainConfig& config);
double learning_rate(const TrainConfig& config, std::size_t epoch);
// SPR of the input attack during `epoch` under the eps warm-up.
double warmup_spr_db(const TrainConfig& config, double spr_db, std::size_t epoch);

// Attack settings used while building targets. `model` attacks the
// classifier input; `ml` attacks r(g) through the ML oracle (AT_AML).
struct TargetAttacks {
  AttackConfig model{20.0, 7, 2.5, true, 0};
  AttackConfig ml{20.0, 7, 2.5, true, 0};
};

struct TrainingExample {
  std::vector<cplx> input;
  SoftLabel target;
  // False when the adversarial label-noise filter drops the example.
  bool keep = true;
};

// Loss-gradient adapters for the attack routines.
LossGradFn model_loss_grad(const ToyModel& params);
LossGradFn ml_loss_grad(const SchemeSet& set, double sigma2);

// Input and target of one record under a regime. `seed` drives the attacks'
// random starts.
TrainingExample make_target(const DatasetRecord& record, Regime regime, const ToyModel& model,
                            const SchemeSet& set, const TargetAttacks& attacks, std::uint64_t seed);

// Clean label-noise filter D over a dataset (argmax y == argmax p_ML).
LnrMask clean_lnr_mask(const Dataset& dataset);
// Adversarial filter D' against a fixed model.
LnrMask adversarial_lnr_mask(const Dataset& dataset, const ToyModel& model,
                             const AttackConfig& attack, std::size_t workers = 1);

struct TrainingLogEntry {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  // Training-set accuracies over the epoch, in percent. robust_acc is NaN
  // for clean-input regimes.
  double clean_acc = 0.0;
  double robust_acc = 0.0;
  std::size_t examples = 0;
};

std::string to_json_line(const TrainingLogEntry& entry);

struct TrainResult {
  ToyModel params;
  std::vector<TrainingLogEntry> log;
};

TrainResult train(ToyModel params, const Dataset& dataset, Regime regime, const TrainConfig& config,
                  const TargetAttacks& attacks,
                  const std::function<void(const TrainingLogEntry&)>& on_epoch = {});

struct EvalReport {
  std::string label;
  std::size_t count = 0;
  double clean_accuracy = 0.0;
  double robust_accuracy = 0.0;
  // confusion[true][predicted] on clean inputs.
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<double> snr_db;
  std::vector<double> clean_by_snr;
  std::vector<double> robust_by_snr;
  std::vector<std::string> class_names;
  AttackConfig attack;
  std::uint64_t seed = 0;
};

// Scores argmax against the true scheme on clean inputs and under a per-
// sample PGD whose eps comes from each frame's own power.
EvalReport evaluate(const ToyModel& params, const Dataset& dataset, const AttackConfig& attack,
                    std::size_t workers = 1);

std::string to_json(const EvalReport& report);
EvalReport parse_eval_report(std::string_view json_text);

}  // namespace amclab
