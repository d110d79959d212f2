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

#include "amclab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <map>
#include <numeric>

#include "amclab/error.hpp"
#include "amclab/parallel.hpp"
#include "amclab/rng.hpp"

namespace amclab {
namespace {

constexpr std::uint64_t kShuffleSalt = 0x5348;
constexpr std::uint64_t kAttackSalt = 0x4154;
constexpr std::uint64_t kModelAttackSalt = 1;
constexpr std::uint64_t kMlAttackSalt = 2;

struct RegimeEntry {
  Regime regime;
  std::string_view name;
  RegimeSpec spec;
};

constexpr RegimeEntry kRegimes[] = {
    {Regime::kSt, "st", {InputMode::kClean, TargetMode::kOneHot, LnrFilter::kNone}},
    {Regime::kStLnr, "st_lnr", {InputMode::kClean, TargetMode::kOneHot, LnrFilter::kClean}},
    {Regime::kStMl, "st_ml", {InputMode::kClean, TargetMode::kMlClean, LnrFilter::kNone}},
    {Regime::kAt, "at", {InputMode::kAdversarial, TargetMode::kOneHot, LnrFilter::kNone}},
    {Regime::kAtLnr, "at_lnr", {InputMode::kAdversarial, TargetMode::kOneHot, LnrFilter::kAdversarial}},
    {Regime::kAtMl, "at_ml", {InputMode::kAdversarial, TargetMode::kMlOnAdversarialInput, LnrFilter::kNone}},
    {Regime::kAtNml, "at_nml", {InputMode::kAdversarial, TargetMode::kMlClean, LnrFilter::kNone}},
    {Regime::kAtAml, "at_aml", {InputMode::kAdversarial, TargetMode::kMlOnAdversarialMlInput, LnrFilter::kNone}},
};

const RegimeEntry& entry(Regime regime) {
  for (const auto& e : kRegimes) {
    if (e.regime == regime) return e;
  }
  throw ConfigError("unknown regime id " + std::to_string(static_cast<int>(regime)));
}

// eps of the input attack expressed in the domain of r(x / gain).
double symbol_domain_eps(const RecordMeta& meta, double eps) {
  const FilterTaps taps = receive_filter(meta);
  return eps * std::sqrt(matched_filter_noise_gain(taps, taps.sps)) / std::abs(meta.gain);
}

SoftLabel ml_label_of_perturbed_input(const DatasetRecord& record, std::span<const cplx> input,
                                      double eps, const SchemeSet& set) {
  const auto z = receive_symbols(record.meta, input);
  const auto noise = AdvNoiseSpec::make(label_sigma2(record.meta), symbol_domain_eps(record.meta, eps));
  return soft_label_adversarial(z, set, noise);
}

double percent(std::size_t hit, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hit) / static_cast<double>(total);
}

nlohmann::json spr_json(double spr) {
  if (std::isinf(spr) && spr > 0) return nullptr;
  return spr;
}

}  // namespace

std::string_view regime_name(Regime regime) { return entry(regime).name; }

Regime parse_regime(std::string_view name) {
  for (const auto& e : kRegimes) {
    if (e.name == name) return e.regime;
  }
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

RegimeSpec regime_spec(Regime regime) { return entry(regime).spec; }

void validate(const TrainConfig& c) {
  if (c.epochs == 0) throw ConfigError("train config: epochs must be >= 1");
  if (!(c.lr > 0.0)) throw ConfigError("train config: lr must be > 0");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw ConfigError("train config: momentum must be in [0, 1)");
  if (!(c.lr_decay_per_epoch > 0.0)) throw ConfigError("train config: lr_decay_per_epoch must be > 0");
  if (!(c.grad_clip > 0.0)) throw ConfigError("train config: grad_clip must be > 0");
  if (!(c.weight_decay >= 0.0)) throw ConfigError("train config: weight_decay must be >= 0");
  if (c.batch_size == 0) throw ConfigError("train config: batch_size must be >= 1");
  if (c.workers == 0) throw ConfigError("train config: workers must be >= 1");
}

TrainConfig parse_train_config(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("train config: expected a JSON object");
  TrainConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "lr") c.lr = value.get<double>();
      else if (key == "momentum") c.momentum = value.get<double>();
      else if (key == "lr_decay_per_epoch") c.lr_decay_per_epoch = value.get<double>();
      else if (key == "grad_clip") c.grad_clip = value.get<double>();
      else if (key == "weight_decay") c.weight_decay = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "workers") c.workers = value.get<std::size_t>();
      else if (key == "attack_warmup_epochs") c.attack_warmup_epochs = value.get<std::size_t>();
      else throw ConfigError("train config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  validate(c);
  return c;
}

std::string describe(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["epochs"] = c.epochs;
  j["lr"] = c.lr;
  j["momentum"] = c.momentum;
  j["lr_decay_per_epoch"] = c.lr_decay_per_epoch;
  j["grad_clip"] = c.grad_clip;
  j["weight_decay"] = c.weight_decay;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["attack_warmup_epochs"] = c.attack_warmup_epochs;
  return j.dump();
}

double learning_rate(const TrainConfig& c, std::size_t epoch) {
  return c.lr * std::pow(c.lr_decay_per_epoch, static_cast<double>(epoch));
}

double warmup_spr_db(const TrainConfig& c, double spr_db, std::size_t epoch) {
  if (epoch >= c.attack_warmup_epochs) return spr_db;
  if (epoch == 0) return std::numeric_limits<double>::infinity();
  const double fraction = static_cast<double>(epoch) / static_cast<double>(c.attack_warmup_epochs);
  return spr_db - 20.0 * std::log10(fraction);
}

LossGradFn model_loss_grad(const ToyModel& params) {
  return [&params](std::span<const cplx> x, const SoftLabel& target, std::span<cplx> grad) {
    auto r = backward(params, x, target, grad.empty() ? 0u : kInputGrad);
    if (!grad.empty()) std::copy(r.input_grad.begin(), r.input_grad.end(), grad.begin());
    return r.loss;
  };
}

LossGradFn ml_loss_grad(const SchemeSet& set, double sigma2) {
  return [&set, sigma2](std::span<const cplx> z, const SoftLabel& target, std::span<cplx> grad) {
    auto r = grad_symbol_ce(z, target, set, sigma2);
    if (!grad.empty()) std::copy(r.grad.begin(), r.grad.end(), grad.begin());
    return r.loss;
  };
}

TrainingExample make_target(const DatasetRecord& record, Regime regime, const ToyModel& model,
                            const SchemeSet& set, const TargetAttacks& attacks, std::uint64_t seed) {
  const RegimeSpec spec = regime_spec(regime);
  const RecordMeta& meta = record.meta;
  if (meta.class_index >= set.size() || set.scheme(meta.class_index) != meta.scheme) {
    throw StateError("make_target: record class does not match the scheme set");
  }
  const bool ml_ok = set.ml_applicable(meta.class_index);
  if (ml_ok && spec.target == TargetMode::kMlClean && !record.ml_clean) {
    throw StateError("make_target: regime " + std::string(regime_name(regime)) +
                     " needs a clean ML label but the record has none");
  }
  const SoftLabel y = one_hot(meta.class_index, set.size());
  const auto& frame = record.frame.samples;

  TrainingExample ex;
  double input_eps = 0.0;
  if (spec.input == InputMode::kClean) {
    ex.input = frame;
  } else {
    AttackConfig a = attacks.model;
    a.seed = derive_seed(seed, 0, kModelAttackSalt);
    auto adv = pgd(model_loss_grad(model), frame, y, a);
    ex.input = std::move(adv.perturbed);
    input_eps = adv.eps;
  }

  if (!ml_ok) {
    ex.target = y;
    return ex;
  }

  switch (spec.target) {
    case TargetMode::kOneHot:
      ex.target = y;
      break;
    case TargetMode::kMlClean:
      ex.target = as_stored_precision(*record.ml_clean);
      break;
    case TargetMode::kMlOnAdversarialInput:
      ex.target = as_stored_precision(ml_label_of_perturbed_input(record, ex.input, input_eps, set));
      break;
    case TargetMode::kMlOnAdversarialMlInput: {
      const auto z = receive_symbols(meta, frame);
      const double sigma2 = label_sigma2(meta);
      AttackConfig a = attacks.ml;
      a.seed = derive_seed(seed, 0, kMlAttackSalt);
      const auto adv = pgd(ml_loss_grad(set, sigma2), z, y, a);
      ex.target = as_stored_precision(
          soft_label_adversarial(adv.perturbed, set, AdvNoiseSpec::make(sigma2, adv.eps)));
      break;
    }
  }
  if (spec.filter == LnrFilter::kAdversarial) {
    ex.keep = ml_label_of_perturbed_input(record, ex.input, input_eps, set).argmax() == meta.class_index;
  }
  return ex;
}

LnrMask clean_lnr_mask(const Dataset& dataset) {
  const SchemeSet set(dataset.schemes);
  std::vector<LnrEntry> entries;
  entries.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    entries.push_back({r.meta.class_index, set.ml_applicable(r.meta.class_index),
                       r.ml_clean ? &*r.ml_clean : nullptr});
  }
  return lnr_mask(entries, LnrMode::kClean);
}

LnrMask adversarial_lnr_mask(const Dataset& dataset, const ToyModel& model,
                             const AttackConfig& attack, std::size_t workers) {
  const SchemeSet set(dataset.schemes);
  std::vector<std::optional<SoftLabel>> labels(dataset.records.size());
  parallel_for(dataset.records.size(), workers, [&](std::size_t i) {
    const auto& r = dataset.records[i];
    if (!set.ml_applicable(r.meta.class_index)) return;
    AttackConfig a = attack;
    a.seed = derive_seed(attack.seed, i, kAttackSalt);
    const auto adv = pgd(model_loss_grad(model), r.frame.samples, r.onehot, a);
    labels[i] = ml_label_of_perturbed_input(r, adv.perturbed, adv.eps, set);
  });
  std::vector<LnrEntry> entries;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    entries.push_back({r.meta.class_index, set.ml_applicable(r.meta.class_index),
                       labels[i] ? &*labels[i] : nullptr});
  }
  return lnr_mask(entries, LnrMode::kAdversarial);
}

std::string to_json_line(const TrainingLogEntry& e) {
  nlohmann::ordered_json j;
  j["epoch"] = e.epoch;
  j["lr"] = e.lr;
  j["loss"] = e.loss;
  j["clean_acc"] = e.clean_acc;
  if (std::isnan(e.robust_acc)) {
    j["robust_acc"] = nullptr;
  } else {
    j["robust_acc"] = e.robust_acc;
  }
  j["examples"] = e.examples;
  return j.dump();
}

TrainResult train(ToyModel params, const Dataset& dataset, Regime regime, const TrainConfig& config,
                  const TargetAttacks& attacks,
                  const std::function<void(const TrainingLogEntry&)>& on_epoch) {
  validate(config);
  validate(attacks.model);
  validate(attacks.ml);
  const SchemeSet set(dataset.schemes);
  if (params.num_classes != set.size() || params.frame_length != dataset.frame_length) {
    throw ParameterError("train: model shape does not match the dataset");
  }
  const RegimeSpec spec = regime_spec(regime);

  std::vector<std::size_t> pool;
  if (spec.filter == LnrFilter::kClean) {
    const LnrMask mask = clean_lnr_mask(dataset);
    for (std::size_t i = 0; i < mask.keep.size(); ++i) {
      if (mask.keep[i]) pool.push_back(i);
    }
  } else {
    pool.resize(dataset.records.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }
  if (pool.empty()) throw DataError("train: no training records left after label-noise filtering");

  struct Slot {
    std::vector<float> grad;
    double loss = 0.0;
    bool keep = false;
    bool clean_hit = false;
    bool robust_hit = false;
  };

  const std::size_t n_params = params.values.size();
  std::vector<double> velocity(n_params, 0.0);
  std::vector<double> step(n_params);
  std::vector<Slot> slots(config.batch_size);
  const bool adversarial = spec.input == InputMode::kAdversarial;

  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate(config, epoch);
    TargetAttacks epoch_attacks = attacks;
    epoch_attacks.model.spr_db = warmup_spr_db(config, attacks.model.spr_db, epoch);
    std::vector<std::size_t> order = pool;
    Rng shuffle_rng(derive_seed(config.seed, epoch, kShuffleSalt));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t clean_hits = 0;
    std::size_t robust_hits = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - begin);
      parallel_for(n, config.workers, [&](std::size_t i) {
        const std::size_t idx = order[begin + i];
        const DatasetRecord& rec = dataset.records[idx];
        Slot& slot = slots[i];
        const std::uint64_t seed =
            derive_seed(config.seed, epoch * dataset.records.size() + idx, kAttackSalt);
        TrainingExample ex = make_target(rec, regime, params, set, epoch_attacks, seed);
        slot.keep = ex.keep;
        if (!ex.keep) return;
        auto r = backward(params, ex.input, ex.target, kParamGrads);
        slot.grad = std::move(r.param_grads);
        slot.loss = r.loss;
        const bool hit = std::max_element(r.probs.begin(), r.probs.end()) - r.probs.begin() ==
                         static_cast<std::ptrdiff_t>(rec.meta.class_index);
        if (adversarial) {
          slot.robust_hit = hit;
          const auto clean = forward(params, rec.frame.samples);
          slot.clean_hit = std::max_element(clean.probs.begin(), clean.probs.end()) - clean.probs.begin() ==
                           static_cast<std::ptrdiff_t>(rec.meta.class_index);
        } else {
          slot.clean_hit = hit;
        }
      });

      std::fill(step.begin(), step.end(), 0.0);
      std::size_t kept = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Slot& slot = slots[i];
        if (!slot.keep) continue;
        ++kept;
        for (std::size_t p = 0; p < n_params; ++p) step[p] += static_cast<double>(slot.grad[p]);
        loss_sum += slot.loss;
        clean_hits += slot.clean_hit ? 1 : 0;
        robust_hits += slot.robust_hit ? 1 : 0;
      }
      seen += kept;
      if (kept == 0) continue;

      double norm2 = 0.0;
      for (double& g : step) {
        g /= static_cast<double>(kept);
        norm2 += g * g;
      }
      const double norm = std::sqrt(norm2);
      const double clip = norm > config.grad_clip ? config.grad_clip / norm : 1.0;
      for (std::size_t p = 0; p < n_params; ++p) {
        const double w = static_cast<double>(params.values[p]);
        const double g = step[p] * clip + config.weight_decay * w;
        velocity[p] = config.momentum * velocity[p] + g;
        params.values[p] = static_cast<float>(w - lr * velocity[p]);
      }
    }

    TrainingLogEntry e;
    e.epoch = epoch;
    e.lr = lr;
    e.loss = seen == 0 ? 0.0 : loss_sum / static_cast<double>(seen);
    e.clean_acc = percent(clean_hits, seen);
    e.robust_acc = adversarial ? percent(robust_hits, seen) : std::numeric_limits<double>::quiet_NaN();
    e.examples = seen;
    result.log.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  result.params = std::move(params);
  return result;
}

EvalReport evaluate(const ToyModel& params, const Dataset& dataset, const AttackConfig& attack,
                    std::size_t workers) {
  validate(attack);
  const SchemeSet set(dataset.schemes);
  if (params.num_classes != set.size() || params.frame_length != dataset.frame_length) {
    throw ParameterError("evaluate: model shape does not match the dataset");
  }
  const std::size_t n = dataset.records.size();
  std::vector<std::size_t> clean_pred(n);
  std::vector<std::size_t> robust_pred(n);
  const LossGradFn loss_grad = model_loss_grad(params);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto& r = dataset.records[i];
    const auto clean = forward(params, r.frame.samples);
    clean_pred[i] = static_cast<std::size_t>(
        std::max_element(clean.probs.begin(), clean.probs.end()) - clean.probs.begin());
    AttackConfig a = attack;
    a.seed = derive_seed(attack.seed, i, kAttackSalt);
    const SoftLabel y = one_hot(r.meta.class_index, set.size());
    const auto adv = pgd(loss_grad, r.frame.samples, y, a);
    if (adv.eps == 0.0) {
      robust_pred[i] = clean_pred[i];
      return;
    }
    const auto robust = forward(params, adv.perturbed);
    robust_pred[i] = static_cast<std::size_t>(
        std::max_element(robust.probs.begin(), robust.probs.end()) - robust.probs.begin());
  });

  EvalReport rep;
  rep.count = n;
  rep.attack = attack;
  rep.seed = attack.seed;
  for (Scheme s : dataset.schemes) rep.class_names.emplace_back(scheme_name(s));
  rep.confusion.assign(set.size(), std::vector<std::size_t>(set.size(), 0));
  std::map<double, std::array<std::size_t, 3>> by_snr;
  std::size_t clean_hits = 0;
  std::size_t robust_hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = dataset.records[i].meta;
    const bool ch = clean_pred[i] == m.class_index;
    const bool rh = robust_pred[i] == m.class_index;
    clean_hits += ch;
    robust_hits += rh;
    rep.confusion[m.class_index][clean_pred[i]] += 1;
    auto& slot = by_snr[m.snr_db];
    slot[0] += ch;
    slot[1] += rh;
    slot[2] += 1;
  }
  rep.clean_accuracy = percent(clean_hits, n);
  rep.robust_accuracy = percent(robust_hits, n);
  for (const auto& [snr, c] : by_snr) {
    rep.snr_db.push_back(snr);
    rep.clean_by_snr.push_back(percent(c[0], c[2]));
    rep.robust_by_snr.push_back(percent(c[1], c[2]));
  }
  return rep;
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["count"] = r.count;
  j["clean_accuracy"] = r.clean_accuracy;
  j["robust_accuracy"] = r.robust_accuracy;
  j["attack"] = {{"spr_db", spr_json(r.attack.spr_db)},
                 {"steps", r.attack.steps},
                 {"step_size_fraction", r.attack.step_size_fraction},
                 {"random_start", r.attack.random_start},
                 {"seed", r.attack.seed}};
  j["classes"] = r.class_names;
  j["confusion"] = r.confusion;
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.snr_db.size(); ++i) {
    curve.push_back({{"snr_db", r.snr_db[i]}, {"clean", r.clean_by_snr[i]}, {"robust", r.robust_by_snr[i]}});
  }
  j["per_snr"] = curve;
  return j.dump(2);
}

EvalReport parse_eval_report(std::string_view json_text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(json_text);
    r.label = j.at("label").get<std::string>();
    r.count = j.at("count").get<std::size_t>();
    r.clean_accuracy = j.at("clean_accuracy").get<double>();
    r.robust_accuracy = j.at("robust_accuracy").get<double>();
    const auto& a = j.at("attack");
    r.attack.spr_db = a.at("spr_db").is_null() ? std::numeric_limits<double>::infinity()
                                               : a.at("spr_db").get<double>();
    r.attack.steps = a.at("steps").get<int>();
    r.attack.step_size_fraction = a.at("step_size_fraction").get<double>();
    r.attack.random_start = a.at("random_start").get<bool>();
    r.attack.seed = a.at("seed").get<std::uint64_t>();
    r.seed = r.attack.seed;
    r.class_names = j.at("classes").get<std::vector<std::string>>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& p : j.at("per_snr")) {
      r.snr_db.push_back(p.at("snr_db").get<double>());
      r.clean_by_snr.push_back(p.at("clean").get<double>());
      r.robust_by_snr.push_back(p.at("robust").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("eval report: ") + e.what());
  }
  return r;
}

}  // namespace amclab
