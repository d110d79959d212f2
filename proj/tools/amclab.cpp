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

// amclab command-line front end: dataset generation, labeling, label-noise
// filtering, attacks, training, evaluation and report tables.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "amclab/adversary.hpp"
#include "amclab/binary_io.hpp"
#include "amclab/dataset.hpp"
#include "amclab/error.hpp"
#include "amclab/parallel.hpp"
#include "amclab/rng.hpp"
#include "amclab/toy_classifier.hpp"
#include "amclab/trainer.hpp"

namespace amclab {
namespace {

using ojson = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double parse_spr(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || std::isnan(v)) throw ConfigError("bad SPR value '" + text + "'");
  return v;
}

ojson spr_field(double spr) {
  if (std::isinf(spr)) return "inf";
  return spr;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw DataError("cannot write '" + path + "'");
}

void print_config(const std::string& command, const ojson& config) {
  ojson j;
  j["command"] = command;
  j["config"] = config;
  std::cout << "config: " << j.dump() << "\n";
}

std::uint64_t write_dataset(const std::string& path, const Dataset& d) {
  const auto bytes = encode_dataset(d);
  io::write_file(path, bytes);
  return io::fnv1a64(bytes);
}

// Options shared by the subcommands.
struct Options {
  std::string scenario = "s1";
  std::size_t frames = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string in;
  std::string out;
  std::string manifest;
  std::string mode;
  std::string model;
  std::string spr = "20";
  std::string adv_eps_spr;
  int steps = 7;
  double step_fraction = 2.5;
  bool random_start = false;
  std::string regime;
  std::string config;
  std::string log;
  std::string report;
  std::string label;
  std::vector<std::string> inputs;
  bool table = false;
  std::string train_spr = "20";
  std::string ml_spr = "20";
};

AttackConfig attack_from(const Options& o, double spr) {
  AttackConfig a;
  a.spr_db = spr;
  a.steps = o.steps;
  a.step_size_fraction = o.step_fraction;
  a.random_start = o.random_start;
  a.seed = o.seed;
  validate(a);
  return a;
}

ojson attack_json(const AttackConfig& a) {
  return {{"spr_db", spr_field(a.spr_db)},
          {"steps", a.steps},
          {"step_size_fraction", a.step_size_fraction},
          {"random_start", a.random_start},
          {"seed", a.seed}};
}

int run_generate(const Options& o) {
  ScenarioConfig s = scenario_preset(o.scenario);
  s.frames_per_combo = o.frames;
  s.master_seed = o.seed;
  validate(s);
  const std::string manifest_path = o.manifest.empty() ? o.out + ".json" : o.manifest;
  print_config("generate", {{"scenario", ojson::parse(describe(s))},
                            {"workers", o.workers},
                            {"out", o.out},
                            {"manifest", manifest_path}});
  const Dataset d = generate_dataset(s, o.workers);
  const std::uint64_t checksum = write_dataset(o.out, d);
  write_text(manifest_path, manifest_json(s, d, checksum) + "\n");
  std::cout << "records: " << d.records.size() << "\n";
  std::cout << "scenario_hash: " << hex64(scenario_hash(s)) << "\n";
  std::cout << "checksum fnv1a64: " << hex64(checksum) << "\n";
  return 0;
}

int run_label(const Options& o) {
  const Normalization mode = parse_normalization(o.mode);
  const bool adversarial = !o.adv_eps_spr.empty();
  const double adv_spr = adversarial ? parse_spr(o.adv_eps_spr) : std::numeric_limits<double>::infinity();
  const std::string out = o.out.empty() ? o.in : o.out;
  print_config("label", {{"in", o.in},
                         {"out", out},
                         {"mode", o.mode},
                         {"adv_eps_spr_db", adversarial ? spr_field(adv_spr) : ojson(nullptr)},
                         {"workers", o.workers}});
  Dataset d = read_records(o.in);
  const SchemeSet set(d.schemes);
  std::vector<char> fell_back(d.records.size(), 0);
  parallel_for(d.records.size(), o.workers, [&](std::size_t i) {
    DatasetRecord& r = d.records[i];
    if (!set.ml_applicable(r.meta.class_index)) {
      r.ml_clean.reset();
      return;
    }
    const auto z = receive_symbols(r.meta, r.frame.samples);
    const double sigma2 = label_sigma2(r.meta);
    const double eps = adversarial ? spr_to_eps(adv_spr, mean_power_per_component(z)) : 0.0;
    try {
      r.ml_clean = soft_label_adversarial(z, set, AdvNoiseSpec::make(sigma2, eps), mode);
    } catch (const DegenerateInputError&) {
      r.ml_clean = r.onehot;
      fell_back[i] = 1;
    }
  });
  const std::size_t fallbacks = std::count(fell_back.begin(), fell_back.end(), 1);
  const std::uint64_t checksum = write_dataset(out, d);
  std::cout << "relabeled: " << d.records.size() << "\n";
  std::cout << "onehot_fallbacks: " << fallbacks << "\n";
  std::cout << "checksum fnv1a64: " << hex64(checksum) << "\n";
  return 0;
}

int run_filter(const Options& o) {
  if (o.mode != "d" && o.mode != "dprime") throw ConfigError("filter mode must be d or dprime");
  const bool adversarial = o.mode == "dprime";
  if (adversarial && o.model.empty()) throw ConfigError("filter --mode dprime needs --model");
  const AttackConfig attack = attack_from(o, parse_spr(o.spr));
  print_config("filter", {{"in", o.in},
                          {"mode", o.mode},
                          {"model", o.model},
                          {"attack", adversarial ? attack_json(attack) : ojson(nullptr)},
                          {"out", o.out},
                          {"workers", o.workers}});
  const Dataset d = read_records(o.in);
  const LnrMask mask = adversarial ? adversarial_lnr_mask(d, load_checkpoint(o.model), attack, o.workers)
                                   : clean_lnr_mask(d);
  ojson j;
  j["mode"] = o.mode;
  j["records"] = mask.keep.size();
  j["kept"] = mask.kept();
  std::vector<int> keep;
  for (bool k : mask.keep) keep.push_back(k ? 1 : 0);
  j["keep"] = keep;
  if (!o.out.empty()) write_text(o.out, j.dump() + "\n");
  std::cout << "kept: " << mask.kept() << " of " << mask.keep.size() << "\n";
  return 0;
}

int run_attack(const Options& o) {
  const AttackConfig attack = attack_from(o, parse_spr(o.spr));
  print_config("attack", {{"in", o.in},
                          {"model", o.model},
                          {"attack", attack_json(attack)},
                          {"out", o.out},
                          {"workers", o.workers}});
  Dataset d = read_records(o.in);
  const ToyModel model = load_checkpoint(o.model);
  const LossGradFn loss_grad = model_loss_grad(model);
  std::vector<double> eps(d.records.size(), 0.0);
  parallel_for(d.records.size(), o.workers, [&](std::size_t i) {
    DatasetRecord& r = d.records[i];
    AttackConfig a = attack;
    a.seed = derive_seed(attack.seed, i, 0x4154);
    auto adv = pgd(loss_grad, r.frame.samples, r.onehot, a);
    eps[i] = adv.eps;
    for (auto& v : adv.perturbed) v = cplx(static_cast<float>(v.real()), static_cast<float>(v.imag()));
    r.frame.samples = std::move(adv.perturbed);
  });
  double mean_eps = 0.0;
  for (double e : eps) mean_eps += e;
  if (!eps.empty()) mean_eps /= static_cast<double>(eps.size());
  const std::uint64_t checksum = write_dataset(o.out, d);
  std::cout << "perturbed: " << d.records.size() << " mean_eps: " << mean_eps << "\n";
  std::cout << "checksum fnv1a64: " << hex64(checksum) << "\n";
  return 0;
}

int run_train(const Options& o, const CLI::App& sub) {
  const Regime regime = parse_regime(o.regime);
  TrainConfig cfg = o.config.empty() ? TrainConfig{} : parse_train_config(read_text(o.config));
  if (sub.count("--seed") > 0 || o.config.empty()) cfg.seed = o.seed;
  if (sub.count("--workers") > 0) cfg.workers = o.workers;
  validate(cfg);
  TargetAttacks attacks;
  attacks.model.spr_db = parse_spr(o.train_spr);
  attacks.ml.spr_db = parse_spr(o.ml_spr);
  attacks.model.steps = attacks.ml.steps = o.steps;
  attacks.model.step_size_fraction = attacks.ml.step_size_fraction = o.step_fraction;
  print_config("train", {{"in", o.in},
                         {"regime", regime_name(regime)},
                         {"train", ojson::parse(describe(cfg))},
                         {"model_attack", attack_json(attacks.model)},
                         {"ml_attack", attack_json(attacks.ml)},
                         {"out", o.out},
                         {"log", o.log}});
  const Dataset d = read_records(o.in);
  Rng init_rng(derive_seed(cfg.seed, 0, 0x494e));
  ToyModel init = init_params<float>(d.frame_length, d.schemes.size(), init_rng);
  std::ofstream log;
  if (!o.log.empty()) {
    log.open(o.log, std::ios::trunc);
    if (!log) throw DataError("cannot write '" + o.log + "'");
  }
  const auto result = train(std::move(init), d, regime, cfg, attacks, [&](const TrainingLogEntry& e) {
    const std::string line = to_json_line(e);
    std::cout << line << "\n" << std::flush;
    if (log.is_open()) log << line << "\n" << std::flush;
  });
  save_checkpoint(o.out, result.params);
  std::cout << "checkpoint: " << o.out << "\n";
  return 0;
}

int run_eval(const Options& o) {
  const AttackConfig attack = attack_from(o, parse_spr(o.spr));
  print_config("eval", {{"in", o.in},
                        {"model", o.model},
                        {"attack", attack_json(attack)},
                        {"report", o.report},
                        {"label", o.label},
                        {"workers", o.workers}});
  const Dataset d = read_records(o.in);
  EvalReport rep = evaluate(load_checkpoint(o.model), d, attack, o.workers);
  rep.label = o.label.empty() ? o.model : o.label;
  if (!o.report.empty()) write_text(o.report, to_json(rep) + "\n");
  char line[128];
  std::snprintf(line, sizeof(line), "clean_accuracy: %.4f\nrobust_accuracy: %.4f\n", rep.clean_accuracy,
                rep.robust_accuracy);
  std::cout << line;
  return 0;
}

int run_report(const Options& o) {
  print_config("report", {{"inputs", o.inputs}, {"table", o.table}});
  std::vector<EvalReport> reports;
  for (const auto& path : o.inputs) reports.push_back(parse_eval_report(read_text(path)));
  if (!o.table) {
    ojson j = ojson::array();
    for (const auto& r : reports) {
      j.push_back({{"label", r.label}, {"clean", r.clean_accuracy}, {"robust", r.robust_accuracy}});
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::size_t width = 8;
  for (const auto& r : reports) width = std::max(width, r.label.size());
  std::vector<std::size_t> rank(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    rank[i] = 1;
    for (const auto& other : reports) rank[i] += other.robust_accuracy > reports[i].robust_accuracy;
  }
  std::printf("%-*s %8s %8s %6s %6s\n", static_cast<int>(width), "model", "clean", "robust", "rank", "count");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::printf("%-*s %8.2f %8.2f %6zu %6zu\n", static_cast<int>(width), r.label.c_str(), r.clean_accuracy,
                r.robust_accuracy, rank[i], r.count);
  }
  return 0;
}

std::string quoted(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << "error: kind=" << kind << " message=\"" << quoted(message) << "\"\n";
  return 2;
}

}  // namespace
}  // namespace amclab

int main(int argc, char** argv) {
  using namespace amclab;
  CLI::App app{"amclab: modulation classification with ML soft labels"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed for every random choice");
    sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto attack_opts = [&](CLI::App* sub) {
    sub->add_option("--spr", o.spr, "Signal-to-perturbation ratio in dB, or inf");
    sub->add_option("--steps", o.steps, "PGD steps")->check(CLI::PositiveNumber);
    sub->add_option("--step-fraction", o.step_fraction, "Total step length over eps");
    sub->add_flag("--random-start", o.random_start, "Start PGD from a random point in the box");
  };

  auto* gen = app.add_subcommand("generate", "Generate a dataset file and its manifest");
  gen->add_option("--scenario", o.scenario, "s1, s2 or s3")->check(CLI::IsMember({"s1", "s2", "s3"}));
  gen->add_option("--frames", o.frames, "Frames per grid combination")->check(CLI::PositiveNumber);
  gen->add_option("--out", o.out, "Dataset path")->required();
  gen->add_option("--manifest", o.manifest, "Manifest path (default: OUT.json)");
  common(gen);

  auto* lab = app.add_subcommand("label", "Recompute ML labels");
  lab->add_option("--in", o.in, "Dataset path")->required();
  lab->add_option("--mode", o.mode, "bayes or literal")->required();
  lab->add_option("--adv-eps-spr", o.adv_eps_spr, "Widen the noise variance by an SPR-derived eps");
  lab->add_option("--out", o.out, "Output path (default: overwrite --in)");
  common(lab);

  auto* fil = app.add_subcommand("filter", "Compute a label-noise mask");
  fil->add_option("--in", o.in, "Dataset path")->required();
  fil->add_option("--mode", o.mode, "d or dprime")->required();
  fil->add_option("--model", o.model, "Checkpoint for dprime");
  fil->add_option("--out", o.out, "Mask JSON path");
  attack_opts(fil);
  common(fil);

  auto* att = app.add_subcommand("attack", "Replace every frame by a PGD perturbation");
  att->add_option("--in", o.in, "Dataset path")->required();
  att->add_option("--model", o.model, "Checkpoint")->required();
  att->add_option("--out", o.out, "Perturbed dataset path")->required();
  attack_opts(att);
  common(att);

  auto* tr = app.add_subcommand("train", "Train a classifier");
  tr->add_option("--in", o.in, "Dataset path")->required();
  tr->add_option("--regime", o.regime, "st, st_lnr, st_ml, at, at_lnr, at_ml, at_nml or at_aml")->required();
  tr->add_option("--config", o.config, "Training config JSON");
  tr->add_option("--out", o.out, "Checkpoint path")->required();
  tr->add_option("--log", o.log, "Per-epoch JSON lines log");
  tr->add_option("--attack-spr", o.train_spr, "SPR of the input attack in dB");
  tr->add_option("--ml-spr", o.ml_spr, "SPR of the ML-oracle attack in dB");
  tr->add_option("--steps", o.steps, "PGD steps")->check(CLI::PositiveNumber);
  tr->add_option("--step-fraction", o.step_fraction, "Total step length over eps");
  common(tr);

  auto* ev = app.add_subcommand("eval", "Clean and robust accuracy");
  ev->add_option("--in", o.in, "Dataset path")->required();
  ev->add_option("--model", o.model, "Checkpoint")->required();
  ev->add_option("--report", o.report, "Report JSON path");
  ev->add_option("--label", o.label, "Row label for report tables");
  attack_opts(ev);
  common(ev);

  auto* rep = app.add_subcommand("report", "Summarize eval reports");
  rep->add_option("--inputs", o.inputs, "Report JSON files")->required();
  rep->add_flag("--table", o.table, "Print a text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*gen) return run_generate(o);
    if (*lab) return run_label(o);
    if (*fil) return run_filter(o);
    if (*att) return run_attack(o);
    if (*tr) return run_train(o, *tr);
    if (*ev) return run_eval(o);
    if (*rep) return run_report(o);
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return fail("usage", "no subcommand");
}
