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

#include "amclab/ml_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "amclab/error.hpp"

namespace amclab {
namespace {

double logsumexp(std::span<const double> v) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double x : v) peak = std::max(peak, x);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("noise variance must be positive and finite, got " + std::to_string(sigma2));
  }
}

// In-place softmax of the ML log-likelihoods into a K-vector.
SoftLabel normalize(const std::vector<double>& logf, const SchemeSet& set, Normalization mode,
                    LabelSource source) {
  SoftLabel out{std::vector<double>(set.size(), 0.0), source};
  const auto& classes = set.ml_classes();
  for (double v : logf) {
    if (std::isnan(v)) throw DegenerateInputError("soft_label: NaN log-likelihood");
  }
  if (mode == Normalization::kBayes) {
    const double lse = logsumexp(logf);
    if (!std::isfinite(lse)) throw DegenerateInputError("soft_label: all log-likelihoods are -inf");
    for (std::size_t i = 0; i < classes.size(); ++i) out.probs[classes[i]] = std::exp(logf[i] - lse);
    return out;
  }
  double total = 0.0;
  bool all_negative = true;
  bool all_positive = true;
  for (double v : logf) {
    if (!std::isfinite(v)) throw DegenerateInputError("soft_label: non-finite log-likelihood");
    total += v;
    all_negative = all_negative && v < 0.0;
    all_positive = all_positive && v > 0.0;
  }
  if (!(all_negative || all_positive)) {
    throw DegenerateInputError("soft_label: literal normalization needs log-likelihoods of one sign");
  }
  for (std::size_t i = 0; i < classes.size(); ++i) out.probs[classes[i]] = logf[i] / total;
  return out;
}

}  // namespace

std::size_t SoftLabel::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

SoftLabel one_hot(std::size_t cls, std::size_t num_classes) {
  if (cls >= num_classes) throw ParameterError("one_hot: class index out of range");
  SoftLabel l{std::vector<double>(num_classes, 0.0), LabelSource::kOneHot};
  l.probs[cls] = 1.0;
  return l;
}

bool is_valid(const SoftLabel& label) {
  if (label.probs.empty()) return false;
  double total = 0.0;
  std::size_t ones = 0;
  for (double p : label.probs) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    total += p;
    if (p == 1.0) ++ones;
  }
  if (std::abs(total - 1.0) > 1e-9) return false;
  if (label.source == LabelSource::kOneHot && ones != 1) return false;
  return true;
}

Normalization parse_normalization(std::string_view name) {
  if (name == "bayes") return Normalization::kBayes;
  if (name == "literal") return Normalization::kLiteral;
  throw ConfigError("unknown normalization mode '" + std::string(name) + "'");
}

SchemeSet::SchemeSet(std::vector<Scheme> schemes) : schemes_(std::move(schemes)) {
  if (schemes_.empty()) throw ConfigError("scheme set must not be empty");
  for (std::size_t i = 0; i < schemes_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (schemes_[i] == schemes_[j]) {
        throw ConfigError("duplicate scheme " + std::string(scheme_name(schemes_[i])));
      }
    }
    constellations_.push_back(amclab::constellation(schemes_[i]));
    if (constellations_.back().ml_applicable) ml_classes_.push_back(i);
  }
}

std::size_t SchemeSet::index_of(Scheme scheme) const {
  for (std::size_t i = 0; i < schemes_.size(); ++i) {
    if (schemes_[i] == scheme) return i;
  }
  throw ConfigError("scheme " + std::string(scheme_name(scheme)) + " is not in the configured set");
}

double log_likelihood(std::span<const cplx> symbols, const Constellation& constellation,
                      double sigma2) {
  check_sigma2(sigma2);
  if (!constellation.ml_applicable) {
    throw ParameterError("log_likelihood: " + std::string(scheme_name(constellation.scheme)) +
                         " has no memoryless symbol alphabet");
  }
  const double prefactor =
      -std::log(2.0 * std::numbers::pi * sigma2 * static_cast<double>(constellation.state_count));
  const double inv = 1.0 / (2.0 * sigma2);
  std::vector<double> exponents(constellation.points.size());
  double total = 0.0;
  for (const cplx& z : symbols) {
    for (std::size_t j = 0; j < exponents.size(); ++j) {
      exponents[j] = -std::norm(z - constellation.points[j]) * inv;
    }
    total += prefactor + logsumexp(exponents);
  }
  return total;
}

std::vector<double> log_likelihoods(std::span<const cplx> symbols, const SchemeSet& set,
                                    double sigma2) {
  std::vector<double> out;
  out.reserve(set.ml_classes().size());
  for (std::size_t cls : set.ml_classes()) {
    out.push_back(log_likelihood(symbols, set.constellation(cls), sigma2));
  }
  return out;
}

SoftLabel soft_label(std::span<const cplx> symbols, const SchemeSet& set, double sigma2,
                     Normalization mode) {
  if (set.ml_classes().empty()) throw ConfigError("soft_label: no ML-applicable scheme in the set");
  return normalize(log_likelihoods(symbols, set, sigma2), set, mode, LabelSource::kMlClean);
}

SoftLabel soft_label_adversarial(std::span<const cplx> symbols, const SchemeSet& set,
                                 const AdvNoiseSpec& noise, Normalization mode) {
  SoftLabel out = soft_label(symbols, set, noise.sigma2_f, mode);
  out.source = LabelSource::kMlAdv;
  return out;
}

SymbolCeGradient grad_symbol_ce(std::span<const cplx> symbols, const SoftLabel& target,
                                const SchemeSet& set, double sigma2, Normalization mode) {
  if (mode != Normalization::kBayes) {
    throw UnsupportedModeError("grad_symbol_ce: only bayes normalization is differentiable");
  }
  check_sigma2(sigma2);
  if (target.probs.size() != set.size()) throw ParameterError("grad_symbol_ce: target has wrong length");
  const auto& classes = set.ml_classes();
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (!set.ml_applicable(k) && target.probs[k] != 0.0) {
      throw ParameterError("grad_symbol_ce: target puts mass on a non-ML class");
    }
  }

  // One pass per class: log f_i and, per symbol, the responsibility-weighted
  // pull sum_j w_ij (s_j - z_t).
  const std::size_t n = symbols.size();
  const double inv = 1.0 / (2.0 * sigma2);
  std::vector<double> logf(classes.size());
  std::vector<cplx> pulls(classes.size() * n);
  std::vector<double> exponents;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = set.constellation(classes[i]);
    const auto& points = c.points;
    exponents.resize(points.size());
    double total = -static_cast<double>(n) *
                   std::log(2.0 * std::numbers::pi * sigma2 * static_cast<double>(c.state_count));
    for (std::size_t t = 0; t < n; ++t) {
      const cplx z = symbols[t];
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < points.size(); ++j) {
        exponents[j] = -std::norm(z - points[j]) * inv;
        peak = std::max(peak, exponents[j]);
      }
      double norm = 0.0;
      cplx pull(0.0, 0.0);
      for (std::size_t j = 0; j < points.size(); ++j) {
        const double w = std::exp(exponents[j] - peak);
        norm += w;
        pull += w * (points[j] - z);
      }
      total += peak + std::log(norm);
      pulls[i * n + t] = pull / (norm * sigma2);
    }
    logf[i] = total;
  }
  const double lse = logsumexp(logf);
  if (!std::isfinite(lse)) throw DegenerateInputError("grad_symbol_ce: all log-likelihoods are -inf");

  SymbolCeGradient out;
  out.grad.assign(n, cplx(0.0, 0.0));
  // dCE/dlogf_i = p_i - t_i; d logf_i / dz_t = pull_it.
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const double t = target.probs[classes[i]];
    const double logp = logf[i] - lse;
    if (t > 0.0) out.loss -= t * logp;
    const double d = std::exp(logp) - t;
    if (d == 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) out.grad[k] += d * pulls[i * n + k];
  }
  return out;
}

std::size_t LnrMask::kept() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
}

LnrMask lnr_mask(std::span<const LnrEntry> entries, LnrMode mode) {
  LnrMask mask{std::vector<bool>(entries.size(), true), mode};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const LnrEntry& e = entries[i];
    if (!e.ml_applicable) continue;
    if (e.ml_label == nullptr) {
      throw StateError("lnr_mask: record " + std::to_string(i) + " has no ML label");
    }
    mask.keep[i] = e.ml_label->argmax() == e.true_class;
  }
  return mask;
}

double symbol_noise_variance(const ChannelRealization& channel, const FilterTaps& taps) {
  const double mag2 = std::norm(channel.gain);
  if (!(std::sqrt(mag2) > kMinInvertibleGain)) {
    throw DeepFadeError("symbol_noise_variance: gain is not invertible");
  }
  return channel.noise.sigma2 / mag2 * matched_filter_noise_gain(taps, taps.sps);
}

SoftLabel posterior_marginal(std::span<const cplx> frame, std::span<const Hypothesis> grid,
                             const SchemeSet& set) {
  if (grid.empty()) throw ParameterError("posterior_marginal: empty hypothesis grid");
  double prior_total = 0.0;
  for (const auto& h : grid) {
    if (!(h.prior >= 0.0)) throw ParameterError("posterior_marginal: negative prior");
    prior_total += h.prior;
  }
  if (std::abs(prior_total - 1.0) > 1e-9) throw ParameterError("posterior_marginal: priors must sum to 1");

  const double log_classes = std::log(static_cast<double>(set.ml_classes().size()));
  std::vector<SoftLabel> conditionals;
  std::vector<double> log_weight;
  conditionals.reserve(grid.size());
  for (const auto& h : grid) {
    IQFrame received{std::vector<cplx>(frame.begin(), frame.end())};
    const FadingRemoval eq = remove_fading(received, h.channel);
    const std::vector<cplx> z = matched_filter(eq.frame.samples, h.taps, h.taps.sps);
    const double sigma2 = symbol_noise_variance(h.channel, h.taps);
    const std::vector<double> logf = log_likelihoods(z, set, sigma2);
    conditionals.push_back(normalize(logf, set, Normalization::kBayes, LabelSource::kPosterior));
    log_weight.push_back(std::log(h.prior) + logsumexp(logf) - log_classes);
  }
  const double lse = logsumexp(log_weight);
  if (!std::isfinite(lse)) throw DegenerateInputError("posterior_marginal: zero evidence for every hypothesis");

  SoftLabel out{std::vector<double>(set.size(), 0.0), LabelSource::kPosterior};
  for (std::size_t h = 0; h < grid.size(); ++h) {
    const double w = std::exp(log_weight[h] - lse);
    for (std::size_t k = 0; k < set.size(); ++k) out.probs[k] += conditionals[h].probs[k] * w;
  }
  return out;
}

}  // namespace amclab
