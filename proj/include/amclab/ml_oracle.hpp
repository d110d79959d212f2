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
#include <span>
#include <string_view>
#include <vector>

#include "amclab/channel.hpp"
#include "amclab/modem.hpp"

namespace amclab {

enum class LabelSource : std::uint8_t { kOneHot = 0, kMlClean = 1, kMlAdv = 2, kPosterior = 3 };

// Probability vector over the K configured classes.
struct SoftLabel {
  std::vector<double> probs;
  LabelSource source = LabelSource::kOneHot;

  std::size_t argmax() const;
};

SoftLabel one_hot(std::size_t cls, std::size_t num_classes);

// Checks sum-to-one (1e-9), range and, for one-hot labels, a single 1.
bool is_valid(const SoftLabel& label);

enum class Normalization : std::uint8_t {
  // softmax of the log-likelihoods: posterior under a uniform scheme prior.
  kBayes = 0,
  // log f_i / sum_j log f_j, kept for comparison only.
  kLiteral = 1,
};

Normalization parse_normalization(std::string_view name);

// The ordered class list of a label space. Class index = position in the list.
class SchemeSet {
 public:
  explicit SchemeSet(std::vector<Scheme> schemes);

  std::size_t size() const { return schemes_.size(); }
  Scheme scheme(std::size_t cls) const { return schemes_[cls]; }
  const std::vector<Scheme>& schemes() const { return schemes_; }
  const Constellation& constellation(std::size_t cls) const { return constellations_[cls]; }
  bool ml_applicable(std::size_t cls) const { return constellations_[cls].ml_applicable; }
  // Class indices of the ML-applicable schemes, ascending.
  const std::vector<std::size_t>& ml_classes() const { return ml_classes_; }
  // Throws ConfigError when the scheme is not part of the set.
  std::size_t index_of(Scheme scheme) const;

 private:
  std::vector<Scheme> schemes_;
  std::vector<Constellation> constellations_;
  std::vector<std::size_t> ml_classes_;
};

// log f_i(z) = sum_t [ -log(2 pi sigma2 |M_i|) + logsumexp_j(-|z_t - s_j|^2 / (2 sigma2)) ].
double log_likelihood(std::span<const cplx> symbols, const Constellation& constellation,
                      double sigma2);

// Log-likelihood of every ML-applicable class, ordered as set.ml_classes().
std::vector<double> log_likelihoods(std::span<const cplx> symbols, const SchemeSet& set,
                                    double sigma2);

// Soft label over all K classes; non-ML classes get probability 0.
SoftLabel soft_label(std::span<const cplx> symbols, const SchemeSet& set, double sigma2,
                     Normalization mode = Normalization::kBayes);

struct AdvNoiseSpec {
  double sigma2 = 0.0;
  // Per-real-component L-inf bound of the perturbation in the same domain.
  double eps = 0.0;
  double sigma2_f = 0.0;

  static AdvNoiseSpec make(double sigma2, double eps) { return {sigma2, eps, sigma2 + eps * eps}; }
};

// soft_label evaluated at sigma2_f.
SoftLabel soft_label_adversarial(std::span<const cplx> symbols, const SchemeSet& set,
                                 const AdvNoiseSpec& noise,
                                 Normalization mode = Normalization::kBayes);

struct SymbolCeGradient {
  double loss = 0.0;
  // d loss / d Re(z_t) + i d loss / d Im(z_t).
  std::vector<cplx> grad;
};

// Cross-entropy of the bayes soft label against `target` and its exact
// gradient with respect to the symbols. The target must put zero mass on
// non-ML classes. Literal normalization is rejected.
SymbolCeGradient grad_symbol_ce(std::span<const cplx> symbols, const SoftLabel& target,
                                const SchemeSet& set, double sigma2,
                                Normalization mode = Normalization::kBayes);

enum class LnrMode : std::uint8_t { kClean = 0, kAdversarial = 1 };

struct LnrEntry {
  std::size_t true_class = 0;
  bool ml_applicable = true;
  // ML label of the record (clean mode) or of its perturbed version (D').
  const SoftLabel* ml_label = nullptr;
};

struct LnrMask {
  std::vector<bool> keep;
  LnrMode mode = LnrMode::kClean;

  std::size_t kept() const;
};

// keep[i] iff argmax(y_i) == argmax(ml_label_i); non-ML records are always
// kept. Throws StateError when an ML-applicable entry has no label.
LnrMask lnr_mask(std::span<const LnrEntry> entries, LnrMode mode);

// One element of the finite hypothesis grid: a channel state plus the
// transmitter parameters needed to build its receive filter.
struct Hypothesis {
  ChannelRealization channel;
  FilterTaps taps;
  double prior = 1.0;
};

// p[m|x] = sum_h p[m|x,h] p[h|x], with p[h|x] proportional to
// prior_h * mean_i f_i^h(r_h(x / gain_h)).
SoftLabel posterior_marginal(std::span<const cplx> frame, std::span<const Hypothesis> grid,
                             const SchemeSet& set);

// Per-component noise variance of r(x / gain) given the channel's sample
// domain noise.
double symbol_noise_variance(const ChannelRealization& channel, const FilterTaps& taps);

}  // namespace amclab
