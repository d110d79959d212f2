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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "amclab/ml_oracle.hpp"
#include "amclab/modem.hpp"
#include "amclab/rng.hpp"

namespace amclab {

// Three strided 1-D convolution blocks (2 -> 16 -> 16 -> 16 channels, kernel
// 7, stride 2, zero padding 3, ReLU), global average pooling and a dense
// 16 -> K layer. The frame enters as a 2 x L real view (I, Q).
namespace toy {
inline constexpr std::size_t kWidth = 16;
inline constexpr std::size_t kKernel = 7;
inline constexpr std::size_t kStride = 2;
inline constexpr std::size_t kPad = 3;
inline constexpr std::size_t kConvLayers = 3;
inline constexpr std::size_t kInputChannels = 2;

inline constexpr std::size_t in_channels(std::size_t layer) {
  return layer == 0 ? kInputChannels : kWidth;
}
}  // namespace toy

// Flat parameter vector with fixed layout: for each conv layer the weights
// [kernel][in][out] followed by the bias [out]; then the dense weights
// [16][K] and bias [K].
template <typename Real>
struct ToyModelParams {
  std::size_t frame_length = 0;
  std::size_t num_classes = 0;
  std::vector<Real> values;

  static std::size_t count(std::size_t num_classes);
  std::size_t conv_weight_offset(std::size_t layer) const;
  std::size_t conv_bias_offset(std::size_t layer) const;
  std::size_t dense_weight_offset() const;
  std::size_t dense_bias_offset() const;
  std::size_t output_length(std::size_t layer) const;
};

using ToyModel = ToyModelParams<float>;
using ToyModel64 = ToyModelParams<double>;

template <typename To, typename From>
ToyModelParams<To> cast_params(const ToyModelParams<From>& p) {
  ToyModelParams<To> out{p.frame_length, p.num_classes, {}};
  out.values.assign(p.values.begin(), p.values.end());
  return out;
}

// He-uniform weights (variance 2 / fan_in), zero biases.
template <typename Real>
ToyModelParams<Real> init_params(std::size_t frame_length, std::size_t num_classes, Rng& rng);

struct ForwardResult {
  std::vector<double> logits;
  std::vector<double> probs;
};

template <typename Real>
ForwardResult forward(const ToyModelParams<Real>& params, std::span<const cplx> frame);

enum GradientParts : unsigned { kParamGrads = 1u, kInputGrad = 2u, kAllGrads = 3u };

template <typename Real>
struct BackwardResult {
  double loss = 0.0;
  std::vector<double> probs;
  // Empty unless requested.
  std::vector<Real> param_grads;
  std::vector<cplx> input_grad;
};

// Cross-entropy against a (possibly soft) target and its exact reverse-mode
// gradients. The ReLU derivative at 0 is 0.
template <typename Real>
BackwardResult<Real> backward(const ToyModelParams<Real>& params, std::span<const cplx> frame,
                              const SoftLabel& target, unsigned parts = kAllGrads);

// ReLU on/off pattern of every hidden unit for one frame.
template <typename Real>
std::vector<bool> relu_pattern(const ToyModelParams<Real>& params, std::span<const cplx> frame);

// Central finite differences against backward on `coords` random parameter
// coordinates and `coords` random input coordinates. Coordinates whose
// perturbation flips a ReLU are redrawn. Returns the max relative error
// |a - b| / max(|a|, |b|, floor).
struct GradCheckOptions {
  double step = 1e-5;
  std::size_t coords = 100;
  double floor = 1e-7;
};
double grad_check(const ToyModel64& params, std::span<const cplx> frame, const SoftLabel& target,
                  const GradCheckOptions& options, Rng& rng);

// Checkpoint: "AMCM", u16 version, u32 L, u32 K, u32 tensor count, then per
// tensor a length-prefixed name, u32 rank and u32 dims, followed by all
// tensors as little-endian float32 in table order.
inline constexpr std::uint16_t kCheckpointVersion = 1;
std::vector<char> encode_checkpoint(const ToyModel& params);
ToyModel decode_checkpoint(std::vector<char> bytes);
void save_checkpoint(const std::string& path, const ToyModel& params);
ToyModel load_checkpoint(const std::string& path);

}  // namespace amclab
