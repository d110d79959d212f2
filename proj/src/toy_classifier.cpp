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

#include "amclab/toy_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "amclab/binary_io.hpp"
#include "amclab/error.hpp"

namespace amclab {
namespace {

using namespace toy;

// Activations are kept row-major ([row][channel]) with kPad zero rows on both
// sides, so every kernel window is a single contiguous span of kKernel * Cin
// values starting at row kStride * t.
template <typename Real>
struct Workspace {
  std::vector<Real> input;
  std::array<std::vector<Real>, kConvLayers> act;
  // Gradient w.r.t. each layer's pre-activations, unpadded.
  std::array<std::vector<Real>, kConvLayers> grad;
  std::vector<Real> grad_in;
  std::vector<Real> transposed;
};

template <typename Real>
Workspace<Real>& workspace() {
  thread_local Workspace<Real> ws;
  return ws;
}

constexpr std::size_t kRowBlock = 4;

template <typename Real>
void zero_pad_rows(std::vector<Real>& buf, std::size_t rows, std::size_t width) {
  buf.resize((rows + 2 * kPad) * width);
  std::fill(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(kPad * width), Real(0));
  std::fill(buf.end() - static_cast<std::ptrdiff_t>(kPad * width), buf.end(), Real(0));
}

// Fixed-width vector lanes for the channel dimension.
template <typename Real>
struct Lanes {
  static constexpr std::size_t kCount = 32 / sizeof(Real);
  static constexpr std::size_t kPerRow = kWidth / kCount;
  typedef Real V __attribute__((vector_size(32)));
  static V load(const Real* p) {
    V v;
    std::memcpy(&v, p, sizeof(V));
    return v;
  }
  static void store(Real* p, V v) { std::memcpy(p, &v, sizeof(V)); }
  static V splat(Real a) { return V{} + a; }
};

template <typename Real, std::size_t Cin, std::size_t Rows>
void conv_rows(const Real* in, const Real* w, const Real* b, Real* out, std::size_t t) {
  using L = Lanes<Real>;
  using V = typename L::V;
  constexpr std::size_t span = kKernel * Cin;
  constexpr std::size_t row_step = kStride * Cin;
  V acc[Rows][L::kPerRow];
  for (std::size_t v = 0; v < L::kPerRow; ++v) {
    const V bv = L::load(b + v * L::kCount);
    for (std::size_t r = 0; r < Rows; ++r) acc[r][v] = bv;
  }
  const Real* win = in + t * row_step;
  for (std::size_t j = 0; j < span; ++j) {
    V wr[L::kPerRow];
    for (std::size_t v = 0; v < L::kPerRow; ++v) wr[v] = L::load(w + j * kWidth + v * L::kCount);
    for (std::size_t r = 0; r < Rows; ++r) {
      const V xv = L::splat(win[r * row_step + j]);
      for (std::size_t v = 0; v < L::kPerRow; ++v) acc[r][v] += xv * wr[v];
    }
  }
  const V zero{};
  for (std::size_t r = 0; r < Rows; ++r)
    for (std::size_t v = 0; v < L::kPerRow; ++v) {
      const V a = acc[r][v];
      L::store(out + (t + r) * kWidth + v * L::kCount, a > zero ? a : zero);
    }
}

// in: padded input rows; out: first unpadded output row.
template <typename Real, std::size_t Cin>
void conv_relu_forward(const Real* in, const Real* w, const Real* b, Real* out, std::size_t lout) {
  std::size_t t = 0;
  for (; t + kRowBlock <= lout; t += kRowBlock) conv_rows<Real, Cin, kRowBlock>(in, w, b, out, t);
  for (; t < lout; ++t) conv_rows<Real, Cin, 1>(in, w, b, out, t);
}

template <typename Real, std::size_t Cin, std::size_t Rows>
void weight_grad_rows(const Real* in, const Real* g, Real* dw, std::size_t t) {
  using L = Lanes<Real>;
  using V = typename L::V;
  constexpr std::size_t span = kKernel * Cin;
  constexpr std::size_t row_step = kStride * Cin;
  const Real* win = in + t * row_step;
  V gv[Rows][L::kPerRow];
  for (std::size_t r = 0; r < Rows; ++r)
    for (std::size_t v = 0; v < L::kPerRow; ++v) gv[r][v] = L::load(g + (t + r) * kWidth + v * L::kCount);
  for (std::size_t j = 0; j < span; ++j) {
    V acc[L::kPerRow];
    for (std::size_t v = 0; v < L::kPerRow; ++v) acc[v] = L::load(dw + j * kWidth + v * L::kCount);
    for (std::size_t r = 0; r < Rows; ++r) {
      const V xv = L::splat(win[r * row_step + j]);
      for (std::size_t v = 0; v < L::kPerRow; ++v) acc[v] += xv * gv[r][v];
    }
    for (std::size_t v = 0; v < L::kPerRow; ++v) L::store(dw + j * kWidth + v * L::kCount, acc[v]);
  }
}

// g: gradient w.r.t. the pre-activations (lout rows). dw/db accumulate; din
// (padded, zeroed) receives the gradient w.r.t. the padded layer input.
template <typename Real, std::size_t Cin>
void conv_backward(const Real* in, const Real* w, const Real* g, std::size_t lout, Real* dw,
                   Real* db, Real* din, std::vector<Real>& transposed) {
  using L = Lanes<Real>;
  using V = typename L::V;
  constexpr std::size_t span = kKernel * Cin;
  if (dw != nullptr) {
    for (std::size_t t = 0; t < lout; ++t)
      for (std::size_t co = 0; co < kWidth; ++co) db[co] += g[t * kWidth + co];
    std::size_t t = 0;
    for (; t + kRowBlock <= lout; t += kRowBlock) weight_grad_rows<Real, Cin, kRowBlock>(in, g, dw, t);
    for (; t < lout; ++t) weight_grad_rows<Real, Cin, 1>(in, g, dw, t);
  }
  if (din == nullptr) return;
  transposed.resize(kWidth * span);
  for (std::size_t j = 0; j < span; ++j)
    for (std::size_t co = 0; co < kWidth; ++co) transposed[co * span + j] = w[j * kWidth + co];
  constexpr std::size_t full = span / L::kCount * L::kCount;
  for (std::size_t t = 0; t < lout; ++t) {
    const Real* gt = g + t * kWidth;
    Real* d = din + t * kStride * Cin;
    for (std::size_t j0 = 0; j0 < full; j0 += L::kCount) {
      V acc{};
      for (std::size_t co = 0; co < kWidth; ++co) {
        acc += L::splat(gt[co]) * L::load(transposed.data() + co * span + j0);
      }
      L::store(d + j0, L::load(d + j0) + acc);
    }
    for (std::size_t j = full; j < span; ++j) {
      Real acc = Real(0);
      for (std::size_t co = 0; co < kWidth; ++co) acc += gt[co] * transposed[co * span + j];
      d[j] += acc;
    }
  }
}

template <typename Real>
void check_frame(const ToyModelParams<Real>& params, std::span<const cplx> frame) {
  if (params.values.size() != ToyModelParams<Real>::count(params.num_classes)) {
    throw ParameterError("toy model: parameter vector has the wrong size");
  }
  if (frame.size() != params.frame_length) {
    throw ParameterError("toy model: frame has " + std::to_string(frame.size()) +
                         " samples, model expects " + std::to_string(params.frame_length));
  }
}

// Runs the conv stack into ws.act and returns the pooled features.
template <typename Real>
std::array<double, kWidth> run_features(const ToyModelParams<Real>& params,
                                        std::span<const cplx> frame, Workspace<Real>& ws) {
  const std::size_t len = params.frame_length;
  zero_pad_rows(ws.input, len, kInputChannels);
  Real* x = ws.input.data() + kPad * kInputChannels;
  for (std::size_t n = 0; n < len; ++n) {
    x[2 * n] = static_cast<Real>(frame[n].real());
    x[2 * n + 1] = static_cast<Real>(frame[n].imag());
  }
  const Real* in = ws.input.data();
  std::size_t lout = 0;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    lout = params.output_length(l);
    zero_pad_rows(ws.act[l], lout, kWidth);
    Real* out = ws.act[l].data() + kPad * kWidth;
    const Real* w = params.values.data() + params.conv_weight_offset(l);
    const Real* b = params.values.data() + params.conv_bias_offset(l);
    if (l == 0) {
      conv_relu_forward<Real, kInputChannels>(in, w, b, out, lout);
    } else {
      conv_relu_forward<Real, kWidth>(in, w, b, out, lout);
    }
    in = ws.act[l].data();
  }
  const Real* last = in + kPad * kWidth;
  std::array<double, kWidth> feat{};
  for (std::size_t t = 0; t < lout; ++t)
    for (std::size_t c = 0; c < kWidth; ++c) feat[c] += static_cast<double>(last[t * kWidth + c]);
  for (double& f : feat) f /= static_cast<double>(lout);
  return feat;
}

template <typename Real>
std::vector<double> dense(const ToyModelParams<Real>& params, const std::array<double, kWidth>& feat) {
  const std::size_t k_out = params.num_classes;
  const Real* w = params.values.data() + params.dense_weight_offset();
  const Real* b = params.values.data() + params.dense_bias_offset();
  std::vector<double> logits(k_out);
  for (std::size_t k = 0; k < k_out; ++k) {
    double acc = static_cast<double>(b[k]);
    for (std::size_t c = 0; c < kWidth; ++c) acc += feat[c] * static_cast<double>(w[c * k_out + k]);
    logits[k] = acc;
  }
  return logits;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double v : logits) acc += std::exp(v - peak);
  const double lse = peak + std::log(acc);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - lse;
  return out;
}

}  // namespace

template <typename Real>
std::size_t ToyModelParams<Real>::count(std::size_t num_classes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < kConvLayers; ++l) n += kKernel * in_channels(l) * kWidth + kWidth;
  return n + kWidth * num_classes + num_classes;
}

template <typename Real>
std::size_t ToyModelParams<Real>::conv_weight_offset(std::size_t layer) const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer; ++l) n += kKernel * in_channels(l) * kWidth + kWidth;
  return n;
}

template <typename Real>
std::size_t ToyModelParams<Real>::conv_bias_offset(std::size_t layer) const {
  return conv_weight_offset(layer) + kKernel * in_channels(layer) * kWidth;
}

template <typename Real>
std::size_t ToyModelParams<Real>::dense_weight_offset() const {
  return conv_weight_offset(kConvLayers);
}

template <typename Real>
std::size_t ToyModelParams<Real>::dense_bias_offset() const {
  return dense_weight_offset() + kWidth * num_classes;
}

template <typename Real>
std::size_t ToyModelParams<Real>::output_length(std::size_t layer) const {
  std::size_t len = frame_length;
  for (std::size_t l = 0; l <= layer; ++l) len = (len + 2 * kPad - kKernel) / kStride + 1;
  return len;
}

template <typename Real>
ToyModelParams<Real> init_params(std::size_t frame_length, std::size_t num_classes, Rng& rng) {
  if (frame_length == 0 || frame_length % 8 != 0) {
    throw ParameterError("init_params: frame length must be a positive multiple of 8");
  }
  if (num_classes < 2) throw ParameterError("init_params: need at least 2 classes");
  ToyModelParams<Real> p{frame_length, num_classes, std::vector<Real>(ToyModelParams<Real>::count(num_classes), Real(0))};
  auto fill = [&](std::size_t offset, std::size_t n, std::size_t fan_in) {
    std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / static_cast<double>(fan_in)),
                                                std::sqrt(6.0 / static_cast<double>(fan_in)));
    for (std::size_t i = 0; i < n; ++i) p.values[offset + i] = static_cast<Real>(dist(rng));
  };
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    fill(p.conv_weight_offset(l), kKernel * in_channels(l) * kWidth, kKernel * in_channels(l));
  }
  fill(p.dense_weight_offset(), kWidth * num_classes, kWidth);
  return p;
}

template <typename Real>
ForwardResult forward(const ToyModelParams<Real>& params, std::span<const cplx> frame) {
  check_frame(params, frame);
  auto& ws = workspace<Real>();
  ForwardResult r;
  r.logits = dense(params, run_features(params, frame, ws));
  const auto logp = log_softmax(r.logits);
  r.probs.resize(logp.size());
  for (std::size_t k = 0; k < logp.size(); ++k) r.probs[k] = std::exp(logp[k]);
  return r;
}

template <typename Real>
BackwardResult<Real> backward(const ToyModelParams<Real>& params, std::span<const cplx> frame,
                              const SoftLabel& target, unsigned parts) {
  check_frame(params, frame);
  if (target.probs.size() != params.num_classes) {
    throw ParameterError("toy model: target has " + std::to_string(target.probs.size()) +
                         " classes, model has " + std::to_string(params.num_classes));
  }
  auto& ws = workspace<Real>();
  const auto feat = run_features(params, frame, ws);
  const auto logits = dense(params, feat);
  const auto logp = log_softmax(logits);
  const std::size_t k_out = params.num_classes;

  BackwardResult<Real> r;
  r.probs.resize(k_out);
  std::vector<double> dlogits(k_out);
  for (std::size_t k = 0; k < k_out; ++k) {
    r.probs[k] = std::exp(logp[k]);
    if (target.probs[k] > 0.0) r.loss -= target.probs[k] * logp[k];
    dlogits[k] = r.probs[k] - target.probs[k];
  }
  const bool want_params = (parts & kParamGrads) != 0;
  const bool want_input = (parts & kInputGrad) != 0;
  if (!want_params && !want_input) return r;

  Real* pg = nullptr;
  if (want_params) {
    r.param_grads.assign(params.values.size(), Real(0));
    pg = r.param_grads.data();
    for (std::size_t c = 0; c < kWidth; ++c)
      for (std::size_t k = 0; k < k_out; ++k)
        pg[params.dense_weight_offset() + c * k_out + k] = static_cast<Real>(feat[c] * dlogits[k]);
    for (std::size_t k = 0; k < k_out; ++k) pg[params.dense_bias_offset() + k] = static_cast<Real>(dlogits[k]);
  }

  // Through the average pool and the last ReLU.
  const std::size_t last = kConvLayers - 1;
  const std::size_t l3 = params.output_length(last);
  const Real* wd = params.values.data() + params.dense_weight_offset();
  std::array<Real, kWidth> dfeat{};
  for (std::size_t c = 0; c < kWidth; ++c) {
    double acc = 0.0;
    for (std::size_t k = 0; k < k_out; ++k) acc += static_cast<double>(wd[c * k_out + k]) * dlogits[k];
    dfeat[c] = static_cast<Real>(acc / static_cast<double>(l3));
  }
  ws.grad[last].resize(l3 * kWidth);
  const Real* a3 = ws.act[last].data() + kPad * kWidth;
  for (std::size_t t = 0; t < l3; ++t)
    for (std::size_t c = 0; c < kWidth; ++c)
      ws.grad[last][t * kWidth + c] = a3[t * kWidth + c] > Real(0) ? dfeat[c] : Real(0);

  for (std::size_t l = kConvLayers; l-- > 0;) {
    const std::size_t lout = params.output_length(l);
    const Real* w = params.values.data() + params.conv_weight_offset(l);
    Real* dw = want_params ? pg + params.conv_weight_offset(l) : nullptr;
    Real* db = want_params ? pg + params.conv_bias_offset(l) : nullptr;
    if (l == 0) {
      Real* din = nullptr;
      if (want_input) {
        ws.grad_in.assign((params.frame_length + 2 * kPad) * kInputChannels, Real(0));
        din = ws.grad_in.data();
      }
      conv_backward<Real, kInputChannels>(ws.input.data(), w, ws.grad[0].data(), lout, dw, db, din,
                                          ws.transposed);
    } else {
      const std::size_t lin = params.output_length(l - 1);
      ws.grad_in.assign((lin + 2 * kPad) * kWidth, Real(0));
      conv_backward<Real, kWidth>(ws.act[l - 1].data(), w, ws.grad[l].data(), lout, dw, db,
                                  ws.grad_in.data(), ws.transposed);
      auto& g = ws.grad[l - 1];
      g.resize(lin * kWidth);
      const Real* act = ws.act[l - 1].data() + kPad * kWidth;
      const Real* gin = ws.grad_in.data() + kPad * kWidth;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = act[i] > Real(0) ? gin[i] : Real(0);
    }
  }
  if (want_input) {
    r.input_grad.resize(params.frame_length);
    const Real* gx = ws.grad_in.data() + kPad * kInputChannels;
    for (std::size_t n = 0; n < params.frame_length; ++n) {
      r.input_grad[n] = cplx(static_cast<double>(gx[2 * n]), static_cast<double>(gx[2 * n + 1]));
    }
  }
  return r;
}

template <typename Real>
std::vector<bool> relu_pattern(const ToyModelParams<Real>& params, std::span<const cplx> frame) {
  check_frame(params, frame);
  auto& ws = workspace<Real>();
  run_features(params, frame, ws);
  std::vector<bool> out;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    const std::size_t n = params.output_length(l) * kWidth;
    const Real* a = ws.act[l].data() + kPad * kWidth;
    for (std::size_t i = 0; i < n; ++i) out.push_back(a[i] > Real(0));
  }
  return out;
}

double grad_check(const ToyModel64& params, std::span<const cplx> frame, const SoftLabel& target,
                  const GradCheckOptions& options, Rng& rng) {
  if (!(options.step >= 1e-7 && options.step <= 1e-3)) {
    throw ParameterError("grad_check: step must be in [1e-7, 1e-3]");
  }
  const auto exact = backward(params, frame, target, kAllGrads);
  const auto pattern = relu_pattern(params, frame);
  const double h = options.step;
  auto rel = [&](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), options.floor});
  };
  double worst = 0.0;
  const std::size_t max_attempts = 50 * options.coords;

  ToyModel64 probe = params;
  std::uniform_int_distribution<std::size_t> pick_param(0, params.values.size() - 1);
  std::size_t done = 0;
  for (std::size_t attempt = 0; done < options.coords && attempt < max_attempts; ++attempt) {
    const std::size_t i = pick_param(rng);
    const double saved = probe.values[i];
    probe.values[i] = saved + h;
    const bool up_same = relu_pattern(probe, frame) == pattern;
    const double up = backward(probe, frame, target, 0u).loss;
    probe.values[i] = saved - h;
    const bool down_same = relu_pattern(probe, frame) == pattern;
    const double down = backward(probe, frame, target, 0u).loss;
    probe.values[i] = saved;
    if (!up_same || !down_same) continue;
    worst = std::max(worst, rel(exact.param_grads[i], (up - down) / (2.0 * h)));
    ++done;
  }

  std::vector<cplx> x(frame.begin(), frame.end());
  std::uniform_int_distribution<std::size_t> pick_input(0, 2 * frame.size() - 1);
  done = 0;
  for (std::size_t attempt = 0; done < options.coords && attempt < max_attempts; ++attempt) {
    const std::size_t j = pick_input(rng);
    const std::size_t n = j / 2;
    const bool imag = j % 2 == 1;
    const cplx saved = x[n];
    const cplx bump = imag ? cplx(0.0, h) : cplx(h, 0.0);
    x[n] = saved + bump;
    const bool up_same = relu_pattern(params, x) == pattern;
    const double up = backward(params, x, target, 0u).loss;
    x[n] = saved - bump;
    const bool down_same = relu_pattern(params, x) == pattern;
    const double down = backward(params, x, target, 0u).loss;
    x[n] = saved;
    if (!up_same || !down_same) continue;
    const double analytic = imag ? exact.input_grad[n].imag() : exact.input_grad[n].real();
    worst = std::max(worst, rel(analytic, (up - down) / (2.0 * h)));
    ++done;
  }
  return worst;
}

namespace {

struct TensorInfo {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::size_t offset;
  std::size_t size;
};

std::vector<TensorInfo> tensor_table(const ToyModel& p) {
  std::vector<TensorInfo> t;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    const auto cin = static_cast<std::uint32_t>(in_channels(l));
    t.push_back({"conv" + std::to_string(l + 1) + ".weight",
                 {static_cast<std::uint32_t>(kKernel), cin, static_cast<std::uint32_t>(kWidth)},
                 p.conv_weight_offset(l), kKernel * cin * kWidth});
    t.push_back({"conv" + std::to_string(l + 1) + ".bias", {static_cast<std::uint32_t>(kWidth)},
                 p.conv_bias_offset(l), kWidth});
  }
  const auto k = static_cast<std::uint32_t>(p.num_classes);
  t.push_back({"dense.weight", {static_cast<std::uint32_t>(kWidth), k}, p.dense_weight_offset(), kWidth * k});
  t.push_back({"dense.bias", {k}, p.dense_bias_offset(), k});
  return t;
}

constexpr char kCheckpointMagic[4] = {'A', 'M', 'C', 'M'};

}  // namespace

std::vector<char> encode_checkpoint(const ToyModel& params) {
  if (params.values.size() != ToyModel::count(params.num_classes)) {
    throw ParameterError("encode_checkpoint: parameter vector has the wrong size");
  }
  io::Writer w;
  w.put_bytes(kCheckpointMagic, 4);
  w.put<std::uint16_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.frame_length));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.num_classes));
  const auto table = tensor_table(params);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(table.size()));
  for (const auto& t : table) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.name.size()));
    w.put_bytes(t.name.data(), t.name.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) w.put<std::uint32_t>(d);
  }
  for (const auto& t : table)
    for (std::size_t i = 0; i < t.size; ++i) w.put<float>(params.values[t.offset + i]);
  return w.bytes();
}

ToyModel decode_checkpoint(std::vector<char> bytes) {
  io::Reader r(std::move(bytes));
  char magic[4];
  r.get_bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kCheckpointMagic)) r.fail("bad checkpoint magic");
  if (r.get<std::uint16_t>() != kCheckpointVersion) r.fail("unsupported checkpoint version");
  ToyModel p;
  p.frame_length = r.get<std::uint32_t>();
  p.num_classes = r.get<std::uint32_t>();
  if (p.frame_length == 0 || p.frame_length % 8 != 0 || p.num_classes < 2) r.fail("invalid model shape");
  p.values.assign(ToyModel::count(p.num_classes), 0.0f);
  const auto expected = tensor_table(p);
  if (r.get<std::uint32_t>() != expected.size()) r.fail("unexpected tensor count");
  for (const auto& t : expected) {
    const auto len = r.get<std::uint8_t>();
    std::string name(len, '\0');
    r.get_bytes(name.data(), len);
    if (name != t.name) r.fail("unexpected tensor '" + name + "', wanted '" + t.name + "'");
    const auto rank = r.get<std::uint32_t>();
    if (rank != t.dims.size()) r.fail("bad rank for " + t.name);
    for (auto d : t.dims) {
      if (r.get<std::uint32_t>() != d) r.fail("bad shape for " + t.name);
    }
  }
  for (const auto& t : expected)
    for (std::size_t i = 0; i < t.size; ++i) p.values[t.offset + i] = r.get<float>();
  if (r.remaining() != 0) r.fail("trailing bytes after checkpoint");
  return p;
}

void save_checkpoint(const std::string& path, const ToyModel& params) {
  io::write_file(path, encode_checkpoint(params));
}

ToyModel load_checkpoint(const std::string& path) { return decode_checkpoint(io::read_file(path)); }

template struct ToyModelParams<float>;
template struct ToyModelParams<double>;
template ToyModelParams<float> init_params<float>(std::size_t, std::size_t, Rng&);
template ToyModelParams<double> init_params<double>(std::size_t, std::size_t, Rng&);
template ForwardResult forward<float>(const ToyModelParams<float>&, std::span<const cplx>);
template ForwardResult forward<double>(const ToyModelParams<double>&, std::span<const cplx>);
template BackwardResult<float> backward<float>(const ToyModelParams<float>&, std::span<const cplx>,
                                               const SoftLabel&, unsigned);
template BackwardResult<double> backward<double>(const ToyModelParams<double>&, std::span<const cplx>,
                                                 const SoftLabel&, unsigned);
template std::vector<bool> relu_pattern<float>(const ToyModelParams<float>&, std::span<const cplx>);
template std::vector<bool> relu_pattern<double>(const ToyModelParams<double>&, std::span<const cplx>);

}  // namespace amclab
