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

#include "amclab/channel.hpp"

#include <cmath>
#include <string>

#include "amclab/error.hpp"

namespace amclab {

NoiseSpec noise_spec(double snr_db) {
  if (std::isnan(snr_db)) throw ParameterError("noise_spec: SNR is NaN");
  if (std::isinf(snr_db) && snr_db > 0) return {snr_db, kMinSigma2};
  return {snr_db, std::max(std::pow(10.0, -snr_db / 10.0) / 2.0, kMinSigma2)};
}

std::string_view fading_name(FadingKind kind) {
  switch (kind) {
    case FadingKind::kAwgnOnly: return "awgn_only";
    case FadingKind::kRayleigh: return "rayleigh";
    case FadingKind::kRician: return "rician";
  }
  throw ConfigError("unknown fading kind " + std::to_string(static_cast<int>(kind)));
}

FadingKind parse_fading(std::string_view name) {
  for (FadingKind k : {FadingKind::kAwgnOnly, FadingKind::kRayleigh, FadingKind::kRician}) {
    if (fading_name(k) == name) return k;
  }
  throw ConfigError("unknown channel kind '" + std::string(name) + "'");
}

std::pair<IQFrame, NoiseSpec> apply_awgn(const IQFrame& frame, double snr_db, Rng& rng) {
  const NoiseSpec spec = noise_spec(snr_db);
  IQFrame out = frame;
  if (std::isinf(snr_db)) return {std::move(out), spec};
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.sigma2));
  for (auto& v : out.samples) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += cplx(re, im);
  }
  return {std::move(out), spec};
}

ChannelRealization draw_fading(FadingKind kind, double rician_k, Rng& rng) {
  if (!(rician_k >= 0.0)) throw ParameterError("draw_fading: Rician K-factor must be >= 0");
  ChannelRealization h;
  h.kind = kind;
  switch (kind) {
    case FadingKind::kAwgnOnly:
      h.gain = cplx(1.0, 0.0);
      break;
    case FadingKind::kRayleigh: {
      std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
      const double re = normal(rng);
      const double im = normal(rng);
      h.gain = cplx(re, im);
      break;
    }
    case FadingKind::kRician: {
      h.rician_k = rician_k;
      std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / (rician_k + 1.0)));
      const double re = normal(rng);
      const double im = normal(rng);
      h.gain = cplx(std::sqrt(rician_k / (rician_k + 1.0)) + re, im);
      break;
    }
    default:
      throw ParameterError("draw_fading: unknown fading kind");
  }
  return h;
}

IQFrame apply_fading(const IQFrame& frame, const ChannelRealization& realization) {
  IQFrame out = frame;
  for (auto& v : out.samples) v *= realization.gain;
  return out;
}

FadingRemoval remove_fading(const IQFrame& frame, const ChannelRealization& realization) {
  const double mag = std::abs(realization.gain);
  if (!(mag > kMinInvertibleGain)) {
    throw DeepFadeError("remove_fading: |gain| = " + std::to_string(mag) + " is not invertible");
  }
  FadingRemoval out{frame, realization.noise};
  for (auto& v : out.frame.samples) v /= realization.gain;
  out.noise.sigma2 = realization.noise.sigma2 / (mag * mag);
  return out;
}

}  // namespace amclab
