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
#include <limits>
#include <string_view>
#include <utility>

#include "amclab/modem.hpp"
#include "amclab/rng.hpp"

namespace amclab {

// Floor applied to the noise variance of noiseless (SNR = +inf) frames.
inline constexpr double kMinSigma2 = 1e-12;
// Gains below this magnitude are flagged as deep fades.
inline constexpr double kDeepFadeThreshold = 1e-3;
// remove_fading refuses gains below this magnitude.
inline constexpr double kMinInvertibleGain = 1e-9;
inline constexpr double kDefaultRicianK = 4.0;

struct NoiseSpec {
  double snr_db = 0.0;
  // Per-real-component variance for a unit-power complex signal.
  double sigma2 = 0.5;
};

NoiseSpec noise_spec(double snr_db);

enum class FadingKind : std::uint8_t { kAwgnOnly = 0, kRayleigh = 1, kRician = 2 };

std::string_view fading_name(FadingKind kind);
FadingKind parse_fading(std::string_view name);

struct ChannelRealization {
  FadingKind kind = FadingKind::kAwgnOnly;
  cplx gain{1.0, 0.0};
  double rician_k = 0.0;
  NoiseSpec noise;
};

// Adds circular white gaussian noise with per-component variance
// noise_spec(snr_db).sigma2. For snr_db = +inf the frame is returned unchanged
// and sigma2 is kMinSigma2.
std::pair<IQFrame, NoiseSpec> apply_awgn(const IQFrame& frame, double snr_db, Rng& rng);

// Draws a flat (single complex tap) block-fading gain with E|gain|^2 = 1.
ChannelRealization draw_fading(FadingKind kind, double rician_k, Rng& rng);

IQFrame apply_fading(const IQFrame& frame, const ChannelRealization& realization);

struct FadingRemoval {
  IQFrame frame;
  // Noise of the equalized frame: sigma2 / |gain|^2.
  NoiseSpec noise;
};

// Genie equalization: divides by the known gain. Throws DeepFadeError when
// |gain| <= kMinInvertibleGain.
FadingRemoval remove_fading(const IQFrame& frame, const ChannelRealization& realization);

}  // namespace amclab
