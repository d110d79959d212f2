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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "amclab/error.hpp"

namespace amclab {
namespace {

IQFrame unit_tone(std::size_t n) {
  IQFrame f;
  for (std::size_t i = 0; i < n; ++i) f.samples.push_back(std::polar(1.0, 0.1 * static_cast<double>(i)));
  return f;
}

TEST(NoiseSpecTest, ZeroDbIsHalfPerComponent) {
  EXPECT_DOUBLE_EQ(0.5, noise_spec(0.0).sigma2);
  EXPECT_NEAR(0.05, noise_spec(10.0).sigma2, 1e-15);
  EXPECT_THROW(noise_spec(std::nan("")), ParameterError);
}

TEST(NoiseSpecTest, InfiniteSnrIsFloored) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(kMinSigma2, noise_spec(inf).sigma2);
  Rng rng(1);
  const auto f = unit_tone(64);
  const auto [out, spec] = apply_awgn(f, inf, rng);
  EXPECT_EQ(f.samples, out.samples);
  EXPECT_EQ(1e-12, spec.sigma2);
}

TEST(AwgnTest, EmpiricalVarianceMatches) {
  Rng rng(2);
  IQFrame zero;
  zero.samples.assign(200000, cplx{});
  const auto [out, spec] = apply_awgn(zero, 3.0, rng);
  double re = 0.0, im = 0.0, cross = 0.0;
  for (const auto& v : out.samples) {
    re += v.real() * v.real();
    im += v.imag() * v.imag();
    cross += v.real() * v.imag();
  }
  const double n = static_cast<double>(out.samples.size());
  EXPECT_NEAR(spec.sigma2, re / n, 0.01 * spec.sigma2);
  EXPECT_NEAR(spec.sigma2, im / n, 0.01 * spec.sigma2);
  EXPECT_NEAR(0.0, cross / n, 0.01 * spec.sigma2);
}

TEST(AwgnTest, SeededRunsRepeat) {
  Rng a(3), b(3);
  const auto f = unit_tone(32);
  EXPECT_EQ(apply_awgn(f, 5.0, a).first.samples, apply_awgn(f, 5.0, b).first.samples);
}

TEST(FadingTest, AwgnOnlyIsExactlyUnity) {
  Rng rng(4);
  EXPECT_EQ(cplx(1.0, 0.0), draw_fading(FadingKind::kAwgnOnly, 4.0, rng).gain);
}

TEST(FadingTest, RicianLargeKIsDeterministic) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) EXPECT_LT(std::abs(draw_fading(FadingKind::kRician, 1e9, rng).gain - 1.0), 1e-3);
}

TEST(FadingTest, UnitMeanPower) {
  Rng rng(6);
  for (FadingKind kind : {FadingKind::kRayleigh, FadingKind::kRician}) {
    double acc = 0.0;
    for (int i = 0; i < 100000; ++i) acc += std::norm(draw_fading(kind, kDefaultRicianK, rng).gain);
    EXPECT_NEAR(1.0, acc / 1e5, 0.02) << fading_name(kind);
  }
}

TEST(FadingTest, RicianLineOfSightMean) {
  Rng rng(7);
  cplx mean{};
  for (int i = 0; i < 100000; ++i) mean += draw_fading(FadingKind::kRician, 4.0, rng).gain;
  mean /= 1e5;
  EXPECT_NEAR(std::sqrt(0.8), mean.real(), 0.01);
  EXPECT_NEAR(0.0, mean.imag(), 0.01);
}

TEST(FadingTest, NegativeKRejected) {
  Rng rng(8);
  EXPECT_THROW(draw_fading(FadingKind::kRician, -1.0, rng), ParameterError);
}

TEST(FadingTest, ApplyScalesPower) {
  const auto f = unit_tone(16);
  ChannelRealization h;
  EXPECT_EQ(f.samples, apply_fading(f, h).samples);
  h.gain = std::polar(0.5, 0.7);
  const auto g = apply_fading(f, h);
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    EXPECT_NEAR(0.25 * std::norm(f.samples[i]), std::norm(g.samples[i]), 1e-15);
  }
}

TEST(FadingTest, RemoveInvertsApply) {
  const auto f = unit_tone(16);
  ChannelRealization h;
  h.gain = cplx(0.3, -0.4);
  h.noise = noise_spec(10.0);
  const auto back = remove_fading(apply_fading(f, h), h);
  for (std::size_t i = 0; i < f.samples.size(); ++i) EXPECT_NEAR(0.0, std::abs(back.frame.samples[i] - f.samples[i]), 1e-14);
  EXPECT_NEAR(0.05 / 0.25, back.noise.sigma2, 1e-15);
}

TEST(FadingTest, PureAwgnRemovalIsIdentity) {
  const auto f = unit_tone(16);
  ChannelRealization h;
  EXPECT_EQ(f.samples, remove_fading(f, h).frame.samples);
}

TEST(FadingTest, DeepFadeRejected) {
  ChannelRealization h;
  h.gain = cplx(1e-10, 0.0);
  EXPECT_THROW(remove_fading(unit_tone(4), h), DeepFadeError);
  try {
    remove_fading(unit_tone(4), h);
  } catch (const Error& e) {
    EXPECT_EQ("deep_fade", e.kind());
  }
}

TEST(FadingTest, NamesRoundTrip) {
  for (FadingKind k : {FadingKind::kAwgnOnly, FadingKind::kRayleigh, FadingKind::kRician}) {
    EXPECT_EQ(k, parse_fading(fading_name(k)));
  }
  EXPECT_THROW(parse_fading("nakagami"), ConfigError);
}

}  // namespace
}  // namespace amclab
