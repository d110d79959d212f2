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

#include "amclab/modem.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "amclab/error.hpp"
#include "amclab/rng.hpp"

namespace amclab {
namespace {

// Raised-cosine cascade r(r'(.)) sampled at symbol spacing, relative to the
// centre tap.
double worst_isi(const FilterTaps& taps) {
  const auto& h = taps.taps;
  const std::size_t n = h.size();
  std::vector<double> full(2 * n - 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) full[i + j] += h[i] * h[j];
  const std::size_t centre = n - 1;
  double worst = 0.0;
  for (std::size_t k = static_cast<std::size_t>(taps.sps); k <= centre; k += taps.sps) {
    worst = std::max({worst, std::abs(full[centre + k]), std::abs(full[centre - k])});
  }
  return worst / std::abs(full[centre]);
}

TEST(ConstellationTest, Bpsk) {
  const auto c = constellation(Scheme::kBpsk);
  ASSERT_EQ(2u, c.points.size());
  EXPECT_EQ(cplx(1.0, 0.0), c.points[0]);
  EXPECT_EQ(cplx(-1.0, 0.0), c.points[1]);
  EXPECT_TRUE(c.ml_applicable);
}

TEST(ConstellationTest, QpskIsUnitSquare) {
  const auto c = constellation(Scheme::kQpsk);
  ASSERT_EQ(4u, c.points.size());
  const double a = 1.0 / std::sqrt(2.0);
  for (const auto& p : c.points) {
    EXPECT_NEAR(a, std::abs(p.real()), 1e-15);
    EXPECT_NEAR(a, std::abs(p.imag()), 1e-15);
  }
}

TEST(ConstellationTest, Pam4Levels) {
  const auto c = constellation(Scheme::kPam4);
  ASSERT_EQ(4u, c.points.size());
  std::vector<double> levels;
  for (const auto& p : c.points) {
    EXPECT_EQ(0.0, p.imag());
    levels.push_back(p.real());
  }
  std::sort(levels.begin(), levels.end());
  const double s = std::sqrt(5.0);
  EXPECT_NEAR(-3.0 / s, levels[0], 1e-15);
  EXPECT_NEAR(-1.0 / s, levels[1], 1e-15);
  EXPECT_NEAR(1.0 / s, levels[2], 1e-15);
  EXPECT_NEAR(3.0 / s, levels[3], 1e-15);
  // (1 + 9) / 2 * (1 / 5)
  double power = 0.0;
  for (const auto& p : c.points) power += std::norm(p);
  EXPECT_NEAR(1.0, power / 4.0, 1e-15);
}

TEST(ConstellationTest, EveryAlphabetHasUnitMeanPower) {
  for (Scheme s : kAllSchemes) {
    const auto c = constellation(s);
    double power = 0.0;
    for (const auto& p : c.points) power += std::norm(p);
    EXPECT_NEAR(1.0, power / static_cast<double>(c.points.size()), 1e-12) << scheme_name(s);
    EXPECT_EQ(c.points.size(), c.state_count) << scheme_name(s);
  }
  EXPECT_EQ(8u, constellation(Scheme::kPsk8).points.size());
  EXPECT_EQ(16u, constellation(Scheme::kQam16).points.size());
  EXPECT_EQ(64u, constellation(Scheme::kQam64).points.size());
  EXPECT_FALSE(constellation(Scheme::kCpfsk).ml_applicable);
}

TEST(ConstellationTest, GrayOrderedNeighbours) {
  // Nearest neighbours differ in exactly one label bit.
  for (Scheme s : {Scheme::kQpsk, Scheme::kPsk8, Scheme::kQam16, Scheme::kQam64, Scheme::kPam4}) {
    const auto c = constellation(s);
    double dmin = 1e9;
    for (std::size_t i = 0; i < c.points.size(); ++i)
      for (std::size_t j = i + 1; j < c.points.size(); ++j) dmin = std::min(dmin, std::abs(c.points[i] - c.points[j]));
    for (std::size_t i = 0; i < c.points.size(); ++i)
      for (std::size_t j = i + 1; j < c.points.size(); ++j) {
        if (std::abs(c.points[i] - c.points[j]) < dmin * (1 + 1e-9)) {
          EXPECT_EQ(1, std::popcount(i ^ j)) << scheme_name(s) << " " << i << " " << j;
        }
      }
  }
}

TEST(ConstellationTest, NamesRoundTrip) {
  for (Scheme s : kAllSchemes) EXPECT_EQ(s, parse_scheme(scheme_name(s)));
  EXPECT_EQ(Scheme::kQam16, parse_scheme("16qam"));
  EXPECT_THROW(parse_scheme("GMSK"), ConfigError);
  EXPECT_THROW(constellation(static_cast<Scheme>(42)), ConfigError);
}

TEST(DrawSymbolsTest, Deterministic) {
  Rng a(7), b(7);
  EXPECT_EQ(draw_symbols(Scheme::kBpsk, 4, a), draw_symbols(Scheme::kBpsk, 4, b));
}

TEST(DrawSymbolsTest, QpskFrequenciesUniform) {
  Rng rng(123);
  const auto s = draw_symbols(Scheme::kQpsk, 100000, rng);
  std::map<std::pair<int, int>, int> counts;
  for (const auto& z : s) counts[{z.real() > 0, z.imag() > 0}]++;
  ASSERT_EQ(4u, counts.size());
  for (const auto& [k, n] : counts) EXPECT_NEAR(0.25, n / 1e5, 0.005);
}

TEST(DrawSymbolsTest, SinglePam4PointIsMember) {
  Rng rng(5);
  const auto s = draw_symbols(Scheme::kPam4, 1, rng);
  ASSERT_EQ(1u, s.size());
  const auto c = constellation(Scheme::kPam4);
  EXPECT_NE(c.points.end(), std::find(c.points.begin(), c.points.end(), s[0]));
  EXPECT_THROW(draw_symbols(Scheme::kPam4, 0, rng), ParameterError);
}

TEST(RrcTest, SymmetricUnitEnergy) {
  for (double beta : {0.0, 0.15, 0.25, 0.35, 0.45, 1.0}) {
    for (int sps : {2, 4, 8, 16}) {
      const auto f = design_rrc(beta, sps, 12);
      const auto& h = f.taps;
      ASSERT_EQ(static_cast<std::size_t>(12 * sps + 1), h.size());
      double e = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        EXPECT_NEAR(h[i], h[h.size() - 1 - i], 1e-12);
        EXPECT_TRUE(std::isfinite(h[i]));
        e += h[i] * h[i];
      }
      EXPECT_NEAR(1.0, e, 1e-12);
    }
  }
}

TEST(RrcTest, SingularPointsAreFinite) {
  // t = +/- 1 / (4 beta) lands on a tap for beta = 0.25, sps = 4.
  const auto f = design_rrc(0.25, 4, 16);
  for (double v : f.taps) EXPECT_TRUE(std::isfinite(v));
  const std::size_t c = f.taps.size() / 2;
  EXPECT_GT(f.taps[c], f.taps[c + 4]);
}

TEST(RrcTest, ZeroRolloffIsSincLike) {
  const auto f = design_rrc(0.0, 8, 12);
  const std::size_t c = f.taps.size() / 2;
  // sinc zeros at integer symbol offsets.
  for (std::size_t k = 1; k <= 6; ++k) EXPECT_NEAR(0.0, f.taps[c + 8 * k] / f.taps[c], 1e-12);
}

TEST(RrcTest, DefaultSpanIsNyquist) {
  for (double beta : {0.15, 0.25, 0.35, 0.45}) {
    for (int sps : {2, 4, 8, 16}) {
      EXPECT_LT(worst_isi(design_rrc(beta, sps)), 1e-3) << beta << " " << sps;
    }
  }
}

TEST(RrcTest, InvalidArguments) {
  EXPECT_THROW(design_rrc(-0.1, 8), ParameterError);
  EXPECT_THROW(design_rrc(1.5, 8), ParameterError);
  EXPECT_THROW(design_rrc(0.35, 1), ParameterError);
  EXPECT_THROW(design_rrc(0.35, 8, 0), ParameterError);
  EXPECT_THROW(design_rrc(0.35, 8, 7), ParameterError);
}

TEST(PulseShapeTest, RoundTripRecoversSymbols) {
  Rng rng(9);
  for (int sps : {2, 4, 8, 16}) {
    const auto taps = design_rrc(0.35, sps);
    const auto s = draw_symbols(Scheme::kQam16, 32, rng);
    const auto frame = pulse_shape(s, taps, sps);
    ASSERT_EQ(s.size() * static_cast<std::size_t>(sps), frame.samples.size());
    const auto z = matched_filter(frame.samples, taps, sps);
    ASSERT_EQ(s.size(), z.size());
    double err = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) err += std::norm(z[t] - s[t]);
    EXPECT_LT(std::sqrt(err / static_cast<double>(s.size())), 1e-3) << sps;
  }
}

TEST(PulseShapeTest, ZeroSymbolsGiveZeroFrame) {
  const auto taps = design_rrc(0.35, 8);
  const std::vector<cplx> s(16, cplx{});
  for (const auto& v : pulse_shape(s, taps, 8).samples) EXPECT_EQ(cplx{}, v);
  EXPECT_THROW(pulse_shape(std::vector<cplx>{}, taps, 8), ParameterError);
  EXPECT_THROW(pulse_shape(s, taps, 4), ParameterError);
}

TEST(PulseShapeTest, ExpectedPowerIsOne) {
  Rng rng(11);
  const auto taps = design_rrc(0.35, 8);
  double total = 0.0;
  const int frames = 4000;
  for (int i = 0; i < frames; ++i) {
    total += mean_power(pulse_shape(draw_symbols(Scheme::kQpsk, 32, rng), taps, 8).samples);
  }
  EXPECT_NEAR(1.0, total / frames, 0.01);
}

TEST(PulseShapeTest, Linear) {
  Rng rng(13);
  const auto taps = design_rrc(0.25, 4);
  const auto a = draw_symbols(Scheme::kPsk8, 20, rng);
  const auto b = draw_symbols(Scheme::kQam64, 20, rng);
  std::vector<cplx> mix(20);
  const cplx alpha(0.3, -1.2);
  for (std::size_t i = 0; i < 20; ++i) mix[i] = alpha * a[i] + b[i];
  const auto fa = pulse_shape(a, taps, 4).samples;
  const auto fb = pulse_shape(b, taps, 4).samples;
  const auto fm = pulse_shape(mix, taps, 4).samples;
  for (std::size_t n = 0; n < fm.size(); ++n) EXPECT_NEAR(0.0, std::abs(fm[n] - (alpha * fa[n] + fb[n])), 1e-12);
}

TEST(MatchedFilterTest, ZeroFrameGivesZeroSymbols) {
  const auto taps = design_rrc(0.35, 8);
  for (const auto& v : matched_filter(std::vector<cplx>(64), taps, 8)) EXPECT_EQ(cplx{}, v);
  EXPECT_THROW(matched_filter(std::vector<cplx>(63), taps, 8), ParameterError);
}

TEST(MatchedFilterTest, AdjointIdentity) {
  Rng rng(17);
  std::normal_distribution<double> n;
  for (int sps : {2, 8}) {
    const auto taps = design_rrc(0.3, sps);
    std::vector<cplx> x(32 * static_cast<std::size_t>(sps)), z(32);
    for (auto& v : x) v = {n(rng), n(rng)};
    for (auto& v : z) v = {n(rng), n(rng)};
    const auto rx = matched_filter(x, taps, sps);
    const auto az = matched_filter_adjoint(z, taps, sps);
    cplx lhs{}, rhs{};
    for (std::size_t t = 0; t < z.size(); ++t) lhs += rx[t] * std::conj(z[t]);
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * std::conj(az[i]);
    EXPECT_NEAR(0.0, std::abs(lhs - rhs), 1e-10 * std::abs(lhs));
  }
}

TEST(MatchedFilterTest, NoiseGainMatchesMonteCarlo) {
  Rng rng(19);
  std::normal_distribution<double> n;
  const auto taps = design_rrc(0.35, 8);
  const double gain = matched_filter_noise_gain(taps, 8);
  EXPECT_NEAR(1.0 / 8.0, gain, 1e-12);
  double acc = 0.0;
  std::size_t count = 0;
  for (int f = 0; f < 400; ++f) {
    std::vector<cplx> w(256);
    for (auto& v : w) v = {n(rng), n(rng)};
    for (const auto& z : matched_filter(w, taps, 8)) {
      acc += z.real() * z.real();
      ++count;
    }
  }
  EXPECT_NEAR(gain, acc / static_cast<double>(count), 0.05 * gain);
}

TEST(CpfskTest, ConstantEnvelope) {
  std::vector<std::uint8_t> bits = {1, 0, 0, 1, 1, 1, 0, 1};
  for (const auto& v : synth_cpfsk(bits, 8).samples) EXPECT_NEAR(1.0, std::abs(v), 1e-12);
}

TEST(CpfskTest, ConstantBitsGiveConstantTone) {
  const std::vector<std::uint8_t> bits(16, 1);
  const auto x = synth_cpfsk(bits, 8, 0.5).samples;
  ASSERT_EQ(128u, x.size());
  EXPECT_NEAR(0.0, std::arg(x[0]), 1e-15);
  const double step = std::numbers::pi * 0.5 / 8;
  for (std::size_t n = 1; n < x.size(); ++n) {
    EXPECT_NEAR(step, std::arg(x[n] * std::conj(x[n - 1])), 1e-12);
  }
  EXPECT_THROW(synth_cpfsk(std::vector<std::uint8_t>{}, 8), ParameterError);
}

}  // namespace
}  // namespace amclab
