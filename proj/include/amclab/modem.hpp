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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "amclab/rng.hpp"

namespace amclab {

using cplx = std::complex<double>;

enum class Scheme : std::uint8_t {
  kBpsk = 0,
  kQpsk = 1,
  kPsk8 = 2,
  kQam16 = 3,
  kQam64 = 4,
  kPam4 = 5,
  kCpfsk = 6,
};

inline constexpr Scheme kAllSchemes[] = {Scheme::kBpsk,  Scheme::kQpsk,  Scheme::kPsk8,
                                         Scheme::kQam16, Scheme::kQam64, Scheme::kPam4,
                                         Scheme::kCpfsk};

std::string_view scheme_name(Scheme scheme);
// Accepts the names produced by scheme_name, case-insensitively.
Scheme parse_scheme(std::string_view name);

struct Constellation {
  Scheme scheme;
  std::vector<cplx> points;
  std::size_t state_count = 0;
  // False for schemes whose states are not a memoryless symbol alphabet.
  bool ml_applicable = true;
};

// Unit-mean-power alphabet with a deterministic, Gray-coded point order.
// CPFSK reports its binary frequency alphabet {+1, -1}.
Constellation constellation(Scheme scheme);

struct SymbolSequence {
  std::vector<cplx> symbols;
  Scheme scheme;
};

std::vector<cplx> draw_symbols(Scheme scheme, std::size_t count, Rng& rng);

inline constexpr int kDefaultRrcSpan = 64;

struct FilterTaps {
  std::vector<double> taps;
  int sps = 0;
  double rolloff = 0.0;
  int span_symbols = 0;
};

// Root-raised-cosine taps sampled at sps per symbol over span_symbols symbols,
// normalized to unit energy.
FilterTaps design_rrc(double rolloff, int sps, int span_symbols = kDefaultRrcSpan);

struct IQFrame {
  std::vector<cplx> samples;
  double sample_rate_hz = 200e3;
};

// Transmit filter r'. Zero-stuffs by sps and convolves circularly over the
// frame, so the output has exactly symbols.size() * sps samples and symbol t
// is centered on sample t * sps. Gain sqrt(sps) makes the expected power of a
// unit-power i.i.d. symbol stream exactly 1. Linear in the symbols.
IQFrame pulse_shape(std::span<const cplx> symbols, const FilterTaps& taps, int sps);

// Receive filter r: circular correlation with the taps sampled at the symbol
// instants, scaled by 1/sqrt(sps) so r(pulse_shape(s)) ~= s. Linear.
std::vector<cplx> matched_filter(std::span<const cplx> frame, const FilterTaps& taps, int sps);

// Adjoint of matched_filter: <matched_filter(x), z> == <x, adjoint(z)>.
std::vector<cplx> matched_filter_adjoint(std::span<const cplx> symbol_grad,
                                         const FilterTaps& taps, int sps);

// Ratio of the per-component noise variance at the matched-filter output to
// the per-component variance of white noise at its input.
double matched_filter_noise_gain(const FilterTaps& taps, int sps);

inline constexpr double kDefaultCpfskIndex = 0.5;

// Continuous-phase FSK with a rectangular frequency pulse. bits[t] != 0 maps
// to +1 frequency deviation. Starts at phase 0, unit envelope.
IQFrame synth_cpfsk(std::span<const std::uint8_t> bits, int sps,
                    double mod_index = kDefaultCpfskIndex);

double mean_power(std::span<const cplx> samples);

}  // namespace amclab
