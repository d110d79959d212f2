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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "amclab/error.hpp"

namespace amclab {
namespace {

constexpr std::size_t gray(std::size_t k) { return k ^ (k >> 1); }

std::vector<cplx> square_qam(std::size_t order) {
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(order))));
  const auto bits = static_cast<std::size_t>(std::lround(std::log2(static_cast<double>(side))));
  const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(order - 1) / 3.0);
  std::vector<cplx> points(order);
  for (std::size_t ki = 0; ki < side; ++ki) {
    for (std::size_t kq = 0; kq < side; ++kq) {
      const double re = 2.0 * static_cast<double>(ki) - static_cast<double>(side - 1);
      const double im = 2.0 * static_cast<double>(kq) - static_cast<double>(side - 1);
      points[(gray(ki) << bits) | gray(kq)] = cplx(re, im) * scale;
    }
  }
  return points;
}

std::vector<cplx> psk(std::size_t order) {
  std::vector<cplx> points(order);
  for (std::size_t k = 0; k < order; ++k) {
    points[gray(k)] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                          static_cast<double>(order));
  }
  return points;
}

std::size_t wrap(std::ptrdiff_t n, std::size_t len) {
  const auto l = static_cast<std::ptrdiff_t>(len);
  const std::ptrdiff_t m = n % l;
  return static_cast<std::size_t>(m < 0 ? m + l : m);
}

double rrc_value(double t, double beta) {
  using std::numbers::pi;
  if (std::abs(t) < 1e-12) return 1.0 - beta + 4.0 * beta / pi;
  if (beta > 0.0 && std::abs(std::abs(4.0 * beta * t) - 1.0) < 1e-9) {
    return beta / std::sqrt(2.0) *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) +
            (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
  }
  const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
  const double den = pi * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
  return num / den;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kBpsk: return "BPSK";
    case Scheme::kQpsk: return "QPSK";
    case Scheme::kPsk8: return "8PSK";
    case Scheme::kQam16: return "16QAM";
    case Scheme::kQam64: return "64QAM";
    case Scheme::kPam4: return "PAM4";
    case Scheme::kCpfsk: return "CPFSK";
  }
  throw ConfigError("unknown scheme id " + std::to_string(static_cast<int>(scheme)));
}

Scheme parse_scheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == upper) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

Constellation constellation(Scheme scheme) {
  Constellation c{scheme, {}, 0, true};
  switch (scheme) {
    case Scheme::kBpsk: c.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)}; break;
    case Scheme::kQpsk: c.points = square_qam(4); break;
    case Scheme::kPsk8: c.points = psk(8); break;
    case Scheme::kQam16: c.points = square_qam(16); break;
    case Scheme::kQam64: c.points = square_qam(64); break;
    case Scheme::kPam4: {
      c.points.resize(4);
      for (std::size_t k = 0; k < 4; ++k) {
        c.points[gray(k)] = cplx((2.0 * static_cast<double>(k) - 3.0) / std::sqrt(5.0), 0.0);
      }
      break;
    }
    case Scheme::kCpfsk:
      c.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
      c.ml_applicable = false;
      break;
    default:
      throw ConfigError("unknown scheme id " + std::to_string(static_cast<int>(scheme)));
  }
  c.state_count = c.points.size();
  return c;
}

std::vector<cplx> draw_symbols(Scheme scheme, std::size_t count, Rng& rng) {
  if (count == 0) throw ParameterError("draw_symbols: count must be >= 1");
  const Constellation c = constellation(scheme);
  std::uniform_int_distribution<std::size_t> pick(0, c.state_count - 1);
  std::vector<cplx> out(count);
  for (auto& s : out) s = c.points[pick(rng)];
  return out;
}

FilterTaps design_rrc(double rolloff, int sps, int span_symbols) {
  if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw ParameterError("design_rrc: rolloff must be in [0, 1]");
  if (sps < 2) throw ParameterError("design_rrc: sps must be >= 2");
  if (span_symbols < 2 || span_symbols % 2 != 0) {
    throw ParameterError("design_rrc: span_symbols must be a positive even integer");
  }
  const int half = span_symbols * sps / 2;
  FilterTaps f{std::vector<double>(static_cast<std::size_t>(2 * half + 1)), sps, rolloff, span_symbols};
  double energy = 0.0;
  for (int n = 0; n <= half; ++n) {
    const double v = rrc_value(static_cast<double>(n) / sps, rolloff);
    f.taps[static_cast<std::size_t>(half + n)] = v;
    f.taps[static_cast<std::size_t>(half - n)] = v;
  }
  for (double v : f.taps) energy += v * v;
  const double norm = 1.0 / std::sqrt(energy);
  for (double& v : f.taps) v *= norm;
  return f;
}

IQFrame pulse_shape(std::span<const cplx> symbols, const FilterTaps& taps, int sps) {
  if (symbols.empty()) throw ParameterError("pulse_shape: empty symbol sequence");
  if (taps.sps != sps) throw ParameterError("pulse_shape: taps were designed for a different sps");
  const std::size_t len = symbols.size() * static_cast<std::size_t>(sps);
  const auto half = static_cast<std::ptrdiff_t>(taps.taps.size() / 2);
  const double gain = std::sqrt(static_cast<double>(sps));
  IQFrame out;
  out.samples.assign(len, cplx(0.0, 0.0));
  for (std::size_t t = 0; t < symbols.size(); ++t) {
    const cplx s = symbols[t] * gain;
    std::size_t n = wrap(static_cast<std::ptrdiff_t>(t) * sps - half, len);
    for (double h : taps.taps) {
      out.samples[n] += s * h;
      if (++n == len) n = 0;
    }
  }
  return out;
}

std::vector<cplx> matched_filter(std::span<const cplx> frame, const FilterTaps& taps, int sps) {
  if (taps.sps != sps) throw ParameterError("matched_filter: taps were designed for a different sps");
  if (frame.size() < static_cast<std::size_t>(sps) || frame.size() % static_cast<std::size_t>(sps) != 0) {
    throw ParameterError("matched_filter: frame length " + std::to_string(frame.size()) +
                         " is not a positive multiple of sps " + std::to_string(sps));
  }
  const std::size_t len = frame.size();
  const std::size_t count = len / static_cast<std::size_t>(sps);
  const auto half = static_cast<std::ptrdiff_t>(taps.taps.size() / 2);
  const double gain = 1.0 / std::sqrt(static_cast<double>(sps));
  std::vector<cplx> out(count);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t n = wrap(static_cast<std::ptrdiff_t>(t) * sps - half, len);
    double re = 0.0;
    double im = 0.0;
    for (double h : taps.taps) {
      re += h * frame[n].real();
      im += h * frame[n].imag();
      if (++n == len) n = 0;
    }
    out[t] = cplx(re, im) * gain;
  }
  return out;
}

std::vector<cplx> matched_filter_adjoint(std::span<const cplx> symbol_grad, const FilterTaps& taps,
                                         int sps) {
  // The correlation is the transpose of the zero-stuffed convolution, so the
  // adjoint is the transmit filter with the receive gain.
  IQFrame shaped = pulse_shape(symbol_grad, taps, sps);
  const double scale = 1.0 / static_cast<double>(sps);
  for (auto& v : shaped.samples) v *= scale;
  return std::move(shaped.samples);
}

double matched_filter_noise_gain(const FilterTaps& taps, int sps) {
  double energy = 0.0;
  for (double h : taps.taps) energy += h * h;
  return energy / static_cast<double>(sps);
}

IQFrame synth_cpfsk(std::span<const std::uint8_t> bits, int sps, double mod_index) {
  if (bits.empty()) throw ParameterError("synth_cpfsk: empty bit sequence");
  if (sps < 1) throw ParameterError("synth_cpfsk: sps must be >= 1");
  if (!(mod_index > 0.0)) throw ParameterError("synth_cpfsk: modulation index must be > 0");
  IQFrame out;
  out.samples.reserve(bits.size() * static_cast<std::size_t>(sps));
  const double step = std::numbers::pi * mod_index / static_cast<double>(sps);
  double phase = 0.0;
  for (std::uint8_t b : bits) {
    const double dir = b != 0 ? 1.0 : -1.0;
    for (int k = 0; k < sps; ++k) {
      out.samples.push_back(std::polar(1.0, phase));
      phase = std::remainder(phase + dir * step, 2.0 * std::numbers::pi);
    }
  }
  return out;
}

double mean_power(std::span<const cplx> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const cplx& v : samples) acc += std::norm(v);
  return acc / static_cast<double>(samples.size());
}

}  // namespace amclab
