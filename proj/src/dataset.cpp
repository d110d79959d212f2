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

#include "amclab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "amclab/binary_io.hpp"
#include "amclab/error.hpp"
#include "amclab/parallel.hpp"
#include "amclab/rng.hpp"

namespace amclab {
namespace {

constexpr char kDatasetMagic[4] = {'A', 'M', 'C', 'D'};
constexpr std::uint8_t kFlagDeepFade = 1;
constexpr std::uint8_t kFlagHasMl = 2;

double to_float_precision(double v) { return static_cast<double>(static_cast<float>(v)); }

void quantize(std::vector<cplx>& v) {
  for (auto& s : v) s = cplx(to_float_precision(s.real()), to_float_precision(s.imag()));
}

SoftLabel quantized(SoftLabel l) {
  for (double& p : l.probs) p = to_float_precision(p);
  return l;
}

}  // namespace

std::vector<Scheme> default_schemes() {
  return {Scheme::kBpsk, Scheme::kQpsk, Scheme::kPsk8, Scheme::kQam16,
          Scheme::kQam64, Scheme::kPam4, Scheme::kCpfsk};
}

ScenarioConfig scenario_preset(std::string_view name) {
  ScenarioConfig s;
  s.schemes = default_schemes();
  for (int snr = -6; snr <= 18; snr += 2) s.snr_grid_db.push_back(snr);
  s.sps_choices = {8};
  s.rolloff_lo = s.rolloff_hi = 0.35;
  s.channel_kinds = {FadingKind::kAwgnOnly};
  if (name == "s1") {
    s.name = "s1";
  } else if (name == "s2") {
    s.name = "s2";
    s.sps_choices = {2, 4, 8, 16};
    s.rolloff_lo = 0.15;
    s.rolloff_hi = 0.45;
  } else if (name == "s3") {
    s.name = "s3";
    s.channel_kinds = {FadingKind::kAwgnOnly, FadingKind::kRayleigh, FadingKind::kRician};
  } else {
    throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
  }
  return s;
}

void validate(const ScenarioConfig& s) {
  if (s.schemes.empty() || s.snr_grid_db.empty() || s.sps_choices.empty() || s.channel_kinds.empty()) {
    throw ConfigError("scenario: every grid must be non-empty");
  }
  SchemeSet check(s.schemes);
  if (s.frames_per_combo == 0) throw ConfigError("scenario: frames_per_combo must be >= 1");
  if (!(s.rolloff_lo >= 0.0 && s.rolloff_lo <= s.rolloff_hi && s.rolloff_hi <= 1.0)) {
    throw ConfigError("scenario: rolloff range must satisfy 0 <= lo <= hi <= 1");
  }
  if (s.frame_length == 0 || s.frame_length % 8 != 0) {
    throw ConfigError("scenario: frame_length must be a positive multiple of 8");
  }
  for (int sps : s.sps_choices) {
    if (sps < 2 || s.frame_length % static_cast<std::size_t>(sps) != 0) {
      throw ConfigError("scenario: sps " + std::to_string(sps) + " must be >= 2 and divide frame_length");
    }
  }
  for (double snr : s.snr_grid_db) {
    if (std::isnan(snr)) throw ConfigError("scenario: NaN SNR");
  }
  if (!(s.rician_k >= 0.0)) throw ConfigError("scenario: rician_k must be >= 0");
  if (s.rrc_span < 2 || s.rrc_span % 2 != 0) throw ConfigError("scenario: rrc_span must be even");
  if (!(s.cpfsk_index > 0.0)) throw ConfigError("scenario: cpfsk_index must be > 0");
}

std::size_t record_count(const ScenarioConfig& s) {
  return s.schemes.size() * s.snr_grid_db.size() * s.sps_choices.size() * s.channel_kinds.size() *
         s.frames_per_combo;
}

std::string describe(const ScenarioConfig& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  std::vector<std::string> schemes;
  for (Scheme sc : s.schemes) schemes.emplace_back(scheme_name(sc));
  j["schemes"] = schemes;
  j["snr_grid_db"] = s.snr_grid_db;
  j["sps_choices"] = s.sps_choices;
  j["rolloff_range"] = {s.rolloff_lo, s.rolloff_hi};
  std::vector<std::string> kinds;
  for (FadingKind k : s.channel_kinds) kinds.emplace_back(fading_name(k));
  j["channel_kinds"] = kinds;
  j["rician_k"] = s.rician_k;
  j["frames_per_combo"] = s.frames_per_combo;
  j["frame_length"] = s.frame_length;
  j["master_seed"] = s.master_seed;
  j["rrc_span"] = s.rrc_span;
  j["cpfsk_index"] = s.cpfsk_index;
  j["sample_rate_hz"] = s.sample_rate_hz;
  return j.dump();
}

std::uint64_t scenario_hash(const ScenarioConfig& s) {
  const std::string text = describe(s);
  return io::fnv1a64(text.data(), text.size());
}

ChannelRealization realization(const RecordMeta& meta) {
  ChannelRealization h;
  h.kind = meta.channel;
  h.gain = meta.gain;
  h.rician_k = meta.rician_k;
  h.noise = NoiseSpec{meta.snr_db, meta.sigma2};
  return h;
}

FilterTaps receive_filter(const RecordMeta& meta) {
  return design_rrc(meta.rolloff, static_cast<int>(meta.sps), static_cast<int>(meta.rrc_span));
}

double label_sigma2(const RecordMeta& meta) {
  return symbol_noise_variance(realization(meta), receive_filter(meta));
}

std::vector<cplx> receive_symbols(const RecordMeta& meta, std::span<const cplx> frame) {
  IQFrame x{std::vector<cplx>(frame.begin(), frame.end())};
  const FadingRemoval g = remove_fading(x, realization(meta));
  return matched_filter(g.frame.samples, receive_filter(meta), static_cast<int>(meta.sps));
}

SoftLabel as_stored_precision(const SoftLabel& label) {
  SoftLabel out = quantized(label);
  double total = 0.0;
  for (double p : out.probs) total += p;
  if (!(total > 0.0)) throw DegenerateInputError("label has no mass");
  for (double& p : out.probs) p /= total;
  return out;
}

RecordSynthesis synthesize_record(const ScenarioConfig& s, const SchemeSet& set, std::size_t index) {
  std::size_t rest = index;
  const std::size_t frame_i = rest % s.frames_per_combo;
  rest /= s.frames_per_combo;
  const std::size_t kind_i = rest % s.channel_kinds.size();
  rest /= s.channel_kinds.size();
  const std::size_t sps_i = rest % s.sps_choices.size();
  rest /= s.sps_choices.size();
  const std::size_t snr_i = rest % s.snr_grid_db.size();
  rest /= s.snr_grid_db.size();
  const std::size_t cls = rest;
  if (cls >= s.schemes.size()) throw ParameterError("synthesize_record: index out of range");
  (void)frame_i;

  const std::uint64_t seed = derive_seed(s.master_seed, index);
  Rng rng(seed);
  RecordMeta meta;
  meta.scheme = s.schemes[cls];
  meta.class_index = static_cast<std::uint32_t>(set.index_of(meta.scheme));
  meta.snr_db = s.snr_grid_db[snr_i];
  meta.sps = static_cast<std::uint32_t>(s.sps_choices[sps_i]);
  meta.rrc_span = static_cast<std::uint32_t>(s.rrc_span);
  meta.channel = s.channel_kinds[kind_i];
  meta.seed = seed;
  meta.symbol_count = static_cast<std::uint32_t>(s.frame_length / meta.sps);
  if (s.rolloff_lo == s.rolloff_hi) {
    meta.rolloff = s.rolloff_lo;
  } else {
    meta.rolloff = std::uniform_real_distribution<double>(s.rolloff_lo, s.rolloff_hi)(rng);
  }
  const FilterTaps taps = receive_filter(meta);

  IQFrame tx;
  if (meta.scheme == Scheme::kCpfsk) {
    std::vector<std::uint8_t> bits(meta.symbol_count);
    std::bernoulli_distribution coin(0.5);
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
    tx = synth_cpfsk(bits, static_cast<int>(meta.sps), s.cpfsk_index);
  } else {
    const auto symbols = draw_symbols(meta.scheme, meta.symbol_count, rng);
    tx = pulse_shape(symbols, taps, static_cast<int>(meta.sps));
  }
  tx.sample_rate_hz = s.sample_rate_hz;

  ChannelRealization h = draw_fading(meta.channel, s.rician_k, rng);
  IQFrame faded = apply_fading(tx, h);
  auto [received, noise] = apply_awgn(faded, meta.snr_db, rng);
  quantize(received.samples);
  meta.sigma2 = noise.sigma2;
  meta.gain = h.gain;
  meta.rician_k = h.rician_k;
  meta.deep_fade = std::abs(h.gain) < kDeepFadeThreshold;

  RecordSynthesis out;
  DatasetRecord& rec = out.record;
  rec.meta = meta;
  rec.frame = std::move(received);
  rec.clean_symbols = receive_symbols(meta, rec.frame.samples);
  rec.onehot = one_hot(meta.class_index, set.size());
  if (set.ml_applicable(meta.class_index)) {
    rec.ml_clean = quantized(soft_label(rec.clean_symbols, set, label_sigma2(meta)));
  }
  quantize(rec.clean_symbols);
  out.noiseless = std::move(faded);
  return out;
}

Dataset generate_dataset(const ScenarioConfig& s, std::size_t workers) {
  validate(s);
  const SchemeSet set(s.schemes);
  Dataset d;
  d.schemes = s.schemes;
  d.frame_length = s.frame_length;
  int min_sps = *std::min_element(s.sps_choices.begin(), s.sps_choices.end());
  d.max_symbols = s.frame_length / static_cast<std::size_t>(min_sps);
  d.records.resize(record_count(s));
  parallel_for(d.records.size(), workers,
               [&](std::size_t i) { d.records[i] = synthesize_record(s, set, i).record; });
  return d;
}

std::vector<char> encode_dataset(const Dataset& d) {
  const std::size_t k = d.schemes.size();
  io::Writer w;
  w.put_bytes(kDatasetMagic, 4);
  w.put<std::uint16_t>(kDatasetVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(k));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d.frame_length));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d.max_symbols));
  w.put<std::uint64_t>(d.records.size());
  for (Scheme s : d.schemes) w.put<std::uint8_t>(static_cast<std::uint8_t>(s));
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const DatasetRecord& r = d.records[i];
    const RecordMeta& m = r.meta;
    if (r.frame.samples.size() != d.frame_length || r.clean_symbols.size() > d.max_symbols ||
        r.onehot.probs.size() != k || (r.ml_clean && r.ml_clean->probs.size() != k)) {
      throw ParameterError("encode_dataset: record " + std::to_string(i) + " does not match the header shape");
    }
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.scheme));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.channel));
    w.put<std::uint8_t>(static_cast<std::uint8_t>((m.deep_fade ? kFlagDeepFade : 0) |
                                                  (r.ml_clean ? kFlagHasMl : 0)));
    w.put<std::uint8_t>(0);
    w.put<std::uint32_t>(m.class_index);
    w.put<std::uint32_t>(m.sps);
    w.put<std::uint32_t>(m.symbol_count);
    w.put<std::uint32_t>(m.rrc_span);
    w.put<double>(m.snr_db);
    w.put<double>(m.sigma2);
    w.put<double>(m.rolloff);
    w.put<double>(m.gain.real());
    w.put<double>(m.gain.imag());
    w.put<double>(m.rician_k);
    w.put<std::uint64_t>(m.seed);
    for (const cplx& v : r.frame.samples) {
      w.put<float>(static_cast<float>(v.real()));
      w.put<float>(static_cast<float>(v.imag()));
    }
    for (std::size_t t = 0; t < d.max_symbols; ++t) {
      const cplx v = t < r.clean_symbols.size() ? r.clean_symbols[t] : cplx(0.0, 0.0);
      w.put<float>(static_cast<float>(v.real()));
      w.put<float>(static_cast<float>(v.imag()));
    }
    for (double p : r.onehot.probs) w.put<float>(static_cast<float>(p));
    for (std::size_t c = 0; c < k; ++c) w.put<float>(r.ml_clean ? static_cast<float>(r.ml_clean->probs[c]) : 0.0f);
  }
  return w.bytes();
}

Dataset decode_dataset(std::vector<char> bytes) {
  io::Reader rd(std::move(bytes));
  char magic[4];
  rd.get_bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kDatasetMagic)) rd.fail("bad dataset magic");
  if (rd.get<std::uint16_t>() != kDatasetVersion) rd.fail("unsupported dataset version");
  Dataset d;
  const std::size_t k = rd.get<std::uint32_t>();
  d.frame_length = rd.get<std::uint32_t>();
  d.max_symbols = rd.get<std::uint32_t>();
  const std::uint64_t count = rd.get<std::uint64_t>();
  if (k == 0) rd.fail("dataset has no classes");
  for (std::size_t c = 0; c < k; ++c) {
    const auto id = rd.get<std::uint8_t>();
    if (id > static_cast<std::uint8_t>(Scheme::kCpfsk)) rd.fail("unknown scheme id " + std::to_string(id));
    d.schemes.push_back(static_cast<Scheme>(id));
  }
  const std::uint64_t record_bytes = kMetaBlockBytes + 8 * d.frame_length + 8 * d.max_symbols + 8 * k;
  d.records.reserve(static_cast<std::size_t>(std::min(count, rd.remaining() / record_bytes + 1)));
  for (std::uint64_t i = 0; i < count; ++i) {
    rd.set_record(static_cast<std::int64_t>(i));
    DatasetRecord& r = d.records.emplace_back();
    RecordMeta& m = r.meta;
    const auto scheme = rd.get<std::uint8_t>();
    const auto channel = rd.get<std::uint8_t>();
    const auto flags = rd.get<std::uint8_t>();
    rd.get<std::uint8_t>();
    if (scheme > static_cast<std::uint8_t>(Scheme::kCpfsk)) rd.fail("unknown scheme id");
    if (channel > static_cast<std::uint8_t>(FadingKind::kRician)) rd.fail("unknown channel kind");
    m.scheme = static_cast<Scheme>(scheme);
    m.channel = static_cast<FadingKind>(channel);
    m.deep_fade = (flags & kFlagDeepFade) != 0;
    m.class_index = rd.get<std::uint32_t>();
    if (m.class_index >= k) rd.fail("class index out of range");
    m.sps = rd.get<std::uint32_t>();
    m.symbol_count = rd.get<std::uint32_t>();
    if (m.symbol_count > d.max_symbols) rd.fail("symbol count exceeds header width");
    m.rrc_span = rd.get<std::uint32_t>();
    m.snr_db = rd.get<double>();
    m.sigma2 = rd.get<double>();
    m.rolloff = rd.get<double>();
    const double gre = rd.get<double>();
    const double gim = rd.get<double>();
    m.gain = cplx(gre, gim);
    m.rician_k = rd.get<double>();
    m.seed = rd.get<std::uint64_t>();
    r.frame.samples.resize(d.frame_length);
    for (auto& v : r.frame.samples) {
      const float re = rd.get<float>();
      const float im = rd.get<float>();
      v = cplx(re, im);
    }
    r.clean_symbols.resize(m.symbol_count);
    for (std::size_t t = 0; t < d.max_symbols; ++t) {
      const float re = rd.get<float>();
      const float im = rd.get<float>();
      if (t < m.symbol_count) r.clean_symbols[t] = cplx(re, im);
    }
    r.onehot = SoftLabel{std::vector<double>(k), LabelSource::kOneHot};
    for (double& p : r.onehot.probs) p = rd.get<float>();
    SoftLabel ml{std::vector<double>(k), LabelSource::kMlClean};
    for (double& p : ml.probs) p = rd.get<float>();
    if ((flags & kFlagHasMl) != 0) r.ml_clean = std::move(ml);
  }
  rd.set_record(FormatError::kNoRecord);
  if (rd.remaining() != 0) rd.fail("trailing bytes after the last record");
  return d;
}

void write_records(const std::string& path, const Dataset& dataset) {
  io::write_file(path, encode_dataset(dataset));
}

Dataset read_records(const std::string& path) { return decode_dataset(io::read_file(path)); }

std::string manifest_json(const ScenarioConfig& s, const Dataset& d, std::uint64_t file_checksum) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["format_version"] = kDatasetVersion;
  j["record_count"] = d.records.size();
  nlohmann::ordered_json per_class;
  for (Scheme sc : d.schemes) per_class[std::string(scheme_name(sc))] = 0;
  for (const auto& r : d.records) {
    auto& slot = per_class[std::string(scheme_name(r.meta.scheme))];
    slot = slot.get<std::size_t>() + 1;
  }
  j["records_per_class"] = per_class;
  j["frame_length"] = d.frame_length;
  j["max_symbols"] = d.max_symbols;
  j["master_seed"] = s.master_seed;
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(scenario_hash(s)));
  j["scenario_hash"] = hash;
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(file_checksum));
  j["file_fnv1a64"] = hash;
  j["scenario"] = nlohmann::ordered_json::parse(describe(s));
  return j.dump(2);
}

}  // namespace amclab
