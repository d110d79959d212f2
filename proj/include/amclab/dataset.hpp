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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amclab/channel.hpp"
#include "amclab/ml_oracle.hpp"
#include "amclab/modem.hpp"

namespace amclab {

// Experiment grid. Records are produced for every (scheme, snr, sps,
// channel kind) combination, frames_per_combo each; the rolloff is drawn
// uniformly in [rolloff_lo, rolloff_hi] per frame. Every frame has
// frame_length samples, so the symbol count is frame_length / sps.
struct ScenarioConfig {
  std::string name;
  std::vector<Scheme> schemes;
  std::vector<double> snr_grid_db;
  std::vector<int> sps_choices;
  double rolloff_lo = 0.35;
  double rolloff_hi = 0.35;
  std::vector<FadingKind> channel_kinds;
  double rician_k = kDefaultRicianK;
  std::size_t frames_per_combo = 10;
  std::size_t frame_length = 256;
  std::uint64_t master_seed = 0;
  int rrc_span = kDefaultRrcSpan;
  double cpfsk_index = kDefaultCpfskIndex;
  double sample_rate_hz = 200e3;
};

std::vector<Scheme> default_schemes();

// "s1": gaussian channel, -6..18 dB in 2 dB steps, sps 8, rolloff 0.35.
// "s2": s1 with sps {2, 4, 8, 16} and rolloff uniform in [0.15, 0.45].
// "s3": s1 with channel kinds {awgn_only, rayleigh, rician}.
ScenarioConfig scenario_preset(std::string_view name);

void validate(const ScenarioConfig& scenario);

std::size_t record_count(const ScenarioConfig& scenario);

// Canonical JSON text of every scenario field.
std::string describe(const ScenarioConfig& scenario);
std::uint64_t scenario_hash(const ScenarioConfig& scenario);

struct RecordMeta {
  Scheme scheme = Scheme::kBpsk;
  std::uint32_t class_index = 0;
  double snr_db = 0.0;
  // Sample-domain per-component noise variance.
  double sigma2 = 0.5;
  std::uint32_t sps = 8;
  double rolloff = 0.35;
  std::uint32_t rrc_span = kDefaultRrcSpan;
  FadingKind channel = FadingKind::kAwgnOnly;
  cplx gain{1.0, 0.0};
  double rician_k = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t symbol_count = 0;
  bool deep_fade = false;
};

struct DatasetRecord {
  // x: the channel output, as seen by the classifier.
  IQFrame frame;
  RecordMeta meta;
  // r(g): receive-filtered symbols of the fading-removed frame.
  std::vector<cplx> clean_symbols;
  SoftLabel onehot;
  // Present iff the scheme is ML-applicable.
  std::optional<SoftLabel> ml_clean;
};

struct Dataset {
  std::vector<Scheme> schemes;
  std::size_t frame_length = 0;
  // Width of the stored clean-symbol block.
  std::size_t max_symbols = 0;
  std::vector<DatasetRecord> records;
};

ChannelRealization realization(const RecordMeta& meta);
FilterTaps receive_filter(const RecordMeta& meta);
// Per-component noise variance of the record's r(g).
double label_sigma2(const RecordMeta& meta);
// r(frame / gain) with the record's receive filter.
std::vector<cplx> receive_symbols(const RecordMeta& meta, std::span<const cplx> frame);

// Rounds every entry to float32 and renormalizes in double, the precision at
// which labels are stored.
SoftLabel as_stored_precision(const SoftLabel& label);

struct RecordSynthesis {
  DatasetRecord record;
  // The faded frame before noise was added.
  IQFrame noiseless;
};

// Builds record `index` of the scenario's canonical order. Depends only on
// (scenario, index).
RecordSynthesis synthesize_record(const ScenarioConfig& scenario, const SchemeSet& set,
                                  std::size_t index);

Dataset generate_dataset(const ScenarioConfig& scenario, std::size_t workers = 1);

// Binary dataset file. Header: "AMCD", u16 version, u32 K, u32 L, u32 T,
// u64 record count, K u8 scheme ids. Each record: a 76-byte meta block, L
// interleaved float32 IQ samples, T float32 complex clean symbols (zero
// padded), K float32 one-hot entries, K float32 ML entries. Little endian.
inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::size_t kMetaBlockBytes = 76;

std::vector<char> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::vector<char> bytes);
void write_records(const std::string& path, const Dataset& dataset);
Dataset read_records(const std::string& path);

// Manifest written next to a generated dataset.
std::string manifest_json(const ScenarioConfig& scenario, const Dataset& dataset,
                          std::uint64_t file_checksum);

}  // namespace amclab
