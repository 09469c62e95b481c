/*
 * Copyright 2026 The pcgkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <vector>

#include "pcg/cycles.hpp"
#include "pcg/recording.hpp"

namespace pcg {

/// Systolic murmur: band-limited noise confined to the systolic window.
/// `amplitude` is the murmur RMS relative to the S1 peak amplitude; zero
/// means no audible murmur (and a Normal label).
struct MurmurSpec {
  double band_lo_hz = 150.0;
  double band_hi_hz = 400.0;
  double amplitude = 0.4;
};

struct SynthSpec {
  std::string id = "synth";
  double heart_rate_bpm = 75.0;  // valid range [50, 150]
  double s1_freq_hz = 50.0;
  double s2_freq_hz = 70.0;
  double s1_duration_ms = 120.0;
  double s2_duration_ms = 100.0;
  double s1_amplitude = 1.0;
  double s2_amplitude = 0.8;
  double systole_fraction = 0.35;  // S1-onset -> S2-onset, as fraction of cycle
  std::optional<MurmurSpec> murmur;
  double noise_sd = 0.05;
  double duration_s = 8.0;
  uint64_t seed = 0;
};

/// A generated recording plus its exact ground truth: complete cardiac
/// cycles, the per-50Hz-frame state sequence (covering partial trailing
/// content as well), and the label.
struct SynthRecording {
  Recording recording;  // 1000 Hz, normalized
  std::vector<CardiacCycle> cycles;
  std::vector<HeartState> frame_states;
  bool abnormal = false;
};

SynthRecording generate_recording(const SynthSpec& spec);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct DatasetRanges {
  Range heart_rate_bpm{60.0, 120.0};
  Range systole_fraction{0.30, 0.40};
  Range noise_sd{0.05, 0.15};
  Range murmur_amplitude{0.30, 0.50};
  double duration_s = 8.0;
};

/// Exactly round(n * abnormal_fraction) recordings carry a murmur; which ones
/// is decided by a seeded shuffle. Bitwise reproducible from the seed.
std::vector<SynthRecording> generate_dataset(int n, double abnormal_fraction,
                                             const DatasetRanges& ranges,
                                             uint64_t seed);

}  // namespace pcg
