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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcg/common.hpp"

namespace pcg {

/// One mono heart sound recording. Samples are dimensionless amplitudes;
/// after normalize() the maximum absolute value is 1 (unless all-zero) and
/// the mean is ~0.
struct Recording {
  std::string id;
  std::vector<double> samples;
  int sample_rate = 0;  // Hz
  std::optional<Label> label;
};

struct LabelTable {
  std::map<std::string, Label> entries;
};

/// Reads a PCM 16-bit mono WAV file. Samples are scaled to [-1, 1) by
/// dividing by 32768; the label is left unset.
Recording load_wav(const std::string& path);

/// Writes PCM 16-bit mono WAV, quantizing with round(x * 32768) clamped to
/// the int16 range so that load_wav round-trips 16-bit data exactly.
void save_wav(const Recording& r, const std::string& path);

/// Linear-interpolation resampling; output length is
/// round(len * target_rate / input_rate).
Recording resample(const Recording& r, int target_rate);

/// Subtracts the mean, then scales so max |sample| = 1. All-zero input (and
/// constant input, which collapses to zero) is returned unchanged. Idempotent
/// bitwise: already-normalized input passes through untouched.
std::vector<double> normalize_samples(std::vector<double> samples);
Recording normalize(Recording r);

/// Label CSV: `name,label` with 1 = abnormal, -1 = normal. A header row is
/// optional on read and always written.
LabelTable load_label_table(const std::string& path);
void save_label_table(const LabelTable& t, const std::string& path);

/// One-column CSV of floating-point amplitudes (test-fixture format).
std::vector<double> load_amplitude_csv(const std::string& path);
void save_amplitude_csv(const std::vector<double>& samples,
                        const std::string& path);

}  // namespace pcg
