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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pcg/cycles.hpp"
#include "pcg/common.hpp"

namespace pcg {

// The 58 per-cycle descriptors, aggregated to 116 per-recording features
// (mean + SD of each descriptor across cycles, interleaved descriptor-major).

inline constexpr int kDescriptorCount = 58;
inline constexpr int kFeatureCount = 2 * kDescriptorCount;

struct PowerSpectrum {
  std::vector<double> frequency;  // ascending, 0 .. Nyquist
  std::vector<double> power;      // one-sided periodogram
  double resolution = 0.0;        // Hz per bin
};

/// One-sided Hann-windowed periodogram. Power is normalized by the squared
/// window sum (and doubled off DC/Nyquist), so a unit sine at a bin center
/// peaks at 0.5 regardless of length. Pre: length >= 8.
PowerSpectrum spectrum(const std::vector<double>& signal, double rate_hz);

struct CycleDescriptor {
  std::array<double, kDescriptorCount> values{};
  std::array<bool, kDescriptorCount> missing{};
};

struct FeatureVector {
  std::string id;
  std::array<double, kFeatureCount> values{};
  std::array<bool, kFeatureCount> missing{};
};

/// Canonical descriptor names (58) and aggregate feature names (116,
/// `<descriptor>_mean` / `<descriptor>_sd` interleaved).
const std::array<std::string, kDescriptorCount>& descriptor_names();
const std::array<std::string, kFeatureCount>& feature_names();

/// Index of a descriptor name; throws for unknown names.
int descriptor_index(const std::string& name);

/// Extracts the 58 descriptors for one cycle of a (denoised) 1000 Hz
/// recording. `snr_db` is the recording-level SNR from denoising, replicated
/// into every cycle. Descriptors whose window is shorter than 8 samples or
/// whose spectrum is degenerate are masked rather than erroring.
CycleDescriptor compute_cycle_descriptors(const std::vector<double>& signal,
                                          const CardiacCycle& cycle,
                                          double snr_db);

/// Mean + sample SD per descriptor over the cycles where it is unmasked.
/// A descriptor seen in exactly one cycle gets SD 0; one masked everywhere
/// masks both aggregates. Pre: at least one descriptor.
FeatureVector aggregate_features(const std::vector<CycleDescriptor>& descriptors,
                                 const std::string& id);

struct ImputeResult {
  std::vector<FeatureVector> completed;
  std::array<double, kFeatureCount> medians{};
};

/// Replaces masked entries with per-column medians over the unmasked
/// training entries; errors (naming the feature) if a column is fully
/// masked. The medians are retained to impute held-out vectors.
ImputeResult impute_median(std::vector<FeatureVector> training);
void apply_medians(FeatureVector& v,
                   const std::array<double, kFeatureCount>& medians);

/// Feature CSV: header `id,<116 names>`, one row per recording, empty cell =
/// masked. Medians CSV: `feature,median`.
void save_feature_csv(const std::vector<FeatureVector>& rows,
                      const std::string& path);
std::vector<FeatureVector> load_feature_csv(const std::string& path);
void save_medians_csv(const std::array<double, kFeatureCount>& medians,
                      const std::string& path);
std::array<double, kFeatureCount> load_medians_csv(const std::string& path);

}  // namespace pcg
