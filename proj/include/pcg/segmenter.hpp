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
#include <vector>

#include "pcg/cycles.hpp"
#include "pcg/recording.hpp"

namespace pcg {

// Duration-dependent hidden semi-Markov segmentation of a 1000 Hz recording
// into S1 / systole / S2 / diastole cycles. Observations are four envelope
// features at 50 Hz; emissions are diagonal Gaussians fitted on labeled data;
// durations are Gaussian with heart-rate-derived means, decoded by an
// extended Viterbi over truncated duration supports.

/// Per-frame observation features at 50 Hz, each standardized to zero mean /
/// unit SD over the recording (columns that would be degenerate are zeroed).
struct EnvelopeFeatures {
  static constexpr int kFeatureRateHz = 50;
  static constexpr int kNumFeatures = 4;
  // 0: homomorphic envelope, 1: Hilbert envelope, 2: 40-60 Hz band power,
  // 3: DWT level-3 detail envelope.
  std::array<std::vector<double>, kNumFeatures> columns;

  size_t frames() const { return columns[0].size(); }
};

/// Pre: signal length >= 1000 (one second at 1000 Hz).
EnvelopeFeatures extract_envelopes(const std::vector<double>& signal);

struct HeartRateEstimate {
  double cycle_frames = 40.0;      // heartbeat period, in 50 Hz frames
  double systole_fraction = 0.3;   // S1-onset -> S2-onset over cycle
  bool fallback = false;           // set when no usable periodicity peak
};

/// Autocorrelation of the homomorphic envelope over lags [0.33 s, 2 s].
/// Pre: >= 100 frames. A peak below 0.2 normalized autocorrelation counts as
/// "no positive peak" and triggers the flagged fallback (0.8 s, 0.3).
HeartRateEstimate estimate_heart_rate(const EnvelopeFeatures& env);

struct EmissionParams {
  // [state][feature]
  std::array<std::array<double, 4>, 4> mean{};
  std::array<std::array<double, 4>, 4> sd{};  // floored at 0.05
};

struct LabeledEnvelopes {
  EnvelopeFeatures env;
  std::vector<HeartState> states;  // one per frame
};

/// Per-state per-feature sample mean and SD. Errors if any state is absent
/// from the labels.
EmissionParams fit_emissions(const std::vector<LabeledEnvelopes>& data);

struct HsmmParams {
  std::array<double, 4> duration_mean{};  // frames, indexed by HeartState
  std::array<double, 4> duration_sd{};
  EmissionParams emissions;
};

/// Duration parameters from a heart-rate estimate: S1 = 120 ms and
/// S2 = 100 ms fixed, systole = fraction*cycle - S1, diastole the remainder;
/// SDs are 25% of the mean.
HsmmParams derive_params(const HeartRateEstimate& hr,
                         const EmissionParams& emissions);

/// Extended Viterbi decode. Interior segments take durations within
/// [mean - 3 SD, mean + 3 SD] (and >= 1 frame); the leading and trailing
/// segments may be truncated visits of any observed length up to the upper
/// bound, scored at the duration clamped into the support. Ties prefer the
/// shorter duration, then the lower state index.
std::vector<HeartState> hsmm_decode(const EnvelopeFeatures& env,
                                    const HsmmParams& params);

/// Generalized decoder used for testing against brute force: `n_states`
/// cyclic states (2..4) with explicit per-frame emission log-likelihoods
/// `emission_ll[state][frame]`.
std::vector<int> hsmm_decode_general(
    const std::vector<std::vector<double>>& emission_ll,
    const std::vector<double>& duration_mean,
    const std::vector<double>& duration_sd);

/// Integer duration support [lo, hi] for one state, and the per-duration
/// log-probability used by the decoder (shared with test oracles).
std::pair<int64_t, int64_t> duration_support(double mean, double sd);
double duration_log_prob(int64_t d, double mean, double sd);

/// Groups a decoded frame sequence into complete S1->systole->S2->diastole
/// cycles, upsampled to 1000 Hz sample indices (frame * 20). Incomplete
/// leading/trailing runs are dropped.
std::vector<CardiacCycle> cycles_from_states(const std::vector<HeartState>& states,
                                             int feature_rate_hz);

/// Fitted segmenter bundling emission parameters with the full
/// envelopes -> heart rate -> decode -> cycles pipeline.
struct SegmenterModel {
  EmissionParams emissions;

  std::vector<CardiacCycle> segment(const std::vector<double>& signal) const;
  std::vector<CardiacCycle> segment(const Recording& r) const;
};

/// Segmenter trained on an internally generated synthetic corpus with exact
/// ground-truth states.
SegmenterModel train_default_segmenter(uint64_t seed, int n_recordings = 24);

}  // namespace pcg
