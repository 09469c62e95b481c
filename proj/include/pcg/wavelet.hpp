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

#include <vector>

namespace pcg {

enum class Wavelet { Haar, Daubechies4 };

/// Multi-level pyramidal decomposition. Coefficient counts halve (rounding
/// up) per level: odd-length inputs are extended by one mirrored sample
/// before the decimating filter bank, and the stored original length lets the
/// inverse crop back exactly, so inverse(forward(x)) == x to machine
/// precision.
struct WaveletCoefficients {
  Wavelet wavelet = Wavelet::Daubechies4;
  size_t original_length = 0;
  std::vector<std::vector<double>> details;  // finest to coarsest
  std::vector<double> approximation;         // coarsest level

  int levels() const { return static_cast<int>(details.size()); }
};

/// Pre: signal length >= 2 and levels <= floor(log2(length)).
WaveletCoefficients dwt_forward(const std::vector<double>& signal, Wavelet w,
                                int levels);

std::vector<double> dwt_inverse(const WaveletCoefficients& coeffs);

/// Soft-thresholds every detail coefficient in place (approximation is left
/// alone): x -> sign(x) * max(|x| - threshold, 0).
void soft_threshold_details(WaveletCoefficients& coeffs, double threshold);

/// Noise scale estimated as median(|finest details|) / 0.6745.
double noise_sigma(const WaveletCoefficients& coeffs);

/// Donoho-Johnstone minimax threshold sigma * (0.3936 + 0.1829 log2 N).
/// Chosen over the universal threshold sigma * sqrt(2 ln N), which shrinks
/// in-band heart-sound coefficients hard enough to hurt correlation with the
/// underlying signal at realistic noise levels.
double minimax_threshold(const WaveletCoefficients& coeffs,
                         size_t signal_length);

struct DenoiseResult {
  std::vector<double> denoised;
  double snr_db = 0.0;  // 10*log10(P_denoised / P_residual), clamped to +-300
};

/// Daubechies-4, 5 levels, soft minimax threshold. Pre: length >= 32.
/// When the residual power is below 1e-20 the SNR is reported as the +300 dB
/// sentinel.
DenoiseResult denoise(const std::vector<double>& signal);

}  // namespace pcg
