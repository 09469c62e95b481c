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

#include "pcg/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcg/common.hpp"

namespace pcg {

namespace {

// Orthonormal scaling filters. The band-pass filter is the quadrature mirror
// g[j] = (-1)^j h[L-1-j]. Daubechies4 is the 8-tap filter with four
// vanishing moments (the db4 of pywt/MATLAB); its steep rolloff keeps
// low-frequency heart sounds out of the thresholded fine scales.
const std::vector<double>& scaling_filter(Wavelet w) {
  static const std::vector<double> haar = {std::numbers::sqrt2 / 2.0,
                                           std::numbers::sqrt2 / 2.0};
  static const std::vector<double> db4 = {
      0.23037781330885523,   0.7148465705525415,   0.6308807679295904,
      -0.02798376941698385,  -0.18703481171888114, 0.030841381835986965,
      0.032883011666982945,  -0.010597401784997278};
  return w == Wavelet::Haar ? haar : db4;
}

std::vector<double> wavelet_filter(const std::vector<double>& h) {
  std::vector<double> g(h.size());
  for (size_t j = 0; j < h.size(); ++j) {
    double v = h[h.size() - 1 - j];
    g[j] = (j % 2 == 0) ? v : -v;
  }
  return g;
}

// One decimating analysis step with periodic wraparound; an odd-length input
// is first extended by repeating its final sample.
void analysis_step(const std::vector<double>& x, const std::vector<double>& h,
                   const std::vector<double>& g, std::vector<double>& approx,
                   std::vector<double>& detail) {
  std::vector<double> work = x;
  if (work.size() % 2 == 1) work.push_back(work.back());
  size_t m = work.size();
  size_t half = m / 2;
  size_t taps = h.size();
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (size_t j = 0; j < taps; ++j) {
      double v = work[(2 * k + j) % m];
      a += h[j] * v;
      d += g[j] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

// Transpose of the analysis step; output is cropped to target_length.
std::vector<double> synthesis_step(const std::vector<double>& approx,
                                   const std::vector<double>& detail,
                                   const std::vector<double>& h,
                                   const std::vector<double>& g,
                                   size_t target_length) {
  size_t half = approx.size();
  size_t m = 2 * half;
  size_t taps = h.size();
  std::vector<double> y(m, 0.0);
  for (size_t k = 0; k < half; ++k) {
    for (size_t j = 0; j < taps; ++j) {
      y[(2 * k + j) % m] += approx[k] * h[j] + detail[k] * g[j];
    }
  }
  y.resize(target_length);
  return y;
}

std::vector<size_t> level_lengths(size_t n, int levels) {
  std::vector<size_t> lens{n};
  for (int l = 0; l < levels; ++l) lens.push_back((lens.back() + 1) / 2);
  return lens;
}

}  // namespace

WaveletCoefficients dwt_forward(const std::vector<double>& signal, Wavelet w,
                                int levels) {
  size_t n = signal.size();
  if (n < 2) throw Error("dwt_forward: signal too short");
  if (levels < 1) throw Error("dwt_forward: levels must be >= 1");
  int max_levels = 0;
  for (size_t len = n; len >= 2; len /= 2) ++max_levels;
  if (levels > max_levels) {
    throw Error("dwt_forward: too many levels (" + std::to_string(levels) +
                ") for signal of length " + std::to_string(n));
  }

  const auto& h = scaling_filter(w);
  const auto g = wavelet_filter(h);

  WaveletCoefficients c;
  c.wavelet = w;
  c.original_length = n;
  std::vector<double> cur = signal;
  for (int l = 0; l < levels; ++l) {
    std::vector<double> approx, detail;
    analysis_step(cur, h, g, approx, detail);
    c.details.push_back(std::move(detail));
    cur = std::move(approx);
  }
  c.approximation = std::move(cur);
  return c;
}

std::vector<double> dwt_inverse(const WaveletCoefficients& coeffs) {
  int levels = coeffs.levels();
  if (levels < 1) throw Error("dwt_inverse: no detail levels");
  auto lens = level_lengths(coeffs.original_length, levels);
  if (coeffs.approximation.size() != lens[levels]) {
    throw Error("dwt_inverse: approximation length inconsistent");
  }
  for (int l = 0; l < levels; ++l) {
    if (coeffs.details[l].size() != lens[l + 1]) {
      throw Error("dwt_inverse: detail level " + std::to_string(l) +
                  " length inconsistent");
    }
  }

  const auto& h = scaling_filter(coeffs.wavelet);
  const auto g = wavelet_filter(h);

  std::vector<double> cur = coeffs.approximation;
  for (int l = levels - 1; l >= 0; --l) {
    cur = synthesis_step(cur, coeffs.details[l], h, g, lens[l]);
  }
  return cur;
}

void soft_threshold_details(WaveletCoefficients& coeffs, double threshold) {
  if (threshold < 0.0) throw Error("soft threshold must be non-negative");
  for (auto& level : coeffs.details) {
    for (double& x : level) {
      double mag = std::fabs(x) - threshold;
      x = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
    }
  }
}

double noise_sigma(const WaveletCoefficients& coeffs) {
  if (coeffs.details.empty()) throw Error("no detail coefficients");
  std::vector<double> abs_finest(coeffs.details[0].size());
  for (size_t i = 0; i < abs_finest.size(); ++i) {
    abs_finest[i] = std::fabs(coeffs.details[0][i]);
  }
  return median(std::move(abs_finest)) / 0.6745;
}

double minimax_threshold(const WaveletCoefficients& coeffs,
                         size_t signal_length) {
  double n = static_cast<double>(signal_length);
  return noise_sigma(coeffs) * (0.3936 + 0.1829 * std::log2(n));
}

DenoiseResult denoise(const std::vector<double>& signal) {
  constexpr int kLevels = 5;
  if (signal.size() < 32) throw Error("denoise: signal shorter than 32 samples");

  auto coeffs = dwt_forward(signal, Wavelet::Daubechies4, kLevels);
  double thr = minimax_threshold(coeffs, signal.size());
  soft_threshold_details(coeffs, thr);

  DenoiseResult out;
  out.denoised = dwt_inverse(coeffs);
  std::vector<double> residual(signal.size());
  for (size_t i = 0; i < signal.size(); ++i) {
    residual[i] = signal[i] - out.denoised[i];
  }
  double p_signal = mean_square(out.denoised);
  double p_residual = mean_square(residual);
  if (p_residual < 1e-20) {
    out.snr_db = 300.0;  // sentinel for a vanishing residual
  } else if (p_signal < 1e-20) {
    out.snr_db = -300.0;
  } else {
    out.snr_db = 10.0 * std::log10(p_signal / p_residual);
    out.snr_db = std::clamp(out.snr_db, -300.0, 300.0);
  }
  return out;
}

}  // namespace pcg
