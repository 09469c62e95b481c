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

#include <complex>
#include <vector>

namespace pcg {

// Thin wrappers over FFTW. Plans are cached per length behind a mutex;
// execution is safe from multiple threads.

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x);

/// Inverse transform including the 1/n factor.
std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x);

/// Analytic signal: positive-frequency half of the spectrum doubled, negative
/// half zeroed. |analytic| is the Hilbert envelope.
std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x);

std::vector<double> hilbert_envelope(const std::vector<double>& x);

/// Zero-phase brick-wall band-pass: bins with lo_hz <= f <= hi_hz kept,
/// everything else (including DC when lo_hz > 0) zeroed.
std::vector<double> bandpass_fft(const std::vector<double>& x, double rate_hz,
                                 double lo_hz, double hi_hz);

}  // namespace pcg
