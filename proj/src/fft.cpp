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

#include "pcg/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "pcg/common.hpp"

namespace pcg {

namespace {

// Plan creation is not thread-safe in FFTW; executing a cached plan on fresh
// arrays is. FFTW_UNALIGNED lets plans run on plain std::vector storage.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw Error("fftw plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& x,
                                      int sign) {
  if (x.empty()) throw Error("fft of empty vector");
  int n = static_cast<int>(x.size());
  fftw_plan p = cache().get(n, sign);
  std::vector<std::complex<double>> in(x), out(x.size());
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x) {
  return run(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x) {
  auto out = run(x, FFTW_BACKWARD);
  double inv = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= inv;
  return out;
}

std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x) {
  size_t n = x.size();
  std::vector<std::complex<double>> cx(n);
  for (size_t i = 0; i < n; ++i) cx[i] = x[i];
  auto spec = fft(cx);
  // DC and (for even n) Nyquist stay single-counted; positive frequencies are
  // doubled and negative frequencies zeroed.
  for (size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
  for (size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;
  return ifft(spec);
}

std::vector<double> hilbert_envelope(const std::vector<double>& x) {
  auto a = analytic_signal(x);
  std::vector<double> env(x.size());
  for (size_t i = 0; i < x.size(); ++i) env[i] = std::abs(a[i]);
  return env;
}

std::vector<double> bandpass_fft(const std::vector<double>& x, double rate_hz,
                                 double lo_hz, double hi_hz) {
  size_t n = x.size();
  if (n == 0) throw Error("bandpass of empty signal");
  std::vector<std::complex<double>> cx(n);
  for (size_t i = 0; i < n; ++i) cx[i] = x[i];
  auto spec = fft(cx);
  for (size_t k = 0; k < n; ++k) {
    size_t sym = k <= n / 2 ? k : n - k;  // mirrored bin index
    double f = static_cast<double>(sym) * rate_hz / static_cast<double>(n);
    if (f < lo_hz || f > hi_hz) spec[k] = 0.0;
  }
  auto y = ifft(spec);
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = y[i].real();
  return out;
}

}  // namespace pcg
