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

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcg {

/// Error raised for invalid data, malformed files, and violated
/// preconditions. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label { Normal = 0, Abnormal = 1 };

int label_to_int(Label l);                       // Abnormal -> 1, Normal -> -1
Label label_from_int(int v);
std::string label_to_string(Label l);
Label label_from_string(const std::string& s);

/// Deterministic random source. std::mt19937_64 produces a portable bit
/// stream, and the distribution helpers are hand-rolled so results do not
/// depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next();
  double uniform();                             // [0, 1)
  double uniform(double lo, double hi);
  double normal();                              // standard normal (Box-Muller)
  int64_t uniform_int(int64_t lo, int64_t hi);  // inclusive bounds

  /// Independent stream derived from this generator's seed; drawing from the
  /// fork never disturbs the parent.
  Rng fork(uint64_t stream) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

double mean(const std::vector<double>& v);
double kahan_mean(const std::vector<double>& v);  // compensated summation
double sample_sd(const std::vector<double>& v);   // n-1 denominator; 0 if n<2
double median(std::vector<double> v);
double mean_square(const std::vector<double>& v);

/// Doubles formatted with enough digits to round-trip exactly.
std::string format_double(double v);

// Minimal CSV handling; the file formats used here never need quoting.
std::vector<std::string> split_csv_line(const std::string& line);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

/// Runs fn(0..n-1) on up to `threads` workers. Results must be written to
/// per-index slots; the partition is static so output never depends on
/// scheduling.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace pcg
