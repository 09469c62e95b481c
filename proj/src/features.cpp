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

#include "pcg/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "pcg/fft.hpp"

namespace pcg {

namespace {

constexpr double kRate = 1000.0;

// Descriptor layout. Five analysis windows: S1, systole, S2, diastole, full
// cycle. Counts per family: intervals 16, |amp| 5, power 5, ZCR 1, peak
// power 5, peak freq 5, bandwidth 5+4, Q-factor 5+4, THD 1, cepstrum 1,
// SNR 1 -> 58.
enum DescriptorIndex {
  kDurS1 = 0,
  kDurSys,
  kDurS2,
  kDurDia,
  kDurCycle,
  kRatioS1Cycle,
  kRatioSysCycle,
  kRatioS2Cycle,
  kRatioDiaCycle,
  kRatioSysDia,
  kRatioS1S2,
  kRatioSoundsCycle,
  kHeartRateBpm,
  kS1ToS2Interval,
  kS2ToEndInterval,
  kS1ToS2CycleRatio,
  kAbsAmpBase = 16,       // +window
  kTotalPowerBase = 21,   // +window
  kZeroCrossingRate = 26,
  kPeakPowerBase = 27,    // +window
  kPeakFreqBase = 32,     // +window
  kBandwidth3Base = 37,   // +window (all 5)
  kBandwidth6Base = 42,   // +state window (first 4)
  kQFactor3Base = 46,     // +window (all 5)
  kQFactor6Base = 51,     // +state window (first 4)
  kThd = 55,
  kCepstrumPeak = 56,
  kDwtSnr = 57,
};

const char* kWindowNames[5] = {"s1", "sys", "s2", "dia", "cycle"};

std::array<std::string, kDescriptorCount> build_descriptor_names() {
  std::array<std::string, kDescriptorCount> n;
  n[kDurS1] = "s1_duration_s";
  n[kDurSys] = "sys_duration_s";
  n[kDurS2] = "s2_duration_s";
  n[kDurDia] = "dia_duration_s";
  n[kDurCycle] = "cycle_duration_s";
  n[kRatioS1Cycle] = "s1_cycle_dur_ratio";
  n[kRatioSysCycle] = "sys_cycle_dur_ratio";
  n[kRatioS2Cycle] = "s2_cycle_dur_ratio";
  n[kRatioDiaCycle] = "dia_cycle_dur_ratio";
  n[kRatioSysDia] = "sys_dia_dur_ratio";
  n[kRatioS1S2] = "s1_s2_dur_ratio";
  n[kRatioSoundsCycle] = "sounds_cycle_dur_ratio";
  n[kHeartRateBpm] = "heart_rate_bpm";
  n[kS1ToS2Interval] = "s1_to_s2_interval_s";
  n[kS2ToEndInterval] = "s2_to_end_interval_s";
  n[kS1ToS2CycleRatio] = "s1_to_s2_cycle_ratio";
  for (int w = 0; w < 5; ++w) {
    std::string win = kWindowNames[w];
    n[kAbsAmpBase + w] = win + "_abs_amp";
    n[kTotalPowerBase + w] = win + "_total_power";
    n[kPeakPowerBase + w] = win + "_peak_freq_power";
    n[kPeakFreqBase + w] = win + "_peak_freq_hz";
    n[kBandwidth3Base + w] = win + "_bandwidth_3db_hz";
    n[kQFactor3Base + w] = win + "_q_factor_3db";
  }
  for (int w = 0; w < 4; ++w) {
    std::string win = kWindowNames[w];
    n[kBandwidth6Base + w] = win + "_bandwidth_6db_hz";
    n[kQFactor6Base + w] = win + "_q_factor_6db";
  }
  n[kZeroCrossingRate] = "cycle_zero_crossing_rate";
  n[kThd] = "cycle_thd";
  n[kCepstrumPeak] = "cycle_cepstrum_peak";
  n[kDwtSnr] = "dwt_snr_db";
  return n;
}

// -3 dB and -6 dB as power ratios.
constexpr double kDrop3Db = 0.5011872336272722;
constexpr double kDrop6Db = 0.25118864315095801;

// Width of the contiguous region around the peak staying above
// ratio * peak power, with linear interpolation at the crossings; clamped at
// the spectrum edges.
double bandwidth_around_peak(const PowerSpectrum& spec, size_t peak,
                             double ratio) {
  double cut = ratio * spec.power[peak];
  size_t left = peak;
  while (left > 0 && spec.power[left - 1] >= cut) --left;
  double f_left;
  if (left == 0) {
    f_left = spec.frequency[0];
  } else {
    double p_lo = spec.power[left - 1], p_hi = spec.power[left];
    f_left = spec.frequency[left - 1] +
             (cut - p_lo) / (p_hi - p_lo) * spec.resolution;
  }
  size_t right = peak;
  while (right + 1 < spec.power.size() && spec.power[right + 1] >= cut) ++right;
  double f_right;
  if (right + 1 == spec.power.size()) {
    f_right = spec.frequency[right];
  } else {
    double p_hi = spec.power[right], p_lo = spec.power[right + 1];
    f_right = spec.frequency[right] +
              (p_hi - cut) / (p_hi - p_lo) * spec.resolution;
  }
  return f_right - f_left;
}

double real_cepstrum_peak(const std::vector<double>& x) {
  size_t n = x.size();
  std::vector<std::complex<double>> cx(n);
  for (size_t i = 0; i < n; ++i) cx[i] = x[i];
  auto spec = fft(cx);
  for (auto& v : spec) v = std::log(std::abs(v) + 1e-12);
  auto ceps = ifft(spec);
  // Quefrencies at or above 2 ms (sample index 2 at 1000 Hz).
  double best = -std::numeric_limits<double>::infinity();
  for (size_t k = 2; k <= n / 2; ++k) best = std::max(best, ceps[k].real());
  return best;
}

}  // namespace

const std::array<std::string, kDescriptorCount>& descriptor_names() {
  static const auto names = build_descriptor_names();
  return names;
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const auto names = []() {
    std::array<std::string, kFeatureCount> out;
    const auto& d = descriptor_names();
    for (int i = 0; i < kDescriptorCount; ++i) {
      out[2 * i] = d[i] + "_mean";
      out[2 * i + 1] = d[i] + "_sd";
    }
    return out;
  }();
  return names;
}

int descriptor_index(const std::string& name) {
  const auto& names = descriptor_names();
  for (int i = 0; i < kDescriptorCount; ++i) {
    if (names[i] == name) return i;
  }
  throw Error("unknown descriptor name: " + name);
}

PowerSpectrum spectrum(const std::vector<double>& signal, double rate_hz) {
  size_t n = signal.size();
  if (n < 8) throw Error("spectrum: signal shorter than 8 samples");
  if (rate_hz <= 0.0) throw Error("spectrum: rate must be positive");

  std::vector<std::complex<double>> windowed(n);
  double wsum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                     static_cast<double>(i) /
                                     static_cast<double>(n)));
    windowed[i] = signal[i] * w;
    wsum += w;
  }
  auto transformed = fft(windowed);

  PowerSpectrum out;
  size_t bins = n / 2 + 1;
  out.resolution = rate_hz / static_cast<double>(n);
  out.frequency.resize(bins);
  out.power.resize(bins);
  double norm = 1.0 / (wsum * wsum);
  for (size_t k = 0; k < bins; ++k) {
    out.frequency[k] = static_cast<double>(k) * out.resolution;
    double p = std::norm(transformed[k]) * norm;
    bool one_sided_double = k != 0 && !(n % 2 == 0 && k == n / 2);
    out.power[k] = one_sided_double ? 2.0 * p : p;
  }
  return out;
}

CycleDescriptor compute_cycle_descriptors(const std::vector<double>& signal,
                                          const CardiacCycle& cycle,
                                          double snr_db) {
  const auto len = static_cast<int64_t>(signal.size());
  if (!(0 <= cycle.s1_start && cycle.s1_start < cycle.sys_start &&
        cycle.sys_start < cycle.s2_start && cycle.s2_start < cycle.dia_start &&
        cycle.dia_start < cycle.cycle_end && cycle.cycle_end <= len)) {
    throw Error("cycle boundaries out of order or outside the recording");
  }

  CycleDescriptor out;

  // Interval descriptors come from the boundaries alone.
  double d_s1 = static_cast<double>(cycle.sys_start - cycle.s1_start) / kRate;
  double d_sys = static_cast<double>(cycle.s2_start - cycle.sys_start) / kRate;
  double d_s2 = static_cast<double>(cycle.dia_start - cycle.s2_start) / kRate;
  double d_dia = static_cast<double>(cycle.cycle_end - cycle.dia_start) / kRate;
  double d_cycle = static_cast<double>(cycle.cycle_end - cycle.s1_start) / kRate;
  out.values[kDurS1] = d_s1;
  out.values[kDurSys] = d_sys;
  out.values[kDurS2] = d_s2;
  out.values[kDurDia] = d_dia;
  out.values[kDurCycle] = d_cycle;
  out.values[kRatioS1Cycle] = d_s1 / d_cycle;
  out.values[kRatioSysCycle] = d_sys / d_cycle;
  out.values[kRatioS2Cycle] = d_s2 / d_cycle;
  out.values[kRatioDiaCycle] = d_dia / d_cycle;
  out.values[kRatioSysDia] = d_sys / d_dia;
  out.values[kRatioS1S2] = d_s1 / d_s2;
  out.values[kRatioSoundsCycle] = (d_s1 + d_s2) / d_cycle;
  out.values[kHeartRateBpm] = 60.0 / d_cycle;
  out.values[kS1ToS2Interval] =
      static_cast<double>(cycle.s2_start - cycle.s1_start) / kRate;
  out.values[kS2ToEndInterval] =
      static_cast<double>(cycle.cycle_end - cycle.s2_start) / kRate;
  out.values[kS1ToS2CycleRatio] = out.values[kS1ToS2Interval] / d_cycle;

  const std::array<std::pair<int64_t, int64_t>, 5> windows = {{
      {cycle.s1_start, cycle.sys_start},
      {cycle.sys_start, cycle.s2_start},
      {cycle.s2_start, cycle.dia_start},
      {cycle.dia_start, cycle.cycle_end},
      {cycle.s1_start, cycle.cycle_end},
  }};

  std::optional<PowerSpectrum> cycle_spectrum;
  size_t cycle_peak = 0;

  for (int w = 0; w < 5; ++w) {
    auto [lo, hi] = windows[w];
    std::vector<double> x(signal.begin() + lo, signal.begin() + hi);

    auto mask_spectral = [&] {
      out.missing[kPeakPowerBase + w] = true;
      out.missing[kPeakFreqBase + w] = true;
      out.missing[kBandwidth3Base + w] = true;
      out.missing[kQFactor3Base + w] = true;
      if (w < 4) {
        out.missing[kBandwidth6Base + w] = true;
        out.missing[kQFactor6Base + w] = true;
      }
    };

    if (x.size() < 8) {
      out.missing[kAbsAmpBase + w] = true;
      out.missing[kTotalPowerBase + w] = true;
      mask_spectral();
      continue;
    }

    double abs_amp = 0.0;
    for (double v : x) abs_amp += std::fabs(v);
    out.values[kAbsAmpBase + w] = abs_amp / static_cast<double>(x.size());
    out.values[kTotalPowerBase + w] = mean_square(x);

    auto spec = spectrum(x, kRate);
    size_t peak = 0;
    for (size_t k = 1; k < spec.power.size(); ++k) {
      if (spec.power[k] > spec.power[peak]) peak = k;
    }
    if (spec.power[peak] <= 0.0) {  // silent window
      mask_spectral();
      continue;
    }

    out.values[kPeakPowerBase + w] = spec.power[peak];
    out.values[kPeakFreqBase + w] = spec.frequency[peak];

    double bw3 = bandwidth_around_peak(spec, peak, kDrop3Db);
    out.values[kBandwidth3Base + w] = bw3;
    if (bw3 > 0.0) {
      out.values[kQFactor3Base + w] = spec.frequency[peak] / bw3;
    } else {
      out.missing[kQFactor3Base + w] = true;
    }
    if (w < 4) {
      double bw6 = bandwidth_around_peak(spec, peak, kDrop6Db);
      out.values[kBandwidth6Base + w] = bw6;
      if (bw6 > 0.0) {
        out.values[kQFactor6Base + w] = spec.frequency[peak] / bw6;
      } else {
        out.missing[kQFactor6Base + w] = true;
      }
    }
    if (w == 4) {
      cycle_spectrum = std::move(spec);
      cycle_peak = peak;
    }
  }

  // Zero-crossing rate over the full cycle.
  {
    auto [lo, hi] = windows[4];
    if (hi - lo < 8) {
      out.missing[kZeroCrossingRate] = true;
    } else {
      int64_t crossings = 0;
      for (int64_t t = lo; t + 1 < hi; ++t) {
        if (signal[t] * signal[t + 1] < 0.0) ++crossings;
      }
      out.values[kZeroCrossingRate] =
          static_cast<double>(crossings) / static_cast<double>(hi - lo - 1);
    }
  }

  // THD at harmonics 2..5 of the cycle peak frequency; masked at a 0 Hz peak.
  if (!cycle_spectrum || cycle_spectrum->frequency[cycle_peak] == 0.0) {
    out.missing[kThd] = true;
  } else {
    const auto& spec = *cycle_spectrum;
    double f0 = spec.frequency[cycle_peak];
    double harmonic_power = 0.0;
    for (int h = 2; h <= 5; ++h) {
      auto bin = static_cast<int64_t>(std::llround(h * f0 / spec.resolution));
      if (bin < static_cast<int64_t>(spec.power.size())) {
        harmonic_power += spec.power[bin];
      }
    }
    out.values[kThd] =
        std::sqrt(harmonic_power) / std::sqrt(spec.power[cycle_peak]);
  }

  // Cepstrum peak over quefrencies >= 2 ms.
  {
    auto [lo, hi] = windows[4];
    if (hi - lo < 8) {
      out.missing[kCepstrumPeak] = true;
    } else {
      std::vector<double> x(signal.begin() + lo, signal.begin() + hi);
      out.values[kCepstrumPeak] = real_cepstrum_peak(x);
    }
  }

  out.values[kDwtSnr] = snr_db;
  return out;
}

FeatureVector aggregate_features(const std::vector<CycleDescriptor>& descriptors,
                                 const std::string& id) {
  if (descriptors.empty()) throw Error("aggregate_features: no descriptors");

  FeatureVector out;
  out.id = id;
  for (int d = 0; d < kDescriptorCount; ++d) {
    std::vector<double> vals;
    vals.reserve(descriptors.size());
    for (const auto& c : descriptors) {
      if (!c.missing[d]) vals.push_back(c.values[d]);
    }
    if (vals.empty()) {
      out.missing[2 * d] = true;
      out.missing[2 * d + 1] = true;
      continue;
    }
    out.values[2 * d] = mean(vals);
    out.values[2 * d + 1] = sample_sd(vals);
  }
  return out;
}

ImputeResult impute_median(std::vector<FeatureVector> training) {
  ImputeResult out;
  for (int col = 0; col < kFeatureCount; ++col) {
    std::vector<double> vals;
    for (const auto& row : training) {
      if (!row.missing[col]) vals.push_back(row.values[col]);
    }
    if (vals.empty()) {
      throw Error("impute_median: feature '" + feature_names()[col] +
                  "' is masked in every training recording");
    }
    out.medians[col] = median(std::move(vals));
  }
  for (auto& row : training) apply_medians(row, out.medians);
  out.completed = std::move(training);
  return out;
}

void apply_medians(FeatureVector& v,
                   const std::array<double, kFeatureCount>& medians) {
  for (int col = 0; col < kFeatureCount; ++col) {
    if (v.missing[col]) {
      v.values[col] = medians[col];
      v.missing[col] = false;
    }
  }
}

void save_feature_csv(const std::vector<FeatureVector>& rows,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "id";
  for (const auto& name : feature_names()) out << "," << name;
  out << "\n";
  for (const auto& row : rows) {
    out << row.id;
    for (int col = 0; col < kFeatureCount; ++col) {
      out << ",";
      if (!row.missing[col]) out << format_double(row.values[col]);
    }
    out << "\n";
  }
}

std::vector<FeatureVector> load_feature_csv(const std::string& path) {
  auto rows = read_csv_file(path);
  if (rows.empty()) throw Error("empty feature CSV: " + path);
  if (rows[0].size() != kFeatureCount + 1 || rows[0][0] != "id") {
    throw Error("feature CSV header mismatch: " + path);
  }
  for (int col = 0; col < kFeatureCount; ++col) {
    if (rows[0][col + 1] != feature_names()[col]) {
      throw Error("feature CSV column " + std::to_string(col + 1) + " is '" +
                  rows[0][col + 1] + "', expected '" + feature_names()[col] +
                  "'");
    }
  }
  std::vector<FeatureVector> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != kFeatureCount + 1) {
      throw Error("feature CSV row " + std::to_string(r + 1) +
                  ": wrong column count");
    }
    FeatureVector v;
    v.id = rows[r][0];
    for (int col = 0; col < kFeatureCount; ++col) {
      const auto& cell = rows[r][col + 1];
      if (cell.empty()) {
        v.missing[col] = true;
      } else {
        try {
          v.values[col] = std::stod(cell);
        } catch (const std::exception&) {
          throw Error("feature CSV row " + std::to_string(r + 1) +
                      ": bad value '" + cell + "'");
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

void save_medians_csv(const std::array<double, kFeatureCount>& medians,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "feature,median\n";
  for (int col = 0; col < kFeatureCount; ++col) {
    out << feature_names()[col] << "," << format_double(medians[col]) << "\n";
  }
}

std::array<double, kFeatureCount> load_medians_csv(const std::string& path) {
  auto rows = read_csv_file(path);
  std::array<double, kFeatureCount> out{};
  std::array<bool, kFeatureCount> seen{};
  const auto& names = feature_names();
  for (size_t r = 0; r < rows.size(); ++r) {
    if (r == 0 && rows[r].size() == 2 && rows[r][1] == "median") continue;
    if (rows[r].size() != 2) {
      throw Error("medians CSV row " + std::to_string(r + 1) +
                  ": expected `feature,median`");
    }
    auto it = std::find(names.begin(), names.end(), rows[r][0]);
    if (it == names.end()) {
      throw Error("medians CSV: unknown feature '" + rows[r][0] + "'");
    }
    auto idx = static_cast<int>(it - names.begin());
    try {
      out[idx] = std::stod(rows[r][1]);
    } catch (const std::exception&) {
      throw Error("medians CSV row " + std::to_string(r + 1) + ": bad value");
    }
    seen[idx] = true;
  }
  for (int col = 0; col < kFeatureCount; ++col) {
    if (!seen[col]) {
      throw Error("medians CSV missing feature '" + names[col] + "'");
    }
  }
  return out;
}

}  // namespace pcg
