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

#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "pcg/features.hpp"

using pcg::CardiacCycle;
using pcg::CycleDescriptor;

namespace {

int didx(const std::string& name) { return pcg::descriptor_index(name); }

// Windowless direct DFT power oracle (independent of the fft path).
double direct_power_at(const std::vector<double>& x, double freq, double rate) {
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double phi = -2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate;
    acc += x[i] * std::complex<double>(std::cos(phi), std::sin(phi));
  }
  return std::norm(acc);
}

std::vector<double> sine(size_t n, double freq, double amp, double rate) {
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq *
                          static_cast<double>(i) / rate);
  }
  return x;
}

// A synthetic cycle: tones in each state window over a quiet noise floor.
struct TestCycleSignal {
  std::vector<double> signal;
  CardiacCycle cycle;
};

TestCycleSignal make_cycle_signal(double sys_tone_hz) {
  TestCycleSignal out;
  out.cycle = {0, 100, 400, 480, 800};
  out.signal.assign(800, 0.0);
  for (int64_t t = 0; t < 100; ++t) {
    out.signal[t] = 0.8 * std::sin(2.0 * std::numbers::pi * 50.0 * t / 1000.0);
  }
  for (int64_t t = 100; t < 400; ++t) {
    out.signal[t] =
        0.5 * std::sin(2.0 * std::numbers::pi * sys_tone_hz * t / 1000.0);
  }
  for (int64_t t = 400; t < 480; ++t) {
    out.signal[t] = 0.7 * std::sin(2.0 * std::numbers::pi * 70.0 * t / 1000.0);
  }
  for (int64_t t = 480; t < 800; ++t) {
    out.signal[t] = 0.1 * std::sin(2.0 * std::numbers::pi * 40.0 * t / 1000.0);
  }
  return out;
}

}  // namespace

TEST_CASE("descriptor and feature name counts") {
  CHECK(pcg::descriptor_names().size() == 58);
  CHECK(pcg::feature_names().size() == 116);
  CHECK(pcg::feature_names()[0] == "s1_duration_s_mean");
  CHECK(pcg::feature_names()[1] == "s1_duration_s_sd");
}

TEST_CASE("spectrum") {
  SUBCASE("bin-aligned tone peaks at its bin") {
    auto x = sine(1000, 100.0, 1.0, 1000.0);
    auto spec = pcg::spectrum(x, 1000.0);
    size_t peak = 0;
    for (size_t k = 1; k < spec.power.size(); ++k) {
      if (spec.power[k] > spec.power[peak]) peak = k;
    }
    CHECK(spec.frequency[peak] == doctest::Approx(100.0));
    CHECK(spec.power[peak] == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("peak power is independent of length") {
    for (size_t n : {250, 500, 2000}) {
      auto x = sine(n, 100.0, 1.0, 1000.0);
      auto spec = pcg::spectrum(x, 1000.0);
      size_t peak = 0;
      for (size_t k = 1; k < spec.power.size(); ++k) {
        if (spec.power[k] > spec.power[peak]) peak = k;
      }
      CHECK(spec.power[peak] == doctest::Approx(0.5).epsilon(1e-6));
    }
  }
  SUBCASE("DC concentrates at bin 0") {
    std::vector<double> x(256, 1.0);
    auto spec = pcg::spectrum(x, 1000.0);
    size_t peak = 0;
    for (size_t k = 1; k < spec.power.size(); ++k) {
      if (spec.power[k] > spec.power[peak]) peak = k;
    }
    CHECK(peak == 0);
    // The Hann window's own transform spans bins 0..1; beyond that, nothing.
    for (size_t k = 2; k < spec.power.size(); ++k) {
      CHECK(spec.power[k] < 1e-20);
    }
  }
  SUBCASE("two-tone power ratio matches the direct DFT oracle") {
    size_t n = 1000;
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = std::sin(2.0 * std::numbers::pi * 50.0 * i / 1000.0) +
             0.5 * std::sin(2.0 * std::numbers::pi * 200.0 * i / 1000.0);
    }
    auto spec = pcg::spectrum(x, 1000.0);
    size_t peak = 0;
    for (size_t k = 1; k < spec.power.size(); ++k) {
      if (spec.power[k] > spec.power[peak]) peak = k;
    }
    CHECK(spec.frequency[peak] == doctest::Approx(50.0));
    double ratio = spec.power[50] / spec.power[200];
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
    double oracle_ratio =
        direct_power_at(x, 50.0, 1000.0) / direct_power_at(x, 200.0, 1000.0);
    CHECK(ratio == doctest::Approx(oracle_ratio).epsilon(0.05));
  }
  SUBCASE("too short") {
    CHECK_THROWS_AS(pcg::spectrum(std::vector<double>(7, 1.0), 1000.0),
                    pcg::Error);
  }
}

TEST_CASE("interval descriptors from constructed boundaries") {
  std::vector<double> signal(800, 0.05);
  CardiacCycle cycle{0, 100, 400, 480, 800};
  auto d = pcg::compute_cycle_descriptors(signal, cycle, 12.0);

  CHECK(d.values[didx("s1_duration_s")] == doctest::Approx(0.1));
  CHECK(d.values[didx("sys_duration_s")] == doctest::Approx(0.3));
  CHECK(d.values[didx("s2_duration_s")] == doctest::Approx(0.08));
  CHECK(d.values[didx("dia_duration_s")] == doctest::Approx(0.32));
  CHECK(d.values[didx("cycle_duration_s")] == doctest::Approx(0.8));
  CHECK(d.values[didx("sys_dia_dur_ratio")] == doctest::Approx(0.9375));
  CHECK(d.values[didx("heart_rate_bpm")] == doctest::Approx(75.0));
  CHECK(d.values[didx("s1_to_s2_interval_s")] == doctest::Approx(0.4));
  CHECK(d.values[didx("dwt_snr_db")] == doctest::Approx(12.0));
}

TEST_CASE("silent cycle masks spectral descriptors, zeroes amplitudes") {
  std::vector<double> signal(800, 0.0);
  CardiacCycle cycle{0, 100, 400, 480, 800};
  auto d = pcg::compute_cycle_descriptors(signal, cycle, 300.0);
  for (const char* name : {"s1_abs_amp", "cycle_abs_amp", "sys_total_power"}) {
    CHECK(!d.missing[didx(name)]);
    CHECK(d.values[didx(name)] == 0.0);
  }
  for (const char* name :
       {"s1_peak_freq_hz", "cycle_peak_freq_hz", "sys_peak_freq_power",
        "cycle_bandwidth_3db_hz", "s2_q_factor_6db", "cycle_thd"}) {
    CHECK(d.missing[didx(name)]);
  }
  CHECK(d.values[didx("cycle_zero_crossing_rate")] == 0.0);
}

TEST_CASE("systolic tone peak frequency and Q-factor") {
  auto [signal, cycle] = make_cycle_signal(150.0);
  auto d = pcg::compute_cycle_descriptors(signal, cycle, 20.0);

  // 300-sample systole -> 10/3 Hz resolution.
  CHECK(d.values[didx("sys_peak_freq_hz")] ==
        doctest::Approx(150.0).epsilon(0.03));
  CHECK(!d.missing[didx("sys_q_factor_3db")]);

  // Q-factor consistency with the spectrum op on the isolated window.
  std::vector<double> sys_window(signal.begin() + cycle.sys_start,
                                 signal.begin() + cycle.s2_start);
  auto spec = pcg::spectrum(sys_window, 1000.0);
  size_t peak = 0;
  for (size_t k = 1; k < spec.power.size(); ++k) {
    if (spec.power[k] > spec.power[peak]) peak = k;
  }
  CHECK(d.values[didx("sys_peak_freq_hz")] ==
        doctest::Approx(spec.frequency[peak]));
  CHECK(d.values[didx("sys_q_factor_3db")] ==
        doctest::Approx(d.values[didx("sys_peak_freq_hz")] /
                        d.values[didx("sys_bandwidth_3db_hz")]));
}

TEST_CASE("amplitude scaling property") {
  auto [signal, cycle] = make_cycle_signal(180.0);
  auto base = pcg::compute_cycle_descriptors(signal, cycle, 20.0);
  double c = 3.7;
  auto scaled_signal = signal;
  for (auto& v : scaled_signal) v *= c;
  auto scaled = pcg::compute_cycle_descriptors(scaled_signal, cycle, 20.0);

  for (const char* name : {"s1_abs_amp", "sys_abs_amp", "cycle_abs_amp"}) {
    CHECK(scaled.values[didx(name)] ==
          doctest::Approx(c * base.values[didx(name)]).epsilon(1e-9));
  }
  for (const char* name : {"s1_total_power", "cycle_total_power"}) {
    CHECK(scaled.values[didx(name)] ==
          doctest::Approx(c * c * base.values[didx(name)]).epsilon(1e-9));
  }
  for (const char* name :
       {"cycle_zero_crossing_rate", "s1_peak_freq_hz", "sys_peak_freq_hz",
        "sys_bandwidth_3db_hz", "sys_q_factor_3db", "cycle_thd"}) {
    CHECK(scaled.values[didx(name)] ==
          doctest::Approx(base.values[didx(name)]).epsilon(1e-9));
  }
}

TEST_CASE("time scaling property") {
  // Same waveform content resampled: constructed directly by doubling the
  // boundary spacing (interval descriptors only look at boundaries).
  std::vector<double> signal(1600, 0.05);
  CardiacCycle cycle{0, 100, 400, 480, 800};
  CardiacCycle doubled{0, 200, 800, 960, 1600};
  auto a = pcg::compute_cycle_descriptors(signal, cycle, 5.0);
  auto b = pcg::compute_cycle_descriptors(signal, doubled, 5.0);

  for (const char* name :
       {"s1_duration_s", "sys_duration_s", "s2_duration_s", "dia_duration_s",
        "cycle_duration_s", "s1_to_s2_interval_s", "s2_to_end_interval_s"}) {
    CHECK(b.values[didx(name)] ==
          doctest::Approx(2.0 * a.values[didx(name)]).epsilon(1e-9));
  }
  for (const char* name :
       {"s1_cycle_dur_ratio", "sys_cycle_dur_ratio", "s2_cycle_dur_ratio",
        "dia_cycle_dur_ratio", "sys_dia_dur_ratio", "s1_s2_dur_ratio",
        "sounds_cycle_dur_ratio", "s1_to_s2_cycle_ratio"}) {
    CHECK(b.values[didx(name)] ==
          doctest::Approx(a.values[didx(name)]).epsilon(1e-9));
  }
  CHECK(b.values[didx("heart_rate_bpm")] ==
        doctest::Approx(0.5 * a.values[didx("heart_rate_bpm")]).epsilon(1e-9));
}

TEST_CASE("short sub-windows are masked, not fatal") {
  std::vector<double> signal(800, 0.05);
  CardiacCycle cycle{0, 4, 400, 480, 800};  // 4-sample S1
  auto d = pcg::compute_cycle_descriptors(signal, cycle, 0.0);
  CHECK(d.missing[didx("s1_abs_amp")]);
  CHECK(d.missing[didx("s1_peak_freq_hz")]);
  CHECK(!d.missing[didx("sys_abs_amp")]);
  CHECK(d.values[didx("s1_duration_s")] == doctest::Approx(0.004));
}

TEST_CASE("aggregate_features") {
  CycleDescriptor a, b;
  a.values[didx("s1_duration_s")] = 1.0;
  b.values[didx("s1_duration_s")] = 3.0;
  a.missing[didx("cycle_thd")] = true;
  b.missing[didx("cycle_thd")] = true;
  b.missing[didx("sys_peak_freq_hz")] = true;
  a.values[didx("sys_peak_freq_hz")] = 140.0;

  SUBCASE("mean and sample SD") {
    auto v = pcg::aggregate_features({a, b}, "rec");
    int i = didx("s1_duration_s");
    CHECK(v.values[2 * i] == doctest::Approx(2.0));
    CHECK(v.values[2 * i + 1] == doctest::Approx(std::numbers::sqrt2));
  }
  SUBCASE("single unmasked cycle gives SD zero") {
    auto v = pcg::aggregate_features({a, b}, "rec");
    int i = didx("sys_peak_freq_hz");
    CHECK(!v.missing[2 * i]);
    CHECK(v.values[2 * i] == doctest::Approx(140.0));
    CHECK(v.values[2 * i + 1] == 0.0);
  }
  SUBCASE("masked everywhere masks both aggregates") {
    auto v = pcg::aggregate_features({a, b}, "rec");
    int i = didx("cycle_thd");
    CHECK(v.missing[2 * i]);
    CHECK(v.missing[2 * i + 1]);
  }
  SUBCASE("single cycle gives all SDs zero") {
    auto v = pcg::aggregate_features({a}, "rec");
    for (int i = 0; i < pcg::kDescriptorCount; ++i) {
      if (!v.missing[2 * i + 1]) CHECK(v.values[2 * i + 1] == 0.0);
    }
  }
  SUBCASE("empty list errors") {
    CHECK_THROWS_AS(pcg::aggregate_features({}, "rec"), pcg::Error);
  }
}

TEST_CASE("impute_median") {
  auto make_vec = [](const std::string& id, double v, bool masked_first) {
    pcg::FeatureVector f;
    f.id = id;
    for (int col = 0; col < pcg::kFeatureCount; ++col) f.values[col] = v;
    f.missing[0] = masked_first;
    return f;
  };
  std::vector<pcg::FeatureVector> train = {
      make_vec("a", 1.0, false), make_vec("b", 2.0, false),
      make_vec("c", 100.0, true), make_vec("d", 4.0, false)};

  SUBCASE("masked entry becomes the column median") {
    auto r = pcg::impute_median(train);
    CHECK(r.medians[0] == doctest::Approx(2.0));  // median of {1, 2, 4}
    CHECK(r.completed[2].values[0] == doctest::Approx(2.0));
    CHECK(!r.completed[2].missing[0]);
  }
  SUBCASE("unmasked matrix is unchanged") {
    std::vector<pcg::FeatureVector> clean = {make_vec("a", 1.0, false),
                                             make_vec("b", 5.0, false)};
    auto r = pcg::impute_median(clean);
    CHECK(r.completed[0].values[0] == 1.0);
    CHECK(r.completed[1].values[0] == 5.0);
  }
  SUBCASE("held-out vectors use training medians, not their own") {
    auto r = pcg::impute_median(train);
    auto test_vec = make_vec("t", 999.0, true);
    pcg::apply_medians(test_vec, r.medians);
    CHECK(test_vec.values[0] == doctest::Approx(2.0));
  }
  SUBCASE("fully masked column errors with the feature name") {
    std::vector<pcg::FeatureVector> bad = {make_vec("a", 1.0, true),
                                           make_vec("b", 2.0, true)};
    CHECK_THROWS_WITH_AS(pcg::impute_median(bad),
                         doctest::Contains("s1_duration_s_mean"), pcg::Error);
  }
}

TEST_CASE("feature csv round trip") {
  pcg::FeatureVector f;
  f.id = "rec01";
  for (int col = 0; col < pcg::kFeatureCount; ++col) {
    f.values[col] = 0.1 * col;
  }
  f.missing[3] = true;
  f.missing[115] = true;

  auto path = std::string("/tmp/pcg_features_test.csv");
  pcg::save_feature_csv({f}, path);
  auto back = pcg::load_feature_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == "rec01");
  for (int col = 0; col < pcg::kFeatureCount; ++col) {
    CHECK(back[0].missing[col] == f.missing[col]);
    if (!f.missing[col]) CHECK(back[0].values[col] == f.values[col]);
  }

  std::array<double, pcg::kFeatureCount> medians{};
  for (int col = 0; col < pcg::kFeatureCount; ++col) medians[col] = col * 1.5;
  auto mpath = std::string("/tmp/pcg_medians_test.csv");
  pcg::save_medians_csv(medians, mpath);
  auto mback = pcg::load_medians_csv(mpath);
  CHECK(mback == medians);
}
