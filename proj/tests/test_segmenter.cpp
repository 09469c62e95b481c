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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pcg/fft.hpp"
#include "pcg/segmenter.hpp"
#include "pcg/synthgen.hpp"
#include "pcg/wavelet.hpp"

using pcg::EnvelopeFeatures;
using pcg::HeartState;

// ---------------------------------------------------------------------------
// Brute-force oracle: enumerate every segmentation the decoder considers and
// score it with the same duration/emission terms, summed per frame.
namespace {

struct Enumerated {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> states;
};

void enumerate_rec(const std::vector<std::vector<double>>& ll,
                   const std::vector<double>& dm, const std::vector<double>& ds,
                   const std::vector<std::pair<int64_t, int64_t>>& support,
                   int64_t t, int state, double score, bool first,
                   std::vector<int>& partial, Enumerated& out) {
  auto t_total = static_cast<int64_t>(ll[0].size());
  auto n_states = static_cast<int>(ll.size());
  auto [lo, hi] = support[state];

  for (int64_t d = 1; d + t <= t_total; ++d) {
    if (d > hi) break;
    bool is_last = (t + d == t_total);
    bool in_support = d >= lo;
    if (!first && !is_last && !in_support) continue;

    double seg = 0.0;
    for (int64_t u = t; u < t + d; ++u) seg += ll[state][u];
    int64_t scored_d = (first || is_last) ? std::clamp(d, lo, hi) : d;
    seg += pcg::duration_log_prob(scored_d, dm[state], ds[state]);

    for (int64_t u = t; u < t + d; ++u) partial[u] = state;
    if (is_last) {
      if (score + seg > out.best) {
        out.best = score + seg;
        out.states = partial;
      }
    } else {
      enumerate_rec(ll, dm, ds, support, t + d, (state + 1) % n_states,
                    score + seg, false, partial, out);
    }
  }
}

Enumerated brute_force_decode(const std::vector<std::vector<double>>& ll,
                              const std::vector<double>& dm,
                              const std::vector<double>& ds) {
  std::vector<std::pair<int64_t, int64_t>> support;
  for (size_t s = 0; s < dm.size(); ++s) {
    support.push_back(pcg::duration_support(dm[s], ds[s]));
  }
  Enumerated out;
  std::vector<int> partial(ll[0].size(), -1);
  for (int s0 = 0; s0 < static_cast<int>(ll.size()); ++s0) {
    enumerate_rec(ll, dm, ds, support, 0, s0, 0.0, true, partial, out);
  }
  return out;
}

double score_of(const std::vector<int>& states,
                const std::vector<std::vector<double>>& ll,
                const std::vector<double>& dm, const std::vector<double>& ds) {
  double score = 0.0;
  size_t i = 0;
  bool first = true;
  while (i < states.size()) {
    size_t j = i;
    while (j < states.size() && states[j] == states[i]) ++j;
    int s = states[i];
    auto [lo, hi] = pcg::duration_support(dm[s], ds[s]);
    auto d = static_cast<int64_t>(j - i);
    bool last = (j == states.size());
    int64_t scored_d = (first || last) ? std::clamp(d, lo, hi) : d;
    score += pcg::duration_log_prob(scored_d, dm[s], ds[s]);
    for (size_t u = i; u < j; ++u) score += ll[s][u];
    first = false;
    i = j;
  }
  return score;
}

}  // namespace

TEST_CASE("extract_envelopes basics") {
  SUBCASE("too short") {
    CHECK_THROWS_AS(pcg::extract_envelopes(std::vector<double>(999, 0.1)),
                    pcg::Error);
  }
  SUBCASE("frame count is floor(n/20)") {
    auto env = pcg::extract_envelopes(std::vector<double>(5000, 0.1));
    CHECK(env.frames() == 250);
  }
  SUBCASE("all-zero signal gives all-zero standardized columns") {
    auto env = pcg::extract_envelopes(std::vector<double>(2000, 0.0));
    for (const auto& col : env.columns) {
      for (double v : col) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("hilbert envelope of a windowed tone") {
  // 50 Hz burst between samples 1000 and 2000, silence elsewhere.
  std::vector<double> x(3000, 0.0);
  for (int t = 1000; t < 2000; ++t) {
    x[t] = std::sin(2.0 * std::numbers::pi * 50.0 * t / 1000.0);
  }
  auto env = pcg::hilbert_envelope(x);
  for (int t = 1200; t < 1800; ++t) {
    CHECK(env[t] == doctest::Approx(1.0).epsilon(0.05));
  }
  for (int t = 200; t < 800; ++t) {
    CHECK(env[t] < 0.05);
  }
}

TEST_CASE("estimate_heart_rate") {
  SUBCASE("pulse train every 40 frames") {
    EnvelopeFeatures env;
    std::vector<double> col(400, 0.0);
    for (size_t i = 0; i < col.size(); i += 40) col[i] = 1.0;
    double m = 1.0 / 40.0;
    for (auto& v : col) v -= m;
    for (auto& c : env.columns) c = col;
    auto est = pcg::estimate_heart_rate(env);
    CHECK(!est.fallback);
    CHECK(std::fabs(est.cycle_frames - 40.0) <= 1.0);
  }
  SUBCASE("one-second period maps to 50 frames") {
    EnvelopeFeatures env;
    std::vector<double> col(500);
    for (size_t i = 0; i < col.size(); ++i) {
      col[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 50.0);
    }
    for (auto& c : env.columns) c = col;
    auto est = pcg::estimate_heart_rate(env);
    CHECK(!est.fallback);
    CHECK(std::fabs(est.cycle_frames - 50.0) <= 1.0);
  }
  SUBCASE("white noise falls back flagged") {
    pcg::Rng rng(1234);
    EnvelopeFeatures env;
    for (auto& c : env.columns) {
      c.resize(500);
      for (auto& v : c) v = rng.normal();
    }
    auto est = pcg::estimate_heart_rate(env);
    CHECK(est.fallback);
    CHECK(est.cycle_frames == doctest::Approx(40.0));
    CHECK(est.systole_fraction == doctest::Approx(0.3));
  }
  SUBCASE("too few frames") {
    EnvelopeFeatures env;
    for (auto& c : env.columns) c.assign(99, 0.0);
    CHECK_THROWS_AS(pcg::estimate_heart_rate(env), pcg::Error);
  }
}

TEST_CASE("fit_emissions") {
  auto make_labeled = [](const std::array<std::vector<double>, 4>& values_per_state) {
    pcg::LabeledEnvelopes item;
    for (int s = 0; s < 4; ++s) {
      for (double v : values_per_state[s]) {
        for (auto& col : item.env.columns) col.push_back(v);
        item.states.push_back(static_cast<HeartState>(s));
      }
    }
    return item;
  };

  SUBCASE("constant feature floors the SD") {
    auto item = make_labeled({{{2.0, 2.0, 2.0}, {0.0}, {1.0}, {0.5}}});
    auto p = pcg::fit_emissions({item});
    CHECK(p.mean[0][0] == doctest::Approx(2.0));
    CHECK(p.sd[0][0] == doctest::Approx(0.05));
  }
  SUBCASE("two-frame state uses the sample SD") {
    auto item = make_labeled({{{1.0, 3.0}, {0.0}, {0.0}, {0.0}}});
    auto p = pcg::fit_emissions({item});
    CHECK(p.mean[0][0] == doctest::Approx(2.0));
    CHECK(p.sd[0][0] == doctest::Approx(std::numbers::sqrt2));
  }
  SUBCASE("missing state coverage errors") {
    pcg::LabeledEnvelopes item;
    for (int f = 0; f < 10; ++f) {
      for (auto& col : item.env.columns) col.push_back(0.0);
      item.states.push_back(HeartState::S1);  // only S1 present
    }
    CHECK_THROWS_WITH_AS(pcg::fit_emissions({item}),
                         doctest::Contains("systole"), pcg::Error);
  }
}

TEST_CASE("decoder equals brute force on small instances") {
  pcg::Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n_states = 2 + static_cast<int>(rng.uniform_int(0, 2));
    auto t_total = static_cast<int64_t>(rng.uniform_int(1, 8));
    std::vector<double> dm(n_states), ds(n_states);
    for (int s = 0; s < n_states; ++s) {
      dm[s] = rng.uniform(1.0, 4.0);
      ds[s] = rng.uniform(0.4, 1.5);
    }
    std::vector<std::vector<double>> ll(n_states,
                                        std::vector<double>(t_total));
    for (auto& row : ll) {
      for (auto& v : row) v = rng.uniform(-4.0, 0.0);
    }

    auto decoded = pcg::hsmm_decode_general(ll, dm, ds);
    auto oracle = brute_force_decode(ll, dm, ds);
    REQUIRE(decoded.size() == oracle.states.size());
    CHECK(score_of(decoded, ll, dm, ds) ==
          doctest::Approx(oracle.best).epsilon(1e-9));
    // Random emissions make ties measure-zero, so sequences must agree.
    CHECK(decoded == oracle.states);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("emission switches dominate when emissions are decisive") {
  // Two states alternating every 3 frames with overwhelming emissions.
  int64_t t_total = 12;
  std::vector<std::vector<double>> ll(2, std::vector<double>(t_total));
  for (int64_t t = 0; t < t_total; ++t) {
    bool in_state0 = (t / 3) % 2 == 0;
    ll[0][t] = in_state0 ? 0.0 : -100.0;
    ll[1][t] = in_state0 ? -100.0 : 0.0;
  }
  auto decoded = pcg::hsmm_decode_general(ll, {3.0, 3.0}, {1.0, 1.0});
  for (int64_t t = 0; t < t_total; ++t) {
    CHECK(decoded[t] == ((t / 3) % 2 == 0 ? 0 : 1));
  }
}

TEST_CASE("uniform emissions settle on the duration means") {
  // Integer duration means 6/8/5/21 frames, T exactly one full cycle. All
  // four rotations score identically; the tie rule (shortest last segment)
  // picks the one ending in S2.
  std::vector<double> dm = {6.0, 8.0, 5.0, 21.0};
  std::vector<double> ds = {0.5, 0.5, 0.5, 0.5};
  int64_t t_total = 40;
  std::vector<std::vector<double>> ll(4, std::vector<double>(t_total, -1.0));
  auto decoded = pcg::hsmm_decode_general(ll, dm, ds);

  std::vector<int> expected;
  for (int s : {3, 0, 1, 2}) {
    for (int k = 0; k < static_cast<int>(dm[s]); ++k) expected.push_back(s);
  }
  CHECK(decoded == expected);

  // Run lengths equal the duration means regardless of rotation.
  size_t i = 0;
  while (i < decoded.size()) {
    size_t j = i;
    while (j < decoded.size() && decoded[j] == decoded[i]) ++j;
    CHECK(static_cast<double>(j - i) == dm[decoded[i]]);
    i = j;
  }
}

TEST_CASE("decoded sequences always respect the cyclic order") {
  auto data = pcg::generate_dataset(4, 0.5, pcg::DatasetRanges{}, 77);
  auto segmenter = pcg::train_default_segmenter(33, 6);
  for (const auto& rec : data) {
    auto env = pcg::extract_envelopes(rec.recording.samples);
    auto params = pcg::derive_params(pcg::estimate_heart_rate(env),
                                     segmenter.emissions);
    auto states = pcg::hsmm_decode(env, params);
    for (size_t t = 1; t < states.size(); ++t) {
      if (states[t] != states[t - 1]) {
        CHECK(states[t] == pcg::next_state(states[t - 1]));
      }
    }
  }
}

TEST_CASE("cycles_from_states") {
  using S = HeartState;
  SUBCASE("single complete cycle of 5/15/5/25 frames spans 1000 samples") {
    std::vector<S> states;
    for (int i = 0; i < 5; ++i) states.push_back(S::S1);
    for (int i = 0; i < 15; ++i) states.push_back(S::Systole);
    for (int i = 0; i < 5; ++i) states.push_back(S::S2);
    for (int i = 0; i < 25; ++i) states.push_back(S::Diastole);
    auto cycles = pcg::cycles_from_states(states, 50);
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].s1_start == 0);
    CHECK(cycles[0].sys_start == 100);
    CHECK(cycles[0].s2_start == 400);
    CHECK(cycles[0].dia_start == 500);
    CHECK(cycles[0].cycle_end == 1000);
    CHECK(cycles[0].length() == 1000);
  }
  SUBCASE("leading partial cycle dropped") {
    std::vector<S> states;
    for (int i = 0; i < 10; ++i) states.push_back(S::Diastole);
    for (int i = 0; i < 5; ++i) states.push_back(S::S1);
    for (int i = 0; i < 10; ++i) states.push_back(S::Systole);
    for (int i = 0; i < 5; ++i) states.push_back(S::S2);
    for (int i = 0; i < 20; ++i) states.push_back(S::Diastole);
    auto cycles = pcg::cycles_from_states(states, 50);
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].s1_start == 200);
  }
  SUBCASE("all one state yields no cycles") {
    std::vector<S> states(30, S::S1);
    CHECK(pcg::cycles_from_states(states, 50).empty());
  }
}

TEST_CASE("segmenter finds cycles on a clean synthetic recording") {
  pcg::SynthSpec spec;
  spec.seed = 3;
  spec.heart_rate_bpm = 75.0;
  spec.duration_s = 8.0;
  spec.noise_sd = 0.02;
  auto rec = pcg::generate_recording(spec);

  auto segmenter = pcg::train_default_segmenter(33, 6);
  auto cycles = segmenter.segment(pcg::denoise(rec.recording.samples).denoised);
  CHECK(cycles.size() >= 8);
  CHECK(cycles.size() <= 10);
  for (const auto& c : cycles) {
    CHECK(c.length() == doctest::Approx(800.0).epsilon(0.15));
  }
}

TEST_CASE("cycle csv round trip") {
  std::map<std::string, std::vector<pcg::CardiacCycle>> cycles;
  cycles["rec1"] = {{0, 120, 280, 380, 800}, {800, 930, 1090, 1180, 1600}};
  cycles["rec2"] = {{10, 130, 290, 390, 810}};
  auto path = std::string("/tmp/pcg_cycles_test.csv");
  pcg::save_cycle_csv(cycles, path);
  auto back = pcg::load_cycle_csv(path);
  REQUIRE(back.size() == 2);
  REQUIRE(back["rec1"].size() == 2);
  CHECK(back["rec1"][1].s2_start == 1090);
  CHECK(back["rec2"][0].cycle_end == 810);
}
