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

#include "pcg/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "pcg/fft.hpp"

namespace pcg {

namespace {

constexpr int kRate = 1000;  // all synthesis happens at 1000 Hz
constexpr int kSamplesPerFrame = 20;

void validate(const SynthSpec& s) {
  if (s.heart_rate_bpm < 50.0 || s.heart_rate_bpm > 150.0) {
    throw Error("heart rate out of range [50, 150] bpm");
  }
  if (s.s1_freq_hz >= 500.0 || s.s2_freq_hz >= 500.0) {
    throw Error("sound frequency must stay below the 500 Hz Nyquist limit");
  }
  if (s.murmur && s.murmur->band_hi_hz >= 500.0) {
    throw Error("murmur band must stay below the 500 Hz Nyquist limit");
  }
  if (s.noise_sd < 0.0) throw Error("noise SD must be non-negative");
  if (s.duration_s <= 0.0) throw Error("duration must be positive");
  double cycle_s = 60.0 / s.heart_rate_bpm;
  double sys_onset_s = s.systole_fraction * cycle_s;
  if (s.s1_duration_ms / 1000.0 >= sys_onset_s) {
    throw Error("S1 duration does not fit before the S2 onset");
  }
  if (sys_onset_s + s.s2_duration_ms / 1000.0 >= cycle_s) {
    throw Error("S2 duration does not fit within the cycle");
  }
  if (s.systole_fraction <= 0.0 || s.systole_fraction >= 1.0) {
    throw Error("systole fraction must lie in (0, 1)");
  }
}

// Gaussian-enveloped sinusoid burst starting at `onset`, lasting `dur`
// samples. Valve sounds attack fast and ring down, so the envelope peaks at
// one third of the window (13.5% of peak amplitude right at the onset) and
// decays to ~0.03% by the end.
void add_burst(std::vector<double>& x, int64_t onset, int64_t dur, double freq,
               double amp) {
  double center = static_cast<double>(onset) + static_cast<double>(dur) / 3.0;
  double sigma = static_cast<double>(dur) / 6.0;
  int64_t end = std::min<int64_t>(onset + dur, static_cast<int64_t>(x.size()));
  for (int64_t t = std::max<int64_t>(onset, 0); t < end; ++t) {
    double dt = static_cast<double>(t) - center;
    double env = std::exp(-dt * dt / (2.0 * sigma * sigma));
    x[t] += amp * env *
            std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) /
                     kRate);
  }
}

}  // namespace

SynthRecording generate_recording(const SynthSpec& spec) {
  validate(spec);

  auto n = static_cast<int64_t>(std::llround(spec.duration_s * kRate));
  auto period = static_cast<int64_t>(std::llround(60.0 * kRate / spec.heart_rate_bpm));
  auto s1_dur = static_cast<int64_t>(std::llround(spec.s1_duration_ms));
  auto s2_dur = static_cast<int64_t>(std::llround(spec.s2_duration_ms));
  auto s2_onset = static_cast<int64_t>(std::llround(spec.systole_fraction *
                                                    static_cast<double>(period)));

  std::vector<double> x(n, 0.0);
  Rng base(spec.seed);
  Rng murmur_rng = base.fork(1);
  Rng noise_rng = base.fork(2);

  bool has_murmur = spec.murmur.has_value() && spec.murmur->amplitude > 0.0;

  SynthRecording out;
  for (int64_t k = 0; k * period < n; ++k) {
    int64_t s1_start = k * period;
    add_burst(x, s1_start, s1_dur, spec.s1_freq_hz, spec.s1_amplitude);
    add_burst(x, s1_start + s2_onset, s2_dur, spec.s2_freq_hz,
              spec.s2_amplitude);

    if (spec.murmur) {
      // Murmur noise is drawn from its own stream even when amplitude is 0,
      // so an amplitude-0 spec produces the identical signal to no murmur.
      int64_t lo = s1_start + s1_dur;
      int64_t hi = std::min<int64_t>(s1_start + s2_onset, n);
      if (hi > lo) {
        std::vector<double> noise(hi - lo);
        for (auto& v : noise) v = murmur_rng.normal();
        auto band = bandpass_fft(noise, kRate, spec.murmur->band_lo_hz,
                                 spec.murmur->band_hi_hz);
        // Ejection murmurs are crescendo-decrescendo: shape with a half-sine
        // window (quiet against both S1 and S2), then normalize to the target
        // RMS.
        for (size_t i = 0; i < band.size(); ++i) {
          band[i] *= std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) /
                              static_cast<double>(band.size()));
        }
        double rms = std::sqrt(mean_square(band));
        if (rms > 0.0 && spec.murmur->amplitude > 0.0) {
          double scale = spec.murmur->amplitude * spec.s1_amplitude / rms;
          for (size_t i = 0; i < band.size(); ++i) x[lo + i] += band[i] * scale;
        }
      }
    }

    if (s1_start + period <= n) {
      CardiacCycle c;
      c.s1_start = s1_start;
      c.sys_start = s1_start + s1_dur;
      c.s2_start = s1_start + s2_onset;
      c.dia_start = s1_start + s2_onset + s2_dur;
      c.cycle_end = s1_start + period;
      out.cycles.push_back(c);
    }
  }

  if (spec.noise_sd > 0.0) {
    for (auto& v : x) v += spec.noise_sd * noise_rng.normal();
  }

  out.recording.id = spec.id;
  out.recording.sample_rate = kRate;
  out.recording.samples = normalize_samples(std::move(x));
  out.abnormal = has_murmur;
  out.recording.label = has_murmur ? Label::Abnormal : Label::Normal;

  // Per-frame ground-truth states from the cycle grid, extended over any
  // trailing partial cycle.
  auto frames = static_cast<size_t>(n / kSamplesPerFrame);
  out.frame_states.resize(frames);
  for (size_t f = 0; f < frames; ++f) {
    int64_t center = static_cast<int64_t>(f) * kSamplesPerFrame +
                     kSamplesPerFrame / 2;
    int64_t pos = center % period;
    HeartState st;
    if (pos < s1_dur) {
      st = HeartState::S1;
    } else if (pos < s2_onset) {
      st = HeartState::Systole;
    } else if (pos < s2_onset + s2_dur) {
      st = HeartState::S2;
    } else {
      st = HeartState::Diastole;
    }
    out.frame_states[f] = st;
  }
  return out;
}

std::vector<SynthRecording> generate_dataset(int n, double abnormal_fraction,
                                             const DatasetRanges& ranges,
                                             uint64_t seed) {
  if (n <= 0) throw Error("dataset size must be positive");
  if (abnormal_fraction < 0.0 || abnormal_fraction > 1.0) {
    throw Error("abnormal fraction must lie in [0, 1]");
  }

  int n_abnormal = static_cast<int>(std::lround(n * abnormal_fraction));
  Rng rng(seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<bool> abnormal(n, false);
  for (int i = 0; i < n_abnormal; ++i) abnormal[order[i]] = true;

  std::vector<SynthRecording> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng draw = rng.fork(1000 + static_cast<uint64_t>(i));
    SynthSpec spec;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "synth%04d", i);
    spec.id = buf;
    spec.heart_rate_bpm =
        draw.uniform(ranges.heart_rate_bpm.lo, ranges.heart_rate_bpm.hi);
    spec.systole_fraction =
        draw.uniform(ranges.systole_fraction.lo, ranges.systole_fraction.hi);
    spec.noise_sd = draw.uniform(ranges.noise_sd.lo, ranges.noise_sd.hi);
    spec.duration_s = ranges.duration_s;
    spec.seed = draw.next();
    if (abnormal[i]) {
      MurmurSpec m;
      m.amplitude =
          draw.uniform(ranges.murmur_amplitude.lo, ranges.murmur_amplitude.hi);
      spec.murmur = m;
    }
    out.push_back(generate_recording(spec));
  }
  return out;
}

}  // namespace pcg
