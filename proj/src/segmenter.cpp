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

#include "pcg/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "pcg/fft.hpp"
#include "pcg/synthgen.hpp"
#include "pcg/wavelet.hpp"

namespace pcg {

namespace {

constexpr int kRate = 1000;
constexpr int kDecimation = kRate / EnvelopeFeatures::kFeatureRateHz;  // 20
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// --- low-pass filtering for the homomorphic envelope ---------------------

struct Biquad {
  double b0, b1, b2, a1, a2;
};

Biquad butter2_lowpass(double cutoff_hz, double rate_hz) {
  double w = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  double w2 = w * w;
  double a0 = 1.0 + std::numbers::sqrt2 * w + w2;
  return Biquad{w2 / a0, 2.0 * w2 / a0, w2 / a0, 2.0 * (w2 - 1.0) / a0,
                (1.0 - std::numbers::sqrt2 * w + w2) / a0};
}

std::vector<double> biquad_filter(const std::vector<double>& x, const Biquad& q) {
  std::vector<double> y(x.size());
  // Unity-DC-gain steady state at the first sample avoids a startup step.
  double x1 = x[0], x2 = x[0], y1 = x[0], y2 = x[0];
  for (size_t i = 0; i < x.size(); ++i) {
    double yi = q.b0 * x[i] + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
    x2 = x1;
    x1 = x[i];
    y2 = y1;
    y1 = yi;
    y[i] = yi;
  }
  return y;
}

// Zero-phase: forward, reverse, forward, reverse, with edge-replicated
// padding to suppress boundary transients.
std::vector<double> filtfilt(const std::vector<double>& x, const Biquad& q) {
  constexpr size_t kPad = 100;
  std::vector<double> padded;
  padded.reserve(x.size() + 2 * kPad);
  padded.insert(padded.end(), kPad, x.front());
  padded.insert(padded.end(), x.begin(), x.end());
  padded.insert(padded.end(), kPad, x.back());

  auto y = biquad_filter(padded, q);
  std::reverse(y.begin(), y.end());
  y = biquad_filter(y, q);
  std::reverse(y.begin(), y.end());
  return std::vector<double>(y.begin() + kPad, y.begin() + kPad + x.size());
}

std::vector<double> decimate_mean(const std::vector<double>& env) {
  size_t frames = env.size() / kDecimation;
  std::vector<double> out(frames);
  for (size_t f = 0; f < frames; ++f) {
    double s = 0.0;
    for (int j = 0; j < kDecimation; ++j) s += env[f * kDecimation + j];
    out[f] = s / kDecimation;
  }
  return out;
}

void standardize(std::vector<double>& v) {
  if (v.empty()) return;
  double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  double sd = std::sqrt(acc / static_cast<double>(v.size()));
  if (sd < 1e-12) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = (x - m) / sd;
}

double gaussian_log_pdf(double x, double mu, double sd) {
  double z = (x - mu) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

EnvelopeFeatures extract_envelopes(const std::vector<double>& signal) {
  if (signal.size() < 1000) {
    throw Error("extract_envelopes: signal shorter than one second");
  }

  // Homomorphic: low-pass the log magnitude, back through exp.
  std::vector<double> logmag(signal.size());
  for (size_t i = 0; i < signal.size(); ++i) {
    logmag[i] = std::log(std::fabs(signal[i]) + 1e-8);
  }
  auto smooth = filtfilt(logmag, butter2_lowpass(8.0, kRate));
  std::vector<double> homo(signal.size());
  for (size_t i = 0; i < signal.size(); ++i) homo[i] = std::exp(smooth[i]);

  auto hilb = hilbert_envelope(signal);

  auto band = bandpass_fft(signal, kRate, 40.0, 60.0);
  std::vector<double> band_power(signal.size());
  for (size_t i = 0; i < signal.size(); ++i) band_power[i] = band[i] * band[i];

  auto coeffs = dwt_forward(signal, Wavelet::Daubechies4, 3);
  for (auto& v : coeffs.details[0]) v = 0.0;
  for (auto& v : coeffs.details[1]) v = 0.0;
  for (auto& v : coeffs.approximation) v = 0.0;
  auto d3 = dwt_inverse(coeffs);
  for (auto& v : d3) v = std::fabs(v);

  EnvelopeFeatures env;
  env.columns[0] = decimate_mean(homo);
  env.columns[1] = decimate_mean(hilb);
  env.columns[2] = decimate_mean(band_power);
  env.columns[3] = decimate_mean(d3);
  for (auto& col : env.columns) standardize(col);
  return env;
}

HeartRateEstimate estimate_heart_rate(const EnvelopeFeatures& env) {
  const auto& x = env.columns[0];
  auto t_frames = static_cast<int64_t>(x.size());
  if (t_frames < 100) throw Error("estimate_heart_rate: fewer than 100 frames");

  HeartRateEstimate fallback{0.8 * EnvelopeFeatures::kFeatureRateHz, 0.3, true};

  double denom = 0.0;
  for (double v : x) denom += v * v;
  if (denom < 1e-12) return fallback;

  auto autocorr = [&](int64_t lag) {
    if (lag < 0 || lag >= t_frames) return 0.0;
    double s = 0.0;
    for (int64_t t = 0; t + lag < t_frames; ++t) s += x[t] * x[t + lag];
    return s / denom;
  };

  // Highest strict local maximum in [lo, hi]; a range-edge maximum is not a
  // peak (murmur-filled systoles produce monotone decays there).
  auto best_peak = [&](int64_t lo, int64_t hi) {
    int64_t best_lag = -1;
    double best_r = kNegInf;
    for (int64_t lag = lo; lag <= hi && lag < t_frames; ++lag) {
      double r = autocorr(lag);
      if (r > autocorr(lag - 1) && r >= autocorr(lag + 1) && r > best_r) {
        best_r = r;
        best_lag = lag;
      }
    }
    return std::make_pair(best_lag, best_r);
  };

  const auto lag_lo = static_cast<int64_t>(
      std::ceil(0.33 * EnvelopeFeatures::kFeatureRateHz));
  const auto lag_hi = std::min<int64_t>(
      static_cast<int64_t>(std::floor(2.0 * EnvelopeFeatures::kFeatureRateHz)),
      t_frames - 1);

  auto [cycle_lag, cycle_r] = best_peak(lag_lo, lag_hi);
  // A weak maximum is indistinguishable from noise; 0.2 is well above what
  // white-noise envelopes reach and well below any real cycle peak.
  if (cycle_lag < 0 || cycle_r < 0.2) return fallback;

  double fraction = 0.3;
  auto frac_lo = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(0.2 * cycle_lag)));
  auto frac_hi = static_cast<int64_t>(std::floor(0.5 * cycle_lag));
  auto [sys_lag, sys_r] = best_peak(frac_lo, frac_hi);
  if (sys_lag > 0 && sys_r > 0.0) {
    fraction = static_cast<double>(sys_lag) / static_cast<double>(cycle_lag);
  }
  fraction = std::clamp(fraction, 0.25, 0.45);

  return HeartRateEstimate{static_cast<double>(cycle_lag), fraction, false};
}

EmissionParams fit_emissions(const std::vector<LabeledEnvelopes>& data) {
  std::array<std::array<std::vector<double>, 4>, 4> samples;  // [state][feature]
  for (const auto& item : data) {
    if (item.states.size() != item.env.frames()) {
      throw Error("fit_emissions: state labels do not match frame count");
    }
    for (size_t f = 0; f < item.states.size(); ++f) {
      int s = static_cast<int>(item.states[f]);
      for (int k = 0; k < EnvelopeFeatures::kNumFeatures; ++k) {
        samples[s][k].push_back(item.env.columns[k][f]);
      }
    }
  }

  EmissionParams p;
  const char* names[] = {"S1", "systole", "S2", "diastole"};
  for (int s = 0; s < 4; ++s) {
    if (samples[s][0].empty()) {
      throw Error(std::string("fit_emissions: no frames labeled ") + names[s]);
    }
    for (int k = 0; k < 4; ++k) {
      p.mean[s][k] = mean(samples[s][k]);
      p.sd[s][k] = std::max(sample_sd(samples[s][k]), 0.05);
    }
  }
  return p;
}

HsmmParams derive_params(const HeartRateEstimate& hr,
                         const EmissionParams& emissions) {
  const double rate = EnvelopeFeatures::kFeatureRateHz;
  double cycle = hr.cycle_frames;
  double s1 = 0.120 * rate;
  double s2 = 0.100 * rate;
  double sys = std::max(1.0, hr.systole_fraction * cycle - s1);
  double dia = std::max(1.0, cycle - s1 - s2 - sys);

  HsmmParams p;
  p.duration_mean = {s1, sys, s2, dia};
  // 25% of the mean, floored at 1.5 frames. Systole and diastole lengths
  // inherit the systole-fraction estimate, whose error scales with the cycle
  // (murmurs can displace the autocorrelation peak), so their SDs get a
  // cycle-proportional floor and the emissions decide inside that window.
  for (int s = 0; s < 4; ++s) {
    p.duration_sd[s] = std::max(0.25 * p.duration_mean[s], 1.5);
  }
  p.duration_sd[1] = std::max(p.duration_sd[1], 0.08 * cycle);
  p.duration_sd[3] = std::max(p.duration_sd[3], 0.08 * cycle);
  p.emissions = emissions;
  return p;
}

std::pair<int64_t, int64_t> duration_support(double mean, double sd) {
  auto lo = static_cast<int64_t>(std::ceil(mean - 3.0 * sd));
  auto hi = static_cast<int64_t>(std::floor(mean + 3.0 * sd));
  lo = std::max<int64_t>(1, lo);
  hi = std::max(lo, hi);
  return {lo, hi};
}

double duration_log_prob(int64_t d, double mean, double sd) {
  double z = (static_cast<double>(d) - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

std::vector<int> hsmm_decode_general(
    const std::vector<std::vector<double>>& emission_ll,
    const std::vector<double>& duration_mean,
    const std::vector<double>& duration_sd) {
  const auto n_states = static_cast<int>(emission_ll.size());
  if (n_states < 2 || n_states > 4) throw Error("decoder expects 2..4 states");
  const auto t_total = static_cast<int64_t>(emission_ll[0].size());
  if (t_total < 1) throw Error("decoder needs at least one frame");

  std::vector<int64_t> lo(n_states), hi(n_states);
  for (int s = 0; s < n_states; ++s) {
    std::tie(lo[s], hi[s]) = duration_support(duration_mean[s], duration_sd[s]);
  }
  auto clamped_logdur = [&](int s, int64_t d) {
    return duration_log_prob(std::clamp(d, lo[s], hi[s]), duration_mean[s],
                             duration_sd[s]);
  };

  // Emission prefix sums: ll of frames [a, b) in state s.
  std::vector<std::vector<double>> prefix(
      n_states, std::vector<double>(t_total + 1, 0.0));
  for (int s = 0; s < n_states; ++s) {
    for (int64_t t = 0; t < t_total; ++t) {
      prefix[s][t + 1] = prefix[s][t] + emission_ll[s][t];
    }
  }
  auto emit = [&](int s, int64_t a, int64_t b) {
    return prefix[s][b] - prefix[s][a];
  };
  auto prev_of = [&](int s) { return (s + n_states - 1) % n_states; };

  // V[t][s]: best score covering frames [0, t) with the segment ending at t
  // in state s. The first segment may be a truncated visit (any length up to
  // hi, duration scored at the clamped value); interior segments must lie
  // inside the support. Candidates are scanned in ascending duration so ties
  // keep the shortest.
  std::vector<std::vector<double>> score(
      t_total + 1, std::vector<double>(n_states, kNegInf));
  std::vector<std::vector<int64_t>> back(
      t_total + 1, std::vector<int64_t>(n_states, 0));

  for (int64_t t = 1; t <= t_total; ++t) {
    for (int s = 0; s < n_states; ++s) {
      double best = kNegInf;
      int64_t best_d = 0;
      int p = prev_of(s);
      int64_t d_hi = std::min(hi[s], t - 1);
      for (int64_t d = lo[s]; d <= d_hi; ++d) {
        if (score[t - d][p] == kNegInf) continue;
        double cand = score[t - d][p] +
                      duration_log_prob(d, duration_mean[s], duration_sd[s]) +
                      emit(s, t - d, t);
        if (cand > best) {
          best = cand;
          best_d = d;
        }
      }
      if (t <= hi[s]) {  // truncated leading visit covering [0, t)
        double cand = clamped_logdur(s, t) + emit(s, 0, t);
        if (cand > best) {
          best = cand;
          best_d = t;
        }
      }
      score[t][s] = best;
      back[t][s] = best_d;
    }
  }

  // Termination: the trailing segment may also be truncated. Scanned in
  // ascending duration, then ascending state, so ties prefer the shorter
  // duration and the lower state index.
  double best = kNegInf;
  int best_s = -1;
  int64_t best_d = 0;
  for (int64_t d = 1; d <= t_total; ++d) {
    for (int s = 0; s < n_states; ++s) {
      if (d > hi[s]) continue;
      int64_t t0 = t_total - d;
      double cand;
      if (t0 == 0) {
        cand = clamped_logdur(s, d) + emit(s, 0, t_total);
      } else if (score[t0][prev_of(s)] != kNegInf) {
        cand = score[t0][prev_of(s)] + clamped_logdur(s, d) +
               emit(s, t0, t_total);
      } else {
        continue;
      }
      if (cand > best) {
        best = cand;
        best_s = s;
        best_d = d;
      }
    }
  }
  if (best_s < 0) throw Error("decoder found no feasible segmentation");

  std::vector<int> states(t_total, 0);
  int64_t t = t_total;
  int s = best_s;
  int64_t d = best_d;
  while (t > 0) {
    for (int64_t u = t - d; u < t; ++u) states[u] = s;
    t -= d;
    if (t == 0) break;
    s = prev_of(s);
    d = back[t][s];
    if (d <= 0) throw Error("decoder backtrack failed");
  }
  return states;
}

std::vector<HeartState> hsmm_decode(const EnvelopeFeatures& env,
                                    const HsmmParams& params) {
  auto t_total = static_cast<int64_t>(env.frames());
  if (t_total < 1) throw Error("hsmm_decode: no frames");

  std::vector<std::vector<double>> emission_ll(
      4, std::vector<double>(t_total, 0.0));
  for (int s = 0; s < 4; ++s) {
    for (int64_t t = 0; t < t_total; ++t) {
      double ll = 0.0;
      for (int k = 0; k < EnvelopeFeatures::kNumFeatures; ++k) {
        ll += gaussian_log_pdf(env.columns[k][t], params.emissions.mean[s][k],
                               params.emissions.sd[s][k]);
      }
      emission_ll[s][t] = ll;
    }
  }

  std::vector<double> dm(params.duration_mean.begin(), params.duration_mean.end());
  std::vector<double> ds(params.duration_sd.begin(), params.duration_sd.end());
  auto raw = hsmm_decode_general(emission_ll, dm, ds);
  std::vector<HeartState> out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<HeartState>(raw[i]);
  return out;
}

std::vector<CardiacCycle> cycles_from_states(const std::vector<HeartState>& states,
                                             int feature_rate_hz) {
  if (feature_rate_hz <= 0) throw Error("feature rate must be positive");
  const int64_t upsample = kRate / feature_rate_hz;

  struct Run {
    HeartState state;
    int64_t start;
    int64_t len;
  };
  std::vector<Run> runs;
  for (size_t i = 0; i < states.size(); ++i) {
    if (!runs.empty() && runs.back().state == states[i]) {
      ++runs.back().len;
    } else {
      runs.push_back({states[i], static_cast<int64_t>(i), 1});
    }
  }

  std::vector<CardiacCycle> cycles;
  for (size_t i = 0; i + 3 < runs.size(); ++i) {
    if (runs[i].state != HeartState::S1 ||
        runs[i + 1].state != HeartState::Systole ||
        runs[i + 2].state != HeartState::S2 ||
        runs[i + 3].state != HeartState::Diastole) {
      continue;
    }
    CardiacCycle c;
    c.s1_start = runs[i].start * upsample;
    c.sys_start = runs[i + 1].start * upsample;
    c.s2_start = runs[i + 2].start * upsample;
    c.dia_start = runs[i + 3].start * upsample;
    c.cycle_end = (runs[i + 3].start + runs[i + 3].len) * upsample;
    cycles.push_back(c);
  }
  return cycles;
}

std::vector<CardiacCycle> SegmenterModel::segment(
    const std::vector<double>& signal) const {
  auto env = extract_envelopes(signal);
  HeartRateEstimate hr;
  if (env.frames() >= 100) {
    hr = estimate_heart_rate(env);
  } else {
    hr.fallback = true;  // too short to estimate; generic 75 bpm prior
  }
  auto params = derive_params(hr, emissions);
  auto states = hsmm_decode(env, params);
  return cycles_from_states(states, EnvelopeFeatures::kFeatureRateHz);
}

std::vector<CardiacCycle> SegmenterModel::segment(const Recording& r) const {
  if (r.sample_rate != kRate) {
    throw Error("segmenter expects 1000 Hz input; resample first");
  }
  return segment(r.samples);
}

SegmenterModel train_default_segmenter(uint64_t seed, int n_recordings) {
  DatasetRanges ranges;  // defaults match the synthetic experiment ranges
  auto data = generate_dataset(n_recordings, 0.5, ranges, seed);

  std::vector<LabeledEnvelopes> labeled;
  labeled.reserve(data.size());
  for (const auto& rec : data) {
    LabeledEnvelopes item;
    item.env = extract_envelopes(denoise(rec.recording.samples).denoised);
    item.states = rec.frame_states;
    labeled.push_back(std::move(item));
  }
  return SegmenterModel{fit_emissions(labeled)};
}

// --- cycle CSV ------------------------------------------------------------

void save_cycle_csv(const std::map<std::string, std::vector<CardiacCycle>>& cycles,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "record_id,s1_start,sys_start,s2_start,dia_start,cycle_end\n";
  for (const auto& [id, list] : cycles) {
    for (const auto& c : list) {
      out << id << "," << c.s1_start << "," << c.sys_start << "," << c.s2_start
          << "," << c.dia_start << "," << c.cycle_end << "\n";
    }
  }
}

std::map<std::string, std::vector<CardiacCycle>> load_cycle_csv(
    const std::string& path) {
  auto rows = read_csv_file(path);
  std::map<std::string, std::vector<CardiacCycle>> out;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && row.size() == 6 && row[1] == "s1_start") continue;
    if (row.size() != 6) {
      throw Error("cycle CSV row " + std::to_string(i + 1) +
                  ": expected 6 columns");
    }
    CardiacCycle c;
    try {
      c.s1_start = std::stoll(row[1]);
      c.sys_start = std::stoll(row[2]);
      c.s2_start = std::stoll(row[3]);
      c.dia_start = std::stoll(row[4]);
      c.cycle_end = std::stoll(row[5]);
    } catch (const std::exception&) {
      throw Error("cycle CSV row " + std::to_string(i + 1) + ": bad integer");
    }
    if (!(c.s1_start < c.sys_start && c.sys_start < c.s2_start &&
          c.s2_start < c.dia_start && c.dia_start < c.cycle_end)) {
      throw Error("cycle CSV row " + std::to_string(i + 1) +
                  ": boundaries not strictly increasing");
    }
    out[row[0]].push_back(c);
  }
  return out;
}

}  // namespace pcg
