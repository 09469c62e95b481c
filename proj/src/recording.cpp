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

#include "pcg/recording.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace pcg {

namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8);
}

void write_u32(std::ofstream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ofstream& out, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace

Recording load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    uint32_t chunk_size = read_u32(hdr + 4);
    const unsigned char* body = hdr + 8;
    if (pos + 8 + chunk_size > bytes.size()) {
      throw Error("truncated WAV chunk in " + path);
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw Error("malformed fmt chunk in " + path);
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = body;
      data_size = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size % 2);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) throw Error("missing fmt/data chunk: " + path);
  if (format != 1) {
    throw Error("unsupported WAV encoding (audio format " +
                std::to_string(format) + ", expected PCM): " + path);
  }
  if (channels != 1) {
    throw Error("expected mono WAV, got " + std::to_string(channels) +
                " channels: " + path);
  }
  if (bits != 16) {
    throw Error("expected 16-bit samples, got " + std::to_string(bits) +
                "-bit: " + path);
  }
  if (rate == 0) throw Error("invalid sample rate 0: " + path);
  if (data_size < 2) throw Error("empty recording: " + path);

  Recording r;
  r.id = std::filesystem::path(path).stem().string();
  r.sample_rate = static_cast<int>(rate);
  size_t n = data_size / 2;
  r.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int16_t s = static_cast<int16_t>(read_u16(data + 2 * i));
    r.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return r;
}

void save_wav(const Recording& r, const std::string& path) {
  if (r.samples.empty()) throw Error("refusing to write empty recording");
  if (r.sample_rate <= 0) throw Error("invalid sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);

  uint32_t data_size = static_cast<uint32_t>(r.samples.size() * 2);
  uint32_t rate = static_cast<uint32_t>(r.sample_rate);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);   // PCM
  write_u16(out, 1);   // mono
  write_u32(out, rate);
  write_u32(out, rate * 2);  // byte rate
  write_u16(out, 2);   // block align
  write_u16(out, 16);  // bits
  out.write("data", 4);
  write_u32(out, data_size);
  for (double x : r.samples) {
    long q = std::lround(x * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    write_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  if (!out) throw Error("write failed: " + path);
}

Recording resample(const Recording& r, int target_rate) {
  if (target_rate <= 0) throw Error("target rate must be positive");
  if (r.samples.empty()) throw Error("cannot resample empty recording");
  if (target_rate == r.sample_rate) return r;

  size_t in_len = r.samples.size();
  auto out_len = static_cast<size_t>(std::llround(
      static_cast<double>(in_len) * target_rate / r.sample_rate));
  Recording out = r;
  out.sample_rate = target_rate;
  out.samples.assign(out_len, 0.0);
  double step = static_cast<double>(r.sample_rate) / target_rate;
  for (size_t i = 0; i < out_len; ++i) {
    double p = static_cast<double>(i) * step;
    auto j = static_cast<size_t>(p);
    if (j >= in_len - 1) {
      out.samples[i] = r.samples[in_len - 1];
    } else {
      double frac = p - static_cast<double>(j);
      out.samples[i] = r.samples[j] * (1.0 - frac) + r.samples[j + 1] * frac;
    }
  }
  return out;
}

std::vector<double> normalize_samples(std::vector<double> samples) {
  if (samples.empty()) return samples;
  double max_abs = 0.0;
  for (double x : samples) max_abs = std::max(max_abs, std::fabs(x));
  if (max_abs == 0.0) return samples;

  // The mean subtraction is skipped when already negligible so that
  // normalize(normalize(x)) == normalize(x) bitwise.
  double m = kahan_mean(samples);
  if (std::fabs(m) > 1e-12 * max_abs) {
    for (double& x : samples) x -= m;
  }
  double max_centered = 0.0;
  for (double x : samples) max_centered = std::max(max_centered, std::fabs(x));
  if (max_centered == 0.0) return samples;  // constant input collapsed to zero
  for (double& x : samples) x /= max_centered;
  return samples;
}

Recording normalize(Recording r) {
  r.samples = normalize_samples(std::move(r.samples));
  return r;
}

LabelTable load_label_table(const std::string& path) {
  LabelTable t;
  auto rows = read_csv_file(path);
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 2) {
      throw Error("label CSV row " + std::to_string(i + 1) +
                  ": expected `name,label`");
    }
    if (i == 0 && row[1] == "label") continue;  // header
    int v;
    try {
      v = std::stoi(row[1]);
    } catch (const std::exception&) {
      throw Error("label CSV row " + std::to_string(i + 1) +
                  ": bad label '" + row[1] + "'");
    }
    if (t.entries.count(row[0])) {
      throw Error("duplicate recording id in label CSV: " + row[0]);
    }
    t.entries[row[0]] = label_from_int(v);
  }
  return t;
}

void save_label_table(const LabelTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "name,label\n";
  for (const auto& [id, label] : t.entries) {
    out << id << "," << label_to_int(label) << "\n";
  }
}

std::vector<double> load_amplitude_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      if (first) {  // tolerate a header line
        first = false;
        continue;
      }
      throw Error("bad amplitude value in " + path + ": " + line);
    }
    first = false;
  }
  if (out.empty()) throw Error("empty amplitude CSV: " + path);
  return out;
}

void save_amplitude_csv(const std::vector<double>& samples,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  for (double x : samples) out << format_double(x) << "\n";
}

}  // namespace pcg
