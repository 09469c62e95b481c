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

#include "pcg/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace pcg {

Metrics evaluate(const std::vector<double>& scores,
                 const std::vector<Label>& predicted,
                 const std::vector<Label>& truth) {
  if (truth.empty()) throw Error("evaluate: empty truth list");
  if (scores.size() != truth.size() || predicted.size() != truth.size()) {
    throw Error("evaluate: scores/predictions/truth lengths differ");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error("evaluate: non-finite score");
  }

  Metrics m;
  for (size_t i = 0; i < truth.size(); ++i) {
    bool pos_true = truth[i] == Label::Abnormal;
    bool pos_pred = predicted[i] == Label::Abnormal;
    if (pos_true && pos_pred) ++m.tp;
    if (pos_true && !pos_pred) ++m.fn;
    if (!pos_true && pos_pred) ++m.fp;
    if (!pos_true && !pos_pred) ++m.tn;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  if (m.tp + m.fn > 0) {
    m.sensitivity = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  if (m.tn + m.fp > 0) {
    m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
  }
  if (m.tp + m.fp > 0) {
    m.ppv = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  }

  int64_t n_pos = m.tp + m.fn;
  int64_t n_neg = m.tn + m.fp;
  if (n_pos > 0 && n_neg > 0) {
    std::vector<size_t> order(truth.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return scores[a] > scores[b];
    });

    m.roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    int64_t cum_tp = 0, cum_fp = 0;
    size_t i = 0;
    while (i < order.size()) {
      size_t j = i;
      while (j < order.size() && scores[order[j]] == scores[order[i]]) {
        if (truth[order[j]] == Label::Abnormal) {
          ++cum_tp;
        } else {
          ++cum_fp;
        }
        ++j;
      }
      m.roc.push_back({scores[order[i]],
                       static_cast<double>(cum_fp) / static_cast<double>(n_neg),
                       static_cast<double>(cum_tp) / static_cast<double>(n_pos)});
      i = j;
    }

    double auc = 0.0;
    for (size_t k = 1; k < m.roc.size(); ++k) {
      auc += (m.roc[k].fpr - m.roc[k - 1].fpr) *
             (m.roc[k].tpr + m.roc[k - 1].tpr) * 0.5;
    }
    m.auc = auc;
  }
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["accuracy"] = m.accuracy;
  j["auc"] = m.auc ? nlohmann::json(*m.auc) : nlohmann::json(nullptr);
  j["confusion"] = {{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}};
  j["ppv"] = m.ppv ? nlohmann::json(*m.ppv) : nlohmann::json(nullptr);
  j["sensitivity"] =
      m.sensitivity ? nlohmann::json(*m.sensitivity) : nlohmann::json(nullptr);
  j["specificity"] =
      m.specificity ? nlohmann::json(*m.specificity) : nlohmann::json(nullptr);
  j["total"] = m.total();
  return j.dump(2) + "\n";
}

void save_metrics_json(const Metrics& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << metrics_to_json(m);
}

void save_roc_csv(const Metrics& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : m.roc) {
    if (std::isinf(p.threshold)) {
      out << "inf";
    } else {
      out << format_double(p.threshold);
    }
    out << "," << format_double(p.fpr) << "," << format_double(p.tpr) << "\n";
  }
}

}  // namespace pcg
