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

#include <optional>
#include <string>
#include <vector>

#include "pcg/common.hpp"

namespace pcg {

struct RocPoint {
  double threshold = 0.0;  // classify abnormal iff score >= threshold
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Binary-classification metrics with Abnormal as the positive class.
/// PPV is absent when no positive predictions exist; AUC (and the ROC) when
/// the truth contains a single class; sensitivity/specificity when their
/// denominators are empty.
struct Metrics {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> ppv;
  std::optional<double> auc;
  std::vector<RocPoint> roc;

  int64_t total() const { return tp + fp + tn + fn; }
};

/// Confusion counts from hard labels; ROC/AUC from scores (higher = more
/// abnormal) by sweeping `score >= threshold` over the unique scores,
/// trapezoidal area. Ties in score group into single ROC points, which makes
/// the trapezoidal AUC equal the pairwise concordance probability with ties
/// counted one half.
Metrics evaluate(const std::vector<double>& scores,
                 const std::vector<Label>& predicted,
                 const std::vector<Label>& truth);

/// Metrics JSON (masked entries serialized as null) and ROC CSV
/// `threshold,fpr,tpr` (leading point threshold = "inf").
std::string metrics_to_json(const Metrics& m);
void save_metrics_json(const Metrics& m, const std::string& path);
void save_roc_csv(const Metrics& m, const std::string& path);

}  // namespace pcg
