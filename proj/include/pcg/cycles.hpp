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
#include <map>
#include <string>
#include <vector>

namespace pcg {

/// The four phases of a heartbeat, in their fixed cyclic order.
enum class HeartState { S1 = 0, Systole = 1, S2 = 2, Diastole = 3 };

inline HeartState next_state(HeartState s) {
  return static_cast<HeartState>((static_cast<int>(s) + 1) % 4);
}
inline HeartState prev_state(HeartState s) {
  return static_cast<HeartState>((static_cast<int>(s) + 3) % 4);
}

/// Sample-index boundaries (at 1000 Hz) of one S1 -> systole -> S2 ->
/// diastole cycle. Indices are strictly increasing; cycle_end is one past the
/// last diastole sample.
struct CardiacCycle {
  int64_t s1_start = 0;
  int64_t sys_start = 0;
  int64_t s2_start = 0;
  int64_t dia_start = 0;
  int64_t cycle_end = 0;

  int64_t length() const { return cycle_end - s1_start; }
};

/// Cycle CSV rows: `record_id,s1_start,sys_start,s2_start,dia_start,cycle_end`.
void save_cycle_csv(const std::map<std::string, std::vector<CardiacCycle>>& cycles,
                    const std::string& path);
std::map<std::string, std::vector<CardiacCycle>> load_cycle_csv(
    const std::string& path);

}  // namespace pcg
