// Copyright 2026 The coopmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COOPMARL_CHECKPOINT_H_
#define COOPMARL_CHECKPOINT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "coopmarl/qfunction.h"

// Binary checkpoint holding both agents' Q-functions.
//
// Layout (little-endian):
//   char[8]  magic "CMARLQF\0"
//   u32      format version (kCheckpointVersion)
//   u32      number of Q-functions (2)
//   per Q-function:
//     u32 backend kind (0 tabular, 1 approximator)
//     tabular:      i64 states, i32 a1, i32 a2, f64 default, u32 step rule,
//                   f64 alpha, f64[states*a1*a2] values,
//                   u32[states*a1*a2] visit counts
//     approximator: i32 a1, i32 a2, f64 learning rate, f64 clip norm,
//                   i32 target refresh, i64 fit calls, u32 layer count L,
//                   i32[L] layer sizes, f64[P] online params,
//                   f64[P] target params

namespace coopmarl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct QPair {
  std::unique_ptr<QFunction> q1;
  std::unique_ptr<QFunction> q2;
};

// Throws kIo when the file cannot be written.
void SaveCheckpoint(const std::string& path, const QFunction& q1,
                    const QFunction& q2);

// Throws kIo when unreadable and kCheckpointIncompatible on a bad magic,
// another format version, or a truncated body.
QPair LoadCheckpoint(const std::string& path);

}  // namespace coopmarl

#endif  // COOPMARL_CHECKPOINT_H_
