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

#include "coopmarl/error.h"

namespace coopmarl {

const char* CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument:
      return "invalid-argument";
    case ErrorCategory::kUnsupportedSize:
      return "unsupported-size";
    case ErrorCategory::kInvalidTask:
      return "invalid-task";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kTrainingDivergence:
      return "training-divergence";
    case ErrorCategory::kCheckpointIncompatible:
      return "checkpoint-incompatible";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kWorkerFailure:
      return "worker-failure";
  }
  return "unknown";
}

int ExitCode(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return 2;
    case ErrorCategory::kInvalidArgument:
    case ErrorCategory::kUnsupportedSize:
    case ErrorCategory::kInvalidTask:
      return 3;
    case ErrorCategory::kIo:
      return 4;
    case ErrorCategory::kTrainingDivergence:
      return 5;
    case ErrorCategory::kCheckpointIncompatible:
      return 6;
    case ErrorCategory::kWorkerFailure:
      return 7;
  }
  return 1;
}

}  // namespace coopmarl
