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

#ifndef COOPMARL_ERROR_H_
#define COOPMARL_ERROR_H_

#include <stdexcept>
#include <string>

namespace coopmarl {

// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  kInvalidArgument,
  kUnsupportedSize,
  kInvalidTask,
  kConfig,
  kTrainingDivergence,
  kCheckpointIncompatible,
  kIo,
  kWorkerFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

const char* CategoryName(ErrorCategory category);

// Process exit code for a failure of the given category (always nonzero).
int ExitCode(ErrorCategory category);

[[noreturn]] inline void Fail(ErrorCategory category, const std::string& what) {
  throw Error(category, what);
}

inline void Check(bool condition, ErrorCategory category,
                  const std::string& what) {
  if (!condition) Fail(category, what);
}

}  // namespace coopmarl

#endif  // COOPMARL_ERROR_H_
