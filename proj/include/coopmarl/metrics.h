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


#ifndef COOPMARL_METRICS_H_
#define COOPMARL_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Per-episode curves and their cross-seed aggregation.

namespace coopmarl {

// Per-seed inputs to a campaign summary.
struct SeedMetrics {
  std::uint64_t seed = 0;
  // Sum of average r1 and average r2 per episode.
  std::vector<double> metric;
  std::vector<bool> success;
  std::int64_t solver_solves = 0;
  std::int64_t solver_fallbacks = 0;
};

struct CampaignSummary {
  std::string config_hash;
  int episodes = 0;
  int success_window = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> metric_mean;
  // Sample std across seeds; 0 with a single seed.
  std::vector<double> metric_std;
  // rolling_success[k][e]: seed k's success fraction over the window ending
  // at episode e (shorter at the start).
  std::vector<std::vector<double>> rolling_success;
  std::vector<double> rolling_success_mean;
  double final_success_ratio = 0.0;
  std::vector<std::int64_t> solver_solves;
  std::vector<std::int64_t> solver_fallbacks;

  bool operator==(const CampaignSummary&) const = default;
};

double Mean(std::span<const double> v);
// n - 1 denominator; 0 for fewer than two values.
double SampleStd(std::span<const double> v);
// Least-squares slope of v against 0, 1, 2, ...
double OlsSlope(std::span<const double> v);

std::vector<double> RollingSuccess(const std::vector<bool>& success,
                                   int window);

// Throws kInvalidArgument if seeds disagree on the episode count.
CampaignSummary Summarize(const std::string& config_hash, int success_window,
                          std::span<const SeedMetrics> seeds);

std::string SummaryToJson(const CampaignSummary& summary);

}  // namespace coopmarl

#endif  // COOPMARL_METRICS_H_
