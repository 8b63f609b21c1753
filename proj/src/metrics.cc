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


#include "coopmarl/metrics.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "coopmarl/error.h"

namespace coopmarl {

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleStd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double OlsSlope(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double xbar = (static_cast<double>(n) - 1.0) / 2.0;
  const double ybar = Mean(v);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxy += dx * (v[i] - ybar);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<double> RollingSuccess(const std::vector<bool>& success,
                                   int window) {
  Check(window >= 1, ErrorCategory::kInvalidArgument, "window must be >= 1");
  std::vector<double> out(success.size());
  std::int64_t hits = 0;
  for (std::size_t e = 0; e < success.size(); ++e) {
    hits += success[e];
    if (e >= static_cast<std::size_t>(window)) hits -= success[e - window];
    const std::size_t len = std::min<std::size_t>(e + 1, window);
    out[e] = static_cast<double>(hits) / static_cast<double>(len);
  }
  return out;
}

CampaignSummary Summarize(const std::string& config_hash, int success_window,
                          std::span<const SeedMetrics> seeds) {
  Check(!seeds.empty(), ErrorCategory::kInvalidArgument,
        "summary needs at least one seed");
  CampaignSummary s;
  s.config_hash = config_hash;
  s.success_window = success_window;
  s.episodes = static_cast<int>(seeds.front().metric.size());
  for (const SeedMetrics& m : seeds) {
    Check(static_cast<int>(m.metric.size()) == s.episodes &&
              static_cast<int>(m.success.size()) == s.episodes,
          ErrorCategory::kInvalidArgument,
          "seed " + std::to_string(m.seed) + " has a different episode count");
    s.seeds.push_back(m.seed);
    s.rolling_success.push_back(RollingSuccess(m.success, success_window));
    s.solver_solves.push_back(m.solver_solves);
    s.solver_fallbacks.push_back(m.solver_fallbacks);
  }
  const std::size_t n = seeds.size();
  s.metric_mean.resize(s.episodes);
  s.metric_std.resize(s.episodes);
  s.rolling_success_mean.resize(s.episodes);
  std::vector<double> column(n);
  for (int e = 0; e < s.episodes; ++e) {
    for (std::size_t k = 0; k < n; ++k) column[k] = seeds[k].metric[e];
    s.metric_mean[e] = Mean(column);
    s.metric_std[e] = SampleStd(column);
    for (std::size_t k = 0; k < n; ++k) column[k] = s.rolling_success[k][e];
    s.rolling_success_mean[e] = Mean(column);
  }
  s.final_success_ratio =
      s.episodes > 0 ? s.rolling_success_mean.back() : 0.0;
  return s;
}

std::string SummaryToJson(const CampaignSummary& s) {
  nlohmann::ordered_json j;
  j["layout_version"] = 1;
  j["config_hash"] = s.config_hash;
  j["episodes"] = s.episodes;
  j["success_window"] = s.success_window;
  j["seeds"] = s.seeds;
  j["final_success_ratio"] = s.final_success_ratio;
  j["solver_solves"] = s.solver_solves;
  j["solver_fallbacks"] = s.solver_fallbacks;
  j["metric_mean"] = s.metric_mean;
  j["metric_std"] = s.metric_std;
  j["rolling_success_mean"] = s.rolling_success_mean;
  j["rolling_success"] = s.rolling_success;
  return j.dump(1) + "\n";
}

}  // namespace coopmarl
