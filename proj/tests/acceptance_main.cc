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


// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails. Campaign outputs are kept under --out-dir.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "coopmarl/checks/property_suites.h"
#include "coopmarl/config.h"
#include "coopmarl/error.h"
#include "coopmarl/harness.h"
#include "coopmarl/metrics.h"
#include "json.hpp"

namespace coopmarl {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances.
constexpr int kSeeds = 10;
constexpr int kEpisodes = 10000;
constexpr int kWindow = 1000;
constexpr double kRiseInStd = 3.0;
constexpr double kSlopeFraction = 0.05;
constexpr double kCampaignSeconds = 600.0;
constexpr int kSuccessEpisode = 8000;
constexpr double kSuccessThreshold = 0.7;
constexpr double kRandomThreshold = 0.05;
// The equilibrium learner solves a 9x9 game per step on one core; its
// comparison runs shorter by default. Pass --gtrl-episodes to change it.
constexpr int kGtrlEpisodes = 1000;

struct Line {
  int id;
  bool passed;
  std::string detail;
};

void Print(const Line& l) {
  std::printf("criterion %d: %s  %s\n", l.id, l.passed ? "PASS" : "FAIL",
              l.detail.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Line FromSuite(int id, const checks::SuiteResult& r) {
  const bool ok = r.passed && r.seconds <= r.time_limit_seconds;
  return {id, ok, Fmt("%s: %s", r.name.c_str(), r.detail.c_str())};
}

std::vector<std::uint64_t> SeedList() {
  std::vector<std::uint64_t> s(kSeeds);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

CampaignSummary Campaign(ExperimentConfig c, const fs::path& dir, int workers,
                         double* seconds = nullptr) {
  c.output.directory = dir.string();
  const auto start = std::chrono::steady_clock::now();
  auto s = RunCampaign(c, {workers, nullptr});
  if (seconds) *seconds = Seconds(start);
  return s;
}

double WindowMean(const std::vector<double>& v, std::size_t begin) {
  return Mean(std::span(v).subspan(begin, kWindow));
}

std::vector<Line> Learning(const fs::path& out, int workers) {
  auto c = DefaultConfig(Algorithm::kDarl, RewardStructure::Rs1(0.5, 0.5));
  c.run.episodes = kEpisodes;
  c.run.seeds = SeedList();
  double seconds = 0.0;
  const auto s = Campaign(c, out / "darl_rs1", workers, &seconds);

  // Criterion 5: rise of the seed-mean metric and flatness of its tail.
  const auto seeds = LoadSeedMetrics((out / "darl_rs1").string());
  std::vector<double> first;
  std::vector<double> last;
  for (const auto& m : seeds) {
    first.push_back(WindowMean(m.metric, 0));
    last.push_back(WindowMean(m.metric, kEpisodes - kWindow));
  }
  const double rise = Mean(last) - Mean(first);
  const double sd = std::max(SampleStd(first), SampleStd(last));
  const double slope =
      OlsSlope(std::span(s.metric_mean).subspan(kEpisodes - kWindow)) * kWindow;
  const bool rise_ok = rise >= kRiseInStd * sd;
  const bool slope_ok = std::abs(slope) < kSlopeFraction * rise;
  const bool time_ok = seconds < kCampaignSeconds;
  Line five{5, rise_ok && slope_ok && time_ok,
            Fmt("rise %.4f vs %.1f x std %.4f; final slope %.4f per %d "
                "episodes = %.1f%% of rise (limit %.0f%%); %.1f s (limit %.0f s)",
                rise, kRiseInStd, sd, slope, kWindow,
                100.0 * std::abs(slope) / std::max(std::abs(rise), 1e-300),
                100 * kSlopeFraction, seconds, kCampaignSeconds)};

  // Criterion 6: rolling success at the checkpoint episode, and a uniformly
  // random policy on the same task.
  const double learned = s.rolling_success_mean[kSuccessEpisode - 1];
  auto random = c;
  random.run.episodes = kSuccessEpisode;
  random.agent.alpha = 0.0;
  random.agent.epsilon = {1.0, 1.0, 1};
  const auto r = Campaign(random, out / "random_baseline", workers);
  const double baseline = r.rolling_success_mean[kSuccessEpisode - 1];
  Line six{6, learned >= kSuccessThreshold && baseline < kRandomThreshold,
           Fmt("rolling success (window %d) at episode %d: %.4f (need >= %.2f); "
               "random policy %.4f (need < %.2f)",
               c.run.success_window, kSuccessEpisode, learned,
               kSuccessThreshold, baseline, kRandomThreshold)};
  return {five, six};
}

Line Comparison(const fs::path& out, int workers, int episodes) {
  // Same total posture weight under both structures.
  auto rs1 = DefaultConfig(Algorithm::kGtrl, RewardStructure::Rs1(0.5, 0.5));
  auto rs2 = DefaultConfig(Algorithm::kGtrl, RewardStructure::Rs2(1.0));
  for (auto* c : {&rs1, &rs2}) {
    c->run.episodes = episodes;
    c->run.seeds = SeedList();
  }
  const auto a = Campaign(rs1, out / "gtrl_rs1", workers);
  const auto b = Campaign(rs2, out / "gtrl_rs2", workers);
  struct Tail {
    double metric;
    double success;
    double success_std;
  };
  auto tail = [](const CampaignSummary& s) {
    const std::size_t w = std::min<std::size_t>(kWindow, s.metric_mean.size());
    std::vector<double> per_seed;
    for (const auto& row : s.rolling_success) per_seed.push_back(row.back());
    return Tail{Mean(std::span(s.metric_mean).subspan(s.metric_mean.size() - w)),
                Mean(per_seed), SampleStd(per_seed)};
  };
  const Tail t1 = tail(a);
  const Tail t2 = tail(b);
  const char* direction = t1.success > t2.success   ? "rs1 higher"
                          : t1.success < t2.success ? "rs2 higher"
                                                    : "tie";
  nlohmann::ordered_json j;
  j["episodes"] = episodes;
  j["seeds"] = kSeeds;
  j["total_posture_weight"] = 1.0;
  j["success_window"] = a.success_window;
  for (const auto& [name, s, t] :
       {std::tuple{"rs1", &a, t1}, std::tuple{"rs2", &b, t2}}) {
    std::vector<double> per_seed;
    for (const auto& row : s->rolling_success) per_seed.push_back(row.back());
    j[name] = {{"directory", std::string("gtrl_") + name},
               {"config_hash", s->config_hash},
               {"final_metric_mean", t.metric},
               {"final_success_mean", t.success},
               {"final_success_std", t.success_std},
               {"final_success_per_seed", per_seed}};
  }
  j["success_direction"] = direction;
  std::ofstream(out / "gtrl_comparison.json") << j.dump(1) << "\n";
  const bool archived = fs::exists(out / "gtrl_rs1" / "summary.json") &&
                        fs::exists(out / "gtrl_rs2" / "summary.json");
  return {7, archived && a.seeds.size() == kSeeds && b.seeds.size() == kSeeds,
          Fmt("%d seeds x %d episodes each; final success rs1 %.4f +- %.4f, "
              "rs2 %.4f +- %.4f (%s); final metric rs1 %.4f, rs2 %.4f; "
              "archived in %s",
              kSeeds, episodes, t1.success, t1.success_std, t2.success,
              t2.success_std, direction, t1.metric, t2.metric,
              (out / "gtrl_comparison.json").string().c_str())};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Line Reproducible(const fs::path& out, int workers) {
  auto c = DefaultConfig(Algorithm::kGtrl, RewardStructure::Rs1(0.5, 0.5));
  c.run.episodes = 300;
  c.run.seeds = {1, 2, 3};
  c.run.eval_every = 100;
  Campaign(c, out / "repro_a", 1);
  Campaign(c, out / "repro_b", workers);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(out / "repro_a")) {
    const std::string name = e.path().filename().string();
    if (!e.is_regular_file() || name.find("timing") != std::string::npos ||
        name == "config.yaml") {
      continue;
    }
    if (Slurp(e.path()) != Slurp(out / "repro_b" / name)) {
      return {8, false, name + " differs"};
    }
    ++compared;
  }
  return {8, compared > 0,
          Fmt("%d metric files byte-identical across two runs", compared)};
}

int Main(int argc, char** argv) {
  CLI::App app("coopmarl acceptance run");
  std::string out_dir = "acceptance_runs";
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int gtrl_episodes = kGtrlEpisodes;
  app.add_option("--out-dir", out_dir, "Where campaign outputs are kept");
  app.add_option("--workers", workers, "Worker threads per campaign")
      ->check(CLI::PositiveNumber);
  app.add_option("--gtrl-episodes", gtrl_episodes,
                 "Episodes per seed for the structure comparison")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const fs::path out(out_dir);
  fs::create_directories(out);
  bool all = true;
  auto emit = [&](const Line& l) {
    Print(l);
    all &= l.passed;
  };
  try {
    emit(FromSuite(1, checks::SolverSoundness()));
    emit(FromSuite(2, checks::UpdateMicroProperties()));
    emit(FromSuite(3, checks::NashQOracle()));
    emit(FromSuite(4, checks::GradientCheck()));
    for (const Line& l : Learning(out, workers)) emit(l);
    emit(Comparison(out, workers, gtrl_episodes));
    emit(Reproducible(out, workers));
  } catch (const Error& e) {
    std::printf("aborted: %s: %s\n", CategoryName(e.category()), e.what());
    return 1;
  }
  std::printf("%s\n", all ? "all criteria PASS" : "some criteria FAIL");
  return all ? 0 : 1;
}

}  // namespace
}  // namespace coopmarl

int main(int argc, char** argv) { return coopmarl::Main(argc, argv); }
