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


// Command-line front end: train, eval, sweep and verify.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coopmarl/checks/property_suites.h"
#include "coopmarl/config.h"
#include "coopmarl/error.h"
#include "coopmarl/harness.h"

namespace {

using coopmarl::ErrorCategory;
using coopmarl::ExperimentConfig;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (ch != ' ') {
      item += ch;
    }
  }
  return out;
}

std::uint64_t ParseSeed(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  coopmarl::Check(ec == std::errc() && ptr == s.data() + s.size(),
                  ErrorCategory::kConfig, "--seeds: bad seed '" + s + "'");
  return v;
}

// "1,2,5" or "1-10" or a mix of both.
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& item : SplitList(text)) {
    const std::size_t dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(ParseSeed(item));
      continue;
    }
    const std::uint64_t lo = ParseSeed(item.substr(0, dash));
    const std::uint64_t hi = ParseSeed(item.substr(dash + 1));
    coopmarl::Check(lo <= hi, ErrorCategory::kConfig,
                    "--seeds: empty range " + item);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  coopmarl::Check(!seeds.empty(), ErrorCategory::kConfig, "--seeds: empty");
  return seeds;
}

struct CommonFlags {
  std::string seeds;
  std::string out_dir;
  std::vector<std::string> sets;
  int workers = 1;
  bool quiet = false;
};

void AddCommon(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seeds", flags.seeds, "Seed list, e.g. 1,2,3 or 1-10");
  cmd->add_option("--out-dir", flags.out_dir, "Output directory");
  cmd->add_option("--set", flags.sets,
                  "Override a config field, e.g. --set run.episodes=200");
  cmd->add_option("--workers", flags.workers, "Seeds trained in parallel")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", flags.quiet, "No progress output");
}

ExperimentConfig Prepare(const std::string& path, const CommonFlags& flags) {
  ExperimentConfig config = coopmarl::LoadConfigFile(path);
  for (const std::string& s : flags.sets) {
    const std::size_t eq = s.find('=');
    coopmarl::Check(eq != std::string::npos, ErrorCategory::kConfig,
                    "--set expects path=value, got " + s);
    config = coopmarl::WithOverride(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!flags.seeds.empty()) config.run.seeds = ParseSeeds(flags.seeds);
  if (!flags.out_dir.empty()) config.output.directory = flags.out_dir;
  config.Validate();
  return config;
}

void PrintSummary(const coopmarl::CampaignSummary& s,
                  const std::string& directory) {
  const double last_metric = s.metric_mean.empty() ? 0.0 : s.metric_mean.back();
  std::int64_t fallbacks = 0;
  for (auto f : s.solver_fallbacks) fallbacks += f;
  std::cout << "config " << s.config_hash << ": " << s.seeds.size()
            << " seeds x " << s.episodes << " episodes, final success ratio "
            << s.final_success_ratio << ", final metric " << last_metric
            << ", solver fallbacks " << fallbacks << "\n"
            << "output: " << directory << "\n";
}

int Train(const std::string& path, const CommonFlags& flags) {
  const ExperimentConfig config = Prepare(path, flags);
  coopmarl::CampaignOptions options;
  options.workers = flags.workers;
  if (!flags.quiet) options.progress = &std::cerr;
  const auto summary = coopmarl::RunCampaign(config, options);
  PrintSummary(summary, config.output.directory);
  return 0;
}

int Eval(const std::string& checkpoint, const std::string& path,
         const CommonFlags& flags, int episodes, std::uint64_t seed) {
  const ExperimentConfig config = Prepare(path, flags);
  coopmarl::Rng rng(seed, coopmarl::kEvalStream);
  const auto result =
      coopmarl::EvaluateCheckpoint(checkpoint, config, episodes, rng);
  std::cout << "episodes " << episodes << ", success ratio "
            << result.success_ratio << ", mean discounted return "
            << result.mean_return << "\n";
  return 0;
}

int Sweep(const std::string& path, const CommonFlags& flags,
          const std::string& param, const std::string& values) {
  const ExperimentConfig base = Prepare(path, flags);
  const std::vector<std::string> list = SplitList(values);
  coopmarl::Check(!list.empty(), ErrorCategory::kConfig, "--values: empty");
  // Validate every point before training any of them.
  std::vector<ExperimentConfig> points;
  for (const std::string& v : list) {
    ExperimentConfig c = coopmarl::WithOverride(base, param, v);
    c.output.directory =
        (std::filesystem::path(base.output.directory) / (param + "=" + v))
            .string();
    points.push_back(c);
  }
  std::filesystem::create_directories(base.output.directory);
  const auto table_path =
      std::filesystem::path(base.output.directory) / "sweep.csv";
  std::ofstream table(table_path);
  coopmarl::Check(table.good(), ErrorCategory::kIo,
                  "cannot write " + table_path.string());
  table << "value,final_success_ratio,final_metric_mean,directory\n";
  coopmarl::CampaignOptions options;
  options.workers = flags.workers;
  if (!flags.quiet) options.progress = &std::cerr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto s = coopmarl::RunCampaign(points[i], options);
    std::cout << param << "=" << list[i] << ": ";
    PrintSummary(s, points[i].output.directory);
    table << list[i] << ',' << s.final_success_ratio << ','
          << (s.metric_mean.empty() ? 0.0 : s.metric_mean.back()) << ','
          << points[i].output.directory << '\n';
  }
  return 0;
}

int Verify() {
  bool ok = true;
  for (const auto& r : coopmarl::checks::RunAllSuites()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail
              << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative two-arm multi-agent reinforcement learning"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  std::string train_config;
  CLI::App* train = app.add_subcommand("train", "Run a training campaign");
  train->add_option("config", train_config, "Config file")->required();
  AddCommon(train, train_flags);

  CommonFlags eval_flags;
  std::string eval_checkpoint;
  std::string eval_config;
  int eval_episodes = 100;
  std::uint64_t eval_seed = 1;
  CLI::App* eval = app.add_subcommand("eval", "Greedy rollouts of a checkpoint");
  eval->add_option("checkpoint", eval_checkpoint, "Checkpoint file")->required();
  eval->add_option("config", eval_config, "Config file")->required();
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes");
  eval->add_option("--seed", eval_seed, "Evaluation seed");
  AddCommon(eval, eval_flags);

  CommonFlags sweep_flags;
  std::string sweep_config;
  std::string sweep_param;
  std::string sweep_values;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Train once per value of one config field");
  sweep->add_option("config", sweep_config, "Config file")->required();
  sweep->add_option("--param", sweep_param, "Dotted field, e.g. reward.kappa")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required();
  AddCommon(sweep, sweep_flags);

  CLI::App* verify =
      app.add_subcommand("verify", "Run the solver and update-rule checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : coopmarl::ExitCode(ErrorCategory::kConfig);
  }

  try {
    if (*train) return Train(train_config, train_flags);
    if (*eval) {
      return Eval(eval_checkpoint, eval_config, eval_flags, eval_episodes,
                  eval_seed);
    }
    if (*sweep) return Sweep(sweep_config, sweep_flags, sweep_param, sweep_values);
    if (*verify) return Verify();
  } catch (const coopmarl::Error& e) {
    std::cerr << "error [" << coopmarl::CategoryName(e.category())
              << "]: " << e.what() << "\n";
    return coopmarl::ExitCode(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
