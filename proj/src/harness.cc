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


#include "coopmarl/harness.h"

#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "coopmarl/checkpoint.h"
#include "coopmarl/error.h"
#include "json.hpp"

namespace coopmarl {
namespace {

namespace fs = std::filesystem;

std::string Fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseDouble(std::string_view field, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  Check(ec == std::errc() && ptr == field.data() + field.size(),
        ErrorCategory::kIo, where + ": bad number '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::ofstream OpenForWrite(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Check(out.good(), ErrorCategory::kIo, "cannot write " + path.string());
  return out;
}

void Close(std::ofstream& out, const fs::path& path) {
  out.close();
  Check(!out.fail(), ErrorCategory::kIo, "failed writing " + path.string());
}

std::string SeedFile(std::uint64_t seed, const char* suffix) {
  return "seed_" + std::to_string(seed) + suffix;
}

void CheckShape(const ExperimentConfig& config, const QFunction& q) {
  const int n1 = ActionCodec(config.env.arm1.num_joints(), config.env.delta)
                     .num_actions();
  const int n2 = ActionCodec(config.env.arm2.num_joints(), config.env.delta)
                     .num_actions();
  auto fail = [](const std::string& what) {
    Fail(ErrorCategory::kCheckpointIncompatible,
         "checkpoint does not match config: " + what);
  };
  if (q.kind() != config.agent.backend) fail("backend kind differs");
  if (q.num_actions1() != n1 || q.num_actions2() != n2) {
    fail("joint action shape differs");
  }
  if (const auto* t = dynamic_cast<const TabularQ*>(&q)) {
    if (t->table().num_states() !=
        NumGridCells(config.env.total_joints(), config.agent.bins_per_joint)) {
      fail("state grid size differs");
    }
  } else if (const auto* a = dynamic_cast<const ApproximatorQ*>(&q)) {
    if (a->online().input_size() != FeatureDimension(config.env)) {
      fail("feature dimension differs");
    }
  }
}

void WriteSeedFiles(const fs::path& dir, const ExperimentConfig& config,
                    const SeedResult& r) {
  {
    const fs::path p = dir / SeedFile(r.seed, ".csv");
    std::ofstream out = OpenForWrite(p);
    out << "episode,avg_r1,avg_r2,metric,return,success,steps\n";
    for (const EpisodeRecord& e : r.episodes) {
      out << e.episode << ',' << Fmt(e.avg_r1) << ',' << Fmt(e.avg_r2) << ','
          << Fmt(e.metric) << ',' << Fmt(e.discounted_return) << ','
          << (e.success ? 1 : 0) << ',' << e.steps << '\n';
    }
    Close(out, p);
  }
  {
    const fs::path p = dir / SeedFile(r.seed, ".timing.csv");
    std::ofstream out = OpenForWrite(p);
    out << "episode,wall_seconds\n";
    for (const EpisodeRecord& e : r.episodes) {
      out << e.episode << ',' << Fmt(e.wall_seconds) << '\n';
    }
    Close(out, p);
  }
  {
    const fs::path p = dir / SeedFile(r.seed, ".solver.json");
    std::ofstream out = OpenForWrite(p);
    nlohmann::ordered_json j;
    j["solves"] = r.solver_solves;
    j["fallbacks"] = r.solver_fallbacks;
    j["verified"] = r.solver_verified;
    out << j.dump(1) << '\n';
    Close(out, p);
  }
  if (config.run.eval_every > 0) {
    const fs::path p = dir / SeedFile(r.seed, ".eval.csv");
    std::ofstream out = OpenForWrite(p);
    out << "episode,success_ratio,mean_return\n";
    for (const auto& [episode, e] : r.evals) {
      out << episode << ',' << Fmt(e.success_ratio) << ','
          << Fmt(e.mean_return) << '\n';
    }
    Close(out, p);
  }
  if (config.output.step_log) {
    const fs::path p = dir / SeedFile(r.seed, ".steps.csv");
    std::ofstream out = OpenForWrite(p);
    out << "episode,t,a1,a2,r1,r2,success\n";
    for (const StepRecord& s : r.steps) {
      out << s.episode << ',' << s.t << ',' << s.a1 << ',' << s.a2 << ','
          << Fmt(s.r1) << ',' << Fmt(s.r2) << ',' << (s.success ? 1 : 0)
          << '\n';
    }
    Close(out, p);
  }
}

SeedMetrics ToSeedMetrics(const SeedResult& r) {
  SeedMetrics m;
  m.seed = r.seed;
  for (const EpisodeRecord& e : r.episodes) {
    m.metric.push_back(e.metric);
    m.success.push_back(e.success);
  }
  m.solver_solves = r.solver_solves;
  m.solver_fallbacks = r.solver_fallbacks;
  return m;
}

}  // namespace

Observation Observe(const ExperimentConfig& config, const EnvState& state) {
  Observation obs;
  if (config.agent.backend == BackendKind::kTabular) {
    obs.index = DiscretizeState(state, config.env.arm1, config.env.arm2,
                                config.agent.bins_per_joint);
  } else {
    obs.features = StateFeatures(config.env, state);
  }
  return obs;
}

std::unique_ptr<Learner> MakeLearner(const ExperimentConfig& config,
                                     Rng& rng) {
  const int n1 = ActionCodec(config.env.arm1.num_joints(), config.env.delta)
                     .num_actions();
  const int n2 = ActionCodec(config.env.arm2.num_joints(), config.env.delta)
                     .num_actions();
  const std::int64_t states =
      config.agent.backend == BackendKind::kTabular
          ? NumGridCells(config.env.total_joints(), config.agent.bins_per_joint)
          : 0;
  const int features = FeatureDimension(config.env);
  auto q1 = MakeQFunction(config.agent, states, features, n1, n2, rng);
  auto q2 = MakeQFunction(config.agent, states, features, n1, n2, rng);
  return std::make_unique<Learner>(config.agent, std::move(q1), std::move(q2));
}

EpisodeRecord RunEpisode(const ExperimentConfig& config, Learner& learner,
                         int episode, double epsilon, bool learn,
                         Rng& env_rng, Rng& agent_rng,
                         std::vector<StepRecord>* steps) {
  const auto start = std::chrono::steady_clock::now();
  const EnvConfig& env = config.env;
  const ActionCodec codec1(env.arm1.num_joints(), env.delta);
  const ActionCodec codec2(env.arm2.num_joints(), env.delta);
  const double gamma = config.agent.gamma;

  EpisodeRecord rec;
  rec.episode = episode;
  EnvState state = Reset(env, env_rng);
  Observation obs = Observe(config, state);
  double discount = 1.0;
  for (int t = 0; t < env.task.horizon; ++t) {
    const JointPolicyStep p = learner.Act(obs, epsilon, agent_rng);
    EnvState next =
        Step(env, state, codec1.Decode(p.a1), codec2.Decode(p.a2), env_rng);
    const auto [r1, r2] = Rewards(next, env.task, config.reward);
    const bool success = IsSuccess(next, env.task);
    Observation next_obs = Observe(config, next);
    if (learn) {
      learner.Learn(Transition{obs, p.a1, p.a2, r1, r2, next_obs, success},
                    agent_rng);
    }
    rec.sum_r1 += r1;
    rec.sum_r2 += r2;
    rec.discounted_return += discount * (r1 + r2);
    discount *= gamma;
    ++rec.steps;
    if (steps) steps->push_back({episode, t, p.a1, p.a2, r1, r2, success});
    state = std::move(next);
    obs = std::move(next_obs);
    if (success) {
      rec.success = true;
      break;
    }
  }
  if (rec.steps > 0) {
    rec.avg_r1 = rec.sum_r1 / rec.steps;
    rec.avg_r2 = rec.sum_r2 / rec.steps;
  }
  rec.metric = rec.avg_r1 + rec.avg_r2;
  rec.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return rec;
}

EvalResult Evaluate(const ExperimentConfig& config, const QFunction& q1,
                    const QFunction& q2, int episodes, Rng& rng) {
  Check(episodes >= 1, ErrorCategory::kInvalidArgument,
        "evaluation episodes must be >= 1");
  CheckShape(config, q1);
  CheckShape(config, q2);
  Learner learner(config.agent, q1.Clone(), q2.Clone());
  int successes = 0;
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const EpisodeRecord r =
        RunEpisode(config, learner, e, 0.0, false, rng, rng);
    successes += r.success;
    total += r.discounted_return;
  }
  return {static_cast<double>(successes) / episodes, total / episodes};
}

EvalResult EvaluateCheckpoint(const std::string& path,
                              const ExperimentConfig& config, int episodes,
                              Rng& rng) {
  Check(episodes >= 1, ErrorCategory::kInvalidArgument,
        "evaluation episodes must be >= 1");
  const QPair q = LoadCheckpoint(path);
  return Evaluate(config, *q.q1, *q.q2, episodes, rng);
}

SeedResult RunSeed(const ExperimentConfig& config, std::uint64_t seed,
                   const std::string& checkpoint_dir) {
  Rng env_rng(seed, kEnvStream);
  Rng agent_rng(seed, kAgentStream);
  Rng init_rng(seed, kInitStream);
  Rng eval_rng(seed, kEvalStream);
  std::unique_ptr<Learner> learner = MakeLearner(config, init_rng);

  SeedResult result;
  result.seed = seed;
  result.episodes.reserve(config.run.episodes);
  auto checkpoint = [&](const std::string& name) {
    if (checkpoint_dir.empty()) return;
    SaveCheckpoint((fs::path(checkpoint_dir) / name).string(), learner->q1(),
                   learner->q2());
  };
  const std::string prefix = "seed_" + std::to_string(seed);
  for (int e = 0; e < config.run.episodes; ++e) {
    EpisodeRecord rec;
    try {
      rec = RunEpisode(config, *learner, e, config.agent.epsilon.At(e), true,
                       env_rng, agent_rng,
                       config.output.step_log ? &result.steps : nullptr);
    } catch (const Error& ex) {
      if (ex.category() != ErrorCategory::kTrainingDivergence) throw;
      Fail(ex.category(), "episode " + std::to_string(e) + ": " + ex.what());
    }
    rec.seed = seed;
    result.episodes.push_back(rec);
    const int done = e + 1;
    if (config.run.eval_every > 0 && done % config.run.eval_every == 0) {
      result.evals.emplace_back(
          done, Evaluate(config, learner->q1(), learner->q2(),
                         config.run.eval_episodes, eval_rng));
    }
    if (config.output.checkpoint_every > 0 &&
        done % config.output.checkpoint_every == 0 &&
        done != config.run.episodes) {
      checkpoint(prefix + "_ep" + std::to_string(done) + ".ckpt");
    }
  }
  checkpoint(prefix + "_final.ckpt");
  result.solver_solves = learner->solver().solves();
  result.solver_fallbacks = learner->solver().fallbacks();
  result.solver_verified = learner->solver().verified();
  return result;
}

CampaignSummary RunCampaign(const ExperimentConfig& config,
                            const CampaignOptions& options) {
  config.Validate();
  const fs::path dir(config.output.directory);
  const fs::path ckpt_dir = dir / "checkpoints";
  {
    std::error_code ec;
    fs::create_directories(ckpt_dir, ec);
    Check(!ec, ErrorCategory::kIo,
          "cannot create output directory " + dir.string() + ": " +
              ec.message());
    const fs::path cfg_path = dir / "config.yaml";
    std::ofstream out = OpenForWrite(cfg_path);
    out << SerializeConfig(config);
    Close(out, cfg_path);
    const fs::path probe = ckpt_dir / ".probe";
    std::ofstream p = OpenForWrite(probe);
    Close(p, probe);
    fs::remove(probe, ec);
  }

  const std::vector<std::uint64_t>& seeds = config.run.seeds;
  const int workers = std::clamp<int>(options.workers, 1,
                                      static_cast<int>(seeds.size()));
  std::vector<std::optional<SeedMetrics>> metrics(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex progress_mu;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t k = next.fetch_add(1);
      if (k >= seeds.size()) return;
      try {
        SeedResult r = RunSeed(config, seeds[k], ckpt_dir.string());
        WriteSeedFiles(dir, config, r);
        metrics[k] = ToSeedMetrics(r);
        if (options.progress) {
          const std::vector<double> rolling =
              RollingSuccess(metrics[k]->success, config.run.success_window);
          std::lock_guard<std::mutex> lock(progress_mu);
          *options.progress << "seed " << seeds[k] << " done: "
                            << r.episodes.size() << " episodes, final success "
                            << (rolling.empty() ? 0.0 : rolling.back())
                            << ", solver fallbacks " << r.solver_fallbacks
                            << std::endl;
        }
      } catch (...) {
        errors[k] = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!errors[k]) continue;
    const std::string who = "seed " + std::to_string(seeds[k]) + ": ";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const Error& e) {
      Fail(e.category(), who + e.what());
    } catch (const std::exception& e) {
      Fail(ErrorCategory::kWorkerFailure, who + e.what());
    }
  }

  std::vector<SeedMetrics> all;
  for (auto& m : metrics) all.push_back(std::move(*m));
  CampaignSummary summary =
      Summarize(ConfigHash(config), config.run.success_window, all);
  const fs::path summary_path = dir / "summary.json";
  std::ofstream out = OpenForWrite(summary_path);
  out << SummaryToJson(summary);
  Close(out, summary_path);
  return summary;
}

std::vector<SeedMetrics> LoadSeedMetrics(const std::string& directory) {
  const fs::path dir(directory);
  const ExperimentConfig config =
      LoadConfigFile((dir / "config.yaml").string());
  std::vector<SeedMetrics> out;
  for (std::uint64_t seed : config.run.seeds) {
    SeedMetrics m;
    m.seed = seed;
    const fs::path csv = dir / SeedFile(seed, ".csv");
    std::ifstream in(csv);
    Check(in.good(), ErrorCategory::kIo, "cannot read " + csv.string());
    std::string line;
    std::getline(in, line);
    Check(line == "episode,avg_r1,avg_r2,metric,return,success,steps",
          ErrorCategory::kIo, csv.string() + ": unexpected header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cols = SplitCsv(line);
      Check(cols.size() == 7, ErrorCategory::kIo,
            csv.string() + ": expected 7 columns");
      m.metric.push_back(ParseDouble(cols[3], csv.string()));
      m.success.push_back(cols[5] == "1");
    }
    const fs::path solver = dir / SeedFile(seed, ".solver.json");
    std::ifstream sin(solver);
    Check(sin.good(), ErrorCategory::kIo, "cannot read " + solver.string());
    try {
      const nlohmann::json j = nlohmann::json::parse(sin);
      m.solver_solves = j.at("solves").get<std::int64_t>();
      m.solver_fallbacks = j.at("fallbacks").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCategory::kIo, solver.string() + ": " + e.what());
    }
    out.push_back(std::move(m));
  }
  return out;
}

CampaignSummary LoadCampaignSummary(const std::string& directory) {
  const ExperimentConfig config =
      LoadConfigFile((fs::path(directory) / "config.yaml").string());
  const std::vector<SeedMetrics> seeds = LoadSeedMetrics(directory);
  return Summarize(ConfigHash(config), config.run.success_window, seeds);
}

}  // namespace coopmarl
