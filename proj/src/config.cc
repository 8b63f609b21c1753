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

#include "coopmarl/config.h"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "coopmarl/error.h"

namespace coopmarl {
namespace {

[[noreturn]] void ConfigFail(const std::string& field, const YAML::Mark& mark,
                             const std::string& what) {
  std::string where = field;
  if (!mark.is_null()) where += " (line " + std::to_string(mark.line + 1) + ")";
  Fail(ErrorCategory::kConfig, where + ": " + what);
}

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

template <typename T>
T Convert(const YAML::Node& node, const std::string& field,
          const char* expected) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    ConfigFail(field, node.Mark(), std::string("expected ") + expected);
  }
}

// A YAML mapping whose keys must all be consumed.
class Section {
 public:
  Section(const YAML::Node& node, std::string prefix)
      : node_(node), prefix_(std::move(prefix)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      ConfigFail(prefix_.empty() ? "config" : prefix_, node_.Mark(),
                 "expected a mapping");
    }
  }

  bool Has(const std::string& key) const {
    return node_ && node_.IsMap() && node_[key];
  }

  YAML::Node Take(const std::string& key) {
    used_.insert(key);
    if (!Has(key)) return YAML::Node();
    return node_[key];
  }

  std::string field(const std::string& key) const { return Join(prefix_, key); }

  bool TakeIf(const std::string& key, YAML::Node& out) {
    used_.insert(key);
    if (!Has(key)) return false;
    out = node_[key];
    return !out.IsNull();
  }

  Section Child(const std::string& key) { return Section(Take(key), field(key)); }

  void Read(const std::string& key, double& out) {
    if (YAML::Node n; TakeIf(key, n)) out = Convert<double>(n, field(key), "a number");
  }
  void Read(const std::string& key, int& out) {
    if (YAML::Node n; TakeIf(key, n)) out = Convert<int>(n, field(key), "an integer");
  }
  void Read(const std::string& key, bool& out) {
    if (YAML::Node n; TakeIf(key, n)) out = Convert<bool>(n, field(key), "true or false");
  }
  void Read(const std::string& key, std::string& out) {
    if (YAML::Node n; TakeIf(key, n)) {
      out = Convert<std::string>(n, field(key), "a string");
    }
  }
  void Read(const std::string& key, std::vector<double>& out) {
    if (YAML::Node n; TakeIf(key, n)) {
      out = Convert<std::vector<double>>(n, field(key), "a list of numbers");
    }
  }
  void Read(const std::string& key, std::vector<int>& out) {
    if (YAML::Node n; TakeIf(key, n)) {
      out = Convert<std::vector<int>>(n, field(key), "a list of integers");
    }
  }
  void Read(const std::string& key, std::vector<std::uint64_t>& out) {
    if (YAML::Node n; TakeIf(key, n)) {
      out = Convert<std::vector<std::uint64_t>>(
          n, field(key), "a list of non-negative integers");
    }
  }
  void Read(const std::string& key, Vec2& out) {
    if (YAML::Node n; TakeIf(key, n)) {
      const auto v = Convert<std::vector<double>>(n, field(key), "[x, y]");
      if (v.size() != 2) ConfigFail(field(key), n.Mark(), "expected [x, y]");
      out = {v[0], v[1]};
    }
  }
  void Read(const std::string& key, std::vector<Interval>& out) {
    if (YAML::Node n; TakeIf(key, n)) {
      const auto v = Convert<std::vector<std::vector<double>>>(
          n, field(key), "a list of [min, max] pairs");
      out.clear();
      for (const auto& pair : v) {
        if (pair.size() != 2) {
          ConfigFail(field(key), n.Mark(), "expected [min, max] pairs");
        }
        out.push_back({pair[0], pair[1]});
      }
    }
  }

  void RejectUnknown() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.contains(key)) {
        ConfigFail(field(key), kv.first.Mark(), "unknown key");
      }
    }
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string prefix_;
  std::set<std::string> used_;
};

void ReadArm(Section s, ArmSpec& arm) {
  s.Read("base", arm.base);
  s.Read("link_lengths", arm.link_lengths);
  s.Read("joint_limits", arm.joint_limits);
  s.RejectUnknown();
}

// Runs a sub-type validator and reports its message against `field`.
template <typename F>
void Validated(const std::string& field, F&& validate) {
  try {
    validate();
  } catch (const Error& e) {
    Fail(ErrorCategory::kConfig, field + ": " + e.what());
  }
}

std::string Num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string Pair(double a, double b) { return "[" + Num(a) + ", " + Num(b) + "]"; }

template <typename T>
std::string List(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += Num(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

std::string Intervals(const std::vector<Interval>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += Pair(v[i].min, v[i].max);
  }
  return s + "]";
}

const char* RuleName(StepSizeRule rule) {
  return rule == StepSizeRule::kConstant ? "constant" : "visit_count";
}

}  // namespace

const char* AlgorithmName(Algorithm algorithm) {
  return algorithm == Algorithm::kDarl ? "darl" : "gtrl";
}

ExperimentConfig DefaultConfig(Algorithm algorithm, RewardStructure reward) {
  ExperimentConfig c;
  EnvConfig& env = c.env;
  // Two 2-link arms facing each other across a desk. Each joint range is
  // 1.8 rad centred on the joint solution for that arm's target, and the
  // elbow ranges keep each arm on one elbow branch. Episodes start 0.6 to
  // 0.9 rad away from the solution on every joint.
  env.arm1.base = {-0.35, 0.0};
  env.arm1.link_lengths = {0.3, 0.3};
  env.arm1.joint_limits = {{-0.31, 1.49}, {0.418, 2.218}};
  env.arm2.base = {0.35, 0.0};
  env.arm2.link_lengths = {0.3, 0.3};
  env.arm2.joint_limits = {{1.651593, 3.451593}, {-2.218, -0.418}};
  env.start1 = {{1.19, 1.49}, {0.418, 0.718}};
  env.start2 = {{1.651593, 1.951593}, {-0.718, -0.418}};
  env.delta = 0.05;
  env.task.target1 = {-0.2, 0.45};
  env.task.target2 = {0.2, 0.45};
  env.task.success_dist_tol = 0.1;
  env.task.success_angle_tol = 0.15;
  env.task.horizon = 100;
  env.task.noise_sigma = 0.005;
  // Calibrated on the independent learner; see configs/reference.yaml.
  c.agent.bins_per_joint = 7;
  c.agent.alpha_rule = StepSizeRule::kVisitCount;
  c.agent.alpha = 0.5;
  c.agent.epsilon = {0.15, 0.15, 1};
  c.agent.algorithm = algorithm;
  c.reward = reward;
  return c;
}

void ExperimentConfig::Validate() const {
  Validated("environment", [&] { env.Validate(); });
  Validated("agent", [&] { agent.Validate(); });
  Validated("reward", [&] { reward.Validate(); });
  Check(run.episodes >= 1, ErrorCategory::kConfig,
        "run.episodes: must be >= 1");
  Check(!run.seeds.empty(), ErrorCategory::kConfig,
        "run.seeds: needs at least one seed");
  const std::set<std::uint64_t> unique(run.seeds.begin(), run.seeds.end());
  Check(unique.size() == run.seeds.size(), ErrorCategory::kConfig,
        "run.seeds: seeds must be distinct");
  Check(run.eval_every >= 0, ErrorCategory::kConfig,
        "run.eval_every: must be >= 0");
  Check(run.eval_episodes >= 1, ErrorCategory::kConfig,
        "run.eval_episodes: must be >= 1");
  Check(run.success_window >= 1, ErrorCategory::kConfig,
        "run.success_window: must be >= 1");
  Check(!output.directory.empty(), ErrorCategory::kConfig,
        "output.directory: must not be empty");
  Check(output.checkpoint_every >= 0, ErrorCategory::kConfig,
        "output.checkpoint_every: must be >= 0");
  if (agent.backend == BackendKind::kTabular) {
    // Tables hold two doubles and a visit counter per cell and agent.
    const double cells =
        static_cast<double>(NumGridCells(env.total_joints(), agent.bins_per_joint));
    Check(cells <= 4.0e6, ErrorCategory::kConfig,
          "agent.bins_per_joint: state grid too large for a table");
  }
}

ExperimentConfig ParseConfig(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    Fail(ErrorCategory::kConfig, "syntax error at line " +
                                     std::to_string(e.mark.line + 1) + ": " +
                                     e.msg);
  }
  Section top(root, "");

  Section agent = top.Child("agent");
  Section reward = top.Child("reward");
  std::string algorithm;
  agent.Read("algorithm", algorithm);
  if (algorithm.empty()) {
    ConfigFail("agent.algorithm", root.Mark(), "required (darl or gtrl)");
  }
  if (algorithm != "darl" && algorithm != "gtrl") {
    ConfigFail("agent.algorithm", agent.node()["algorithm"].Mark(),
               "must be darl or gtrl");
  }
  std::string structure;
  reward.Read("structure", structure);
  if (structure.empty()) {
    ConfigFail("reward.structure", root.Mark(), "required (rs1 or rs2)");
  }
  if (structure != "rs1" && structure != "rs2") {
    ConfigFail("reward.structure", reward.node()["structure"].Mark(),
               "must be rs1 or rs2");
  }

  ExperimentConfig c = DefaultConfig(
      algorithm == "darl" ? Algorithm::kDarl : Algorithm::kGtrl);

  if (structure == "rs1") {
    double k1 = 0.5;
    double k2 = 0.5;
    reward.Read("kappa1", k1);
    reward.Read("kappa2", k2);
    if (reward.Has("kappa")) {
      ConfigFail("reward.kappa", reward.node()["kappa"].Mark(),
                 "rs1 is weighted by kappa1 and kappa2");
    }
    if (!(k1 > 0.0)) {
      ConfigFail("reward.kappa1", reward.node()["kappa1"].Mark(),
                 "kappa1 must be > 0");
    }
    if (!(k2 > 0.0)) {
      ConfigFail("reward.kappa2", reward.node()["kappa2"].Mark(),
                 "kappa2 must be > 0");
    }
    c.reward = RewardStructure::Rs1(k1, k2);
  } else {
    double k = 1.0;
    reward.Read("kappa", k);
    for (const char* key : {"kappa1", "kappa2"}) {
      if (reward.Has(key)) {
        ConfigFail(reward.field(key), reward.node()[key].Mark(),
                   "rs2 is weighted by kappa");
      }
    }
    if (!(k > 0.0)) {
      ConfigFail("reward.kappa", reward.node()["kappa"].Mark(),
                 "kappa must be > 0");
    }
    c.reward = RewardStructure::Rs2(k);
  }
  reward.RejectUnknown();

  {
    Section env = top.Child("environment");
    ReadArm(env.Child("arm1"), c.env.arm1);
    ReadArm(env.Child("arm2"), c.env.arm2);
    env.Read("start_region1", c.env.start1);
    env.Read("start_region2", c.env.start2);
    env.Read("delta", c.env.delta);
    env.Read("noise_sigma", c.env.task.noise_sigma);
    env.Read("target1", c.env.task.target1);
    env.Read("target2", c.env.task.target2);
    env.Read("success_dist_tol", c.env.task.success_dist_tol);
    env.Read("success_angle_tol", c.env.task.success_angle_tol);
    env.RejectUnknown();
  }

  {
    AgentConfig& a = c.agent;
    agent.Read("gamma", a.gamma);
    std::string rule = RuleName(a.alpha_rule);
    agent.Read("alpha_schedule", rule);
    if (rule == "constant") {
      a.alpha_rule = StepSizeRule::kConstant;
    } else if (rule == "visit_count") {
      a.alpha_rule = StepSizeRule::kVisitCount;
    } else {
      ConfigFail("agent.alpha_schedule", agent.node()["alpha_schedule"].Mark(),
                 "must be constant or visit_count");
    }
    agent.Read("alpha", a.alpha);
    agent.Read("epsilon_initial", a.epsilon.initial);
    agent.Read("epsilon_final", a.epsilon.final);
    agent.Read("epsilon_decay_episodes", a.epsilon.decay_episodes);
    std::string backend = "tabular";
    agent.Read("backend", backend);
    if (backend == "tabular") {
      a.backend = BackendKind::kTabular;
    } else if (backend == "approximator") {
      a.backend = BackendKind::kApproximator;
    } else {
      ConfigFail("agent.backend", agent.node()["backend"].Mark(),
                 "must be tabular or approximator");
    }
    agent.Read("bins_per_joint", a.bins_per_joint);
    agent.Read("hidden_layers", a.hidden_layers);
    agent.Read("learning_rate", a.learning_rate);
    agent.Read("clip_norm", a.clip_norm);
    agent.Read("target_refresh", a.target_refresh);
    agent.Read("replay_capacity", a.replay_capacity);
    agent.Read("batch_size", a.batch_size);
    agent.Read("verify_equilibria", a.verify_equilibria);
    agent.RejectUnknown();
  }

  {
    Section run = top.Child("run");
    run.Read("episodes", c.run.episodes);
    run.Read("horizon", c.env.task.horizon);
    run.Read("seeds", c.run.seeds);
    run.Read("eval_every", c.run.eval_every);
    run.Read("eval_episodes", c.run.eval_episodes);
    run.Read("success_window", c.run.success_window);
    run.RejectUnknown();
  }

  {
    Section out = top.Child("output");
    out.Read("directory", c.output.directory);
    out.Read("checkpoint_every", c.output.checkpoint_every);
    out.Read("step_log", c.output.step_log);
    out.RejectUnknown();
  }
  top.RejectUnknown();

  c.Validate();
  return c;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  Check(in.good(), ErrorCategory::kIo, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string SerializeConfig(const ExperimentConfig& c) {
  std::ostringstream o;
  auto arm = [&](const char* name, const ArmSpec& a) {
    o << "  " << name << ":\n"
      << "    base: " << Pair(a.base.x, a.base.y) << "\n"
      << "    link_lengths: " << List(a.link_lengths) << "\n"
      << "    joint_limits: " << Intervals(a.joint_limits) << "\n";
  };
  o << "environment:\n";
  arm("arm1", c.env.arm1);
  arm("arm2", c.env.arm2);
  o << "  start_region1: " << Intervals(c.env.start1) << "\n"
    << "  start_region2: " << Intervals(c.env.start2) << "\n"
    << "  delta: " << Num(c.env.delta) << "\n"
    << "  noise_sigma: " << Num(c.env.task.noise_sigma) << "\n"
    << "  target1: " << Pair(c.env.task.target1.x, c.env.task.target1.y) << "\n"
    << "  target2: " << Pair(c.env.task.target2.x, c.env.task.target2.y) << "\n"
    << "  success_dist_tol: " << Num(c.env.task.success_dist_tol) << "\n"
    << "  success_angle_tol: " << Num(c.env.task.success_angle_tol) << "\n";

  const AgentConfig& a = c.agent;
  o << "agent:\n"
    << "  algorithm: " << AlgorithmName(a.algorithm) << "\n"
    << "  gamma: " << Num(a.gamma) << "\n"
    << "  alpha_schedule: " << RuleName(a.alpha_rule) << "\n"
    << "  alpha: " << Num(a.alpha) << "\n"
    << "  epsilon_initial: " << Num(a.epsilon.initial) << "\n"
    << "  epsilon_final: " << Num(a.epsilon.final) << "\n"
    << "  epsilon_decay_episodes: " << a.epsilon.decay_episodes << "\n"
    << "  backend: "
    << (a.backend == BackendKind::kTabular ? "tabular" : "approximator") << "\n"
    << "  bins_per_joint: " << a.bins_per_joint << "\n"
    << "  hidden_layers: " << List(a.hidden_layers) << "\n"
    << "  learning_rate: " << Num(a.learning_rate) << "\n"
    << "  clip_norm: " << Num(a.clip_norm) << "\n"
    << "  target_refresh: " << a.target_refresh << "\n"
    << "  replay_capacity: " << a.replay_capacity << "\n"
    << "  batch_size: " << a.batch_size << "\n"
    << "  verify_equilibria: " << (a.verify_equilibria ? "true" : "false")
    << "\n";

  o << "reward:\n";
  if (c.reward.variant == RewardStructure::Variant::kRs1) {
    o << "  structure: rs1\n"
      << "  kappa1: " << Num(c.reward.kappa1) << "\n"
      << "  kappa2: " << Num(c.reward.kappa2) << "\n";
  } else {
    o << "  structure: rs2\n"
      << "  kappa: " << Num(c.reward.kappa) << "\n";
  }

  o << "run:\n"
    << "  episodes: " << c.run.episodes << "\n"
    << "  horizon: " << c.env.task.horizon << "\n"
    << "  seeds: " << List(c.run.seeds) << "\n"
    << "  eval_every: " << c.run.eval_every << "\n"
    << "  eval_episodes: " << c.run.eval_episodes << "\n"
    << "  success_window: " << c.run.success_window << "\n";

  o << "output:\n"
    << "  directory: \"" << c.output.directory << "\"\n"
    << "  checkpoint_every: " << c.output.checkpoint_every << "\n"
    << "  step_log: " << (c.output.step_log ? "true" : "false") << "\n";
  return o.str();
}

std::string ConfigHash(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.output.directory = "-";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : SerializeConfig(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig WithOverride(const ExperimentConfig& config,
                              std::string_view path, std::string_view value) {
  YAML::Node root = YAML::Load(SerializeConfig(config));
  std::vector<std::string> parts;
  std::string part;
  for (char ch : path) {
    if (ch == '.') {
      parts.push_back(part);
      part.clear();
    } else {
      part += ch;
    }
  }
  parts.push_back(part);
  Check(parts.size() >= 2, ErrorCategory::kConfig,
        "override path must look like section.key, got " + std::string(path));

  YAML::Node parsed;
  try {
    parsed = YAML::Load(std::string(value));
  } catch (const YAML::ParserException& e) {
    Fail(ErrorCategory::kConfig,
         "override value '" + std::string(value) + "': " + e.msg);
  }
  // Walk by reassignment; yaml-cpp nodes are handles into the same tree.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    Check(next.IsMap(), ErrorCategory::kConfig,
          "override path " + std::string(path) + " does not name a section");
    chain.push_back(next);
  }
  chain.back()[parts.back()] = parsed;
  YAML::Emitter out;
  out << root;
  return ParseConfig(out.c_str());
}

}  // namespace coopmarl
