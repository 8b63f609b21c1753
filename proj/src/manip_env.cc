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

#include "coopmarl/manip_env.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "coopmarl/error.h"

namespace coopmarl {
namespace {

std::vector<double> StepArm(const ArmSpec& arm, const std::vector<double>& q,
                            const JointAction& action, double sigma,
                            Rng& rng) {
  if (action.increments.size() != q.size()) {
    Fail(ErrorCategory::kInvalidArgument,
         "action has " + std::to_string(action.increments.size()) +
             " increments for " + std::to_string(q.size()) + " joints");
  }
  std::vector<double> next(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double v = q[i] + action.increments[i];
    if (sigma > 0.0) v += rng.Normal(0.0, sigma);
    next[i] = std::clamp(v, arm.joint_limits[i].min, arm.joint_limits[i].max);
  }
  return next;
}

void ValidateStartRegion(const ArmSpec& arm, const std::vector<Interval>& start,
                         const std::string& name) {
  Check(static_cast<int>(start.size()) == arm.num_joints(),
        ErrorCategory::kInvalidTask,
        name + " must give one interval per joint");
  for (int i = 0; i < arm.num_joints(); ++i) {
    const Interval& s = start[i];
    if (!(s.min <= s.max && arm.joint_limits[i].Contains(s.min) &&
          arm.joint_limits[i].Contains(s.max))) {
      Fail(ErrorCategory::kInvalidTask,
           name + " joint " + std::to_string(i) +
               " must be an interval inside the joint limits");
    }
  }
}

}  // namespace

double L1Norm(Vec2 v) { return std::abs(v.x) + std::abs(v.y); }

double EuclideanNorm(Vec2 v) { return std::hypot(v.x, v.y); }

double AngleBetween(Vec2 a, Vec2 b) {
  if ((a.x == 0.0 && a.y == 0.0) || (b.x == 0.0 && b.y == 0.0)) {
    return std::numbers::pi;
  }
  const double cross = a.x * b.y - a.y * b.x;
  const double dot = a.x * b.x + a.y * b.y;
  return std::atan2(std::abs(cross), dot);
}

double ArmSpec::reach() const {
  double total = 0.0;
  for (double l : link_lengths) total += l;
  return total;
}

void ArmSpec::Validate() const {
  Check(!link_lengths.empty(), ErrorCategory::kInvalidArgument,
        "arm needs at least one link");
  Check(joint_limits.size() == link_lengths.size(),
        ErrorCategory::kInvalidArgument,
        "joint_limits must have one interval per link");
  for (double l : link_lengths) {
    Check(std::isfinite(l) && l > 0.0, ErrorCategory::kInvalidArgument,
          "link_lengths must be > 0");
  }
  for (const Interval& lim : joint_limits) {
    Check(std::isfinite(lim.min) && std::isfinite(lim.max) && lim.min < lim.max,
          ErrorCategory::kInvalidArgument,
          "joint_limits need min < max for every joint");
  }
}

ActionCodec::ActionCodec(int num_joints, double delta)
    : num_joints_(num_joints), num_actions_(1), delta_(delta) {
  Check(num_joints >= 1 && num_joints <= 8, ErrorCategory::kInvalidArgument,
        "action codec supports 1 to 8 joints");
  Check(std::isfinite(delta) && delta > 0.0, ErrorCategory::kInvalidArgument,
        "delta must be > 0");
  for (int i = 0; i < num_joints; ++i) num_actions_ *= 3;
}

JointAction ActionCodec::Decode(int index) const {
  if (index < 0 || index >= num_actions_) {
    Fail(ErrorCategory::kInvalidArgument,
         "action index " + std::to_string(index) + " out of range");
  }
  JointAction action{std::vector<double>(num_joints_)};
  for (int i = num_joints_ - 1; i >= 0; --i) {
    action.increments[i] = (index % 3 - 1) * delta_;
    index /= 3;
  }
  return action;
}

int ActionCodec::Encode(const JointAction& action) const {
  Check(static_cast<int>(action.increments.size()) == num_joints_,
        ErrorCategory::kInvalidArgument, "action has the wrong joint count");
  int index = 0;
  for (double inc : action.increments) {
    int digit;
    if (inc == -delta_) {
      digit = 0;
    } else if (inc == 0.0) {
      digit = 1;
    } else if (inc == delta_) {
      digit = 2;
    } else {
      Fail(ErrorCategory::kInvalidArgument,
           "increment " + std::to_string(inc) + " is not one of {-d, 0, +d}");
    }
    index = index * 3 + digit;
  }
  return index;
}

RewardStructure RewardStructure::Rs1(double kappa1, double kappa2) {
  RewardStructure rs;
  rs.variant = Variant::kRs1;
  rs.kappa1 = kappa1;
  rs.kappa2 = kappa2;
  rs.kappa = kappa1 + kappa2;
  rs.Validate();
  return rs;
}

RewardStructure RewardStructure::Rs2(double kappa) {
  RewardStructure rs;
  rs.variant = Variant::kRs2;
  rs.kappa = kappa;
  rs.kappa1 = kappa / 2;
  rs.kappa2 = kappa / 2;
  rs.Validate();
  return rs;
}

double RewardStructure::total_weight() const {
  return variant == Variant::kRs1 ? kappa1 + kappa2 : kappa;
}

void RewardStructure::Validate() const {
  if (variant == Variant::kRs1) {
    Check(std::isfinite(kappa1) && kappa1 > 0.0, ErrorCategory::kInvalidArgument,
          "kappa1 must be > 0");
    Check(std::isfinite(kappa2) && kappa2 > 0.0, ErrorCategory::kInvalidArgument,
          "kappa2 must be > 0");
  } else {
    Check(std::isfinite(kappa) && kappa > 0.0, ErrorCategory::kInvalidArgument,
          "kappa must be > 0");
  }
}

void EnvConfig::Validate() const {
  arm1.Validate();
  arm2.Validate();
  ValidateStartRegion(arm1, start1, "start_region1");
  ValidateStartRegion(arm2, start2, "start_region2");
  Check(std::isfinite(delta) && delta > 0.0, ErrorCategory::kInvalidTask,
        "delta must be > 0");
  Check(!(task.target1 == task.target2), ErrorCategory::kInvalidTask,
        "target1 and target2 must be distinct");
  Check(EuclideanNorm(task.target1 - arm1.base) <= arm1.reach(),
        ErrorCategory::kInvalidTask, "target1 is out of reach of arm1");
  Check(EuclideanNorm(task.target2 - arm2.base) <= arm2.reach(),
        ErrorCategory::kInvalidTask, "target2 is out of reach of arm2");
  Check(task.success_dist_tol > 0.0, ErrorCategory::kInvalidTask,
        "success_dist_tol must be > 0");
  Check(task.success_angle_tol > 0.0, ErrorCategory::kInvalidTask,
        "success_angle_tol must be > 0");
  Check(task.horizon >= 1, ErrorCategory::kInvalidTask, "horizon must be >= 1");
  Check(std::isfinite(task.noise_sigma) && task.noise_sigma >= 0.0,
        ErrorCategory::kInvalidTask, "noise_sigma must be >= 0");
}

Vec2 ForwardKinematics(const ArmSpec& spec, const std::vector<double>& q) {
  if (static_cast<int>(q.size()) != spec.num_joints()) {
    Fail(ErrorCategory::kInvalidArgument,
         "expected " + std::to_string(spec.num_joints()) +
             " joint angles, got " + std::to_string(q.size()));
  }
  Vec2 p = spec.base;
  double heading = 0.0;
  for (int i = 0; i < spec.num_joints(); ++i) {
    heading += q[i];
    p.x += spec.link_lengths[i] * std::cos(heading);
    p.y += spec.link_lengths[i] * std::sin(heading);
  }
  return p;
}

EnvState MakeState(const EnvConfig& config, std::vector<double> q1,
                   std::vector<double> q2, int t) {
  EnvState s;
  s.p1 = ForwardKinematics(config.arm1, q1);
  s.p2 = ForwardKinematics(config.arm2, q2);
  s.q1 = std::move(q1);
  s.q2 = std::move(q2);
  s.t = t;
  return s;
}

EnvState Reset(const EnvConfig& config, Rng& rng) {
  std::vector<double> q1(config.start1.size());
  std::vector<double> q2(config.start2.size());
  for (std::size_t i = 0; i < q1.size(); ++i) {
    q1[i] = rng.Uniform(config.start1[i].min, config.start1[i].max);
  }
  for (std::size_t i = 0; i < q2.size(); ++i) {
    q2[i] = rng.Uniform(config.start2[i].min, config.start2[i].max);
  }
  return MakeState(config, std::move(q1), std::move(q2), 0);
}

EnvState Step(const EnvConfig& config, const EnvState& state,
              const JointAction& a1, const JointAction& a2, Rng& rng) {
  const double sigma = config.task.noise_sigma;
  std::vector<double> q1 = StepArm(config.arm1, state.q1, a1, sigma, rng);
  std::vector<double> q2 = StepArm(config.arm2, state.q2, a2, sigma, rng);
  return MakeState(config, std::move(q1), std::move(q2), state.t + 1);
}

RewardConstituents ComputeConstituents(const EnvState& next,
                                       const TaskSpec& task) {
  RewardConstituents c;
  c.displacement1 = -L1Norm(next.p1 - task.target1);
  c.displacement2 = -L1Norm(next.p2 - task.target2);
  c.posture = -AngleBetween(next.p1 - next.p2, task.target1 - task.target2);
  return c;
}

std::pair<double, double> Rewards(const RewardConstituents& c,
                                  const RewardStructure& rs) {
  if (rs.variant == RewardStructure::Variant::kRs1) {
    return {c.displacement1 + rs.kappa1 * c.posture,
            c.displacement2 + rs.kappa2 * c.posture};
  }
  return {c.displacement1 + c.displacement2, rs.kappa * c.posture};
}

std::pair<double, double> Rewards(const EnvState& next, const TaskSpec& task,
                                  const RewardStructure& rs) {
  return Rewards(ComputeConstituents(next, task), rs);
}

bool IsSuccess(const EnvState& state, const TaskSpec& task) {
  return L1Norm(state.p1 - task.target1) <= task.success_dist_tol &&
         L1Norm(state.p2 - task.target2) <= task.success_dist_tol &&
         AngleBetween(state.p1 - state.p2, task.target1 - task.target2) <=
             task.success_angle_tol;
}

std::int64_t NumGridCells(int total_joints, int bins_per_joint) {
  std::int64_t cells = 1;
  for (int i = 0; i < total_joints; ++i) cells *= bins_per_joint;
  return cells;
}

std::int64_t DiscretizeState(const EnvState& state, const ArmSpec& arm1,
                             const ArmSpec& arm2, int bins_per_joint) {
  Check(bins_per_joint >= 2, ErrorCategory::kInvalidArgument,
        "bins_per_joint must be >= 2");
  std::int64_t index = 0;
  auto accumulate = [&](const ArmSpec& arm, const std::vector<double>& q) {
    for (int i = 0; i < arm.num_joints(); ++i) {
      const Interval& lim = arm.joint_limits[i];
      const double u = (q[i] - lim.min) / lim.width();
      const int bin = std::clamp(static_cast<int>(std::floor(u * bins_per_joint)),
                                 0, bins_per_joint - 1);
      index = index * bins_per_joint + bin;
    }
  };
  accumulate(arm1, state.q1);
  accumulate(arm2, state.q2);
  return index;
}

int FeatureDimension(const EnvConfig& config) {
  return config.total_joints() + 4;
}

std::vector<double> StateFeatures(const EnvConfig& config,
                                  const EnvState& state) {
  std::vector<double> f;
  f.reserve(FeatureDimension(config));
  for (int i = 0; i < config.arm1.num_joints(); ++i) {
    const Interval& lim = config.arm1.joint_limits[i];
    f.push_back(2.0 * (state.q1[i] - lim.min) / lim.width() - 1.0);
  }
  for (int i = 0; i < config.arm2.num_joints(); ++i) {
    const Interval& lim = config.arm2.joint_limits[i];
    f.push_back(2.0 * (state.q2[i] - lim.min) / lim.width() - 1.0);
  }
  // Both reach discs fit in a disc around the midpoint of the bases.
  const Vec2 centre{(config.arm1.base.x + config.arm2.base.x) / 2,
                    (config.arm1.base.y + config.arm2.base.y) / 2};
  const double radius =
      std::max(EuclideanNorm(config.arm1.base - centre) + config.arm1.reach(),
               EuclideanNorm(config.arm2.base - centre) + config.arm2.reach());
  for (Vec2 p : {state.p1, state.p2}) {
    f.push_back((p.x - centre.x) / radius);
    f.push_back((p.y - centre.y) / radius);
  }
  return f;
}

}  // namespace coopmarl
