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

#ifndef COOPMARL_MANIP_ENV_H_
#define COOPMARL_MANIP_ENV_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "coopmarl/rng.h"

// Two planar serial arms carrying an implicit rigid object between their end
// effectors. The object's position is judged by the end-effector positions,
// its posture by the direction of the vector between them.

namespace coopmarl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }

double L1Norm(Vec2 v);
double EuclideanNorm(Vec2 v);
// Unsigned angle in [0, pi] between two vectors; pi if either is zero.
double AngleBetween(Vec2 a, Vec2 b);

struct Interval {
  double min = 0.0;
  double max = 0.0;

  double width() const { return max - min; }
  bool Contains(double v) const { return v >= min && v <= max; }
  bool operator==(const Interval&) const = default;
};

struct ArmSpec {
  std::vector<double> link_lengths;
  Vec2 base;
  std::vector<Interval> joint_limits;

  int num_joints() const { return static_cast<int>(link_lengths.size()); }
  double reach() const;
  // Throws kInvalidArgument naming the offending field.
  void Validate() const;

  bool operator==(const ArmSpec&) const = default;
};

struct EnvState {
  std::vector<double> q1;
  std::vector<double> q2;
  // Cached forward kinematics of q1 and q2.
  Vec2 p1;
  Vec2 p2;
  int t = 0;

  bool operator==(const EnvState&) const = default;
};

// Per-joint increments, each one of {-delta, 0, +delta}.
struct JointAction {
  std::vector<double> increments;
};

// Bijection between action indices and increment vectors. Each joint takes
// digit d in {0, 1, 2} meaning increment (d - 1) * delta, and the index is the
// base-3 number with joint 0 as the most significant digit.
class ActionCodec {
 public:
  ActionCodec(int num_joints, double delta);

  int num_joints() const { return num_joints_; }
  int num_actions() const { return num_actions_; }
  double delta() const { return delta_; }

  JointAction Decode(int index) const;
  // Throws kInvalidArgument unless every increment is one of {-d, 0, +d}.
  int Encode(const JointAction& action) const;

 private:
  int num_joints_;
  int num_actions_;
  double delta_;
};

struct RewardStructure {
  enum class Variant { kRs1, kRs2 };

  Variant variant = Variant::kRs1;
  // Rs1 weights. kappa1 + kappa2 is the total posture weight.
  double kappa1 = 0.5;
  double kappa2 = 0.5;
  // Rs2 posture weight.
  double kappa = 1.0;

  static RewardStructure Rs1(double kappa1, double kappa2);
  static RewardStructure Rs2(double kappa);

  // Posture weight summed over both agents; equal for Rs1(k1, k2) and
  // Rs2(k1 + k2).
  double total_weight() const;
  void Validate() const;

  bool operator==(const RewardStructure&) const = default;
};

struct TaskSpec {
  Vec2 target1;
  Vec2 target2;
  double success_dist_tol = 0.1;
  double success_angle_tol = 0.15;
  int horizon = 100;
  double noise_sigma = 0.005;

  bool operator==(const TaskSpec&) const = default;
};

// Everything needed to simulate one episode family.
struct EnvConfig {
  ArmSpec arm1;
  ArmSpec arm2;
  TaskSpec task;
  double delta = 0.05;
  // Reset draws each joint uniformly from these intervals.
  std::vector<Interval> start1;
  std::vector<Interval> start2;

  // Checks arm specs, start regions inside joint limits, distinct and
  // reachable targets, positive tolerances and horizon. Throws
  // kInvalidTask / kInvalidArgument.
  void Validate() const;

  int total_joints() const { return arm1.num_joints() + arm2.num_joints(); }

  bool operator==(const EnvConfig&) const = default;
};

// base + sum_i L_i (cos(sum_{j<=i} q_j), sin(sum_{j<=i} q_j)).
Vec2 ForwardKinematics(const ArmSpec& spec, const std::vector<double>& q);

// State with cached positions recomputed from the joint angles.
EnvState MakeState(const EnvConfig& config, std::vector<double> q1,
                   std::vector<double> q2, int t = 0);

EnvState Reset(const EnvConfig& config, Rng& rng);

// q' = clamp(q + increment + N(0, sigma^2)) per joint, positions recomputed,
// t + 1. Noise is drawn for arm 1's joints first, then arm 2's, only when
// sigma > 0.
EnvState Step(const EnvConfig& config, const EnvState& state,
              const JointAction& a1, const JointAction& a2, Rng& rng);

struct RewardConstituents {
  double displacement1 = 0.0;  // -|p1 - target1|_1
  double displacement2 = 0.0;  // -|p2 - target2|_1
  double posture = 0.0;        // -angle(p1 - p2, target1 - target2)
};

RewardConstituents ComputeConstituents(const EnvState& next,
                                       const TaskSpec& task);

std::pair<double, double> Rewards(const EnvState& next, const TaskSpec& task,
                                  const RewardStructure& rs);
std::pair<double, double> Rewards(const RewardConstituents& c,
                                  const RewardStructure& rs);

inline double SystemwideReward(double r1, double r2) { return r1 + r2; }

// Both end effectors within success_dist_tol (L1) of their targets and the
// posture angle within success_angle_tol. Thresholds are inclusive.
bool IsSuccess(const EnvState& state, const TaskSpec& task);

// Row-major uniform-grid cell index over all joints (arm 1's joints first).
// Angles on an upper limit fall in the top bin.
std::int64_t DiscretizeState(const EnvState& state, const ArmSpec& arm1,
                             const ArmSpec& arm2, int bins_per_joint);

std::int64_t NumGridCells(int total_joints, int bins_per_joint);

// Joint angles scaled to [-1, 1] by their limits followed by end-effector
// coordinates relative to the workspace centre, scaled by the workspace
// radius.
std::vector<double> StateFeatures(const EnvConfig& config,
                                  const EnvState& state);
int FeatureDimension(const EnvConfig& config);

}  // namespace coopmarl

#endif  // COOPMARL_MANIP_ENV_H_
