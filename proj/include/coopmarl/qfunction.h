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

#ifndef COOPMARL_QFUNCTION_H_
#define COOPMARL_QFUNCTION_H_

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coopmarl/game_solver.h"
#include "coopmarl/matrix.h"
#include "coopmarl/rng.h"

// Q-values over (state, joint action). Every backend keys on the joint action
// (a1, a2) so the same storage serves independent and equilibrium learners.

namespace coopmarl {

// A state as seen by the Q backends: a grid-cell index for tables and a
// scaled feature vector for function approximation.
struct Observation {
  std::int64_t index = 0;
  std::vector<double> features;

  bool operator==(const Observation&) const = default;
};

struct Transition {
  Observation state;
  int a1 = 0;
  int a2 = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  Observation next_state;
  bool terminal = false;
};

// r + gamma * mu1^T q_next mu2, or r alone on terminal transitions.
// Throws kInvalidArgument on dimension mismatch or gamma outside [0, 1).
double TdTargetNash(double r, double gamma, const Matrix& q_next,
                    const MixedStrategy& mu1, const MixedStrategy& mu2,
                    bool terminal = false);

class QTable {
 public:
  QTable(std::int64_t num_states, int num_actions1, int num_actions2,
         double default_value = 0.0);

  std::int64_t num_states() const { return num_states_; }
  int num_actions1() const { return num_actions1_; }
  int num_actions2() const { return num_actions2_; }
  double default_value() const { return default_value_; }

  double Get(std::int64_t state, int a1, int a2) const;
  void Set(std::int64_t state, int a1, int a2, double value);

  // Row-major num_actions1 x num_actions2 slice at `state`.
  Matrix QMatrix(std::int64_t state) const;

  // cell <- (1 - alpha) * cell + alpha * target. Only that cell changes.
  void Update(std::int64_t state, int a1, int a2, double target, double alpha);

  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

 private:
  std::size_t Offset(std::int64_t state, int a1, int a2) const;

  std::int64_t num_states_;
  int num_actions1_;
  int num_actions2_;
  double default_value_;
  std::vector<double> values_;
};

// One (state, output index, target) regression sample.
struct RegressionSample {
  std::span<const double> features;
  int output = 0;
  double target = 0.0;
};

// Fully connected network, rectifier hidden layers and a linear output layer.
class DenseApproximator {
 public:
  // layer_sizes = {input, hidden..., output}. Weights use He-uniform
  // initialisation from `rng`; biases start at zero.
  DenseApproximator(std::vector<int> layer_sizes, Rng& rng);
  // All parameters zero.
  explicit DenseApproximator(std::vector<int> layer_sizes);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes_.size()) - 1; }

  std::vector<double> Forward(std::span<const double> input) const;

  // Mean over the batch of (prediction - target)^2 at each sample's output.
  double Loss(std::span<const RegressionSample> batch) const;
  // dLoss/dparameters in parameters() order.
  std::vector<double> Gradient(std::span<const RegressionSample> batch) const;

  // One SGD step. Gradients whose norm exceeds `clip_norm` (if > 0) are
  // rescaled to it. Returns the loss before the step. Throws
  // kTrainingDivergence on a non-finite loss, gradient or parameter.
  double Update(std::span<const RegressionSample> batch, double learning_rate,
                double clip_norm = 0.0);

  // Flat view: layer 0 weights (row-major, output x input), layer 0 biases,
  // layer 1 weights, ...
  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }

  // Output layer bias block within parameters().
  std::span<double> output_bias();

 private:
  std::size_t WeightOffset(int layer) const { return offsets_[layer]; }
  std::size_t BiasOffset(int layer) const {
    return offsets_[layer] + static_cast<std::size_t>(layer_sizes_[layer]) *
                                 layer_sizes_[layer + 1];
  }
  // Activations per layer (post-rectifier for hidden layers).
  std::vector<std::vector<double>> Activations(
      std::span<const double> input) const;

  std::vector<int> layer_sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Bounded FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void Push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_[i]; }

  // Uniform sample without replacement, or nullopt while the buffer holds
  // fewer than batch_size transitions.
  std::optional<std::vector<Transition>> Sample(std::size_t batch_size,
                                                Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

enum class BackendKind { kTabular, kApproximator };

struct QSample {
  const Observation* state = nullptr;
  int a1 = 0;
  int a2 = 0;
  double target = 0.0;
};

// Per-agent Q-function over joint actions.
class QFunction {
 public:
  virtual ~QFunction() = default;

  virtual BackendKind kind() const = 0;
  virtual int num_actions1() const = 0;
  virtual int num_actions2() const = 0;

  // Current estimate at `state` as an num_actions1 x num_actions2 matrix.
  virtual Matrix QMatrix(const Observation& state) const = 0;
  // Matrix used for bootstrapped targets; the target network for
  // approximators, the live table otherwise.
  virtual Matrix BootstrapMatrix(const Observation& state) const {
    return QMatrix(state);
  }

  // Moves the estimate toward the given targets.
  virtual void Fit(std::span<const QSample> batch) = 0;

  virtual std::unique_ptr<QFunction> Clone() const = 0;
};

enum class StepSizeRule {
  kConstant,
  // alpha = 1 / (1 + prior visits of the cell).
  kVisitCount,
};

class TabularQ final : public QFunction {
 public:
  TabularQ(QTable table, StepSizeRule rule, double constant_alpha);

  BackendKind kind() const override { return BackendKind::kTabular; }
  int num_actions1() const override { return table_.num_actions1(); }
  int num_actions2() const override { return table_.num_actions2(); }
  Matrix QMatrix(const Observation& state) const override;
  void Fit(std::span<const QSample> batch) override;
  std::unique_ptr<QFunction> Clone() const override;

  // Step size the next update of this cell will use.
  double StepSize(std::int64_t state, int a1, int a2) const;
  std::uint32_t visits(std::int64_t state, int a1, int a2) const;

  const QTable& table() const { return table_; }
  QTable& mutable_table() { return table_; }
  StepSizeRule rule() const { return rule_; }
  double constant_alpha() const { return constant_alpha_; }
  std::span<const std::uint32_t> visit_counts() const { return visits_; }
  std::span<std::uint32_t> mutable_visit_counts() { return visits_; }

 private:
  QTable table_;
  StepSizeRule rule_;
  double constant_alpha_;
  std::vector<std::uint32_t> visits_;
};

struct ApproximatorOptions {
  double learning_rate = 1e-3;
  double clip_norm = 10.0;
  // Target network refresh period, in Fit calls.
  int target_refresh = 200;
};

class ApproximatorQ final : public QFunction {
 public:
  ApproximatorQ(DenseApproximator net, int num_actions1, int num_actions2,
                ApproximatorOptions options);

  BackendKind kind() const override { return BackendKind::kApproximator; }
  int num_actions1() const override { return num_actions1_; }
  int num_actions2() const override { return num_actions2_; }
  Matrix QMatrix(const Observation& state) const override;
  Matrix BootstrapMatrix(const Observation& state) const override;
  void Fit(std::span<const QSample> batch) override;
  std::unique_ptr<QFunction> Clone() const override;

  const DenseApproximator& online() const { return online_; }
  const DenseApproximator& target() const { return target_; }
  DenseApproximator& mutable_online() { return online_; }
  DenseApproximator& mutable_target() { return target_; }
  const ApproximatorOptions& options() const { return options_; }
  std::int64_t fit_calls() const { return fit_calls_; }
  void set_fit_calls(std::int64_t n) { fit_calls_ = n; }
  double last_loss() const { return last_loss_; }

 private:
  Matrix ToMatrix(const std::vector<double>& flat) const;

  DenseApproximator online_;
  DenseApproximator target_;
  int num_actions1_;
  int num_actions2_;
  ApproximatorOptions options_;
  std::int64_t fit_calls_ = 0;
  double last_loss_ = 0.0;
};

}  // namespace coopmarl

#endif  // COOPMARL_QFUNCTION_H_
