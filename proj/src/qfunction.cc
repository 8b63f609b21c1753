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

#include "coopmarl/qfunction.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "coopmarl/error.h"

namespace coopmarl {

double TdTargetNash(double r, double gamma, const Matrix& q_next,
                    const MixedStrategy& mu1, const MixedStrategy& mu2,
                    bool terminal) {
  Check(gamma >= 0.0 && gamma < 1.0, ErrorCategory::kInvalidArgument,
        "gamma must be in [0, 1)");
  Check(mu1.size() == q_next.rows() && mu2.size() == q_next.cols(),
        ErrorCategory::kInvalidArgument,
        "strategies do not match the next-state Q matrix");
  if (terminal) return r;
  double value = 0.0;
  for (int i = 0; i < q_next.rows(); ++i) {
    if (mu1[i] == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < q_next.cols(); ++j) row += q_next(i, j) * mu2[j];
    value += mu1[i] * row;
  }
  return r + gamma * value;
}

// --- QTable -----------------------------------------------------------------

QTable::QTable(std::int64_t num_states, int num_actions1, int num_actions2,
               double default_value)
    : num_states_(num_states),
      num_actions1_(num_actions1),
      num_actions2_(num_actions2),
      default_value_(default_value) {
  Check(num_states > 0 && num_actions1 > 0 && num_actions2 > 0,
        ErrorCategory::kInvalidArgument, "QTable dimensions must be positive");
  Check(std::isfinite(default_value), ErrorCategory::kInvalidArgument,
        "QTable default value must be finite");
  values_.assign(static_cast<std::size_t>(num_states) * num_actions1 *
                     num_actions2,
                 default_value);
}

std::size_t QTable::Offset(std::int64_t state, int a1, int a2) const {
  if (state < 0 || state >= num_states_) {
    Fail(ErrorCategory::kInvalidArgument,
         "state index " + std::to_string(state) + " out of range");
  }
  Check(a1 >= 0 && a1 < num_actions1_ && a2 >= 0 && a2 < num_actions2_,
        ErrorCategory::kInvalidArgument, "action index out of range");
  return (static_cast<std::size_t>(state) * num_actions1_ + a1) *
             num_actions2_ +
         a2;
}

double QTable::Get(std::int64_t state, int a1, int a2) const {
  return values_[Offset(state, a1, a2)];
}

void QTable::Set(std::int64_t state, int a1, int a2, double value) {
  Check(std::isfinite(value), ErrorCategory::kInvalidArgument,
        "Q values must be finite");
  values_[Offset(state, a1, a2)] = value;
}

Matrix QTable::QMatrix(std::int64_t state) const {
  const std::size_t begin = Offset(state, 0, 0);
  const std::size_t n = static_cast<std::size_t>(num_actions1_) * num_actions2_;
  return Matrix(num_actions1_, num_actions2_,
                std::vector<double>(values_.begin() + begin,
                                    values_.begin() + begin + n));
}

void QTable::Update(std::int64_t state, int a1, int a2, double target,
                    double alpha) {
  Check(alpha >= 0.0 && alpha <= 1.0, ErrorCategory::kInvalidArgument,
        "alpha must be in [0, 1]");
  Check(std::isfinite(target), ErrorCategory::kTrainingDivergence,
        "non-finite TD target");
  double& cell = values_[Offset(state, a1, a2)];
  // Rounding must not carry the result outside [cell, target].
  const double lo = std::min(cell, target);
  const double hi = std::max(cell, target);
  cell = std::clamp((1.0 - alpha) * cell + alpha * target, lo, hi);
}

// --- DenseApproximator ------------------------------------------------------

DenseApproximator::DenseApproximator(std::vector<int> layer_sizes)
    : layer_sizes_(std::move(layer_sizes)) {
  Check(layer_sizes_.size() >= 2, ErrorCategory::kInvalidArgument,
        "network needs an input and an output layer");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    Check(layer_sizes_[l] > 0 && layer_sizes_[l + 1] > 0,
          ErrorCategory::kInvalidArgument, "layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(layer_sizes_[l]) * layer_sizes_[l + 1] +
             layer_sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

DenseApproximator::DenseApproximator(std::vector<int> layer_sizes, Rng& rng)
    : DenseApproximator(std::move(layer_sizes)) {
  for (int l = 0; l < num_layers(); ++l) {
    const int fan_in = layer_sizes_[l];
    const double bound = std::sqrt(6.0 / fan_in);
    const std::size_t n =
        static_cast<std::size_t>(fan_in) * layer_sizes_[l + 1];
    for (std::size_t i = 0; i < n; ++i) {
      params_[WeightOffset(l) + i] = rng.Uniform(-bound, bound);
    }
  }
}

std::span<double> DenseApproximator::output_bias() {
  const int last = num_layers() - 1;
  return std::span<double>(params_).subspan(BiasOffset(last), output_size());
}

std::vector<std::vector<double>> DenseApproximator::Activations(
    std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size()) {
    Fail(ErrorCategory::kInvalidArgument,
         "network input has " + std::to_string(input.size()) +
             " features, expected " + std::to_string(input_size()));
  }
  std::vector<std::vector<double>> acts;
  acts.reserve(layer_sizes_.size());
  acts.emplace_back(input.begin(), input.end());
  for (int l = 0; l < num_layers(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* w = params_.data() + WeightOffset(l);
    const double* b = params_.data() + BiasOffset(l);
    const std::vector<double>& x = acts.back();
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) s += row[i] * x[i];
      z[o] = (l + 1 < num_layers()) ? std::max(s, 0.0) : s;
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

std::vector<double> DenseApproximator::Forward(
    std::span<const double> input) const {
  return std::move(Activations(input).back());
}

double DenseApproximator::Loss(std::span<const RegressionSample> batch) const {
  Check(!batch.empty(), ErrorCategory::kInvalidArgument, "empty batch");
  double total = 0.0;
  for (const RegressionSample& s : batch) {
    const double err = Forward(s.features)[s.output] - s.target;
    total += err * err;
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> DenseApproximator::Gradient(
    std::span<const RegressionSample> batch) const {
  Check(!batch.empty(), ErrorCategory::kInvalidArgument, "empty batch");
  std::vector<double> grad(params_.size(), 0.0);
  const double scale = 2.0 / static_cast<double>(batch.size());
  for (const RegressionSample& s : batch) {
    Check(s.output >= 0 && s.output < output_size(),
          ErrorCategory::kInvalidArgument, "output index out of range");
    const auto acts = Activations(s.features);
    // delta holds dLoss/dz for the current layer's pre-activations.
    std::vector<double> delta(output_size(), 0.0);
    delta[s.output] = scale * (acts.back()[s.output] - s.target);
    for (int l = num_layers() - 1; l >= 0; --l) {
      const int in = layer_sizes_[l];
      const int out = layer_sizes_[l + 1];
      const std::vector<double>& x = acts[l];
      double* gw = grad.data() + WeightOffset(l);
      double* gb = grad.data() + BiasOffset(l);
      for (int o = 0; o < out; ++o) {
        if (delta[o] == 0.0) continue;
        gb[o] += delta[o];
        double* row = gw + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) row[i] += delta[o] * x[i];
      }
      if (l == 0) break;
      const double* w = params_.data() + WeightOffset(l);
      std::vector<double> below(in, 0.0);
      for (int o = 0; o < out; ++o) {
        if (delta[o] == 0.0) continue;
        const double* row = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) below[i] += delta[o] * row[i];
      }
      // Rectifier derivative; x is the post-activation of layer l - 1.
      for (int i = 0; i < in; ++i) {
        if (x[i] <= 0.0) below[i] = 0.0;
      }
      delta = std::move(below);
    }
  }
  return grad;
}

double DenseApproximator::Update(std::span<const RegressionSample> batch,
                                 double learning_rate, double clip_norm) {
  const double loss = Loss(batch);
  Check(std::isfinite(loss), ErrorCategory::kTrainingDivergence,
        "non-finite loss");
  std::vector<double> grad = Gradient(batch);
  double norm2 = 0.0;
  for (double g : grad) norm2 += g * g;
  Check(std::isfinite(norm2), ErrorCategory::kTrainingDivergence,
        "non-finite gradient");
  double scale = learning_rate;
  const double norm = std::sqrt(norm2);
  if (clip_norm > 0.0 && norm > clip_norm) scale *= clip_norm / norm;
  if (scale == 0.0) return loss;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i] -= scale * grad[i];
    Check(std::isfinite(params_[i]), ErrorCategory::kTrainingDivergence,
          "non-finite parameter after update");
  }
  return loss;
}

// --- ReplayBuffer -----------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  Check(capacity > 0, ErrorCategory::kInvalidArgument,
        "replay capacity must be positive");
}

void ReplayBuffer::Push(Transition t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::optional<std::vector<Transition>> ReplayBuffer::Sample(
    std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0 || items_.size() < batch_size) return std::nullopt;
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Transition> out;
  out.reserve(batch_size);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(
                rng.UniformInt(static_cast<int>(idx.size() - i)));
    std::swap(idx[i], idx[j]);
    out.push_back(items_[idx[i]]);
  }
  return out;
}

// --- TabularQ ---------------------------------------------------------------

TabularQ::TabularQ(QTable table, StepSizeRule rule, double constant_alpha)
    : table_(std::move(table)), rule_(rule), constant_alpha_(constant_alpha) {
  Check(constant_alpha >= 0.0 && constant_alpha <= 1.0,
        ErrorCategory::kInvalidArgument, "alpha must be in [0, 1]");
  visits_.assign(table_.values().size(), 0);
}

Matrix TabularQ::QMatrix(const Observation& state) const {
  return table_.QMatrix(state.index);
}

std::uint32_t TabularQ::visits(std::int64_t state, int a1, int a2) const {
  const std::size_t off =
      (static_cast<std::size_t>(state) * table_.num_actions1() + a1) *
          table_.num_actions2() +
      a2;
  return visits_[off];
}

double TabularQ::StepSize(std::int64_t state, int a1, int a2) const {
  if (rule_ == StepSizeRule::kConstant) return constant_alpha_;
  return 1.0 / (1.0 + static_cast<double>(visits(state, a1, a2)));
}

void TabularQ::Fit(std::span<const QSample> batch) {
  for (const QSample& s : batch) {
    const std::int64_t state = s.state->index;
    table_.Update(state, s.a1, s.a2, s.target, StepSize(state, s.a1, s.a2));
    const std::size_t off =
        (static_cast<std::size_t>(state) * table_.num_actions1() + s.a1) *
            table_.num_actions2() +
        s.a2;
    ++visits_[off];
  }
}

std::unique_ptr<QFunction> TabularQ::Clone() const {
  return std::make_unique<TabularQ>(*this);
}

// --- ApproximatorQ ----------------------------------------------------------

ApproximatorQ::ApproximatorQ(DenseApproximator net, int num_actions1,
                             int num_actions2, ApproximatorOptions options)
    : online_(net),
      target_(std::move(net)),
      num_actions1_(num_actions1),
      num_actions2_(num_actions2),
      options_(options) {
  Check(online_.output_size() == num_actions1 * num_actions2,
        ErrorCategory::kInvalidArgument,
        "network output size must equal the joint action count");
  Check(options.target_refresh >= 1, ErrorCategory::kInvalidArgument,
        "target_refresh must be >= 1");
}

Matrix ApproximatorQ::ToMatrix(const std::vector<double>& flat) const {
  return Matrix(num_actions1_, num_actions2_, flat);
}

Matrix ApproximatorQ::QMatrix(const Observation& state) const {
  return ToMatrix(online_.Forward(state.features));
}

Matrix ApproximatorQ::BootstrapMatrix(const Observation& state) const {
  return ToMatrix(target_.Forward(state.features));
}

void ApproximatorQ::Fit(std::span<const QSample> batch) {
  std::vector<RegressionSample> samples;
  samples.reserve(batch.size());
  for (const QSample& s : batch) {
    samples.push_back(RegressionSample{s.state->features,
                                       s.a1 * num_actions2_ + s.a2, s.target});
  }
  last_loss_ =
      online_.Update(samples, options_.learning_rate, options_.clip_norm);
  ++fit_calls_;
  if (fit_calls_ % options_.target_refresh == 0) target_ = online_;
}

std::unique_ptr<QFunction> ApproximatorQ::Clone() const {
  return std::make_unique<ApproximatorQ>(*this);
}

}  // namespace coopmarl
