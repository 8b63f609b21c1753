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

#ifndef COOPMARL_MATRIX_H_
#define COOPMARL_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace coopmarl {

// Dense row-major matrix of doubles. Payoff matrices and Q-value slices are
// at most a few hundred entries, so this stays deliberately plain.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Matrix(int rows, int cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(int r, int c) const { return data_[Offset(r, c)]; }
  double& operator()(int r, int c) { return data_[Offset(r, c)]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(int r) const {
    return std::span<const double>(data_).subspan(Offset(r, 0), cols_);
  }

  Matrix Transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t Offset(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace coopmarl

#endif  // COOPMARL_MATRIX_H_
