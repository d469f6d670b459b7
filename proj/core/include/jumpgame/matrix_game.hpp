// Copyright 2026 The jumpgame Authors
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

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace jumpgame {

inline constexpr double kDefaultMatrixTolerance = 1e-9;

// Dense row-major matrix. Rows are maximizer actions, columns minimizer
// actions.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> lambda;  // maximizer (rows)
  std::vector<double> mu;      // minimizer (columns)
  double residual = 0.0;
};

// Value and one pair of optimal mixed strategies. Optimal strategies are not
// unique in general; the returned pair is fixed by Bland's pivoting order, so
// callers should compare residuals rather than strategies.
//
// Throws std::invalid_argument on an empty or non-finite matrix and
// std::runtime_error if the saddle residual exceeds `tol`.
MatrixGameSolution solve_matrix_game(const Matrix& payoff,
                                     double tol = kDefaultMatrixTolerance);

// Largest gain either player can obtain by a pure deviation from
// (lambda, mu), clamped below at zero.
double check_saddle(const Matrix& payoff, std::span<const double> lambda,
                    std::span<const double> mu);

}  // namespace jumpgame
