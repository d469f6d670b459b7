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

#include "jumpgame/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jumpgame {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double check_saddle(const Matrix& payoff, std::span<const double> lambda,
                    std::span<const double> mu) {
  if (lambda.size() != payoff.rows() || mu.size() != payoff.cols()) {
    throw std::invalid_argument("check_saddle: strategy dimensions do not match the matrix");
  }
  const std::size_t p = payoff.rows();
  const std::size_t q = payoff.cols();

  std::vector<double> row_payoff(p, 0.0);  // e_i' M mu
  std::vector<double> col_payoff(q, 0.0);  // lambda' M e_j
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      row_payoff[i] += payoff(i, j) * mu[j];
      col_payoff[j] += lambda[i] * payoff(i, j);
    }
  }
  double value = 0.0;
  for (std::size_t i = 0; i < p; ++i) value += lambda[i] * row_payoff[i];

  const double best_row = *std::max_element(row_payoff.begin(), row_payoff.end());
  const double best_col = *std::min_element(col_payoff.begin(), col_payoff.end());
  return std::max({0.0, best_row - value, value - best_col});
}

namespace {

MatrixGameSolution finish(const Matrix& payoff, std::vector<double> lambda,
                          std::vector<double> mu) {
  MatrixGameSolution sol;
  sol.lambda = std::move(lambda);
  sol.mu = std::move(mu);
  double value = 0.0;
  for (std::size_t i = 0; i < payoff.rows(); ++i) {
    for (std::size_t j = 0; j < payoff.cols(); ++j) {
      value += sol.lambda[i] * payoff(i, j) * sol.mu[j];
    }
  }
  sol.value = value;
  sol.residual = check_saddle(payoff, sol.lambda, sol.mu);
  return sol;
}

// Pure saddle point: max_i min_j M == min_j max_i M. Returns false when the
// game has none.
bool try_pure_saddle(const Matrix& payoff, MatrixGameSolution& out) {
  const std::size_t p = payoff.rows();
  const std::size_t q = payoff.cols();
  std::size_t best_row = 0;
  double maximin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < q; ++j) lo = std::min(lo, payoff(i, j));
    if (lo > maximin) {
      maximin = lo;
      best_row = i;
    }
  }
  std::size_t best_col = 0;
  double minimax = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < q; ++j) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) hi = std::max(hi, payoff(i, j));
    if (hi < minimax) {
      minimax = hi;
      best_col = j;
    }
  }
  if (maximin != minimax) return false;
  std::vector<double> lambda(p, 0.0);
  std::vector<double> mu(q, 0.0);
  lambda[best_row] = 1.0;
  mu[best_col] = 1.0;
  out = finish(payoff, std::move(lambda), std::move(mu));
  return true;
}

void normalize(std::vector<double>& v) {
  double sum = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace

MatrixGameSolution solve_matrix_game(const Matrix& payoff, double tol) {
  const std::size_t p = payoff.rows();
  const std::size_t q = payoff.cols();
  if (p == 0 || q == 0) throw std::invalid_argument("matrix game must be at least 1x1");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      const double v = payoff(i, j);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("matrix game has a non-finite entry at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  MatrixGameSolution sol;
  if (try_pure_saddle(payoff, sol)) return sol;

  // Shift to entries >= 1 and solve  max 1'y  s.t.  A y <= 1, y >= 0.
  // Column player: mu = y / sum(y). Row player: lambda from the dual prices.
  const double shift = 1.0 - lo;
  const double scale = hi + shift;
  const double eps = 1e-13 * scale;
  const std::size_t width = q + p;
  const std::size_t stride = width + 1;

  std::vector<double> tab(p * stride, 0.0);
  std::vector<double> obj(stride, 0.0);
  std::vector<std::size_t> basis(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) tab[i * stride + j] = payoff(i, j) + shift;
    tab[i * stride + q + i] = 1.0;
    tab[i * stride + width] = 1.0;
    basis[i] = q + i;
  }
  for (std::size_t j = 0; j < q; ++j) obj[j] = 1.0;

  // Bland's rule terminates; the cap only guards against a numerical cycle.
  const std::size_t max_pivots = 50 * (p + q) * (p + q) + 100;
  std::size_t pivots = 0;
  for (;; ++pivots) {
    if (pivots > max_pivots) throw std::runtime_error("matrix game simplex did not terminate");
    std::size_t enter = width;
    for (std::size_t j = 0; j < width; ++j) {
      if (obj[j] > eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = p;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) {
      const double a = tab[i * stride + enter];
      if (a <= eps) continue;
      const double ratio = tab[i * stride + width] / a;
      if (leave == p || ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 && basis[i] < basis[leave])) {
        best_ratio = std::min(best_ratio, ratio);
        leave = i;
      }
    }
    if (leave == p) throw std::runtime_error("matrix game LP unbounded (unreachable for shifted payoffs)");

    double* prow = &tab[leave * stride];
    const double piv = prow[enter];
    for (std::size_t j = 0; j < stride; ++j) prow[j] /= piv;
    for (std::size_t i = 0; i < p; ++i) {
      if (i == leave) continue;
      double* row = &tab[i * stride];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < stride; ++j) row[j] -= f * prow[j];
    }
    const double f = obj[enter];
    for (std::size_t j = 0; j < stride; ++j) obj[j] -= f * prow[j];
    basis[leave] = enter;
  }

  std::vector<double> mu(q, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    if (basis[i] < q) mu[basis[i]] = tab[i * stride + width];
  }
  std::vector<double> lambda(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) lambda[i] = -obj[q + i];
  normalize(mu);
  normalize(lambda);

  sol = finish(payoff, std::move(lambda), std::move(mu));
  if (!(sol.residual <= tol)) {
    throw std::runtime_error("matrix game solve reached residual " +
                             std::to_string(sol.residual) + " above tolerance");
  }
  return sol;
}

}  // namespace jumpgame
