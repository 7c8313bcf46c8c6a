// Copyright 2026 The ssmtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent numerical references built on Eigen only.

#ifndef SSMTRAJ_TESTS_ORACLES_HPP_
#define SSMTRAJ_TESTS_ORACLES_HPP_

#include "ssmtraj/numcore/tensor.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace ssmtraj::testing
{

inline Eigen::MatrixXd to_matrix(const numcore::Tensor & t)
{
  Eigen::MatrixXd m(t.dim(0), t.dim(1));
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    for (std::size_t j = 0; j < t.dim(1); ++j) {
      m(i, j) = t.at(i, j);
    }
  }
  return m;
}

inline double max_abs_diff(const numcore::Tensor & t, const Eigen::MatrixXd & m)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    for (std::size_t j = 0; j < t.dim(1); ++j) {
      worst = std::max(worst, std::abs(t.at(i, j) - m(i, j)));
    }
  }
  return worst;
}

/**
 * exp(d A) by Eigen's Pade implementation and int_0^d exp(s A) ds B by
 * composite 5-point Gauss-Legendre quadrature over 32 panels.
 */
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_reference(
  const numcore::Tensor & a_t, const numcore::Tensor & b_t, double delta)
{
  const Eigen::MatrixXd a = to_matrix(a_t);
  const Eigen::MatrixXd b = to_matrix(b_t);
  const Eigen::MatrixXd a_bar = (a * delta).exp();
  static const double nodes[5] = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static const double weights[5] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};
  const int panels = 32;
  const double h = delta / panels;
  Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int q = 0; q < 5; ++q) {
      const double s = mid + 0.5 * h * nodes[q];
      integral += 0.5 * h * weights[q] * (a * s).exp();
    }
  }
  return {a_bar, integral * b};
}

/**
 * y_t = C_t sum_{k<=t} (A_t ... A_{k+1}) B_k x_k, evaluated term by term.
 * Shapes as for selective_scan. Returns y row-major [T, P].
 */
inline std::vector<double> expanded_scan(
  const numcore::Tensor & x, const numcore::Tensor & a, const numcore::Tensor & b,
  const numcore::Tensor & c)
{
  const std::size_t steps = x.dim(0);
  const std::size_t m = x.dim(1);
  const std::size_t n = a.dim(1);
  const std::size_t p = c.dim(1);
  auto mat = [](const numcore::Tensor & t, std::size_t k) {
    Eigen::MatrixXd out(t.dim(1), t.dim(2));
    for (std::size_t i = 0; i < t.dim(1); ++i) {
      for (std::size_t j = 0; j < t.dim(2); ++j) {
        out(i, j) = t.at(k, i, j);
      }
    }
    return out;
  };
  std::vector<double> y(steps * p);
  for (std::size_t t = 0; t < steps; ++t) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k <= t; ++k) {
      Eigen::VectorXd xk(m);
      for (std::size_t j = 0; j < m; ++j) {
        xk(j) = x.at(k, j);
      }
      Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
      for (std::size_t j = k + 1; j <= t; ++j) {
        prod = mat(a, j) * prod;
      }
      h += prod * mat(b, k) * xk;
    }
    const Eigen::VectorXd yt = mat(c, t) * h;
    for (std::size_t i = 0; i < p; ++i) {
      y[t * p + i] = yt(i);
    }
  }
  return y;
}

}  // namespace ssmtraj::testing

#endif  // SSMTRAJ_TESTS_ORACLES_HPP_
