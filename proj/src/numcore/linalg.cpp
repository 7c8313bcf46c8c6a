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

#include "ssmtraj/numcore/linalg.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace ssmtraj::numcore
{

namespace
{

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kTaylorDegree = 18;
constexpr double kScaledNormTarget = 0.5;

RowMat to_eigen(const Tensor & m)
{
  return Eigen::Map<const RowMat>(m.values().data(), m.dim(0), m.dim(1));
}

void require_square(const Tensor & m, const char * what)
{
  if (m.rank() != 2 || m.dim(0) != m.dim(1)) {
    throw ContractViolation(std::string(what) + " expects a square matrix, got " +
                            shape_to_string(m.shape()));
  }
}

}  // namespace

Tensor matexp(const Tensor & m)
{
  require_square(m, "matexp");
  require(m.all_finite(), "matexp input must be finite");
  const std::size_t n = m.dim(0);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += std::abs(m.at(i, j));
    }
    norm = std::max(norm, row);
  }
  int squarings = 0;
  if (norm > kScaledNormTarget) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormTarget)));
  }
  const Tensor scaled = m * std::ldexp(1.0, -squarings);
  const Tensor identity = Tensor::eye(n);
  // Horner form: I + A(I + A/2(I + A/3(...))).
  Tensor e = identity;
  for (int k = kTaylorDegree; k >= 1; --k) {
    e = identity + matmul(scaled, e) * (1.0 / k);
  }
  for (int s = 0; s < squarings; ++s) {
    e = matmul(e, e);
  }
  return e;
}

CholeskyResult cholesky_logdet(const Tensor & p)
{
  require_square(p, "cholesky_logdet");
  if (asymmetry(p) > kSymmetryTolerance) {
    throw ContractViolation("cholesky_logdet expects a symmetric matrix");
  }
  const std::size_t n = p.dim(0);
  const RowMat base = to_eigen(p);
  double jitter = 0.0;
  while (true) {
    RowMat shifted = base;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<RowMat> llt(shifted);
    if (llt.info() == Eigen::Success) {
      const RowMat l = llt.matrixL();
      bool ok = true;
      double logdet = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (!(d > 0.0) || !std::isfinite(d)) {
          ok = false;
          break;
        }
        logdet += 2.0 * std::log(d);
      }
      if (ok) {
        std::vector<double> values(l.data(), l.data() + l.size());
        return {Tensor({n, n}, std::move(values)), logdet, jitter};
      }
    }
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
    if (jitter > kJitterMax * (1.0 + 1e-12)) {
      throw DecompositionError("matrix is not positive definite after maximum jitter");
    }
  }
}

std::vector<double> cholesky_solve(const Tensor & factor, const std::vector<double> & b)
{
  require_square(factor, "cholesky_solve");
  require(b.size() == factor.dim(0), "cholesky_solve right-hand side has the wrong length");
  const RowMat l = to_eigen(factor);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  l.triangularView<Eigen::Lower>().solveInPlace(x);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> symmetric_eigenvalues(const Tensor & p)
{
  require_square(p, "symmetric_eigenvalues");
  Eigen::SelfAdjointEigenSolver<RowMat> solver(to_eigen(p), Eigen::EigenvaluesOnly);
  const auto & ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double asymmetry(const Tensor & p)
{
  require_square(p, "asymmetry");
  double worst = 0.0;
  for (std::size_t i = 0; i < p.dim(0); ++i) {
    for (std::size_t j = i + 1; j < p.dim(0); ++j) {
      worst = std::max(worst, std::abs(p.at(i, j) - p.at(j, i)));
    }
  }
  return worst;
}

}  // namespace ssmtraj::numcore
