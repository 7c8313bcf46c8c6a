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

#ifndef SSMTRAJ_NUMCORE_TENSOR_HPP_
#define SSMTRAJ_NUMCORE_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ssmtraj::numcore
{

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape & shape);
std::string shape_to_string(const Shape & shape);

class Tensor;
class GradContext;

/// Propagates the output gradient of one recorded operation into its inputs.
using BackwardFn = std::function<void(GradContext &)>;

namespace detail
{
struct Node;
}  // namespace detail

/**
 * Dense row-major array of doubles with optional gradient tracking.
 *
 * A Tensor is a cheap shared handle. Values are immutable once created, with
 * two exceptions reserved for leaves: the optimizer and the checkpoint loader
 * write through `mutable_values()`, and `backward()` accumulates into `grad()`.
 * Operations on tracked inputs record themselves so that `backward()` can walk
 * the resulting graph in reverse topological order.
 */
class Tensor
{
public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor ones(Shape shape);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor eye(std::size_t n);
  static Tensor vector(std::initializer_list<double> values, bool requires_grad = false);
  static Tensor matrix(
    std::initializer_list<std::initializer_list<double>> rows, bool requires_grad = false);

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Shape & shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  double item() const;
  double operator[](std::size_t flat_index) const { return values()[flat_index]; }
  double at(std::size_t row, std::size_t col) const;
  double at(std::size_t i, std::size_t j, std::size_t k) const;

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  /// Accumulated gradient; empty when nothing has been accumulated yet.
  std::span<const double> grad() const;
  void zero_grad();

  /// Writable storage. Only leaves may be mutated.
  std::span<double> mutable_values();

  /// Same values, new untracked leaf.
  Tensor detach() const;
  /// Deep copy as a leaf with the given tracking flag.
  Tensor clone(bool requires_grad) const;

  bool all_finite() const;

private:
  friend class GradContext;
  friend Tensor record_op(Shape, std::vector<double>, std::vector<Tensor>, BackwardFn);
  friend void backward(const Tensor &);

  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  detail::Node & node() const;

  std::shared_ptr<detail::Node> node_;
};

/// View handed to a BackwardFn: the output's value and gradient plus lazily
/// allocated gradient buffers for the inputs that require them.
class GradContext
{
public:
  GradContext(const detail::Node & output, std::span<const Tensor> inputs);

  std::span<const double> out_grad() const;
  std::span<const double> out_value() const;
  const Tensor & input(std::size_t i) const { return inputs_[i]; }
  bool needs_grad(std::size_t i) const;
  /// Gradient buffer of input i, or an empty span if it is not tracked.
  std::span<double> input_grad(std::size_t i);

private:
  const detail::Node & output_;
  std::span<const Tensor> inputs_;
};

/**
 * Creates the output of an operation. When gradients are enabled and any input
 * is tracked, the output keeps its inputs and `fn`; otherwise it is an
 * untracked leaf and `fn` is discarded.
 */
Tensor record_op(Shape shape, std::vector<double> values, std::vector<Tensor> inputs, BackwardFn fn);

/**
 * Reverse-mode sweep from a scalar loss. Every tracked leaf reachable from
 * `loss` receives dLoss/dLeaf added to its existing gradient.
 */
void backward(const Tensor & loss);

/// True unless a NoGradGuard is alive on this thread.
bool grad_enabled() noexcept;

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard
{
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard & operator=(const NoGradGuard &) = delete;

private:
  bool previous_;
};

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_TENSOR_HPP_
