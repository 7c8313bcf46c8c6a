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

#include "ssmtraj/numcore/tensor.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace ssmtraj::numcore
{

namespace detail
{

struct Node
{
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad{false};
  bool leaf{true};
  std::vector<Tensor> inputs;
  BackwardFn backward;
};

}  // namespace detail

namespace
{

thread_local bool g_grad_enabled = true;

}  // namespace

std::size_t shape_numel(const Shape & shape)
{
  std::size_t n = 1;
  for (const auto extent : shape) {
    n *= extent;
  }
  return n;
}

std::string shape_to_string(const Shape & shape)
{
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    out << (i ? "," : "") << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
{
  for (const auto extent : shape) {
    require(extent > 0, "tensor extents must be positive");
  }
  if (values.size() != shape_numel(shape)) {
    throw ContractViolation(
      "value count " + std::to_string(values.size()) + " does not match shape " +
      shape_to_string(shape));
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad)
{
  const auto n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::ones(Shape shape) { return full(std::move(shape), 1.0); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad)
{
  const auto n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad)
{
  return Tensor({1}, {value}, requires_grad);
}

Tensor Tensor::eye(std::size_t n)
{
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i * n + i] = 1.0;
  }
  return Tensor({n, n}, std::move(v));
}

Tensor Tensor::vector(std::initializer_list<double> values, bool requires_grad)
{
  return Tensor({values.size()}, std::vector<double>(values), requires_grad);
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows, bool requires_grad)
{
  require(rows.size() > 0, "matrix literal needs at least one row");
  const std::size_t cols = rows.begin()->size();
  std::vector<double> v;
  v.reserve(rows.size() * cols);
  for (const auto & row : rows) {
    require(row.size() == cols, "ragged matrix literal");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Tensor({rows.size(), cols}, std::move(v), requires_grad);
}

detail::Node & Tensor::node() const
{
  require(defined(), "use of an undefined tensor");
  return *node_;
}

const Shape & Tensor::shape() const { return node().shape; }

std::size_t Tensor::dim(std::size_t axis) const
{
  const auto & s = shape();
  require(axis < s.size(), "axis out of range");
  return s[axis];
}

std::size_t Tensor::numel() const { return node().value.size(); }

std::span<const double> Tensor::values() const { return node().value; }

double Tensor::item() const
{
  require(numel() == 1, "item() requires a single-element tensor");
  return node().value[0];
}

double Tensor::at(std::size_t row, std::size_t col) const
{
  const auto & s = shape();
  require(s.size() == 2 && row < s[0] && col < s[1], "at(i,j) out of range");
  return node().value[row * s[1] + col];
}

double Tensor::at(std::size_t i, std::size_t j, std::size_t k) const
{
  const auto & s = shape();
  require(s.size() == 3 && i < s[0] && j < s[1] && k < s[2], "at(i,j,k) out of range");
  return node().value[(i * s[1] + j) * s[2] + k];
}

bool Tensor::requires_grad() const { return node().requires_grad; }

bool Tensor::is_leaf() const { return node().leaf; }

bool Tensor::has_grad() const { return !node().grad.empty(); }

std::span<const double> Tensor::grad() const { return node().grad; }

void Tensor::zero_grad() { node().grad.clear(); }

std::span<double> Tensor::mutable_values()
{
  require(is_leaf(), "only leaf tensors may be mutated");
  return node().value;
}

Tensor Tensor::detach() const { return Tensor(shape(), node().value, false); }

Tensor Tensor::clone(bool requires_grad) const
{
  return Tensor(shape(), node().value, requires_grad);
}

bool Tensor::all_finite() const
{
  const auto & v = node().value;
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

GradContext::GradContext(const detail::Node & output, std::span<const Tensor> inputs)
: output_(output), inputs_(inputs)
{
}

std::span<const double> GradContext::out_grad() const { return output_.grad; }

std::span<const double> GradContext::out_value() const { return output_.value; }

bool GradContext::needs_grad(std::size_t i) const { return inputs_[i].node().requires_grad; }

std::span<double> GradContext::input_grad(std::size_t i)
{
  auto & node = inputs_[i].node();
  if (!node.requires_grad) {
    return {};
  }
  if (node.grad.size() != node.value.size()) {
    node.grad.assign(node.value.size(), 0.0);
  }
  return node.grad;
}

Tensor record_op(Shape shape, std::vector<double> values, std::vector<Tensor> inputs, BackwardFn fn)
{
  bool tracked = false;
  if (g_grad_enabled) {
    for (const auto & input : inputs) {
      if (input.node().requires_grad) {
        tracked = true;
        break;
      }
    }
  }
  if (values.size() != shape_numel(shape)) {
    throw ContractViolation("operation produced values inconsistent with " + shape_to_string(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  if (tracked) {
    node->requires_grad = true;
    node->leaf = false;
    node->inputs = std::move(inputs);
    node->backward = std::move(fn);
  }
  return Tensor(std::move(node));
}

void backward(const Tensor & loss)
{
  require(loss.defined(), "backward() on an undefined tensor");
  require(loss.numel() == 1, "backward() requires a scalar loss");
  require(loss.requires_grad(), "backward() requires a loss built from tracked tensors");

  // Iterative post-order DFS; state 1 = on stack, 2 = finished.
  std::vector<detail::Node *> order;
  std::unordered_map<detail::Node *, int> state;
  std::vector<std::pair<detail::Node *, std::size_t>> stack;
  stack.emplace_back(&loss.node(), 0);
  state[&loss.node()] = 1;
  while (!stack.empty()) {
    auto & [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node * child = &node->inputs[next].node();
      ++next;
      if (!child->requires_grad) {
        continue;
      }
      auto it = state.find(child);
      if (it == state.end()) {
        state[child] = 1;
        stack.emplace_back(child, 0);
      } else if (it->second == 1) {
        throw ContractViolation("cycle detected in the computation graph");
      }
    } else {
      state[node] = 2;
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (auto * node : order) {
    if (!node->leaf) {
      node->grad.assign(node->value.size(), 0.0);
    } else if (node->grad.size() != node->value.size()) {
      node->grad.assign(node->value.size(), 0.0);
    }
  }
  order.back()->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node * node = *it;
    if (node->leaf || !node->backward) {
      continue;
    }
    GradContext ctx(*node, node->inputs);
    node->backward(ctx);
  }

  for (auto * node : order) {
    if (!node->leaf) {
      std::vector<double>().swap(node->grad);
    }
  }
}

bool grad_enabled() noexcept { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

}  // namespace ssmtraj::numcore
