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

#include "ssmtraj/numcore/ops.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

namespace ssmtraj::numcore
{

namespace
{

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

/// Index mapping from an output element of a broadcast binary op to the
/// contributing elements of each operand.
class Broadcast
{
public:
  Broadcast(const Shape & a, const Shape & b)
  {
    const std::size_t rank = std::max(a.size(), b.size());
    out_.assign(rank, 1);
    for (std::size_t i = 0; i < rank; ++i) {
      const std::size_t ea = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
      const std::size_t eb = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
      if (ea != eb && ea != 1 && eb != 1) {
        throw ContractViolation(
          "shapes " + shape_to_string(a) + " and " + shape_to_string(b) + " do not broadcast");
      }
      out_[i] = std::max(ea, eb);
    }
    an_ = shape_numel(a);
    bn_ = shape_numel(b);
    const std::size_t n = shape_numel(out_);
    if (an_ == n && bn_ == n) {
      mode_ = Mode::Same;
    } else if (bn_ == 1 && an_ == n) {
      mode_ = Mode::ScalarB;
    } else if (an_ == 1 && bn_ == n) {
      mode_ = Mode::ScalarA;
    } else if (an_ == n && is_suffix(b)) {
      mode_ = Mode::SuffixB;
    } else if (bn_ == n && is_suffix(a)) {
      mode_ = Mode::SuffixA;
    } else {
      mode_ = Mode::General;
      build_maps(a, b);
    }
  }

  const Shape & out_shape() const { return out_; }

  std::size_t a_index(std::size_t i) const
  {
    switch (mode_) {
      case Mode::Same:
      case Mode::ScalarB:
      case Mode::SuffixB:
        return i;
      case Mode::ScalarA:
        return 0;
      case Mode::SuffixA:
        return i % an_;
      case Mode::General:
        return (*amap_)[i];
    }
    return 0;
  }

  std::size_t b_index(std::size_t i) const
  {
    switch (mode_) {
      case Mode::Same:
      case Mode::ScalarA:
      case Mode::SuffixA:
        return i;
      case Mode::ScalarB:
        return 0;
      case Mode::SuffixB:
        return i % bn_;
      case Mode::General:
        return (*bmap_)[i];
    }
    return 0;
  }

private:
  enum class Mode { Same, ScalarA, ScalarB, SuffixA, SuffixB, General };

  bool is_suffix(const Shape & s) const
  {
    // s (after dropping leading ones) must equal the trailing extents of out_.
    std::size_t first = 0;
    while (first < s.size() && s[first] == 1) {
      ++first;
    }
    const std::size_t len = s.size() - first;
    if (len > out_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (s[first + i] != out_[out_.size() - len + i]) {
        return false;
      }
    }
    return true;
  }

  void build_maps(const Shape & a, const Shape & b)
  {
    const std::size_t rank = out_.size();
    auto strides_for = [&](const Shape & s) {
      std::vector<std::size_t> st(rank, 0);
      std::size_t acc = 1;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const std::size_t axis = s.size() - 1 - k;
        const std::size_t oaxis = rank - 1 - k;
        st[oaxis] = s[axis] == 1 ? 0 : acc;
        acc *= s[axis];
      }
      return st;
    };
    const auto sa = strides_for(a);
    const auto sb = strides_for(b);
    const std::size_t n = shape_numel(out_);
    amap_ = std::make_shared<std::vector<std::size_t>>(n);
    bmap_ = std::make_shared<std::vector<std::size_t>>(n);
    std::vector<std::size_t> idx(rank, 0);
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t i = 0; i < n; ++i) {
      (*amap_)[i] = ia;
      (*bmap_)[i] = ib;
      for (std::size_t d = rank; d-- > 0;) {
        ++idx[d];
        ia += sa[d];
        ib += sb[d];
        if (idx[d] < out_[d]) {
          break;
        }
        ia -= sa[d] * idx[d];
        ib -= sb[d] * idx[d];
        idx[d] = 0;
      }
    }
  }

  Shape out_;
  std::size_t an_{0};
  std::size_t bn_{0};
  Mode mode_{Mode::Same};
  std::shared_ptr<std::vector<std::size_t>> amap_;
  std::shared_ptr<std::vector<std::size_t>> bmap_;
};

/// Generic broadcast binary op. `dfa(x, y, z)` and `dfb(x, y, z)` are the
/// partial derivatives of z = f(x, y).
template <class F, class DA, class DB>
Tensor binary(const Tensor & a, const Tensor & b, F f, DA dfa, DB dfb)
{
  auto bc = std::make_shared<Broadcast>(a.shape(), b.shape());
  const std::size_t n = shape_numel(bc->out_shape());
  std::vector<double> out(n);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = f(av[bc->a_index(i)], bv[bc->b_index(i)]);
  }
  return record_op(bc->out_shape(), std::move(out), {a, b}, [bc, dfa, dfb](GradContext & ctx) {
    const auto g = ctx.out_grad();
    const auto z = ctx.out_value();
    const auto x = ctx.input(0).values();
    const auto y = ctx.input(1).values();
    auto ga = ctx.input_grad(0);
    auto gb = ctx.input_grad(1);
    const std::size_t count = g.size();
    if (!ga.empty()) {
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t ia = bc->a_index(i);
        ga[ia] += g[i] * dfa(x[ia], y[bc->b_index(i)], z[i]);
      }
    }
    if (!gb.empty()) {
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t ib = bc->b_index(i);
        gb[ib] += g[i] * dfb(x[bc->a_index(i)], y[ib], z[i]);
      }
    }
  });
}

/// Generic unary op; `df(x, y)` is dy/dx given input x and output y.
template <class F, class DF>
Tensor unary(const Tensor & a, F f, DF df)
{
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = f(av[i]);
  }
  return record_op(a.shape(), std::move(out), {a}, [df](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    const auto x = ctx.input(0).values();
    const auto y = ctx.out_value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * df(x[i], y[i]);
    }
  });
}

struct AxisSplit
{
  std::size_t outer;
  std::size_t extent;
  std::size_t inner;
};

AxisSplit split_axis(const Shape & s, std::size_t axis)
{
  require(axis < s.size(), "axis out of range");
  AxisSplit r{1, s[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) {
    r.outer *= s[i];
  }
  for (std::size_t i = axis + 1; i < s.size(); ++i) {
    r.inner *= s[i];
  }
  return r;
}

double stable_softplus(double x)
{
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double stable_sigmoid(double x)
{
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor operator+(const Tensor & a, const Tensor & b)
{
  return binary(
    a, b, [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
    [](double, double, double) { return 1.0; });
}

Tensor operator-(const Tensor & a, const Tensor & b)
{
  return binary(
    a, b, [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
    [](double, double, double) { return -1.0; });
}

Tensor operator*(const Tensor & a, const Tensor & b)
{
  return binary(
    a, b, [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
    [](double x, double, double) { return x; });
}

Tensor operator/(const Tensor & a, const Tensor & b)
{
  return binary(
    a, b, [](double x, double y) { return x / y; },
    [](double, double y, double) { return 1.0 / y; },
    [](double, double y, double z) { return -z / y; });
}

Tensor operator-(const Tensor & a) { return a * -1.0; }

Tensor operator+(const Tensor & a, double s)
{
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor operator+(double s, const Tensor & a) { return a + s; }

Tensor operator-(const Tensor & a, double s) { return a + (-s); }

Tensor operator-(double s, const Tensor & a)
{
  return unary(a, [s](double x) { return s - x; }, [](double, double) { return -1.0; });
}

Tensor operator*(const Tensor & a, double s)
{
  return unary(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor operator*(double s, const Tensor & a) { return a * s; }

Tensor operator/(const Tensor & a, double s) { return a * (1.0 / s); }

Tensor exp(const Tensor & a)
{
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor & a)
{
  return unary(
    a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor tanh(const Tensor & a)
{
  return unary(
    a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor & a)
{
  return unary(a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor silu(const Tensor & a)
{
  return unary(
    a, [](double x) { return x * stable_sigmoid(x); },
    [](double x, double) {
      const double s = stable_sigmoid(x);
      return s * (1.0 + x * (1.0 - s));
    });
}

Tensor softplus(const Tensor & a)
{
  return unary(a, stable_softplus, [](double x, double) { return stable_sigmoid(x); });
}

Tensor leaky_relu(const Tensor & a, double negative_slope)
{
  return unary(
    a, [negative_slope](double x) { return x > 0.0 ? x : negative_slope * x; },
    [negative_slope](double x, double) { return x > 0.0 ? 1.0 : negative_slope; });
}

Tensor square(const Tensor & a)
{
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sqrt(const Tensor & a)
{
  return unary(
    a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

namespace
{

// out = a * b with every entry accumulated over k in ascending order, so a row
// of the result does not depend on how many other rows are in the product.
// Eigen's blocked kernels do not give that guarantee, and causal sequence
// models need it for prefix-exact outputs.
void gemm_fixed_order(
  const double * a, const double * b, double * out, std::size_t m, std::size_t k, std::size_t n)
{
  std::fill(out, out + m * n, 0.0);
  // four output rows share each row of b; every entry still sums p in order
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    double * __restrict o0 = out + i * n;
    double * __restrict o1 = o0 + n;
    double * __restrict o2 = o1 + n;
    double * __restrict o3 = o2 + n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a0 = a[i * k + p];
      const double a1 = a[(i + 1) * k + p];
      const double a2 = a[(i + 2) * k + p];
      const double a3 = a[(i + 3) * k + p];
      const double * __restrict br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double bj = br[j];
        o0[j] += a0 * bj;
        o1[j] += a1 * bj;
        o2[j] += a2 * bj;
        o3[j] += a3 * bj;
      }
    }
  }
  for (; i < m; ++i) {
    double * __restrict o = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double * __restrict br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        o[j] += aip * br[j];
      }
    }
  }
}

}  // namespace

Tensor matmul(const Tensor & a, const Tensor & b)
{
  require(a.rank() == 2 && b.rank() == 2, "matmul expects two matrices");
  const std::size_t m = a.dim(0);
  const std::size_t k = a.dim(1);
  const std::size_t n = b.dim(1);
  if (b.dim(0) != k) {
    throw ContractViolation(
      "matmul inner dimensions differ: " + shape_to_string(a.shape()) + " x " +
      shape_to_string(b.shape()));
  }
  std::vector<double> out(m * n);
  gemm_fixed_order(a.values().data(), b.values().data(), out.data(), m, k, n);
  return record_op({m, n}, std::move(out), {a, b}, [m, k, n](GradContext & ctx) {
    const ConstMap g(ctx.out_grad().data(), m, n);
    if (auto ga = ctx.input_grad(0); !ga.empty()) {
      MutMap(ga.data(), m, k).noalias() +=
        g * ConstMap(ctx.input(1).values().data(), k, n).transpose();
    }
    if (auto gb = ctx.input_grad(1); !gb.empty()) {
      MutMap(gb.data(), k, n).noalias() +=
        ConstMap(ctx.input(0).values().data(), m, k).transpose() * g;
    }
  });
}

Tensor bmm(const Tensor & a, const Tensor & b)
{
  require(a.rank() == 3 && b.rank() == 3, "bmm expects rank-3 operands");
  const std::size_t batch = a.dim(0);
  const std::size_t m = a.dim(1);
  const std::size_t k = a.dim(2);
  const std::size_t n = b.dim(2);
  require(b.dim(0) == batch && b.dim(1) == k, "bmm operand shapes differ");
  std::vector<double> out(batch * m * n);
  const double * av = a.values().data();
  const double * bv = b.values().data();
  for (std::size_t i = 0; i < batch; ++i) {
    gemm_fixed_order(av + i * m * k, bv + i * k * n, out.data() + i * m * n, m, k, n);
  }
  return record_op({batch, m, n}, std::move(out), {a, b}, [batch, m, k, n](GradContext & ctx) {
    const double * g = ctx.out_grad().data();
    const double * av = ctx.input(0).values().data();
    const double * bv = ctx.input(1).values().data();
    auto ga = ctx.input_grad(0);
    auto gb = ctx.input_grad(1);
    for (std::size_t i = 0; i < batch; ++i) {
      const ConstMap gi(g + i * m * n, m, n);
      if (!ga.empty()) {
        MutMap(ga.data() + i * m * k, m, k).noalias() +=
          gi * ConstMap(bv + i * k * n, k, n).transpose();
      }
      if (!gb.empty()) {
        MutMap(gb.data() + i * k * n, k, n).noalias() +=
          ConstMap(av + i * m * k, m, k).transpose() * gi;
      }
    }
  });
}

Tensor transpose(const Tensor & a)
{
  require(a.rank() == 2, "transpose expects a matrix");
  const std::size_t m = a.dim(0);
  const std::size_t n = a.dim(1);
  std::vector<double> out(m * n);
  MutMap(out.data(), n, m) = ConstMap(a.values().data(), m, n).transpose();
  return record_op({n, m}, std::move(out), {a}, [m, n](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    MutMap(ga.data(), m, n) += ConstMap(ctx.out_grad().data(), n, m).transpose();
  });
}

Tensor transpose_last2(const Tensor & a)
{
  require(a.rank() == 3, "transpose_last2 expects a rank-3 tensor");
  const std::size_t batch = a.dim(0);
  const std::size_t m = a.dim(1);
  const std::size_t n = a.dim(2);
  std::vector<double> out(batch * m * n);
  const auto av = a.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out[(b * n + j) * m + i] = av[(b * m + i) * n + j];
      }
    }
  }
  return record_op({batch, n, m}, std::move(out), {a}, [batch, m, n](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          ga[(b * m + i) * n + j] += g[(b * n + j) * m + i];
        }
      }
    }
  });
}

Tensor reshape(const Tensor & a, Shape shape)
{
  if (shape_numel(shape) != a.numel()) {
    throw ContractViolation(
      "cannot reshape " + shape_to_string(a.shape()) + " to " + shape_to_string(shape));
  }
  const auto av = a.values();
  return record_op(
    std::move(shape), std::vector<double>(av.begin(), av.end()), {a}, [](GradContext & ctx) {
      auto ga = ctx.input_grad(0);
      const auto g = ctx.out_grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
      }
    });
}

Tensor sum(const Tensor & a)
{
  const auto av = a.values();
  double total = 0.0;
  for (const double v : av) {
    total += v;
  }
  return record_op({1}, {total}, {a}, [](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const double g = ctx.out_grad()[0];
    for (auto & v : ga) {
      v += g;
    }
  });
}

Tensor sum(const Tensor & a, std::size_t axis)
{
  const auto split = split_axis(a.shape(), axis);
  Shape shape = a.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  if (shape.empty()) {
    shape.push_back(1);
  }
  std::vector<double> out(split.outer * split.inner, 0.0);
  const auto av = a.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t e = 0; e < split.extent; ++e) {
      const double * src = av.data() + (o * split.extent + e) * split.inner;
      double * dst = out.data() + o * split.inner;
      for (std::size_t i = 0; i < split.inner; ++i) {
        dst[i] += src[i];
      }
    }
  }
  return record_op(std::move(shape), std::move(out), {a}, [split](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    for (std::size_t o = 0; o < split.outer; ++o) {
      for (std::size_t e = 0; e < split.extent; ++e) {
        double * dst = ga.data() + (o * split.extent + e) * split.inner;
        const double * src = g.data() + o * split.inner;
        for (std::size_t i = 0; i < split.inner; ++i) {
          dst[i] += src[i];
        }
      }
    }
  });
}

Tensor mean(const Tensor & a) { return sum(a) * (1.0 / static_cast<double>(a.numel())); }

Tensor mean(const Tensor & a, std::size_t axis)
{
  return sum(a, axis) * (1.0 / static_cast<double>(a.dim(axis)));
}

Tensor softmax(const Tensor & a)
{
  const std::size_t cols = a.shape().back();
  const std::size_t rows = a.numel() / cols;
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double * x = av.data() + r * cols;
    double * y = out.data() + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      z += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] /= z;
    }
  }
  return record_op(a.shape(), std::move(out), {a}, [rows, cols](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    const auto y = ctx.out_value();
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        dot += g[r * cols + c] * y[r * cols + c];
      }
      for (std::size_t c = 0; c < cols; ++c) {
        ga[r * cols + c] += y[r * cols + c] * (g[r * cols + c] - dot);
      }
    }
  });
}

Tensor segment_softmax(
  const Tensor & scores, const std::vector<std::uint32_t> & segment, std::size_t num_segments)
{
  require(scores.rank() == 1 || scores.rank() == 2, "segment_softmax expects [E] or [E,H]");
  const std::size_t rows = scores.dim(0);
  const std::size_t cols = scores.rank() == 2 ? scores.dim(1) : 1;
  require(segment.size() == rows, "segment ids must match score rows");
  const auto sv = scores.values();
  std::vector<double> mx(num_segments * cols, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < rows; ++r) {
    require(segment[r] < num_segments, "segment id out of range");
    for (std::size_t c = 0; c < cols; ++c) {
      auto & m = mx[segment[r] * cols + c];
      m = std::max(m, sv[r * cols + c]);
    }
  }
  std::vector<double> out(rows * cols);
  std::vector<double> z(num_segments * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t s = segment[r] * cols + c;
      out[r * cols + c] = std::exp(sv[r * cols + c] - mx[s]);
      z[s] += out[r * cols + c];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out[r * cols + c] /= z[segment[r] * cols + c];
    }
  }
  auto seg = std::make_shared<std::vector<std::uint32_t>>(segment);
  return record_op(
    scores.shape(), std::move(out), {scores}, [seg, rows, cols, num_segments](GradContext & ctx) {
      auto ga = ctx.input_grad(0);
      const auto g = ctx.out_grad();
      const auto y = ctx.out_value();
      std::vector<double> dot(num_segments * cols, 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          dot[(*seg)[r] * cols + c] += g[r * cols + c] * y[r * cols + c];
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t i = r * cols + c;
          ga[i] += y[i] * (g[i] - dot[(*seg)[r] * cols + c]);
        }
      }
    });
}

Tensor concat(const std::vector<Tensor> & parts, std::size_t axis)
{
  require(!parts.empty(), "concat needs at least one tensor");
  const Shape & first = parts.front().shape();
  require(axis < first.size(), "concat axis out of range");
  std::size_t total = 0;
  std::vector<std::size_t> extents;
  for (const auto & p : parts) {
    const Shape & s = p.shape();
    require(s.size() == first.size(), "concat operands differ in rank");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != first[i]) {
        throw ContractViolation(
          "concat operands differ off-axis: " + shape_to_string(first) + " vs " +
          shape_to_string(s));
      }
    }
    extents.push_back(s[axis]);
    total += s[axis];
  }
  Shape shape = first;
  shape[axis] = total;
  const auto split = split_axis(shape, axis);
  std::vector<double> out(shape_numel(shape));
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto pv = parts[p].values();
    const std::size_t stripe = extents[p] * split.inner;
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(
        pv.data() + o * stripe, stripe, out.data() + (o * total + offset) * split.inner);
    }
    offset += extents[p];
  }
  return record_op(
    std::move(shape), std::move(out), parts, [extents, split, total](GradContext & ctx) {
      const auto g = ctx.out_grad();
      std::size_t offset = 0;
      for (std::size_t p = 0; p < extents.size(); ++p) {
        auto gp = ctx.input_grad(p);
        const std::size_t stripe = extents[p] * split.inner;
        if (!gp.empty()) {
          for (std::size_t o = 0; o < split.outer; ++o) {
            const double * src = g.data() + (o * total + offset) * split.inner;
            double * dst = gp.data() + o * stripe;
            for (std::size_t i = 0; i < stripe; ++i) {
              dst[i] += src[i];
            }
          }
        }
        offset += extents[p];
      }
    });
}

Tensor stack(const std::vector<Tensor> & parts)
{
  require(!parts.empty(), "stack needs at least one tensor");
  std::vector<Tensor> expanded;
  expanded.reserve(parts.size());
  for (const auto & p : parts) {
    Shape s = p.shape();
    s.insert(s.begin(), 1);
    expanded.push_back(reshape(p, std::move(s)));
  }
  return concat(expanded, 0);
}

Tensor slice(const Tensor & a, std::size_t axis, std::size_t begin, std::size_t end)
{
  const auto split = split_axis(a.shape(), axis);
  require(begin < end && end <= split.extent, "slice range out of bounds");
  Shape shape = a.shape();
  shape[axis] = end - begin;
  const std::size_t stripe = (end - begin) * split.inner;
  std::vector<double> out(split.outer * stripe);
  const auto av = a.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    std::copy_n(
      av.data() + (o * split.extent + begin) * split.inner, stripe, out.data() + o * stripe);
  }
  return record_op(std::move(shape), std::move(out), {a}, [split, begin, stripe](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    for (std::size_t o = 0; o < split.outer; ++o) {
      double * dst = ga.data() + (o * split.extent + begin) * split.inner;
      const double * src = g.data() + o * stripe;
      for (std::size_t i = 0; i < stripe; ++i) {
        dst[i] += src[i];
      }
    }
  });
}

Tensor index_select(const Tensor & a, std::size_t axis, const std::vector<std::uint32_t> & index)
{
  const auto split = split_axis(a.shape(), axis);
  require(!index.empty(), "index_select needs at least one index");
  for (const auto i : index) {
    require(i < split.extent, "index_select index out of range");
  }
  Shape shape = a.shape();
  shape[axis] = index.size();
  const std::size_t k = index.size();
  std::vector<double> out(split.outer * k * split.inner);
  const auto av = a.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t j = 0; j < k; ++j) {
      std::copy_n(
        av.data() + (o * split.extent + index[j]) * split.inner, split.inner,
        out.data() + (o * k + j) * split.inner);
    }
  }
  auto idx = std::make_shared<std::vector<std::uint32_t>>(index);
  return record_op(std::move(shape), std::move(out), {a}, [idx, split](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    const std::size_t k = idx->size();
    for (std::size_t o = 0; o < split.outer; ++o) {
      for (std::size_t j = 0; j < k; ++j) {
        double * dst = ga.data() + (o * split.extent + (*idx)[j]) * split.inner;
        const double * src = g.data() + (o * k + j) * split.inner;
        for (std::size_t i = 0; i < split.inner; ++i) {
          dst[i] += src[i];
        }
      }
    }
  });
}

Tensor index_add(const Tensor & a, const std::vector<std::uint32_t> & index, std::size_t rows)
{
  require(a.rank() >= 1 && index.size() == a.dim(0), "index_add needs one index per row");
  const std::size_t inner = a.numel() / a.dim(0);
  Shape shape = a.shape();
  shape[0] = rows;
  std::vector<double> out(rows * inner, 0.0);
  const auto av = a.values();
  for (std::size_t r = 0; r < index.size(); ++r) {
    require(index[r] < rows, "index_add index out of range");
    const double * src = av.data() + r * inner;
    double * dst = out.data() + index[r] * inner;
    for (std::size_t i = 0; i < inner; ++i) {
      dst[i] += src[i];
    }
  }
  auto idx = std::make_shared<std::vector<std::uint32_t>>(index);
  return record_op(std::move(shape), std::move(out), {a}, [idx, inner](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    for (std::size_t r = 0; r < idx->size(); ++r) {
      const double * src = g.data() + (*idx)[r] * inner;
      double * dst = ga.data() + r * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        dst[i] += src[i];
      }
    }
  });
}

Tensor flip(const Tensor & a, std::size_t axis)
{
  const auto split = split_axis(a.shape(), axis);
  std::vector<double> out(a.numel());
  const auto av = a.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t e = 0; e < split.extent; ++e) {
      std::copy_n(
        av.data() + (o * split.extent + e) * split.inner, split.inner,
        out.data() + (o * split.extent + (split.extent - 1 - e)) * split.inner);
    }
  }
  return record_op(a.shape(), std::move(out), {a}, [split](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    for (std::size_t o = 0; o < split.outer; ++o) {
      for (std::size_t e = 0; e < split.extent; ++e) {
        double * dst = ga.data() + (o * split.extent + e) * split.inner;
        const double * src = g.data() + (o * split.extent + (split.extent - 1 - e)) * split.inner;
        for (std::size_t i = 0; i < split.inner; ++i) {
          dst[i] += src[i];
        }
      }
    }
  });
}

Tensor norm_last(const Tensor & a)
{
  const std::size_t cols = a.shape().back();
  const std::size_t rows = a.numel() / cols;
  Shape shape(a.shape().begin(), a.shape().end() - 1);
  if (shape.empty()) {
    shape.push_back(1);
  }
  const auto av = a.values();
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      s += av[r * cols + c] * av[r * cols + c];
    }
    out[r] = std::sqrt(s);
  }
  return record_op(std::move(shape), std::move(out), {a}, [rows, cols](GradContext & ctx) {
    auto ga = ctx.input_grad(0);
    const auto g = ctx.out_grad();
    const auto y = ctx.out_value();
    const auto x = ctx.input(0).values();
    for (std::size_t r = 0; r < rows; ++r) {
      if (y[r] == 0.0) {
        continue;
      }
      const double scale = g[r] / y[r];
      for (std::size_t c = 0; c < cols; ++c) {
        ga[r * cols + c] += scale * x[r * cols + c];
      }
    }
  });
}

}  // namespace ssmtraj::numcore
