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

#include "ssmtraj/seqssm/scan.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"
#include "ssmtraj/seqssm/discretize.hpp"

#include <cmath>
#include <memory>

namespace ssmtraj::seqssm
{

using namespace numcore;

namespace
{

void check_reference_shapes(const Tensor & x, const Tensor & a_bar, const Tensor & b_bar)
{
  require(x.rank() == 2, "selective_scan: x must be [T, M]");
  require(a_bar.rank() == 3 && a_bar.dim(1) == a_bar.dim(2), "selective_scan: A_bar must be [T, N, N]");
  require(b_bar.rank() == 3, "selective_scan: B_bar must be [T, N, M]");
  require(a_bar.dim(0) == x.dim(0) && b_bar.dim(0) == x.dim(0), "selective_scan: length mismatch");
  require(b_bar.dim(1) == a_bar.dim(1) && b_bar.dim(2) == x.dim(1), "selective_scan: B_bar shape");
}

Tensor step_matrix(const Tensor & seq, std::size_t t)
{
  return reshape(slice(seq, 0, t, t + 1), {seq.dim(1), seq.dim(2)});
}

}  // namespace

Tensor selective_scan_states(const Tensor & x, const Tensor & a_bar, const Tensor & b_bar)
{
  check_reference_shapes(x, a_bar, b_bar);
  const std::size_t steps = x.dim(0);
  const std::size_t n = a_bar.dim(1);
  const std::size_t m = x.dim(1);
  Tensor h = Tensor::zeros({n, 1});
  std::vector<Tensor> states;
  states.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor xt = reshape(slice(x, 0, t, t + 1), {m, 1});
    h = matmul(step_matrix(a_bar, t), h) + matmul(step_matrix(b_bar, t), xt);
    states.push_back(reshape(h, {n}));
  }
  return stack(states);
}

Tensor selective_scan(const Tensor & x, const Tensor & a_bar, const Tensor & b_bar, const Tensor & c)
{
  require(c.rank() == 3 && c.dim(0) == x.dim(0) && c.dim(2) == a_bar.dim(1), "selective_scan: C must be [T, P, N]");
  Tensor h = selective_scan_states(x, a_bar, b_bar);
  const std::size_t n = a_bar.dim(1);
  // y_t = C_t h_t for all t at once
  Tensor y = bmm(c, reshape(h, {x.dim(0), n, 1}));
  return reshape(y, {x.dim(0), c.dim(1)});
}

Tensor selective_scan_diagonal(
  const Tensor & u, const Tensor & delta, const Tensor & a, const Tensor & b, const Tensor & c)
{
  require(u.rank() == 3, "selective_scan_diagonal: u must be [T, R, E]");
  require(delta.shape() == u.shape(), "selective_scan_diagonal: delta must match u");
  const std::size_t steps = u.dim(0);
  const std::size_t rows = u.dim(1);
  const std::size_t chans = u.dim(2);
  require(a.rank() == 2 && a.dim(0) == chans, "selective_scan_diagonal: a must be [E, N]");
  const std::size_t n = a.dim(1);
  const Shape bc{steps, rows, n};
  require(b.shape() == bc && c.shape() == bc, "selective_scan_diagonal: B and C must be [T, R, N]");

  const auto uv = u.values();
  const auto dv = delta.values();
  const auto av = a.values();
  const auto bv = b.values();
  const auto cv = c.values();
  const std::size_t total = steps * rows * chans * n;
  // saved for the backward pass: states, decay and input gain per element
  auto hs = std::make_shared<std::vector<double>>(total);
  auto decay = std::make_shared<std::vector<double>>(total);
  auto gain = std::make_shared<std::vector<double>>(total);
  std::vector<double> y(steps * rows * chans, 0.0);
  std::vector<double> h(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t e = 0; e < chans; ++e) {
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t ue = (t * rows + r) * chans + e;
        const std::size_t tr = (t * rows + r) * n;
        const double d = dv[ue];
        require(d > 0.0, "selective_scan_diagonal: step sizes must be positive");
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double ak = av[e * n + k];
          const double gn = zoh_gain(d, ak);
          // exp(d a) = 1 + a * gain; saves a second transcendental per element
          const double dec = 1.0 + ak * gn;
          h[k] = dec * h[k] + gn * bv[tr + k] * uv[ue];
          acc += cv[tr + k] * h[k];
          const std::size_t idx = ue * n + k;
          (*hs)[idx] = h[k];
          (*decay)[idx] = dec;
          (*gain)[idx] = gn;
        }
        y[ue] = acc;
      }
    }
  }

  return record_op(
    u.shape(), std::move(y), {u, delta, a, b, c},
    [=](GradContext & ctx) {
      const auto go = ctx.out_grad();
      auto gu = ctx.input_grad(0);
      auto gd = ctx.input_grad(1);
      auto ga = ctx.input_grad(2);
      auto gb = ctx.input_grad(3);
      auto gc = ctx.input_grad(4);
      const auto uu = ctx.input(0).values();
      const auto dd = ctx.input(1).values();
      const auto aa = ctx.input(2).values();
      const auto bb = ctx.input(3).values();
      const auto cc = ctx.input(4).values();
      std::vector<double> carry(n);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t e = 0; e < chans; ++e) {
          std::fill(carry.begin(), carry.end(), 0.0);
          for (std::size_t t = steps; t-- > 0;) {
            const std::size_t ue = (t * rows + r) * chans + e;
            const std::size_t tr = (t * rows + r) * n;
            const double gy = go[ue];
            const double d = dd[ue];
            const double ut = uu[ue];
            double gut = 0.0;
            double gdt = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
              const std::size_t idx = ue * n + k;
              const double ak = aa[e * n + k];
              const double dec = (*decay)[idx];
              const double gn = (*gain)[idx];
              const double g = gy * cc[tr + k] + carry[k];
              const double hprev = t > 0 ? (*hs)[((t - 1) * rows + r) * chans * n + e * n + k] : 0.0;
              if (!gc.empty()) {
                gc[tr + k] += gy * (*hs)[idx];
              }
              const double g_dec = g * hprev;
              const double g_gain = g * bb[tr + k] * ut;
              if (!gb.empty()) {
                gb[tr + k] += g * gn * ut;
              }
              gut += g * gn * bb[tr + k];
              // d(dec)/d(delta) = a dec, d(gain)/d(delta) = dec
              gdt += g_dec * ak * dec + g_gain * dec;
              if (!ga.empty()) {
                ga[e * n + k] += g_dec * d * dec + g_gain * zoh_gain_da_from(d, ak, dec, gn);
              }
              carry[k] = dec * g;
            }
            if (!gu.empty()) {
              gu[ue] += gut;
            }
            if (!gd.empty()) {
              gd[ue] += gdt;
            }
          }
        }
      }
    });
}

Tensor causal_conv1d(const Tensor & x, const Tensor & w, const Tensor & bias)
{
  require(x.rank() == 3, "causal_conv1d: x must be [T, R, E]");
  const std::size_t steps = x.dim(0);
  const std::size_t rows = x.dim(1);
  const std::size_t chans = x.dim(2);
  require(w.rank() == 2 && w.dim(0) == chans && w.dim(1) >= 1, "causal_conv1d: w must be [E, K]");
  require(bias.rank() == 1 && bias.dim(0) == chans, "causal_conv1d: bias must be [E]");
  const std::size_t width = w.dim(1);
  const auto xv = x.values();
  const auto wv = w.values();
  const auto bv = bias.values();
  std::vector<double> y(x.numel());
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t e = 0; e < chans; ++e) {
        double acc = bv[e];
        for (std::size_t k = 0; k < width; ++k) {
          // tap k reads time t - (width - 1) + k
          if (t + k + 1 < width) {
            continue;
          }
          const std::size_t src = t + k + 1 - width;
          acc += wv[e * width + k] * xv[(src * rows + r) * chans + e];
        }
        y[(t * rows + r) * chans + e] = acc;
      }
    }
  }
  return record_op(x.shape(), std::move(y), {x, w, bias}, [=](GradContext & ctx) {
    const auto go = ctx.out_grad();
    auto gx = ctx.input_grad(0);
    auto gw = ctx.input_grad(1);
    auto gbias = ctx.input_grad(2);
    const auto xx = ctx.input(0).values();
    const auto ww = ctx.input(1).values();
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t e = 0; e < chans; ++e) {
          const double g = go[(t * rows + r) * chans + e];
          if (!gbias.empty()) {
            gbias[e] += g;
          }
          for (std::size_t k = 0; k < width; ++k) {
            if (t + k + 1 < width) {
              continue;
            }
            const std::size_t src = (t + k + 1 - width) * rows * chans + r * chans + e;
            if (!gw.empty()) {
              gw[e * width + k] += g * xx[src];
            }
            if (!gx.empty()) {
              gx[src] += g * ww[e * width + k];
            }
          }
        }
      }
    }
  });
}

}  // namespace ssmtraj::seqssm
