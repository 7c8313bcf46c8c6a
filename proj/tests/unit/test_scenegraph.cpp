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

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"
#include "ssmtraj/scenegraph/gat.hpp"
#include "support/gradcheck.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace ssmtraj;
using namespace ssmtraj::numcore;
using namespace ssmtraj::scenegraph;

namespace
{

std::set<std::pair<int, int>> cross_edges(const SceneGraph & g)
{
  std::set<std::pair<int, int>> out;
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    if (g.targets[k] != g.sources[k]) {
      out.insert({static_cast<int>(g.node_ids[g.targets[k]]), static_cast<int>(g.node_ids[g.sources[k]])});
    }
  }
  return out;
}

Tensor random_states(std::size_t n, Rng & rng, double spread)
{
  std::vector<double> v(n * 4);
  for (auto & x : v) {
    x = rng.uniform(-spread, spread);
  }
  return Tensor({n, 4}, std::move(v));
}

}  // namespace

TEST_CASE("build_graph examples")
{
  SUBCASE("single agent")
  {
    auto g = build_graph(Tensor::matrix({{1, 2, 3, 4}}));
    CHECK(g.num_nodes() == 1);
    CHECK(g.num_edges() == 1);
    CHECK(cross_edges(g).empty());
    validate(g);
  }
  SUBCASE("two agents ten meters apart")
  {
    auto g = build_graph(Tensor::matrix({{0, 0, 0, 0}, {10, 0, 0, 0}}), 30.0);
    CHECK(g.num_edges() == 4);
    CHECK(cross_edges(g).size() == 2);
  }
  SUBCASE("three agents on a line")
  {
    auto g = build_graph({1, 2, 3}, Tensor::matrix({{0, 0, 0, 0}, {0, 20, 0, 0}, {0, 50, 0, 0}}), 30.0);
    const std::set<std::pair<int, int>> expected{{1, 2}, {2, 1}, {2, 3}, {3, 2}};
    CHECK(cross_edges(g) == expected);
    CHECK(g.num_edges() == 7);
    validate(g);
  }
  SUBCASE("edge features are displacement and distance")
  {
    auto g = build_graph(Tensor::matrix({{1, 1, 0, 0}, {4, 5, 0, 0}}));
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      if (g.targets[k] == 0 && g.sources[k] == 1) {
        CHECK(g.edge_features.at(k, 0) == 3.0);
        CHECK(g.edge_features.at(k, 1) == 4.0);
        CHECK(g.edge_features.at(k, 2) == 5.0);
      }
    }
  }
  SUBCASE("boundary distance is connected")
  {
    auto g = build_graph(Tensor::matrix({{0, 0, 0, 0}, {30, 0, 0, 0}}), 30.0);
    CHECK(cross_edges(g).size() == 2);
  }
}

TEST_CASE("random graphs satisfy the invariants")
{
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    auto g = build_graph(random_states(n, rng, 40.0), 30.0);
    validate(g);
    // symmetric topology
    auto edges = cross_edges(g);
    for (auto [a, b] : edges) {
      CHECK(edges.count({b, a}) == 1);
    }
  }
}

TEST_CASE("gat_attention examples")
{
  Rng rng(1);
  SUBCASE("singleton neighbourhood puts all weight on self")
  {
    auto p = GatParams::init(4, 3, 3, 4, 2, rng);
    auto g = build_graph(Tensor::matrix({{0, 0, 1, 0}, {100, 0, 1, 0}}));
    auto att = gat_attention(g, p, 0);
    REQUIRE(att.neighbours.size() == 1);
    for (std::size_t h = 0; h < 3; ++h) {
      CHECK(att.weights.at(0, h) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("identical neighbours share the weight evenly")
  {
    // node 0 sees nodes 1 and 2, which carry equal features and equal edges
    GatParams q = GatParams::init(1, 3, 2, 2, 1, rng);
    SceneGraph g;
    g.node_ids = {0, 1, 2};
    g.node_features = Tensor({3, 1}, {0.3, 0.7, 0.7});
    g.targets = {0, 0, 1, 2};
    g.sources = {1, 2, 1, 2};
    g.edge_features = Tensor({4, 3}, {3, 4, 5, 3, 4, 5, 0, 0, 0, 0, 0, 0});
    auto w = gat_attention(g, q, 0);
    for (std::size_t h = 0; h < 2; ++h) {
      CHECK(w.weights.at(0, h) == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(w.weights.at(1, h) == doctest::Approx(0.5).epsilon(1e-15));
    }
  }
  SUBCASE("scores one and two")
  {
    // W_att reads h_tau only, a = 1, so the scores equal the neighbour feature.
    GatParams p;
    p.heads = 1;
    p.w_att = Tensor({5, 1}, {0, 1, 0, 0, 0});
    p.a_att = Tensor::vector({1.0});
    p.w1 = Tensor::zeros({1, 1});
    p.w2 = Tensor::eye(1);
    p.b = Tensor::zeros({1});
    SceneGraph g = with_features(build_graph(Tensor::matrix({{0, 0}, {1, 0}})), Tensor({2, 1}, {1.0, 2.0}));
    auto att = gat_attention(g, p, 0);
    CHECK(att.weights.at(0, 0) == doctest::Approx(0.26894).epsilon(1e-5));
    CHECK(att.weights.at(1, 0) == doctest::Approx(0.73106).epsilon(1e-5));
  }
  SUBCASE("dimension mismatch")
  {
    auto p = GatParams::init(5, 3, 1, 2, 2, rng);
    auto g = build_graph(Tensor::matrix({{0, 0, 0, 0}}));
    CHECK_THROWS_AS(gat_attention(g, p, 0), ContractViolation);
    CHECK_THROWS_AS(gat_layer(g, p), ContractViolation);
  }
}

TEST_CASE("attention rows sum to one and ignore non-neighbours")
{
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.index(7);
    auto g = build_graph(random_states(n, rng, 30.0), 25.0);
    auto p = GatParams::init(4, 3, 3, 4, 2, rng);
    const auto dense = testing::reference_attention(g, p);
    std::set<std::pair<std::size_t, std::size_t>> linked;
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      linked.insert({g.targets[k], g.sources[k]});
    }
    for (std::size_t h = 0; h < p.heads; ++h) {
      for (std::size_t v = 0; v < n; ++v) {
        double row = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
          row += dense[h][v][t];
          if (!linked.count({v, t})) {
            CHECK(dense[h][v][t] == 0.0);
          }
        }
        CHECK(std::abs(row - 1.0) <= 1e-6);
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto att = gat_attention(g, p, v);
      for (std::size_t h = 0; h < p.heads; ++h) {
        double row = 0.0;
        for (std::size_t j = 0; j < att.neighbours.size(); ++j) {
          CHECK(att.weights.at(j, h) > 0.0);
          CHECK(att.weights.at(j, h) == doctest::Approx(dense[h][v][att.neighbours[j]]).epsilon(1e-12));
          row += att.weights.at(j, h);
        }
        CHECK(std::abs(row - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("gat_layer examples")
{
  Rng rng(4);
  SUBCASE("zero W2 leaves the self term")
  {
    auto p = GatParams::init(4, 3, 2, 3, 2, rng);
    p.w2 = Tensor::zeros(p.w2.shape());
    p.b = Tensor::vector({0.1, 0.2, 0.3, 0.4});
    Tensor states = random_states(3, rng, 10.0);
    auto out = gat_layer(build_graph(states), p);
    Tensor expected = matmul(states, p.w1) + p.b;
    for (std::size_t i = 0; i < out.numel(); ++i) {
      CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    }
  }
  SUBCASE("single node with identity W2")
  {
    GatParams p = GatParams::init(4, 3, 1, 2, 4, rng);
    p.w1 = Tensor::zeros({4, 4});
    p.w2 = Tensor::eye(4);
    p.b = Tensor::zeros({4});
    Tensor states = Tensor::matrix({{1.5, -2, 0.3, 4}});
    auto out = gat_layer(build_graph(states), p);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(out[i] == doctest::Approx(states[i]).epsilon(1e-15));
    }
  }
  SUBCASE("two-node graph against dense evaluation")
  {
    auto p = GatParams::init(4, 3, 3, 2, 2, rng);
    p.b = Tensor::vector({0.1, -0.1, 0.2, -0.2, 0.3, -0.3});
    auto g = build_graph(Tensor::matrix({{0, 0, 1, 0.5}, {3, 4, -1, 0.2}}));
    auto out = gat_layer(g, p);
    auto expected = testing::reference_gat(g, p);
    for (std::size_t i = 0; i < out.numel(); ++i) {
      CHECK(std::abs(out[i] - expected[i]) <= 1e-12);
    }
  }
}

TEST_CASE("gat_layer matches the dense reference on random scenes")
{
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.index(9);
    auto g = build_graph(random_states(n, rng, 30.0), 30.0);
    auto p = GatParams::init(4, 3, 1 + rng.index(3), 1 + rng.index(4), 1 + rng.index(3), rng);
    auto out = gat_layer(g, p);
    auto expected = testing::reference_gat(g, p);
    REQUIRE(expected.size() == out.numel());
    for (std::size_t i = 0; i < out.numel(); ++i) {
      CHECK(std::abs(out[i] - expected[i]) <= 1e-10 * std::max(1.0, std::abs(expected[i])));
    }
  }
}

TEST_CASE("gat_layer is permutation equivariant")
{
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.index(6);
    Tensor states = random_states(n, rng, 20.0);
    std::vector<std::int64_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
      ids[i] = static_cast<std::int64_t>(100 + i);
    }
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      perm[i] = i;
    }
    rng.shuffle(perm);
    std::vector<std::int64_t> ids_p(n);
    for (std::size_t i = 0; i < n; ++i) {
      ids_p[i] = ids[perm[i]];
    }
    auto p = GatParams::init(4, 3, 3, 4, 2, rng);
    auto out = gat_layer(build_graph(ids, states, 25.0), p);
    auto out_p = gat_layer(build_graph(ids_p, index_select(states, 0, perm), 25.0), p);
    const std::size_t w = out.dim(1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        CHECK(out_p.at(i, j) == out.at(perm[i], j));
      }
    }
  }
}

TEST_CASE("softmax is invariant to an additive shift of the scores")
{
  const std::vector<std::uint32_t> seg{0, 0, 1, 1, 1};
  Tensor s = Tensor({5, 2}, {0.3, -1.0, 2.0, 0.5, -0.7, 1.1, 0.0, 3.0, 0.2, -2.0});
  auto a = segment_softmax(s, seg, 2);
  auto b = segment_softmax(s + 7.25, seg, 2);
  for (std::size_t i = 0; i < a.numel(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  }
}

TEST_CASE("gat gradients match finite differences")
{
  Rng rng(17);
  auto g = build_graph(random_states(4, rng, 10.0), 30.0);
  auto p = GatParams::init(4, 3, 2, 3, 2, rng);
  Tensor h = g.node_features.clone(true);
  Tensor e = g.edge_features.clone(true);
  auto loss = [&] { return sum(square(tanh(gat_forward(h, g.targets, g.sources, e, p)))); };
  const auto r = testing::gradcheck(loss, {p.w_att, p.a_att, p.w1, p.w2, p.b, h, e});
  CHECK(r.max_relative_error < 1e-4);
}
