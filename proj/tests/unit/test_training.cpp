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

#include "ssmtraj/numcore/checkpoint.hpp"
#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"
#include "ssmtraj/training/optimizer.hpp"
#include "ssmtraj/training/trainer.hpp"

#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

using namespace ssmtraj;
using namespace ssmtraj::training;
using numcore::Tensor;

namespace
{

std::vector<double> flat(const Tensor & t) { return {t.values().begin(), t.values().end()}; }

std::vector<double> flat_output(const ForwardOutput & f)
{
  std::vector<double> out = flat(f.u0);
  for (const auto & s : f.horizon.states) {
    const auto v = flat(s);
    out.insert(out.end(), v.begin(), v.end());
  }
  for (const auto & p : f.covariance) {
    const auto v = flat(p);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void zero(Tensor t)
{
  for (auto & v : t.mutable_values()) {
    v = 0.0;
  }
}

void zero_prefix(const TrajectoryModel & m, const std::string & prefix)
{
  std::size_t hits = 0;
  for (const auto & p : m.parameters()) {
    if (p.name.rfind(prefix, 0) == 0) {
      zero(p.tensor);
      ++hits;
    }
  }
  REQUIRE(hits > 0);
}

std::filesystem::path scratch(const std::string & name)
{
  auto dir = std::filesystem::temp_directory_path() / "ssmtraj_training_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("ablation rows map onto the three switches")
{
  struct Row
  {
    const char * name;
    bool mixed;
    bool graph;
    bool linear;
  };
  const Row rows[] = {
    {"H1", true, false, true},  {"H2", false, true, true},  {"H3", true, false, false},
    {"H4", false, true, false}, {"H5", false, false, true}, {"H6", true, true, false},
    {"H7", false, false, false}, {"H8", true, true, true},
  };
  for (const auto & r : rows) {
    const ModelConfig c = ModelConfig::ablation(r.name);
    CHECK(c.mixed_mamba == r.mixed);
    CHECK(c.graph_considered == r.graph);
    CHECK(c.linear_koopman == r.linear);
    CHECK(c.ablation_name() == r.name);
  }
  CHECK_THROWS_AS(ModelConfig::ablation("H9"), ContractViolation);

  ModelConfig base;
  base.epochs = 3;
  base.seed = 11;
  const ModelConfig h4 = ModelConfig::ablation("H4", base);
  CHECK(h4.epochs == 3);
  CHECK(h4.seed == 11);

  ModelConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("forward is deterministic for a fixed seed")
{
  const auto samples = testing::highway_windows(2, 3, 6, 5, 3);
  const ModelConfig c = testing::tiny_config();
  const TrajectoryModel a(c);
  const TrajectoryModel b(c);
  const Batch batch = make_batch({&samples[0], &samples[1]}, c);
  const ForwardOutput fa = a.forward(batch);
  const ForwardOutput fb = b.forward(batch);
  CHECK(flat_output(fa) == flat_output(fb));
  CHECK(a.loss(fa, batch).item() == b.loss(fb, batch).item());

  ModelConfig other = c;
  other.seed = 1;
  CHECK(flat_output(TrajectoryModel(other).forward(batch)) != flat_output(fa));
}

TEST_CASE("zeroed reverse and final blocks reduce mixed to single Mamba")
{
  const auto samples = testing::highway_windows(1, 4, 8, 6, 5);
  const std::pair<const char *, const char *> pairs[] = {{"H8", "H2"}, {"H6", "H4"}, {"H1", "H5"}, {"H3", "H7"}};
  for (const auto & [mixed_row, single_row] : pairs) {
    const TrajectoryModel mixed(testing::tiny_config(mixed_row));
    const TrajectoryModel single(testing::tiny_config(single_row));
    const Batch batch = make_batch({&samples[0]}, mixed.config());
    CHECK(flat_output(mixed.forward(batch)) != flat_output(single.forward(batch)));
    zero_prefix(mixed, "encoder.mamba.reverse.");
    zero_prefix(mixed, "encoder.mamba.final.");
    CHECK(flat_output(mixed.forward(batch)) == flat_output(single.forward(batch)));
  }
}

TEST_CASE("graph switch only touches the decoder attention")
{
  const auto samples = testing::highway_windows(1, 4, 6, 5, 9);
  const TrajectoryModel with(testing::tiny_config("H8"));
  const TrajectoryModel without(testing::tiny_config("H1"));
  const Batch batch = make_batch({&samples[0]}, with.config());
  const ForwardOutput fw = with.forward(batch);
  const ForwardOutput fo = without.forward(batch);
  CHECK(flat(fw.u0) == flat(fo.u0));
  CHECK(flat(fw.horizon.states[1]) != flat(fo.horizon.states[1]));

  // the decoder gnn branch with zero weights contributes exact zeros
  zero_prefix(with, "decoder.gnn.");
  CHECK(flat_output(with.forward(batch)) == flat_output(without.forward(batch)));
  CHECK(with.parameters().size() > without.parameters().size());
}

TEST_CASE("Koopman mode with vanishing features matches linear mode")
{
  const auto samples = testing::highway_windows(1, 3, 6, 8, 13);
  for (const auto & [lin_row, koop_row] :
       std::vector<std::pair<std::string, std::string>>{{"H8", "H6"}, {"H5", "H7"}}) {
    const TrajectoryModel lin(testing::tiny_config(lin_row));
    TrajectoryModel koop(testing::tiny_config(koop_row));
    const std::size_t d = lin.dynamics.state_dim();
    const std::size_t lifted = koop.dynamics.lifted_dim();
    REQUIRE(lifted > d);
    // top-left block of A and top rows of B copied, everything acting on the features random
    Tensor a = koop.dynamics.a().clone(true);
    Tensor b = koop.dynamics.b().clone(true);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        a.mutable_values()[i * lifted + j] = lin.dynamics.a().at(i, j);
      }
      for (std::size_t j = 0; j < b.dim(1); ++j) {
        b.mutable_values()[i * b.dim(1) + j] = lin.dynamics.b().at(i, j);
      }
    }
    numcore::Mlp phi = koop.dynamics.features();
    zero(phi.layers().back().weight());
    zero(phi.layers().back().bias());
    koop.dynamics = dynamics::DynamicsModel::koopman(a, b, phi, lin.dynamics.dt(), 0.1);

    const Batch batch = make_batch({&samples[0]}, lin.config());
    const ForwardOutput fl = lin.forward(batch);
    const ForwardOutput fk = koop.forward(batch);
    double worst = 0.0;
    const auto vl = flat_output(fl);
    const auto vk = flat_output(fk);
    REQUIRE(vl.size() == vk.size());
    for (std::size_t i = 0; i < vl.size(); ++i) {
      worst = std::max(worst, std::abs(vl[i] - vk[i]));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("loss reductions")
{
  const auto samples = testing::highway_windows(2, 3, 5, 4, 17);
  ModelConfig c = testing::tiny_config();
  const Batch batch = make_batch({&samples[0], &samples[1]}, c);

  SUBCASE("perfect prediction with unit covariance gives log 2 pi")
  {
    c.w_dyn = 0.0;
    const TrajectoryModel m(c);
    ForwardOutput f = m.forward(batch);
    const double s2 = c.pos_scale * c.pos_scale;
    for (std::size_t k = 0; k < batch.horizon; ++k) {
      f.horizon.states[k] = batch.future[k];
      std::vector<double> p(batch.rows * 16, 0.0);
      for (std::size_t r = 0; r < batch.rows; ++r) {
        for (std::size_t i = 0; i < 4; ++i) {
          p[r * 16 + i * 5] = 1.0 / s2;
        }
      }
      f.covariance[k] = Tensor({batch.rows, 4, 4}, p);
    }
    LossParts parts;
    const double total = m.loss(f, batch, &parts).item();
    CHECK(total == doctest::Approx(std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(parts.ade == 0.0);
  }

  SUBCASE("position term alone is the squared ADE")
  {
    c.w_nll = 0.0;
    c.w_dyn = 0.0;
    const TrajectoryModel m(c);
    const ForwardOutput f = m.forward(batch);
    double dist = 0.0;
    for (std::size_t k = 0; k < batch.horizon; ++k) {
      for (std::size_t r = 0; r < batch.rows; ++r) {
        const double dx = (batch.future[k].at(r, 0) - f.horizon.states[k].at(r, 0)) * c.pos_scale;
        const double dy = (batch.future[k].at(r, 1) - f.horizon.states[k].at(r, 1)) * c.pos_scale;
        dist += std::hypot(dx, dy);
      }
    }
    const double ade = dist / static_cast<double>(batch.horizon * batch.rows);
    CHECK(m.loss(f, batch).item() == doctest::Approx(ade * ade).epsilon(1e-12));
  }

  SUBCASE("non-finite prediction aborts training")
  {
    const TrajectoryModel m(c);
    ForwardOutput f = m.forward(batch);
    f.horizon.states[0] = f.horizon.states[0] * std::numeric_limits<double>::quiet_NaN();
    try {
      m.loss(f, batch);
      FAIL("expected a divergence");
    } catch (const DivergenceError & e) {
      CHECK(e.stage() == "training");
    } catch (const DecompositionError &) {
      // NaN covariance input may be caught earlier by the NLL
    }
  }
}

TEST_CASE("total loss gradient matches finite differences")
{
  const auto samples = testing::highway_windows(1, 2, 3, 3, 21);
  for (const char * row : {"H8", "H7"}) {
    const TrajectoryModel m(testing::tiny_config(row));
    const Batch batch = make_batch({&samples[0]}, m.config());
    std::vector<Tensor> params;
    for (const auto & p : m.parameters()) {
      params.push_back(p.tensor);
    }
    // the smallest entries sit near 1e-6, so the step is sized against round-off
    const auto r = testing::gradcheck([&] { return m.loss(m.forward(batch), batch); }, params, 1e-4, 1e-6);
    CAPTURE(row);
    CHECK(r.checked > 100);
    CHECK(r.max_relative_error <= 1e-3);
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged")
{
  const auto samples = testing::highway_windows(4, 2, 5, 4, 23);
  ModelConfig c = testing::tiny_config();
  c.learning_rate = 0.0;
  c.epochs = 3;
  TrajectoryModel m(c);
  std::vector<std::vector<double>> before;
  for (const auto & p : m.parameters()) {
    before.push_back(flat(p.tensor));
  }
  train(m, samples, {});
  std::size_t i = 0;
  for (const auto & p : m.parameters()) {
    CHECK(flat(p.tensor) == before[i++]);
  }
}

TEST_CASE("one epoch on one sample writes one checkpoint and one log row")
{
  const auto samples = testing::highway_windows(1, 2, 5, 4, 29);
  ModelConfig c = testing::tiny_config();
  c.epochs = 1;
  TrajectoryModel m(c);
  const auto path = scratch("one_epoch.ckpt");
  std::filesystem::remove(path);
  std::ostringstream log;
  TrainOptions o;
  o.checkpoint = path;
  o.log = &log;
  const TrainResult r = train(m, samples, {}, o);
  CHECK(r.log.size() == 1);
  CHECK(std::filesystem::exists(path));
  std::istringstream lines(log.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "epoch\ttrain_loss\tval_ADE\tval_FDE\twall_seconds");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
  }
  CHECK(rows == 1);
  CHECK(numcore::load_checkpoint(path).size() == m.parameters().size());
}

TEST_CASE("training is reproducible and improves on a toy set")
{
  const auto samples = testing::highway_windows(6, 2, 5, 4, 31);
  ModelConfig c = testing::tiny_config();
  c.epochs = 4;
  c.learning_rate = 1e-2;
  TrajectoryModel a(c);
  TrajectoryModel b(c);
  const TrainResult ra = train(a, samples, {});
  const TrainResult rb = train(b, samples, {});
  REQUIRE(ra.log.size() == rb.log.size());
  for (std::size_t i = 0; i < ra.log.size(); ++i) {
    CHECK(ra.log[i].train_loss == rb.log[i].train_loss);
    CHECK(ra.log[i].val_ade == rb.log[i].val_ade);
  }
  CHECK(numcore::encode_checkpoint(a.parameters()) == numcore::encode_checkpoint(b.parameters()));
  CHECK(ra.best_val_ade <= ra.log.front().val_ade);
}

TEST_CASE("checkpoint round trip reproduces forward bit-exactly")
{
  const auto samples = testing::highway_windows(2, 3, 5, 4, 37);
  ModelConfig c = testing::tiny_config("H6");
  c.epochs = 2;
  c.learning_rate = 1e-2;
  TrajectoryModel trained(c);
  train(trained, samples, {});
  const auto path = scratch("round_trip.ckpt");
  numcore::save_checkpoint(path, trained.parameters());

  TrajectoryModel fresh(c);
  auto params = fresh.parameters();
  numcore::restore_parameters(params, numcore::load_checkpoint(path));
  const Batch batch = make_batch({&samples[0], &samples[1]}, c);
  CHECK(flat_output(fresh.forward(batch)) == flat_output(trained.forward(batch)));
}

TEST_CASE("predictions carry symmetric PSD covariances over the whole horizon")
{
  const auto samples = testing::highway_windows(2, 4, 6, 7, 41);
  const TrajectoryModel m(testing::tiny_config());
  const auto preds = m.predict(samples);
  REQUIRE(preds.size() == samples.size());
  for (std::size_t s = 0; s < preds.size(); ++s) {
    const auto & p = preds[s];
    CHECK(p.states.size() == samples[s].horizon());
    CHECK(p.covariance.size() == samples[s].horizon());
    CHECK(p.controls.size() == samples[s].horizon());
    for (const auto & step : p.covariance) {
      REQUIRE(step.size() == samples[s].num_agents());
      for (const auto & cov : step) {
        CHECK(cov[1] == doctest::Approx(cov[2]).epsilon(1e-12));
        const double tr = cov[0] + cov[3];
        const double det = cov[0] * cov[3] - cov[1] * cov[2];
        CHECK(tr > 0.0);
        CHECK(det >= -1e-12);
      }
    }
    const auto scene = p.as_scene_prediction();
    CHECK(scene.mean.size() == samples[s].num_agents());
  }
}

TEST_CASE("Adam with zero gradient and decay keeps parameters")
{
  Tensor w = Tensor::full({3}, 0.5, true);
  Adam opt({{"w", w}}, AdamOptions{});
  backward(numcore::sum(w * 0.0));
  opt.step();
  CHECK(flat(w) == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(opt.steps() == 1);
}

TEST_CASE("gradient clipping bounds the update norm")
{
  Tensor w = Tensor::zeros({2}, true);
  AdamOptions o;
  o.clip_norm = 1.0;
  Adam opt({{"w", w}}, o);
  backward(numcore::sum(w * Tensor::vector({300.0, 400.0})));
  CHECK(opt.step() == doctest::Approx(500.0));
  // first Adam step moves every coordinate by about lr regardless of scale
  CHECK(w[0] == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(-1e-3).epsilon(1e-6));
}
