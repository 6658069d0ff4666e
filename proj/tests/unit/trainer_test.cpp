// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include <unistd.h>

#include "fiq/acceptance/fixtures.hpp"
#include "fiq/error.hpp"
#include "fiq/fiqnet/checkpoint.hpp"
#include "fiq/trainer/config.hpp"
#include "fiq/trainer/dataset.hpp"
#include "fiq/trainer/evaluate.hpp"
#include "fiq/trainer/loss.hpp"
#include "fiq/trainer/optimizer.hpp"
#include "fiq/trainer/trainer.hpp"

using namespace fiq;
using namespace fiq::trainer;
using qagen::QARecord;
using qagen::TaskType;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fiq_tr_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

struct SmallRun {
  acceptance::OverfitFixture fixture;
  std::vector<Example> examples;
};

SmallRun small_run(std::size_t count = 8) {
  SmallRun r{acceptance::overfit_fixture(count, 3), {}};
  r.fixture.train.batch_size = 4;
  r.fixture.train.epochs = 3;
  r.fixture.model.dropout = 0.2;
  encoders::SyntheticSource src(r.fixture.features);
  r.examples = resolve_examples(r.fixture.records, src, r.fixture.model);
  return r;
}

bool same_params(const numkit::ParamStore<float>& a, const numkit::ParamStore<float>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !(a[i].value == b[i].value) || !(a[i].ema == b[i].ema)) return false;
  }
  return true;
}

QARecord rec(TaskType t, std::size_t answer) {
  QARecord r;
  r.record_id = "r";
  r.video_id = "v";
  r.question = "q?";
  r.options = {"a", "b", "c", "d"};
  r.task_type = t;
  r.answer_idx = answer;
  return r;
}

}  // namespace

// ---- loss ------------------------------------------------------------------

TEST(Loss, UniformScoresGiveLogFour) {
  const std::array<double, 4> s{0, 0, 0, 0};
  const auto r = softmax_cross_entropy<double>(s, 2);
  EXPECT_NEAR(r.loss, std::log(4.0), 1e-15);
  EXPECT_NEAR(r.loss, 1.3863, 1e-4);
  EXPECT_DOUBLE_EQ(r.grad[2], -0.75);
  EXPECT_DOUBLE_EQ(r.grad[0], 0.25);
}

TEST(Loss, DominantCorrectScoreDrivesLossToZero) {
  double prev = std::numeric_limits<double>::infinity();
  for (double big : {1.0, 10.0, 100.0, 1000.0}) {
    const std::array<double, 4> s{0, 0, 0, big};
    const double l = softmax_cross_entropy<double>(s, 3).loss;
    EXPECT_LE(l, prev);
    if (big <= 10.0) {
      EXPECT_LT(l, prev);
    }
    prev = l;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(Loss, MatchesDirectFormulaAndGradSumsToZero) {
  numkit::Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::array<double, 4> s{};
    for (auto& v : s) v = rng.uniform(-5, 5);
    const std::size_t idx = rng.below(4);
    const auto r = softmax_cross_entropy<double>(s, idx);
    double z = 0;
    for (double v : s) z += std::exp(v);
    EXPECT_NEAR(r.loss, -std::log(std::exp(s[idx]) / z), 1e-12);
    EXPECT_NEAR(std::accumulate(r.grad.begin(), r.grad.end(), 0.0), 0.0, 1e-15);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(r.grad[i], std::exp(s[i]) / z - (i == idx), 1e-12);
    }
  }
}

TEST(Loss, RejectsBadInput) {
  const std::array<double, 4> nan{0, std::nan(""), 0, 0};
  EXPECT_THROW(softmax_cross_entropy<double>(nan, 0), NonFiniteError);
  const std::array<double, 4> ok{0, 0, 0, 0};
  EXPECT_THROW(softmax_cross_entropy<double>(ok, 4), ConfigError);
}

// ---- schedule ----------------------------------------------------------------

TEST(LrSchedule, HalfCosineEndpoints) {
  TrainConfig c;
  c.lr_base = 1e-4;
  EXPECT_EQ(lr_at(0, 1000, c), 1e-4);
  EXPECT_NEAR(lr_at(500, 1000, c), 5e-5, 1e-9);
  EXPECT_EQ(lr_at(1000, 1000, c), 0.0);
  for (std::size_t s = 1; s <= 1000; ++s) EXPECT_LE(lr_at(s, 1000, c), lr_at(s - 1, 1000, c));
}

TEST(LrSchedule, Errors) {
  TrainConfig c;
  EXPECT_THROW(lr_at(0, 0, c), ConfigError);
  EXPECT_THROW(lr_at(11, 10, c), ConfigError);
}

TEST(LrSchedule, RestartsReading) {
  TrainConfig c;
  c.schedule = LrSchedule::kRestarts;
  c.decay_factor = 2;
  EXPECT_EQ(lr_at(0, 100, c), c.lr_base);
  EXPECT_NEAR(lr_at(25, 100, c), c.lr_base / 2, 1e-12);
  EXPECT_EQ(lr_at(50, 100, c), c.lr_base);
  EXPECT_EQ(lr_at(100, 100, c), 0.0);
  EXPECT_EQ(parse_schedule("restarts"), LrSchedule::kRestarts);
  EXPECT_THROW(parse_schedule("linear"), ConfigError);
}

// ---- optimizer -----------------------------------------------------------------

TEST(Adam, ZeroGradientLeavesValuesAndMovesEma) {
  numkit::ParamStore<double> s;
  auto& p = s.add("w", 2, 2, numkit::Init::zeros());
  p.value.fill(3.0);
  p.ema.fill(0.0);
  const auto before = p.value;
  Adam<double> adam(s);
  TrainConfig c;
  s.zero_grad();
  adam.step(s, 0.1, c);
  update_ema(s, c.ema_decay);
  EXPECT_EQ(p.value, before);
  EXPECT_NEAR(p.ema(0, 0), 3.0 * (1 - 0.9999), 1e-15);
}

TEST(Adam, FirstStepsMatchHandRecursion) {
  numkit::ParamStore<double> s;
  auto& p = s.add("w", 1, 1, numkit::Init::zeros());
  p.value(0, 0) = 1.0;
  Adam<double> adam(s);
  TrainConfig c;
  double m = 0, v = 0, x = 1.0;
  const double grads[] = {0.5, -0.25, 2.0};
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    p.grad(0, 0) = g;
    adam.step(s, 0.01, c);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    x -= 0.01 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    EXPECT_NEAR(p.value(0, 0), x, 1e-15);
  }
  EXPECT_EQ(adam.steps(), 3u);
}

template <typename T>
void check_ema_closed_form(double tolerance) {
  for (std::size_t k : {1u, 10u, 1000u}) {
    numkit::ParamStore<T> s;
    auto& p = s.add("w", 1, 3, numkit::Init::zeros());
    p.value = numkit::Matrix<T>::from_rows({{T(1.5), T(-0.25), T(7)}});
    p.ema.fill(T(0));
    for (std::size_t i = 0; i < k; ++i) update_ema(s, 0.9999);
    for (std::size_t j = 0; j < 3; ++j) {
      const double v = static_cast<double>(p.value(0, j));
      const double expected = v * (1 - std::pow(0.9999, static_cast<double>(k)));
      EXPECT_LE(std::abs(static_cast<double>(p.ema(0, j)) - expected) / std::abs(expected),
                tolerance)
          << "k=" << k;
    }
  }
}

TEST(Ema, ClosedFormDouble) { check_ema_closed_form<double>(1e-6); }
TEST(Ema, ClosedFormFloat) { check_ema_closed_form<float>(1e-4); }

// ---- dataset -------------------------------------------------------------------

TEST(Dataset, MissingFeaturesListed) {
  TempDir dir;
  encoders::FeatureStore store(dir.str());
  auto f = acceptance::overfit_fixture(4, 1);
  encoders::SyntheticSource synth(f.features);
  // give records 0 and 2 everything
  for (std::size_t i : {0u, 2u}) {
    const auto& r = f.records[i];
    store.put_video(synth.video(r.video_id));
    store.put_text(synth.text(r.question));
    for (const auto& o : r.options) store.put_text(synth.text(o));
  }
  try {
    resolve_examples(f.records, store, f.model);
    FAIL();
  } catch (const MissingFeaturesError& e) {
    EXPECT_EQ(e.record_ids(), (std::vector<std::string>{f.records[1].record_id,
                                                        f.records[3].record_id}));
  }
  f.records.erase(f.records.begin() + 3);
  f.records.erase(f.records.begin() + 1);
  EXPECT_EQ(resolve_examples(f.records, store, f.model).size(), 2u);
}

TEST(Dataset, ShapeMismatchNamed) {
  auto f = acceptance::overfit_fixture(4, 1);
  auto features = f.features;
  features.frames += 1;
  encoders::SyntheticSource src(features);
  EXPECT_THROW(resolve_examples(f.records, src, f.model), DimensionError);
}

// ---- trainer -------------------------------------------------------------------

TEST(Trainer, SameSeedBitwiseIdentical) {
  numkit::CheckedModeGuard checked(true);
  auto run = small_run();
  Trainer a(run.fixture.model, run.fixture.train);
  Trainer b(run.fixture.model, run.fixture.train);
  const auto la = a.fit(run.examples);
  const auto lb = b.fit(run.examples);
  ASSERT_EQ(la.size(), 3u);
  for (std::size_t i = 0; i < la.size(); ++i) EXPECT_EQ(la[i].mean_loss, lb[i].mean_loss);
  EXPECT_TRUE(same_params(a.params(), b.params()));
}

TEST(Trainer, BatchOrderDoesNotMatter) {
  numkit::CheckedModeGuard checked(true);
  auto run = small_run();
  Trainer a(run.fixture.model, run.fixture.train);
  Trainer b(run.fixture.model, run.fixture.train);
  std::vector<const Example*> batch;
  for (const auto& e : run.examples) batch.push_back(&e);
  const double la = a.step(batch, 10);
  std::reverse(batch.begin(), batch.end());
  std::swap(batch[1], batch[4]);
  const double lb = b.step(batch, 10);
  EXPECT_EQ(la, lb);
  EXPECT_TRUE(same_params(a.params(), b.params()));
}

TEST(Trainer, NonFiniteInputAbortsStepNamingRecord) {
  auto run = small_run(4);
  Trainer t(run.fixture.model, run.fixture.train);
  const auto before = t.params();
  auto bad = run.examples;
  {
    numkit::CheckedModeGuard unchecked(false);
    auto video = *bad[2].video;
    video(0, 0) = std::numeric_limits<float>::quiet_NaN();
    bad[2].video = std::make_shared<const numkit::MatrixF>(video);
  }
  std::vector<const Example*> batch;
  for (const auto& e : bad) batch.push_back(&e);
  try {
    t.step(batch, 10);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.record_id(), bad[2].record.record_id);
  }
  EXPECT_TRUE(same_params(t.params(), before));
  EXPECT_EQ(t.global_step(), 0u);
}

TEST(Trainer, SmoothedLossNonIncreasingOnOverfitSet) {
  auto f = acceptance::overfit_fixture();
  f.train.epochs = 60;
  encoders::SyntheticSource src(f.features);
  const auto ex = resolve_examples(f.records, src, f.model);
  Trainer t(f.model, f.train);
  const auto logs = t.fit(ex);
  std::vector<double> block;
  for (std::size_t b = 0; b + 5 <= logs.size(); b += 5) {
    double s = 0;
    for (std::size_t i = b; i < b + 5; ++i) s += logs[i].mean_loss;
    block.push_back(s / 5);
  }
  for (std::size_t i = 1; i < block.size(); ++i) EXPECT_LE(block[i], block[i - 1]) << i;
}

TEST(Trainer, CheckpointResumeReproducesNextEpoch) {
  numkit::CheckedModeGuard checked(true);
  TempDir dir;
  auto run = small_run();
  Trainer full(run.fixture.model, run.fixture.train);
  full.train_epoch(run.examples);
  fiqnet::save_checkpoint(dir.str(), full.checkpoint());
  const double next = full.train_epoch(run.examples).mean_loss;

  Trainer resumed(run.fixture.model, run.fixture.train);
  resumed.resume(fiqnet::load_checkpoint(dir.str()));
  EXPECT_EQ(resumed.epoch(), 1u);
  EXPECT_EQ(resumed.train_epoch(run.examples).mean_loss, next);
  EXPECT_TRUE(same_params(full.params(), resumed.params()));
}

TEST(Checkpoint, RoundTripAndBitwiseStableFiles) {
  TempDir a, b;
  auto run = small_run();
  Trainer t(run.fixture.model, run.fixture.train);
  t.train_epoch(run.examples);
  fiqnet::save_checkpoint(a.str(), t.checkpoint());
  fiqnet::save_checkpoint(b.str(), t.checkpoint());
  const auto back = fiqnet::load_checkpoint(a.str());
  EXPECT_TRUE(same_params(back.params, t.params()));
  EXPECT_EQ(back.config.canonical(), run.fixture.model.canonical());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.str())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a.str());
    std::ifstream fa(entry.path(), std::ios::binary), fb(std::filesystem::path(b.str()) / rel,
                                                        std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb) << rel;
  }
}

TEST(Checkpoint, ConfigMismatchAndCorruption) {
  TempDir dir;
  auto run = small_run();
  Trainer t(run.fixture.model, run.fixture.train);
  fiqnet::save_checkpoint(dir.str(), t.checkpoint());
  auto other = run.fixture.model;
  other.decoder_layers = 2;
  Trainer u(other, run.fixture.train);
  EXPECT_THROW(u.resume(fiqnet::load_checkpoint(dir.str())), ConfigError);

  const auto value_file = std::filesystem::path(dir.str()) / "params" / "head.score.w.value.fiqf";
  ASSERT_TRUE(std::filesystem::exists(value_file));
  auto corrupt_at = [&](std::streamoff offset) {
    std::fstream f(value_file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(offset);
    const char c = static_cast<char>(f.get());
    f.seekp(offset);
    f.put(static_cast<char>(c ^ 0x40));
  };
  corrupt_at(20);  // inside the id
  EXPECT_THROW(fiqnet::load_checkpoint(dir.str()), FormatError);
  corrupt_at(20);
  EXPECT_NO_THROW(fiqnet::load_checkpoint(dir.str()));
  corrupt_at(32);  // inside the payload
  EXPECT_THROW(fiqnet::load_checkpoint(dir.str()), FormatError);
  EXPECT_THROW(fiqnet::load_checkpoint(dir.str() + "/nope"), ConfigError);
}

// ---- evaluation ----------------------------------------------------------------

TEST(EvalReport, KnownCountsAndMacroAverage) {
  std::vector<QARecord> records;
  std::vector<std::size_t> preds;
  // B: 3/4, F: 1/2, R: 0/1, C: 2/2, I: 1/3, A: 5/5, GEN: 0/3
  const std::vector<std::tuple<TaskType, int, int>> plan = {
      {TaskType::kB, 3, 4}, {TaskType::kF, 1, 2}, {TaskType::kR, 0, 1}, {TaskType::kC, 2, 2},
      {TaskType::kI, 1, 3}, {TaskType::kA, 5, 5}, {TaskType::kGen, 0, 3}};
  for (const auto& [task, correct, total] : plan) {
    for (int i = 0; i < total; ++i) {
      records.push_back(rec(task, 1));
      preds.push_back(i < correct ? 1 : 2);
    }
  }
  const auto r = build_report(records, preds);
  const double mean = (0.75 + 0.5 + 0.0 + 1.0 + 1.0 / 3.0 + 1.0) / 6.0;
  EXPECT_NEAR(r.average, mean, 1e-12);
  EXPECT_EQ(r.tasks_averaged, 6u);
  EXPECT_EQ(r.tasks.at(TaskType::kGen).total, 3u);
  EXPECT_EQ(r.overall.correct, 12u);
  EXPECT_EQ(r.overall.total, 20u);
  const auto j = r.to_json();
  EXPECT_EQ(j["tasks"]["I"]["total"], 3);
  EXPECT_NE(r.table().find("GEN"), std::string::npos);
}

TEST(EvalReport, AverageOverPresentTasksOnly) {
  const auto r = build_report({rec(TaskType::kB, 0), rec(TaskType::kC, 0), rec(TaskType::kGen, 0)},
                              {0, 1, 0});
  EXPECT_EQ(r.tasks_averaged, 2u);
  EXPECT_DOUBLE_EQ(r.average, 0.5);
  EXPECT_THROW(build_report({rec(TaskType::kB, 0)}, {}), DimensionError);
}

TEST(EvalReport, PerfectPredictionsScoreOne) {
  std::vector<QARecord> records;
  std::vector<std::size_t> preds;
  for (std::size_t i = 0; i < 60; ++i) {
    records.push_back(rec(qagen::kBenchmarkTasks[i % 6], i % 4));
    preds.push_back(i % 4);
  }
  const auto r = build_report(records, preds);
  for (const auto& [t, s] : r.tasks) EXPECT_EQ(s.accuracy(), 1.0);
  EXPECT_EQ(r.average, 1.0);
}

TEST(Evaluate, SymmetricCandidatesTieToIndexZero) {
  auto f = acceptance::overfit_fixture(12, 2);
  for (auto& r : f.records) {
    r.options = {"same text", "same text", "same text", "same text"};
  }
  encoders::SyntheticSource src(f.features);
  const auto ex = resolve_examples(f.records, src, f.model);
  Trainer t(f.model, f.train);
  const auto preds = predict_examples(f.model, t.params(), ex, false);
  for (auto p : preds) EXPECT_EQ(p, 0u);
  std::size_t at_zero = 0;
  for (const auto& r : f.records) at_zero += r.answer_idx == 0;
  EXPECT_DOUBLE_EQ(evaluate(f.model, t.params(), ex, false).overall.accuracy(),
                   static_cast<double>(at_zero) / 12.0);
}

TEST(Evaluate, ParallelMatchesChecked) {
  auto run = small_run(16);
  Trainer t(run.fixture.model, run.fixture.train);
  t.train_epoch(run.examples);
  std::vector<std::size_t> checked_preds;
  {
    numkit::CheckedModeGuard checked(true);
    checked_preds = predict_examples(run.fixture.model, t.params(), run.examples, true);
  }
  numkit::CheckedModeGuard fast(false);
  EXPECT_EQ(predict_examples(run.fixture.model, t.params(), run.examples, true), checked_preds);
}

TEST(RandomBaseline, NearQuarter) {
  std::vector<QARecord> records;
  for (std::size_t i = 0; i < 2000; ++i) records.push_back(rec(TaskType::kB, i % 4));
  const double one_draw = random_baseline_accuracy(records, 9, 1);
  EXPECT_NEAR(one_draw, 0.25, 0.05);
  EXPECT_NEAR(random_baseline_accuracy(records, 9), 0.25, 0.01);
}
