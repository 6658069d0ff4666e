// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fiq/fiqnet/gradient_suite.hpp"
#include "fiq/fiqnet/model.hpp"
#include "fiq/numkit/ops.hpp"

using namespace fiq;
using namespace fiq::fiqnet;
using numkit::MatrixD;
using numkit::MatrixF;
using numkit::ParamStore;
using numkit::Rng;

namespace {

MatrixD random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  MatrixD m(r, c);
  for (auto& v : m.data()) v = rng.uniform(-scale, scale);
  return m;
}

// ---- loop-level reference implementation -------------------------------

MatrixD ref_layer_norm(const MatrixD& x, const MatrixD& g, const MatrixD& b, double eps) {
  MatrixD y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mean = 0;
    for (std::size_t j = 0; j < x.cols(); ++j) mean += x(i, j);
    mean /= x.cols();
    double var = 0;
    for (std::size_t j = 0; j < x.cols(); ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
    var /= x.cols();
    for (std::size_t j = 0; j < x.cols(); ++j)
      y(i, j) = (x(i, j) - mean) / std::sqrt(var + eps) * g(0, j) + b(0, j);
  }
  return y;
}

MatrixD ref_linear(const MatrixD& x, const MatrixD& w) {
  MatrixD y(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j)
      for (std::size_t k = 0; k < x.cols(); ++k) y(i, j) += x(i, k) * w(k, j);
  return y;
}

MatrixD ref_attention(const MatrixD& query, const MatrixD& memory, const ParamStore<double>& s,
                      const std::string& prefix, std::size_t heads,
                      std::vector<MatrixD>* weights = nullptr) {
  const MatrixD q = ref_linear(query, s.at(prefix + ".w_q").value);
  const MatrixD k = ref_linear(memory, s.at(prefix + ".w_k").value);
  const MatrixD v = ref_linear(memory, s.at(prefix + ".w_v").value);
  const std::size_t d = query.cols(), dh = d / heads;
  MatrixD concat(query.rows(), d);
  for (std::size_t h = 0; h < heads; ++h) {
    MatrixD a(query.rows(), memory.rows());
    for (std::size_t i = 0; i < query.rows(); ++i) {
      std::vector<double> score(memory.rows());
      for (std::size_t j = 0; j < memory.rows(); ++j) {
        double dot = 0;
        for (std::size_t c = 0; c < dh; ++c) dot += q(i, h * dh + c) * k(j, h * dh + c);
        score[j] = dot / std::sqrt(static_cast<double>(dh));
      }
      const double mx = *std::max_element(score.begin(), score.end());
      double z = 0;
      for (double& sc : score) z += (sc = std::exp(sc - mx));
      for (std::size_t j = 0; j < memory.rows(); ++j) a(i, j) = score[j] / z;
      for (std::size_t c = 0; c < dh; ++c) {
        double acc = 0;
        for (std::size_t j = 0; j < memory.rows(); ++j) acc += a(i, j) * v(j, h * dh + c);
        concat(i, h * dh + c) = acc;
      }
    }
    if (weights) weights->push_back(a);
  }
  return ref_linear(concat, s.at(prefix + ".w_o").value);
}

MatrixD ref_ffn(const MatrixD& x, const ParamStore<double>& s, const std::string& prefix) {
  MatrixD h = ref_linear(x, s.at(prefix + ".w1").value);
  const MatrixD& b1 = s.at(prefix + ".b1").value;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) {
      const double u = h(i, j) + b1(0, j);
      h(i, j) = 0.5 * u * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (u + 0.044715 * u * u * u)));
    }
  MatrixD y = ref_linear(h, s.at(prefix + ".w2").value);
  const MatrixD& b2 = s.at(prefix + ".b2").value;
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += b2(0, j);
  return y;
}

MatrixD ref_fusion(const MatrixD& x, const MatrixD& mem, const ParamStore<double>& s,
                   const std::string& p, std::size_t heads, double eps) {
  auto ln = [&](const MatrixD& m, const std::string& name) {
    return ref_layer_norm(m, s.at(p + "." + name + ".gain").value,
                          s.at(p + "." + name + ".bias").value, eps);
  };
  const MatrixD n1 = ln(x, "ln1");
  const MatrixD x_self = numkit::add(x, ref_attention(n1, n1, s, p + ".self_attn", heads));
  const MatrixD x_ca =
      numkit::add(x_self, ref_attention(ln(x_self, "ln2"), mem, s, p + ".cross_attn", heads));
  return numkit::add(x_ca, ref_ffn(ln(x_ca, "ln3"), s, p + ".ffn"));
}

void expect_near(const MatrixD& a, const MatrixD& b, double tol) {
  ASSERT_TRUE(a.same_shape(b)) << a.shape_string() << " vs " << b.shape_string();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], tol) << i;
}

void randomize_biases(ParamStore<double>& s, Rng& rng) {
  for (auto& p : s) {
    if (p.init.kind != numkit::Init::Kind::kUniformFanIn) {
      for (auto& v : p.value.data()) v += rng.uniform(-0.3, 0.3);
    }
  }
}

}  // namespace

// ---- positional embedding ----------------------------------------------

TEST(AddPositional, ZeroTableIsIdentity) {
  ParamStore<double> s;
  PositionalEmbedding<double> pe(s, "pos", 6, 3);
  Rng rng(1);
  const MatrixD x = random_matrix(4, 3, rng);
  EXPECT_EQ(pe.forward(x), x);
}

TEST(AddPositional, ZeroFramesReturnTableSlice) {
  ParamStore<double> s;
  PositionalEmbedding<double> pe(s, "pos", 5, 2);
  Rng rng(2);
  pe.table().value = random_matrix(5, 2, rng);
  EXPECT_EQ(pe.forward(MatrixD(3, 2)), numkit::head_rows(pe.table().value, 3));
}

TEST(AddPositional, HandSums) {
  ParamStore<double> s;
  PositionalEmbedding<double> pe(s, "pos", 4, 2);
  pe.table().value = MatrixD::from_rows({{1, 2}, {3, 4}, {5, 6}, {100, 100}});
  const MatrixD x = MatrixD::from_rows({{0.5, -1}, {2, 2}, {-5, 0.25}});
  EXPECT_EQ(pe.forward(x), MatrixD::from_rows({{1.5, 1}, {5, 6}, {0, 6.25}}));
}

TEST(AddPositional, TooManyFramesIsACapacityError) {
  ParamStore<double> s;
  PositionalEmbedding<double> pe(s, "pos", 2, 2);
  EXPECT_THROW(pe.forward(MatrixD(3, 2)), CapacityError);
}

// ---- fuse_mix ------------------------------------------------------------

TEST(FuseMix, ZeroCandidateIsIdentity) {
  Rng rng(3);
  const MatrixD fused = random_matrix(4, 3, rng);
  EXPECT_EQ(fuse_mix(fused, MatrixD(5, 3)), fused);
}

TEST(FuseMix, SingleTokenIsPlainBroadcast) {
  Rng rng(4);
  const MatrixD fused = random_matrix(3, 2, rng);
  const MatrixD ctd = random_matrix(1, 2, rng);
  EXPECT_EQ(fuse_mix(fused, ctd), numkit::add_row_broadcast(fused, ctd));
}

TEST(FuseMix, HandComputation) {
  const MatrixD fused = MatrixD::from_rows({{1, 2}, {3, 4}});
  const MatrixD ctd = MatrixD::from_rows({{0, 3}, {3, 6}, {6, -3}});  // mean = [3, 2]
  EXPECT_EQ(fuse_mix(fused, ctd), MatrixD::from_rows({{4, 4}, {6, 6}}));
  EXPECT_THROW(fuse_mix(fused, MatrixD(2, 3)), DimensionError);
}

// ---- attention / fusion blocks -------------------------------------------

TEST(Attention, WeightRowsAreDistributions) {
  Rng rng(5);
  for (std::size_t heads : {1u, 2u, 4u}) {
    ParamStore<double> s;
    MultiHeadAttention<double> attn(s, "a", 8, heads);
    s.initialize(rng);
    MultiHeadAttention<double>::Cache cache;
    attn.forward(random_matrix(6, 8, rng, 3.0), random_matrix(3, 8, rng, 3.0), &cache);
    ASSERT_EQ(cache.weights.size(), heads);
    for (const auto& w : cache.weights) {
      for (std::size_t i = 0; i < w.rows(); ++i) {
        double sum = 0;
        for (double v : w.row(i)) {
          EXPECT_GE(v, 0.0);
          sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-6);
      }
    }
  }
}

TEST(Attention, IndivisibleHeadsRejected) {
  ParamStore<double> s;
  EXPECT_THROW(MultiHeadAttention<double>(s, "a", 8, 3), ConfigError);
}

TEST(VqCalign, SingleQuestionTokenGetsAllCrossAttention) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  VQCAlign<double> vq(s, "vq", cfg);
  Rng rng(6);
  s.initialize(rng);
  VQCAlign<double>::Cache cache;
  vq.forward(random_matrix(4, 8, rng), random_matrix(1, 8, rng), Mode::kEval, nullptr, &cache);
  for (const auto& w : cache.cross_attn.weights) {
    ASSERT_EQ(w.cols(), 1u);
    for (double v : w.data()) EXPECT_EQ(v, 1.0);
  }
}

TEST(VqCalign, EvalModeIsDeterministic) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  VQCAlign<double> vq(s, "vq", cfg);
  Rng rng(7);
  s.initialize(rng);
  const MatrixD x = random_matrix(4, 8, rng), q = random_matrix(5, 8, rng);
  EXPECT_EQ(vq.forward(x, q, Mode::kEval, nullptr, nullptr),
            vq.forward(x, q, Mode::kEval, nullptr, nullptr));
}

TEST(VqCalign, MatchesLoopLevelReference) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  VQCAlign<double> vq(s, "vq", cfg);
  Rng rng(8);
  s.initialize(rng);
  randomize_biases(s, rng);
  const MatrixD x = random_matrix(4, 8, rng), q = random_matrix(5, 8, rng);
  expect_near(vq.forward(x, q, Mode::kEval, nullptr, nullptr),
              ref_fusion(x, q, s, "vq", cfg.heads, cfg.ln_eps), 1e-12);
}

TEST(VqCalign, WidthMismatchIsADimensionError) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  VQCAlign<double> vq(s, "vq", cfg);
  EXPECT_THROW(vq.forward(MatrixD(4, 8), MatrixD(5, 6), Mode::kEval, nullptr, nullptr),
               DimensionError);
}

TEST(VqCalign, TrainModeWithoutRngIsRejected) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  VQCAlign<double> vq(s, "vq", cfg);
  EXPECT_THROW(vq.forward(MatrixD(4, 8), MatrixD(5, 8), Mode::kTrain, nullptr, nullptr),
               ConfigError);
}

TEST(TransDecoder, ZeroOutputProjectionsPassCandidatesThrough) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  TransDecoder<double> td(s, "td", cfg);
  Rng rng(9);
  s.initialize(rng);
  for (auto& layer : td.layers()) layer.zero_output_projections();
  const MatrixD xc = random_matrix(5, 8, rng), xv = random_matrix(4, 8, rng);
  EXPECT_EQ(td.forward(xc, xv, Mode::kEval, nullptr, nullptr), xc);
  Rng drop(1);
  EXPECT_EQ(td.forward(xc, xv, Mode::kTrain, &drop, nullptr), xc);
}

TEST(TransDecoder, SingleFrameGetsAllCrossAttention) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  TransDecoder<double> td(s, "td", cfg);
  Rng rng(10);
  s.initialize(rng);
  TransDecoder<double>::Cache cache;
  td.forward(random_matrix(5, 8, rng), random_matrix(1, 8, rng), Mode::kEval, nullptr, &cache);
  for (const auto& layer : cache.layers)
    for (const auto& w : layer.cross_attn.weights)
      for (double v : w.data()) EXPECT_EQ(v, 1.0);
}

TEST(TransDecoder, MatchesLoopLevelReference) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  TransDecoder<double> td(s, "td", cfg);
  Rng rng(11);
  s.initialize(rng);
  randomize_biases(s, rng);
  const MatrixD xc = random_matrix(5, 8, rng), xv = random_matrix(4, 8, rng);
  MatrixD ref = xc;
  for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
    ref = ref_fusion(ref, xv, s, "td." + std::to_string(l), cfg.heads, cfg.ln_eps);
  }
  expect_near(td.forward(xc, xv, Mode::kEval, nullptr, nullptr), ref, 1e-12);
}

TEST(FusionLayer, ZeroOutputProjectionIsIdentityForVqCalign) {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<double> s;
  VQCAlign<double> vq(s, "vq", cfg);
  Rng rng(12);
  s.initialize(rng);
  vq.layer().zero_output_projections();
  const MatrixD x = random_matrix(4, 8, rng);
  EXPECT_EQ(vq.forward(x, random_matrix(3, 8, rng), Mode::kEval, nullptr, nullptr), x);
}

TEST(FusionLayer, ShapesPreservedAcrossConfigurations) {
  Rng rng(13);
  for (std::size_t d : {4u, 8u, 12u}) {
    for (std::size_t h : {1u, 2u, 4u}) {
      if (d % h != 0) continue;
      ModelConfig cfg = ModelConfig::toy();
      cfg.dim = d;
      cfg.heads = h;
      ParamStore<double> s;
      VQCAlign<double> vq(s, "vq", cfg);
      TransDecoder<double> td(s, "td", cfg);
      s.initialize(rng);
      for (std::size_t n : {1u, 3u, 7u}) {
        for (std::size_t t : {1u, 5u}) {
          Rng drop(n * 10 + t);
          const MatrixD x = random_matrix(n, d, rng), q = random_matrix(t, d, rng);
          const MatrixD out = vq.forward(x, q, Mode::kTrain, &drop, nullptr);
          EXPECT_EQ(out.rows(), n);
          EXPECT_EQ(out.cols(), d);
          const MatrixD ctd = td.forward(q, x, Mode::kTrain, &drop, nullptr);
          EXPECT_EQ(ctd.rows(), t);
          EXPECT_EQ(ctd.cols(), d);
        }
      }
    }
  }
}

// ---- full network ----------------------------------------------------------

namespace {

struct ToyNet {
  ModelConfig cfg = ModelConfig::toy();
  ParamStore<float> store;
  FiqNet<float> net{cfg, store};
  MatrixF video, question;
  std::vector<MatrixF> options;

  explicit ToyNet(std::uint64_t seed) {
    Rng rng(seed);
    store.initialize(rng);
    auto rnd = [&rng](std::size_t r, std::size_t c) {
      MatrixF m(r, c);
      for (auto& v : m.data()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
      return m;
    };
    video = rnd(4, 8);
    question = rnd(5, 8);
    for (std::size_t i = 0; i < 4; ++i) options.push_back(rnd(3 + i, 8));
  }

  ScoringInputs<float> inputs(const std::vector<const MatrixF*>& order) const {
    ScoringInputs<float> in;
    in.video = &video;
    in.question = &question;
    in.candidates = order;
    return in;
  }
};

}  // namespace

TEST(ScoreCandidates, IdenticalCandidatesScoreEqually) {
  ToyNet toy(14);
  const MatrixF& c = toy.options[1];
  const auto scores = toy.net.score_candidates(toy.inputs({&c, &c, &c, &c}), Mode::kEval, nullptr,
                                               nullptr);
  for (float s : scores) EXPECT_EQ(s, scores[0]);
  EXPECT_EQ(predict<float>(scores), 0u);
}

TEST(ScoreCandidates, PermutingCandidatesPermutesScores) {
  ToyNet toy(15);
  const auto& o = toy.options;
  const auto base =
      toy.net.score_candidates(toy.inputs({&o[0], &o[1], &o[2], &o[3]}), Mode::kEval, nullptr, nullptr);
  const auto perm =
      toy.net.score_candidates(toy.inputs({&o[2], &o[0], &o[3], &o[1]}), Mode::kEval, nullptr, nullptr);
  EXPECT_EQ(perm[0], base[2]);
  EXPECT_EQ(perm[1], base[0]);
  EXPECT_EQ(perm[2], base[3]);
  EXPECT_EQ(perm[3], base[1]);
}

TEST(ScoreCandidates, WrongCandidateCountIsAFormatError) {
  ToyNet toy(16);
  const auto& o = toy.options;
  EXPECT_THROW(toy.net.score_candidates(toy.inputs({&o[0], &o[1], &o[2]}), Mode::kEval, nullptr,
                                        nullptr),
               FormatError);
}

TEST(Predict, ExamplesAndTieRule) {
  const std::vector<double> a{0.1, 0.9, 0.2, 0.3};
  EXPECT_EQ(predict<double>(a), 1u);
  const std::vector<double> ties{1, 1, 1, 1};
  EXPECT_EQ(predict<double>(ties), 0u);
  const std::vector<double> nan{0, std::nan(""), 0, 0};
  EXPECT_THROW(predict<double>(nan), InferenceError);
}

TEST(Predict, InvariantUnderIncreasingTransforms) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(4);
    for (auto& v : s) v = std::round(rng.uniform(-3, 3) * 4) / 4;  // ties happen
    std::vector<double> affine(4), cubic(4);
    for (int i = 0; i < 4; ++i) {
      affine[i] = s[i] * 2 + 5;
      cubic[i] = s[i] * s[i] * s[i] + s[i];
    }
    EXPECT_EQ(predict<double>(s), predict<double>(affine));
    EXPECT_EQ(predict<double>(s), predict<double>(cubic));
  }
}

// ---- gradients ---------------------------------------------------------------

TEST(GradientSuite, EveryBlockPassesInBothModes) {
  for (Mode mode : {Mode::kEval, Mode::kTrain}) {
    GradientSuiteOptions options;
    options.mode = mode;
    for (const auto& r : run_gradient_suite(options)) {
      EXPECT_LT(r.report.max_rel_error, 1e-6)
          << r.block << " worst " << r.report.worst_param << " mode "
          << (mode == Mode::kTrain ? "train" : "eval");
    }
  }
}

TEST(GradientSuite, CorruptedGradientIsCaughtAndNamed) {
  GradientSuiteOptions options;
  options.corrupt_param = "vq.cross_attn.w_k";
  const auto r = check_block("full_model", options);
  EXPECT_GT(r.report.max_rel_error, 1e-5);
  EXPECT_EQ(r.report.worst_param, "vq.cross_attn.w_k");
}
