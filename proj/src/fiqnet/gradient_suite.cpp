// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/fiqnet/gradient_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>

#include "fiq/fiqnet/model.hpp"

namespace fiq::fiqnet {

namespace {

using numkit::MatrixD;
using numkit::ParamStore;
using numkit::Rng;

constexpr std::uint64_t kMaskTag = 0x6D61736B;  // dropout masks
constexpr std::uint64_t kDataTag = 0x64617461;  // inputs and projections

MatrixD random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  MatrixD m(rows, cols);
  for (auto& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

numkit::Param<double>& add_input(ParamStore<double>& store, const std::string& name,
                                 std::size_t rows, std::size_t cols, Rng& rng) {
  auto& p = store.add(name, rows, cols, numkit::Init::zeros());
  p.value = random_matrix(rows, cols, rng);
  return p;
}

double inner(const MatrixD& a, const MatrixD& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

// Everything an objective needs lives here so the closures stay small.
struct Harness {
  ParamStore<double> store;
  std::function<double(ParamStore<double>&, bool)> objective;
  std::shared_ptr<void> block;  // keeps the bound block alive
};

Harness build_harness(const std::string& name, const GradientSuiteOptions& o) {
  ModelConfig cfg = o.config;
  cfg.validate();
  const std::size_t d = cfg.dim;
  const std::size_t n = o.frames;
  const std::size_t tq = o.question_tokens;
  const std::size_t tc = o.candidate_tokens;
  const Mode mode = o.mode;
  const std::uint64_t seed = o.seed;

  Harness h;
  Rng init_rng = Rng::derive(seed, 1);
  Rng data_rng = Rng::derive(seed, kDataTag);

  auto mask_rng = [seed] { return Rng::derive(seed, kMaskTag); };

  if (name == "layer_norm") {
    auto block = std::make_shared<LayerNorm<double>>(h.store, "ln", d, cfg.ln_eps);
    h.store.initialize(init_rng);
    // perturb the affine part away from (1, 0) so both gradients are exercised
    for (auto& v : block->gain().value.data()) v += data_rng.uniform(-0.5, 0.5);
    for (auto& v : block->bias().value.data()) v = data_rng.uniform(-0.5, 0.5);
    add_input(h.store, "input.x", n, d, data_rng);
    const MatrixD proj = random_matrix(n, d, data_rng);
    h.objective = [block, proj](ParamStore<double>& s, bool with_grad) {
      auto& x = s.at("input.x");
      LayerNorm<double>::Cache cache;
      const MatrixD y = block->forward(x.value, &cache);
      if (with_grad) numkit::axpy(x.grad, block->backward(cache, proj));
      return inner(y, proj);
    };
    h.block = block;
  } else if (name == "self_attention" || name == "cross_attention") {
    const bool self = name == "self_attention";
    auto block = std::make_shared<MultiHeadAttention<double>>(h.store, "attn", d, cfg.heads);
    h.store.initialize(init_rng);
    add_input(h.store, "input.x", n, d, data_rng);
    if (!self) add_input(h.store, "input.memory", tq, d, data_rng);
    const MatrixD proj = random_matrix(n, d, data_rng);
    h.objective = [block, proj, self](ParamStore<double>& s, bool with_grad) {
      auto& x = s.at("input.x");
      const MatrixD& mem = self ? x.value : s.at("input.memory").value;
      MultiHeadAttention<double>::Cache cache;
      const MatrixD y = block->forward(x.value, mem, &cache);
      if (with_grad) {
        auto g = block->backward(cache, proj);
        numkit::axpy(x.grad, g.d_query);
        if (self) {
          numkit::axpy(x.grad, g.d_memory);
        } else {
          numkit::axpy(s.at("input.memory").grad, g.d_memory);
        }
      }
      return inner(y, proj);
    };
    h.block = block;
  } else if (name == "feed_forward") {
    auto block = std::make_shared<FeedForward<double>>(h.store, "ffn", d, cfg.ffn_multiplier);
    h.store.initialize(init_rng);
    for (auto& v : h.store.at("ffn.b1").value.data()) v = data_rng.uniform(-0.5, 0.5);
    for (auto& v : h.store.at("ffn.b2").value.data()) v = data_rng.uniform(-0.5, 0.5);
    add_input(h.store, "input.x", n, d, data_rng);
    const MatrixD proj = random_matrix(n, d, data_rng);
    h.objective = [block, proj](ParamStore<double>& s, bool with_grad) {
      auto& x = s.at("input.x");
      FeedForward<double>::Cache cache;
      const MatrixD y = block->forward(x.value, &cache);
      if (with_grad) numkit::axpy(x.grad, block->backward(cache, proj));
      return inner(y, proj);
    };
    h.block = block;
  } else if (name == "scoring_head") {
    auto block = std::make_shared<ScoringHead<double>>(h.store, "head", d);
    h.store.initialize(init_rng);
    for (auto& v : h.store.at("head.proj.b").value.data()) v = data_rng.uniform(-0.5, 0.5);
    add_input(h.store, "input.x", n, d, data_rng);
    h.objective = [block](ParamStore<double>& s, bool with_grad) {
      auto& x = s.at("input.x");
      ScoringHead<double>::Cache cache;
      const double score = block->forward(x.value, &cache);
      if (with_grad) numkit::axpy(x.grad, block->backward(cache, 1.0));
      return score;
    };
    h.block = block;
  } else if (name == "trans_decoder_layer" || name == "vq_calign") {
    // Same sublayer stack; the decoder layer runs candidate tokens against
    // frames, VQ-CAlign runs frames against question tokens.
    const bool decoder = name == "trans_decoder_layer";
    auto block = std::make_shared<FusionLayer<double>>(h.store, decoder ? "td.0" : "vq", cfg);
    h.store.initialize(init_rng);
    const std::size_t rows = decoder ? tc : n;
    const std::size_t mem_rows = decoder ? n : tq;
    add_input(h.store, "input.x", rows, d, data_rng);
    add_input(h.store, "input.memory", mem_rows, d, data_rng);
    const MatrixD proj = random_matrix(rows, d, data_rng);
    h.objective = [block, proj, mode, mask_rng](ParamStore<double>& s, bool with_grad) {
      auto& x = s.at("input.x");
      auto& mem = s.at("input.memory");
      Rng rng = mask_rng();
      FusionLayer<double>::Cache cache;
      const MatrixD y = block->forward(x.value, mem.value, mode, &rng, &cache);
      if (with_grad) {
        auto g = block->backward(cache, proj);
        numkit::axpy(x.grad, g.d_x);
        numkit::axpy(mem.grad, g.d_memory);
      }
      return inner(y, proj);
    };
    h.block = block;
  } else if (name == "full_model") {
    auto net = std::make_shared<FiqNet<double>>(cfg, h.store);
    h.store.initialize(init_rng);
    // nonzero positions so e_pos gradients flow through a nontrivial point
    for (auto& v : h.store.at("pos.e_pos").value.data()) v = data_rng.uniform(-0.1, 0.1);
    struct Inputs {
      MatrixD video, question;
      std::array<MatrixD, kOptionCount> options;
    };
    auto in = std::make_shared<Inputs>();
    in->video = random_matrix(n, d, data_rng);
    in->question = random_matrix(tq, d, data_rng);
    for (std::size_t i = 0; i < kOptionCount; ++i) {
      in->options[i] = random_matrix(tc + i % 2, d, data_rng);
    }
    const std::size_t answer = 2;
    h.objective = [net, in, mode, mask_rng, answer](ParamStore<double>&, bool with_grad) {
      ScoringInputs<double> inputs;
      inputs.video = &in->video;
      inputs.question = &in->question;
      for (const auto& m : in->options) inputs.candidates.push_back(&m);
      Rng rng = mask_rng();
      FiqNet<double>::Cache cache;
      const auto scores = net->score_candidates(inputs, mode, &rng, &cache);
      const double mx = *std::max_element(scores.begin(), scores.end());
      double z = 0.0;
      for (double s : scores) z += std::exp(s - mx);
      const double loss = std::log(z) + mx - scores[answer];
      if (with_grad) {
        std::array<double, kOptionCount> d_scores{};
        for (std::size_t i = 0; i < kOptionCount; ++i) {
          d_scores[i] = std::exp(scores[i] - mx) / z - (i == answer ? 1.0 : 0.0);
        }
        net->backward(cache, d_scores);
      }
      return loss;
    };
    h.block = net;
  } else {
    throw ConfigError("unknown gradient-suite block '" + name + "'");
  }
  return h;
}

}  // namespace

const std::vector<std::string>& gradient_suite_blocks() {
  static const std::vector<std::string> blocks = {
      "layer_norm",   "self_attention",      "cross_attention", "feed_forward",
      "scoring_head", "trans_decoder_layer", "vq_calign",       "full_model"};
  return blocks;
}

BlockCheckResult check_block(const std::string& block, const GradientSuiteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Harness h = build_harness(block, options);
  numkit::GradCheckOptions gc;
  gc.step = options.step;
  if (!options.corrupt_param.empty()) {
    const std::string target = options.corrupt_param;
    gc.after_backward = [target](ParamStore<double>& s) {
      if (auto* p = s.find(target); p != nullptr && p->grad.size() > 0) p->grad.data()[0] += 1.0;
    };
  }
  BlockCheckResult result;
  result.block = block;
  result.report = numkit::grad_check(h.objective, h.store, gc);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<BlockCheckResult> run_gradient_suite(const GradientSuiteOptions& options) {
  std::vector<BlockCheckResult> results;
  for (const auto& block : gradient_suite_blocks()) results.push_back(check_block(block, options));
  return results;
}

}  // namespace fiq::fiqnet
