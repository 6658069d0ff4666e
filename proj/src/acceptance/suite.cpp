// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/acceptance/suite.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fiq/acceptance/fixtures.hpp"
#include "fiq/cli/commands.hpp"
#include "fiq/fiqnet/fusion.hpp"
#include "fiq/fiqnet/gradient_suite.hpp"
#include "fiq/numkit/ops.hpp"
#include "fiq/qagen/assemble.hpp"
#include "fiq/qagen/pipeline.hpp"
#include "fiq/qagen/text.hpp"
#include "fiq/qagen/validate.hpp"
#include "fiq/trainer/evaluate.hpp"
#include "fiq/trainer/optimizer.hpp"
#include "fiq/trainer/trainer.hpp"

namespace fiq::acceptance {
namespace fs = std::filesystem;
using numkit::MatrixD;
using numkit::Rng;

namespace {

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

MatrixD random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -3.0, double hi = 3.0) {
  MatrixD m(r, c);
  for (auto& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

// ---- naive kernel oracles ---------------------------------------------------

MatrixD naive_matmul(const MatrixD& a, const MatrixD& b) {
  MatrixD c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

MatrixD naive_softmax(const MatrixD& m) {
  MatrixD out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double mx = m(i, 0);
    for (std::size_t j = 1; j < m.cols(); ++j) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) sum += std::exp(m(i, j) - mx);
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = std::exp(m(i, j) - mx) / sum;
  }
  return out;
}

MatrixD naive_layer_norm(const MatrixD& m, const MatrixD& gain, const MatrixD& bias, double eps) {
  MatrixD out(m.rows(), m.cols());
  const double n = static_cast<double>(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) mean += m(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) var += (m(i, j) - mean) * (m(i, j) - mean);
    var /= n;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, j) = (m(i, j) - mean) / std::sqrt(var + eps) * gain(0, j) + bias(0, j);
    }
  }
  return out;
}

// ---- criteria ----------------------------------------------------------------

CriterionResult gradient_suite() {
  numkit::CheckedModeGuard checked(true);
  const auto start = std::chrono::steady_clock::now();
  fiqnet::GradientSuiteOptions options;  // N=4, T=5, D=8, H=2, train mode
  const auto results = fiqnet::run_gradient_suite(options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double worst = 0.0;
  std::string worst_block;
  for (const auto& r : results) {
    if (r.report.max_rel_error >= worst) {
      worst = r.report.max_rel_error;
      worst_block = r.block + "/" + r.report.worst_param;
    }
  }
  const bool ok = results.size() == 8 && worst < 1e-5 && seconds < 60.0;
  return {"", ok,
          fmt("%zu blocks, max rel error %.3e at %s (< 1e-5), %.2fs (< 60s)", results.size(), worst,
              worst_block.c_str(), seconds)};
}

CriterionResult kernel_oracle() {
  numkit::CheckedModeGuard checked(true);
  Rng rng(2026);
  std::size_t mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + rng.below(16), k = 1 + rng.below(16), c = 1 + rng.below(16);
    const MatrixD a = random_matrix(r, k, rng), b = random_matrix(k, c, rng);
    if (!(numkit::matmul(a, b) == naive_matmul(a, b))) ++mismatches;
    const MatrixD logits = random_matrix(r, c, rng, -20.0, 20.0);
    if (!(numkit::softmax_rows(logits) == naive_softmax(logits))) ++mismatches;
    const MatrixD gain = random_matrix(1, k, rng), bias = random_matrix(1, k, rng);
    if (!(numkit::layer_norm(a, gain, bias, 1e-5) == naive_layer_norm(a, gain, bias, 1e-5))) {
      ++mismatches;
    }
  }
  return {"", mismatches == 0,
          fmt("200 shapes <= 16x16, matmul/softmax/layer_norm, %zu inexact (need 0)", mismatches)};
}

CriterionResult identities() {
  Rng rng(5);
  std::size_t failures = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  const auto cfg = fiqnet::ModelConfig::toy();
  for (int trial = 0; trial < 20; ++trial) {
    numkit::ParamStore<double> s;
    fiqnet::PositionalEmbedding<double> pe(s, "pos", cfg.max_frames, cfg.dim);
    const MatrixD x = random_matrix(1 + rng.below(cfg.max_frames), cfg.dim, rng);
    expect(pe.forward(x) == x);
    const MatrixD fused = random_matrix(1 + rng.below(6), cfg.dim, rng);
    expect(fiqnet::fuse_mix(fused, MatrixD(1 + rng.below(6), cfg.dim)) == fused);

    numkit::ParamStore<double> blocks;
    fiqnet::VQCAlign<double> vq(blocks, "vq", cfg);
    fiqnet::TransDecoder<double> td(blocks, "td", cfg);
    Rng init(100 + trial);
    blocks.initialize(init);
    vq.layer().zero_output_projections();
    for (auto& layer : td.layers()) layer.zero_output_projections();
    const MatrixD xv = random_matrix(4, cfg.dim, rng), xq = random_matrix(5, cfg.dim, rng);
    const MatrixD xc = random_matrix(3, cfg.dim, rng);
    Rng drop(trial);
    expect(vq.forward(xv, xq, fiqnet::Mode::kEval, nullptr, nullptr) == xv);
    expect(vq.forward(xv, xq, fiqnet::Mode::kTrain, &drop, nullptr) == xv);
    for (auto& layer : td.layers()) {
      expect(layer.forward(xc, xv, fiqnet::Mode::kEval, nullptr, nullptr) == xc);
    }
    expect(td.forward(xc, xv, fiqnet::Mode::kEval, nullptr, nullptr) == xc);
    expect(td.forward(xc, xv, fiqnet::Mode::kTrain, &drop, nullptr) == xc);
  }
  return {"", failures == 0,
          fmt("%zu exact identity checks (zero e_pos, zero x_ctd, zeroed output projections), "
              "%zu failed",
              checks, failures)};
}

double multiset_oracle(const std::string& a, const std::string& b) {
  const auto pa = qagen::f1_tokens(a), pb = qagen::f1_tokens(b);
  if (pa.empty() && pb.empty()) return 1.0;
  if (pa.empty() || pb.empty()) return 0.0;
  std::map<std::string, long> ca, cb;
  for (const auto& t : pa) ++ca[t];
  for (const auto& t : pb) ++cb[t];
  long common = 0;
  for (const auto& [t, n] : ca) {
    auto it = cb.find(t);
    if (it != cb.end()) common += std::min(n, it->second);
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(pa.size() + pb.size());
}

class FixedAnswer final : public qagen::LMClient {
 public:
  explicit FixedAnswer(std::string reply) : reply_(std::move(reply)) {}
  std::string generate(const std::string&) override { return "q?"; }
  std::string answer(const std::string&, const std::string&, std::size_t) override { return reply_; }

 private:
  std::string reply_;
};

CriterionResult f1_oracle() {
  Rng rng(54);
  static const std::vector<std::string> vocab = {"a",   "the", "Car",  "car",  "red,", "Red",
                                                 "2",   "two", "bus!", "stop", "-",    "lane"};
  std::size_t mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    auto draw = [&] {
      std::string s;
      for (std::uint64_t i = 0, n = rng.below(9); i < n; ++i) s += vocab[rng.below(vocab.size())] + " ";
      return s;
    };
    const std::string a = draw(), b = draw();
    if (qagen::token_f1(a, b) != multiset_oracle(a, b)) ++mismatches;
  }
  // 27 shared tokens out of 50 + 50 gives F1 = 0.54 exactly.
  std::string gold, pred;
  for (int i = 0; i < 50; ++i) gold += "g" + std::to_string(i) + " ";
  for (int i = 0; i < 27; ++i) pred += "g" + std::to_string(i) + " ";
  for (int i = 0; i < 23; ++i) pred += "p" + std::to_string(i) + " ";
  qagen::CandidateAnswer c;
  c.text = gold;
  FixedAnswer lm(pred);
  const auto at = qagen::validate_pair("q?", c, lm);
  const bool accept_at = at.score == 0.54 && at.accepted && qagen::passes_threshold(0.54, 0.54);
  const bool reject_below = !qagen::passes_threshold(0.54 - 1e-9, qagen::kDefaultF1Threshold);
  return {"", mismatches == 0 && accept_at && reject_below,
          fmt("1000 random pairs, %zu inexact; F1=0.54 %s, 0.54-1e-9 %s", mismatches,
              accept_at ? "accepted" : "NOT accepted", reject_below ? "rejected" : "NOT rejected")};
}

CriterionResult sampling_constraints() {
  qagen::AnswerPool pool;
  std::map<std::string, std::string> owner;  // normalized text -> video
  for (int v = 0; v < 12; ++v) {
    const std::string vid = "vid" + std::to_string(v);
    pool.add(vid, "The Answer");  // collides with the positive, never usable
    for (int j = 0; j < 1 + v % 3; ++j) {
      const std::string text = "object " + std::to_string(v) + "-" + std::to_string(j);
      pool.add(vid, text);
      owner[qagen::normalize_whitespace_lower(text)] = vid;
    }
  }
  pool.add("self", "self answer");
  qagen::CandidateAnswer pos;
  pos.text = "the  answer";
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Rng rng(seed);
    const auto r = qagen::assemble_multichoice(pos, "What is it?", "self", pool, rng);
    std::set<std::string> norm, videos;
    for (const auto& o : r.options) norm.insert(qagen::normalize_whitespace_lower(o));
    bool ok = norm.size() == 4 && r.answer_idx < 4 && r.options[r.answer_idx] == pos.text;
    for (std::size_t i = 0; i < 4 && ok; ++i) {
      if (i == r.answer_idx) continue;
      auto it = owner.find(qagen::normalize_whitespace_lower(r.options[i]));
      if (it == owner.end() || it->second == "self") {
        ok = false;
      } else {
        videos.insert(it->second);
      }
    }
    if (!ok || videos.size() != 3) ++violations;
  }
  return {"", violations == 0,
          fmt("10000 seeded draws over a pool with colliding answers, %zu violations", violations)};
}

CriterionResult token_limit() {
  qagen::TemplateClient lm;
  qagen::GenQaOptions options;
  options.seed = 3;
  options.extract.zero_lexicon = {"ambulance", "bicycle", "truck", "dog"};
  const auto result = qagen::run_gen_qa(generation_fixture(), lm, options);
  std::size_t violations = 0, longest = 0;
  for (const auto& r : result.records) {
    longest = std::max(longest, qagen::proxy_token_count(r.question));
    if (qagen::proxy_token_count(r.question) > qagen::kTokenLimit) ++violations;
    for (const auto& o : r.options) {
      longest = std::max(longest, qagen::proxy_token_count(o));
      if (qagen::proxy_token_count(o) > qagen::kTokenLimit) ++violations;
    }
  }
  return {"", violations == 0 && !result.records.empty(),
          fmt("%zu records emitted, longest text %zu tokens (limit 77), %zu violations",
              result.records.size(), longest, violations)};
}

template <typename T>
double ema_error(std::size_t k) {
  numkit::ParamStore<T> s;
  auto& p = s.add("w", 1, 4, numkit::Init::zeros());
  p.value = numkit::Matrix<T>::from_rows({{T(1), T(-3.5), T(0.125), T(1e3)}});
  p.ema.fill(T(0));
  for (std::size_t i = 0; i < k; ++i) trainer::update_ema(s, 0.9999);
  double worst = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    const double expected =
        static_cast<double>(p.value(0, j)) * (1.0 - std::pow(0.9999, static_cast<double>(k)));
    worst = std::max(worst, std::abs(static_cast<double>(p.ema(0, j)) - expected) / std::abs(expected));
  }
  return worst;
}

CriterionResult ema_closed_form() {
  double worst = 0.0, worst_f32 = 0.0;
  for (std::size_t k : {1u, 10u, 1000u}) {
    worst = std::max(worst, ema_error<double>(k));
    worst_f32 = std::max(worst_f32, ema_error<float>(k));
  }
  return {"", worst < 1e-6 && worst_f32 < 1e-6,
          fmt("k in {1,10,1000}, max rel error %.3e f64, %.3e f32 (< 1e-6)", worst, worst_f32)};
}

CriterionResult lr_schedule() {
  trainer::TrainConfig c;
  const std::size_t total = 37 * 100;
  const double l0 = trainer::lr_at(0, total, c);
  const double lm = trainer::lr_at(total / 2, total, c);
  const double le = trainer::lr_at(total, total, c);
  const bool ok = l0 == c.lr_base && std::abs(lm - c.lr_base / 2) <= 1e-9 && le == 0.0;
  return {"", ok, fmt("lr(0)=%.17g lr(mid)=%.17g lr(end)=%.17g for lr_base=%g", l0, lm, le, c.lr_base)};
}

CriterionResult overfit() {
  const auto start = std::chrono::steady_clock::now();
  const auto f = overfit_fixture(32, 1);
  const encoders::SyntheticSource src(f.features);
  const auto examples = trainer::resolve_examples(f.records, src, f.model);
  trainer::Trainer t(f.model, f.train);
  const auto logs = t.fit(examples);
  const auto report = trainer::evaluate(f.model, t.params(), examples, /*use_ema=*/false);
  const double baseline = trainer::random_baseline_accuracy(f.records, 11);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double acc = report.overall.accuracy();
  const bool ok = logs.size() <= 300 && f.train.batch_size == 8 && f.records.size() == 32 &&
                  acc >= 0.95 && std::abs(baseline - 0.25) <= 0.10 && seconds < 300.0;
  return {"", ok,
          fmt("32 records, batch 8, %zu epochs: train accuracy %.4f (>= 0.95), random baseline "
              "%.4f (0.25 +- 0.10), %.1fs (< 300s)",
              logs.size(), acc, baseline, seconds)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

CriterionResult determinism(const fs::path& work) {
  numkit::CheckedModeGuard checked(true);
  auto run = [&](const std::string& name) {
    const fs::path dir = work / name;
    fs::create_directories(dir);
    {
      std::ofstream d(dir / "descriptions.jsonl");
      for (const auto& desc : generation_fixture()) d << qagen::description_to_json(desc) << '\n';
    }
    cli::RunConfig c;
    c.set_seed(17);
    c.checked_mode = true;
    c.paths.descriptions = (dir / "descriptions.jsonl").string();
    c.paths.generated = (dir / "generated.jsonl").string();
    c.paths.dataset = c.paths.generated;
    c.paths.feature_root = (dir / "features").string();
    c.paths.checkpoint = (dir / "checkpoint").string();
    c.paths.train_log = (dir / "train_log.jsonl").string();
    c.model.dim = 16;
    c.model.heads = 2;
    c.model.clips = 2;
    c.model.frames_per_clip = 4;
    c.model.max_frames = 8;
    c.model.decoder_layers = 1;
    c.train.epochs = 3;
    c.train.batch_size = 4;
    c.train.lr_base = 1e-3;
    std::ostringstream sink;
    if (cli::cmd_gen_qa(c, sink) != 0 || cli::cmd_embed_synthetic(c, sink) != 0 ||
        cli::cmd_train(c, sink, false) != 0) {
      throw std::runtime_error("pipeline run failed: " + sink.str());
    }
    return dir;
  };
  const auto a = run("run_a");
  const auto b = run("run_b");
  const auto ca = tree_bytes(a / "checkpoint"), cb = tree_bytes(b / "checkpoint");
  const auto ga = slurp(a / "generated.jsonl"), gb = slurp(b / "generated.jsonl");
  std::size_t records = 0;
  for (char ch : ga) records += ch == '\n';
  const bool ok = !ga.empty() && ga == gb && !ca.empty() && ca == cb &&
                  slurp(a / "train_log.jsonl") == slurp(b / "train_log.jsonl");
  return {"", ok,
          fmt("two gen-qa + train runs (seed 17, template client, checked mode): dataset %zu "
              "records %s, checkpoint %zu files %s",
              records, ga == gb ? "identical" : "DIFFERENT", ca.size(),
              ca == cb ? "identical" : "DIFFERENT")};
}

CriterionResult per_task_eval() {
  // known counts: (task, correct, total)
  const std::vector<std::tuple<qagen::TaskType, int, int>> plan = {
      {qagen::TaskType::kB, 7, 10}, {qagen::TaskType::kF, 1, 3},  {qagen::TaskType::kR, 0, 4},
      {qagen::TaskType::kC, 5, 5},  {qagen::TaskType::kI, 2, 9},  {qagen::TaskType::kA, 11, 13},
      {qagen::TaskType::kGen, 4, 4}};
  std::vector<qagen::QARecord> records;
  std::vector<std::size_t> preds;
  double expected = 0.0;
  for (const auto& [task, correct, total] : plan) {
    for (int i = 0; i < total; ++i) {
      qagen::QARecord r;
      r.record_id = "t" + std::to_string(records.size());
      r.task_type = task;
      r.answer_idx = static_cast<std::size_t>(i % 4);
      records.push_back(r);
      preds.push_back(i < correct ? r.answer_idx : (r.answer_idx + 1) % 4);
    }
    if (task != qagen::TaskType::kGen) expected += static_cast<double>(correct) / total / 6.0;
  }
  const auto report = trainer::build_report(records, preds);
  bool counts_ok = true;
  for (const auto& [task, correct, total] : plan) {
    const auto& s = report.tasks.at(task);
    counts_ok = counts_ok && s.correct == static_cast<std::size_t>(correct) &&
                s.total == static_cast<std::size_t>(total);
  }
  const double err = std::abs(report.average - expected);
  return {"", counts_ok && err <= 1e-12 && report.tasks_averaged == 6,
          fmt("average %.15f vs mean of six task accuracies %.15f, |diff| %.1e (<= 1e-12), GEN "
              "excluded",
              report.average, expected, err)};
}

struct Entry {
  const char* id;
  std::function<CriterionResult(const fs::path&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"gradient-suite", [](const fs::path&) { return gradient_suite(); }},
      {"kernel-oracle", [](const fs::path&) { return kernel_oracle(); }},
      {"zero-identities", [](const fs::path&) { return identities(); }},
      {"f1-oracle", [](const fs::path&) { return f1_oracle(); }},
      {"sampling-constraints", [](const fs::path&) { return sampling_constraints(); }},
      {"token-limit", [](const fs::path&) { return token_limit(); }},
      {"ema-closed-form", [](const fs::path&) { return ema_closed_form(); }},
      {"lr-schedule", [](const fs::path&) { return lr_schedule(); }},
      {"overfit-sanity", [](const fs::path&) { return overfit(); }},
      {"determinism", [](const fs::path& w) { return determinism(w); }},
      {"per-task-eval", [](const fs::path&) { return per_task_eval(); }},
  };
  return e;
}

}  // namespace

const std::vector<std::string>& criterion_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.emplace_back(e.id);
    return out;
  }();
  return ids;
}

std::vector<CriterionResult> run_acceptance(const SuiteOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  fs::path work = options.work_dir.empty()
                      ? fs::temp_directory_path() / ("fiq_acceptance_" + std::to_string(::getpid()))
                      : fs::path(options.work_dir);
  fs::remove_all(work);
  fs::create_directories(work);
  std::vector<CriterionResult> results;
  for (const auto& e : entries()) {
    if (!options.filter.empty() && std::string(e.id).find(options.filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = e.run(work);
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("error: ") + ex.what();
    }
    r.id = e.id;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  fs::remove_all(work);
  return results;
}

std::string format_result(const CriterionResult& r) {
  return fmt("%s %-22s (%6.2fs) %s", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.seconds,
             r.detail.c_str());
}

}  // namespace fiq::acceptance
