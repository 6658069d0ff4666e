// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fiq/cli/commands.hpp"
#include "fiq/error.hpp"
#include "fiq/numkit/matrix.hpp"

namespace fiq::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kFixtures = fs::path(FIQ_SOURCE_DIR) / "tests" / "fixtures";

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

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fiq_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // small.ini with every output redirected under `sub`.
  RunConfig config(const std::string& sub = "run") const {
    RunConfig c = load_run_config((kFixtures / "small.ini").string());
    const fs::path d = dir_ / sub;
    c.paths.generated = (d / "generated.jsonl").string();
    c.paths.dataset = c.paths.generated;
    c.paths.merged = (d / "merged.jsonl").string();
    c.paths.feature_root = (d / "features").string();
    c.paths.checkpoint = (d / "checkpoint").string();
    c.paths.train_log = (d / "train_log.jsonl").string();
    c.paths.skip_report = (d / "skips.jsonl").string();
    return c;
  }

  fs::path dir_;
};

// ---- configuration -----------------------------------------------------------

TEST(RunConfig, ExampleFileParsesToDefaults) {
  const auto c = load_run_config(FIQ_SOURCE_DIR "/tools/fiq.example.ini");
  const RunConfig d;
  EXPECT_EQ(c.model.canonical(), d.model.canonical());
  EXPECT_EQ(c.train.canonical(), d.train.canonical());
  EXPECT_EQ(c.seed, 0u);
  EXPECT_FALSE(c.checked_mode);
  EXPECT_EQ(c.lm.client, "template");
  EXPECT_EQ(c.qagen.validation.threshold, 0.54);
  EXPECT_TRUE(c.qagen.extract.zero_lexicon.empty());
  EXPECT_EQ(c.features.source, FeatureSourceKind::kStore);
  EXPECT_EQ(c.paths.checkpoint, FIQ_SOURCE_DIR "/tools/runs/fiq");
  EXPECT_TRUE(c.paths.eval_dataset.empty());
}

TEST(RunConfig, ParsesEverySection) {
  const auto c = parse_run_config(
      "[run]\nseed = 9\nchecked_mode = true\n"
      "[paths]\ndataset = data/x.jsonl\ncheckpoint = /abs/ck\n"
      "[lm]\nclient = http\nendpoint = http://127.0.0.1:1\nretries = 0\n"
      "[qagen]\nf1_threshold = 0.6\nnormalize_numerals = yes\ncomparand = source-sentence\n"
      "zero_lexicon = truck, bicycle ,dog\nmax_in_flight = 3\n"
      "[model]\ndim = 32\nheads = 4\n"
      "[train]\nbatch_size = 8\nschedule = restarts\neval_with_ema = false\n"
      "[features]\nsource = synthetic\n",
      "/base");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.qagen.seed, 9u);
  EXPECT_EQ(c.features.seed, 9u);
  EXPECT_TRUE(c.checked_mode);
  EXPECT_EQ(c.paths.dataset, "/base/data/x.jsonl");
  EXPECT_EQ(c.paths.checkpoint, "/abs/ck");
  EXPECT_EQ(c.lm.client, "http");
  EXPECT_EQ(c.lm.http.retries, 0);
  EXPECT_EQ(c.qagen.validation.threshold, 0.6);
  EXPECT_TRUE(c.qagen.validation.normalize_numerals);
  EXPECT_EQ(c.qagen.validation.comparand, qagen::Comparand::kSourceSentence);
  EXPECT_EQ(c.qagen.extract.zero_lexicon, (std::vector<std::string>{"truck", "bicycle", "dog"}));
  EXPECT_EQ(c.qagen.max_in_flight, 3u);
  EXPECT_EQ(c.model.dim, 32u);
  EXPECT_EQ(c.train.batch_size, 8u);
  EXPECT_EQ(c.train.schedule, trainer::LrSchedule::kRestarts);
  EXPECT_FALSE(c.train.eval_with_ema);
  EXPECT_EQ(c.features.source, FeatureSourceKind::kSynthetic);
}

TEST(RunConfig, RejectsUnknownAndMalformedEntries) {
  for (const char* text : {"[nope]\na = 1\n", "[train]\nepoch = 3\n", "[train]\nepochs = -1\n",
                           "[train]\nlr_base = fast\n", "[run]\nchecked_mode = maybe\n",
                           "[lm]\nclient = magic\n", "[qagen]\nf1_threshold = 1.5\n",
                           "[model]\ndim = 10\nheads = 4\n", "stray = 1\n", "[run\n"}) {
    EXPECT_THROW(parse_run_config(text), ConfigError) << text;
  }
  EXPECT_THROW(load_run_config("/nonexistent/fiq.ini"), ConfigError);
}

TEST(RunConfig, RequireInput) {
  EXPECT_THROW(require_input("", "paths.dataset"), ConfigError);
  EXPECT_THROW(require_input("/nonexistent/x", "paths.dataset"), ConfigError);
  EXPECT_NO_THROW(require_input((kFixtures / "small.ini").string(), "k"));
}

// ---- errors ------------------------------------------------------------------

TEST(ExitCodes, MapErrorKinds) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitUsage);
  EXPECT_EQ(exit_code_for(FormatError("magic", "x")), kExitInput);
  EXPECT_EQ(exit_code_for(EmptyDescriptionError("x")), kExitInput);
  EXPECT_EQ(exit_code_for(MissingFeaturesError({"a"}, "x")), kExitInput);
  EXPECT_EQ(exit_code_for(DimensionError("x")), kExitInput);
  EXPECT_EQ(exit_code_for(MergeError("x")), kExitInput);
  EXPECT_EQ(exit_code_for(GradCheckError("w", "x")), kExitCheck);
  EXPECT_EQ(exit_code_for(TrainingError("r", "x")), kExitRuntime);
  EXPECT_EQ(exit_code_for(AssemblyError("x")), kExitRuntime);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kExitRuntime);
}

TEST(ExitCodes, ErrorJsonCarriesDetails) {
  auto j = json::parse(error_json(FormatError("checksum", "bad crc")));
  EXPECT_EQ(j["error"], "format");
  EXPECT_EQ(j["message"], "bad crc");
  EXPECT_EQ(j["field"], "checksum");
  j = json::parse(error_json(MissingFeaturesError({"r1", "r2"}, "missing")));
  EXPECT_EQ(j["record_ids"], json::array({"r1", "r2"}));
  j = json::parse(error_json(TrainingError("r9", "nan")));
  EXPECT_EQ(j["record_id"], "r9");
  j = json::parse(error_json(LmTransportError("the prompt", "down")));
  EXPECT_EQ(j["prompt"], "the prompt");
  j = json::parse(error_json(std::logic_error("oops")));
  EXPECT_EQ(j["error"], "internal");
}

TEST(ExitCodes, RunGuardedPrintsOneJsonLine) {
  std::ostringstream err;
  EXPECT_EQ(run_guarded([]() -> int { throw GradCheckError("vq.w", "failed"); }, err), kExitCheck);
  EXPECT_EQ(json::parse(err.str())["param"], "vq.w");
  EXPECT_EQ(err.str().find('\n'), err.str().size() - 1);
  std::ostringstream quiet;
  EXPECT_EQ(run_guarded([] { return 0; }, quiet), 0);
  EXPECT_TRUE(quiet.str().empty());
}

// ---- gen-qa, validate, merge -------------------------------------------------

TEST_F(CliTest, GenQaIsByteDeterministic) {
  std::ostringstream out_a, out_b;
  ASSERT_EQ(cmd_gen_qa(config("a"), out_a), 0);
  ASSERT_EQ(cmd_gen_qa(config("b"), out_b), 0);
  const auto a = slurp(dir_ / "a" / "generated.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "generated.jsonl"));
  EXPECT_EQ(out_a.str(), out_b.str());
  const auto counts = json::parse(out_a.str());
  for (const char* key : {"extracted", "generated", "rejected_below_0.54", "emitted"}) {
    EXPECT_TRUE(counts.contains(key)) << key;
  }
  EXPECT_GT(counts["emitted"].get<int>(), 0);

  auto other = config("c");
  other.set_seed(6);
  std::ostringstream out_c;
  ASSERT_EQ(cmd_gen_qa(other, out_c), 0);
  EXPECT_NE(a, slurp(dir_ / "c" / "generated.jsonl"));
}

TEST_F(CliTest, GenQaAllRejectedEmitsNothing) {
  auto c = config();
  c.paths.descriptions = (kFixtures / "all_reject.jsonl").string();
  std::ostringstream out;
  ASSERT_EQ(cmd_gen_qa(c, out), 0);
  const auto counts = json::parse(out.str());
  EXPECT_EQ(counts["emitted"], 0);
  EXPECT_GT(counts["extracted"].get<int>(), 0);
  EXPECT_EQ(counts["rejected_below_0.54"], counts["extracted"]);
  EXPECT_TRUE(slurp(c.paths.generated).empty());
}

TEST_F(CliTest, GenQaEmptyDescriptions) {
  auto c = config();
  c.paths.descriptions = (kFixtures / "empty.jsonl").string();
  std::ostringstream out, err;
  EXPECT_EQ(run_guarded([&] { return cmd_gen_qa(c, out); }, err), kExitInput);
  EXPECT_EQ(json::parse(err.str())["error"], "empty-description");
}

TEST_F(CliTest, ValidateReportsViolations) {
  auto c = config();
  std::ostringstream out;
  ASSERT_EQ(cmd_gen_qa(c, out), 0);
  std::ostringstream ok;
  EXPECT_EQ(cmd_validate(c, ok), kExitOk);
  EXPECT_EQ(json::parse(ok.str())["invalid"], 0);

  c.paths.dataset = (kFixtures / "invalid_records.jsonl").string();
  std::ostringstream bad;
  EXPECT_EQ(cmd_validate(c, bad), kExitCheck);
  const auto j = json::parse(bad.str());
  EXPECT_EQ(j["records"], 3);
  EXPECT_EQ(j["invalid"], 2);
  EXPECT_EQ(j["problems"][0]["record_id"], "r2");
  EXPECT_EQ(j["problems"][1]["violations"][0], "duplicate record_id");
}

TEST_F(CliTest, MergeKeepsOriginalsFirst) {
  auto c = config();
  std::ostringstream out;
  ASSERT_EQ(cmd_gen_qa(c, out), 0);
  std::ostringstream merged;
  ASSERT_EQ(cmd_merge(c, merged), 0);
  const auto j = json::parse(merged.str());
  EXPECT_EQ(j["original"], 2);
  EXPECT_EQ(j["merged"], j["original"].get<int>() + j["generated"].get<int>());
  const auto records = qagen::read_records_file(c.paths.merged);
  ASSERT_GE(records.size(), 3u);
  EXPECT_EQ(records[0].record_id, "o1");
  EXPECT_EQ(records[2].record_id.rfind("gen:", 0), 0u);
}

// ---- train, eval ---------------------------------------------------------------

TEST_F(CliTest, MissingFeaturesFailBeforeTraining) {
  auto c = config();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_gen_qa(c, out), 0);
  fs::create_directories(c.paths.feature_root);
  EXPECT_EQ(run_guarded([&] { return cmd_train(c, out, false); }, err), kExitInput);
  const auto j = json::parse(err.str());
  EXPECT_EQ(j["error"], "missing-features");
  EXPECT_EQ(j["record_ids"].size(), qagen::read_records_file(c.paths.dataset).size());
  EXPECT_FALSE(fs::exists(c.paths.checkpoint));
}

TEST_F(CliTest, TrainEvalAndResumeAreDeterministic) {
  numkit::CheckedModeGuard checked(true);
  auto full = config("full");
  auto split = config("split");
  for (const auto* c : {&full, &split}) {
    std::ostringstream out;
    ASSERT_EQ(cmd_gen_qa(*c, out), 0);
    ASSERT_EQ(cmd_embed_synthetic(*c, out), 0);
  }
  std::ostringstream full_out;
  ASSERT_EQ(cmd_train(full, full_out, false), 0);
  EXPECT_EQ(json::parse(full_out.str())["epochs"], 3);

  std::ostringstream first, second;
  ASSERT_EQ(cmd_train(split, first, false, 2), 0);
  EXPECT_EQ(json::parse(first.str())["epochs"], 2);
  ASSERT_EQ(cmd_train(split, second, true), 0);
  EXPECT_EQ(json::parse(second.str())["epochs"], 3);
  EXPECT_EQ(json::parse(second.str())["final_loss"], json::parse(full_out.str())["final_loss"]);

  EXPECT_EQ(slurp(full.paths.train_log), slurp(split.paths.train_log));
  EXPECT_EQ(tree_bytes(full.paths.checkpoint), tree_bytes(split.paths.checkpoint));

  std::ostringstream eval_a, eval_b;
  ASSERT_EQ(cmd_eval(full, eval_a), 0);
  ASSERT_EQ(cmd_eval(split, eval_b), 0);
  EXPECT_EQ(eval_a.str(), eval_b.str());
  EXPECT_NE(eval_a.str().find("GEN"), std::string::npos);
  const auto report = json::parse(eval_a.str().substr(eval_a.str().find('{')));
  EXPECT_TRUE(report["average"].is_null());
  EXPECT_EQ(report["tasks"]["GEN"]["total"],
            qagen::read_records_file(full.paths.dataset).size());
}

TEST_F(CliTest, SyntheticSourceMatchesEmbeddedStore) {
  auto stored = config("stored");
  std::ostringstream out;
  ASSERT_EQ(cmd_gen_qa(stored, out), 0);
  ASSERT_EQ(cmd_embed_synthetic(stored, out), 0);
  stored.train.epochs = 1;
  ASSERT_EQ(cmd_train(stored, out, false), 0);
  auto synth = stored;
  synth.features.source = FeatureSourceKind::kSynthetic;
  synth.paths.checkpoint = (dir_ / "synth" / "checkpoint").string();
  synth.paths.train_log.clear();
  ASSERT_EQ(cmd_train(synth, out, false), 0);
  EXPECT_EQ(tree_bytes(stored.paths.checkpoint), tree_bytes(synth.paths.checkpoint));
}

TEST(Gradcheck, CorruptedGradientNamesParameter) {
  GradcheckArgs args;
  args.corrupt_param = "head.proj.w";
  std::ostringstream out, err;
  EXPECT_EQ(run_guarded([&] { return cmd_gradcheck(args, out, err); }, err), kExitCheck);
  EXPECT_NE(out.str().find("scoring_head          FAIL"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("layer_norm            PASS"), std::string::npos);
  EXPECT_EQ(json::parse(err.str())["param"], "head.proj.w");
}

}  // namespace
}  // namespace fiq::cli
