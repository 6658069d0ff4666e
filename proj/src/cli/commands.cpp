// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>

#include <json.hpp>

#include "fiq/error.hpp"
#include "fiq/fiqnet/checkpoint.hpp"
#include "fiq/fiqnet/gradient_suite.hpp"
#include "fiq/qagen/assemble.hpp"
#include "fiq/qagen/records.hpp"
#include "fiq/trainer/trainer.hpp"

namespace fiq::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(const std::exception& e) noexcept {
  const auto* fe = dynamic_cast<const Error*>(&e);
  if (fe == nullptr) return kExitRuntime;
  const auto& code = fe->code();
  if (code == "config") return kExitUsage;
  if (code == "format" || code == "empty-description" || code == "missing-features" ||
      code == "dimension" || code == "merge") {
    return kExitInput;
  }
  if (code == "gradcheck") return kExitCheck;
  return kExitRuntime;
}

std::string error_json(const std::exception& e) {
  ordered_json j;
  const auto* fe = dynamic_cast<const Error*>(&e);
  j["error"] = fe != nullptr ? fe->code() : "internal";
  j["message"] = e.what();
  if (const auto* x = dynamic_cast<const FormatError*>(&e)) j["field"] = x->field();
  if (const auto* x = dynamic_cast<const GradCheckError*>(&e)) j["param"] = x->param();
  if (const auto* x = dynamic_cast<const TrainingError*>(&e)) j["record_id"] = x->record_id();
  if (const auto* x = dynamic_cast<const MissingFeaturesError*>(&e)) j["record_ids"] = x->record_ids();
  if (const auto* x = dynamic_cast<const LmTransportError*>(&e)) j["prompt"] = x->prompt();
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return exit_code_for(e);
  }
}

namespace {

void make_parent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const std::string& path, const std::string& text) {
  make_parent(path);
  const fs::path p(path);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
}

std::vector<qagen::QARecord> read_dataset(const std::string& path, const std::string& key) {
  require_input(path, key);
  return qagen::read_records_file(path);
}

std::unique_ptr<encoders::FeatureSource> make_source(const RunConfig& c) {
  if (c.features.source == FeatureSourceKind::kSynthetic) {
    return std::make_unique<encoders::SyntheticSource>(c.synthetic_settings());
  }
  require_input(c.paths.feature_root, "paths.feature_root");
  return std::make_unique<encoders::FeatureStore>(c.paths.feature_root);
}

}  // namespace

int cmd_gen_qa(const RunConfig& c, std::ostream& out) {
  require_input(c.paths.descriptions, "paths.descriptions");
  if (c.paths.generated.empty()) throw ConfigError("paths.generated (or --out) is not set");
  const auto descriptions = qagen::read_descriptions_file(c.paths.descriptions);
  auto lm = qagen::make_lm_client(c.lm);
  const auto result = qagen::run_gen_qa(descriptions, *lm, c.qagen);
  make_parent(c.paths.generated);
  qagen::write_records_file(c.paths.generated, result.records);
  if (!c.paths.skip_report.empty()) write_text(c.paths.skip_report, qagen::skip_report_json(result.report));
  out << qagen::report_counts_json(result.report) << '\n';
  return kExitOk;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const auto records = read_dataset(c.paths.dataset, "paths.dataset");
  ordered_json problems = ordered_json::array();
  std::set<std::string> ids;
  for (const auto& r : records) {
    auto v = qagen::record_violations(r);
    if (!ids.insert(r.record_id).second) v.push_back("duplicate record_id");
    if (!v.empty()) problems.push_back({{"record_id", r.record_id}, {"violations", v}});
  }
  out << ordered_json{{"records", records.size()}, {"invalid", problems.size()}, {"problems", problems}}.dump()
      << '\n';
  return problems.empty() ? kExitOk : kExitCheck;
}

int cmd_merge(const RunConfig& c, std::ostream& out) {
  const auto original = read_dataset(c.paths.original, "paths.original");
  const auto generated = read_dataset(c.paths.generated, "paths.generated");
  if (c.paths.merged.empty()) throw ConfigError("paths.merged (or --out) is not set");
  const auto merged = qagen::merge_dataset(original, generated);
  make_parent(c.paths.merged);
  qagen::write_records_file(c.paths.merged, merged);
  out << ordered_json{{"original", original.size()}, {"generated", generated.size()}, {"merged", merged.size()}}.dump()
      << '\n';
  return kExitOk;
}

int cmd_embed_synthetic(const RunConfig& c, std::ostream& out) {
  const auto records = read_dataset(c.paths.dataset, "paths.dataset");
  if (c.paths.feature_root.empty()) throw ConfigError("paths.feature_root (or --out) is not set");
  const encoders::FeatureStore store(c.paths.feature_root);
  const encoders::SyntheticSource synth(c.synthetic_settings());
  std::set<std::string> videos, texts;
  for (const auto& r : records) {
    videos.insert(r.video_id);
    texts.insert(r.question);
    texts.insert(r.options.begin(), r.options.end());
  }
  for (const auto& v : videos) store.put_video(synth.video(v));
  for (const auto& t : texts) store.put_text(synth.text(t));
  out << ordered_json{{"videos", videos.size()}, {"texts", texts.size()}, {"root", c.paths.feature_root}}.dump()
      << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out, bool resume, std::size_t stop_after) {
  const auto records = read_dataset(c.paths.dataset, "paths.dataset");
  if (c.paths.checkpoint.empty()) throw ConfigError("paths.checkpoint (or --out) is not set");
  std::vector<qagen::QARecord> held_out;
  if (!c.paths.eval_dataset.empty()) held_out = read_dataset(c.paths.eval_dataset, "paths.eval_dataset");

  // Resolve everything first so missing features fail before any training.
  const auto source = make_source(c);
  const auto examples = trainer::resolve_examples(records, *source, c.model);
  const auto eval_examples = trainer::resolve_examples(held_out, *source, c.model);

  trainer::Trainer t(c.model, c.train);
  if (resume && fs::exists(fs::path(c.paths.checkpoint) / "manifest.json")) {
    t.resume(fiqnet::load_checkpoint(c.paths.checkpoint));
  }
  std::ofstream log;
  if (!c.paths.train_log.empty()) {
    const fs::path p(c.paths.train_log);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    log.open(p, resume ? std::ios::app : std::ios::trunc);
    if (!log) throw ConfigError("cannot open train log '" + c.paths.train_log + "'");
  }
  const auto logs = t.fit(examples, held_out.empty() ? nullptr : &eval_examples,
                          [&](const trainer::EpochLog& l) {
                            if (log.is_open()) log << l.to_json().dump() << '\n' << std::flush;
                            fiqnet::save_checkpoint(c.paths.checkpoint, t.checkpoint());
                          },
                          stop_after);
  if (logs.empty()) fiqnet::save_checkpoint(c.paths.checkpoint, t.checkpoint());
  ordered_json summary{{"epochs", t.epoch()},
                       {"steps", t.global_step()},
                       {"final_loss", logs.empty() ? ordered_json() : ordered_json(logs.back().mean_loss)},
                       {"checkpoint", c.paths.checkpoint}};
  out << summary.dump() << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const auto records = read_dataset(c.paths.dataset, "paths.dataset");
  require_input(c.paths.checkpoint, "paths.checkpoint");
  const auto ck = fiqnet::load_checkpoint(c.paths.checkpoint);
  RunConfig effective = c;
  effective.model = ck.config;
  const auto source = make_source(effective);
  const auto examples = trainer::resolve_examples(records, *source, ck.config);
  numkit::ParamStore<float> store;
  fiqnet::declare_parameters(ck.config, store);
  fiqnet::restore_parameters(ck, ck.config, store);
  const auto report = trainer::evaluate(ck.config, store, examples, c.train.eval_with_ema);
  out << report.table();
  out << report.to_json().dump() << '\n';
  return kExitOk;
}

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err) {
  numkit::CheckedModeGuard checked(true);
  fiqnet::GradientSuiteOptions options;
  options.corrupt_param = args.corrupt_param;
  options.seed = args.seed;
  std::string failing_param;
  double failing_error = -1.0;
  double total_seconds = 0.0;
  for (const auto& block : fiqnet::gradient_suite_blocks()) {
    const auto r = fiqnet::check_block(block, options);
    const bool pass = r.report.passed(args.tolerance);
    total_seconds += r.seconds;
    out << std::left << std::setw(22) << block << (pass ? "PASS" : "FAIL") << "  max_rel_error="
        << std::scientific << std::setprecision(3) << r.report.max_rel_error
        << "  worst=" << r.report.worst_param << "  seconds=" << std::fixed << std::setprecision(3)
        << r.seconds << std::defaultfloat << '\n';
    if (!pass && r.report.max_rel_error > failing_error) {
      failing_error = r.report.max_rel_error;
      failing_param = r.report.worst_param;
    }
  }
  out << "total_seconds=" << std::fixed << std::setprecision(3) << total_seconds << std::defaultfloat
      << '\n';
  if (failing_error >= 0.0) {
    err << error_json(GradCheckError(failing_param, "gradient check failed for parameter '" +
                                                        failing_param + "'"))
        << '\n';
    return kExitCheck;
  }
  return kExitOk;
}

}  // namespace fiq::cli
