// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "fiq/acceptance/suite.hpp"
#include "fiq/cli/commands.hpp"
#include "fiq/error.hpp"
#include "fiq/numkit/matrix.hpp"

namespace {

using fiq::cli::RunConfig;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool checked = false;
  std::string out;
};

RunConfig resolve_config(const GlobalFlags& flags, const std::string& command) {
  RunConfig c = flags.config.empty() ? RunConfig{} : fiq::cli::load_run_config(flags.config);
  if (flags.seed) c.set_seed(*flags.seed);
  if (flags.checked) c.checked_mode = true;
  if (!flags.out.empty()) {
    if (command == "gen-qa") {
      c.paths.generated = flags.out;
    } else if (command == "merge") {
      c.paths.merged = flags.out;
    } else if (command == "embed-synthetic") {
      c.paths.feature_root = flags.out;
    } else if (command == "train") {
      c.paths.checkpoint = flags.out;
    } else {
      throw fiq::ConfigError("--out has no meaning for " + command);
    }
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fundamental question generation and FIQ model training"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config, "INI run configuration");
  app.add_option("--seed", flags.seed, "Override [run] seed");
  app.add_flag("--checked", flags.checked, "Sequential reductions and finiteness checks");
  app.add_option("--out", flags.out, "Output path of the command");

  auto* gen = app.add_subcommand("gen-qa", "Generate multiple-choice records from descriptions");
  auto* validate = app.add_subcommand("validate", "Check record invariants of [paths] dataset");
  auto* merge = app.add_subcommand("merge", "Merge original and generated records");
  auto* embed =
      app.add_subcommand("embed-synthetic", "Write synthetic features for every dataset id");
  bool resume = false;
  auto* train = app.add_subcommand("train", "Train a model on [paths] dataset");
  std::size_t stop_after = 0;
  train->add_flag("--resume", resume, "Continue from [paths] checkpoint");
  train->add_option("--stop-after", stop_after, "End after this epoch; the schedule is unchanged");
  auto* eval = app.add_subcommand("eval", "Score a checkpoint on [paths] dataset");
  fiq::cli::GradcheckArgs grad;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every block");
  gradcheck->add_option("--corrupt-grad", grad.corrupt_param,
                        "Perturb this parameter's analytic gradient (negative control)");
  gradcheck->add_option("--tolerance", grad.tolerance, "Maximum relative error")
      ->capture_default_str();
  std::string filter;
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest->add_option("--filter", filter, "Run only criteria whose id contains this text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const fiq::ConfigError err(e.what());
    std::cerr << fiq::cli::error_json(err) << '\n';
    return fiq::cli::kExitUsage;
  }

  if (selftest->parsed()) {
    fiq::acceptance::SuiteOptions options;
    options.filter = filter;
    std::size_t failed = 0;
    const auto results = fiq::acceptance::run_acceptance(options, [&](const auto& r) {
      std::cout << fiq::acceptance::format_result(r) << std::endl;
      if (!r.passed) ++failed;
    });
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 && !results.empty() ? fiq::cli::kExitOk : fiq::cli::kExitCheck;
  }
  if (gradcheck->parsed()) {
    if (flags.seed) grad.seed = *flags.seed;
    return fiq::cli::run_guarded([&] { return fiq::cli::cmd_gradcheck(grad, std::cout, std::cerr); },
                                 std::cerr);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return fiq::cli::run_guarded(
      [&] {
        const RunConfig c = resolve_config(flags, command);
        fiq::numkit::CheckedModeGuard checked(c.checked_mode);
        if (gen->parsed()) return fiq::cli::cmd_gen_qa(c, std::cout);
        if (validate->parsed()) return fiq::cli::cmd_validate(c, std::cout);
        if (merge->parsed()) return fiq::cli::cmd_merge(c, std::cout);
        if (embed->parsed()) return fiq::cli::cmd_embed_synthetic(c, std::cout);
        if (train->parsed()) return fiq::cli::cmd_train(c, std::cout, resume, stop_after);
        if (eval->parsed()) return fiq::cli::cmd_eval(c, std::cout);
        return static_cast<int>(fiq::cli::kExitUsage);
      },
      std::cerr);
}
