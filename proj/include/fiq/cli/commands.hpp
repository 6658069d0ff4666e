// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <exception>
#include <functional>
#include <iosfwd>
#include <string>

#include "fiq/cli/run_config.hpp"

namespace fiq::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags or configuration
  kExitInput = 2,     // malformed, missing or empty input data
  kExitRuntime = 3,   // a stage failed while running
  kExitCheck = 4,     // a check ran and reported failures
};

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e) noexcept;

/// {"error": code, "message": ..., plus "field", "param", "record_id",
/// "record_ids" or "prompt" when the error carries them}.
std::string error_json(const std::exception& e);

/// Runs `body`, printing error_json on `err` and mapping the exit code when
/// it throws.
int run_guarded(const std::function<int()>& body, std::ostream& err);

/// Each command writes its machine-readable summary to `out`.
int cmd_gen_qa(const RunConfig& config, std::ostream& out);
int cmd_validate(const RunConfig& config, std::ostream& out);
int cmd_merge(const RunConfig& config, std::ostream& out);
int cmd_embed_synthetic(const RunConfig& config, std::ostream& out);
/// `stop_after` > 0 ends the run after that epoch; --resume continues it.
int cmd_train(const RunConfig& config, std::ostream& out, bool resume, std::size_t stop_after = 0);
int cmd_eval(const RunConfig& config, std::ostream& out);

struct GradcheckArgs {
  std::string corrupt_param;
  double tolerance = 1e-5;
  std::uint64_t seed = 7;
};

/// Runs the gradient suite in checked 64-bit mode; kExitCheck when any
/// block reaches the tolerance, with an error line naming the parameter on
/// `err`.
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err);

}  // namespace fiq::cli
