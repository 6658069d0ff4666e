// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fiq::acceptance {

struct CriterionResult {
  std::string id;
  bool passed = false;
  std::string detail;  // measured values and the tolerance they were held to
  double seconds = 0.0;
};

struct SuiteOptions {
  /// Scratch directory for file-producing criteria; created and removed.
  std::string work_dir;
  /// Runs only criteria whose id contains this substring when nonempty.
  std::string filter;
};

/// Identifiers in run order.
const std::vector<std::string>& criterion_ids();

/// Runs every criterion; an escaping exception fails that criterion with
/// the error text as detail.
std::vector<CriterionResult> run_acceptance(
    const SuiteOptions& options, const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS <id> (<seconds>s): <detail>" or "FAIL ...".
std::string format_result(const CriterionResult& result);

}  // namespace fiq::acceptance
