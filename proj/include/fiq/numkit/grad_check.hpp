// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fiq/numkit/param.hpp"

namespace fiq::numkit {

/// Scalar objective over a parameter store. When `with_grad` is true the
/// objective must also accumulate d(loss)/d(param) into every Param::grad
/// (grads are zeroed by the checker beforehand). Must be deterministic.
using Objective = std::function<double(ParamStore<double>& store, bool with_grad)>;

struct GradCheckEntry {
  std::string param;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  std::string worst_param;

  bool passed(double tolerance) const noexcept { return max_rel_error < tolerance; }
};

struct GradCheckOptions {
  double step = 1e-4;
  /// Runs after the analytic pass and before the numeric sweep; lets tests
  /// tamper with analytic gradients (negative controls).
  std::function<void(ParamStore<double>&)> after_backward;
};

/// Central differences over every scalar of every parameter. Error per
/// scalar is |analytic - numeric| / max(1, |numeric|); the report carries
/// the maximum per parameter and overall. Throws GradCheckError naming the
/// parameter if the objective turns non-finite.
GradCheckReport grad_check(const Objective& objective, ParamStore<double>& store,
                           const GradCheckOptions& options = {});

}  // namespace fiq::numkit
