// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/numkit/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace fiq::numkit {

GradCheckReport grad_check(const Objective& objective, ParamStore<double>& store,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw ConfigError("grad_check: step must be positive");
  const double h = options.step;

  store.zero_grad();
  const double base = objective(store, true);
  if (!std::isfinite(base)) {
    throw GradCheckError(store.size() > 0 ? store[0].name : "",
                         "objective is non-finite at the base point");
  }
  if (options.after_backward) options.after_backward(store);

  GradCheckReport report;
  for (auto& p : store) {
    GradCheckEntry entry;
    entry.param = p.name;
    auto values = p.value.data();
    auto grads = p.grad.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + h;
      const double up = objective(store, false);
      values[i] = original - h;
      const double down = objective(store, false);
      values[i] = original;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw GradCheckError(p.name, "objective is non-finite when perturbing '" + p.name + "'");
      }
      const double numeric = (up - down) / (2.0 * h);
      const double err = std::abs(grads[i] - numeric) / std::max(1.0, std::abs(numeric));
      if (!std::isfinite(err)) {
        throw GradCheckError(p.name, "analytic gradient of '" + p.name + "' is non-finite");
      }
      if (i == 0 || err > entry.max_rel_error) {
        entry.max_rel_error = err;
        entry.worst_index = i;
        entry.analytic = grads[i];
        entry.numeric = numeric;
      }
    }
    if (entry.max_rel_error >= report.max_rel_error) {
      report.max_rel_error = entry.max_rel_error;
      report.worst_param = entry.param;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace fiq::numkit
