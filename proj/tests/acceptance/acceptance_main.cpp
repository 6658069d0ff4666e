// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include <cstdio>
#include <string>

#include "fiq/acceptance/suite.hpp"

int main(int argc, char** argv) {
  fiq::acceptance::SuiteOptions options;
  if (argc > 1) options.filter = argv[1];
  std::size_t failed = 0, total = 0;
  fiq::acceptance::run_acceptance(options, [&](const fiq::acceptance::CriterionResult& r) {
    std::printf("%s\n", fiq::acceptance::format_result(r).c_str());
    std::fflush(stdout);
    ++total;
    if (!r.passed) ++failed;
  });
  std::printf("%zu/%zu criteria passed\n", total - failed, total);
  return failed == 0 && total > 0 ? 0 : 1;
}
