#pragma once
// Experiment driver behind the CLI: obtains scattering data (with an
// on-disk cache keyed by the canonical profile + k grid) and dispatches
// on the configured mode, writing CSV/JSON artifacts into out_dir.

#include <string>

#include "kdvdet/config.hpp"

namespace kdv {

struct RunnerOptions {
  std::string out_dir = "out";
  bool no_cache = false;  // neither read nor write the scatter cache
  int workers = 0;        // overrides [run] workers when > 0
};

// Process exit code: 0 on success, 1 when a configured bound is violated.
int run_experiment(const RunConfig& cfg, const RunnerOptions& opt = {});

}  // namespace kdv
