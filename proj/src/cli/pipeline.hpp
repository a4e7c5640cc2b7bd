#pragma once

#include <string>

#include "cli/settings.hpp"

namespace cli {

// Executes the staged run described by cfg (enumerate, flags, export, solve,
// round, verify) under cache_root/run-<settings digest>, skipping stages
// whose recorded outputs still match their digests and writing manifest.json.
// threads < 0 defers to the config's `threads` key. Returns a process exit
// code.
int run_pipeline(const Settings& cfg, const std::string& cache_root, long threads);

}  // namespace cli
