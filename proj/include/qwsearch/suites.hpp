#pragma once

// Invariant suites over the built-in instances plus seeded random ones.

#include "qwsearch/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qws {

struct SuiteOptions {
  std::uint64_t seed = 7;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool timing = false;   // record wall_ms (otherwise 0, keeping reports byte-identical)
};

/// electric, classical, quantum, ffwd, search, all
const std::vector<std::string>& suite_names();

/// Per-item seed: splitmix64 of master + counter.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

/// Throws ConfigError for an unknown name. Failing items are collected, never fatal.
ExperimentReport run_suite(const std::string& name, const SuiteOptions& options = {});

}  // namespace qws
