#pragma once

// Experiment orchestration behind the command-line tool.  Each experiment
// reads a validated Config, computes, and returns named CSV tables plus a
// short summary; nothing is written here.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "latetail/config.hpp"
#include "latetail/csv.hpp"

namespace latetail {

using Summary = std::vector<std::pair<std::string, CsvCell>>;

struct RunResult {
    std::vector<std::pair<std::string, CsvTable>> artifacts;  // file stem -> table
    Summary summary;
    std::string line;               // one-line human summary
    std::vector<std::string> report;  // extra lines for the terminal (PASS/FAIL table)
    bool criteria_failed = false;     // verify: some check failed
};

const std::vector<std::string>& experiment_kinds();

// Runs one concrete (non-ranged) config as experiment `kind`.  Throws
// ConfigError for bad input and other Errors for compute failures.
RunResult run_experiment(const std::string& kind, const Config& cfg, int jobs);

struct SweepResult {
    RunResult collated;
    std::vector<RunResult> instances;  // empty artifacts for failed instances
    int failures = 0;
};

// Expands the single ranged parameter and runs every instance (in parallel
// when jobs > 1).  Failures are recorded per row.
SweepResult run_sweep(const Config& cfg, int jobs);

// Writes every artifact as <dir>/<prefix><stem>.csv.
void write_artifacts(const RunResult& r, const std::string& dir, const std::string& prefix = "");

// Runs f(0..n-1) on up to `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

}  // namespace latetail
