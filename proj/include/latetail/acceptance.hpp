#pragma once

// The A1..A13 acceptance suite: fixed problem setups with their tolerances.

#include <string>
#include <vector>

namespace latetail {

struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string detail;  // measured values
    double seconds = 0.0;
};

const std::vector<std::string>& acceptance_ids();

// Runs the listed criteria (all when empty), up to `jobs` at a time.
// Results come back in the order of `ids`.
std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& ids, int jobs);

}  // namespace latetail
