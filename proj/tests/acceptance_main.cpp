// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fail.
// Worker count from the first argument or TOOL_JOBS.

#include <cstdio>
#include <cstdlib>
#include <thread>

#include "latetail/acceptance.hpp"

int main(int argc, char** argv) {
    int jobs = 0;
    if (argc > 1) jobs = std::atoi(argv[1]);
    if (jobs <= 0 && std::getenv("TOOL_JOBS")) jobs = std::atoi(std::getenv("TOOL_JOBS"));
    if (jobs <= 0) jobs = int(std::max(1u, std::thread::hardware_concurrency()));
    const auto results = latetail::run_acceptance({}, jobs);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%-4s %s  (%.1fs)  %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
        failed += !r.pass;
    }
    std::printf("%d/%zu criteria passed\n", int(results.size()) - failed, results.size());
    return failed ? 1 : 0;
}
