// latetail <subcommand> --config <path> [--out <dir>] [--jobs N]
//
// Exit codes: 0 ok, 2 config error, 3 compute error, 4 acceptance failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "latetail/config.hpp"
#include "latetail/errors.hpp"
#include "latetail/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kCompute = 3, kAcceptance = 4 };

int default_jobs() {
    if (const char* env = std::getenv("TOOL_JOBS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end && *end == '\0' && n > 0) return int(n);
        std::fprintf(stderr, "warning: ignoring TOOL_JOBS='%s'\n", env);
    }
    return 1;
}

void print(const latetail::RunResult& r) {
    for (const auto& line : r.report) std::printf("%s\n", line.c_str());
    std::printf("%s\n", r.line.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Late-time tail experiments: evolutions, spectral fits and acceptance checks"};
    app.require_subcommand(1);
    std::string config, out = ".";
    int jobs = 0;

    std::vector<std::string> names = latetail::experiment_kinds();
    names.push_back("sweep");
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name, name == "sweep" ? "run one experiment over a ranged parameter"
                                                                 : "run the '" + name + "' experiment");
        sub->add_option("--config", config, "INI config file")->required();
        sub->add_option("--out", out, "output directory for CSV artifacts");
        sub->add_option("--jobs", jobs, "worker threads (default: TOOL_JOBS or 1)")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    if (jobs <= 0) jobs = default_jobs();
    const std::string kind = app.get_subcommands().front()->get_name();

    try {
        const latetail::Config cfg = latetail::Config::load(config);
        if (kind == "sweep") {
            const auto s = latetail::run_sweep(cfg, jobs);
            for (std::size_t i = 0; i < s.instances.size(); ++i)
                latetail::write_artifacts(s.instances[i], out, "run" + std::to_string(i) + "_");
            latetail::write_artifacts(s.collated, out);
            print(s.collated);
            return s.failures ? kCompute : kOk;
        }
        const auto r = latetail::run_experiment(kind, cfg, jobs);
        latetail::write_artifacts(r, out);
        print(r);
        return r.criteria_failed ? kAcceptance : kOk;
    } catch (const latetail::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kCompute;
    }
}
