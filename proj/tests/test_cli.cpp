#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("latetail_cli_" + std::to_string(std::rand()) + "_" +
                                           std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name, std::ios::binary) << text;
        return (dir / name).string();
    }
    std::string read(const std::string& name) const {
        std::ifstream f(dir / name, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
};

int run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + LATETAIL_CLI + std::string(" ") + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kModel = "[experiment]\nkind = model\n[model]\nrhat_min = 0.1\nrhat_max = 10\nn = 21\nmethod = both\n";

const char* kSpectral =
    "[experiment]\nkind = spectral\n[background]\nkind = schwarzschild\nmass = 0.1\n"
    "[forcing]\nf = bump\nf.amplitude = 1\nf.center = 0.6\nf.width = 0.2\n"
    "[spectral]\nsigma_min = 0.001\nsigma_max = 0.05\nn_sigma = 12\nr_obs = 1\n";

}  // namespace

TEST_CASE("model subcommand writes the documented columns") {
    Scratch s;
    auto cfg = s.write("model.ini", kModel);
    REQUIRE(run("model --config " + cfg + " --out " + s.dir.string()) == 0);
    std::string csv = s.read("model.csv");
    CHECK(csv.rfind("rhat,re_u,im_u,re_u_ode,im_u_ode\n", 0) == 0);
    CHECK(csv.find("# config_hash: ") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("output is deterministic across runs and thread counts") {
    Scratch s;
    auto cfg = s.write("spectral.ini", kSpectral);
    fs::create_directories(s.dir / "a");
    fs::create_directories(s.dir / "b");
    REQUIRE(run("spectral --config " + cfg + " --out " + (s.dir / "a").string() + " --jobs 1") == 0);
    REQUIRE(run("spectral --config " + cfg + " --out " + (s.dir / "b").string(), "TOOL_JOBS=3") == 0);
    for (const char* f : {"a/samples.csv", "a/fit.csv"}) {
        std::string other = std::string(f);
        other[0] = 'b';
        CHECK(s.read(f) == s.read(other));
        CHECK_FALSE(s.read(f).empty());
    }
}

TEST_CASE("config errors exit with 2") {
    Scratch s;
    CHECK(run("model --config " + s.write("bad.ini", "[model]\ncolour = red\n")) == 2);
    CHECK(run("model --config " + (s.dir / "missing.ini").string()) == 2);
    CHECK(run("model --config " + s.write("range.ini", "[model]\nn = [11, 21]\n")) == 2);
    CHECK(run("model --config " + s.write("wrong.ini", "[experiment]\nkind = evolve\n")) == 2);
    CHECK(run("model") == 2);
}

TEST_CASE("verify refuses artifacts with different config hashes") {
    Scratch s;
    auto c1 = s.write("m1.ini", kModel);
    auto c2 = s.write("m2.ini", std::string(kModel) + "[experiment]\n" + "label = other\n");
    fs::create_directories(s.dir / "one");
    fs::create_directories(s.dir / "two");
    REQUIRE(run("model --config " + c1 + " --out " + (s.dir / "one").string()) == 0);
    REQUIRE(run("model --config " + c2 + " --out " + (s.dir / "two").string()) == 0);
    auto same = s.write("same.ini", "[experiment]\nkind = verify\n[verify]\ncompare_a = one/model.csv\n"
                                    "compare_b = one/model.csv\n");
    auto diff = s.write("diff.ini", "[experiment]\nkind = verify\n[verify]\ncompare_a = one/model.csv\n"
                                    "compare_b = two/model.csv\n");
    CHECK(run("verify --config " + same + " --out " + s.dir.string()) == 0);
    CHECK(run("verify --config " + diff + " --out " + s.dir.string()) == 2);
}

TEST_CASE("sweep records failures and continues") {
    Scratch s;
    auto cfg = s.write("sweep.ini", "[experiment]\nkind = model\n[model]\nrhat_min = [0.1, -1, 0.2]\n"
                                    "rhat_max = 10\nn = 11\nmethod = quadrature\n");
    CHECK(run("sweep --config " + cfg + " --out " + s.dir.string()) == 3);
    std::string sweep = s.read("sweep.csv");
    CHECK_FALSE(sweep.empty());
    CHECK(fs::exists(s.dir / "run0_model.csv"));
    CHECK(fs::exists(s.dir / "run2_model.csv"));
    CHECK_FALSE(fs::exists(s.dir / "run1_model.csv"));
}
