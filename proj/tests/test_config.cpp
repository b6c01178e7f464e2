#include <doctest.h>

#include "latetail/config.hpp"
#include "latetail/errors.hpp"

using namespace latetail;

TEST_CASE("typed access and defaults") {
    auto c = Config::parse(R"(
# comment
[background]
kind = schwarzschild   ; trailing comment
mass = 0.5
[mode]
l = 2
[observers]
radii = 10, 20, 40
[grid]
sommerfeld_left = true
)");
    CHECK(c.str("background", "kind", "") == "schwarzschild");
    CHECK(c.real("background", "mass", 1.0) == 0.5);
    CHECK(c.integer("mode", "l", 0) == 2);
    CHECK(c.boolean("grid", "sommerfeld_left", false));
    CHECK(c.real("grid", "dx", 0.1) == 0.1);
    CHECK(c.reals("observers", "radii", {}) == std::vector<double>{10, 20, 40});
    CHECK(background_from(c).mass == 0.5);
    CHECK(mode_from(c).l == 2);
}

TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(Config::parse("[nope]\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\nspacing = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("dx = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\ndx 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\ndx = fast\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[mode]\nl = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\ndx = 1\ndx = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\nscheme = spectral\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\ndx = [0.1, 0.2\n"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("ranged parameters") {
    auto c = Config::parse("[grid]\ndx = [0.2, 0.1, 0.05]\ncfl = 0.5\n");
    CHECK(c.ranged_key() == "grid.dx");
    CHECK(c.ranged_values().size() == 3);
    CHECK_THROWS_AS(c.real("grid", "dx", 1.0), ConfigError);
    auto parts = c.expand();
    REQUIRE(parts.size() == 3);
    CHECK(parts[2].real("grid", "dx", 1.0) == 0.05);
    CHECK(parts[0].ranged_key().empty());
    CHECK(parts[0].real("grid", "cfl", 0.0) == 0.5);

    CHECK_THROWS_AS(Config::parse("[grid]\ndx = [0.2, 0.1]\ncfl = [0.5, 0.4]\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\ndx = [0.2, oops]\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[grid]\ndx = []\n"), ConfigError);
}

TEST_CASE("hash depends only on the settings") {
    auto a = Config::parse("[grid]\ndx = 0.1\ncfl = 0.5\n[mode]\nl = 1\n");
    auto b = Config::parse("# reordered\n[mode]\nl = 1   # same\n\n[grid]\ncfl = 0.5\ndx = 0.1\n");
    auto c = Config::parse("[grid]\ndx = 0.1\ncfl = 0.5\n[mode]\nl = 2\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 64);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("profiles from config") {
    auto c = Config::parse("[data]\nphi1 = gaussian\nphi1.amplitude = 2\nphi1.center = 30\nphi1.width = 2.5\n"
                           "phi1.coord = rstar\n");
    auto p = profile_from(c, "data", "phi1");
    CHECK(p.kind == ProfileKind::Gaussian);
    CHECK(p.coord == ProfileCoord::Rstar);
    CHECK(p(30.0) == doctest::Approx(2.0));
    CHECK(profile_from(c, "data", "phi0").is_zero());
}
