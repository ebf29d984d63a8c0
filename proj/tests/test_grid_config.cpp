#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "powermfg/config.hpp"
#include "powermfg/csv.hpp"
#include "powermfg/grid.hpp"

using namespace powermfg;

TEST_SUITE("grid_config") {

TEST_CASE("axis coordinates are affine in the index") {
    Axis ax{-1.0, 3.0, 9};
    CHECK(ax.step() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ax.coord(0) == -1.0);
    CHECK(ax.coord(8) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(ax.coord(4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("centered grid brackets the stationary channel law") {
    GameParams gp;  // mu = (1, 0), eta = 0.5
    auto grid = GridSpec::centered(gp, 2.0, 12, 16, 16, 50);
    CHECK(grid.x.lo == doctest::Approx(1.0 - 4.0 * 0.5));
    CHECK(grid.x.hi == doctest::Approx(1.0 + 4.0 * 0.5));
    CHECK(grid.y.lo == doctest::Approx(-2.0));
    CHECK(grid.y.hi == doctest::Approx(2.0));
    CHECK(grid.e.lo == 0.0);
    CHECK(grid.e.hi == 2.0);
    CHECK(grid.t.lo == gp.t0);
    CHECK(grid.t.hi == gp.t1);
    CHECK_NOTHROW(grid.validate());

    GameParams frozen = gp;
    frozen.eta = 0.0;  // box would collapse to a line
    CHECK_THROWS_AS(GridSpec::centered(frozen, 2.0, 12, 16, 16, 50), ConfigError);
}

TEST_CASE("grid validation rejects malformed axes") {
    GameParams gp;
    auto good = GridSpec::centered(gp, 2.0, 12, 16, 16, 50);

    auto bad = good;
    bad.e.n = 7;  // below the minimum resolution
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = good;
    bad.e.lo = 0.5;  // battery axis must start at empty
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = good;
    bad.t.n = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = good;
    bad.x.hi = bad.x.lo;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("field storage round-trips through idx and interpolates exactly") {
    GameParams gp;
    auto grid = GridSpec::centered(gp, 2.0, 10, 9, 8, 5);
    GridField f(grid);

    // Fill with an affine function; multilinear interpolation must be exact
    // both at nodes and between them.
    auto affine = [](double e, double x, double y) { return 2.0 + 3.0 * e - x + 0.5 * y; };
    for (int it = 0; it < grid.t.n; ++it)
        for (int ie = 0; ie < grid.e.n; ++ie)
            for (int ix = 0; ix < grid.x.n; ++ix)
                for (int iy = 0; iy < grid.y.n; ++iy)
                    f.at(it, ie, ix, iy) =
                        affine(grid.e.coord(ie), grid.x.coord(ix), grid.y.coord(iy));

    CHECK(f.interp_slice(0, grid.e.coord(3), {grid.x.coord(2), grid.y.coord(5)}) ==
          doctest::Approx(affine(grid.e.coord(3), grid.x.coord(2), grid.y.coord(5)))
              .epsilon(1e-13));
    double e_mid = 0.5 * (grid.e.coord(3) + grid.e.coord(4));
    double x_mid = grid.x.coord(1) + 0.3 * grid.x.step();
    double y_mid = grid.y.coord(6) + 0.7 * grid.y.step();
    CHECK(f.interp_slice(2, e_mid, {x_mid, y_mid}) ==
          doctest::Approx(affine(e_mid, x_mid, y_mid)).epsilon(1e-13));

    // Clamped outside the box: the query snaps to the nearest face.
    CHECK(f.interp_slice(0, -5.0, {grid.x.lo - 1.0, grid.y.hi + 1.0}) ==
          doctest::Approx(affine(0.0, grid.x.lo, grid.y.hi)).epsilon(1e-13));
}

TEST_CASE("time interpolation is linear between slices") {
    GameParams gp;
    auto grid = GridSpec::centered(gp, 2.0, 10, 9, 8, 5);
    GridField f(grid);
    for (int it = 0; it < grid.t.n; ++it)
        for (size_t i = 0; i < grid.slice_size(); ++i)
            f.slice(it)[i] = 10.0 * grid.t.coord(it);
    double t_mid = 0.5 * (grid.t.coord(1) + grid.t.coord(2));
    CHECK(f.interp(t_mid, 1.0, {1.0, 0.0}) == doctest::Approx(10.0 * t_mid).epsilon(1e-13));
    CHECK(f.interp(-1.0, 1.0, {1.0, 0.0}) == doctest::Approx(10.0 * grid.t.lo).epsilon(1e-13));
    CHECK(f.interp(9.0, 1.0, {1.0, 0.0}) == doctest::Approx(10.0 * grid.t.hi).epsilon(1e-13));
}

TEST_CASE("the stability budget shrinks with finer space steps") {
    GameParams gp;
    OUParams ou{gp.mu, gp.eta};
    auto coarse = GridSpec::centered(gp, 2.0, 10, 10, 10, 50);
    auto fine = GridSpec::centered(gp, 2.0, 40, 40, 40, 50);
    CHECK(coarse.max_stable_dt(ou, gp.p_max) > 0.0);
    CHECK(fine.max_stable_dt(ou, gp.p_max) < coarse.max_stable_dt(ou, gp.p_max));
    // The benchmark resolution must accept its own time step.
    auto bench = GridSpec::centered(gp, 2.0, 20, 16, 16, 50);
    CHECK(bench.t.step() <= bench.max_stable_dt(ou, gp.p_max));
}

TEST_CASE("config text round-trips exactly") {
    RunConfig cfg;
    cfg.game.k = 12;
    cfg.game.sigma2 = 1.75;
    cfg.efficiency_family = "cumulative";
    cfg.efficiency_m = 5;
    cfg.sim_k_list = {8, 32};
    cfg.static_gains = {0.5, 1.5};
    cfg.out_dir = "artifacts";

    std::string text = serialize(cfg);
    RunConfig back = parse_config(text);
    CHECK(serialize(back) == text);
    CHECK(back.game.k == 12);
    CHECK(back.game.sigma2 == 1.75);
    CHECK(back.efficiency_m == 5);
    CHECK(back.sim_k_list == std::vector<int>{8, 32});
    CHECK(back.static_gains == std::vector<double>{0.5, 1.5});
    CHECK(back.out_dir == "artifacts");
}

TEST_CASE("parser reports unknown and duplicate keys with line numbers") {
    CHECK_THROWS_WITH_AS(parse_config("game.bogus = 1\n"),
                         doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("game.rate = 1\ngame.rate = 2\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_AS(parse_config("game.rate 1\n"), ConfigError);
    // Comments and blank lines pass through.
    CHECK_NOTHROW(parse_config("# comment\n\ngame.rate = 2.5 # trailing\n"));
    CHECK(parse_config("game.rate = 2.5\n").game.rate == 2.5);
}

TEST_CASE("environment overrides beat the file") {
    RunConfig cfg;
    setenv("POWERMFG_GAME_RATE", "3.25", 1);
    setenv("POWERMFG_SIM_SEED", "99", 1);
    apply_env_overrides(cfg);
    unsetenv("POWERMFG_GAME_RATE");
    unsetenv("POWERMFG_SIM_SEED");
    CHECK(cfg.game.rate == 3.25);
    CHECK(cfg.sim_seed == 99);

    setenv("POWERMFG_GAME_NONSENSE", "1", 1);
    RunConfig cfg2;
    CHECK_THROWS_AS(apply_env_overrides(cfg2), ConfigError);
    unsetenv("POWERMFG_GAME_NONSENSE");
}

TEST_CASE("validation names the offending key") {
    RunConfig cfg;
    CHECK_NOTHROW(validate(cfg));

    cfg.game.sigma2 = 0.0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("game.sigma2"), ConfigError);

    cfg = RunConfig{};
    cfg.game.t1 = cfg.game.t0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = RunConfig{};
    cfg.sweep_samples = 5000;  // too thin for a Monte Carlo curve
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = RunConfig{};
    cfg.static_gains = {1.0, 2.0};  // game.k defaults to 8, so 2 gains mismatch
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("static.gains"), ConfigError);

    cfg = RunConfig{};
    cfg.efficiency_family = "unknown";
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("factories build from the config") {
    RunConfig cfg;
    auto eff = make_efficiency(cfg);
    CHECK(eff.beta_star() == doctest::Approx(1.0).epsilon(1e-10));

    cfg.efficiency_family = "cumulative";
    cfg.efficiency_m = 100;
    CHECK(make_efficiency(cfg).beta_star() == doctest::Approx(6.4746003795893581).epsilon(1e-10));

    auto grid = make_grid(cfg);
    CHECK(grid.e.n == cfg.grid_n_e);
    CHECK(grid.t.n == cfg.grid_n_t);
}

TEST_CASE("config hash tracks content, not identity") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.sim_seed = 2;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("csv writer emits headers, LF endings, and round-trip digits") {
    std::string path = "test_csv_out.csv";
    {
        CsvWriter w(path, {"t", "value"});
        w.row({0.1, 1.0 / 3.0});
        w.row({0.2, 2.0 / 3.0});
    }
    FILE* fp = std::fopen(path.c_str(), "rb");
    REQUIRE(fp);
    std::string content;
    char buf[256];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, fp)) > 0) content.append(buf, got);
    std::fclose(fp);
    std::remove(path.c_str());

    CHECK(content.substr(0, 8) == "t,value\n");
    CHECK(content.find("\r") == std::string::npos);
    // 17 significant digits survive a parse round-trip.
    auto pos = content.find(',', 8);  // first data row: t, then value
    REQUIRE(pos != std::string::npos);
    double t0 = std::strtod(content.c_str() + 8, nullptr);
    double third = std::strtod(content.c_str() + pos + 1, nullptr);
    CHECK(t0 == 0.1);
    CHECK(third == 1.0 / 3.0);
}

}  // TEST_SUITE
