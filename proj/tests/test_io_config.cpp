#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mhs/config.hpp"
#include "mhs/corpus.hpp"
#include "mhs/format.hpp"
#include "mhs/run_io.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace mhs;
using mhs::test::coeff_diff;

TEST_CASE("format_double: shortest round trip, special values") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    const double v = 0.1234567890123456789;
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("history CSV: frozen column order, optional min_gamma_x") {
    RunRecord r;
    r.t = 0.5;
    r.mean_u = 0.0;
    r.energy = 2.0;
    r.sup_u = 1.0;
    r.sup_abs_ux = 3.0;
    r.radius_est = std::numeric_limits<double>::infinity();
    r.scale_norm = 0.25;
    r.dt_used = 1e-4;
    std::ostringstream os;
    write_history_csv(os, {r}, false);
    CHECK(os.str() == "t,mean_u,energy,sup_u,sup_abs_ux,radius_est,scale_norm,dt_used\n"
                      "0.5,0,2,1,3,inf,0.25,1e-04\n");

    r.min_gamma_x = 0.9;
    std::ostringstream os2;
    write_history_csv(os2, {r}, true);
    CHECK(os2.str() == "t,mean_u,energy,sup_u,sup_abs_ux,radius_est,scale_norm,dt_used,min_gamma_x\n"
                       "0.5,0,2,1,3,inf,0.25,1e-04,0.9\n");
}

TEST_CASE("snapshot JSONL round trip preserves coefficients exactly") {
    Rng rng(71);
    const SpectralField f = random_trig_poly(rng, 64, 10, 1.0, false);
    std::stringstream ss;
    ss << snapshot_jsonl_line(0.25, f) << "\n";
    ss << snapshot_jsonl_line(0.5, "zeta", f) << "\n";
    const std::vector<Snapshot> snaps = read_snapshots(ss);
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].t == 0.25);
    CHECK(snaps[0].which.empty());
    CHECK(coeff_diff(snaps[0].field, f) == 0.0);
    CHECK(snaps[1].which == "zeta");
    CHECK(coeff_diff(snaps[1].field, f) == 0.0);
}

TEST_CASE("scenario validation enforces the documented ranges") {
    ScenarioConfig ok;
    CHECK_NOTHROW(validate(ok));

    ScenarioConfig bad = ok;
    bad.n_modes = 48; // not a power of two
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ok;
    bad.n_modes = 16; // too small
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ok;
    bad.dt = 0.2; // dt >= t_end
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ok;
    bad.method = "spooky";
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ok;
    bad.s = 1.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = ok;
    bad.p = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("config files: flat key=value, comments, quoting, errors") {
    const char* path = "test_io_config_tmp.cfg";
    {
        std::ofstream out(path);
        out << "# scenario\n"
               "p = 3\n"
               "init = \"0.2*sin(2*pi*x) - 0.1\"  # quoted value\n"
               "t-end = 0.25\n"
               "record_every=7\n"
               "dealias = false\n";
    }
    ScenarioConfig cfg;
    apply_config_file(path, cfg);
    CHECK(cfg.p == 3);
    CHECK(cfg.init == "0.2*sin(2*pi*x) - 0.1");
    CHECK(cfg.t_end == 0.25);
    CHECK(cfg.record_every == 7);
    CHECK_FALSE(cfg.dealias);
    CHECK(cfg.n_modes == 256); // untouched default

    {
        std::ofstream out(path);
        out << "mystery = 1\n";
    }
    CHECK_THROWS_AS(apply_config_file(path, cfg), ConfigError);
    {
        std::ofstream out(path);
        out << "dt zero point one\n";
    }
    CHECK_THROWS_AS(apply_config_file(path, cfg), ConfigError);
    std::remove(path);
    CHECK_THROWS_AS(apply_config_file("no_such_file.cfg", cfg), ConfigError);
}

TEST_CASE("deterministic rng is reproducible and uniform-ish") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(lo < 0.1);
    CHECK(hi > 0.9);
}
