#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spinflip/config.hpp"
#include "spinflip/rate.hpp"
#include "spinflip/slope.hpp"
#include "spinflip/sweep.hpp"

using namespace spinflip;

namespace {

config::RunConfig vacuum_config() {
    config::RunConfig c = config::reference_defaults();
    c.core = stack::Layer::dielectric(185e-6, {1.0, 0.0});
    c.coating = stack::Layer::dielectric(240e-6, {1.0, 0.0});
    c.workers = 1;
    return c;
}

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = "/tmp/spinflip_test_" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

} // namespace

TEST_CASE("config parsing round trip") {
    const char* doc = R"({
      "wire": {
        "core":    { "outer_radius_m": 185e-6, "resistivity_ohm_m": 1.6e-8 },
        "coating": { "outer_radius_m": 240e-6, "rel_permittivity": [0.0, 1.2e12] }
      },
      "transition": { "frequency_hz": 560e3, "angular_factor_s2": 0.125, "temperature_k": 300 },
      "atom": { "surface_distance_m": 50e-6 },
      "numerics": { "quad_rel_tol": 1e-7, "max_modes": 500, "workers": 2 }
    })";
    config::RunConfig c = config::parse_config(doc);
    CHECK(c.core.outer_radius == 185e-6);
    CHECK(c.core.resistivity.has_value());
    CHECK(c.coating.rel_permittivity.has_value());
    CHECK(c.coating.rel_permittivity->imag() == 1.2e12);
    CHECK(c.temperature_k == 300.0);
    CHECK(c.surface_distance_m == 50e-6);
    CHECK(c.numerics.quad_rel_tol == 1e-7);
    CHECK(c.numerics.max_modes == 500);
    CHECK(c.workers == 2);
}

TEST_CASE("config errors carry the field path") {
    auto expect_error = [](const char* doc, const char* needle) {
        try {
            (void)config::parse_config(doc);
            FAIL_CHECK("expected ConfigError for ", doc);
        } catch (const config::ConfigError& e) {
            INFO("message: ", e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error(R"({"nonsense": 1})", "nonsense");
    expect_error(R"({"atom": {"surface_distance_m": -5e-5}})", "atom.surface_distance_m");
    expect_error(R"({"wire": {"core": {"outer_radius_m": 1e-4}}})", "wire.core");
    expect_error(
        R"({"wire": {"core": {"outer_radius_m": 1e-4, "resistivity_ohm_m": 1e-8,
                              "rel_permittivity": [1, 0]}}})",
        "wire.core");
    expect_error(R"({"transition": {"frequency_hz": -1}})", "frequency_hz");
    expect_error(R"([1,2,3])", "top level");
    expect_error(R"({)", "parse error");
}

TEST_CASE("preset grids are endpoint-inclusive and as documented") {
    auto p3 = sweep::preset("fig3");
    CHECK(p3.spec.parameter == sweep::Parameter::skin_depth_2);
    auto g3 = p3.spec.grid();
    CHECK(g3.size() == 53);
    CHECK(g3.front() == doctest::Approx(1e-6).epsilon(1e-14));
    CHECK(g3.back() == 1e-2);
    CHECK(p3.temperature_k == 300.0);

    auto p4 = sweep::preset("fig4");
    CHECK(p4.spec.couple_a2_to_r);
    CHECK(p4.spec.couple_a1_to_a2);
    CHECK(p4.spec.a2_over_r == 5.0);
    CHECK(p4.spec.a1_over_a2 == doctest::Approx(185.0 / 240.0).epsilon(1e-15));

    auto p2 = sweep::preset("fig2");
    CHECK(p2.temperature_k == 380.0);
    CHECK(p2.spec.parameter == sweep::Parameter::distance);

    CHECK_THROWS_AS(sweep::preset("fig9"), std::invalid_argument);

    // grids are reproducible and sorted
    auto again = sweep::preset("fig3").spec.grid();
    CHECK(g3 == again);
    for (size_t i = 1; i < g3.size(); ++i) CHECK(g3[i] > g3[i - 1]);
}

TEST_CASE("apply_parameter implements the couplings") {
    config::RunConfig base = config::reference_defaults();

    sweep::SweepSpec joint = sweep::preset("fig4").spec;
    config::RunConfig cj = sweep::apply_parameter(base, joint, 100e-6);
    CHECK(cj.surface_distance_m == 100e-6);
    CHECK(cj.coating.outer_radius == doctest::Approx(500e-6).epsilon(1e-14));
    CHECK(cj.core.outer_radius == doctest::Approx((185.0 / 240.0) * 500e-6).epsilon(1e-14));

    sweep::SweepSpec radius = sweep::preset("fig5").spec;
    config::RunConfig cr = sweep::apply_parameter(base, radius, 1e-3);
    CHECK(cr.coating.outer_radius == 1e-3);
    CHECK(cr.surface_distance_m == base.surface_distance_m);

    sweep::SweepSpec depth = sweep::preset("fig3").spec;
    config::RunConfig cd = sweep::apply_parameter(base, depth, 110e-6);
    CHECK_FALSE(cd.coating.resistivity.has_value());
    double k0 = cd.transition().k3(cd.constants);
    CHECK(cd.coating.rel_permittivity->imag() ==
          doctest::Approx(stack::rel_permittivity(110e-6, k0).imag()).epsilon(1e-12));
}

TEST_CASE("run_sweep rows are ordered, consistent, and deterministic") {
    config::RunConfig cfg = vacuum_config();
    sweep::SweepSpec spec;
    spec.parameter = sweep::Parameter::distance;
    spec.from = 20e-6;
    spec.to = 80e-6;
    spec.points = 5;
    spec.log_spacing = true;

    sweep::SweepResult r1 = sweep::run_sweep(spec, cfg, 1);
    sweep::SweepResult r2 = sweep::run_sweep(spec, cfg, 2);
    CHECK(r1.rows.size() == 5);
    CHECK(r1.all_converged);
    for (size_t i = 1; i < r1.rows.size(); ++i)
        CHECK(r1.rows[i].value_si > r1.rows[i - 1].value_si);
    for (const auto& row : r1.rows)
        CHECK(row.rate.lifetime ==
              doctest::Approx(1.0 / row.rate.gamma_total).epsilon(1e-12));

    std::ostringstream c1, c2;
    sweep::write_csv(c1, r1);
    sweep::write_csv(c2, r2);
    CHECK(c1.str() == c2.str());   // bit-identical regardless of worker count

    // round trip
    std::istringstream in(c1.str());
    sweep::CsvTable t = sweep::read_csv(in);
    CHECK(t.param == "distance");
    CHECK(t.value_si.size() == 5);
    CHECK(t.lifetime_s[0] ==
          doctest::Approx(r1.rows[0].rate.lifetime).epsilon(1e-11));   // 12-digit CSV
    CHECK(t.converged[0]);
}

TEST_CASE("slope fit recovers power laws") {
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
        double xi = 1e-5 * std::pow(10.0, i / 6.0);
        x.push_back(xi);
        y.push_back(3.0 * std::pow(xi, -2.5));
    }
    auto fit = slope::fit_loglog_slope(x, y, 0.0, 1.0);
    CHECK(fit.slope == doctest::Approx(-2.5).epsilon(1e-10));
    CHECK(fit.std_error < 1e-10);
    CHECK(fit.points_used == 12);

    // range restriction and the minimum-count precondition
    auto sub = slope::fit_loglog_slope(x, y, x[2], x[6]);
    CHECK(sub.points_used == 5);
    CHECK_THROWS_AS(slope::fit_loglog_slope(x, y, x[0], x[1]), std::invalid_argument);
    std::vector<double> bad_y = y;
    bad_y[3] = -1.0;
    CHECK_THROWS_AS(slope::fit_loglog_slope(x, bad_y, 0.0, 1.0), std::invalid_argument);
}

#ifdef SPINFLIP_CLI_PATH
TEST_CASE("CLI exit codes and plumbing") {
    std::string cli = SPINFLIP_CLI_PATH;

    // malformed config: negative distance must be rejected before computing
    std::string bad = write_temp("bad.json", R"({"atom": {"surface_distance_m": -1e-6}})");
    int rc_bad = std::system((cli + " rate --config " + bad + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc_bad) == 2);

    // vacuum config evaluates instantly and succeeds
    std::string vac = write_temp("vac.json", R"({
      "wire": {
        "core":    { "outer_radius_m": 185e-6, "rel_permittivity": [1.0, 0.0] },
        "coating": { "outer_radius_m": 240e-6, "rel_permittivity": [1.0, 0.0] }
      }
    })");
    CHECK(std::system((cli + " rate --config " + vac + " --json > /tmp/spinflip_rate.json 2>&1")
                          .c_str()) == 0);
    std::ifstream in("/tmp/spinflip_rate.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("\"lifetime_s\"") != std::string::npos);

    // sweep + slope round trip through files
    std::string cmd = cli + " sweep --config " + vac +
                      " --param distance --from 2e-5 --to 8e-5 --points 4 --log"
                      " --out /tmp/spinflip_sweep.csv";
    CHECK(std::system((cmd + " > /dev/null 2>&1").c_str()) == 0);
    CHECK(std::system((cli + " slope --in /tmp/spinflip_sweep.csv --from 1e-5 --to 1e-4"
                             " > /tmp/spinflip_slope.txt 2>&1")
                          .c_str()) == 0);
    std::ifstream sl("/tmp/spinflip_slope.txt");
    std::stringstream ss2;
    ss2 << sl.rdbuf();
    CHECK(ss2.str().find("slope = ") != std::string::npos);

    // unknown preset is a configuration error
    int rc_preset = std::system((cli + " sweep --preset fig9 > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc_preset) == 2);
}
#endif

TEST_CASE("reference configuration golden lifetime") {
    // the tool's own converged value for the built-in configuration,
    // stable under tolerance halving (see the rate self-convergence test)
    config::RunConfig cfg = config::reference_defaults();
    cfg.numerics.quad_rel_tol = 1e-7;
    cfg.numerics.quad_abs_tol = 1e-7;
    cfg.numerics.mode_rel_tol = 1e-6;
    auto r = spinflip::rate::total_rate(cfg.wire(), cfg.transition(), cfg.field_point(),
                                        cfg.numerics, cfg.constants);
    CHECK(r.converged);
    CHECK(r.lifetime == doctest::Approx(11.40669).epsilon(2e-4));
}
