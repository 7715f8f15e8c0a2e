#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/scenario.hpp"
#include "nlsp/sweep_impl.hpp"

#ifndef NLSP_SOURCE_DIR
#define NLSP_SOURCE_DIR "."
#endif

using nlsp::cdouble;
using nlsp::config_error;
using nlsp::DatumKind;
using nlsp::OracleMode;
using nlsp::parse_scenario;
using nlsp::RunStatus;
using nlsp::ScenarioSpec;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path fresh_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "nlsp_scenario_tests" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

ScenarioSpec tiny_free_run() {
    ScenarioSpec s;
    s.name = "tiny";
    s.grid.points = {256};
    s.nonlinearity.lambda = -1.0;
    s.nonlinearity.sigma = 1.0;
    s.time.t_end = 0.05;
    s.time.record_interval = 0.025;
    s.observables.lp = {4.0};
    s.output.prefix = "single";
    return s;
}

}  // namespace

TEST_CASE("empty scenario text yields the documented defaults") {
    const ScenarioSpec spec = parse_scenario("");
    CHECK(spec.name == "unnamed");
    CHECK(spec.epsilon == 1.0);
    CHECK(spec.time.t_end == 1.0);
    CHECK(spec.initial.kind == DatumKind::gaussian);
    CHECK(spec.output.oracle == OracleMode::off);

    const nlsp::Grid g = build_grid(spec);
    CHECK(g.dim() == 1);
    CHECK(g.axis(0).points == 2048);
    CHECK(g.axis(0).half_width == 16.0);

    CHECK(build_potential(spec).is_free());
    CHECK(build_nonlinearity(spec).is_linear());

    const nlsp::WaveFunction u0 = build_initial(spec, g);
    CHECK(u0.epsilon == 1.0);
    CHECK(std::abs(u0.values[g.axis(0).points / 2] - cdouble{1.0, 0.0}) < 1e-15);
}

TEST_CASE("parse errors name the offending line") {
    CHECK_THROWS_MATCHES(parse_scenario("epsilon = 1\nepsilon = 2\n"), config_error,
                         MessageMatches(ContainsSubstring("line 2") &&
                                        ContainsSubstring("duplicate key 'epsilon'")));
    CHECK_THROWS_MATCHES(parse_scenario("[grid]\npoints = 128\n[turbo]\n"), config_error,
                         MessageMatches(ContainsSubstring("line 3") &&
                                        ContainsSubstring("unknown section 'turbo'")));
    CHECK_THROWS_MATCHES(parse_scenario("[time]\nt_fin = 1\n"), config_error,
                         MessageMatches(ContainsSubstring("line 2") &&
                                        ContainsSubstring("unknown time key")));
    CHECK_THROWS_MATCHES(parse_scenario("\n[grid]\nhalf_width = twelve\n"), config_error,
                         MessageMatches(ContainsSubstring("line 3") &&
                                        ContainsSubstring("malformed number")));
    CHECK_THROWS_MATCHES(parse_scenario("[grid\npoints = 64\n"), config_error,
                         MessageMatches(ContainsSubstring("line 1") &&
                                        ContainsSubstring("unterminated")));
    CHECK_THROWS_MATCHES(parse_scenario("[nonlinearity]\nsigma =\n"), config_error,
                         MessageMatches(ContainsSubstring("line 2") &&
                                        ContainsSubstring("empty value")));
    CHECK_THROWS_MATCHES(parse_scenario("[time]\nt_end 0.5\n"), config_error,
                         MessageMatches(ContainsSubstring("line 2") &&
                                        ContainsSubstring("key = value")));
    CHECK_THROWS_MATCHES(parse_scenario("[grid]\npoints = 4\n"), config_error,
                         MessageMatches(ContainsSubstring("integers >= 8")));
}

TEST_CASE("exponent range is enforced against the dimension") {
    const std::string base = "[grid]\ndim = 3\npoints = 8\n[nonlinearity]\nlambda = 1\n";
    CHECK_THROWS_AS(parse_scenario(base + "sigma = 2\n"), std::invalid_argument);
    CHECK_NOTHROW(parse_scenario(base + "sigma = 1.5\n"));
    // Without coupling the exponent is inert and any value passes.
    CHECK_NOTHROW(parse_scenario("[grid]\ndim = 3\npoints = 8\n[nonlinearity]\nsigma = 2\n"));
}

TEST_CASE("gaussian datum realizes amplitude, width, center, chirp, and plane phase") {
    ScenarioSpec spec = parse_scenario(
        "epsilon = 0.5\n"
        "[grid]\npoints = 512\nhalf_width = 8\n"
        "[initial]\namplitude = 1.2\nwidth = 0.8\ncenter = 0.5\nchirp = 0.3\nplane = 0.4\n");
    const nlsp::Grid g = build_grid(spec);
    const nlsp::WaveFunction u0 = build_initial(spec, g);
    CHECK(u0.epsilon == 0.5);
    for (std::size_t m = 40; m < 512; m += 97) {
        const double x = g.coords(0)[m];
        const double q = (x - 0.5) * (x - 0.5);
        const cdouble want = 1.2 * std::exp(-q / (2.0 * 0.8 * 0.8)) *
                             std::polar(1.0, (0.5 * 0.3 * x * x + 0.4 * x) / 0.5);
        CHECK(std::abs(u0.values[m] - want) < 1e-14);
    }
}

TEST_CASE("concentrating datum rescales the profile and guards resolution") {
    ScenarioSpec spec = parse_scenario(
        "epsilon = 0.25\n"
        "[grid]\npoints = 2048\n"
        "[initial]\nkind = concentrating\namplitude = 0.9\nchirp = 0.2\n");
    const nlsp::Grid g = build_grid(spec);
    const nlsp::WaveFunction u0 = build_initial(spec, g);
    const double eps = 0.25;
    for (std::size_t m = 100; m < 2048; m += 331) {
        const double y = g.coords(0)[m] / eps;  // profile variable
        const cdouble want = 0.9 * std::pow(eps, -0.5) * std::exp(-0.5 * y * y) *
                             std::polar(1.0, 0.5 * 0.2 * y * y);
        CHECK(std::abs(u0.values[m] - want) < 1e-12);
    }
    CHECK(mass(u0) == Catch::Approx(0.81 * std::sqrt(std::numbers::pi)).epsilon(1e-10));

    spec.epsilon = 0.05;  // 8-cells-per-feature guard: spacing 1/64 > eps/8
    CHECK_THROWS_AS(build_initial(spec, g), nlsp::resolution_error);
}

TEST_CASE("potential section broadcasts and canonicalizes") {
    {
        ScenarioSpec spec = parse_scenario(
            "[grid]\ndim = 2\npoints = 16\n[potential]\ndelta = 1\nomega = 2\n");
        const nlsp::QuadraticPotential pot = build_potential(spec);
        REQUIRE(pot.dim() == 2);
        CHECK((pot.delta[0] == 1 && pot.delta[1] == 1));
        CHECK((pot.omega[0] == 2.0 && pot.omega[1] == 2.0));
        CHECK(pot.is_isotropic());
    }
    {
        // Diagonal matrix route: coefficients of the quadratic polynomial.
        ScenarioSpec spec = parse_scenario(
            "[grid]\ndim = 2\npoints = 16\n[potential]\nmatrix = 0.5, 0, 0, -2\n");
        const nlsp::QuadraticPotential pot = build_potential(spec);
        CHECK(pot.delta[0] == 1);
        CHECK(pot.delta[1] == -1);
        CHECK(pot.omega[0] == Catch::Approx(1.0));
        CHECK(pot.omega[1] == Catch::Approx(2.0));
    }
    CHECK_THROWS_MATCHES(
        build_potential(parse_scenario(
            "[grid]\ndim = 2\npoints = 16\n[potential]\nmatrix = 1, 0.2, 0.2, 1\n")),
        config_error, MessageMatches(ContainsSubstring("not axis-aligned")));
    CHECK_THROWS_MATCHES(
        build_potential(parse_scenario(
            "[grid]\npoints = 16\n[potential]\nmatrix = 0.5\nlinear = 1.0\n")),
        config_error, MessageMatches(ContainsSubstring("recenter")));
    CHECK_THROWS_AS(
        build_potential(parse_scenario("[grid]\ndim = 2\npoints = 16\n[potential]\nmatrix = 1\n")),
        config_error);
}

TEST_CASE("run_scenario writes the documented CSV and verdict files deterministically") {
    const ScenarioSpec spec = tiny_free_run();
    const auto dir_a = fresh_dir("csv_a");
    const auto dir_b = fresh_dir("csv_b");
    const nlsp::ExperimentReport rep = run_scenario(spec, dir_a.string());
    REQUIRE(rep.ran);
    CHECK(rep.outcome.status == RunStatus::completed);
    REQUIRE(rep.outcome.records.size() == 3);  // t = 0, 0.025, 0.05

    const std::string csv = slurp(rep.csv_path);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "t,mass,energy,kinetic,potential_term,nonlinear_term,J_norm_sq,H_norm_sq,virial,"
          "E1,E2,L4,Linf,boundary_mass,spectral_tail");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const std::string verdicts = slurp(rep.verdict_path);
    for (const char* key :
         {"name = tiny", "status = completed", "records = 3", "criteria_preconditions",
          "criteria_free_energy", "criteria_harmonic_time_bound"})
        CHECK_THAT(verdicts, ContainsSubstring(key));

    run_scenario(spec, dir_b.string());
    CHECK(slurp(dir_b / "single.csv") == csv);
    CHECK(slurp(dir_b / "single.verdicts") == verdicts);
}

TEST_CASE("oracle auto-selection maps the potential to its transform") {
    ScenarioSpec spec = parse_scenario(
        "[grid]\npoints = 2048\n"
        "[potential]\ndelta = 1\nomega = 1.0\n"
        "[time]\nt_end = 0.5\nstate_times = 0.25, 0.5\n"
        "[output]\noracle = auto\n");
    const nlsp::ExperimentReport rep = run_scenario(spec);
    REQUIRE(rep.oracle.size() == 2);
    CHECK(rep.oracle_max_rel_diff > 0.0);
    CHECK(rep.oracle_max_rel_diff < 5e-4);

    // No transform covers an anisotropic trap.
    ScenarioSpec aniso = parse_scenario(
        "[grid]\ndim = 2\npoints = 32\n"
        "[potential]\ndelta = 1, 1\nomega = 1, 2\n"
        "[time]\nt_end = 0.02\n"
        "[output]\noracle = auto\n");
    CHECK_THROWS_MATCHES(run_scenario(aniso), config_error,
                         MessageMatches(ContainsSubstring("no transform oracle")));
}

TEST_CASE("sweep: empty grid, singleton equivalence, and crash isolation") {
    const ScenarioSpec base = tiny_free_run();
    CHECK(nlsp::sweep(base, "epsilon", {}).empty());

    const auto dir_run = fresh_dir("sweep_single_direct");
    const auto dir_sweep = fresh_dir("sweep_single_cells");
    run_scenario(base, dir_run.string());
    const auto single = nlsp::sweep(base, "epsilon", {1.0}, dir_sweep.string());
    REQUIRE(single.size() == 1);
    REQUIRE(single[0].ran);
    CHECK(slurp(dir_sweep / "single_cell0.csv") == slurp(dir_run / "single.csv"));

    // Middle cell violates the exponent precondition; its neighbours still run.
    const auto cells = nlsp::sweep(base, "nonlinearity.sigma", {1.0, -1.0, 2.0});
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].ran);
    CHECK_FALSE(cells[1].ran);
    CHECK_THAT(cells[1].error, ContainsSubstring("sigma"));
    CHECK(cells[2].ran);

    // An unknown parameter key is itself a per-cell error, not a crash.
    const auto bad = nlsp::sweep(base, "grid.points", {64.0});
    REQUIRE(bad.size() == 1);
    CHECK_FALSE(bad[0].ran);
    CHECK_THAT(bad[0].error, ContainsSubstring("unknown sweep parameter"));
}

TEST_CASE("omega sweep flips the inverted-trap run from collapse to completion") {
    ScenarioSpec base;
    base.name = "repulsive_transition";
    base.output.prefix = "rt";
    base.grid.points = {8192};
    base.grid.half_width = 64.0;
    base.potential.delta = {-1};
    base.potential.omega = {1.0};
    base.nonlinearity = {-1.0, 2.0, 0.0};
    base.initial.amplitude = 1.5;
    base.initial.width = std::sqrt(0.5);
    base.time.t_end = 0.6;
    base.time.dt_initial = 5e-4;

    const auto reports = nlsp::sweep(base, "potential.omega", {0.5, 4.0});
    REQUIRE(reports.size() == 2);
    REQUIRE(reports[0].ran);
    REQUIRE(reports[1].ran);
    CHECK(reports[0].outcome.status == RunStatus::blow_up_detected);
    CHECK(reports[1].outcome.status == RunStatus::completed);
}

TEST_CASE("shipped scenario files parse and build") {
    const std::filesystem::path dir = std::filesystem::path(NLSP_SOURCE_DIR) / "scenarios";
    REQUIRE(std::filesystem::is_directory(dir));
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".cfg") continue;
        ++seen;
        INFO(entry.path().filename().string());
        const ScenarioSpec spec = nlsp::parse_scenario_file(entry.path().string());
        const nlsp::Grid g = build_grid(spec);
        (void)build_potential(spec);
        (void)build_nonlinearity(spec);
        (void)build_initial(spec, g);
    }
    CHECK(seen >= 4);
}
