#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "nlsp/grid.hpp"
#include "nlsp/nonlinearity.hpp"
#include "nlsp/observables.hpp"
#include "nlsp/potential.hpp"
#include "nlsp/propagator.hpp"

using nlsp::cdouble;
using nlsp::Grid;
using nlsp::Nonlinearity;
using nlsp::QuadraticPotential;
using nlsp::WaveFunction;

namespace {

// A exp(-a (x - c)^2), optionally with plane phase exp(i xi x / eps).
WaveFunction gaussian(const Grid& g, double eps, double amp, double a, double center = 0.0,
                      double xi = 0.0) {
    WaveFunction w = WaveFunction::zeros(g);
    w.epsilon = eps;
    for (std::size_t m = 0; m < g.total_points(); ++m) {
        const double x = g.coords(0)[m];
        const double y = x - center;
        w.values[m] = amp * std::exp(-a * y * y) * std::polar(1.0, xi * x / eps);
    }
    return w;
}

double sup_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    double worst = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) worst = std::max(worst, std::abs(a[m] - b[m]));
    return worst;
}

}  // namespace

TEST_CASE("the scattering exponent is the root of its quadratic") {
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        const double s = nlsp::sigma0(n);
        const double nn = static_cast<double>(n);
        CHECK(2.0 * nn * s * s + (nn - 2.0) * s - 2.0 == Catch::Approx(0.0).margin(1e-12));
        CHECK(s > 0.0);
    }
    CHECK(nlsp::sigma0(3) == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("interpolation exponents") {
    CHECK(nlsp::delta_p(1, 2.0) == 0.0);
    CHECK(nlsp::delta_p(3, 2.0) == 0.0);
    CHECK(nlsp::delta_p(1, std::numeric_limits<double>::infinity()) == Catch::Approx(0.5));
    CHECK(nlsp::delta_p(2, 4.0) == Catch::Approx(0.5));
    CHECK(nlsp::delta_p(3, 6.0) == Catch::Approx(1.0));
}

TEST_CASE("spectral derivative matches the analytic derivative of a chirped gaussian") {
    Grid g({1024}, {16.0});
    WaveFunction w = gaussian(g, 1.0, 1.0, 0.5);
    nlsp::apply_quadratic_phase(w, {0.3});
    const WaveFunction d = nlsp::spectral_derivative(w, 0);
    double worst = 0.0;
    for (std::size_t m = 0; m < g.total_points(); ++m) {
        const double x = g.coords(0)[m];
        const cdouble expect = (cdouble{-x, 0.0} + cdouble{0.0, 0.6 * x}) * w.values[m];
        worst = std::max(worst, std::abs(d.values[m] - expect));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("J and H reduce to the gradient and the position at t = 0") {
    Grid g({1024}, {16.0});
    const auto trap = QuadraticPotential::harmonic({1.3});
    WaveFunction w = gaussian(g, 0.7, 1.0, 0.5, 0.4);
    nlsp::apply_quadratic_phase(w, {-0.2});

    const auto J = nlsp::apply_J(w, 0.0, trap);
    const auto H = nlsp::apply_H(w, 0.0, trap);
    REQUIRE(J.size() == 1);
    REQUIRE(H.size() == 1);

    const WaveFunction d = nlsp::spectral_derivative(w, 0);
    std::vector<cdouble> igrad(d.values.size());
    std::vector<cdouble> xw(d.values.size());
    for (std::size_t m = 0; m < d.values.size(); ++m) {
        igrad[m] = cdouble{0.0, 1.0} * d.values[m];
        xw[m] = g.coords(0)[m] * w.values[m];
    }
    CHECK(sup_diff(J[0].values, igrad) < 1e-12);
    CHECK(sup_diff(H[0].values, xw) < 1e-12);
}

TEST_CASE("J factors through conjugation by the ray chirp") {
    // J_j(t) = i h e^{i theta x^2} d_j (e^{-i theta x^2} .) with
    // theta = -delta w^2 g / (2 h eps).
    Grid g({1024}, {16.0});
    const double omega = 1.3, eps = 1.0, t = 0.6;
    const auto trap = QuadraticPotential::harmonic({omega});
    WaveFunction w = gaussian(g, eps, 1.0, 0.5, 0.3);

    double gg, hh;
    nlsp::phase_functions(1, omega, t, gg, hh);
    const double theta = -omega * omega * gg / (2.0 * hh * eps);

    WaveFunction conj = w;
    nlsp::apply_quadratic_phase(conj, {-theta});
    WaveFunction d = nlsp::spectral_derivative(conj, 0);
    nlsp::apply_quadratic_phase(d, {theta});
    for (auto& v : d.values) v *= cdouble{0.0, hh};

    const auto J = nlsp::apply_J(w, t, trap);
    CHECK(sup_diff(J[0].values, d.values) < 1e-10);
}

TEST_CASE("J and H norms are constant along the linear flow") {
    // Wide box: the repulsive J weight w^2 g(t) x / eps grows exponentially,
    // so wrapped tails at the boundary must stay negligible.
    Grid g({2048}, {24.0});
    const std::vector<QuadraticPotential> pots = {QuadraticPotential::harmonic({1.3}),
                                                  QuadraticPotential::repulsive({0.8}),
                                                  QuadraticPotential::free_space(1)};
    for (const auto& pot : pots) {
        WaveFunction u0 = gaussian(g, 0.7, 1.0, 0.5, 0.4);
        nlsp::apply_quadratic_phase(u0, {0.15});
        const double j0 = nlsp::j_norm_sq(u0, 0.0, pot);
        const double h0 = nlsp::h_norm_sq(u0, 0.0, pot);
        for (double t : {0.4, 0.9, 1.5}) {
            WaveFunction u = u0;
            nlsp::mehler_propagate(u, pot, t);
            CHECK(std::abs(nlsp::j_norm_sq(u, t, pot) - j0) / j0 < 1e-10);
            CHECK(std::abs(nlsp::h_norm_sq(u, t, pot) - h0) / h0 < 1e-10);
        }
    }
}

TEST_CASE("energy breakdown matches gaussian closed forms") {
    Grid g({2048}, {16.0});
    const WaveFunction u0 = gaussian(g, 1.0, 3.0, 1.0);  // 3 exp(-x^2)
    const double root_pi_half = std::sqrt(std::numbers::pi / 2.0);
    const double root_pi_sixth = std::sqrt(std::numbers::pi / 6.0);

    const auto free = QuadraticPotential::free_space(1);
    const Nonlinearity quintic(-1.0, 2.0, 1);
    const auto eb = nlsp::energy_breakdown(u0, free, quintic);
    CHECK(eb.kinetic == Catch::Approx(4.5 * root_pi_half).epsilon(1e-9));
    CHECK(eb.potential == Catch::Approx(0.0).margin(1e-14));
    CHECK(eb.nonlinear == Catch::Approx(-243.0 * root_pi_sixth).epsilon(1e-9));
    CHECK(eb.total == Catch::Approx(eb.kinetic + eb.nonlinear).epsilon(1e-12));

    const auto trap = QuadraticPotential::harmonic({2.0});
    const auto eb2 = nlsp::energy_breakdown(u0, trap, Nonlinearity::linear(1));
    CHECK(eb2.potential == Catch::Approx(2.0 * 2.25 * root_pi_half).epsilon(1e-9));
    CHECK(eb2.nonlinear == 0.0);
}

TEST_CASE("transported energies split the conserved energy") {
    Grid g({1024}, {16.0});
    const double eps = 0.7;
    const Nonlinearity cubic(0.8, 1.0, 1);

    for (const auto& pot :
         {QuadraticPotential::harmonic({1.3}), QuadraticPotential::repulsive({0.6})}) {
        WaveFunction u0 = gaussian(g, eps, 1.0, 0.5, 0.3);
        const auto eb = nlsp::energy_breakdown(u0, pot, cubic);
        const auto [e1_0, e2_0] = nlsp::E1_E2(u0, 0.0, pot, cubic);
        CHECK(e1_0 == Catch::Approx(eb.kinetic + eb.nonlinear).epsilon(1e-10));
        CHECK(e2_0 == Catch::Approx(eb.potential).epsilon(1e-10));

        // Along the linear flow both J, H norms and the L^{2s+2} norm feed the
        // split; their sum must reproduce the conserved total at every time.
        for (double t : {0.4, 0.9}) {
            WaveFunction u = u0;
            nlsp::mehler_propagate(u, pot, t);
            const auto eb_t = nlsp::energy_breakdown(u, pot, Nonlinearity::linear(1));
            const auto [e1, e2] = nlsp::E1_E2(u, t, pot, Nonlinearity::linear(1));
            CHECK(e1 + e2 ==
                  Catch::Approx(eb_t.kinetic + eb_t.potential).epsilon(1e-9));
        }
    }

    WaveFunction u0 = gaussian(g, eps, 1.0, 0.5);
    CHECK_THROWS_AS(nlsp::E1_E2(u0, 0.0, QuadraticPotential::free_space(1), cubic),
                    std::domain_error);
    CHECK_THROWS_AS(nlsp::E1_E2(u0, 0.0, QuadraticPotential::stark({0.5}), cubic),
                    std::domain_error);
}

TEST_CASE("pseudo-conformal functional starts from the variance and is free-conserved") {
    Grid g({1024}, {16.0});
    const WaveFunction u0 = gaussian(g, 0.5, 1.2, 0.7, 0.4);
    const double xn = nlsp::norm_x_l2(u0);
    const Nonlinearity none = Nonlinearity::linear(1);
    CHECK(nlsp::pseudo_conformal_functional(u0, 0.0, none) ==
          Catch::Approx(0.5 * xn * xn).epsilon(1e-12));

    const auto free = QuadraticPotential::free_space(1);
    for (double t : {0.4, 0.8}) {
        WaveFunction u = u0;
        nlsp::mehler_propagate(u, free, t);
        CHECK(nlsp::pseudo_conformal_functional(u, t, none) ==
              Catch::Approx(0.5 * xn * xn).epsilon(1e-10));
    }

    CHECK_THROWS_AS(
        nlsp::pseudo_conformal_functional(u0, 0.0, QuadraticPotential::harmonic({1.0}), none),
        std::domain_error);
}

TEST_CASE("weighted interpolation monitor") {
    Grid g({1024}, {24.0});
    const auto anti = QuadraticPotential::repulsive({0.9});
    const WaveFunction u0 = gaussian(g, 1.0, 1.0, 0.5);

    // p = 2: no interpolation, the ratio is exactly the reciprocal margin.
    CHECK(nlsp::gn_constant(1, 2.0) == Catch::Approx(1.25).epsilon(1e-14));
    CHECK(nlsp::gn_constant(2, 2.0) == Catch::Approx(1.25).epsilon(1e-14));
    const auto at2 = nlsp::weighted_gn_check(u0, 0.0, anti, 2.0);
    CHECK(at2.ratio == Catch::Approx(1.0 / 1.25).epsilon(1e-12));

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(nlsp::gn_constant(1, inf) ==
          Catch::Approx(1.25 * std::pow(2.0 / std::numbers::pi, 0.25)).epsilon(1e-12));

    // Gaussians saturate the unmargined constant, so the ratio hugs 0.8 from
    // below along the flow while the |h|^{-1/2} weight tracks the decay.
    for (double t : {0.0, 0.5, 1.5}) {
        WaveFunction u = u0;
        nlsp::mehler_propagate(u, anti, t);
        const auto chk = nlsp::weighted_gn_check(u, t, anti, inf);
        CHECK(chk.ratio <= 1.0);
        CHECK(chk.ratio > 0.3);
        CHECK(chk.lhs == Catch::Approx(nlsp::norm_lp(u, inf)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(nlsp::weighted_gn_check(u0, 0.0, anti, 1.5), std::domain_error);
}

TEST_CASE("blow-up criteria from quadrature match gaussian closed forms") {
    Grid g({2048}, {20.0});
    const double root_pi_half = std::sqrt(std::numbers::pi / 2.0);
    const double root_pi_sixth = std::sqrt(std::numbers::pi / 6.0);
    const double mass0 = 9.0 * root_pi_half;              // ||3 e^{-x^2}||^2
    const double e_free = 4.5 * root_pi_half - 243.0 * root_pi_sixth;
    const Nonlinearity quintic(-1.0, 2.0, 1);

    const WaveFunction u0 = gaussian(g, 1.0, 3.0, 1.0);
    const auto free_rep =
        nlsp::blowup_criteria_report(u0, QuadraticPotential::free_space(1), quintic);
    CHECK(free_rep.preconditions_hold);
    CHECK(free_rep.free_energy == Catch::Approx(e_free).epsilon(1e-9));
    CHECK(free_rep.free_blowup);
    CHECK(std::isnan(free_rep.position_term));
    CHECK(std::isnan(free_rep.rotation_term));
    CHECK(free_rep.harmonic_time_bound == std::numeric_limits<double>::infinity());

    // Defocusing or subcritical data never qualify.
    CHECK_FALSE(nlsp::blowup_criteria_report(u0, QuadraticPotential::free_space(1),
                                             Nonlinearity(1.0, 2.0, 1))
                    .preconditions_hold);
    CHECK_FALSE(nlsp::blowup_criteria_report(u0, QuadraticPotential::free_space(1),
                                             Nonlinearity(-1.0, 1.0, 1))
                    .preconditions_hold);

    const auto trap_rep =
        nlsp::blowup_criteria_report(u0, QuadraticPotential::harmonic({0.8}), quintic);
    CHECK(trap_rep.harmonic_trap_blowup);
    CHECK(trap_rep.harmonic_time_bound == Catch::Approx(std::numbers::pi / 1.6));
    const WaveFunction faint = gaussian(g, 1.0, 0.05, 1.0);
    CHECK_FALSE(nlsp::blowup_criteria_report(faint, QuadraticPotential::harmonic({0.8}), quintic)
                    .harmonic_trap_blowup);

    // One-sided repulsive condition flips across w* = sqrt(-E0 / (||x u0||^2 / 2)).
    const double x2 = 2.25 * root_pi_half;  // ||x 3 e^{-x^2}||^2
    const double omega_star = std::sqrt(-e_free / (0.5 * x2));
    CHECK(omega_star > 10.0);
    CHECK(omega_star < 12.0);
    CHECK(nlsp::blowup_criteria_report(u0, QuadraticPotential::repulsive({10.0}), quintic)
              .repulsive_one_sided);
    CHECK_FALSE(nlsp::blowup_criteria_report(u0, QuadraticPotential::repulsive({12.0}), quintic)
                    .repulsive_one_sided);

    // Rotation term: a translated plane-phase datum carries angular momentum
    // eps w |Im int conj(u) x du| = w |xi| c ||f||^2.
    const double c = 1.5, xi = 0.5;
    const WaveFunction spun = gaussian(g, 1.0, 3.0, 1.0, c, xi);
    const auto both =
        nlsp::blowup_criteria_report(spun, QuadraticPotential::repulsive({3.0}), quintic);
    CHECK(both.rotation_term == Catch::Approx(3.0 * xi * c * mass0).epsilon(1e-8));
    CHECK(both.repulsive_one_sided);
    CHECK(both.repulsive_two_sided);

    const auto one =
        nlsp::blowup_criteria_report(spun, QuadraticPotential::repulsive({3.4}), quintic);
    CHECK(one.repulsive_one_sided);
    CHECK_FALSE(one.repulsive_two_sided);
}

TEST_CASE("scattering monitor rewinds checkpoints") {
    Grid g({1024}, {24.0});
    const auto free = QuadraticPotential::free_space(1);
    const WaveFunction u0 = gaussian(g, 1.0, 1.0, 0.5);

    std::vector<WaveFunction> states;
    for (double t : {0.5, 1.0, 1.5}) {
        WaveFunction u = u0;
        nlsp::mehler_propagate(u, free, t);
        states.push_back(std::move(u));
    }
    const auto res = nlsp::scattering_monitor(states, free);
    REQUIRE(res.sigma_diffs.size() == 2);
    // Linear checkpoints rewind to the datum exactly, so the limit is reached.
    CHECK(res.final_diff < 1e-10);
    CHECK(res.decreasing);
    CHECK(res.converged);
    CHECK(res.times[1] == Catch::Approx(1.0));

    CHECK_THROWS_AS(nlsp::scattering_monitor(states, QuadraticPotential::harmonic({1.0})),
                    std::domain_error);
    CHECK_THROWS_AS(nlsp::scattering_monitor({u0}, free), std::invalid_argument);
}

TEST_CASE("the fused observable record agrees with the individual functionals") {
    Grid g({1024}, {16.0});
    const double eps = 0.7, t = 0.45;
    const auto trap = QuadraticPotential::harmonic({1.1});
    const Nonlinearity cubic(0.8, 1.0, 1);

    WaveFunction u = gaussian(g, eps, 1.0, 0.5, 0.3);
    nlsp::apply_quadratic_phase(u, {0.1});
    nlsp::mehler_propagate(u, trap, t);

    const auto rec = nlsp::observe(u, trap, cubic, {4.0});
    const auto eb = nlsp::energy_breakdown(u, trap, cubic);
    const auto [e1, e2] = nlsp::E1_E2(u, t, trap, cubic);
    const double xn = nlsp::norm_x_l2(u);

    CHECK(rec.t == Catch::Approx(t));
    CHECK(rec.mass == Catch::Approx(nlsp::mass(u)).epsilon(1e-12));
    CHECK(rec.kinetic == Catch::Approx(eb.kinetic).epsilon(1e-12));
    CHECK(rec.potential_term == Catch::Approx(eb.potential).epsilon(1e-12));
    CHECK(rec.nonlinear_term == Catch::Approx(eb.nonlinear).epsilon(1e-12));
    CHECK(rec.energy == Catch::Approx(eb.total).epsilon(1e-12));
    CHECK(rec.j_norm_sq == Catch::Approx(nlsp::j_norm_sq(u, t, trap)).epsilon(1e-12));
    CHECK(rec.h_norm_sq == Catch::Approx(nlsp::h_norm_sq(u, t, trap)).epsilon(1e-12));
    CHECK(rec.virial == Catch::Approx(xn * xn).epsilon(1e-12));
    CHECK(rec.e1 == Catch::Approx(e1).epsilon(1e-12));
    CHECK(rec.e2 == Catch::Approx(e2).epsilon(1e-12));
    REQUIRE(rec.lp.size() == 1);
    CHECK(rec.lp[0] == Catch::Approx(nlsp::norm_lp(u, 4.0)).epsilon(1e-12));
    CHECK(rec.linf == Catch::Approx(nlsp::norm_lp(u, std::numeric_limits<double>::infinity()))
                          .epsilon(1e-12));
    CHECK(rec.boundary_mass >= 0.0);
    CHECK(rec.spectral_tail >= 0.0);

    // Ray-built norms are meaningless under gauge terms and must be omitted.
    const auto stark_rec =
        nlsp::observe(u, QuadraticPotential::stark({0.5}), cubic, {});
    CHECK(std::isnan(stark_rec.j_norm_sq));
    CHECK(std::isnan(stark_rec.h_norm_sq));
    CHECK(stark_rec.mass == Catch::Approx(nlsp::mass(u)).epsilon(1e-12));
}
