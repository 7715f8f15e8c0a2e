#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/grid.hpp"
#include "nlsp/nonlinearity.hpp"
#include "nlsp/potential.hpp"

namespace nlsp {

namespace detail {

inline void require_conformal(const Nonlinearity& nl, std::size_t n, const char* who) {
    if (nl.is_linear()) return;
    if (std::abs(nl.sigma - 2.0 / static_cast<double>(n)) > 1e-12)
        throw std::domain_error(std::string(who) +
                                ": sigma = 2/n required for the nonlinear identity");
}

inline void require_isometry(double mass_in, double mass_out, const char* who) {
    if (std::abs(mass_out - mass_in) > 1e-8 * mass_in)
        throw resolution_error(std::string(who) +
                               ": mass not preserved by resampling; grid too coarse "
                               "or state leaves the box");
}

inline void require_interior(const WaveFunction& w, double limit, const char* who) {
    if (boundary_mass_fraction(w) > limit)
        throw boundary_mass_error(std::string(who) + ": significant mass in the outer box");
}

}  // namespace detail

// Warped times of the lens maps: the free solution is consumed at these times.
inline double harmonic_warp(double t, double omega) { return std::tan(omega * t) / omega; }
inline double repulsive_warp(double t, double omega) { return std::tanh(omega * t) / omega; }
inline double harmonic_unwarp(double s, double omega) { return std::atan(omega * s) / omega; }
inline double repulsive_unwarp(double s, double omega) { return std::atanh(omega * s) / omega; }

// ---------------------------------------------------------------------------
// Moving-frame gauge for a uniform field (V = E.x): from a free solution v at
// time t, u(t, x) = v(t, x + t^2 E/2) exp(-i (t E.x + t^3 |E|^2 / 6) / eps).
inline WaveFunction avron_herbst(const WaveFunction& v, const std::vector<double>& field,
                                 double boundary_limit = 1e-6) {
    if (field.size() != v.grid.dim())
        throw std::invalid_argument("avron_herbst: one field component per axis");
    const double t = v.time;
    std::vector<double> shift(field.size());
    double e2 = 0.0;
    for (std::size_t a = 0; a < field.size(); ++a) {
        shift[a] = 0.5 * t * t * field[a];
        e2 += field[a] * field[a];
    }
    WaveFunction u = shift_bandlimited(v, shift);
    detail::require_interior(u, boundary_limit, "avron_herbst");
    std::vector<double> xi(field.size());
    for (std::size_t a = 0; a < field.size(); ++a) xi[a] = -t * field[a] / v.epsilon;
    apply_plane_phase(u, xi);
    const double arg = -t * t * t * e2 / (6.0 * v.epsilon);
    const cdouble ph{std::cos(arg), std::sin(arg)};
    for (cdouble& z : u.values) z *= ph;
    return u;
}

inline WaveFunction avron_herbst_inverse(const WaveFunction& u, const std::vector<double>& field,
                                         double boundary_limit = 1e-6) {
    if (field.size() != u.grid.dim())
        throw std::invalid_argument("avron_herbst_inverse: one field component per axis");
    const double t = u.time;
    WaveFunction v = u;
    const double e2 = [&] {
        double s = 0.0;
        for (double f : field) s += f * f;
        return s;
    }();
    const double arg = t * t * t * e2 / (6.0 * u.epsilon);
    const cdouble ph{std::cos(arg), std::sin(arg)};
    for (cdouble& z : v.values) z *= ph;
    std::vector<double> xi(field.size());
    for (std::size_t a = 0; a < field.size(); ++a) xi[a] = t * field[a] / u.epsilon;
    apply_plane_phase(v, xi);
    std::vector<double> shift(field.size());
    for (std::size_t a = 0; a < field.size(); ++a) shift[a] = -0.5 * t * t * field[a];
    v = shift_bandlimited(v, shift);
    detail::require_interior(v, boundary_limit, "avron_herbst_inverse");
    return v;
}

// ---------------------------------------------------------------------------
// Lens map for the isotropic trap: from a free solution v taken at the warped
// time s = tan(wt)/w,
//   u(t, x) = (cos wt)^{-n/2} exp(-i w |x|^2 tan(wt) / (2 eps)) v(s, x / cos(wt)).
// Valid on |t| < pi/(2w); exchanges potential and free dynamics at sigma = 2/n.
inline WaveFunction harmonic_lens(const WaveFunction& v, double t, double omega,
                                  const Nonlinearity& nl) {
    detail::require_conformal(nl, v.grid.dim(), "harmonic_lens");
    if (!(omega > 0.0)) throw std::invalid_argument("harmonic_lens: omega > 0");
    if (!(std::abs(t) < 0.5 * std::numbers::pi / omega))
        throw std::domain_error("harmonic_lens: |t| < pi/(2 omega) required");
    const double c = std::cos(omega * t);
    const double mass_in = mass(v);
    WaveFunction u = dilate_bandlimited(v, std::vector<double>(v.grid.dim(), c));
    const double scale = std::pow(c, -0.5 * static_cast<double>(v.grid.dim()));
    for (cdouble& z : u.values) z *= scale;
    detail::require_isometry(mass_in, mass(u), "harmonic_lens");
    apply_quadratic_phase(
        u, std::vector<double>(u.grid.dim(), -omega * std::tan(omega * t) / (2.0 * u.epsilon)));
    u.time = t;
    return u;
}

// Recovers the free solution at the warped time from the trapped one.
inline WaveFunction harmonic_lens_inverse(const WaveFunction& u, double omega,
                                          const Nonlinearity& nl) {
    detail::require_conformal(nl, u.grid.dim(), "harmonic_lens_inverse");
    const double t = u.time;
    if (!(std::abs(t) < 0.5 * std::numbers::pi / omega))
        throw std::domain_error("harmonic_lens_inverse: |t| < pi/(2 omega) required");
    const double c = std::cos(omega * t);
    WaveFunction w = u;
    apply_quadratic_phase(
        w, std::vector<double>(w.grid.dim(), omega * std::tan(omega * t) / (2.0 * w.epsilon)));
    const double mass_in = mass(w);
    WaveFunction v = dilate_bandlimited(w, std::vector<double>(w.grid.dim(), 1.0 / c));
    const double scale = std::pow(c, 0.5 * static_cast<double>(w.grid.dim()));
    for (cdouble& z : v.values) z *= scale;
    detail::require_isometry(mass_in, mass(v), "harmonic_lens_inverse");
    v.time = harmonic_warp(t, omega);
    return v;
}

// Lens map for the inverted trap: defined for all t, warped time in (-1/w, 1/w):
//   u(t, x) = (cosh wt)^{-n/2} exp(+i w |x|^2 tanh(wt) / (2 eps)) v(s, x / cosh(wt)).
inline WaveFunction repulsive_lens(const WaveFunction& v, double t, double omega,
                                   const Nonlinearity& nl) {
    detail::require_conformal(nl, v.grid.dim(), "repulsive_lens");
    if (!(omega > 0.0)) throw std::invalid_argument("repulsive_lens: omega > 0");
    const double c = std::cosh(omega * t);
    const double mass_in = mass(v);
    WaveFunction u = dilate_bandlimited(v, std::vector<double>(v.grid.dim(), c));
    const double scale = std::pow(c, -0.5 * static_cast<double>(v.grid.dim()));
    for (cdouble& z : u.values) z *= scale;
    detail::require_isometry(mass_in, mass(u), "repulsive_lens");
    apply_quadratic_phase(
        u, std::vector<double>(u.grid.dim(), omega * std::tanh(omega * t) / (2.0 * u.epsilon)));
    u.time = t;
    return u;
}

inline WaveFunction repulsive_lens_inverse(const WaveFunction& u, double omega,
                                           const Nonlinearity& nl) {
    detail::require_conformal(nl, u.grid.dim(), "repulsive_lens_inverse");
    const double t = u.time;
    const double c = std::cosh(omega * t);
    WaveFunction w = u;
    apply_quadratic_phase(
        w, std::vector<double>(w.grid.dim(), -omega * std::tanh(omega * t) / (2.0 * w.epsilon)));
    const double mass_in = mass(w);
    WaveFunction v = dilate_bandlimited(w, std::vector<double>(w.grid.dim(), 1.0 / c));
    const double scale = std::pow(c, 0.5 * static_cast<double>(w.grid.dim()));
    for (cdouble& z : v.values) z *= scale;
    detail::require_isometry(mass_in, mass(v), "repulsive_lens_inverse");
    v.time = repulsive_warp(t, omega);
    return v;
}

// ---------------------------------------------------------------------------
// Gauge for initial plane oscillations in the unit-frequency trap: maps the
// solution u with datum f to the one with datum f exp(i x . xi0 / eps):
//   out(t, x) = u(t, x - xi0 sin t) exp(i (x - (xi0/2) sin t) . xi0 cos t / eps).
inline WaveFunction plane_oscillation_gauge(const WaveFunction& u, const std::vector<double>& xi0,
                                            const QuadraticPotential& pot,
                                            double boundary_limit = 1e-6) {
    if (xi0.size() != u.grid.dim() || pot.dim() != u.grid.dim())
        throw std::invalid_argument("plane_oscillation_gauge: one component per axis");
    if (!pot.is_isotropic() || pot.delta[0] != 1 || std::abs(pot.omega[0] - 1.0) > 1e-12 ||
        pot.has_gauge_terms())
        throw std::domain_error("plane_oscillation_gauge: unit-frequency isotropic trap required");
    const double t = u.time;
    const double s = std::sin(t), c = std::cos(t);
    std::vector<double> shift(xi0.size());
    for (std::size_t a = 0; a < xi0.size(); ++a) shift[a] = -xi0[a] * s;
    WaveFunction out = shift_bandlimited(u, shift);
    detail::require_interior(out, boundary_limit, "plane_oscillation_gauge");
    std::vector<double> xi(xi0.size());
    double xi0_sq = 0.0;
    for (std::size_t a = 0; a < xi0.size(); ++a) {
        xi[a] = xi0[a] * c / u.epsilon;
        xi0_sq += xi0[a] * xi0[a];
    }
    apply_plane_phase(out, xi);
    const double arg = -0.5 * xi0_sq * s * c / u.epsilon;
    const cdouble ph{std::cos(arg), std::sin(arg)};
    for (cdouble& z : out.values) z *= ph;
    return out;
}

// ---------------------------------------------------------------------------
// Unitary zoom between the macroscopic frame and the eps = 1 frame:
//   u(t, x) = eps^{-n/2} psi((t - t0)/eps, x/eps).
// Exact pointwise on the paired grids [-L, L)/N <-> [-L/eps, L/eps)/N.
inline WaveFunction to_microscopic(const WaveFunction& u, double t0 = 0.0) {
    const double eps = u.epsilon;
    for (std::size_t a = 0; a < u.grid.dim(); ++a)
        if (u.grid.axis(a).spacing > eps / 8.0)
            throw resolution_error(
                "to_microscopic: fewer than 8 cells per eps-scale feature on axis " +
                std::to_string(a));
    std::vector<std::size_t> pts;
    std::vector<double> hw;
    for (std::size_t a = 0; a < u.grid.dim(); ++a) {
        pts.push_back(u.grid.axis(a).points);
        hw.push_back(u.grid.axis(a).half_width / eps);
    }
    WaveFunction psi(Grid(pts, hw), u.values, (u.time - t0) / eps, 1.0);
    const double amp = std::pow(eps, 0.5 * static_cast<double>(u.grid.dim()));
    for (cdouble& z : psi.values) z *= amp;
    return psi;
}

inline WaveFunction to_macroscopic(const WaveFunction& psi, double eps, double t0 = 0.0) {
    if (!(eps > 0.0)) throw std::invalid_argument("to_macroscopic: eps > 0");
    std::vector<std::size_t> pts;
    std::vector<double> hw;
    for (std::size_t a = 0; a < psi.grid.dim(); ++a) {
        pts.push_back(psi.grid.axis(a).points);
        hw.push_back(psi.grid.axis(a).half_width * eps);
    }
    WaveFunction u(Grid(pts, hw), psi.values, t0 + eps * psi.time, eps);
    const double amp = std::pow(eps, -0.5 * static_cast<double>(psi.grid.dim()));
    for (cdouble& z : u.values) z *= amp;
    return u;
}

}  // namespace nlsp
