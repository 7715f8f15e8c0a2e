#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/grid.hpp"
#include "nlsp/potential.hpp"

namespace nlsp {

namespace detail {

struct RayData {
    double g = 0.0;
    double h = 1.0;
    double c = 0.0;  // chirp coefficient (1 - h)/g, taken as 0 on degenerate axes
};

inline RayData ray_data(int delta, double omega, double t) {
    RayData r;
    phase_functions(delta, omega, t, r.g, r.h);
    if (delta == 0) return r;
    // (1 - h)/g = delta w^2 g / (1 + h); the right-hand form is finite at the
    // zeros of g away from foci (h = +1) and bounded for repulsive axes.
    if (std::abs(1.0 + r.h) > 1e-8)
        r.c = static_cast<double>(delta) * omega * omega * r.g / (1.0 + r.h);
    else if (r.g != 0.0)
        r.c = (1.0 - r.h) / r.g;
    else
        r.c = std::numeric_limits<double>::infinity();
    return r;
}

// A single chirp-drift-chirp step is admissible when no non-degenerate axis
// sits at a nontrivial zero of g (where the composition would silently drop
// the focal phase) and every chirp multiplier stays Nyquist-sampled.
inline bool kdk_admissible(const Grid& grid, const QuadraticPotential& pot, double eps, double t,
                           std::vector<RayData>& rays) {
    const std::size_t d = pot.dim();
    rays.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        rays[j] = ray_data(pot.delta[j], pot.omega[j], t);
        if (pot.delta[j] != 0 && pot.omega[j] * std::abs(t) > 1.0) {
            const double g_scale = std::max(1.0, 1.0 / pot.omega[j]);
            if (std::abs(rays[j].g) < 1e-6 * g_scale) return false;
        }
        const double advance = std::abs(rays[j].c) * grid.axis(j).half_width *
                               grid.axis(j).spacing / eps;
        if (!(advance < 0.9 * std::numbers::pi)) return false;
    }
    return true;
}

inline void kdk_step(WaveFunction& w, const std::vector<RayData>& rays) {
    const std::size_t d = w.grid.dim();
    std::vector<double> chirp(d, 0.0);
    bool any_chirp = false;
    for (std::size_t j = 0; j < d; ++j) {
        chirp[j] = -rays[j].c / (2.0 * w.epsilon);
        any_chirp = any_chirp || chirp[j] != 0.0;
    }
    if (any_chirp) apply_quadratic_phase(w, chirp);

    WaveFunction spec = forward_spectral(w);
    std::vector<std::vector<cdouble>> tables(d);
    for (std::size_t a = 0; a < d; ++a) {
        const auto& ks = w.grid.frequencies(a);
        tables[a].resize(ks.size());
        for (std::size_t k = 0; k < ks.size(); ++k) {
            const double arg = -0.5 * w.epsilon * rays[a].g * ks[k] * ks[k];
            tables[a][k] = {std::cos(arg), std::sin(arg)};
        }
    }
    for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        cdouble f{1.0, 0.0};
        for (std::size_t a = 0; a < d; ++a) f *= tables[a][idx[a]];
        spec.values[flat] *= f;
    });
    w.values = inverse_spectral(spec).values;

    if (any_chirp) apply_quadratic_phase(w, chirp);
}

}  // namespace detail

inline constexpr int mehler_max_split_depth = 8;

// Exact evolution under i eps u_t + (eps^2/2) Lap u = V u for the canonical
// quadratic part of V (no residual linear or constant term) over signed time t.
// Factored per step as chirp * free drift * chirp, which reproduces the
// continuum flow exactly on band-limited data; steps crossing focal times are
// halved uniformly until each substep is admissible, so focal phases are
// accumulated through the composition.  Unconditionally mass-preserving.
inline void mehler_propagate(WaveFunction& w, const QuadraticPotential& pot, double t) {
    if (pot.dim() != w.grid.dim())
        throw std::invalid_argument("mehler_propagate: potential/grid dimension mismatch");
    if (pot.has_gauge_terms())
        throw std::invalid_argument(
            "mehler_propagate: residual linear/constant terms must be removed first "
            "(see the gauge transforms)");
    if (t == 0.0) return;

    std::vector<detail::RayData> rays;
    int depth = 0;
    double sub = t;
    while (!detail::kdk_admissible(w.grid, pot, w.epsilon, sub, rays)) {
        if (++depth > mehler_max_split_depth) {
            std::ostringstream msg;
            msg << "mehler_propagate: no admissible substep after " << mehler_max_split_depth
                << " halvings of t = " << t
                << "; the target time is too close to a focal singularity for this grid";
            throw singular_time_error(msg.str());
        }
        sub *= 0.5;
    }
    const std::size_t steps = std::size_t{1} << depth;
    for (std::size_t s = 0; s < steps; ++s) detail::kdk_step(w, rays);
    w.time += t;
}

// Rewinds mehler_propagate(w, pot, t) exactly (the flow is reversible).
inline void mehler_inverse(WaveFunction& w, const QuadraticPotential& pot, double t) {
    mehler_propagate(w, pot, -t);
}

// Sup-norm envelope prod_j (2 pi eps |g_j(t)|)^{-1/2}; +infinity at focal
// times where some g_j vanishes.
inline double dispersion_bound(const QuadraticPotential& pot, double eps, double t) {
    double prod = 1.0;
    for (std::size_t j = 0; j < pot.dim(); ++j) {
        double g, h;
        phase_functions(pot.delta[j], pot.omega[j], t, g, h);
        if (g == 0.0) return std::numeric_limits<double>::infinity();
        prod *= 2.0 * std::numbers::pi * eps * std::abs(g);
    }
    return 1.0 / std::sqrt(prod);
}

struct SamplingReport {
    std::vector<double> chirp_coefficient;   // (1 - h_j)/g_j per axis
    std::vector<double> chirp_phase_advance; // worst per-cell phase increment / eps
    bool single_step_ok = false;             // one chirp-drift-chirp step suffices
    int required_halvings = 0;               // -1 when no admissible depth exists
};

inline SamplingReport sampling_report(const Grid& grid, const QuadraticPotential& pot, double eps,
                                      double t) {
    SamplingReport rep;
    std::vector<detail::RayData> rays;
    detail::kdk_admissible(grid, pot, eps, t, rays);
    for (std::size_t j = 0; j < pot.dim(); ++j) {
        rep.chirp_coefficient.push_back(rays[j].c);
        rep.chirp_phase_advance.push_back(std::abs(rays[j].c) * grid.axis(j).half_width *
                                          grid.axis(j).spacing / eps);
    }
    rep.single_step_ok = detail::kdk_admissible(grid, pot, eps, t, rays);
    rep.required_halvings = -1;
    double sub = t;
    for (int depth = 0; depth <= mehler_max_split_depth; ++depth, sub *= 0.5) {
        if (detail::kdk_admissible(grid, pot, eps, sub, rays)) {
            rep.required_halvings = depth;
            break;
        }
    }
    return rep;
}

}  // namespace nlsp
