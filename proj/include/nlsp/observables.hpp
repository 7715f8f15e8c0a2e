#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/grid.hpp"
#include "nlsp/nonlinearity.hpp"
#include "nlsp/potential.hpp"
#include "nlsp/propagator.hpp"

namespace nlsp {

// Scattering threshold exponent (2 - n + sqrt(n^2 + 12n + 4)) / (4n).
inline double sigma0(std::size_t n) {
    const double nn = static_cast<double>(n);
    return (2.0 - nn + std::sqrt(nn * nn + 12.0 * nn + 4.0)) / (4.0 * nn);
}

// Interpolation exponent n(1/2 - 1/p); p = infinity gives n/2.
inline double delta_p(std::size_t n, double p) {
    if (std::isinf(p)) return static_cast<double>(n) / 2.0;
    return static_cast<double>(n) * (0.5 - 1.0 / p);
}

inline WaveFunction spectral_derivative(const WaveFunction& w, std::size_t axis) {
    if (axis >= w.grid.dim()) throw std::invalid_argument("spectral_derivative: axis out of range");
    WaveFunction spec = forward_spectral(w);
    const auto& ks = w.grid.frequencies(axis);
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        spec.values[flat] *= cdouble{0.0, ks[idx[axis]]};
    });
    return inverse_spectral(spec);
}

// Transported gradient, axis by axis: J_j(t) = -delta_j w_j^2 g_j(t) x_j / eps
// + i h_j(t) d_j.  J(0) = i grad.  Constant in t along the linear flow.
inline std::vector<WaveFunction> apply_J(const WaveFunction& w, double t,
                                         const QuadraticPotential& pot) {
    if (pot.dim() != w.grid.dim()) throw std::invalid_argument("apply_J: dimension mismatch");
    std::vector<WaveFunction> out;
    for (std::size_t j = 0; j < pot.dim(); ++j) {
        const PhasePair p = phase_functions(pot, j, t);
        WaveFunction d = spectral_derivative(w, j);
        const double mult = -static_cast<double>(pot.delta[j]) * pot.omega[j] * pot.omega[j] *
                            p.g / w.epsilon;
        const auto& xs = w.grid.coords(j);
        detail::for_each_index(w.grid,
                               [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
                                   d.values[flat] = cdouble{0.0, p.h} * d.values[flat] +
                                                    mult * xs[idx[j]] * w.values[flat];
                               });
        out.push_back(std::move(d));
    }
    return out;
}

// Transported position: H_j(t) = h_j(t) x_j + i eps g_j(t) d_j.  H(0) = x.
inline std::vector<WaveFunction> apply_H(const WaveFunction& w, double t,
                                         const QuadraticPotential& pot) {
    if (pot.dim() != w.grid.dim()) throw std::invalid_argument("apply_H: dimension mismatch");
    std::vector<WaveFunction> out;
    for (std::size_t j = 0; j < pot.dim(); ++j) {
        const PhasePair p = phase_functions(pot, j, t);
        WaveFunction d = spectral_derivative(w, j);
        const auto& xs = w.grid.coords(j);
        detail::for_each_index(w.grid,
                               [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
                                   d.values[flat] = cdouble{0.0, w.epsilon * p.g} * d.values[flat] +
                                                    p.h * xs[idx[j]] * w.values[flat];
                               });
        out.push_back(std::move(d));
    }
    return out;
}

namespace detail {

inline double stack_norm_sq(const std::vector<WaveFunction>& fields) {
    double s = 0.0;
    for (const auto& f : fields) {
        const double n = norm_l2(f);
        s += n * n;
    }
    return s;
}

}  // namespace detail

inline double j_norm_sq(const WaveFunction& w, double t, const QuadraticPotential& pot) {
    return detail::stack_norm_sq(apply_J(w, t, pot));
}

inline double h_norm_sq(const WaveFunction& w, double t, const QuadraticPotential& pot) {
    return detail::stack_norm_sq(apply_H(w, t, pot));
}

struct EnergyBreakdown {
    double kinetic = 0.0;     // (eps^2/2) ||grad u||^2
    double potential = 0.0;   // integral of V |u|^2 (full polynomial)
    double nonlinear = 0.0;   // lambda/(sigma+1) ||u||_{2s+2}^{2s+2}
    double total = 0.0;
};

inline EnergyBreakdown energy_breakdown(const WaveFunction& w, const QuadraticPotential& pot,
                                        const Nonlinearity& nl) {
    EnergyBreakdown e;
    const double gn = norm_grad_l2(w);
    e.kinetic = 0.5 * w.epsilon * w.epsilon * gn * gn;
    double pv = 0.0;
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double x[3] = {0.0, 0.0, 0.0};
        for (std::size_t a = 0; a < w.grid.dim(); ++a) x[a] = w.grid.coords(a)[idx[a]];
        pv += pot.value(x) * std::norm(w.values[flat]);
    });
    e.potential = pv * w.grid.cell_volume();
    if (!nl.is_linear()) {
        const double p = 2.0 * nl.sigma + 2.0;
        e.nonlinear = nl.energy_weight() * std::pow(norm_lp(w, p), p);
    }
    e.total = e.kinetic + e.potential + e.nonlinear;
    return e;
}

namespace detail {

inline std::pair<double, double> e1_e2_from_parts(int delta, double omega, double t, double eps,
                                                  double jn_sq, double hn_sq, double lam_weight,
                                                  double nl_norm) {
    if (delta == 1) {
        const double c = std::cos(omega * t), s = std::sin(omega * t);
        return {0.5 * eps * eps * jn_sq + lam_weight * c * c * nl_norm,
                0.5 * omega * omega * hn_sq + lam_weight * s * s * nl_norm};
    }
    const double c = std::cosh(omega * t), s = std::sinh(omega * t);
    return {0.5 * eps * eps * jn_sq + lam_weight * c * c * nl_norm,
            -0.5 * omega * omega * hn_sq - lam_weight * s * s * nl_norm};
}

}  // namespace detail

// The two transported energies for the isotropic trap / inverted trap; their
// sum is the conserved E_V^eps at every time.
inline std::pair<double, double> E1_E2(const WaveFunction& w, double t,
                                       const QuadraticPotential& pot, const Nonlinearity& nl) {
    if (!pot.is_isotropic() || pot.delta[0] == 0 || pot.has_gauge_terms())
        throw std::domain_error("E1_E2: isotropic non-degenerate potential required");
    double nl_norm = 0.0;
    if (!nl.is_linear()) {
        const double p = 2.0 * nl.sigma + 2.0;
        nl_norm = std::pow(norm_lp(w, p), p);
    }
    return detail::e1_e2_from_parts(pot.delta[0], pot.omega[0], t, w.epsilon,
                                    j_norm_sq(w, t, pot), h_norm_sq(w, t, pot),
                                    nl.energy_weight(), nl_norm);
}

// Free-equation conserved quantity at sigma = 2/n:
//   P(t) = 1/2 sum_j ||(x_j + i eps t d_j) u||^2 + (lambda/(sigma+1)) t^2 ||u||^{2s+2}.
// d/dt P = (lambda/(sigma+1)) (2 - n sigma) t ||u||^{2s+2}.
inline double pseudo_conformal_functional(const WaveFunction& w, double t,
                                          const Nonlinearity& nl) {
    const QuadraticPotential free_pot = QuadraticPotential::free_space(w.grid.dim());
    const double hn = h_norm_sq(w, t, free_pot);
    double nl_norm = 0.0;
    if (!nl.is_linear()) {
        const double p = 2.0 * nl.sigma + 2.0;
        nl_norm = std::pow(norm_lp(w, p), p);
    }
    return 0.5 * hn + nl.energy_weight() * t * t * nl_norm;
}

inline double pseudo_conformal_functional(const WaveFunction& w, double t,
                                          const QuadraticPotential& pot, const Nonlinearity& nl) {
    if (!pot.is_free())
        throw std::domain_error(
            "pseudo_conformal_functional: free potential required (use E1_E2 instead)");
    return pseudo_conformal_functional(w, t, nl);
}

// Ratio of the Gaussian L^p / (L^2, gradient) quotient, in closed form, times
// a 1.25 safety margin.  Monitoring constant, not a sharp one.
inline double gn_constant(std::size_t n, double p) {
    const double nn = static_cast<double>(n);
    const double dp = delta_p(n, p);
    const double norm_p =
        std::isinf(p) ? 1.0 : std::pow(2.0 * std::numbers::pi / p, nn / (2.0 * p));
    const double c_gauss =
        norm_p / (std::pow(std::numbers::pi, nn / 4.0) * std::pow(nn / 2.0, dp / 2.0));
    return 1.25 * c_gauss;
}

struct GNCheck {
    double lhs = 0.0;    // ||w||_p
    double rhs = 0.0;    // C prod_j |h_j|^{-delta/n} ||w||^{1-delta} ||Jw||^{delta}
    double ratio = 0.0;  // lhs/rhs, expected <= 1 + slack
};

// Weighted Gagliardo-Nirenberg monitor.  The |h_j|^{-delta(p)/n} weights decay
// along repulsive axes, forcing exponential decay of ||u||_p while ||Ju||
// stays bounded.
inline GNCheck weighted_gn_check(const WaveFunction& w, double t, const QuadraticPotential& pot,
                                 double p) {
    const std::size_t n = w.grid.dim();
    if (!(p >= 2.0)) throw std::domain_error("weighted_gn_check: p >= 2 required");
    if (n == 1) {
        // all p up to infinity admissible
    } else if (n == 2) {
        if (std::isinf(p)) throw std::domain_error("weighted_gn_check: p < infinity for n = 2");
    } else if (!(p < 6.0)) {
        throw std::domain_error("weighted_gn_check: p < 6 required for n = 3");
    }
    const double dp = delta_p(n, p);
    GNCheck out;
    out.lhs = norm_lp(w, p);
    double weight = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const PhasePair ph = phase_functions(pot, j, t);
        weight *= std::pow(std::abs(ph.h), -dp / static_cast<double>(n));
    }
    const double jn = std::sqrt(j_norm_sq(w, t, pot));
    out.rhs = gn_constant(n, p) * weight * std::pow(norm_l2(w), 1.0 - dp) * std::pow(jn, dp);
    out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : std::numeric_limits<double>::infinity();
    return out;
}

// ---------------------------------------------------------------------------
// Sufficient blow-up conditions, evaluated by quadrature on the initial datum.
// All quantities in the eps-scaled frame: gradients enter as eps * grad, the
// angular correction as eps * omega * |Im int conj(u) x . grad u|.

struct BlowupCriteriaReport {
    bool preconditions_hold = false;  // lambda < 0 and 2/n <= sigma (< 2/(n-2) for n = 3)
    double free_energy = 0.0;         // (eps^2/2)||grad u||^2 + lambda/(s+1)||u||^{2s+2}
    double position_term = std::numeric_limits<double>::quiet_NaN();  // (w^2/2)||x u||^2
    double rotation_term = std::numeric_limits<double>::quiet_NaN();  // eps w |Im int ...|
    bool free_blowup = false;           // free energy < 0: singular in both time directions
    bool harmonic_trap_blowup = false;  // free energy <= 0 under the isotropic trap
    double harmonic_time_bound = std::numeric_limits<double>::infinity();  // pi/(2w)
    bool repulsive_one_sided = false;   // singular in the future or the past
    bool repulsive_two_sided = false;   // singular in the future and the past
};

inline BlowupCriteriaReport blowup_criteria_report(const WaveFunction& u0,
                                                   const QuadraticPotential& pot,
                                                   const Nonlinearity& nl) {
    if (pot.dim() != u0.grid.dim())
        throw std::invalid_argument("blowup_criteria_report: dimension mismatch");
    BlowupCriteriaReport rep;
    const std::size_t n = u0.grid.dim();
    rep.preconditions_hold =
        nl.lambda < 0.0 && nl.sigma >= 2.0 / static_cast<double>(n) - 1e-12;

    const double gn = norm_grad_l2(u0);
    double nl_norm = 0.0;
    if (!nl.is_linear()) {
        const double p = 2.0 * nl.sigma + 2.0;
        nl_norm = std::pow(norm_lp(u0, p), p);
    }
    rep.free_energy =
        0.5 * u0.epsilon * u0.epsilon * gn * gn + nl.energy_weight() * nl_norm;

    const bool isotropic = pot.is_isotropic() && !pot.has_gauge_terms();
    if (isotropic && pot.delta[0] != 0) {
        const double omega = pot.omega[0];
        const double xn = norm_x_l2(u0);
        rep.position_term = 0.5 * omega * omega * xn * xn;
        double im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const WaveFunction d = spectral_derivative(u0, j);
            const auto& xs = u0.grid.coords(j);
            double acc = 0.0;
            detail::for_each_index(
                u0.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
                    acc += std::imag(std::conj(u0.values[flat]) * xs[idx[j]] * d.values[flat]);
                });
            im += acc * u0.grid.cell_volume();
        }
        rep.rotation_term = u0.epsilon * omega * std::abs(im);

        if (pot.delta[0] == 1 && rep.preconditions_hold && rep.free_energy <= 0.0) {
            rep.harmonic_trap_blowup = true;
            rep.harmonic_time_bound = std::numbers::pi / (2.0 * omega);
        }
        if (pot.delta[0] == -1 && rep.preconditions_hold) {
            rep.repulsive_one_sided = rep.free_energy < -rep.position_term;
            rep.repulsive_two_sided =
                rep.free_energy < -rep.position_term - rep.rotation_term;
        }
    }
    rep.free_blowup = rep.preconditions_hold && rep.free_energy < 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Scattering monitor: rewinds checkpoint states with the exact linear flow and
// watches the Sigma-norm Cauchy differences.

struct ScatteringResult {
    std::vector<double> times;
    std::vector<WaveFunction> rewound;  // U_V(-t_k) u(t_k); the last one estimates the limit
    std::vector<double> sigma_diffs;    // consecutive ||w_{k+1} - w_k||_Sigma
    bool decreasing = false;
    double final_diff = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

inline ScatteringResult scattering_monitor(const std::vector<WaveFunction>& states,
                                           const QuadraticPotential& pot, double tol = 1e-4) {
    if (states.size() < 2)
        throw std::invalid_argument("scattering_monitor: need at least two checkpoints");
    if (!pot.has_repulsive_axis() && !pot.is_free())
        throw std::domain_error(
            "scattering_monitor: confining potential admits no scattering states");
    ScatteringResult res;
    for (const WaveFunction& s : states) {
        if (!s.grid.same_geometry(states.front().grid))
            throw std::invalid_argument("scattering_monitor: checkpoints share one grid");
        res.times.push_back(s.time);
        WaveFunction back = s;
        mehler_propagate(back, pot, -s.time);
        res.rewound.push_back(std::move(back));
    }
    for (std::size_t k = 0; k + 1 < res.rewound.size(); ++k) {
        WaveFunction diff = res.rewound[k];
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= res.rewound[k + 1].values[i];
        res.sigma_diffs.push_back(norm_sigma(diff));
    }
    res.decreasing = true;
    for (std::size_t k = 0; k + 1 < res.sigma_diffs.size(); ++k)
        if (res.sigma_diffs[k + 1] > res.sigma_diffs[k] + 1e-12) res.decreasing = false;
    res.final_diff = res.sigma_diffs.back();
    res.converged = res.decreasing && res.final_diff < tol;
    return res;
}

// ---------------------------------------------------------------------------
// One full diagnostic record.

struct ObservableRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double kinetic = 0.0;
    double potential_term = 0.0;
    double nonlinear_term = 0.0;
    double j_norm_sq = 0.0;
    double h_norm_sq = 0.0;
    double virial = 0.0;  // y(t) = ||x u||^2
    double e1 = std::numeric_limits<double>::quiet_NaN();
    double e2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> lp;  // matches the requested exponent list
    double linf = 0.0;
    double boundary_mass = 0.0;
    double spectral_tail = 0.0;
};

inline ObservableRecord observe(const WaveFunction& w, const QuadraticPotential& pot,
                                const Nonlinearity& nl,
                                const std::vector<double>& lp_exponents = {}) {
    if (pot.dim() != w.grid.dim()) throw std::invalid_argument("observe: dimension mismatch");
    ObservableRecord rec;
    rec.t = w.time;
    const std::size_t d = w.grid.dim();
    const double vol = w.grid.cell_volume();
    const double eps = w.epsilon;

    const WaveFunction spec = forward_spectral(w);
    rec.spectral_tail = spectral_tail_fraction(spec);
    double k2sum = 0.0;
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double k = w.grid.frequencies(a)[idx[a]];
            k2 += k * k;
        }
        k2sum += k2 * std::norm(spec.values[flat]);
    });
    rec.kinetic = 0.5 * eps * eps * k2sum * vol;

    // One derivative field per axis, shared by J and H.
    std::vector<WaveFunction> deriv;
    for (std::size_t a = 0; a < d; ++a) {
        WaveFunction ds = spec;
        const auto& ks = w.grid.frequencies(a);
        detail::for_each_index(w.grid,
                               [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
                                   ds.values[flat] *= cdouble{0.0, ks[idx[a]]};
                               });
        deriv.push_back(inverse_spectral(ds));
    }

    std::vector<PhasePair> rays(d);
    for (std::size_t j = 0; j < d; ++j) rays[j] = phase_functions(pot, j, w.time);

    double msum = 0.0, pv = 0.0, x2m = 0.0, jn = 0.0, hn = 0.0;
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        const cdouble u = w.values[flat];
        const double m = std::norm(u);
        msum += m;
        double x[3] = {0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = w.grid.coords(j)[idx[j]];
            x2m += x[j] * x[j] * m;
            const cdouble dv = deriv[j].values[flat];
            const double jmult =
                -static_cast<double>(pot.delta[j]) * pot.omega[j] * pot.omega[j] * rays[j].g / eps;
            jn += std::norm(cdouble{0.0, rays[j].h} * dv + jmult * x[j] * u);
            hn += std::norm(rays[j].h * x[j] * u + cdouble{0.0, eps * rays[j].g} * dv);
        }
        pv += pot.value(x) * m;
    });
    rec.mass = msum * vol;
    if (pot.has_gauge_terms()) {
        // J/H are built from the ray flow of the diagonal part; a residual
        // linear or constant term shifts that flow, so the norms are not
        // conserved quantities and would mislead a drift check.
        rec.j_norm_sq = std::numeric_limits<double>::quiet_NaN();
        rec.h_norm_sq = std::numeric_limits<double>::quiet_NaN();
    } else {
        rec.j_norm_sq = jn * vol;
        rec.h_norm_sq = hn * vol;
    }
    rec.potential_term = pv * vol;
    rec.virial = x2m * vol;  // y(t) = ||x u||^2, the virial functional itself

    double nl_norm = 0.0;
    if (!nl.is_linear()) {
        const double p = 2.0 * nl.sigma + 2.0;
        nl_norm = std::pow(norm_lp(w, p), p);
        rec.nonlinear_term = nl.energy_weight() * nl_norm;
    }
    rec.energy = rec.kinetic + rec.potential_term + rec.nonlinear_term;

    if (pot.is_isotropic() && pot.delta[0] != 0 && !pot.has_gauge_terms()) {
        const auto [e1, e2] =
            detail::e1_e2_from_parts(pot.delta[0], pot.omega[0], w.time, eps, rec.j_norm_sq,
                                     rec.h_norm_sq, nl.energy_weight(), nl_norm);
        rec.e1 = e1;
        rec.e2 = e2;
    }

    for (double p : lp_exponents) rec.lp.push_back(norm_lp(w, p));
    rec.linf = norm_lp(w, std::numeric_limits<double>::infinity());
    rec.boundary_mass = boundary_mass_fraction(w);
    return rec;
}

}  // namespace nlsp
