#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/grid.hpp"
#include "nlsp/nonlinearity.hpp"
#include "nlsp/observables.hpp"
#include "nlsp/potential.hpp"

namespace nlsp {

struct SolverConfig {
    double dt_initial = 1e-3;
    double dt_min = 1e-7;
    double mass_step_tol = 1e-12;        // relative per-step mass drift triggering a halving
    double gradient_step_growth = 0.05;  // fractional gradient growth per step triggering one
    double gradient_ratio_max = 1e3;     // blow-up threshold vs the initial gradient norm
    double spectral_tail_max = 1e-6;     // blow-up threshold on the outer-third spectral mass
    int forced_step_limit = 25;          // cumulative strained steps at dt_min before giving up

    void validate() const {
        if (!(dt_min > 0.0) || !(dt_initial >= dt_min))
            throw std::invalid_argument("SolverConfig: require 0 < dt_min <= dt_initial");
        if (!(mass_step_tol > 0.0) || !(gradient_step_growth > 0.0) ||
            !(gradient_ratio_max > 1.0) || !(spectral_tail_max > 0.0))
            throw std::invalid_argument("SolverConfig: thresholds must be positive");
    }
};

struct MonitorSpec {
    double record_interval = 0.0;      // 0: record only the endpoints
    std::vector<double> lp_exponents;  // extra L^p columns in each record
    std::vector<double> state_times;   // capture full states at these times
};

enum class RunStatus { completed, blow_up_detected, resolution_lost };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blow_up_detected: return "blow_up_detected";
        case RunStatus::resolution_lost: return "resolution_lost";
    }
    return "unknown";
}

struct RunOutcome {
    RunStatus status = RunStatus::completed;
    double t_final = 0.0;
    // Valid only for blow_up_detected: the singularity lies past bracket_lo,
    // detection fired at bracket_hi (last two accepted times).
    double bracket_lo = std::numeric_limits<double>::quiet_NaN();
    double bracket_hi = std::numeric_limits<double>::quiet_NaN();
    std::vector<ObservableRecord> records;
    std::vector<WaveFunction> states;  // at the requested state_times actually reached
    WaveFunction final;

    explicit RunOutcome(WaveFunction f) : final(std::move(f)) {}
};

// One Strang step: exact half-step of the x-diagonal flow (V + lambda|u|^{2s}
// acts by phase multiplication, |u| invariant), exact kinetic step in
// frequency space, second half-step.  Mass is preserved to round-off.
class SplitStepper {
public:
    SplitStepper(const Grid& grid, const QuadraticPotential& pot, const Nonlinearity& nl)
        : vtable_(potential_table(grid, pot)), nl_(nl) {}

    struct StepInfo {
        double mass = 0.0;          // Parseval mass at mid-step (equals final mass)
        double grad_l2 = 0.0;       // gradient norm of the mid-step spectrum
        double spectral_tail = 0.0; // outer-third spectral mass fraction
    };

    void step(WaveFunction& w, double dt, StepInfo* info = nullptr) const {
        phase_flow(w, 0.5 * dt);

        WaveFunction spec = forward_spectral(w);
        const Grid& g = w.grid;
        const std::size_t d = g.dim();
        double cut[3] = {0.0, 0.0, 0.0};
        for (std::size_t a = 0; a < d; ++a) {
            const double k_nyq = std::numbers::pi / g.axis(a).half_width *
                                 (static_cast<double>(g.axis(a).points) / 2.0);
            cut[a] = (2.0 / 3.0) * k_nyq;
        }
        double total = 0.0, outer = 0.0, k2sum = 0.0;
        detail::for_each_index(g, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
            double k2 = 0.0;
            bool tail = false;
            double arg = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                const double k = g.frequencies(a)[idx[a]];
                k2 += k * k;
                if (std::abs(k) >= cut[a]) tail = true;
            }
            arg = -0.5 * w.epsilon * dt * k2;
            spec.values[flat] *= cdouble{std::cos(arg), std::sin(arg)};
            const double m = std::norm(spec.values[flat]);
            total += m;
            if (tail) outer += m;
            k2sum += k2 * m;
        });
        if (info) {
            info->mass = total * g.cell_volume();
            info->grad_l2 = std::sqrt(k2sum * g.cell_volume());
            info->spectral_tail = total > 0.0 ? outer / total : 0.0;
        }
        w.values = inverse_spectral(spec).values;

        phase_flow(w, 0.5 * dt);
        w.time += dt;
    }

private:
    void phase_flow(WaveFunction& w, double tau) const {
        const double scale = -tau / w.epsilon;
        const double lam = nl_.lambda, sig = nl_.sigma;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            double v = vtable_[i];
            if (lam != 0.0) {
                const double m = std::norm(w.values[i]);
                double amp;
                if (sig == 1.0) amp = m;
                else if (sig == 2.0) amp = m * m;
                else amp = std::pow(m, sig);
                v += lam * amp;
            }
            const double arg = scale * v;
            w.values[i] *= cdouble{std::cos(arg), std::sin(arg)};
        }
    }

    std::vector<double> vtable_;
    Nonlinearity nl_;
};

inline WaveFunction step(const WaveFunction& w, double dt, const QuadraticPotential& pot,
                         const Nonlinearity& nl) {
    if (dt == 0.0) return w;
    WaveFunction out = w;
    SplitStepper(w.grid, pot, nl).step(out, dt);
    detail::check_finite(out.values, "step");
    return out;
}

// Adaptive Strang integration from w0.time to t_end (either direction).
// Step halving on per-step mass drift or gradient growth; blow-up is declared
// only when a threshold trips while dt sits at dt_min, and reported as a
// bracket of the last two accepted times, never a point.
inline RunOutcome evolve(const WaveFunction& w0, double t_end, const QuadraticPotential& pot,
                         const Nonlinearity& nl, const SolverConfig& cfg = {},
                         const MonitorSpec& mon = {}) {
    cfg.validate();
    if (pot.dim() != w0.grid.dim()) throw std::invalid_argument("evolve: dimension mismatch");
    if (nl.dim != w0.grid.dim()) throw std::invalid_argument("evolve: nonlinearity dimension");
    detail::check_finite(w0.values, "evolve: initial state");

    RunOutcome out{w0};
    WaveFunction& w = out.final;
    const double t0 = w.time;
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    const double horizon = std::abs(t_end - t0);
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end) + std::abs(t0));

    out.records.push_back(observe(w, pot, nl, mon.lp_exponents));
    if (horizon <= t_eps) {
        out.t_final = w.time;
        return out;
    }

    struct Event {
        double t;
        bool record;
        bool state;
    };
    std::vector<Event> events;
    if (mon.record_interval > 0.0) {
        for (double t = t0 + dir * mon.record_interval; dir * (t_end - t) > t_eps;
             t += dir * mon.record_interval)
            events.push_back({t, true, false});
    }
    for (double s : mon.state_times) {
        if (dir * (s - t0) > t_eps && dir * (t_end - s) > -t_eps)
            events.push_back({s, false, true});
    }
    events.push_back({t_end, true, false});
    std::sort(events.begin(), events.end(),
              [dir](const Event& a, const Event& b) { return dir * a.t < dir * b.t; });
    std::vector<Event> merged;
    for (const Event& e : events) {
        if (!merged.empty() && std::abs(merged.back().t - e.t) <= t_eps) {
            merged.back().record = merged.back().record || e.record;
            merged.back().state = merged.back().state || e.state;
        } else {
            merged.push_back(e);
        }
    }

    const SplitStepper stepper(w.grid, pot, nl);
    const double mass0 = mass(w);
    const double grad0 = std::max(norm_grad_l2(w), 1e-300);
    double dt = cfg.dt_initial;
    double prev_grad = grad0;
    double prev_mass = mass0;
    double prev_t = w.time;
    int forced = 0;

    for (const Event& ev : merged) {
        while (dir * (ev.t - w.time) > t_eps) {
            const double dt_try = std::min(dt, std::abs(ev.t - w.time));
            WaveFunction cand = w;
            SplitStepper::StepInfo info;
            stepper.step(cand, dir * dt_try, &info);

            const bool mass_bad = std::abs(info.mass - prev_mass) > cfg.mass_step_tol * mass0;
            const bool grad_bad = info.grad_l2 > prev_grad * (1.0 + cfg.gradient_step_growth);
            // Absolute corruption, not step quality: once these trip, smaller
            // steps cannot restore validity, only pin down when it was lost.
            const bool corrupt = info.grad_l2 / grad0 > cfg.gradient_ratio_max ||
                                 info.spectral_tail > cfg.spectral_tail_max;
            const bool at_floor = dt <= cfg.dt_min * (1.0 + 1e-9);

            if ((mass_bad || grad_bad || corrupt) && !at_floor) {
                dt = std::max(0.5 * dt, cfg.dt_min);
                continue;
            }

            prev_t = w.time;
            w = std::move(cand);
            prev_mass = info.mass;
            prev_grad = info.grad_l2;

            if (corrupt) {
                out.status = RunStatus::blow_up_detected;
                out.bracket_lo = std::min(prev_t, w.time);
                out.bracket_hi = std::max(prev_t, w.time);
                out.records.push_back(observe(w, pot, nl, mon.lp_exponents));
                out.t_final = w.time;
                return out;
            }
            // Cumulative, not consecutive: a saturated state can take locally
            // clean steps again, which restores no trust in the solution.
            if (mass_bad || grad_bad) {
                ++forced;
                if (forced >= cfg.forced_step_limit) {
                    out.status = RunStatus::resolution_lost;
                    out.records.push_back(observe(w, pot, nl, mon.lp_exponents));
                    out.t_final = w.time;
                    return out;
                }
            }
        }
        if (ev.record) out.records.push_back(observe(w, pot, nl, mon.lp_exponents));
        if (ev.state) out.states.push_back(w);
    }
    out.t_final = w.time;
    return out;
}

// ---------------------------------------------------------------------------
// Stationary profile solving (1/2) Lap phi - phi + |phi|^{2s} phi = 0 by
// gradient flow in imaginary time, normalized on the Nehari set after every
// step so the flow can only stall on the unit-multiplier equation.

struct GroundStateResult {
    WaveFunction state;
    std::vector<double> energy_history;  // action values; descend along the flow
    double residual = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
};

namespace detail {

// ||(1/2) Lap phi - phi + |phi|^{2s} phi||_{L2}: distance from the stationary
// equation with unit multiplier.
inline double stationary_residual(const WaveFunction& phi, double sigma) {
    WaveFunction spec = forward_spectral(phi);
    const Grid& g = phi.grid;
    for_each_index(g, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const double k = g.frequencies(a)[idx[a]];
            k2 += k * k;
        }
        spec.values[flat] *= -0.5 * k2;
    });
    const WaveFunction lap_half = inverse_spectral(spec);
    double r = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double m = std::norm(phi.values[i]);
        r += std::norm(lap_half.values[i] + (std::pow(m, sigma) - 1.0) * phi.values[i]);
    }
    return std::sqrt(r * g.cell_volume());
}

// Action whose critical points solve (1/2) Lap phi - phi + |phi|^{2s} phi = 0.
inline double action(const WaveFunction& phi, double sigma) {
    const double gn = norm_grad_l2(phi);
    const double nn = norm_l2(phi);
    const double p = 2.0 * sigma + 2.0;
    return 0.25 * gn * gn + 0.5 * nn * nn - std::pow(norm_lp(phi, p), p) / p;
}

// Scale to the ray point where the action is stationary, i.e. onto the Nehari
// set (1/2)||grad phi||^2 + ||phi||^2 = ||phi||_p^p.  A mass normalization
// would pin the multiplier at some mass-dependent value instead of 1 (and the
// L2-critical s = 2 constraint set can miss the profile entirely); this one
// leaves the stationary equation itself as the only possible fixed point.
inline void nehari_project(WaveFunction& phi, double sigma) {
    const double gn = norm_grad_l2(phi);
    const double nn = norm_l2(phi);
    const double p = 2.0 * sigma + 2.0;
    const double pp = std::pow(norm_lp(phi, p), p);
    if (!(pp > 0.0)) throw resolution_error("ground_state_flow: degenerate iterate");
    const double beta = std::pow((0.5 * gn * gn + nn * nn) / pp, 1.0 / (p - 2.0));
    for (cdouble& z : phi.values) z *= beta;
}

}  // namespace detail

inline GroundStateResult ground_state_flow(const Grid& grid, const Nonlinearity& nl) {
    if (!(nl.lambda < 0.0))
        throw std::invalid_argument("ground_state_flow: focusing nonlinearity required");
    const double sigma = nl.sigma;

    WaveFunction phi = WaveFunction::zeros(grid);
    detail::for_each_index(grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double x2 = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double x = grid.coords(a)[idx[a]];
            x2 += x * x;
        }
        phi.values[flat] = 1.2 * std::exp(-x2);
    });
    detail::nehari_project(phi, sigma);

    GroundStateResult res{phi};
    const std::size_t max_iters = 10000;
    double dtau = 0.1;
    double energy = detail::action(res.state, sigma);
    res.energy_history.push_back(energy);

    std::vector<double> k2(grid.total_points());
    detail::for_each_index(grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double s = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double k = grid.frequencies(a)[idx[a]];
            s += k * k;
        }
        k2[flat] = s;
    });

    for (std::size_t it = 0; it < max_iters; ++it) {
        ++res.iterations;
        WaveFunction next = res.state;
        for (std::size_t i = 0; i < next.values.size(); ++i) {
            const double m = std::norm(next.values[i]);
            next.values[i] += dtau * std::pow(m, sigma) * next.values[i];
        }
        WaveFunction spec = forward_spectral(next);
        for (std::size_t i = 0; i < spec.values.size(); ++i)
            spec.values[i] /= 1.0 + dtau * (1.0 + 0.5 * k2[i]);
        next = inverse_spectral(spec);
        detail::nehari_project(next, sigma);

        const double e_next = detail::action(next, sigma);
        if (e_next > energy + 1e-13 * std::abs(energy)) {
            dtau *= 0.5;
            if (dtau < 1e-6)
                throw resolution_error("ground_state_flow: step collapse before convergence");
            continue;
        }
        res.state = std::move(next);
        energy = e_next;
        res.energy_history.push_back(energy);

        const double r = detail::stationary_residual(res.state, sigma);
        if (r < 1e-9) {
            res.residual = r;
            return res;
        }
    }
    throw resolution_error("ground_state_flow: no convergence within 10000 iterations");
}

inline WaveFunction ground_state_proxy(const Grid& grid, const Nonlinearity& nl) {
    return ground_state_flow(grid, nl).state;
}

}  // namespace nlsp
