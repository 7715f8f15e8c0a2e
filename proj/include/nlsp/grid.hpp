#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/fft.hpp"

namespace nlsp {

// Periodic tensor grid on prod_j [-L_j, L_j), 1 to 3 axes, power-of-two points
// per axis.  Axis 0 is contiguous in storage.
class Grid {
public:
    struct Axis {
        std::size_t points = 0;
        double half_width = 0.0;
        double spacing = 0.0;
    };

    Grid(std::vector<std::size_t> points, std::vector<double> half_widths) {
        if (points.empty() || points.size() > 3)
            throw std::invalid_argument("Grid: dimension must be 1, 2 or 3");
        if (half_widths.size() != points.size())
            throw std::invalid_argument("Grid: one half-width per axis required");
        total_ = 1;
        for (std::size_t a = 0; a < points.size(); ++a) {
            const std::size_t n = points[a];
            const double lw = half_widths[a];
            if (n < 8 || (n & (n - 1)) != 0)
                throw std::invalid_argument("Grid: points per axis must be a power of two >= 8");
            if (!(lw > 0.0) || !std::isfinite(lw))
                throw std::invalid_argument("Grid: half-width must be positive and finite");
            Axis ax;
            ax.points = n;
            ax.half_width = lw;
            ax.spacing = 2.0 * lw / static_cast<double>(n);
            axes_.push_back(ax);
            total_ *= n;
            plans_.push_back(fft_plan(n));

            std::vector<double> xs(n), ks(n);
            for (std::size_t m = 0; m < n; ++m) xs[m] = -lw + static_cast<double>(m) * ax.spacing;
            // Standard DFT ordering: bins 0..n/2-1 are nonnegative frequencies,
            // bins n/2..n-1 wrap to the negative half (the n/2 bin is -n/2).
            const double dk = std::numbers::pi / lw;
            for (std::size_t k = 0; k < n; ++k) {
                const double kt = (k < n / 2) ? static_cast<double>(k)
                                              : static_cast<double>(k) - static_cast<double>(n);
                ks[k] = dk * kt;
            }
            coords_.push_back(std::move(xs));
            freqs_.push_back(std::move(ks));
        }
        cell_volume_ = 1.0;
        for (const auto& ax : axes_) cell_volume_ *= ax.spacing;
    }

    std::size_t dim() const { return axes_.size(); }
    std::size_t total_points() const { return total_; }
    const Axis& axis(std::size_t a) const { return axes_.at(a); }
    double cell_volume() const { return cell_volume_; }
    const std::vector<double>& coords(std::size_t a) const { return coords_.at(a); }
    const std::vector<double>& frequencies(std::size_t a) const { return freqs_.at(a); }

    // Stride of one increment of axis a in the flat row-major-with-axis-0-fastest layout.
    std::size_t stride(std::size_t a) const {
        std::size_t s = 1;
        for (std::size_t j = 0; j < a; ++j) s *= axes_[j].points;
        return s;
    }

    bool same_geometry(const Grid& other) const {
        if (dim() != other.dim()) return false;
        for (std::size_t a = 0; a < dim(); ++a)
            if (axes_[a].points != other.axes_[a].points ||
                axes_[a].half_width != other.axes_[a].half_width)
                return false;
        return true;
    }

    std::shared_ptr<const FftPlan> plan(std::size_t a) const { return plans_.at(a); }

private:
    std::vector<Axis> axes_;
    std::vector<std::vector<double>> coords_;
    std::vector<std::vector<double>> freqs_;
    std::vector<std::shared_ptr<const FftPlan>> plans_;
    std::size_t total_ = 0;
    double cell_volume_ = 0.0;
};

// Complex field sampled on a Grid, together with the simulation time it
// belongs to and the semiclassical parameter of its equation.
struct WaveFunction {
    Grid grid;
    std::vector<cdouble> values;
    double time = 0.0;
    double epsilon = 1.0;

    WaveFunction(Grid g, std::vector<cdouble> v, double t = 0.0, double eps = 1.0)
        : grid(std::move(g)), values(std::move(v)), time(t), epsilon(eps) {
        if (values.size() != grid.total_points())
            throw std::invalid_argument("WaveFunction: value count must match grid");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon))
            throw std::invalid_argument("WaveFunction: epsilon must be positive");
    }

    static WaveFunction zeros(const Grid& g, double t = 0.0, double eps = 1.0) {
        return WaveFunction(g, std::vector<cdouble>(g.total_points(), cdouble{0.0, 0.0}), t, eps);
    }
};

namespace detail {

inline void check_finite(const std::vector<cdouble>& v, const char* where) {
    for (const cdouble& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw numerical_corruption_error(std::string(where) + ": non-finite value");
}

// Apply fn to every flat index together with its per-axis indices.
template <typename F>
inline void for_each_index(const Grid& g, F&& fn) {
    std::array<std::size_t, 3> idx{0, 0, 0};
    const std::size_t dim = g.dim();
    const std::size_t total = g.total_points();
    for (std::size_t flat = 0; flat < total; ++flat) {
        fn(flat, idx);
        for (std::size_t a = 0; a < dim; ++a) {
            if (++idx[a] < g.axis(a).points) break;
            idx[a] = 0;
        }
    }
}

// In-place transform of every line along one axis.
template <typename LineOp>
inline void transform_lines(const Grid& g, std::vector<cdouble>& v, std::size_t axis, LineOp&& op) {
    const std::size_t n = g.axis(axis).points;
    const std::size_t stride = g.stride(axis);
    const std::size_t total = g.total_points();
    const std::size_t lines = total / n;
    std::vector<cdouble> scratch(n);
    for (std::size_t line = 0; line < lines; ++line) {
        // Decompose the line id into the flat index of its first element.
        std::size_t rem = line;
        std::size_t base = 0;
        std::size_t axis_block = stride * n;
        // Elements below the axis stride:
        const std::size_t inner = stride;
        const std::size_t low = rem % inner;
        rem /= inner;
        base = low + rem * axis_block;
        for (std::size_t m = 0; m < n; ++m) scratch[m] = v[base + m * stride];
        op(scratch.data());
        for (std::size_t m = 0; m < n; ++m) v[base + m * stride] = scratch[m];
    }
}

}  // namespace detail

// Unitary forward transform: per-axis DFT scaled by 1/sqrt(points).
inline WaveFunction forward_spectral(const WaveFunction& w) {
    detail::check_finite(w.values, "forward_spectral");
    WaveFunction out = w;
    for (std::size_t a = 0; a < w.grid.dim(); ++a) {
        auto plan = w.grid.plan(a);
        detail::transform_lines(w.grid, out.values, a, [&](cdouble* line) { plan->forward(line); });
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.grid.total_points()));
    for (cdouble& z : out.values) z *= scale;
    return out;
}

inline WaveFunction inverse_spectral(const WaveFunction& w) {
    detail::check_finite(w.values, "inverse_spectral");
    WaveFunction out = w;
    for (std::size_t a = 0; a < w.grid.dim(); ++a) {
        auto plan = w.grid.plan(a);
        detail::transform_lines(w.grid, out.values, a, [&](cdouble* line) { plan->inverse(line); });
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.grid.total_points()));
    for (cdouble& z : out.values) z *= scale;
    return out;
}

inline double norm_l2(const WaveFunction& w) {
    double s = 0.0;
    for (const cdouble& z : w.values) s += std::norm(z);
    return std::sqrt(s * w.grid.cell_volume());
}

inline double mass(const WaveFunction& w) {
    double s = 0.0;
    for (const cdouble& z : w.values) s += std::norm(z);
    return s * w.grid.cell_volume();
}

// ||x f||_{L^2} with x the vector of box coordinates.
inline double norm_x_l2(const WaveFunction& w) {
    double s = 0.0;
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double x2 = 0.0;
        for (std::size_t a = 0; a < w.grid.dim(); ++a) {
            const double x = w.grid.coords(a)[idx[a]];
            x2 += x * x;
        }
        s += x2 * std::norm(w.values[flat]);
    });
    return std::sqrt(s * w.grid.cell_volume());
}

// ||grad f||_{L^2}, gradient evaluated spectrally.
inline double norm_grad_l2(const WaveFunction& w) {
    const WaveFunction spec = forward_spectral(w);
    double s = 0.0;
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < w.grid.dim(); ++a) {
            const double k = w.grid.frequencies(a)[idx[a]];
            k2 += k * k;
        }
        s += k2 * std::norm(spec.values[flat]);
    });
    return std::sqrt(s * w.grid.cell_volume());
}

inline double norm_sigma(const WaveFunction& w) {
    return norm_l2(w) + norm_grad_l2(w) + norm_x_l2(w);
}

// L^p quadrature norm; p = infinity gives the max modulus.
inline double norm_lp(const WaveFunction& w, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const cdouble& z : w.values) m = std::max(m, std::abs(z));
        return m;
    }
    if (!(p >= 1.0)) throw std::domain_error("norm_lp: p must be >= 1 or infinity");
    double s = 0.0;
    for (const cdouble& z : w.values) s += std::pow(std::abs(z), p);
    return std::pow(s * w.grid.cell_volume(), 1.0 / p);
}

inline double norm_l1(const WaveFunction& w) {
    double s = 0.0;
    for (const cdouble& z : w.values) s += std::abs(z);
    return s * w.grid.cell_volume();
}

// Fraction of mass in the outer 10% of the box (any axis with |x| >= 0.9 L).
inline double boundary_mass_fraction(const WaveFunction& w) {
    double outer = 0.0, total = 0.0;
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        const double m = std::norm(w.values[flat]);
        total += m;
        for (std::size_t a = 0; a < w.grid.dim(); ++a) {
            if (std::abs(w.grid.coords(a)[idx[a]]) >= 0.9 * w.grid.axis(a).half_width) {
                outer += m;
                break;
            }
        }
    });
    return total > 0.0 ? outer / total : 0.0;
}

// Fraction of spectral mass in the outer third of the frequency lattice.
inline double spectral_tail_fraction(const WaveFunction& spectrum) {
    double outer = 0.0, total = 0.0;
    const Grid& g = spectrum.grid;
    detail::for_each_index(g, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        const double m = std::norm(spectrum.values[flat]);
        total += m;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const double k = g.frequencies(a)[idx[a]];
            const double k_nyq = std::numbers::pi / g.axis(a).half_width *
                                 (static_cast<double>(g.axis(a).points) / 2.0);
            if (std::abs(k) >= (2.0 / 3.0) * k_nyq) {
                outer += m;
                break;
            }
        }
    });
    return total > 0.0 ? outer / total : 0.0;
}

// Multiply by exp(i * sum_j a_j x_j^2) pointwise.
inline void apply_quadratic_phase(WaveFunction& w, const std::vector<double>& coeffs) {
    if (coeffs.size() != w.grid.dim())
        throw std::invalid_argument("apply_quadratic_phase: one coefficient per axis");
    std::vector<std::vector<cdouble>> tables(w.grid.dim());
    for (std::size_t a = 0; a < w.grid.dim(); ++a) {
        const auto& xs = w.grid.coords(a);
        tables[a].resize(xs.size());
        for (std::size_t m = 0; m < xs.size(); ++m) {
            const double arg = coeffs[a] * xs[m] * xs[m];
            tables[a][m] = {std::cos(arg), std::sin(arg)};
        }
    }
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        cdouble f{1.0, 0.0};
        for (std::size_t a = 0; a < w.grid.dim(); ++a) f *= tables[a][idx[a]];
        w.values[flat] *= f;
    });
}

// Multiply by exp(i * xi0 . x) pointwise.
inline void apply_plane_phase(WaveFunction& w, const std::vector<double>& xi0) {
    if (xi0.size() != w.grid.dim())
        throw std::invalid_argument("apply_plane_phase: one component per axis");
    std::vector<std::vector<cdouble>> tables(w.grid.dim());
    for (std::size_t a = 0; a < w.grid.dim(); ++a) {
        const auto& xs = w.grid.coords(a);
        tables[a].resize(xs.size());
        for (std::size_t m = 0; m < xs.size(); ++m) {
            const double arg = xi0[a] * xs[m];
            tables[a][m] = {std::cos(arg), std::sin(arg)};
        }
    }
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        cdouble f{1.0, 0.0};
        for (std::size_t a = 0; a < w.grid.dim(); ++a) f *= tables[a][idx[a]];
        w.values[flat] *= f;
    });
}

// Translate by s: f(x) -> f(x + s), evaluated through the spectral representation
// (exact for the trigonometric interpolant; shifts wrap periodically).
inline WaveFunction shift_bandlimited(const WaveFunction& w, const std::vector<double>& s) {
    if (s.size() != w.grid.dim())
        throw std::invalid_argument("shift_bandlimited: one component per axis");
    WaveFunction spec = forward_spectral(w);
    detail::for_each_index(w.grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double arg = 0.0;
        for (std::size_t a = 0; a < w.grid.dim(); ++a)
            arg += w.grid.frequencies(a)[idx[a]] * s[a];
        spec.values[flat] *= cdouble{std::cos(arg), std::sin(arg)};
    });
    return inverse_spectral(spec);
}

namespace detail {

// Evaluate the trigonometric interpolant of one line at the dilated points
// x_m / c.  Uses the fractional transform; exact to round-off for the
// periodic band-limited extension.
inline void dilate_line(const FftPlan& plan, cdouble* line, std::size_t n, double c) {
    std::vector<cdouble> spec(line, line + n);
    plan.forward(spec.data());
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (cdouble& z : spec) z *= inv_sqrt_n;

    // Shifted ordering: bin k' in [0, n) holds frequency index k' - n/2.
    std::vector<cdouble> shifted(n);
    for (std::size_t kp = 0; kp < n; ++kp) {
        const std::size_t k = (kp + n / 2) % n;
        const double kt = static_cast<double>(kp) - static_cast<double>(n) / 2.0;
        const double arg = std::numbers::pi * kt * (1.0 - 1.0 / c);
        shifted[kp] = spec[k] * cdouble{std::cos(arg), std::sin(arg)};
    }
    const double alpha = -1.0 / (static_cast<double>(n) * c);
    std::vector<cdouble> G = fractional_dft(shifted, alpha, n);
    for (std::size_t m = 0; m < n; ++m) {
        const double arg = -std::numbers::pi * static_cast<double>(m) / c;
        line[m] = G[m] * cdouble{std::cos(arg), std::sin(arg)} * inv_sqrt_n;
    }
}

}  // namespace detail

// Per-axis dilation: out(x) = f(x_0/c_0, ..., x_{d-1}/c_{d-1}) through the
// band-limited interpolant.  c_a = 1 leaves an axis untouched.
inline WaveFunction dilate_bandlimited(const WaveFunction& w, const std::vector<double>& c) {
    if (c.size() != w.grid.dim())
        throw std::invalid_argument("dilate_bandlimited: one factor per axis");
    for (double f : c)
        if (f == 0.0 || !std::isfinite(f))
            throw std::invalid_argument("dilate_bandlimited: factors must be finite and nonzero");
    WaveFunction out = w;
    for (std::size_t a = 0; a < w.grid.dim(); ++a) {
        if (c[a] == 1.0) continue;
        const auto plan = w.grid.plan(a);
        const std::size_t n = w.grid.axis(a).points;
        detail::transform_lines(w.grid, out.values, a,
                                [&](cdouble* line) { detail::dilate_line(*plan, line, n, c[a]); });
    }
    return out;
}

}  // namespace nlsp
