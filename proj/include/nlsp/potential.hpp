#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/grid.hpp"

namespace nlsp {

// Second-order polynomial potential in canonical axes:
//   V(x) = sum_j delta_j * (omega_j^2 / 2) * x_j^2 + residual_linear . x + constant,
// delta_j in {-1, 0, +1}, omega_j > 0 on non-degenerate axes, and the residual
// linear part supported on degenerate axes only (delta_j * b_j = 0).
struct QuadraticPotential {
    std::vector<int> delta;
    std::vector<double> omega;
    std::vector<double> residual_linear;
    double constant = 0.0;

    QuadraticPotential(std::vector<int> d, std::vector<double> w,
                       std::vector<double> b = {}, double c = 0.0)
        : delta(std::move(d)), omega(std::move(w)), residual_linear(std::move(b)), constant(c) {
        const std::size_t n = delta.size();
        if (n == 0 || n > 3) throw std::invalid_argument("QuadraticPotential: dimension 1..3");
        if (omega.size() != n) throw std::invalid_argument("QuadraticPotential: omega per axis");
        if (residual_linear.empty()) residual_linear.assign(n, 0.0);
        if (residual_linear.size() != n)
            throw std::invalid_argument("QuadraticPotential: linear term per axis");
        for (std::size_t j = 0; j < n; ++j) {
            if (delta[j] != -1 && delta[j] != 0 && delta[j] != 1)
                throw std::invalid_argument("QuadraticPotential: delta_j in {-1,0,+1}");
            if (delta[j] != 0 && !(omega[j] > 0.0))
                throw std::invalid_argument("QuadraticPotential: omega_j > 0 on non-degenerate axes");
            if (delta[j] != 0 && residual_linear[j] != 0.0)
                throw std::invalid_argument(
                    "QuadraticPotential: linear term only on degenerate axes");
        }
    }

    static QuadraticPotential free_space(std::size_t n) {
        return QuadraticPotential(std::vector<int>(n, 0), std::vector<double>(n, 1.0));
    }
    static QuadraticPotential harmonic(std::vector<double> omegas) {
        const std::size_t n = omegas.size();  // read before the move: arg order is unspecified
        return QuadraticPotential(std::vector<int>(n, 1), std::move(omegas));
    }
    static QuadraticPotential repulsive(std::vector<double> omegas) {
        const std::size_t n = omegas.size();
        return QuadraticPotential(std::vector<int>(n, -1), std::move(omegas));
    }
    static QuadraticPotential stark(std::vector<double> field) {
        QuadraticPotential p(std::vector<int>(field.size(), 0),
                             std::vector<double>(field.size(), 1.0));
        p.residual_linear = std::move(field);
        return p;
    }

    std::size_t dim() const { return delta.size(); }

    bool is_free() const {
        for (std::size_t j = 0; j < dim(); ++j)
            if (delta[j] != 0 || residual_linear[j] != 0.0) return false;
        return constant == 0.0;
    }
    bool has_gauge_terms() const {
        if (constant != 0.0) return true;
        for (double b : residual_linear)
            if (b != 0.0) return true;
        return false;
    }
    bool is_uniform(int sign) const {
        for (int d : delta)
            if (d != sign) return false;
        return true;
    }
    bool has_repulsive_axis() const {
        for (int d : delta)
            if (d == -1) return true;
        return false;
    }
    bool is_isotropic() const {
        for (std::size_t j = 1; j < dim(); ++j)
            if (delta[j] != delta[0] || omega[j] != omega[0]) return false;
        return true;
    }

    double value(const double* x) const {
        double v = constant;
        for (std::size_t j = 0; j < dim(); ++j) {
            v += 0.5 * static_cast<double>(delta[j]) * omega[j] * omega[j] * x[j] * x[j];
            v += residual_linear[j] * x[j];
        }
        return v;
    }
};

// ---------------------------------------------------------------------------
// Canonicalization of a general second-order polynomial sum a_jk x_j x_k + b.x + c.

struct CanonicalForm {
    QuadraticPotential potential;
    // Columns are the orthonormal eigenbasis; canonical coordinate y = R^T (x - shift).
    std::vector<std::vector<double>> basis;
    std::vector<double> shift;
};

namespace detail {

// Cyclic Jacobi eigendecomposition for symmetric matrices up to 3x3.
inline void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eig,
                         std::vector<std::vector<double>>& vec) {
    const std::size_t n = a.size();
    vec.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vec[i][i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-300) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vec[k][p], vkq = vec[k][q];
                    vec[k][p] = c * vkp - s * vkq;
                    vec[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    eig.resize(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
}

}  // namespace detail

// Reduce V(x) = sum a_jk x_j x_k + b . x + c to canonical axes.  Eigenvalues
// with |eig| <= 1e-12 * max|eig| count as degenerate; linear terms along
// non-degenerate axes are absorbed into the origin shift, the constant into
// the scalar remainder.
inline CanonicalForm canonicalize(const std::vector<std::vector<double>>& a,
                                  const std::vector<double>& b, double c) {
    const std::size_t n = a.size();
    if (n == 0 || n > 3) throw std::invalid_argument("canonicalize: dimension 1..3");
    double amax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw std::invalid_argument("canonicalize: matrix must be square");
        for (std::size_t j = 0; j < n; ++j) amax = std::max(amax, std::abs(a[i][j]));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(a[i][j] - a[j][i]) > 1e-12 * std::max(1.0, amax))
                throw std::domain_error("canonicalize: matrix must be symmetric");
    if (b.size() != n) throw std::invalid_argument("canonicalize: linear term size mismatch");

    std::vector<double> eig;
    std::vector<std::vector<double>> vec;
    detail::jacobi_eigen(a, eig, vec);

    double emax = 0.0;
    for (double e : eig) emax = std::max(emax, std::abs(e));
    const double zero_tol = 1e-12 * std::max(1.0, emax);

    // Rotate the linear term: b' = R^T b.
    std::vector<double> bp(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) bp[j] += vec[i][j] * b[i];

    std::vector<int> delta(n, 0);
    std::vector<double> omega(n, 1.0);
    std::vector<double> residual(n, 0.0);
    std::vector<double> shift_canon(n, 0.0);
    double constant = c;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(eig[j]) <= zero_tol) {
            delta[j] = 0;
            residual[j] = bp[j];
            continue;
        }
        delta[j] = eig[j] > 0.0 ? 1 : -1;
        omega[j] = std::sqrt(2.0 * std::abs(eig[j]));
        // eig*(y + b'/(2 eig))^2 - b'^2/(4 eig)
        shift_canon[j] = -bp[j] / (2.0 * eig[j]);
        constant -= bp[j] * bp[j] / (4.0 * eig[j]);
    }

    // Shift back to original coordinates: with x0 = R * shift_canon the
    // canonical variable is y = R^T (x - x0) = y' - shift_canon.
    std::vector<double> shift(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) shift[i] += vec[i][j] * shift_canon[j];

    CanonicalForm out{QuadraticPotential(delta, omega, residual, constant), vec, shift};
    return out;
}

// ---------------------------------------------------------------------------
// Ray functions and classical data.

// (g_j, h_j)(t): fundamental solutions of r'' = -delta*omega^2 r with
// (g, g')(0) = (0, 1) and (h, h')(0) = (1, 0).
inline void phase_functions(int delta, double omega, double t, double& g, double& h) {
    switch (delta) {
        case -1:
            g = std::sinh(omega * t) / omega;
            h = std::cosh(omega * t);
            return;
        case 0:
            g = t;
            h = 1.0;
            return;
        case 1:
            g = std::sin(omega * t) / omega;
            h = std::cos(omega * t);
            return;
        default:
            throw std::invalid_argument("phase_functions: delta in {-1,0,+1}");
    }
}

struct PhasePair {
    double g = 0.0;
    double h = 0.0;
};

inline PhasePair phase_functions(const QuadraticPotential& pot, std::size_t axis, double t) {
    PhasePair p;
    phase_functions(pot.delta.at(axis), pot.omega.at(axis), t, p.g, p.h);
    return p;
}

// -delta*omega^2 g^2 - h^2 = -1 for every (delta, omega, t).
inline double wronskian_residual(int delta, double omega, double t) {
    double g, h;
    phase_functions(delta, omega, t, g, h);
    return -static_cast<double>(delta) * omega * omega * g * g - h * h + 1.0;
}

// Classical ray through (x0, xi0): x(t) = h x0 + g xi0, xi(t) = -delta w^2 g x0 + h xi0.
inline void classical_trajectory(int delta, double omega, double t, double x0, double xi0,
                                 double& x, double& xi) {
    double g, h;
    phase_functions(delta, omega, t, g, h);
    x = h * x0 + g * xi0;
    xi = -static_cast<double>(delta) * omega * omega * g * x0 + h * xi0;
}

// ---------------------------------------------------------------------------
// Classification.

struct PotentialClassification {
    double omega_plus = 0.0;    // max omega over harmonic axes (0 if none)
    double omega_minus = 0.0;   // max omega over repulsive axes (0 if none)
    bool has_repulsive_axis = false;
    bool fully_harmonic = false;
    bool rationally_dependent_frequencies = false;
};

namespace detail {

// Continued-fraction rationality test: |r - p/q| < tol with q <= max_den.
inline bool is_rational_ratio(double r, std::size_t max_den, double tol) {
    double x = r;
    long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(x)), q1 = 1;
    for (int it = 0; it < 64; ++it) {
        const double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(r - approx) < tol) return static_cast<std::size_t>(q1) <= max_den;
        const double frac = x - std::floor(x);
        if (frac < 1e-15) break;
        x = 1.0 / frac;
        const long long a = static_cast<long long>(std::floor(x));
        const long long p2 = a * p1 + p0;
        const long long q2 = a * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q1 > static_cast<long long>(max_den)) break;
    }
    return std::abs(r - static_cast<double>(p1) / static_cast<double>(q1)) < tol &&
           static_cast<std::size_t>(q1) <= max_den;
}

}  // namespace detail

inline PotentialClassification classify(const QuadraticPotential& pot,
                                        std::size_t max_denominator = 64,
                                        double tol = 1e-9) {
    PotentialClassification out;
    std::vector<double> harmonic;
    out.fully_harmonic = true;
    for (std::size_t j = 0; j < pot.dim(); ++j) {
        if (pot.delta[j] == 1) {
            out.omega_plus = std::max(out.omega_plus, pot.omega[j]);
            harmonic.push_back(pot.omega[j]);
        } else {
            out.fully_harmonic = false;
        }
        if (pot.delta[j] == -1) {
            out.has_repulsive_axis = true;
            out.omega_minus = std::max(out.omega_minus, pot.omega[j]);
        }
    }
    // "All rays meet again" needs every pair of harmonic frequencies to be
    // rationally dependent; with a single harmonic axis that holds vacuously.
    if (!harmonic.empty()) {
        bool all_pairs = true;
        for (std::size_t i = 0; i < harmonic.size(); ++i)
            for (std::size_t j = i + 1; j < harmonic.size(); ++j)
                if (!detail::is_rational_ratio(harmonic[i] / harmonic[j], max_denominator, tol))
                    all_pairs = false;
        out.rationally_dependent_frequencies = out.fully_harmonic && all_pairs;
    }
    return out;
}

// Potential sampled on a grid (used by the splitting solver; truthful
// polynomial values on the box, no periodization).
inline std::vector<double> potential_table(const Grid& grid, const QuadraticPotential& pot) {
    if (pot.dim() != grid.dim())
        throw std::invalid_argument("potential_table: dimension mismatch");
    std::vector<double> table(grid.total_points());
    detail::for_each_index(grid, [&](std::size_t flat, const std::array<std::size_t, 3>& idx) {
        double x[3] = {0.0, 0.0, 0.0};
        for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.coords(a)[idx[a]];
        table[flat] = pot.value(x);
    });
    return table;
}

}  // namespace nlsp
