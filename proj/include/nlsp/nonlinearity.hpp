#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace nlsp {

// Gauge-invariant power nonlinearity lambda * |u|^(2 sigma) * u.
struct Nonlinearity {
    double lambda = 0.0;
    double sigma = 1.0;
    std::size_t dim = 1;

    Nonlinearity() = default;
    Nonlinearity(double lam, double sig, std::size_t n) : lambda(lam), sigma(sig), dim(n) {
        if (n == 0 || n > 3) throw std::invalid_argument("Nonlinearity: dimension 1..3");
        if (lam != 0.0) {
            if (!(sig > 0.0)) throw std::invalid_argument("Nonlinearity: sigma > 0");
            if (n == 3 && !(sig < 2.0))
                throw std::invalid_argument("Nonlinearity: sigma < 2 required in dimension 3");
        }
    }

    static Nonlinearity linear(std::size_t n) { return Nonlinearity(0.0, 1.0, n); }

    bool is_linear() const { return lambda == 0.0; }
    bool focusing() const { return lambda < 0.0; }

    // sigma = 2/n within rounding.
    bool l2_critical() const {
        return std::abs(sigma - 2.0 / static_cast<double>(dim)) <= 1e-12;
    }
    // sigma >= 2/n: the mass-critical-or-stronger range in the blow-up theorems.
    bool l2_supercritical() const {
        return sigma >= 2.0 / static_cast<double>(dim) - 1e-12;
    }
    bool h1_subcritical() const { return dim <= 2 || sigma < 2.0; }

    // Energy functional weight lambda/(sigma+1) on the |u|^{2 sigma + 2} term.
    double energy_weight() const { return lambda / (sigma + 1.0); }
};

}  // namespace nlsp
