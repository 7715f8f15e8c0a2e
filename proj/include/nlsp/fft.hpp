#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace nlsp {

using cdouble = std::complex<double>;

// Iterative radix-2 transform for one power-of-two length.  Unnormalized:
// forward computes A_k = sum_m a_m exp(-2*pi*i*k*m/n), inverse the conjugate
// sum; callers apply 1/sqrt(n) factors to make the pair unitary.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n < 2 || (n & (n - 1)) != 0)
            throw std::invalid_argument("FftPlan: length must be a power of two >= 2");
        rev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            rev_[i] = r;
        }
        roots_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            roots_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    void forward(cdouble* a) const { run(a, false); }
    void inverse(cdouble* a) const { run(a, true); }

private:
    void run(cdouble* a, bool conj) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t stride = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    cdouble w = roots_[j * stride];
                    if (conj) w = std::conj(w);
                    const cdouble u = a[i + j];
                    const cdouble v = a[i + j + len / 2] * w;
                    a[i + j] = u + v;
                    a[i + j + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<cdouble> roots_;
};

// Shared immutable plans; safe to use from concurrent sweep workers.
inline std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto plan = std::make_shared<const FftPlan>(n);
    cache.emplace(n, plan);
    return plan;
}

namespace detail {
inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
}  // namespace detail

// Fractional discrete transform (Bluestein): G_m = sum_{k<n} a_k exp(-2*pi*i*alpha*k*m)
// for m < m_out and arbitrary real alpha.  Exact to round-off; cost three FFTs of the
// next power of two >= n + m_out - 1.
inline std::vector<cdouble> fractional_dft(const std::vector<cdouble>& a, double alpha,
                                           std::size_t m_out) {
    const std::size_t n = a.size();
    if (n == 0 || m_out == 0) return {};
    const std::size_t p = detail::next_pow2(n + m_out - 1);
    auto plan = fft_plan(p);

    // k*m = (k^2 + m^2 - (m-k)^2)/2 turns the fractional sum into a convolution
    // against the conjugate chirp.
    auto chirp = [alpha](std::size_t j) -> cdouble {
        const double arg = std::numbers::pi * alpha * static_cast<double>(j) * static_cast<double>(j);
        return {std::cos(arg), std::sin(arg)};
    };

    std::vector<cdouble> f(p, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) f[k] = a[k] * std::conj(chirp(k));
    std::vector<cdouble> g(p, cdouble{0.0, 0.0});
    for (std::size_t j = 0; j < m_out; ++j) g[j] = chirp(j);
    for (std::size_t j = 1; j < n; ++j) g[p - j] = chirp(j);

    plan->forward(f.data());
    plan->forward(g.data());
    for (std::size_t i = 0; i < p; ++i) f[i] *= g[i];
    plan->inverse(f.data());

    std::vector<cdouble> out(m_out);
    const double inv_p = 1.0 / static_cast<double>(p);
    for (std::size_t m = 0; m < m_out; ++m) out[m] = f[m] * inv_p * std::conj(chirp(m));
    return out;
}

}  // namespace nlsp
