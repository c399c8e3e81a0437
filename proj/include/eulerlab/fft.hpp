#ifndef EULERLAB_FFT_HPP
#define EULERLAB_FFT_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "grid.hpp"

namespace eulerlab::detail {

// Iterative radix-2 Cooley-Tukey transform for one power-of-two size.
// Twiddle and bit-reversal tables are built once per size and shared; the
// butterfly order is fixed, so transforms are bit-reproducible run to run.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n), bitrev_(n), w_(n / 2) {
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1u) << (log2n - 1 - b);
            bitrev_[i] = r;
        }
        for (std::size_t j = 0; j < n / 2; ++j)
            w_[j] = std::polar(1.0, -two_pi * static_cast<double>(j) / static_cast<double>(n));
    }

    std::size_t size() const { return n_; }

    // In-place unnormalized transform of one contiguous length-n row.
    // sign < 0 applies e^{-i...} (analysis), sign > 0 applies e^{+i...}.
    void transform(std::complex<double>* row, int sign) const {
        double* a = reinterpret_cast<double*>(row);
        const std::size_t n = n_;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = bitrev_[i];
            if (r > i) {
                std::swap(a[2 * i], a[2 * r]);
                std::swap(a[2 * i + 1], a[2 * r + 1]);
            }
        }
        const double flip = sign < 0 ? 1.0 : -1.0;
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = n / len;
            for (std::size_t start = 0; start < n; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const double wr = w_[j * step].real();
                    const double wi = flip * w_[j * step].imag();
                    const std::size_t p = 2 * (start + j);
                    const std::size_t q = 2 * (start + j + half);
                    const double xr = a[q], xi = a[q + 1];
                    const double tr = wr * xr - wi * xi;
                    const double ti = wr * xi + wi * xr;
                    a[q] = a[p] - tr;
                    a[q + 1] = a[p + 1] - ti;
                    a[p] += tr;
                    a[p + 1] += ti;
                }
            }
        }
    }

private:
    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> w_;
};

inline const FftPlan& plan_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<const FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<const FftPlan>(n)).first;
    return *it->second;
}

inline void transpose_square(std::complex<double>* a, std::size_t n) {
    constexpr std::size_t block = 32;
    for (std::size_t ib = 0; ib < n; ib += block) {
        for (std::size_t jb = ib; jb < n; jb += block) {
            const std::size_t imax = std::min(ib + block, n);
            const std::size_t jmax = std::min(jb + block, n);
            for (std::size_t i = ib; i < imax; ++i) {
                const std::size_t jstart = (ib == jb) ? i + 1 : jb;
                for (std::size_t j = jstart; j < jmax; ++j)
                    std::swap(a[i * n + j], a[j * n + i]);
            }
        }
    }
}

// Unnormalized 2D DFT of a row-major n x n array, both axes.
inline void dft2(std::complex<double>* a, std::size_t n, int sign) {
    const FftPlan& plan = plan_for(n);
    for (std::size_t i = 0; i < n; ++i) plan.transform(a + i * n, sign);
    transpose_square(a, n);
    for (std::size_t i = 0; i < n; ++i) plan.transform(a + i * n, sign);
    transpose_square(a, n);
}

}  // namespace eulerlab::detail

#endif
