#ifndef EULERLAB_SPECTRAL_HPP
#define EULERLAB_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>

#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace eulerlab {

// f(x) = sum_k fhat(k) e^{i k.x}; the (0,0) coefficient is the mean of f.
inline SpectralField forward_transform(const RealField& f) {
    detail::require_finite(f, "forward_transform");
    const std::size_t n = f.n();
    SpectralField out(f.grid());
    auto coeffs = out.coeffs();
    const auto vals = f.values();
    for (std::size_t k = 0; k < vals.size(); ++k) coeffs[k] = vals[k];
    detail::dft2(coeffs.data(), n, -1);
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    for (auto& c : coeffs) c *= scale;
    return out;
}

// Largest |fhat(k) - conj(fhat(-k))| over all modes; zero for the transform
// of a real field up to round-off.
inline double conjugate_symmetry_defect(const SpectralField& F) {
    const std::size_t n = F.n();
    double defect = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t ar = (n - a) % n;
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t br = (n - b) % n;
            defect = std::max(defect, std::abs(F(a, b) - std::conj(F(ar, br))));
        }
    }
    return defect;
}

inline RealField inverse_transform(const SpectralField& F) {
    const double max_coeff = F.max_abs();
    if (conjugate_symmetry_defect(F) > 1e-10 * max_coeff)
        throw std::invalid_argument(
            "inverse_transform: coefficients are not conjugate-symmetric; "
            "the inverse would be complex");
    const std::size_t n = F.n();
    std::vector<std::complex<double>> work(F.coeffs().begin(), F.coeffs().end());
    detail::dft2(work.data(), n, +1);
    RealField out(F.grid());
    auto vals = out.values();
    for (std::size_t k = 0; k < work.size(); ++k) vals[k] = work[k].real();
    return out;
}

enum class Axis { x, y };

// Multiply by i*k along one axis.  The Nyquist line of that axis has no
// conjugate partner, so an odd multiplier must zero it.
inline SpectralField spectral_derivative(const SpectralField& F, Axis axis) {
    const Grid2D& g = F.grid();
    const std::size_t n = g.n;
    const long nyquist = static_cast<long>(n / 2);
    SpectralField out(g);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t idx = axis == Axis::x ? a : b;
            if (g.freq(idx) == nyquist) {
                out(a, b) = 0.0;
                continue;
            }
            const double k = g.wavenumber(idx);
            const std::complex<double> c = F(a, b);
            out(a, b) = std::complex<double>(-k * c.imag(), k * c.real());
        }
    }
    return out;
}

// Square 2/3 rule: zero every mode with max(|jx|,|jy|) > n/3.
inline SpectralField dealias(const SpectralField& F) {
    const Grid2D& g = F.grid();
    const std::size_t n = g.n;
    SpectralField out = F;
    for (std::size_t a = 0; a < n; ++a) {
        const long fa = std::labs(g.freq(a));
        for (std::size_t b = 0; b < n; ++b) {
            const long fb = std::labs(g.freq(b));
            if (3 * std::max(fa, fb) > static_cast<long>(n)) out(a, b) = 0.0;
        }
    }
    return out;
}

// sum_k |fhat(k)|^2, the spectral side of Parseval.
inline double spectral_energy(const SpectralField& F) {
    const auto c = F.coeffs();
    return detail::pairwise_sum(0, c.size(), [&](std::size_t k) { return std::norm(c[k]); });
}

}  // namespace eulerlab

#endif
