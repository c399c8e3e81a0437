#ifndef EULERLAB_NORMS_HPP
#define EULERLAB_NORMS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "field.hpp"
#include "grid.hpp"
#include "random.hpp"
#include "spectral.hpp"

namespace eulerlab {

// Order s of the homogeneous Sobolev scale; |s| <= 4 is a sanity bound, the
// experiments only use s in [-1, 1].
struct SobolevOrder {
    double s;

    explicit SobolevOrder(double s_) : s(s_) {
        if (!std::isfinite(s) || std::fabs(s) > 4.0)
            throw std::invalid_argument("SobolevOrder: |s| must be finite and <= 4");
    }
};

struct HolderExponent {
    double alpha;

    explicit HolderExponent(double alpha_) : alpha(alpha_) {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw std::invalid_argument("HolderExponent: alpha must lie in (0,1)");
    }
};

struct NormReport {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    std::vector<std::pair<double, double>> hs_values;  // (order, norm)
    std::optional<double> holder_seminorm;
};

enum class Lp { L1, L2, Linf };

inline double lp_norm(const RealField& f, Lp p) {
    detail::require_finite(f, "lp_norm");
    const auto v = f.values();
    const double cell = f.grid().spacing() * f.grid().spacing();
    switch (p) {
        case Lp::L1:
            return cell * detail::pairwise_sum(0, v.size(),
                                               [&](std::size_t k) { return std::fabs(v[k]); });
        case Lp::L2:
            return std::sqrt(cell * detail::pairwise_sum(
                                        0, v.size(), [&](std::size_t k) { return v[k] * v[k]; }));
        case Lp::Linf:
            return f.max_abs();
    }
    return 0.0;
}

inline double l2_norm(const VectorField& u) {
    const double nx = lp_norm(u.x_component, Lp::L2);
    const double ny = lp_norm(u.y_component, Lp::L2);
    return std::hypot(nx, ny);
}

inline double mean_value(const RealField& f) {
    const auto v = f.values();
    return detail::pairwise_sum(0, v.size(), [&](std::size_t k) { return v[k]; }) /
           static_cast<double>(v.size());
}

namespace detail {

// |k|^{2s}-weighted spectral sum over k != 0; throws for s < 0 unless the
// mean coefficient is negligible, since the k = 0 weight is singular there.
inline double hs_norm_from_spectrum(const SpectralField& F, double s) {
    const Grid2D& g = F.grid();
    const std::size_t n = g.n;
    const double total = std::sqrt(spectral_energy(F));
    if (s < 0.0 && std::abs(F(0, 0)) > 1e-10 * total)
        throw std::invalid_argument(
            "hs_norm: negative order requires a zero-mean field (|k|^s is singular at k=0)");
    std::vector<double> ksq(n);
    for (std::size_t a = 0; a < n; ++a) {
        const double k = g.wavenumber(a);
        ksq[a] = k * k;
    }
    const auto c = F.coeffs();
    const double sum = pairwise_sum(0, c.size(), [&](std::size_t idx) {
        const std::size_t a = idx / n, b = idx % n;
        if (a == 0 && b == 0) return 0.0;
        const double k2 = ksq[a] + ksq[b];
        return std::pow(k2, s) * std::norm(c[idx]);
    });
    return g.box_length * std::sqrt(sum);
}

}  // namespace detail

inline double hs_norm(const SpectralField& F, SobolevOrder s) {
    return detail::hs_norm_from_spectrum(F, s.s);
}

inline double hs_norm(const RealField& f, SobolevOrder s) {
    return detail::hs_norm_from_spectrum(forward_transform(f), s.s);
}

// Grid Holder seminorm estimate: exhaustive over the (2*8+1)^2 offset
// neighborhood plus 64 seeded random longer offsets per point, all within
// periodic distance r0 = L/4.  A lower bound of the full grid seminorm that
// is exact whenever the maximizing pair falls inside the sampled offsets.
inline double holder_seminorm(const RealField& f, HolderExponent alpha) {
    detail::require_finite(f, "holder_seminorm");
    const Grid2D& g = f.grid();
    const std::size_t n = g.n;
    const double h = g.spacing();
    const double r0 = g.box_length / 4.0;
    constexpr long near_extent = 8;
    constexpr int far_samples = 64;

    // near offsets are shared by every point; precompute 1/dist^alpha
    struct Offset {
        long di, dj;
        double inv_dist_alpha;
    };
    std::vector<Offset> near;
    near.reserve((2 * near_extent + 1) * (2 * near_extent + 1));
    for (long di = -near_extent; di <= near_extent; ++di) {
        for (long dj = -near_extent; dj <= near_extent; ++dj) {
            if (di == 0 && dj == 0) continue;
            const double dx = g.axis_distance(0.0, static_cast<double>(di) * h);
            const double dy = g.axis_distance(0.0, static_cast<double>(dj) * h);
            const double dist = std::hypot(dx, dy);
            if (dist <= 0.0 || dist > r0) continue;
            near.push_back({di, dj, 1.0 / std::pow(dist, alpha.alpha)});
        }
    }

    const long far_extent = static_cast<long>(n / 4);
    auto wrap = [n](long i) { return static_cast<std::size_t>(((i % (long)n) + (long)n) % (long)n); };

    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double fij = f(i, j);
            for (const Offset& o : near) {
                const double diff = std::fabs(fij - f(wrap((long)i + o.di), wrap((long)j + o.dj)));
                best = std::max(best, diff * o.inv_dist_alpha);
            }
            if (far_extent <= near_extent) continue;
            detail::SplitMix64 rng(detail::mix_seed(i * n + j, n));
            int accepted = 0;
            for (int attempt = 0; attempt < 4 * far_samples && accepted < far_samples; ++attempt) {
                const long di = static_cast<long>(rng.below(2 * far_extent + 1)) - far_extent;
                const long dj = static_cast<long>(rng.below(2 * far_extent + 1)) - far_extent;
                if (std::max(std::labs(di), std::labs(dj)) <= near_extent) continue;
                const double dx = g.axis_distance(0.0, static_cast<double>(di) * h);
                const double dy = g.axis_distance(0.0, static_cast<double>(dj) * h);
                const double dist = std::hypot(dx, dy);
                if (dist <= 0.0 || dist > r0) continue;
                ++accepted;
                const double diff = std::fabs(fij - f(wrap((long)i + di), wrap((long)j + dj)));
                best = std::max(best, diff / std::pow(dist, alpha.alpha));
            }
        }
    }
    return best;
}

// Residual of the homogeneous interpolation inequality
//   ||f||_{L2} <= ||f||_{H^-1}^{b/(1+b)} ||f||_{H^b}^{1/(1+b)},
// returned as rhs - lhs; nonnegative up to round-off, zero when the spectrum
// sits on a single |k| shell.
inline double check_interpolation(const RealField& f, SobolevOrder beta) {
    if (!(beta.s > 0.0) || !(beta.s < 1.0))
        throw std::invalid_argument("check_interpolation: beta must lie in (0,1)");
    const SpectralField F = forward_transform(f);
    const double hm1 = detail::hs_norm_from_spectrum(F, -1.0);  // throws on nonzero mean
    const double hb = detail::hs_norm_from_spectrum(F, beta.s);
    const double l2 = lp_norm(f, Lp::L2);
    const double g = beta.s / (1.0 + beta.s);
    return std::pow(hm1, g) * std::pow(hb, 1.0 - g) - l2;
}

// | ||omega||_{H^-1} - ||u||_{L2} | for u the Biot-Savart velocity of omega;
// an exact identity mode by mode in the discrete Fourier setting.
inline double check_duality(const RealField& omega, const VectorField& u) {
    const double hm1 = hs_norm(omega, SobolevOrder(-1.0));
    return std::fabs(hm1 - l2_norm(u));
}

}  // namespace eulerlab

#endif
