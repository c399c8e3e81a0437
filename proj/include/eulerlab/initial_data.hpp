#ifndef EULERLAB_INITIAL_DATA_HPP
#define EULERLAB_INITIAL_DATA_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "field.hpp"
#include "grid.hpp"
#include "random.hpp"

namespace eulerlab {

enum class DataKind { smooth_dipole, holder_patch_pair, mollified_vortex_patch };

struct Blob {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double amplitude = 0.0;
};

// Compactly supported vorticity built from radial blobs.  Every kind pairs
// opposite-sign blobs so the total circulation is exactly zero, which is what
// the torus Biot-Savart inverse can represent.
struct InitialDataSpec {
    DataKind kind = DataKind::smooth_dipole;
    double alpha = 0.5;  // Holder exponent of the cusp profile, holder kinds only
    std::vector<Blob> blobs;
    std::uint64_t seed = 0;
};

enum class PerturbationMode { translate, amplitude_wiggle };

// Both modes preserve the total integral exactly: translation moves the
// analytic construction, the wiggle adds an equal-and-opposite bump pair.
struct PerturbationSpec {
    PerturbationMode mode = PerturbationMode::translate;
    double delta = 0.0;
};

namespace detail {

// C-infinity bump, 1 at the center, vanishing with all derivatives at rho=1.
inline double smooth_bump(double rho) {
    if (rho >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
}

// Radial cusp (1 - rho)_+^alpha: genuinely C^alpha at the support rim.
inline double holder_cusp(double rho, double alpha) {
    if (rho >= 1.0) return 0.0;
    return std::pow(1.0 - rho, alpha);
}

// Plateau of height 1 with a C-infinity edge over the outer quarter radius.
inline double mollified_plateau(double rho) {
    constexpr double edge = 0.25;
    if (rho >= 1.0) return 0.0;
    if (rho <= 1.0 - edge) return 1.0;
    const double t = (1.0 - rho) / edge;  // 0 at the rim, 1 at the plateau
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

inline double blob_profile(DataKind kind, double rho, double alpha) {
    switch (kind) {
        case DataKind::smooth_dipole: return smooth_bump(rho);
        case DataKind::holder_patch_pair: return holder_cusp(rho, alpha);
        case DataKind::mollified_vortex_patch: return mollified_plateau(rho);
    }
    return 0.0;
}

}  // namespace detail

// Diameter of the union of blob supports (in unwrapped coordinates).
inline double support_diameter(const InitialDataSpec& spec) {
    double dia = 0.0;
    for (const Blob& b : spec.blobs) dia = std::max(dia, 2.0 * b.radius);
    for (std::size_t i = 0; i < spec.blobs.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.blobs.size(); ++j) {
            const Blob &a = spec.blobs[i], &b = spec.blobs[j];
            dia = std::max(dia, std::hypot(a.cx - b.cx, a.cy - b.cy) + a.radius + b.radius);
        }
    }
    return dia;
}

inline void validate_initial_data(const InitialDataSpec& spec, const Grid2D& grid) {
    if (spec.kind == DataKind::holder_patch_pair &&
        (!(spec.alpha > 0.0) || !(spec.alpha < 1.0)))
        throw std::invalid_argument("InitialDataSpec: alpha must lie in (0,1)");
    double signed_weight = 0.0, abs_weight = 0.0;
    for (const Blob& b : spec.blobs) {
        if (!(b.radius > 0.0) && b.amplitude != 0.0)
            throw std::invalid_argument("InitialDataSpec: blob radius must be positive");
        if (b.cx - b.radius < 0.0 || b.cx + b.radius > grid.box_length || b.cy - b.radius < 0.0 ||
            b.cy + b.radius > grid.box_length)
            throw std::invalid_argument("InitialDataSpec: blob support leaves the box");
        // all blobs share one radial profile, so zero integral <=> sum a*r^2 = 0
        signed_weight += b.amplitude * b.radius * b.radius;
        abs_weight += std::fabs(b.amplitude) * b.radius * b.radius;
    }
    if (abs_weight > 0.0 && std::fabs(signed_weight) > 1e-12 * abs_weight)
        throw std::invalid_argument(
            "InitialDataSpec: blob amplitudes must pair to zero total circulation");
    if (support_diameter(spec) > grid.box_length / 4.0 * (1.0 + 1e-12))
        throw std::invalid_argument(
            "InitialDataSpec: support diameter exceeds the L/4 periodization margin");
}

inline RealField generate_initial_data(const InitialDataSpec& spec, const Grid2D& grid) {
    validate_initial_data(spec, grid);
    RealField out(grid);
    for (const Blob& b : spec.blobs) {
        if (b.amplitude == 0.0) continue;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double dx = grid.axis_distance(grid.coord(i), b.cx);
            if (dx >= b.radius) continue;
            for (std::size_t j = 0; j < grid.n; ++j) {
                const double dy = grid.axis_distance(grid.coord(j), b.cy);
                if (dy >= b.radius) continue;
                const double rho = std::hypot(dx, dy) / b.radius;
                if (rho < 1.0)
                    out(i, j) += b.amplitude * detail::blob_profile(spec.kind, rho, spec.alpha);
            }
        }
    }
    return out;
}

// The second member of a data pair.  translate shifts the whole construction
// by delta along x; amplitude_wiggle adds delta times a fixed-shape smooth
// bump pair placed inside the support (seeded by spec.seed).
inline InitialDataSpec perturbed_spec(const InitialDataSpec& spec, const PerturbationSpec& pert) {
    if (!(pert.delta >= 0.0) || !std::isfinite(pert.delta))
        throw std::invalid_argument("PerturbationSpec: delta must be nonnegative and finite");
    InitialDataSpec out = spec;
    if (pert.mode == PerturbationMode::translate) {
        for (Blob& b : out.blobs) b.cx += pert.delta;
    }
    return out;
}

inline RealField generate_pair_second(const InitialDataSpec& spec, const PerturbationSpec& pert,
                                      const Grid2D& grid) {
    if (pert.mode == PerturbationMode::translate)
        return generate_initial_data(perturbed_spec(spec, pert), grid);

    RealField out = generate_initial_data(spec, grid);
    if (pert.delta == 0.0 || spec.blobs.empty()) return out;
    const Blob& anchor = spec.blobs.front();
    detail::SplitMix64 rng(detail::mix_seed(spec.seed, 0x9177u));
    const double phi = rng.uniform(0.0, two_pi);
    const double off = 0.5 * anchor.radius;
    InitialDataSpec wiggle;
    wiggle.kind = DataKind::smooth_dipole;
    wiggle.blobs = {
        {anchor.cx + off * std::cos(phi), anchor.cy + off * std::sin(phi), anchor.radius / 4.0,
         1.0},
        {anchor.cx - off * std::cos(phi), anchor.cy - off * std::sin(phi), anchor.radius / 4.0,
         -1.0}};
    out += pert.delta * generate_initial_data(wiggle, grid);
    return out;
}

// Centered +/- blob pair used as the default experiment data; separation and
// radius keep the support diameter just inside the L/4 margin.
inline InitialDataSpec make_default_pair(DataKind kind, const Grid2D& grid, double alpha = 0.5,
                                         double amplitude = 1.0) {
    const double L = grid.box_length;
    const double radius = 0.06 * L;
    const double half_sep = 0.0625 * L;  // disjoint supports, on-grid centers for n >= 16
    InitialDataSpec spec;
    spec.kind = kind;
    spec.alpha = alpha;
    spec.blobs = {{L / 2.0 - half_sep, L / 2.0, radius, amplitude},
                  {L / 2.0 + half_sep, L / 2.0, radius, -amplitude}};
    return spec;
}

}  // namespace eulerlab

#endif
