#ifndef EULERLAB_GRID_HPP
#define EULERLAB_GRID_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace eulerlab {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

// Uniform n x n sampling of the periodic square [0,L)^2.  Index (i,j) is the
// point (i*L/n, j*L/n); the first index runs along x.  n is a power of two so
// the radix-2 transforms below apply without padding.
struct Grid2D {
    std::size_t n;
    double box_length;

    Grid2D(std::size_t n_, double box_length_) : n(n_), box_length(box_length_) {
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Grid2D: n must be a power of two >= 8, got " +
                                        std::to_string(n_));
        if (!(box_length > 0.0) || !std::isfinite(box_length))
            throw std::invalid_argument("Grid2D: box_length must be positive and finite");
    }

    double spacing() const { return box_length / static_cast<double>(n); }
    std::size_t size() const { return n * n; }
    double coord(std::size_t i) const { return spacing() * static_cast<double>(i); }

    // Signed integer frequency in (-n/2, n/2] of a transform index.
    long freq(std::size_t idx) const {
        return idx <= n / 2 ? static_cast<long>(idx)
                            : static_cast<long>(idx) - static_cast<long>(n);
    }

    // Physical wavenumber (2*pi/L) * freq.
    double wavenumber(std::size_t idx) const {
        return two_pi / box_length * static_cast<double>(freq(idx));
    }

    // Shortest periodic distance between two coordinates on one axis.
    double axis_distance(double a, double b) const {
        double d = std::fabs(a - b);
        d -= box_length * std::floor(d / box_length);
        return std::min(d, box_length - d);
    }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

}  // namespace eulerlab

#endif
