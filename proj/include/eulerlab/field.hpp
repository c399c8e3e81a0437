#ifndef EULERLAB_FIELD_HPP
#define EULERLAB_FIELD_HPP

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace eulerlab {

// Real scalar samples on a Grid2D, row-major with the x index first.
class RealField {
public:
    explicit RealField(const Grid2D& grid) : grid_(grid), values_(grid.size(), 0.0) {}

    template <class F>
    static RealField sample(const Grid2D& grid, F&& f) {
        RealField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double x = grid.coord(i);
            for (std::size_t j = 0; j < grid.n; ++j)
                out(i, j) = f(x, grid.coord(j));
        }
        return out;
    }

    const Grid2D& grid() const { return grid_; }
    std::size_t n() const { return grid_.n; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.n + j]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    RealField& operator+=(const RealField& o) {
        require_same_grid(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
        return *this;
    }
    RealField& operator-=(const RealField& o) {
        require_same_grid(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
        return *this;
    }
    RealField& operator*=(double c) {
        for (double& v : values_) v *= c;
        return *this;
    }

    friend RealField operator+(RealField a, const RealField& b) { return a += b; }
    friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
    friend RealField operator*(double c, RealField a) { return a *= c; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::fabs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void require_same_grid(const RealField& o) const {
        if (!(grid_ == o.grid_)) throw std::invalid_argument("RealField: grid mismatch");
    }

    Grid2D grid_;
    std::vector<double> values_;
};

// Fourier coefficients with the normalization f(x) = sum_k fhat(k) e^{i k.x}.
// Index (a,b) holds the mode with integer frequencies (freq(a), freq(b)).
class SpectralField {
public:
    explicit SpectralField(const Grid2D& grid) : grid_(grid), coeffs_(grid.size()) {}

    const Grid2D& grid() const { return grid_; }
    std::size_t n() const { return grid_.n; }

    std::complex<double> operator()(std::size_t a, std::size_t b) const {
        return coeffs_[a * grid_.n + b];
    }
    std::complex<double>& operator()(std::size_t a, std::size_t b) {
        return coeffs_[a * grid_.n + b];
    }

    std::span<const std::complex<double>> coeffs() const { return coeffs_; }
    std::span<std::complex<double>> coeffs() { return coeffs_; }

    SpectralField& operator+=(const SpectralField& o) {
        require_same_grid(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    SpectralField& operator*=(double c) {
        for (auto& v : coeffs_) v *= c;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator*(double c, SpectralField a) { return a *= c; }

    // this += c * o, the only compound update the RK4 combinations need
    SpectralField& axpy(double c, const SpectralField& o) {
        require_same_grid(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += c * o.coeffs_[k];
        return *this;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : coeffs_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void require_same_grid(const SpectralField& o) const {
        if (!(grid_ == o.grid_)) throw std::invalid_argument("SpectralField: grid mismatch");
    }

    Grid2D grid_;
    std::vector<std::complex<double>> coeffs_;
};

// Velocity (or any planar vector) field; both components share one grid.
struct VectorField {
    RealField x_component;
    RealField y_component;

    VectorField(RealField ux, RealField uy)
        : x_component(std::move(ux)), y_component(std::move(uy)) {
        if (!(x_component.grid() == y_component.grid()))
            throw std::invalid_argument("VectorField: components on different grids");
    }

    explicit VectorField(const Grid2D& grid) : x_component(grid), y_component(grid) {}

    const Grid2D& grid() const { return x_component.grid(); }

    VectorField& operator-=(const VectorField& o) {
        x_component -= o.x_component;
        y_component -= o.y_component;
        return *this;
    }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
};

namespace detail {

// Fixed-shape pairwise reduction; the summation tree depends only on the index
// range, so results do not change with threading or evaluation order.
template <class F>
double pairwise_sum(std::size_t begin, std::size_t end, F&& term) {
    const std::size_t len = end - begin;
    if (len <= 32) {
        double s = 0.0;
        for (std::size_t k = begin; k < end; ++k) s += term(k);
        return s;
    }
    const std::size_t mid = begin + len / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline void require_finite(const RealField& f, const char* op) {
    const auto vals = f.values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
        if (!std::isfinite(vals[k])) {
            const std::size_t n = f.n();
            throw std::invalid_argument(std::string(op) + ": non-finite sample at index (" +
                                        std::to_string(k / n) + "," + std::to_string(k % n) +
                                        ")");
        }
    }
}

}  // namespace detail

}  // namespace eulerlab

#endif
