#ifndef EULERLAB_FLOW_MAP_HPP
#define EULERLAB_FLOW_MAP_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "norms.hpp"

namespace eulerlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Velocity frames recorded along a run; read-only after construction, so
// trajectory integrations can share it freely across threads.
class VelocityHistory {
public:
    explicit VelocityHistory(const Grid2D& grid) : grid_(grid) {}

    void push(double t, VectorField frame) {
        if (!(frame.grid() == grid_))
            throw std::invalid_argument("VelocityHistory: frame grid mismatch");
        if (!times_.empty() && !(t > times_.back()))
            throw std::invalid_argument("VelocityHistory: times must be strictly increasing");
        max_speed_ = std::max({max_speed_, frame.x_component.max_abs(),
                               frame.y_component.max_abs()});
        times_.push_back(t);
        frames_.push_back(std::move(frame));
    }

    const Grid2D& grid() const { return grid_; }
    std::size_t frame_count() const { return frames_.size(); }
    const std::vector<double>& times() const { return times_; }
    const VectorField& frame(std::size_t i) const { return frames_[i]; }
    double max_speed() const { return max_speed_; }

    double min_spacing() const {
        if (times_.size() < 2)
            throw std::invalid_argument("VelocityHistory: need at least 2 frames");
        double s = times_[1] - times_[0];
        for (std::size_t i = 2; i < times_.size(); ++i)
            s = std::min(s, times_[i] - times_[i - 1]);
        return s;
    }

    bool contains_time(double t) const {
        if (times_.size() < 2) return false;
        const double slack = 1e-9 * (times_.back() - times_.front());
        return t >= times_.front() - slack && t <= times_.back() + slack;
    }

    // Linear interpolation between the two bracketing frames, bilinear in space.
    Vec2 velocity(double t, Vec2 p) const {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - times_.begin());
        hi = std::clamp<std::size_t>(hi, 1, times_.size() - 1);
        const std::size_t lo = hi - 1;
        const double span = times_[hi] - times_[lo];
        double w = (t - times_[lo]) / span;
        w = std::clamp(w, 0.0, 1.0);
        const Vec2 a = sample_frame(frames_[lo], p);
        const Vec2 b = sample_frame(frames_[hi], p);
        return {(1.0 - w) * a.x + w * b.x, (1.0 - w) * a.y + w * b.y};
    }

private:
    static Vec2 sample_frame(const VectorField& f, Vec2 p);

    Grid2D grid_;
    std::vector<double> times_;
    std::vector<VectorField> frames_;
    double max_speed_ = 0.0;
};

namespace detail {

inline double wrap_coord(double x, double box) {
    x -= box * std::floor(x / box);
    if (x >= box) x = 0.0;  // guard the x == box round-off case
    return x;
}

inline double bilinear_sample(const RealField& f, double x, double y) {
    const Grid2D& g = f.grid();
    const std::size_t n = g.n;
    const double h = g.spacing();
    const double gx = wrap_coord(x, g.box_length) / h;
    const double gy = wrap_coord(y, g.box_length) / h;
    std::size_t i0 = static_cast<std::size_t>(gx);
    std::size_t j0 = static_cast<std::size_t>(gy);
    if (i0 >= n) i0 = n - 1;
    if (j0 >= n) j0 = n - 1;
    const double tx = gx - static_cast<double>(i0);
    const double ty = gy - static_cast<double>(j0);
    const std::size_t i1 = (i0 + 1) % n;
    const std::size_t j1 = (j0 + 1) % n;
    return (1.0 - tx) * (1.0 - ty) * f(i0, j0) + tx * (1.0 - ty) * f(i1, j0) +
           (1.0 - tx) * ty * f(i0, j1) + tx * ty * f(i1, j1);
}

}  // namespace detail

inline Vec2 VelocityHistory::sample_frame(const VectorField& f, Vec2 p) {
    return {detail::bilinear_sample(f.x_component, p.x, p.y),
            detail::bilinear_sample(f.y_component, p.x, p.y)};
}

namespace detail {

// RK4 characteristic integration of dX/ds = u(s, X) from t_from to t_to
// (either direction).  Positions are kept unwrapped so the caller can form
// seam-free distances and polygon areas; the substep never exceeds the frame
// spacing, nor the CFL scale of the recorded velocity.
inline std::vector<Vec2> integrate_flow(const VelocityHistory& history, double t_from,
                                        double t_to, std::span<const Vec2> points) {
    std::vector<Vec2> pos(points.begin(), points.end());
    const double total = t_to - t_from;
    if (total == 0.0) return pos;
    const double h = history.grid().spacing();
    double sub = history.min_spacing();
    if (history.max_speed() > 1e-12) sub = std::min(sub, 0.5 * h / history.max_speed());
    const std::size_t nsteps =
        static_cast<std::size_t>(std::ceil(std::fabs(total) / sub - 1e-12));
    const double ds = total / static_cast<double>(nsteps);
    for (Vec2& p : pos) {
        double s = t_from;
        for (std::size_t m = 0; m < nsteps; ++m) {
            const Vec2 k1 = history.velocity(s, p);
            const Vec2 k2 =
                history.velocity(s + 0.5 * ds, {p.x + 0.5 * ds * k1.x, p.y + 0.5 * ds * k1.y});
            const Vec2 k3 =
                history.velocity(s + 0.5 * ds, {p.x + 0.5 * ds * k2.x, p.y + 0.5 * ds * k2.y});
            const Vec2 k4 = history.velocity(s + ds, {p.x + ds * k3.x, p.y + ds * k3.y});
            p.x += ds / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
            p.y += ds / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
            s = t_from + static_cast<double>(m + 1) * ds;
        }
    }
    return pos;
}

}  // namespace detail

// Query points at time t paired with their flow preimages at time 0, wrapped
// back into [0,L)^2.
struct FlowSample {
    std::vector<Vec2> points;
    std::vector<Vec2> preimages;
};

inline FlowSample backward_flow(const VelocityHistory& history, double t,
                                std::span<const Vec2> points) {
    if (!history.contains_time(t) || !history.contains_time(0.0))
        throw std::invalid_argument("backward_flow: t outside the recorded history range");
    for (const Vec2& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("backward_flow: non-finite query point");
    FlowSample out;
    out.points.assign(points.begin(), points.end());
    out.preimages = detail::integrate_flow(history, t, 0.0, points);
    const double L = history.grid().box_length;
    for (Vec2& p : out.points) {
        p.x = detail::wrap_coord(p.x, L);
        p.y = detail::wrap_coord(p.y, L);
    }
    for (Vec2& p : out.preimages) {
        p.x = detail::wrap_coord(p.x, L);
        p.y = detail::wrap_coord(p.y, L);
    }
    return out;
}

// || omega(t,.) - omega_bar(X(0,t,.)) ||_{L2} over the full grid, with
// bilinear sampling of omega_bar at the preimages.
inline double check_lagrangian_representation(const RealField& omega_bar,
                                              const VelocityHistory& history,
                                              const RealField& omega_t, double t) {
    if (!(omega_bar.grid() == omega_t.grid()) || !(omega_bar.grid() == history.grid()))
        throw std::invalid_argument("check_lagrangian_representation: grid mismatch");
    const Grid2D& g = omega_bar.grid();
    std::vector<Vec2> points;
    points.reserve(g.size());
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) points.push_back({g.coord(i), g.coord(j)});
    const std::vector<Vec2> pre = detail::integrate_flow(history, t, 0.0, points);
    std::vector<double> sq(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double transported = detail::bilinear_sample(omega_bar, pre[k].x, pre[k].y);
        const double d = omega_t.values()[k] - transported;
        sq[k] = d * d;
    }
    const double cell = g.spacing() * g.spacing();
    return std::sqrt(cell *
                     detail::pairwise_sum(0, sq.size(), [&](std::size_t k) { return sq[k]; }));
}

namespace detail {

inline double polygon_area(std::span<const Vec2> corners) {
    double twice = 0.0;
    for (std::size_t k = 0; k < corners.size(); ++k) {
        const Vec2& a = corners[k];
        const Vec2& b = corners[(k + 1) % corners.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::fabs(twice);
}

}  // namespace detail

// Transports a small cell backward and returns preimage area / original area;
// 1 up to discretization error for a divergence-free history.
inline double incompressibility_check(const VelocityHistory& history, double t,
                                      std::span<const Vec2> cell_corners) {
    if (cell_corners.size() < 3)
        throw std::invalid_argument("incompressibility_check: need a polygon");
    const double area = detail::polygon_area(cell_corners);
    const double L = history.grid().box_length;
    if (area <= 1e-14 * L * L)
        throw std::invalid_argument("incompressibility_check: degenerate cell");
    if (!history.contains_time(t))
        throw std::invalid_argument("incompressibility_check: t outside the recorded range");
    const std::vector<Vec2> pre = detail::integrate_flow(history, t, 0.0, cell_corners);
    return detail::polygon_area(pre) / area;
}

// Adapter recording velocity frames (and times) from evolve.
inline FrameSink history_sink(VelocityHistory& history, std::size_t every) {
    return FrameSink{every, [&history](const SolverState& s) { history.push(s.t, s.u); }};
}

}  // namespace eulerlab

#endif
