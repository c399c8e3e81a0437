#ifndef EULERLAB_DYNAMICS_HPP
#define EULERLAB_DYNAMICS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "grid.hpp"
#include "norms.hpp"
#include "spectral.hpp"

namespace eulerlab {

// Thrown when a run produces non-finite samples; carries the first corrupted time.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double t)
        : std::runtime_error(what + " at t = " + std::to_string(t)), t_(t) {}
    double time() const { return t_; }

private:
    double t_;
};

struct SolverConfig {
    double cfl = 0.5;
    double t_end = 1.0;
    bool dealias = true;
    std::size_t conservation_check_every = 8;
    double holder_alpha = 0.0;  // 0 disables the ledger Holder column
    bool freeze = false;        // identity dynamics, for pipeline tests

    void validate() const {
        if (!(cfl > 0.0) || !(cfl <= 1.0))
            throw std::invalid_argument("SolverConfig: cfl must lie in (0,1]");
        if (!(t_end > 0.0) || !std::isfinite(t_end))
            throw std::invalid_argument("SolverConfig: t_end must be positive and finite");
        if (conservation_check_every == 0)
            throw std::invalid_argument("SolverConfig: conservation_check_every must be >= 1");
    }
};

// Velocity from vorticity in Fourier space:
//   uhat(k) = i (k2, -k1) omegahat(k) / |k|^2,   uhat(0) = 0.
// Zeroing k = 0 projects out the mean vorticity, the only inverse available
// on the torus; the Nyquist lines are zeroed like every odd multiplier.
inline std::pair<SpectralField, SpectralField> biot_savart_hat(const SpectralField& omega_hat) {
    const Grid2D& g = omega_hat.grid();
    const std::size_t n = g.n;
    const long nyquist = static_cast<long>(n / 2);
    SpectralField ux(g), uy(g);
    for (std::size_t a = 0; a < n; ++a) {
        const long fa = g.freq(a);
        const double kx = g.wavenumber(a);
        for (std::size_t b = 0; b < n; ++b) {
            const long fb = g.freq(b);
            if ((fa == 0 && fb == 0) || fa == nyquist || fb == nyquist) {
                ux(a, b) = 0.0;
                uy(a, b) = 0.0;
                continue;
            }
            const double ky = g.wavenumber(b);
            const double inv_k2 = 1.0 / (kx * kx + ky * ky);
            const std::complex<double> w = omega_hat(a, b);
            const std::complex<double> iw(-w.imag(), w.real());  // i * w
            ux(a, b) = iw * (ky * inv_k2);
            uy(a, b) = iw * (-kx * inv_k2);
        }
    }
    return {std::move(ux), std::move(uy)};
}

inline VectorField biot_savart(const RealField& omega) {
    detail::require_finite(omega, "biot_savart");
    auto [ux, uy] = biot_savart_hat(forward_transform(omega));
    return VectorField(inverse_transform(ux), inverse_transform(uy));
}

// curl/divergence combine the component derivatives in physical space; the
// spectral sum of a near-cancelling pair would be round-off noise with no
// usable conjugate symmetry.
inline RealField spectral_curl(const VectorField& u) {
    const RealField dx_uy =
        inverse_transform(spectral_derivative(forward_transform(u.y_component), Axis::x));
    const RealField dy_ux =
        inverse_transform(spectral_derivative(forward_transform(u.x_component), Axis::y));
    return dx_uy - dy_ux;
}

inline RealField spectral_divergence(const VectorField& u) {
    const RealField dx_ux =
        inverse_transform(spectral_derivative(forward_transform(u.x_component), Axis::x));
    const RealField dy_uy =
        inverse_transform(spectral_derivative(forward_transform(u.y_component), Axis::y));
    return dx_ux + dy_uy;
}

struct SolverState {
    double t;
    RealField omega;
    VectorField u;

    static SolverState from_vorticity(double t, RealField omega) {
        VectorField u = biot_savart(omega);
        return SolverState{t, std::move(omega), std::move(u)};
    }
};

namespace detail {

inline SolverState make_state(double t, const SpectralField& omega_hat) {
    auto [ux, uy] = biot_savart_hat(omega_hat);
    return SolverState{t, inverse_transform(omega_hat),
                       VectorField(inverse_transform(ux), inverse_transform(uy))};
}

// -(u . grad) omega in spectral space.  Derivatives are exact multipliers;
// the quadratic product is formed pointwise and truncated by the 2/3 rule so
// its aliased images vanish.
inline SpectralField advection_rhs_hat(const SpectralField& omega_hat, bool use_dealias) {
    const SpectralField base = use_dealias ? dealias(omega_hat) : omega_hat;
    auto [ux_hat, uy_hat] = biot_savart_hat(base);
    const RealField ux = inverse_transform(ux_hat);
    const RealField uy = inverse_transform(uy_hat);
    const RealField wx = inverse_transform(spectral_derivative(base, Axis::x));
    const RealField wy = inverse_transform(spectral_derivative(base, Axis::y));
    RealField advection(base.grid());
    auto out = advection.values();
    const auto a = ux.values(), b = uy.values(), cx = wx.values(), cy = wy.values();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -(a[k] * cx[k] + b[k] * cy[k]);
    SpectralField rhs = forward_transform(advection);
    return use_dealias ? dealias(rhs) : rhs;
}

}  // namespace detail

inline RealField rhs(const SolverState& state) {
    return inverse_transform(detail::advection_rhs_hat(forward_transform(state.omega), true));
}

// Largest admissible step: cfl * h / max(|u1|_inf, |u2|_inf, eps).
inline double cfl_timestep(const SolverState& state, const SolverConfig& cfg) {
    const double umax = std::max({state.u.x_component.max_abs(), state.u.y_component.max_abs(),
                                  1e-12});
    return cfg.cfl * state.omega.grid().spacing() / umax;
}

// One classical RK4 advance; velocity cache rebuilt from the new vorticity.
inline SolverState step(const SolverState& state, double dt, const SolverConfig& cfg) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
    if (dt > cfl_timestep(state, cfg) * (1.0 + 1e-9))
        throw std::invalid_argument("step: dt violates the CFL bound cfl*h/|u|_inf");
    if (cfg.freeze) {
        SolverState out = state;
        out.t += dt;
        return out;
    }
    const SpectralField w = forward_transform(state.omega);
    const SpectralField k1 = detail::advection_rhs_hat(w, cfg.dealias);
    SpectralField s2 = w;
    s2.axpy(0.5 * dt, k1);
    const SpectralField k2 = detail::advection_rhs_hat(s2, cfg.dealias);
    SpectralField s3 = w;
    s3.axpy(0.5 * dt, k2);
    const SpectralField k3 = detail::advection_rhs_hat(s3, cfg.dealias);
    SpectralField s4 = w;
    s4.axpy(dt, k3);
    const SpectralField k4 = detail::advection_rhs_hat(s4, cfg.dealias);
    SpectralField out = w;
    out.axpy(dt / 6.0, k1);
    out.axpy(dt / 3.0, k2);
    out.axpy(dt / 3.0, k3);
    out.axpy(dt / 6.0, k4);
    return detail::make_state(state.t + dt, out);
}

struct LedgerRow {
    double t;
    double l1;
    double l2;
    double linf;
    double mean;    // grid average of omega; the integral is mean * L^2
    double energy;  // ||u||_{L2}
    double holder;  // [omega]_alpha, NaN when disabled
};

struct ConservationLedger {
    std::vector<LedgerRow> rows;
};

namespace detail {

// State at t = 0 with the spectral truncation the configured solver applies.
inline SolverState initial_state(const RealField& omega0, const SolverConfig& cfg) {
    require_finite(omega0, "initial_state");
    SpectralField w = forward_transform(omega0);
    if (cfg.dealias) w = dealias(w);
    return make_state(0.0, w);
}

inline LedgerRow ledger_row(const SolverState& s, const SolverConfig& cfg) {
    if (!s.omega.all_finite())
        throw NumericalError("evolve: non-finite vorticity", s.t);
    LedgerRow row;
    row.t = s.t;
    row.l1 = lp_norm(s.omega, Lp::L1);
    row.l2 = lp_norm(s.omega, Lp::L2);
    row.linf = lp_norm(s.omega, Lp::Linf);
    row.mean = mean_value(s.omega);
    row.energy = l2_norm(s.u);
    row.holder = cfg.holder_alpha > 0.0
                     ? holder_seminorm(s.omega, HolderExponent(cfg.holder_alpha))
                     : std::nan("");
    return row;
}

}  // namespace detail

// Observer hooked into evolve; fn is called with the state at t = 0, after
// every `every`-th step, and at t_end.
struct FrameSink {
    std::size_t every = 0;
    std::function<void(const SolverState&)> fn;
};

// Advance omega0 to t_end with CFL-adaptive steps (last one clipped to land
// exactly on t_end), sampling conserved quantities along the way.
inline std::pair<SolverState, ConservationLedger> evolve(const RealField& omega0,
                                                         const SolverConfig& cfg,
                                                         const FrameSink& sink = {}) {
    cfg.validate();
    SolverState state = detail::initial_state(omega0, cfg);

    ConservationLedger ledger;
    ledger.rows.push_back(detail::ledger_row(state, cfg));
    if (sink.fn && sink.every > 0) sink.fn(state);

    std::size_t step_count = 0;
    while (state.t < cfg.t_end) {
        const double dt_max = cfl_timestep(state, cfg);
        const double remaining = cfg.t_end - state.t;
        const bool last = remaining <= dt_max * (1.0 + 1e-12);
        const double dt = last ? remaining : dt_max;
        state = step(state, dt, cfg);
        if (last) state.t = cfg.t_end;
        ++step_count;
        const bool sample = last || step_count % cfg.conservation_check_every == 0;
        if (sample) ledger.rows.push_back(detail::ledger_row(state, cfg));
        if (sink.fn && sink.every > 0 && (last || step_count % sink.every == 0)) sink.fn(state);
    }
    return {std::move(state), std::move(ledger)};
}

// Pointwise Frobenius norm of grad u, maximized over the grid.  Dominates the
// operator norm, so it is an admissible (conservative) Lipschitz constant.
inline double max_velocity_gradient(const SolverState& state) {
    const SpectralField ux = forward_transform(state.u.x_component);
    const SpectralField uy = forward_transform(state.u.y_component);
    const RealField dxux = inverse_transform(spectral_derivative(ux, Axis::x));
    const RealField dyux = inverse_transform(spectral_derivative(ux, Axis::y));
    const RealField dxuy = inverse_transform(spectral_derivative(uy, Axis::x));
    const RealField dyuy = inverse_transform(spectral_derivative(uy, Axis::y));
    double best = 0.0;
    const auto a = dxux.values(), b = dyux.values(), c = dxuy.values(), d = dyuy.values();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double frob2 = a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k];
        best = std::max(best, frob2);
    }
    return std::sqrt(best);
}

}  // namespace eulerlab

#endif
