#ifndef EULERLAB_STABILITY_HPP
#define EULERLAB_STABILITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dynamics.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "initial_data.hpp"
#include "norms.hpp"
#include "spectral.hpp"

namespace eulerlab {

// Tolerances of the per-time inequality checks, fixed once here.
namespace chain_tol {
inline constexpr double interpolation = 1e-10;  // (a) residual >= -tol * ||dw||_L2
inline constexpr double energy = 1e-6;          // (b) growth factor slack
inline constexpr double duality = 1e-10;        // (c) relative gap
inline constexpr double elliptic = 1e-12;       // (d) relative slack on L/(2pi)
inline constexpr double chain = 1e-9;           // combined bound slack
}  // namespace chain_tol

struct StabilityOptions {
    std::size_t samples_per_unit_time = 32;
};

namespace detail {

// Advance several states with one shared CFL-adaptive step, clipped so every
// member lands exactly on the common sample times k / samples_per_unit_time.
inline void evolve_lockstep(std::vector<SolverState>& states, const SolverConfig& cfg,
                            std::size_t samples_per_unit_time,
                            const std::function<void(const std::vector<SolverState>&)>& on_sample) {
    cfg.validate();
    if (states.empty()) return;
    if (samples_per_unit_time == 0)
        throw std::invalid_argument("evolve_lockstep: need at least one sample per unit time");
    on_sample(states);
    const double sample_dt = 1.0 / static_cast<double>(samples_per_unit_time);
    double t = 0.0;
    std::size_t sample_index = 0;
    while (t < cfg.t_end) {
        const double next_sample = std::min(
            cfg.t_end, static_cast<double>(sample_index + 1) * sample_dt);
        double dt_max = cfl_timestep(states.front(), cfg);
        for (std::size_t m = 1; m < states.size(); ++m)
            dt_max = std::min(dt_max, cfl_timestep(states[m], cfg));
        const double remaining = next_sample - t;
        const bool hits_sample = remaining <= dt_max * (1.0 + 1e-12);
        const double dt = hits_sample ? remaining : dt_max;
        for (SolverState& s : states) {
            s = step(s, dt, cfg);
            if (!s.omega.all_finite()) throw NumericalError("evolve_lockstep: non-finite vorticity", s.t);
        }
        t = hits_sample ? next_sample : t + dt;
        for (SolverState& s : states) s.t = t;
        if (hits_sample) {
            ++sample_index;
            on_sample(states);
        }
    }
}

}  // namespace detail

// One recorded time of a paired run; the proof-chain quantities of the
// Holder stability estimate, every side measured independently.
struct StabilityRow {
    double t;
    double dl1;        // ||dw||_L1   (observational)
    double dl2;        // ||dw||_L2
    double dlinf;      // ||dw||_Linf (observational)
    double dhm1;       // ||dw||_{H^-1}
    double dhbeta;     // ||dw||_{H^beta}
    double du_l2;      // ||du||_L2
    double residual_interpolation;  // rhs - lhs of the interpolation inequality
    double gap_duality;             // | ||dw||_{H^-1} - ||du||_L2 |
    double c_measured;              // sup_{s<=t} max Frobenius |grad u_i|
};

struct StabilityReport {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double gamma_theory = 0.0;       // beta / (1 + beta)
    double elliptic_constant = 0.0;  // L / (2 pi), the discrete proof4 constant
    double hbeta_growth = 0.0;       // log(sup_t ||dw||_{H^beta} / initial) / T
    bool interpolation_ok = true;    // (a) at every time
    bool energy_ok = true;           // (b)
    bool duality_ok = true;          // (c)
    bool elliptic_ok = true;         // (d), t = 0
    bool chain_ok = true;            // ||dw||_L2 <= ||du||^g ||dw||_Hb^{1-g}
    std::vector<StabilityRow> rows;

    bool all_checks_ok() const {
        return interpolation_ok && energy_ok && duality_ok && elliptic_ok && chain_ok;
    }
};

// Evolve a vorticity pair side by side and record the full inequality chain
// at the shared sample times.  A failed check flags the report; rows are
// always kept so a flagged run can be inspected.
inline StabilityReport run_pair(const RealField& w1, const RealField& w2, SobolevOrder beta,
                                const SolverConfig& cfg, const StabilityOptions& opts = {}) {
    if (!(beta.s > 0.0) || !(beta.s < 1.0))
        throw std::invalid_argument("run_pair: beta must lie in (0,1)");
    const Grid2D grid = w1.grid();

    StabilityReport report;
    report.beta = beta.s;
    report.gamma_theory = beta.s / (1.0 + beta.s);
    report.elliptic_constant = grid.box_length / two_pi;

    std::vector<SolverState> states;
    states.push_back(detail::initial_state(w1, cfg));
    states.push_back(detail::initial_state(w2, cfg));

    double c_running = 0.0;
    auto on_sample = [&](const std::vector<SolverState>& s) {
        const RealField dw = s[0].omega - s[1].omega;
        const VectorField du = s[0].u - s[1].u;
        const SpectralField dw_hat = forward_transform(dw);
        StabilityRow row;
        row.t = s[0].t;
        row.dl1 = lp_norm(dw, Lp::L1);
        row.dl2 = lp_norm(dw, Lp::L2);
        row.dlinf = lp_norm(dw, Lp::Linf);
        row.dhm1 = detail::hs_norm_from_spectrum(dw_hat, -1.0);
        row.dhbeta = detail::hs_norm_from_spectrum(dw_hat, beta.s);
        row.du_l2 = l2_norm(du);
        const double g = report.gamma_theory;
        row.residual_interpolation =
            std::pow(row.dhm1, g) * std::pow(row.dhbeta, 1.0 - g) - row.dl2;
        row.gap_duality = std::fabs(row.dhm1 - row.du_l2);
        c_running = std::max({c_running, max_velocity_gradient(s[0]), max_velocity_gradient(s[1])});
        row.c_measured = c_running;
        report.rows.push_back(row);
    };

    detail::evolve_lockstep(states, cfg, opts.samples_per_unit_time, on_sample);

    const StabilityRow& first = report.rows.front();
    for (const StabilityRow& row : report.rows) {
        if (row.residual_interpolation < -chain_tol::interpolation * row.dl2)
            report.interpolation_ok = false;
        if (row.du_l2 >
            std::exp(row.c_measured * row.t) * first.du_l2 * (1.0 + chain_tol::energy))
            report.energy_ok = false;
        if (row.gap_duality > chain_tol::duality * row.dhm1) report.duality_ok = false;
        const double g = report.gamma_theory;
        if (row.dl2 > std::pow(row.du_l2, g) * std::pow(row.dhbeta, 1.0 - g) *
                          (1.0 + chain_tol::chain))
            report.chain_ok = false;
    }
    if (first.du_l2 > report.elliptic_constant * first.dl2 * (1.0 + chain_tol::elliptic))
        report.elliptic_ok = false;

    double sup_hbeta = 0.0;
    for (const StabilityRow& row : report.rows) sup_hbeta = std::max(sup_hbeta, row.dhbeta);
    report.hbeta_growth = (first.dhbeta > 0.0 && cfg.t_end > 0.0)
                              ? std::log(sup_hbeta / first.dhbeta) / cfg.t_end
                              : 0.0;
    return report;
}

inline StabilityReport run_pair(const InitialDataSpec& spec, const PerturbationSpec& pert,
                                SobolevOrder beta, const Grid2D& grid, const SolverConfig& cfg,
                                const StabilityOptions& opts = {}) {
    if (spec.kind == DataKind::holder_patch_pair && !(beta.s < spec.alpha))
        throw std::invalid_argument("run_pair: beta must be below the data Holder exponent");
    StabilityReport report = run_pair(generate_initial_data(spec, grid),
                                      generate_pair_second(spec, pert, grid), beta, cfg, opts);
    report.alpha = spec.alpha;
    report.delta = pert.delta;
    return report;
}

struct RateFit {
    double gamma = 0.0;  // log-log slope
    double C = 0.0;      // exp(intercept)
    double r2 = 0.0;
};

// Least-squares line through (log delta, log error).
inline RateFit fit_rate(std::span<const double> deltas, std::span<const double> errors) {
    if (deltas.size() != errors.size())
        throw std::invalid_argument("fit_rate: mismatched series lengths");
    if (deltas.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    const std::size_t m = deltas.size();
    std::vector<double> lx(m), ly(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (!(deltas[k] > 0.0) || !(errors[k] > 0.0))
            throw std::invalid_argument("fit_rate: values must be strictly positive");
        lx[k] = std::log(deltas[k]);
        ly[k] = std::log(errors[k]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_rate: all deltas coincide");
    RateFit fit;
    fit.gamma = sxy / sxx;
    fit.C = std::exp(my - fit.gamma * mx);
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

enum class ApproximationKind { mollification, truncation };

// Gaussian low-pass of physical width w: multiply fhat(k) by e^{-|k w|^2/2}.
inline RealField gaussian_mollify(const RealField& f, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_mollify: width must be positive");
    const Grid2D& g = f.grid();
    SpectralField F = forward_transform(f);
    for (std::size_t a = 0; a < g.n; ++a) {
        const double kx = g.wavenumber(a);
        for (std::size_t b = 0; b < g.n; ++b) {
            const double ky = g.wavenumber(b);
            F(a, b) *= std::exp(-0.5 * (kx * kx + ky * ky) * width * width);
        }
    }
    return inverse_transform(F);
}

// Zero out samples below level * ||f||_Linf (the "amplitude tail").
inline RealField truncate_amplitude(const RealField& f, double level) {
    if (!(level >= 0.0)) throw std::invalid_argument("truncate_amplitude: level must be >= 0");
    const double cut = level * f.max_abs();
    RealField out = f;
    for (double& v : out.values())
        if (std::fabs(v) <= cut) v = 0.0;
    return out;
}

struct RefinementRow {
    double parameter;      // mollification width or truncation level
    double initial_error;  // ||w0_n - w0||_L2
    double sup_error;      // sup over sample times of ||w_n(t) - w(t)||_L2
};

struct RefinementReport {
    ApproximationKind kind = ApproximationKind::mollification;
    std::vector<RefinementRow> rows;
};

// Data-refinement experiment: evolve the target and a sequence of
// approximations side by side; record sup_t of the L2 gap per member.
inline RefinementReport theorem1_experiment(const InitialDataSpec& target, ApproximationKind kind,
                                            std::span<const double> parameters,
                                            const Grid2D& grid, const SolverConfig& cfg,
                                            const StabilityOptions& opts = {}) {
    if (parameters.empty())
        throw std::invalid_argument("theorem1_experiment: empty parameter list");
    const RealField w_bar = generate_initial_data(target, grid);
    std::vector<RealField> approx;
    approx.reserve(parameters.size());
    for (double p : parameters)
        approx.push_back(kind == ApproximationKind::mollification ? gaussian_mollify(w_bar, p)
                                                                  : truncate_amplitude(w_bar, p));
    RefinementReport report;
    report.kind = kind;
    for (std::size_t m = 0; m < approx.size(); ++m) {
        RefinementRow row;
        row.parameter = parameters[m];
        row.initial_error = lp_norm(approx[m] - w_bar, Lp::L2);
        row.sup_error = 0.0;
        report.rows.push_back(row);
    }
    // exact approximations (all-zero errors) are the admissible degenerate case
    const double floor = 1e-13 * lp_norm(w_bar, Lp::L2);
    bool all_exact = true;
    for (const RefinementRow& row : report.rows) all_exact &= row.initial_error <= floor;
    if (!all_exact)
        for (std::size_t m = 1; m < report.rows.size(); ++m)
            if (!(report.rows[m].initial_error < report.rows[m - 1].initial_error))
                throw std::invalid_argument(
                    "theorem1_experiment: initial L2 errors must be strictly decreasing");

    std::vector<SolverState> states;
    states.push_back(detail::initial_state(w_bar, cfg));
    for (const RealField& f : approx) states.push_back(detail::initial_state(f, cfg));

    auto on_sample = [&](const std::vector<SolverState>& s) {
        for (std::size_t m = 1; m < s.size(); ++m) {
            const double err = lp_norm(s[m].omega - s[0].omega, Lp::L2);
            report.rows[m - 1].sup_error = std::max(report.rows[m - 1].sup_error, err);
        }
    };
    detail::evolve_lockstep(states, cfg, opts.samples_per_unit_time, on_sample);
    return report;
}

// Periodization control: run the same data in boxes L and 2L at matched
// physical resolution and return the final-time L2 discrepancy over the
// smaller box footprint.
inline double box_doubling_check(const InitialDataSpec& spec, const Grid2D& grid,
                                 const SolverConfig& cfg) {
    validate_initial_data(spec, grid);
    const Grid2D big(grid.n * 2, grid.box_length * 2.0);
    InitialDataSpec shifted = spec;
    const double off = grid.box_length / 2.0;
    for (Blob& b : shifted.blobs) {
        b.cx += off;
        b.cy += off;
    }
    const auto [small_end, small_ledger] = evolve(generate_initial_data(spec, grid), cfg);
    const auto [big_end, big_ledger] = evolve(generate_initial_data(shifted, big), cfg);
    const std::size_t n = grid.n;
    const std::size_t shift = n / 2;  // off / h grid cells
    std::vector<double> sq(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = small_end.omega(i, j) - big_end.omega(i + shift, j + shift);
            sq[i * n + j] = d * d;
        }
    const double cell = grid.spacing() * grid.spacing();
    return std::sqrt(cell *
                     detail::pairwise_sum(0, sq.size(), [&](std::size_t k) { return sq[k]; }));
}

}  // namespace eulerlab

#endif
