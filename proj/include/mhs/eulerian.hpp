// eulerian.hpp — direct pseudospectral integrator for the nonlocal form
//
//   dt u + u^p dx u = (p/2) * dxinv( u^{p-1} (dx u)^2 ),
//
// in the mean-conserving gauge (dxinv is the mean-projected
// antiderivative, and the right side is projected to zero mean, so
// d/dt mean(u) = 0 exactly). Classical RK4 with an advective CFL guard,
// per-step breakdown monitoring, and per-record diagnostics.

#pragma once

#include "mhs/scale_norms.hpp"
#include "mhs/spectral_field.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace mhs {

enum class BreakdownCode {
    None = 0,
    SlopeOverflow,   // sup |dx u| exceeded the hard limit
    NonFinite,       // a coefficient went inf/nan
    ResolutionLost,  // slope energy piled up against the dealias cutoff
    GammaCollapse,   // Lagrangian only: min dx gamma at the floor
};

inline const char* to_string(BreakdownCode c) {
    switch (c) {
        case BreakdownCode::None: return "none";
        case BreakdownCode::SlopeOverflow: return "slope_overflow";
        case BreakdownCode::NonFinite: return "non_finite";
        case BreakdownCode::ResolutionLost: return "resolution_lost";
        case BreakdownCode::GammaCollapse: return "gamma_collapse";
    }
    return "unknown";
}

struct CflError : std::runtime_error {
    CflError(double dt_, double suggested_)
        : std::runtime_error("CFL violation: dt = " + std::to_string(dt_) +
                             " exceeds the stability bound; use dt <= " + std::to_string(suggested_)),
          suggested_dt(suggested_) {}
    double suggested_dt;
};

/// Per-step diagnostics row. min_gamma_x is NaN on Eulerian runs.
struct RunRecord {
    double t = 0.0;
    double mean_u = 0.0;
    double energy = 0.0; // integral of (dx u)^2
    double sup_u = 0.0;
    double sup_abs_ux = 0.0;
    double radius_est = 0.0;
    double scale_norm = 0.0;
    double dt_used = 0.0;
    double min_gamma_x = std::numeric_limits<double>::quiet_NaN();
};

/// integral over T of (dx u)^2, via Parseval.
inline double slope_energy(const SpectralField& u) {
    double acc = 0.0;
    for (int n = 1; n < u.max_mode(); ++n) {
        const double w = two_pi * double(n);
        acc += 2.0 * w * w * std::norm(u.coeff(n));
    }
    return acc;
}

/// Right side of the nonlocal form; both summands are mean-free and the
/// zero mode is pinned to zero so the gauge holds exactly.
inline SpectralField rhs_euler(const SpectralField& u, const ModelParams& mp) {
    validate(mp);
    const SpectralField du = derivative(u);
    const SpectralField transport = multiply(power(u, mp.p, mp.dealias), du, mp.dealias);
    const SpectralField du2 = multiply(du, du, mp.dealias);
    const SpectralField q = (mp.p == 1) ? du2 : multiply(power(u, mp.p - 1, mp.dealias), du2, mp.dealias);
    SpectralField out = (0.5 * double(mp.p)) * antiderivative(q) - transport;
    out.set_coeff(0, cplx{0.0, 0.0});
    return out;
}

/// Advective CFL heuristic: dt <= 0.5 / max(1, sup|u|^p * 2 pi N).
inline double cfl_dt_bound(const SpectralField& u, const ModelParams& mp) {
    const double speed = std::pow(u.sup_norm(), double(mp.p));
    return 0.5 / std::max(1.0, speed * two_pi * double(u.n_modes()));
}

struct DiagnosticsOptions {
    ScaleParams scale{};
    bool with_radius = true;
    bool with_scale_norm = true;
};

struct IntegrateOptions {
    int record_every = 10;
    DiagnosticsOptions diag{};
    bool enforce_cfl = true;
    double slope_limit = 1e6;        // hard stop on sup |dx u|
    bool resolution_guard = true;    // stop when the slope spectrum hits the cutoff
    double tail_fraction_limit = 1e-3;
    bool adaptive = false;           // step-doubling error control
    double adaptive_tol = 1e-10;
    std::function<void(const SpectralField&, double)> on_record; // state snapshot hook
};

struct EulerianRun {
    SpectralField u;
    double t = 0.0;
    ModelParams params{};
    double dt = 1e-4;
    std::vector<RunRecord> history;
    BreakdownCode breakdown = BreakdownCode::None;

    EulerianRun(SpectralField u0, ModelParams mp, double dt_)
        : u(std::move(u0)), params(mp), dt(dt_) {
        if (!(dt > 0.0)) throw std::invalid_argument("EulerianRun: dt must be positive");
        validate(mp);
    }
};

namespace detail {

inline SpectralField rk4_step_field(const SpectralField& u, double dt, const ModelParams& mp) {
    const SpectralField k1 = rhs_euler(u, mp);
    const SpectralField k2 = rhs_euler(u + (0.5 * dt) * k1, mp);
    const SpectralField k3 = rhs_euler(u + (0.5 * dt) * k2, mp);
    const SpectralField k4 = rhs_euler(u + dt * k3, mp);
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fraction of slope energy carried by the top third of the kept band.
inline double slope_tail_fraction(const SpectralField& u) {
    const int cut = dealias_cutoff(u.n_modes());
    const int tail_lo = cut - cut / 3;
    double total = 0.0, tail = 0.0;
    for (int n = 1; n <= cut; ++n) {
        const double w = two_pi * double(n);
        const double e = w * w * std::norm(u.coeff(n));
        total += e;
        if (n > tail_lo) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

inline RunRecord make_record(const SpectralField& u, double t, double dt_used, const DiagnosticsOptions& d) {
    RunRecord r;
    r.t = t;
    r.mean_u = u.mean();
    r.energy = slope_energy(u);
    r.sup_u = u.sup_norm();
    r.sup_abs_ux = derivative(u).sup_norm();
    r.dt_used = dt_used;
    r.radius_est = std::numeric_limits<double>::quiet_NaN();
    r.scale_norm = std::numeric_limits<double>::quiet_NaN();
    if (d.with_radius) {
        try {
            r.radius_est = fit_radius(u);
        } catch (const InsufficientDataError&) {
        }
    }
    if (d.with_scale_norm) {
        SpectralField v = u;
        v.set_coeff(0, cplx{0.0, 0.0});
        r.scale_norm = scale_norm(v, d.scale).value;
    }
    return r;
}

} // namespace detail

/// One classical RK4 step; throws CflError when dt violates the bound.
inline void step_rk4(EulerianRun& run, bool enforce_cfl = true) {
    if (enforce_cfl) {
        const double bound = cfl_dt_bound(run.u, run.params);
        if (run.dt > bound) throw CflError(run.dt, bound);
    }
    run.u = detail::rk4_step_field(run.u, run.dt, run.params);
    run.t += run.dt;
}

/// Integrate to t_end, recording diagnostics every record_every steps.
/// Breakdown leaves the partial history in place and sets the code.
inline EulerianRun& integrate(EulerianRun& run, double t_end, const IntegrateOptions& opt = {}) {
    if (opt.record_every < 1) throw std::invalid_argument("integrate: record_every must be >= 1");
    if (run.history.empty()) {
        run.history.push_back(detail::make_record(run.u, run.t, run.dt, opt.diag));
        if (opt.on_record) opt.on_record(run.u, run.t);
    }

    int guard_strikes = 0;
    long step_index = 0;
    double dt = run.dt;
    while (run.t < t_end - 1e-15) {
        double dt_step = std::min(dt, t_end - run.t);
        if (opt.enforce_cfl) {
            const double bound = cfl_dt_bound(run.u, run.params);
            if (dt_step > bound) throw CflError(dt_step, bound);
        }

        SpectralField next = detail::rk4_step_field(run.u, dt_step, run.params);
        if (opt.adaptive) {
            const SpectralField half1 = detail::rk4_step_field(run.u, 0.5 * dt_step, run.params);
            const SpectralField half2 = detail::rk4_step_field(half1, 0.5 * dt_step, run.params);
            const double err = (next - half2).sup_norm() / 15.0;
            if (err > opt.adaptive_tol && dt_step > 1e-9) {
                dt *= 0.5;
                continue;
            }
            next = half2;
            if (err < opt.adaptive_tol / 64.0) dt = std::min(2.0 * dt, run.dt * 16.0);
        }
        run.u = std::move(next);
        run.t += dt_step;
        ++step_index;

        if (!run.u.all_finite()) {
            run.breakdown = BreakdownCode::NonFinite;
            break;
        }
        const double sup_ux = derivative(run.u).sup_norm();
        if (sup_ux > opt.slope_limit) {
            run.breakdown = BreakdownCode::SlopeOverflow;
            break;
        }
        if (opt.resolution_guard) {
            guard_strikes = (detail::slope_tail_fraction(run.u) > opt.tail_fraction_limit) ? guard_strikes + 1 : 0;
            if (guard_strikes >= 2) {
                run.breakdown = BreakdownCode::ResolutionLost;
                break;
            }
        }
        if (step_index % opt.record_every == 0 || run.t >= t_end - 1e-15) {
            run.history.push_back(detail::make_record(run.u, run.t, dt_step, opt.diag));
            if (opt.on_record) opt.on_record(run.u, run.t);
        }
    }
    if (run.breakdown != BreakdownCode::None) {
        run.history.push_back(detail::make_record(run.u, run.t, dt, opt.diag));
        if (opt.on_record) opt.on_record(run.u, run.t);
    }
    return run;
}

} // namespace mhs
