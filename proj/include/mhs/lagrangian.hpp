// lagrangian.hpp — the flow-map ODE on the diffeomorphism group:
//
//   d/dt gamma = zeta^p,
//   d/dt zeta  = F(gamma, zeta) = (p/2) * dxinv( zeta^{p-1} (dx zeta)^2 / dx gamma ),
//
// with zeta = u o gamma. The right side is evaluated composition-free via
// the conjugation identity and the chain rule (dx)_gamma h = dx h / dx gamma:
// no inversion or interpolation inside the time loop. Composition and
// inversion appear only in reconstruction (u = zeta o gamma^{-1}) and in
// cross-checks.

#pragma once

#include "mhs/diffeo.hpp"
#include "mhs/eulerian.hpp"

#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace mhs {

inline constexpr double kGammaFloor = 1e-3;     // run-terminal breakdown floor
inline constexpr double kGammaHardFloor = 1e-6; // division guard for stage evaluations

struct LagrangianState {
    Diffeo gamma;
    SpectralField zeta;
    double t = 0.0;
    ModelParams params{};

    LagrangianState(Diffeo g, SpectralField z, double t_, ModelParams mp)
        : gamma(std::move(g)), zeta(std::move(z)), t(t_), params(mp) {
        gamma.displacement().require_same(zeta);
        validate(mp);
    }

    static LagrangianState initial(const SpectralField& u0, ModelParams mp) {
        return LagrangianState(Diffeo::identity(u0.n_modes()), u0, 0.0, mp);
    }
};

namespace detail {

// RK4 stages may step slightly past the terminal floor before the run is
// declared broken; only refuse when the division itself is unsafe.
inline void require_above_floor(const Diffeo& g) {
    if (!(g.min_slope() > kGammaHardFloor))
        throw BreakdownError("lagrangian: min dx gamma = " + std::to_string(g.min_slope()) +
                             " at/below the breakdown floor");
}

// from_grid(numer / slope), optionally dealiased.
inline SpectralField divide_by_slope(const SpectralField& numer, const Diffeo& g, bool do_dealias) {
    std::vector<double> grid = numer.grid();
    const std::vector<double>& slope = g.slope_grid();
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] /= slope[j];
    SpectralField out = SpectralField::from_grid(grid);
    return do_dealias ? dealias(out) : out;
}

// zeta^{p-1} * g with the p = 1 case short-circuited (zeta^0 = 1).
inline SpectralField times_zeta_pm1(const SpectralField& zeta, const SpectralField& g, int p, bool do_dealias) {
    if (p == 1) return g;
    return multiply(power(zeta, p - 1, do_dealias), g, do_dealias);
}

// The conjugated mean-projected antiderivative, composition-free:
//   [dxinv(h o gamma^{-1})] o gamma
//     = A(h gamma') - mean(h gamma') (d - mean d) - integral(A(h gamma') d') ,
// where A is the plain mean-projected antiderivative and d the displacement.
// The two trailing terms are the gauge part the projection picks up under
// conjugation (A and the conjugation do not commute); dropping them loses
// the equivalence with the Eulerian gauge at O(|d|).
inline SpectralField conjugated_projected_antiderivative(const SpectralField& h_times_slope, const Diffeo& g) {
    const SpectralField H = antiderivative(h_times_slope);
    if (g.is_identity()) return H;
    const double wbar = h_times_slope.mean();

    SpectralField disp_centered = g.displacement();
    disp_centered.set_coeff(0, cplx{0.0, 0.0});

    const std::vector<double> Hg = H.grid();
    const std::vector<double>& slope = g.slope_grid();
    double c_tilde = 0.0; // integral of H d' = integral of H (gamma' - 1)
    for (std::size_t j = 0; j < Hg.size(); ++j) c_tilde += Hg[j] * (slope[j] - 1.0);
    c_tilde /= double(Hg.size());

    SpectralField out = H - wbar * disp_centered;
    out.set_coeff(0, cplx{out.mean() - c_tilde, 0.0});
    return out;
}

} // namespace detail

/// F(gamma, zeta), composition-free. Reduces to the nonlocal term of the
/// Eulerian right side, bit-identically, when gamma is the identity.
inline SpectralField lagrangian_F(const LagrangianState& st) {
    detail::require_above_floor(st.gamma);
    const bool da = st.params.dealias;
    const SpectralField dz = derivative(st.zeta);
    const SpectralField q = detail::times_zeta_pm1(st.zeta, multiply(dz, dz, da), st.params.p, da);
    if (st.gamma.is_identity()) return (0.5 * double(st.params.p)) * antiderivative(q);
    const SpectralField h = detail::divide_by_slope(q, st.gamma, da);
    return (0.5 * double(st.params.p)) * detail::conjugated_projected_antiderivative(h, st.gamma);
}

struct LagrangianRhs {
    SpectralField d_displacement; // = zeta^p (nonzero mean is fine; the displacement absorbs it)
    SpectralField d_zeta;
};

inline LagrangianRhs rhs_lagrangian(const LagrangianState& st) {
    return {power(st.zeta, st.params.p, st.params.dealias), lagrangian_F(st)};
}

/// Directional derivative of F in gamma. Principal term
///   -1/2 dxinv( dx(zeta^p) dx zeta dx W / (dx gamma)^2 )
/// run through the conjugated antiderivative, plus the variation of the
/// conjugation's own gauge part in the direction W. The optional constant
/// term 1/2 * integral of W (dx)_g zeta^p (dx)_g zeta belongs to the
/// unprojected antiderivative convention and is off by default.
inline SpectralField dF_dgamma(const LagrangianState& st, const SpectralField& W,
                               bool include_mean_term = false) {
    detail::require_above_floor(st.gamma);
    st.zeta.require_same(W);
    const bool da = st.params.dealias;
    const int p = st.params.p;
    const SpectralField dz = derivative(st.zeta);
    const SpectralField dzp = derivative(power(st.zeta, p, da));
    const SpectralField dW = derivative(W);

    const SpectralField core = multiply(multiply(dzp, dz, da), dW, da); // p q W'
    const SpectralField quot = detail::divide_by_slope(detail::divide_by_slope(core, st.gamma, da), st.gamma, da);
    SpectralField out = -0.5 * detail::conjugated_projected_antiderivative(quot, st.gamma);

    // gauge-part variation: -(p/2) [ wbar (W - mean W) + integral(H W') ]
    const SpectralField q = detail::times_zeta_pm1(st.zeta, multiply(dz, dz, da), p, da);
    const SpectralField h = detail::divide_by_slope(q, st.gamma, da);
    const double wbar = h.mean();
    const SpectralField H = antiderivative(h);
    const std::vector<double> Hg = H.grid();
    const std::vector<double> dWg = dW.grid();
    double h_w = 0.0;
    for (std::size_t j = 0; j < Hg.size(); ++j) h_w += Hg[j] * dWg[j];
    h_w /= double(Hg.size());

    SpectralField w_centered = W;
    w_centered.set_coeff(0, cplx{0.0, 0.0});
    out -= (0.5 * double(p)) * (wbar * w_centered);
    out.set_coeff(0, cplx{out.mean() - 0.5 * double(p) * h_w, 0.0});

    if (include_mean_term) {
        const std::vector<double> wg = W.grid();
        const std::vector<double> num = multiply(dzp, dz, da).grid();
        const std::vector<double>& slope = st.gamma.slope_grid();
        double acc = 0.0;
        for (std::size_t j = 0; j < wg.size(); ++j) acc += wg[j] * num[j] / (slope[j] * slope[j]);
        out.set_coeff(0, cplx{out.mean() + 0.5 * acc / double(wg.size()), 0.0});
    }
    return out;
}

/// Directional derivative of F in zeta:
///   1/2 [dxinv]_gamma( ( p dx(zeta^{p-1} W) dx zeta + dx(zeta^p) dx W ) / dx gamma ),
/// with the same conjugated antiderivative as F itself (the conjugated
/// operator is linear in its integrand, so no extra terms appear).
inline SpectralField dF_dzeta(const LagrangianState& st, const SpectralField& W) {
    detail::require_above_floor(st.gamma);
    st.zeta.require_same(W);
    const bool da = st.params.dealias;
    const int p = st.params.p;
    const SpectralField t1 = multiply(derivative(detail::times_zeta_pm1(st.zeta, W, p, da)), derivative(st.zeta), da);
    const SpectralField t2 = multiply(derivative(power(st.zeta, p, da)), derivative(W), da);
    const SpectralField sum = double(p) * t1 + t2;
    if (st.gamma.is_identity()) return 0.5 * antiderivative(sum);
    return 0.5 * detail::conjugated_projected_antiderivative(detail::divide_by_slope(sum, st.gamma, da), st.gamma);
}

/// u = zeta o gamma^{-1}.
inline SpectralField reconstruct_u(const LagrangianState& st) {
    return compose(st.zeta, invert(st.gamma));
}

struct LagrangianIntegrateOptions {
    int record_every = 10;
    DiagnosticsOptions diag{};
    bool reconstruct_diagnostics = true;        // radius/scale columns via u = zeta o gamma^{-1}
    std::vector<double> slope_thresholds = {1e-2, 1e-3}; // first-crossing times to monitor
    std::function<void(const LagrangianState&)> on_record; // state snapshot hook
};

struct LagrangianRun {
    LagrangianState state;
    double dt;
    std::vector<RunRecord> history;
    BreakdownCode breakdown = BreakdownCode::None;
    std::map<double, double> slope_crossings; // threshold -> interpolated first-crossing time

    LagrangianRun(LagrangianState st, double dt_) : state(std::move(st)), dt(dt_) {
        if (!(dt > 0.0)) throw std::invalid_argument("LagrangianRun: dt must be positive");
    }

    static LagrangianRun from_initial(const SpectralField& u0, ModelParams mp, double dt_) {
        return LagrangianRun(LagrangianState::initial(u0, mp), dt_);
    }
};

namespace detail {

struct DzPair {
    SpectralField d, z;
    friend DzPair operator+(DzPair a, const DzPair& b) {
        a.d += b.d;
        a.z += b.z;
        return a;
    }
    friend DzPair operator*(double s, DzPair p) {
        p.d *= s;
        p.z *= s;
        return p;
    }
};

inline DzPair lagrangian_rhs_pair(const DzPair& y, double t, const ModelParams& mp) {
    LagrangianState st(Diffeo(y.d), y.z, t, mp);
    LagrangianRhs r = rhs_lagrangian(st);
    return {std::move(r.d_displacement), std::move(r.d_zeta)};
}

inline RunRecord make_lagrangian_record(const LagrangianState& st, double dt_used,
                                        const LagrangianIntegrateOptions& opt) {
    RunRecord r;
    r.t = st.t;
    r.dt_used = dt_used;
    r.min_gamma_x = st.gamma.min_slope();
    // u-diagnostics through the change of variables: mean(u) = int zeta gamma',
    // int u_x^2 = int zeta'^2 / gamma', sup u = sup zeta, u_x o gamma = zeta'/gamma'.
    const std::vector<double> zg = st.zeta.grid();
    const std::vector<double> dzg = derivative(st.zeta).grid();
    const std::vector<double>& slope = st.gamma.slope_grid();
    double mean_u = 0.0, energy = 0.0, sup_u = 0.0, sup_ux = 0.0;
    for (std::size_t j = 0; j < zg.size(); ++j) {
        mean_u += zg[j] * slope[j];
        energy += dzg[j] * dzg[j] / slope[j];
        sup_u = std::max(sup_u, std::abs(zg[j]));
        sup_ux = std::max(sup_ux, std::abs(dzg[j] / slope[j]));
    }
    r.mean_u = mean_u / double(zg.size());
    r.energy = energy / double(zg.size());
    r.sup_u = sup_u;
    r.sup_abs_ux = sup_ux;
    r.radius_est = std::numeric_limits<double>::quiet_NaN();
    r.scale_norm = std::numeric_limits<double>::quiet_NaN();
    if (opt.reconstruct_diagnostics && (opt.diag.with_radius || opt.diag.with_scale_norm)) {
        const SpectralField u = reconstruct_u(st);
        if (opt.diag.with_radius) {
            try {
                r.radius_est = fit_radius(u);
            } catch (const InsufficientDataError&) {
            }
        }
        if (opt.diag.with_scale_norm) {
            SpectralField v = u;
            v.set_coeff(0, cplx{0.0, 0.0});
            r.scale_norm = scale_norm(v, opt.diag.scale).value;
        }
    }
    return r;
}

} // namespace detail

/// RK4 on the coupled (displacement, zeta) system. Terminal breakdown
/// when min dx gamma reaches the floor; threshold first-crossing times
/// are interpolated between steps.
inline LagrangianRun& integrate_lagrangian(LagrangianRun& run, double t_end,
                                           const LagrangianIntegrateOptions& opt = {}) {
    if (opt.record_every < 1) throw std::invalid_argument("integrate_lagrangian: record_every must be >= 1");
    if (run.history.empty()) {
        run.history.push_back(detail::make_lagrangian_record(run.state, run.dt, opt));
        if (opt.on_record) opt.on_record(run.state);
    }

    const ModelParams mp = run.state.params;
    detail::DzPair y{run.state.gamma.displacement(), run.state.zeta};
    double prev_min_slope = run.state.gamma.min_slope();
    long step_index = 0;

    while (run.state.t < t_end - 1e-15) {
        const double dt_step = std::min(run.dt, t_end - run.state.t);
        const double t = run.state.t;
        detail::DzPair next{SpectralField(y.d.n_modes()), SpectralField(y.d.n_modes())};
        try {
            const detail::DzPair k1 = detail::lagrangian_rhs_pair(y, t, mp);
            const detail::DzPair k2 = detail::lagrangian_rhs_pair(y + (0.5 * dt_step) * k1, t + 0.5 * dt_step, mp);
            const detail::DzPair k3 = detail::lagrangian_rhs_pair(y + (0.5 * dt_step) * k2, t + 0.5 * dt_step, mp);
            const detail::DzPair k4 = detail::lagrangian_rhs_pair(y + dt_step * k3, t + dt_step, mp);
            next = y + (dt_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const BreakdownError&) {
            run.breakdown = BreakdownCode::GammaCollapse;
            break;
        }
        y = std::move(next);
        run.state = LagrangianState(Diffeo(y.d), y.z, t + dt_step, mp);
        ++step_index;

        if (!y.d.all_finite() || !y.z.all_finite()) {
            run.breakdown = BreakdownCode::NonFinite;
            break;
        }
        const double ms = run.state.gamma.min_slope();
        for (double thr : opt.slope_thresholds) {
            if (prev_min_slope > thr && ms <= thr && !run.slope_crossings.count(thr)) {
                const double frac = (prev_min_slope - thr) / (prev_min_slope - ms);
                run.slope_crossings[thr] = run.state.t - dt_step + frac * dt_step;
            }
        }
        prev_min_slope = ms;
        if (ms <= kGammaFloor) {
            run.breakdown = BreakdownCode::GammaCollapse;
            break;
        }
        if (step_index % opt.record_every == 0 || run.state.t >= t_end - 1e-15) {
            run.history.push_back(detail::make_lagrangian_record(run.state, dt_step, opt));
            if (opt.on_record) opt.on_record(run.state);
        }
    }
    if (run.breakdown != BreakdownCode::None) {
        LagrangianIntegrateOptions no_rec = opt;
        no_rec.reconstruct_diagnostics = false; // gamma may be at/below the floor here
        run.history.push_back(detail::make_lagrangian_record(run.state, run.dt, no_rec));
        if (opt.on_record) opt.on_record(run.state);
    }
    return run;
}

} // namespace mhs
