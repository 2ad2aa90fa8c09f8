// breaking.hpp — wave-breaking prediction and measurement.
//
// For p = 1 in the mean-conserving gauge the material slope v = dx u obeys
// the Riccati equation Dv/Dt = -(v^2 + K)/2 with K = int (dx u0)^2 conserved,
// so along the characteristic starting with slope v0:
//
//   v(t) = sqrt(K) tan(theta0 - sqrt(K) t / 2),  theta0 = atan(v0 / sqrt(K)),
//   dx gamma(t) = [cos(theta0 - sqrt(K) t / 2) / cos(theta0)]^2,
//
// giving the exact breaking time T* = (2/sqrt(K)) (pi/2 + atan(v0*/sqrt(K)))
// at v0* = min dx u0, and closed-form first-crossing times for any slope
// threshold. For p >= 2 there is no closed form; breaking is detected by
// integrating the flow-map system and watching min dx gamma.

#pragma once

#include "mhs/eulerian.hpp"
#include "mhs/lagrangian.hpp"

#include <cmath>
#include <optional>

namespace mhs {

/// Exact p = 1 breaking time, or nullopt for (numerically) constant data.
inline std::optional<double> riccati_breaking_time(const SpectralField& u0) {
    const double K = slope_energy(u0);
    if (K < 1e-28) return std::nullopt;
    const double rk = std::sqrt(K);
    double v0 = std::numeric_limits<double>::infinity();
    for (double v : derivative(u0).grid()) v0 = std::min(v0, v);
    return (2.0 / rk) * (0.5 * pi + std::atan(v0 / rk));
}

/// Exact p = 1 time at which min_x dx gamma first reaches tau in (0,1).
inline std::optional<double> riccati_slope_crossing_time(const SpectralField& u0, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("riccati_slope_crossing_time: tau in (0,1)");
    const double K = slope_energy(u0);
    if (K < 1e-28) return std::nullopt;
    const double rk = std::sqrt(K);
    const double c = 0.5 * rk;
    double best = std::numeric_limits<double>::infinity();
    for (double v : derivative(u0).grid()) {
        const double theta0 = std::atan(v / rk);
        const double t = (theta0 + std::acos(std::sqrt(tau) * std::cos(theta0))) / c;
        best = std::min(best, t);
    }
    return best;
}

/// Breaking-time prediction: the Riccati closed form for p = 1; for
/// p >= 2, numerical characteristics (the flow-map system) watched until
/// min dx gamma crosses the 1e-3 floor, or nullopt when nothing breaks
/// before the horizon.
inline std::optional<double> predict_breaking_time(const SpectralField& u0, const ModelParams& mp,
                                                   double horizon = 1.0, double dt = 2e-4) {
    validate(mp);
    if (mp.p == 1) return riccati_breaking_time(u0);

    LagrangianRun run = LagrangianRun::from_initial(u0, mp, dt);
    LagrangianIntegrateOptions opt;
    opt.record_every = 1000000; // monitoring only
    opt.reconstruct_diagnostics = false;
    opt.diag.with_radius = false;
    opt.diag.with_scale_norm = false;
    opt.slope_thresholds = {kGammaFloor};
    integrate_lagrangian(run, horizon, opt);
    auto it = run.slope_crossings.find(kGammaFloor);
    if (it != run.slope_crossings.end()) return it->second;
    return std::nullopt;
}

/// Extrapolated numerical breaking time from a run history: least-squares
/// line through (t, 1/sup|dx u|) on the window sup_lo <= sup|dx u| <= sup_hi,
/// extrapolated to zero. Needs at least four window records.
inline std::optional<double> fit_breaking_time(const std::vector<RunRecord>& history, double sup_lo,
                                               double sup_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const RunRecord& r : history) {
        if (!(r.sup_abs_ux >= sup_lo && r.sup_abs_ux <= sup_hi)) continue;
        const double y = 1.0 / r.sup_abs_ux;
        sx += r.t;
        sy += y;
        sxx += r.t * r.t;
        sxy += r.t * y;
        ++m;
    }
    if (m < 4) return std::nullopt;
    const double denom = double(m) * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    const double slope = (double(m) * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / double(m);
    if (!(slope < 0.0)) return std::nullopt;
    return -intercept / slope;
}

} // namespace mhs
