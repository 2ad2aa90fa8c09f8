// taylor_series.hpp — time-Taylor coefficients for the first-order system
//
//   dt u1 = F1(u1,u2) = 1/(p+1) P1(u1^{p+1}) + (p/2) P2(u1^{p-1} u2^2),
//   dt u2 = F2(u1,u2) = P1(u1^p u2) + (p/2) u1^{p-1} u2^2,
//
// with u1 = u, u2 = dx u, P1 = -dx, P2 = mean-projected antiderivative.
// The recursion (j+1) a_{j+1} = [F]_j uses Cauchy products of the
// coefficient sequences; powers are built by iterated sequence convolution.
//
// Gauge bookkeeping: with the projected P2, dx F1 = F2 - (p/2) mean(u1^{p-1} u2^2)
// exactly when u2 = dx u1, so the u2 branch of the recursion drifts from
// dx u1 by pure constants. Products therefore consume the zero-mean series
// (identically dx of the u1 series) while the stored u2 coefficients keep
// their constant parts; consistency_defect reports exactly that gap. Feeding
// the constants back into the products would leak them into non-constant
// modes from order two on.

#pragma once

#include "mhs/scale_norms.hpp"
#include "mhs/spectral_field.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace mhs {

struct TaylorSeries {
    ModelParams params{};
    int order = 0;      // J: coefficients run j = 0..J
    double t0 = 0.0;
    std::vector<SpectralField> u1; // size J+1
    std::vector<SpectralField> u2; // size J+1
};

namespace taylor_detail {

/// Top harmonic of f, ignoring entries at relative rounding level.
inline int top_harmonic(const SpectralField& f) {
    double max_a = 0.0;
    for (int k = 1; k <= f.max_mode(); ++k) max_a = std::max(max_a, std::abs(f.coeff(k)));
    int top = 0;
    for (int k = 1; k <= f.max_mode(); ++k)
        if (std::abs(f.coeff(k)) > 1e-13 * max_a) top = k;
    return top;
}

/// Coefficient j of the series is a trig polynomial of degree at most
/// d0 (1 + j p); everything above that is FFT rounding debris, which the
/// quadratic terms would otherwise amplify at the cutoff advection rate
/// and poison the root test.
inline void clamp_degree(SpectralField& f, int degree_bound) {
    for (int k = degree_bound + 1; k <= f.max_mode(); ++k) f.set_coeff(k, cplx{0.0, 0.0});
}

} // namespace taylor_detail

/// Recursive Taylor coefficients of order J >= 1 about t0 = 0 from u0.
inline TaylorSeries taylor_coeffs(const SpectralField& u0, const ModelParams& mp, int order) {
    validate(mp);
    if (order < 1) throw std::invalid_argument("taylor_coeffs: order must be >= 1");
    const bool da = mp.dealias;
    const int p = mp.p;
    const int n = u0.n_modes();
    const int d0 = taylor_detail::top_harmonic(u0);

    std::vector<SpectralField> a;      // u1 coefficients
    std::vector<SpectralField> bt;     // zero-mean u2 series (= dx a_j), used in products
    std::vector<SpectralField> u2s;    // stored u2 coefficients (constants kept)
    std::vector<std::vector<SpectralField>> pow(std::size_t(p + 2)); // pow[q][m] = (u1^q)_m, q = 1..p+1
    std::vector<SpectralField> s2;     // (u2^2)_m
    std::vector<SpectralField> w;      // (u1^{p-1} u2^2)_m

    a.push_back(u0);
    bt.push_back(derivative(u0));
    u2s.push_back(bt[0]);

    auto conv_at = [&](const std::vector<SpectralField>& A, const std::vector<SpectralField>& B,
                       std::size_t m) {
        SpectralField acc(n);
        for (std::size_t i = 0; i <= m; ++i) acc += multiply(A[i], B[m - i], da);
        return acc;
    };

    for (int m = 0; m < order; ++m) {
        const std::size_t mm = std::size_t(m);
        pow[1].push_back(a[mm]);
        for (int q = 2; q <= p + 1; ++q) pow[std::size_t(q)].push_back(conv_at(pow[std::size_t(q - 1)], a, mm));
        s2.push_back(conv_at(bt, bt, mm));
        w.push_back(p == 1 ? s2[mm] : conv_at(pow[std::size_t(p - 1)], s2, mm));
        const SpectralField v_m = conv_at(pow[std::size_t(p)], bt, mm);

        const SpectralField f1 = (1.0 / double(p + 1)) * op_p1(pow[std::size_t(p + 1)][mm]) +
                                 (0.5 * double(p)) * op_p2(w[mm]);
        const SpectralField f2 = op_p1(v_m) + (0.5 * double(p)) * w[mm];

        const double inv = 1.0 / double(m + 1);
        const int bound = d0 * (1 + (m + 1) * p);
        a.push_back(inv * f1);
        taylor_detail::clamp_degree(a.back(), bound);
        bt.push_back(derivative(a.back()));
        u2s.push_back(inv * f2);
        taylor_detail::clamp_degree(u2s.back(), bound);
    }

    TaylorSeries ts;
    ts.params = mp;
    ts.order = order;
    ts.t0 = 0.0;
    ts.u1 = std::move(a);
    ts.u2 = std::move(u2s);
    return ts;
}

/// Horner evaluation of both coefficient sequences at time t.
inline std::pair<SpectralField, SpectralField> evaluate_series(const TaylorSeries& ts, double t) {
    const double dt = t - ts.t0;
    SpectralField u1 = ts.u1.back();
    SpectralField u2 = ts.u2.back();
    for (int j = ts.order - 1; j >= 0; --j) {
        u1 = ts.u1[std::size_t(j)] + dt * u1;
        u2 = ts.u2[std::size_t(j)] + dt * u2;
    }
    return {std::move(u1), std::move(u2)};
}

/// Root-test time-analyticity radius: least-squares fit of log ||a_j||_{H^sigma}
/// against j over j in [J/2, J]; +inf sentinel when the tail vanishes
/// (equilibrium series).
inline double time_radius(const TaylorSeries& ts, double sobolev_index = 2.0) {
    if (ts.order < 8) throw std::invalid_argument("time_radius: need order J >= 8");
    std::vector<double> xs, ys;
    for (int j = ts.order / 2; j <= ts.order; ++j) {
        const double q = sobolev_norm(ts.u1[std::size_t(j)], sobolev_index);
        if (q > 1e-300) {
            xs.push_back(double(j));
            ys.push_back(std::log(q));
        }
    }
    if (xs.size() < 2) return std::numeric_limits<double>::infinity();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double m = double(xs.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::exp(-slope);
}

/// Per-order sup-norm of the non-constant part of u2_j - dx u1_j. The
/// constant part is the mean-gauge artifact and is reported separately by
/// defect_constants.
inline std::vector<double> consistency_defect(const TaylorSeries& ts) {
    std::vector<double> out;
    out.reserve(ts.u1.size());
    for (std::size_t j = 0; j < ts.u1.size(); ++j) {
        SpectralField g = ts.u2[j] - derivative(ts.u1[j]);
        g.set_coeff(0, cplx{0.0, 0.0});
        out.push_back(g.sup_norm());
    }
    return out;
}

/// The constant (mean) part of u2_j - dx u1_j per order.
inline std::vector<double> defect_constants(const TaylorSeries& ts) {
    std::vector<double> out;
    out.reserve(ts.u1.size());
    for (std::size_t j = 0; j < ts.u1.size(); ++j) out.push_back((ts.u2[j] - derivative(ts.u1[j])).mean());
    return out;
}

/// One re-expansion step of length dt: build the series at u and evaluate.
inline SpectralField taylor_step(const SpectralField& u, const ModelParams& mp, int order, double dt) {
    return evaluate_series(taylor_coeffs(u, mp, order), dt).first;
}

} // namespace mhs
