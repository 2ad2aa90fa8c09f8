// scale_norms.hpp — Sobolev norms, the truncated analytic-scale norms
//   |||u|||_s = sup_k ||dx^k u||_{H^sigma} * s^k (k+1)^2 / k!,
// the operators P1 = -dx, P2 = mean-projected antiderivative with their
// bound checks, and analyticity-radius estimation from Fourier decay.
//
// The scale parameter s lives in (0,1); the inner Sobolev index sigma is
// independent (default 2) so small s never forces a sub-3/2 inner norm.
// Scale norms are computed in log space: k-th derivative coefficients grow
// like (2 pi n)^k and would overflow the plain evaluation long before
// s^k/k! pulls the term back down.

#pragma once

#include "mhs/spectral_field.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mhs {

struct ScaleParams {
    double s = 0.1;    // scale parameter, 0 < s < 1
    double sigma = 2.0; // inner Sobolev index
    int k_max = 30;    // truncation of the sup over k
};

inline void validate(const ScaleParams& sp) {
    if (!(sp.s > 0.0 && sp.s < 1.0)) throw std::invalid_argument("ScaleParams: s must lie in (0,1)");
    if (sp.sigma < 0.0) throw std::invalid_argument("ScaleParams: sigma must be >= 0");
    if (sp.k_max < 1) throw std::invalid_argument("ScaleParams: k_max must be >= 1");
}

struct NormReport {
    double value = 0.0;
    int argmax_k = 0;
    bool truncation_ok = true;
};

/// ( sum_n (1 + (2 pi n)^2)^s |fhat_n|^2 )^{1/2} over all signed modes.
inline double sobolev_norm(const SpectralField& f, double s) {
    if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    const int half = f.max_mode();
    double acc = f.mean() * f.mean();
    for (int n = 1; n < half; ++n) {
        const double w = std::pow(1.0 + two_pi * double(n) * two_pi * double(n), s);
        acc += 2.0 * w * std::norm(f.coeff(n));
    }
    // Nyquist bin stands for the +-N/2 pair, each carrying half the amplitude.
    acc += 0.5 * std::pow(1.0 + pi * double(f.n_modes()) * pi * double(f.n_modes()), s) *
           std::norm(f.coeff(half));
    return std::sqrt(acc);
}

namespace detail {

// log of ||dx^k f||_{H^sigma}, or -inf for the zero field.
inline double log_derivative_sobolev_norm(const SpectralField& f, int k, double sigma) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double max_log = neg_inf;
    std::vector<double> logs;
    logs.reserve(std::size_t(f.max_mode()));
    for (int n = 1; n < f.max_mode(); ++n) {
        const double a2 = std::norm(f.coeff(n));
        if (a2 == 0.0) continue;
        const double w = two_pi * double(n);
        const double lg = std::log(2.0 * a2) + 2.0 * double(k) * std::log(w) + sigma * std::log1p(w * w);
        logs.push_back(lg);
        max_log = std::max(max_log, lg);
    }
    if (k == 0) {
        const double a2 = f.mean() * f.mean();
        if (a2 > 0.0) {
            const double lg = std::log(a2);
            logs.push_back(lg);
            max_log = std::max(max_log, lg);
        }
    }
    if (logs.empty()) return neg_inf;
    double acc = 0.0;
    for (double lg : logs) acc += std::exp(lg - max_log);
    return 0.5 * (max_log + std::log(acc));
}

} // namespace detail

/// Truncated scale norm with the per-k decay certificate. Requires a
/// zero-mean field (the scale spaces contain only those).
inline NormReport scale_norm(const SpectralField& f, const ScaleParams& sp) {
    validate(sp);
    if (std::abs(f.mean()) > 1e-12)
        throw std::invalid_argument("scale_norm: field must have zero mean (got " + std::to_string(f.mean()) + ")");

    const double log_s = std::log(sp.s);
    NormReport rep;
    std::vector<double> terms(std::size_t(sp.k_max) + 1, 0.0);
    double best_log = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= sp.k_max; ++k) {
        const double ln = detail::log_derivative_sobolev_norm(f, k, sp.sigma);
        const double lt = ln + double(k) * log_s + 2.0 * std::log1p(double(k)) - std::lgamma(double(k) + 1.0);
        terms[std::size_t(k)] = std::exp(lt);
        if (lt > best_log) {
            best_log = lt;
            rep.argmax_k = k;
        }
    }
    rep.value = std::isfinite(best_log) ? std::exp(best_log) : 0.0;
    rep.truncation_ok = true;
    if (rep.value > 0.0) {
        for (int k = std::max(0, sp.k_max - 2); k <= sp.k_max; ++k)
            if (!(terms[std::size_t(k)] < 1e-6 * rep.value)) rep.truncation_ok = false;
    }
    return rep;
}

/// P1(u) = -dx u.
inline SpectralField op_p1(const SpectralField& f) { return -1.0 * derivative(f); }

/// P2(u) = mean-projected antiderivative.
inline SpectralField op_p2(const SpectralField& f) { return antiderivative(f); }

struct LemmaViolation {
    std::string lemma;  // "P1" or "P2"
    int corpus_index = -1;
    double lhs = 0.0;
    double bound = 0.0;
};

struct LemmaCheckReport {
    bool all_pass = true;
    double max_p1_ratio = 0.0;      // |||P1 u|||_{s'} * (s - s') / |||u|||_s
    double max_p2_ratio = 0.0;      // |||P2 u|||_s / |||u|||_s
    double algebra_constant = 0.0;  // max over pairs of |||uv|||_s / (|||u|||_s |||v|||_s)
    int algebra_argmax_i = -1;
    int algebra_argmax_j = -1;
    std::vector<LemmaViolation> violations;
};

/// Verify ||| P1 u |||_{s'} <= |||u|||_s / (s - s') and
/// ||| P2 u |||_s <= |||u|||_s on every corpus element (1e-9 relative
/// slack), and report the empirical algebra constant over all pairs.
inline LemmaCheckReport check_lemma_bounds(std::span<const SpectralField> corpus, double s, double s_prime,
                                           const ScaleParams& base) {
    if (!(0.0 < s_prime && s_prime < s && s < 1.0))
        throw std::invalid_argument("check_lemma_bounds: need 0 < s' < s < 1");
    ScaleParams at_s = base;
    at_s.s = s;
    ScaleParams at_sp = base;
    at_sp.s = s_prime;

    constexpr double slack = 1e-9;
    LemmaCheckReport rep;
    std::vector<double> norm_s(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const SpectralField& u = corpus[i];
        norm_s[i] = scale_norm(u, at_s).value;
        const double p1 = scale_norm(op_p1(u), at_sp).value;
        const double p2 = scale_norm(op_p2(u), at_s).value;
        const double p1_bound = norm_s[i] / (s - s_prime);
        if (p1 > p1_bound * (1.0 + slack)) {
            rep.all_pass = false;
            rep.violations.push_back({"P1", int(i), p1, p1_bound});
        }
        if (p2 > norm_s[i] * (1.0 + slack) + slack) {
            rep.all_pass = false;
            rep.violations.push_back({"P2", int(i), p2, norm_s[i]});
        }
        if (norm_s[i] > 0.0) {
            rep.max_p1_ratio = std::max(rep.max_p1_ratio, p1 / p1_bound);
            rep.max_p2_ratio = std::max(rep.max_p2_ratio, p2 / norm_s[i]);
        }
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t j = i; j < corpus.size(); ++j) {
            if (norm_s[i] == 0.0 || norm_s[j] == 0.0) continue;
            SpectralField uv = multiply(corpus[i], corpus[j]);
            uv.set_coeff(0, cplx{0.0, 0.0}); // products leave the zero-mean space through their mean
            const double r = scale_norm(uv, at_s).value / (norm_s[i] * norm_s[j]);
            if (r > rep.algebra_constant) {
                rep.algebra_constant = r;
                rep.algebra_argmax_i = int(i);
                rep.algebra_argmax_j = int(j);
            }
        }
    }
    return rep;
}

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares analyticity radius from Fourier decay: fits log|fhat_n|
/// against n over the decaying window and returns rho with
/// |fhat_n| ~ C e^{-2 pi rho n}. Band-limited fields (tail dead before
/// the window can hold 8 modes) get the +inf sentinel.
inline double fit_radius(const SpectralField& f) {
    constexpr double floor = 1e-14;
    const int half = f.max_mode();
    double max_a = 0.0;
    int last_above = 0;
    for (int n = 1; n <= half; ++n) {
        const double a = std::abs(f.coeff(n));
        if (a > max_a) max_a = a;
        if (a > floor) last_above = n;
    }
    if (max_a <= floor) return std::numeric_limits<double>::infinity(); // (numerically) constant

    int n_start = 1;
    while (n_start <= half && std::abs(f.coeff(n_start)) >= 0.1 * max_a) ++n_start;

    std::vector<double> xs, ys;
    for (int n = n_start; n <= last_above; ++n) {
        const double a = std::abs(f.coeff(n));
        if (a > floor) {
            xs.push_back(double(n));
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() < 8) {
        if (last_above < half) return std::numeric_limits<double>::infinity(); // spectrum dies early: band-limited
        throw InsufficientDataError("fit_radius: fewer than 8 usable modes in the decay window");
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double m = double(xs.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (slope >= 0.0) return 0.0; // no decay
    return -slope / two_pi;
}

} // namespace mhs
