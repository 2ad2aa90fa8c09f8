// diffeo.hpp — orientation-preserving circle diffeomorphisms
// gamma(x) = x + d(x) with periodic displacement d, plus composition,
// inversion and the conjugated antiderivative.
//
// min_x gamma'(x) is cached on construction; a non-positive value is the
// wave-breaking signal and the operations that require a diffeomorphism
// refuse to run on such a state.

#pragma once

#include "mhs/spectral_field.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace mhs {

class Diffeo {
public:
    explicit Diffeo(SpectralField displacement)
        : d_(std::move(displacement)),
          gamma_grid_(d_.n_modes()),
          slope_grid_(derivative(d_).grid()) {
        const std::vector<double> dg = d_.grid();
        const int n = d_.n_modes();
        min_slope_ = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            gamma_grid_[std::size_t(j)] = double(j) / double(n) + dg[std::size_t(j)];
            slope_grid_[std::size_t(j)] += 1.0;
            min_slope_ = std::min(min_slope_, slope_grid_[std::size_t(j)]);
        }
    }

    static Diffeo identity(int n_modes) { return Diffeo(SpectralField::zero(n_modes)); }

    int n_modes() const { return d_.n_modes(); }
    const SpectralField& displacement() const { return d_; }
    bool is_identity() const { return d_.is_zero(); }

    /// Grid samples of gamma (not reduced mod 1; gamma(x+1) = gamma(x)+1).
    const std::vector<double>& gamma_grid() const { return gamma_grid_; }
    /// Grid samples of dx gamma = 1 + d'.
    const std::vector<double>& slope_grid() const { return slope_grid_; }
    double min_slope() const { return min_slope_; }

    /// dx gamma as a field (1 + d').
    SpectralField slope_field() const {
        SpectralField s = derivative(d_);
        s.set_coeff(0, cplx{s.mean() + 1.0, 0.0});
        return s;
    }

    double eval(double x) const { return x + d_.eval(x); }
    double eval_slope(double x) const { return 1.0 + dd().eval(x); }

    void require_diffeomorphism() const {
        if (!(min_slope_ > 0.0))
            throw BreakdownError("gamma is not orientation-preserving: min dx gamma = " + std::to_string(min_slope_));
    }

private:
    const SpectralField& dd() const {
        if (!dprime_) dprime_ = derivative(d_);
        return *dprime_;
    }

    SpectralField d_;
    std::vector<double> gamma_grid_;
    std::vector<double> slope_grid_;
    double min_slope_ = 0.0;
    mutable std::optional<SpectralField> dprime_;
};

/// f comes back unchanged under the identity map; otherwise sample the
/// trigonometric interpolant of f at the off-grid points gamma(x_j).
inline SpectralField compose(const SpectralField& f, const Diffeo& gamma) {
    f.require_same(gamma.displacement());
    gamma.require_diffeomorphism();
    if (gamma.is_identity()) return f;
    const std::vector<double>& y = gamma.gamma_grid();
    std::vector<double> out(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) out[j] = f.eval(y[j]);
    return SpectralField::from_grid(out);
}

/// Inverse diffeomorphism, computed per grid point by a safeguarded
/// Newton/bisection hybrid on the monotone equation gamma(y) = x_j.
inline Diffeo invert(const Diffeo& gamma) {
    gamma.require_diffeomorphism();
    const int n = gamma.n_modes();
    if (gamma.is_identity()) return Diffeo::identity(n);

    const SpectralField& d = gamma.displacement();
    double dmax = -std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (double v : d.grid()) {
        dmax = std::max(dmax, v);
        dmin = std::min(dmin, v);
    }
    // d is band-limited but its extrema may fall between grid nodes; pad the
    // bracket a little so the root is always enclosed.
    const double pad = 0.5 * (dmax - dmin) / double(n) + 1e-12;
    dmax += pad;
    dmin -= pad;

    constexpr double tol = 1e-12;
    std::vector<double> inv_disp(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double x = double(j) / double(n);
        double lo = x - dmax;
        double hi = x - dmin;
        double y = x - d.eval(x); // first Newton-ish guess
        y = std::clamp(y, lo, hi);
        double r = gamma.eval(y) - x;
        for (int it = 0; it < 100; ++it) {
            if (std::abs(r) <= tol) break;
            if (r > 0.0) hi = y; else lo = y;
            const double slope = gamma.eval_slope(y);
            double ynew = (slope > 1e-14) ? y - r / slope : 0.5 * (lo + hi);
            if (!(ynew > lo && ynew < hi)) ynew = 0.5 * (lo + hi);
            y = ynew;
            r = gamma.eval(y) - x;
        }
        if (std::abs(r) > 1e-8)
            throw BreakdownError("invert: root finding failed; gamma may not be monotone");
        inv_disp[std::size_t(j)] = y - x;
    }
    return Diffeo(SpectralField::from_grid(inv_disp));
}

/// The antiderivative conjugated by gamma, in the closed form
/// antiderivative(f * dx gamma). Reduces bit-identically to
/// antiderivative(f) when gamma is the identity.
inline SpectralField conjugated_antiderivative(const SpectralField& f, const Diffeo& gamma, bool do_dealias = true) {
    f.require_same(gamma.displacement());
    gamma.require_diffeomorphism();
    if (gamma.is_identity()) return antiderivative(f);
    return antiderivative(multiply(f, gamma.slope_field(), do_dealias));
}

} // namespace mhs
