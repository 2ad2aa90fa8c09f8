// spectral_field.hpp — real periodic functions on the unit circle T = R/Z,
// stored as the Hermitian half-spectrum.
//
// Conventions:
//   f(x) = sum_{n=-N/2+1}^{N/2} fhat_n e^{2 pi i n x},   x_j = j/N.
//
// Storage is fhat_n for n = 0..N/2; negative modes are implied by
// fhat_{-n} = conj(fhat_n). The Nyquist bin n = N/2 is interpreted as the
// real cosine c * cos(pi N x) (the two aliased modes +-N/2 folded together),
// so reconstructed grid values are exactly real. derivative/antiderivative
// annihilate the Nyquist bin; every band-limited field the solvers produce
// (the 2/3 dealias rule keeps |n| <= N/3) never populates it.

#pragma once

#include "mhs/fft.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhs {

struct SizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Nonlinearity exponent p of u^p dx u and the dealiasing toggle.
struct ModelParams {
    int p = 1;
    bool dealias = true;
};

inline void validate(const ModelParams& mp) {
    if (mp.p < 1) throw std::invalid_argument("ModelParams: p must be a positive integer");
}

class SpectralField {
public:
    explicit SpectralField(int n_modes) : n_(check_size(n_modes)), c_(std::size_t(n_modes / 2 + 1), cplx{0.0, 0.0}) {}

    static SpectralField zero(int n_modes) { return SpectralField(n_modes); }

    static SpectralField constant(int n_modes, double value) {
        SpectralField f(n_modes);
        f.c_[0] = cplx{value, 0.0};
        return f;
    }

    /// Build from N real samples on the uniform grid x_j = j/N.
    static SpectralField from_grid(std::span<const double> values) {
        const int n = check_size(int(values.size()));
        std::vector<cplx> full(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) full[j] = cplx{values[j], 0.0};
        fft_inplace(full, -1);
        SpectralField f(n);
        const double inv_n = 1.0 / double(n);
        for (int k = 0; k <= n / 2; ++k) f.c_[std::size_t(k)] = full[std::size_t(k)] * inv_n;
        // real input: bins 0 and N/2 are real up to rounding
        f.c_[0] = cplx{f.c_[0].real(), 0.0};
        f.c_[std::size_t(n / 2)] = cplx{f.c_[std::size_t(n / 2)].real(), 0.0};
        return f;
    }

    /// Build from half-spectrum coefficients for n = 0..N/2.
    static SpectralField from_coeffs(int n_modes, std::vector<cplx> half) {
        check_size(n_modes);
        if (int(half.size()) != n_modes / 2 + 1)
            throw SizeError("SpectralField: expected N/2+1 coefficients");
        SpectralField f(n_modes);
        f.c_ = std::move(half);
        f.c_[0] = cplx{f.c_[0].real(), 0.0};
        f.c_.back() = cplx{f.c_.back().real(), 0.0};
        return f;
    }

    int n_modes() const { return n_; }
    int max_mode() const { return n_ / 2; }

    const std::vector<cplx>& coeffs() const { return c_; }

    /// Coefficient for signed wavenumber n (Hermitian symmetry for n < 0).
    cplx coeff(int n) const {
        const int a = std::abs(n);
        if (a > n_ / 2) return cplx{0.0, 0.0};
        return n >= 0 ? c_[std::size_t(a)] : std::conj(c_[std::size_t(a)]);
    }

    void set_coeff(int n, cplx v) {
        if (n < 0 || n > n_ / 2) throw SizeError("SpectralField::set_coeff: mode out of range");
        if (n == 0 || n == n_ / 2) v = cplx{v.real(), 0.0};
        c_[std::size_t(n)] = v;
    }

    double mean() const { return c_[0].real(); }

    bool is_zero() const {
        for (const cplx& z : c_)
            if (z != cplx{0.0, 0.0}) return false;
        return true;
    }

    bool all_finite() const {
        for (const cplx& z : c_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    /// Grid samples f(x_j), j = 0..N-1, via inverse FFT.
    std::vector<double> grid() const {
        std::vector<cplx> full(std::size_t(n_), cplx{0.0, 0.0});
        full[0] = c_[0];
        for (int k = 1; k < n_ / 2; ++k) {
            full[std::size_t(k)] = c_[std::size_t(k)];
            full[std::size_t(n_ - k)] = std::conj(c_[std::size_t(k)]);
        }
        full[std::size_t(n_ / 2)] = c_[std::size_t(n_ / 2)];
        fft_inplace(full, +1);
        std::vector<double> out(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) out[std::size_t(j)] = full[std::size_t(j)].real();
        return out;
    }

    /// Trigonometric-interpolant value at an arbitrary point (O(N) sum).
    double eval(double x) const {
        double acc = c_[0].real();
        for (int k = 1; k < n_ / 2; ++k) {
            const double ang = two_pi * double(k) * x;
            acc += 2.0 * (c_[std::size_t(k)].real() * std::cos(ang) - c_[std::size_t(k)].imag() * std::sin(ang));
        }
        acc += c_[std::size_t(n_ / 2)].real() * std::cos(pi * double(n_) * x);
        return acc;
    }

    double sup_norm() const {
        double m = 0.0;
        for (double v : grid()) m = std::max(m, std::abs(v));
        return m;
    }

    SpectralField& operator+=(const SpectralField& o) {
        require_same(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        require_same(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (cplx& z : c_) z *= a;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }
    friend SpectralField operator*(SpectralField f, double a) { return f *= a; }

    void require_same(const SpectralField& o) const {
        if (o.n_ != n_) throw SizeError("SpectralField: mismatched n_modes");
    }

private:
    static int check_size(int n) {
        if (n < 2 || n % 2 != 0 || !is_pow2(std::size_t(n)))
            throw SizeError("SpectralField: n_modes must be an even power of two, got " + std::to_string(n));
        return n;
    }

    int n_;
    std::vector<cplx> c_;
};

/// Highest mode kept by the 2/3 rule.
inline int dealias_cutoff(int n_modes) { return n_modes / 3; }

/// Zero every mode with |n| > N/3 (and the Nyquist bin).
inline SpectralField dealias(SpectralField f) {
    const int cut = dealias_cutoff(f.n_modes());
    for (int k = cut + 1; k <= f.max_mode(); ++k) f.set_coeff(k, cplx{0.0, 0.0});
    return f;
}

/// Spectral derivative: mode n -> 2 pi i n. Result has zero mean.
inline SpectralField derivative(const SpectralField& f) {
    SpectralField g(f.n_modes());
    for (int k = 1; k < f.max_mode(); ++k)
        g.set_coeff(k, cplx{0.0, two_pi * double(k)} * f.coeff(k));
    return g;
}

/// Mean-projected antiderivative: the zero-mean primitive of f - mean(f).
/// Coefficient rule ghat_n = fhat_n / (2 pi i n) for n != 0, ghat_0 = 0,
/// so derivative(antiderivative(f)) = f - mean(f) exactly in coefficients.
inline SpectralField antiderivative(const SpectralField& f) {
    SpectralField g(f.n_modes());
    for (int k = 1; k < f.max_mode(); ++k)
        g.set_coeff(k, f.coeff(k) / cplx{0.0, two_pi * double(k)});
    return g;
}

/// Pointwise grid product, with the 2/3 rule applied before and after
/// when dealias is set.
inline SpectralField multiply(const SpectralField& f, const SpectralField& g, bool do_dealias = true) {
    f.require_same(g);
    std::vector<double> gf = do_dealias ? dealias(f).grid() : f.grid();
    const std::vector<double> gg = do_dealias ? dealias(g).grid() : g.grid();
    for (std::size_t j = 0; j < gf.size(); ++j) gf[j] *= gg[j];
    SpectralField out = SpectralField::from_grid(gf);
    return do_dealias ? dealias(out) : out;
}

/// f^p by repeated multiplication; power(f, 1) is f itself.
inline SpectralField power(const SpectralField& f, int p, bool do_dealias = true) {
    if (p < 1) throw std::invalid_argument("power: exponent must be >= 1 (use an explicit constant)");
    SpectralField out = f;
    for (int i = 1; i < p; ++i) out = multiply(out, f, do_dealias);
    return out;
}

} // namespace mhs
