// corpus.hpp — seeded deterministic generators for test corpora.
//
// SplitMix64 underneath: bit-identical streams on every platform, unlike
// the standard-library distributions.

#pragma once

#include "mhs/diffeo.hpp"
#include "mhs/spectral_field.hpp"

#include <cstdint>

namespace mhs {

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Random trig polynomial of degree <= max_degree with amplitudes in
/// [-amplitude, amplitude], mildly damped in the harmonic.
inline SpectralField random_trig_poly(Rng& rng, int n_modes, int max_degree, double amplitude,
                                      bool zero_mean = true) {
    SpectralField f(n_modes);
    if (!zero_mean) f.set_coeff(0, cplx{rng.uniform(-amplitude, amplitude), 0.0});
    for (int k = 1; k <= max_degree; ++k) {
        const double damp = 1.0 / (1.0 + 0.25 * double(k) * double(k));
        const double ac = rng.uniform(-amplitude, amplitude) * damp; // cos k
        const double as = rng.uniform(-amplitude, amplitude) * damp; // sin k
        f.set_coeff(k, cplx{0.5 * ac, -0.5 * as});
    }
    return f;
}

/// Random circle diffeomorphism with min dx gamma >= min_slope, obtained by
/// scaling a random displacement down until the slope bound holds.
inline Diffeo random_diffeo(Rng& rng, int n_modes, int max_degree, double min_slope) {
    if (!(min_slope > 0.0 && min_slope < 1.0))
        throw std::invalid_argument("random_diffeo: min_slope must lie in (0,1)");
    SpectralField d = random_trig_poly(rng, n_modes, max_degree, 1.0, true);
    double worst = 0.0; // max of -d'
    for (double v : derivative(d).grid()) worst = std::max(worst, -v);
    if (worst > 0.0) {
        const double target = 0.999 * (1.0 - min_slope); // strictly inside the bound
        if (worst > target) d *= target / worst;
    }
    return Diffeo(d);
}

} // namespace mhs
