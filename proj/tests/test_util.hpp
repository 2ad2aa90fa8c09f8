// Shared helpers for the test suites.

#pragma once

#include "mhs/spectral_field.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace mhs::test {

/// Sample a closed-form function onto the grid and transform.
inline SpectralField field_from(int n_modes, const std::function<double(double)>& f) {
    std::vector<double> g(static_cast<std::size_t>(n_modes));
    for (int j = 0; j < n_modes; ++j) g[std::size_t(j)] = f(double(j) / double(n_modes));
    return SpectralField::from_grid(g);
}

inline double sup_diff(const SpectralField& a, const SpectralField& b) { return (a - b).sup_norm(); }

/// Max coefficient-wise distance.
inline double coeff_diff(const SpectralField& a, const SpectralField& b) {
    a.require_same(b);
    double m = 0.0;
    for (int k = 0; k <= a.max_mode(); ++k) m = std::max(m, std::abs(a.coeff(k) - b.coeff(k)));
    return m;
}

} // namespace mhs::test
