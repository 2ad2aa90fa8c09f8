#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mhs/corpus.hpp"
#include "mhs/spectral_field.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace mhs;
using mhs::test::coeff_diff;
using mhs::test::field_from;
using mhs::test::sup_diff;

namespace {

// Centered finite-difference derivative on the grid: the independent
// oracle used to cross-check the spectral derivative.
std::vector<double> centered_fd(const std::vector<double>& g) {
    const std::size_t n = g.size();
    const double h = 1.0 / double(n);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = (g[(j + 1) % n] - g[(j + n - 1) % n]) / (2.0 * h);
    return out;
}

// Cumulative-trapezoid primitive of (f - mean f), minus its own mean: the
// quadrature oracle for the mean-projected antiderivative.
std::vector<double> trapezoid_primitive(const std::vector<double>& g) {
    const std::size_t n = g.size();
    const double h = 1.0 / double(n);
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= double(n);
    std::vector<double> prim(n, 0.0);
    for (std::size_t j = 1; j < n; ++j)
        prim[j] = prim[j - 1] + 0.5 * h * ((g[j - 1] - mean) + (g[j] - mean));
    double pmean = 0.0;
    for (double v : prim) pmean += v;
    pmean /= double(n);
    for (double& v : prim) v -= pmean;
    return prim;
}

double fd_error_vs_spectral(int n) {
    const SpectralField f = field_from(n, [](double x) { return std::cos(4.0 * pi * x); });
    const std::vector<double> fd = centered_fd(f.grid());
    const std::vector<double> sp = derivative(f).grid();
    double err = 0.0;
    for (std::size_t j = 0; j < fd.size(); ++j) err = std::max(err, std::abs(fd[j] - sp[j]));
    return err;
}

double quad_error_vs_spectral(int n) {
    const SpectralField f = field_from(n, [](double x) { return 1.0 + std::cos(4.0 * pi * x); });
    const std::vector<double> quad = trapezoid_primitive(f.grid());
    const std::vector<double> sp = antiderivative(f).grid();
    double err = 0.0;
    for (std::size_t j = 0; j < quad.size(); ++j) err = std::max(err, std::abs(quad[j] - sp[j]));
    return err;
}

} // namespace

TEST_CASE("grid -> coefficients -> grid round trip is the identity") {
    Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const SpectralField f = random_trig_poly(rng, 64, 16, 2.0, false);
        const SpectralField g = SpectralField::from_grid(f.grid());
        CHECK(coeff_diff(f, g) < 1e-12 * (1.0 + f.sup_norm()));
    }
}

TEST_CASE("reconstructed grid values are real and reproducible") {
    const SpectralField f = field_from(128, [](double x) { return 0.3 + std::sin(two_pi * x) + 0.2 * std::cos(6 * pi * x); });
    const std::vector<double> g1 = f.grid();
    const std::vector<double> g2 = f.grid();
    CHECK(g1 == g2); // deterministic
    for (int j = 0; j < 128; ++j) {
        const double x = j / 128.0;
        CHECK(std::abs(g1[std::size_t(j)] - (0.3 + std::sin(two_pi * x) + 0.2 * std::cos(6 * pi * x))) < 1e-12);
    }
}

TEST_CASE("derivative: elementary cases") {
    const int n = 64;
    const SpectralField s = field_from(n, [](double x) { return std::sin(two_pi * x); });
    const SpectralField expect = field_from(n, [](double x) { return two_pi * std::cos(two_pi * x); });
    CHECK(sup_diff(derivative(s), expect) < 1e-11);

    CHECK(derivative(SpectralField::constant(n, 1.0)).sup_norm() == 0.0);
}

TEST_CASE("derivative agrees with the centered-difference oracle at second order") {
    const SpectralField f = field_from(64, [](double x) { return std::cos(4.0 * pi * x); });
    const SpectralField expect = field_from(64, [](double x) { return -4.0 * pi * std::sin(4.0 * pi * x); });
    CHECK(sup_diff(derivative(f), expect) < 1e-11);

    const double e1 = fd_error_vs_spectral(64);
    const double e2 = fd_error_vs_spectral(128);
    CHECK(e1 / e2 > 3.5); // the oracle converges to the spectral derivative at O(h^2)
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("antiderivative: elementary cases and the quadrature oracle") {
    const int n = 64;
    const SpectralField c = field_from(n, [](double x) { return std::cos(two_pi * x); });
    const SpectralField expect = field_from(n, [](double x) { return std::sin(two_pi * x) / two_pi; });
    CHECK(sup_diff(antiderivative(c), expect) < 1e-13);

    CHECK(antiderivative(SpectralField::constant(n, 5.0)).sup_norm() == 0.0);

    const SpectralField f = field_from(n, [](double x) { return 1.0 + std::cos(4.0 * pi * x); });
    const SpectralField expect2 = field_from(n, [](double x) { return std::sin(4.0 * pi * x) / (4.0 * pi); });
    CHECK(sup_diff(antiderivative(f), expect2) < 1e-13);

    const double e1 = quad_error_vs_spectral(64);
    const double e2 = quad_error_vs_spectral(128);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("multiply: absorbing zero, product-to-sum, cubed sine") {
    const int n = 64;
    const SpectralField s = field_from(n, [](double x) { return std::sin(two_pi * x); });
    const SpectralField c = field_from(n, [](double x) { return std::cos(two_pi * x); });

    CHECK(multiply(s, SpectralField::zero(n)).sup_norm() == 0.0);

    const SpectralField sc = multiply(s, c);
    const SpectralField half_sin4 = field_from(n, [](double x) { return 0.5 * std::sin(4.0 * pi * x); });
    CHECK(sup_diff(sc, half_sin4) < 1e-13);

    // (sin 2 pi x)^3 = 3/4 sin(2 pi x) - 1/4 sin(6 pi x)
    const SpectralField s3 = power(s, 3);
    CHECK(std::abs(s3.coeff(1) - cplx{0.0, -0.375}) < 1e-14);
    CHECK(std::abs(s3.coeff(3) - cplx{0.0, 0.125}) < 1e-14);
    CHECK(std::abs(s3.coeff(2)) < 1e-14);
    CHECK(std::abs(s3.coeff(5)) < 1e-14);

    CHECK_THROWS_AS(multiply(s, SpectralField::zero(128)), SizeError);
}

TEST_CASE("power: identity, constants, half-angle") {
    const int n = 64;
    const SpectralField s = field_from(n, [](double x) { return std::sin(two_pi * x); });
    const SpectralField p1 = power(s, 1);
    CHECK(coeff_diff(p1, s) == 0.0); // p = 1 is the field itself

    const SpectralField c3 = power(SpectralField::constant(n, 1.5), 3);
    CHECK(std::abs(c3.mean() - 3.375) < 1e-14);

    const SpectralField s2 = power(s, 2);
    const SpectralField expect = field_from(n, [](double x) { return 0.5 - 0.5 * std::cos(4.0 * pi * x); });
    CHECK(sup_diff(s2, expect) < 1e-14);

    CHECK_THROWS(power(s, 0));
}

TEST_CASE("derivative/antiderivative invert each other up to the mean, exactly in coefficients") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const SpectralField f = random_trig_poly(rng, 128, 40, 3.0, false);
        SpectralField centered = f;
        centered.set_coeff(0, cplx{0.0, 0.0});

        CHECK(coeff_diff(derivative(antiderivative(f)), centered) < 1e-14);
        CHECK(coeff_diff(antiderivative(derivative(f)), centered) < 1e-14);
        CHECK(antiderivative(f).mean() == 0.0);
    }
}

TEST_CASE("dealiased product is exact for band-limited inputs") {
    Rng rng(13);
    const int n = 128; // cutoff 42
    for (int rep = 0; rep < 10; ++rep) {
        const SpectralField f = random_trig_poly(rng, n, 14, 1.0, false);
        const SpectralField g = random_trig_poly(rng, n, 14, 1.0, false);
        // degree <= 28 < 42: the dealiased product keeps every true mode
        const SpectralField exact = multiply(f, g, false);
        const SpectralField cut = multiply(f, g, true);
        CHECK(coeff_diff(exact, cut) < 1e-13);
    }
}

TEST_CASE("operations commute with the grid round trip") {
    Rng rng(17);
    const SpectralField f = random_trig_poly(rng, 128, 20, 1.0, false);
    const SpectralField f2 = SpectralField::from_grid(f.grid());
    CHECK(coeff_diff(derivative(f), derivative(f2)) < 1e-12);
    CHECK(coeff_diff(antiderivative(f), antiderivative(f2)) < 1e-12);
}

TEST_CASE("trig interpolant eval matches closed forms off-grid") {
    const SpectralField f = field_from(64, [](double x) { return 0.2 + std::sin(two_pi * x) - 0.7 * std::cos(8.0 * pi * x); });
    for (double x : {0.013, 0.39, 0.5001, 0.77, 0.999}) {
        const double expect = 0.2 + std::sin(two_pi * x) - 0.7 * std::cos(8.0 * pi * x);
        CHECK(std::abs(f.eval(x) - expect) < 1e-12);
    }
}
