#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/disk_extension.hpp"
#include "conf/energy.hpp"

using conf::AngleMap;
using conf::boundary_fourier;
using conf::cplx;
using conf::DiskField;
using conf::douglas_energy;
using conf::extension_energy;
using conf::FourierBoundary;
using conf::GridSpec;
using conf::poisson_field;
using conf::two_pi;

namespace {

std::vector<double> linspace01(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = static_cast<double>(i) / static_cast<double>(n);  // stays below 1
    return t;
}

}  // namespace

TEST_CASE("identity boundary has a single coefficient") {
    const auto fb = boundary_fourier(AngleMap::identity(), 64);
    CHECK(std::abs(fb.coeff(1) - cplx(1.0, 0.0)) <= 1e-12);
    for (long k = -64; k <= 64; ++k) {
        if (k == 1) continue;
        CHECK(std::abs(fb.coeff(k)) <= 1e-12);
    }
    CHECK(fb.parseval_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fb.tail_energy <= 1e-20);
}

TEST_CASE("moebius boundary matches the geometric-series closed form") {
    for (double rot : {0.0, 0.7}) {
        const cplx a{0.5, 0.0};
        const auto fb = boundary_fourier(AngleMap::moebius(a, rot), 128);
        for (long k = -16; k <= 128; ++k)
            CHECK(std::abs(fb.coeff(k) - conf::moebius_boundary_coeff(a, rot, k)) <= 1e-10);
        CHECK(std::abs(fb.coeff(0) - cplx(-0.5, 0.0) * std::polar(1.0, rot)) <= 1e-10);
        CHECK(std::abs(fb.coeff(3)) == doctest::Approx(0.75 * 0.25).epsilon(1e-9));
    }
    // complex parameter too
    const cplx a{0.3, -0.4};
    const auto fb = boundary_fourier(AngleMap::moebius(a, 1.2), 128);
    for (long k = 0; k <= 32; ++k)
        CHECK(std::abs(fb.coeff(k) - conf::moebius_boundary_coeff(a, 1.2, k)) <= 1e-10);
}

TEST_CASE("parseval holds for circle-valued boundary data") {
    for (const auto& m : {AngleMap::square(), AngleMap::pwl(0.1),
                          AngleMap::square().inverse(), AngleMap::sin_series({0.3})}) {
        const auto fb = boundary_fourier(m, 512);
        CHECK(fb.parseval_sum <= 1.0 + 1e-12);
        CHECK(fb.parseval_sum >= 1.0 - 1e-3);  // tail is small at M = 512
        CHECK(fb.tail_decaying);
        // the geometric tail estimate should roughly cover the missing energy
        CHECK(fb.parseval_sum + 10.0 * fb.tail_energy >= 1.0 - 1e-6);
    }
}

TEST_CASE("boundary_fourier validates its inputs") {
    CHECK_THROWS_AS(boundary_fourier(AngleMap::identity(), 8), std::invalid_argument);
}

TEST_CASE("douglas energy closed forms") {
    CHECK(douglas_energy(boundary_fourier(AngleMap::identity(), 64)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // sum m (1-a^2)^2 a^{2(m-1)} telescopes to 1 for every Moebius map
    for (double a : {0.1, 0.3, 0.5, 0.7}) {
        const double e = douglas_energy(boundary_fourier(AngleMap::moebius({a, 0.0}), 512));
        CHECK(e == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("douglas sum of the square map's inverse matches the double integral") {
    conf::QuadratureSpec q;
    q.n = 512;
    const auto direct = conf::conformal_energy(AngleMap::square(), q);
    const double e = extension_energy(AngleMap::square(), 512);
    CHECK(std::abs(e - direct.value) <= 1e-3 + direct.err);
}

TEST_CASE("extension energy examples") {
    CHECK(extension_energy(AngleMap::identity()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(extension_energy(AngleMap::moebius({0.5, 0.0}, 0.7)) ==
          doctest::Approx(1.0).epsilon(1e-6));
    conf::QuadratureSpec q;
    q.n = 1024;
    const auto direct = conf::conformal_energy(AngleMap::pwl(0.1), q);
    CHECK(std::abs(extension_energy(AngleMap::pwl(0.1), 512) - direct.value) <=
          2e-3 + direct.err);
}

TEST_CASE("dual-method agreement across the smooth corpus") {
    conf::QuadratureSpec q;
    q.n = 512;
    for (const auto& m : {AngleMap::identity(), AngleMap::moebius({0.3, 0.0}),
                          AngleMap::moebius({0.5, 0.0}, 1.1), AngleMap::square()}) {
        const auto direct = conf::conformal_energy(m, q);
        const double e = extension_energy(m, 512);
        CHECK(std::abs(e - direct.value) <= 1e-3 + direct.err);
    }
}

TEST_CASE("moebius rigidity of the extension energy") {
    for (double a : {0.0, 0.2, 0.4, 0.6}) {
        CHECK(extension_energy(AngleMap::moebius({a, 0.0}, 0.9)) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(extension_energy(AngleMap::square()) >= 1.0 + 1e-3);
    for (double lam : {0.1, 0.3, 0.5})
        CHECK(extension_energy(AngleMap::pwl(lam)) >= 1.0 + 1e-3);
}

TEST_CASE("poisson field of the identity boundary") {
    const auto f = poisson_field(boundary_fourier(AngleMap::identity(), 64), {});
    CHECK(f.nr == 256);
    CHECK(f.nphi == 512);
    CHECK(f.flag_count == 0);
    CHECK(f.max_abs_nu <= 1e-12);
    CHECK(f.min_J == doctest::Approx(1.0).epsilon(1e-12));
    // H(w) = w at a few sample points
    for (std::size_t i : {std::size_t{0}, std::size_t{100}, std::size_t{255}}) {
        for (std::size_t j : {std::size_t{0}, std::size_t{137}}) {
            const cplx w = f.r[i] * std::polar(1.0, static_cast<double>(j) * two_pi / 512.0);
            CHECK(std::abs(f.H[i * 512 + j] - w) <= 1e-12);
            CHECK(std::abs(f.Hw[i * 512 + j] - cplx(1.0, 0.0)) <= 1e-12);
            CHECK(std::abs(f.Hwb[i * 512 + j]) <= 1e-12);
        }
    }
    // max radius honours the interior-grid precondition
    for (double r : f.r) CHECK(r <= 1.0 - 1.0 / 512.0 + 1e-15);
}

TEST_CASE("poisson field of a moebius boundary is the moebius map itself") {
    const cplx a{0.5, 0.0};
    const auto f = poisson_field(boundary_fourier(AngleMap::moebius(a), 256), {});
    CHECK(f.max_abs_nu <= 1e-10);
    CHECK(f.flag_count == 0);
    std::size_t i = 128, j = 40;
    const cplx w = f.r[i] * std::polar(1.0, static_cast<double>(j) * two_pi / 512.0);
    CHECK(std::abs(f.H[i * 512 + j] - (w - a) / (1.0 - std::conj(a) * w)) <= 1e-9);
}

TEST_CASE("poisson field of the square map's inverse boundary") {
    const auto fb = boundary_fourier(AngleMap::square().inverse(), 512);
    const auto f = poisson_field(fb, {});
    CHECK(f.flag_count == 0);
    CHECK(f.min_J > 0.0);
    CHECK(f.max_abs_nu < 1.0);
    CHECK(f.max_abs_nu > 1e-3);  // genuinely non-conformal

    // discrete Cauchy-Riemann residual of nu decays under grid refinement;
    // measured on r <= 0.8, away from the boundary derivative singularity
    GridSpec coarse{64, 128, false}, fine{128, 256, false};
    const double rc = conf::nu_holomorphy_residual(poisson_field(fb, coarse), 0.8);
    const double rf = conf::nu_holomorphy_residual(poisson_field(fb, fine), 0.8);
    CHECK(rf < rc);
    CHECK(rf <= 0.5 * rc + 1e-6);
}

TEST_CASE("deformation curve is flat exactly for conformal fields") {
    const auto t = linspace01(16);
    for (const auto& m : {AngleMap::identity(), AngleMap::moebius({0.4, 0.0}, 0.3)}) {
        GridSpec g;
        g.gauss_radial = true;
        const auto f = poisson_field(boundary_fourier(m.inverse(), 256), g);
        const auto c = conf::deformation_bound_curve(f, t);
        REQUIRE(c.B.size() == 16);
        CHECK(c.b0 == doctest::Approx(1.0).epsilon(1e-9));
        for (double b : c.B) CHECK(b == doctest::Approx(1.0).epsilon(1e-9));
        CHECK_FALSE(c.truncated);
        CHECK(c.limit_value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("deformation curve for the square map") {
    GridSpec g;
    g.nr = 512;
    g.nphi = 2048;
    g.gauss_radial = true;
    const auto fb = boundary_fourier(AngleMap::square().inverse(), 1024, 1u << 17);
    const auto f = poisson_field(fb, g);
    // the outermost Gauss radii sit within 1e-5 of the boundary, where the
    // truncated series brushes |nu| = 1 next to the derivative singularity;
    // those few cells are flagged and enter the curve with factor 1
    CHECK(f.flag_count <= 10);

    std::vector<double> t = linspace01(32);
    const auto c = conf::deformation_bound_curve(f, t);
    REQUIRE(c.B.size() == 32);
    CHECK(std::abs(c.b0 - 1.0) <= 1e-6);
    CHECK(c.strictly_increasing);
    CHECK_FALSE(c.truncated);
    // the t -> 1 limit is the Douglas energy, by the pointwise identity
    CHECK(c.limit_identity_gap <= 1e-10);
    CHECK(std::abs(c.limit_value - douglas_energy(fb)) <= 1e-3);

    // differenced slope against the analytic rate at an interior point
    const double h = 1e-4, t0 = 0.5;
    const auto pair = conf::deformation_bound_curve(f, {t0 - h, t0 + h});
    const double slope = (pair.B[1] - pair.B[0]) / (2.0 * h);
    const double rate = conf::deformation_rate(f, t0);
    CHECK(rate > 0.0);
    CHECK(std::abs(slope - rate) / rate <= 0.05);
}

TEST_CASE("deformation curve rejects bad t grids") {
    const auto f = poisson_field(boundary_fourier(AngleMap::identity(), 64), GridSpec{16, 32, false});
    CHECK_THROWS_AS(conf::deformation_bound_curve(f, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(conf::deformation_bound_curve(f, {0.5, 0.25}), std::invalid_argument);
    CHECK_THROWS_AS(conf::deformation_rate(f, 1.0), std::invalid_argument);
}
