#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/energy.hpp"

using conf::AngleMap;
using conf::conformal_energy;
using conf::energy_oracle;
using conf::QuadratureSpec;
using conf::QuadScheme;
using conf::two_pi;

namespace {

constexpr double pi = two_pi / 2.0;

QuadratureSpec spec(std::size_t n, std::size_t refine = 1,
                    QuadScheme s = QuadScheme::midpoint_subtracted) {
    QuadratureSpec q;
    q.n = n;
    q.refine = refine;
    q.scheme = s;
    return q;
}

}  // namespace

TEST_CASE("Moebius maps carry unit energy") {
    CHECK(conformal_energy(AngleMap::identity(), spec(1024)).value ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(conformal_energy(AngleMap::moebius({0.5, 0.0}, 0.7), spec(1024)).value ==
          doctest::Approx(1.0).epsilon(5e-4));
}

TEST_CASE("square map energy is finite, frozen oracle value") {
    const auto e = conformal_energy(AngleMap::square(), spec(512, 2));
    CHECK(std::isfinite(e.value));
    CHECK(e.err < 1e-3);
    CHECK(e.value == doctest::Approx(1.0101).epsilon(2e-3));
    // Golden value frozen from the staggered-rule run at n = 2048.
    CHECK(energy_oracle(AngleMap::square(), 2048) ==
          doctest::Approx(1.0094694932098123).epsilon(1e-10));
}

TEST_CASE("inverse of a strongly pinching pwl map has elevated energy") {
    CHECK(energy_oracle(AngleMap::pwl(0.01).inverse(), 4096) >= 1.15);
}

TEST_CASE("staggered oracle baseline and cross-validation") {
    CHECK(energy_oracle(AngleMap::identity(), 512) == doctest::Approx(1.0).epsilon(2e-2));

    const AngleMap m = AngleMap::moebius({0.3, 0.0});
    const auto fast = conformal_energy(m, spec(512));
    const double o1 = energy_oracle(m, 1024);
    const double o2 = energy_oracle(m, 2048);
    // the staggered rule is first order, so its error at n is asymptotically
    // twice the doubling difference
    const double oracle_err = 2.0 * std::abs(o2 - o1);
    CHECK(std::abs(fast.value - o1) <= fast.err + oracle_err + 1e-5);
}

TEST_CASE("oracle agreement across the corpus") {
    const std::vector<AngleMap> corpus = {
        AngleMap::identity(), AngleMap::moebius({0.5, 0.0}, 0.7), AngleMap::square(),
        AngleMap::pwl(0.1), AngleMap::sin_series({0.2})};
    for (const auto& m : corpus) {
        const auto fast = conformal_energy(m, spec(512));
        const double o1 = energy_oracle(m, 512);
        const double oracle_err = 2.0 * std::abs(energy_oracle(m, 1024) - o1) + 1e-5;
        CHECK(std::abs(fast.value - o1) <= fast.err + oracle_err);
    }
}

TEST_CASE("baseline consistency at several resolutions") {
    for (std::size_t n : {256, 512, 1024}) {
        const auto e = conformal_energy(AngleMap::identity(), spec(n));
        CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.err <= 1e-12);
        CHECK(e.n_used == 2 * n);
        CHECK(e.method == "midpoint-subtracted");
    }
}

TEST_CASE("error estimate shrinks under doubling for smooth maps") {
    const AngleMap m = AngleMap::sin_series({0.3});
    const auto coarse = conformal_energy(m, spec(64, 1, QuadScheme::midpoint_excluded));
    const auto fine = conformal_energy(m, spec(256, 1, QuadScheme::midpoint_excluded));
    CHECK(fine.err < coarse.err);
    const auto finer = conformal_energy(m, spec(512, 1, QuadScheme::midpoint_excluded));
    CHECK(finer.err < fine.err);
    // observed convergence order >= 1
    CHECK(fine.err / finer.err >= 1.9);
}

TEST_CASE("log-sin moments against the Fourier series values") {
    CHECK(conf::log_sin_moment(1, 2048) == doctest::Approx(-pi).epsilon(1e-8));
    CHECK(conf::log_sin_moment(2, 2048) == doctest::Approx(-pi / 2.0).epsilon(1e-8));
    const double e1 = std::abs(conf::log_sin_moment(1, 64) + pi);
    const double e2 = std::abs(conf::log_sin_moment(1, 128) + pi);
    const double e3 = std::abs(conf::log_sin_moment(1, 256) + pi);
    CHECK(e2 <= e1);
    CHECK(e3 <= e2);
}

TEST_CASE("conformal invariance under Moebius post-composition") {
    const QuadratureSpec q = spec(512);
    CHECK(conf::invariance_gap(AngleMap::identity(), AngleMap::moebius({0.5, 0.0}), q) <= 1e-3);
    CHECK(conf::invariance_gap(AngleMap::square(), AngleMap::moebius({0.4, 0.0}, 1.1), q) <=
          2e-3);
    CHECK(conf::invariance_gap(AngleMap::square(), AngleMap::identity(), q) == 0.0);
    CHECK_THROWS_AS(conf::invariance_gap(AngleMap::identity(), AngleMap::square(), q),
                    std::invalid_argument);
}

TEST_CASE("rotation invariance, pre and post") {
    const AngleMap rot = AngleMap::moebius({0.0, 0.0}, 1.234);
    const AngleMap m = AngleMap::square();
    const auto base = conformal_energy(m, spec(512));
    const auto post = conformal_energy(AngleMap::compose(rot, m), spec(512));
    const auto pre = conformal_energy(AngleMap::compose(m, rot), spec(512));
    const double tol = 3.0 * (base.err + 1e-9);
    CHECK(std::abs(post.value - base.value) <= tol + post.err);
    CHECK(std::abs(pre.value - base.value) <= tol + pre.err);
}

TEST_CASE("energy floor across the corpus") {
    const std::vector<AngleMap> corpus = {
        AngleMap::identity(),       AngleMap::moebius({0.6, 0.0}),
        AngleMap::moebius({0.3, 0.2}, 2.0), AngleMap::square(),
        AngleMap::square().inverse(),       AngleMap::pwl(0.1),
        AngleMap::pwl(0.01).inverse(),      AngleMap::sin_series({0.25, -0.1})};
    for (const auto& m : corpus) {
        const auto e = conformal_energy(m, spec(256));
        CHECK(e.value >= 1.0 - e.err - 1e-9);
    }
}

TEST_CASE("complex kernel evaluation has vanishing imaginary part") {
    // The real reduction drops e^{i(t-s)} in favour of cos(t-s); check the
    // discarded imaginary part really cancels on the staggered grid.
    const AngleMap m = AngleMap::moebius({0.3, 0.0});
    const std::size_t n = 256;
    const double h = two_pi / static_cast<double>(n);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.25) * h;
        for (std::size_t j = 0; j < n; ++j) {
            const double s = (static_cast<double>(j) + 0.75) * h;
            const double k = std::log(std::abs(2.0 * std::sin(0.5 * (m(t) - m(s)))));
            acc += k * std::exp(std::complex<double>(0.0, t - s));
        }
    }
    acc *= -h * h / (2.0 * pi * pi);
    CHECK(std::abs(acc.imag()) <= 1e-10);
    CHECK(acc.real() == doctest::Approx(energy_oracle(m, n)).epsilon(1e-12));
}

TEST_CASE("degenerate maps are rejected before quadrature") {
    const AngleMap flat =
        AngleMap::tabulated({0.0, pi, two_pi}, {0.0, 1e-12, two_pi});
    CHECK_THROWS_AS(conformal_energy(flat, spec(256)), std::domain_error);
    CHECK_THROWS_AS(conformal_energy(AngleMap::identity(), spec(32)), std::invalid_argument);
}

TEST_CASE("bilipschitz bounds report") {
    const QuadratureSpec q = spec(256);

    SUBCASE("identity f with L = 1 is tight-trivial") {
        const auto r = conf::bilip_bounds_report(AngleMap::identity(), AngleMap::square(), 1.0, q);
        CHECK(r.certified);
        CHECK(r.e_fg.value == doctest::Approx(r.e_g.value).epsilon(1e-12));
        CHECK(r.lower_ok);
        CHECK(r.upper_ok);
        CHECK(r.standalone_corrected_holds);
    }

    SUBCASE("pwl(0.5) is 2-bilipschitz and the two-sided bounds hold") {
        const auto r = conf::bilip_bounds_report(AngleMap::pwl(0.5), AngleMap::identity(), 2.0, q);
        CHECK(r.certified);
        CHECK(r.ratio_max <= 2.0 + 1e-9);
        CHECK(r.lower_ok);
        CHECK(r.upper_ok);
        CHECK_FALSE(r.standalone_printed_holds);  // (1/2pi^2) log 2 < 1 <= E(f)
        CHECK(r.standalone_corrected_holds);
    }

    SUBCASE("moebius(0.2) with its chordal constant (1+r)/(1-r)") {
        const auto r = conf::bilip_bounds_report(AngleMap::moebius({0.2, 0.0}),
                                                 AngleMap::identity(), 1.5 + 1e-6, q);
        CHECK(r.certified);
        CHECK(r.ratio_max <= 1.5 + 1e-6);
        CHECK(r.lower_ok);
        CHECK(r.upper_ok);
        CHECK(r.standalone_corrected_holds);
    }

    SUBCASE("certificate failure throws") {
        CHECK_THROWS_AS(
            conf::bilip_bounds_report(AngleMap::pwl(0.1), AngleMap::identity(), 1.5, q),
            std::domain_error);
    }
}
