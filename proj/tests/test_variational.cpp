#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/energy.hpp"
#include "conf/variational.hpp"

using conf::AngleMap;
using conf::critical_residual;
using conf::first_variation;
using conf::Perturbation;
using conf::QuadratureSpec;
using conf::two_pi;

namespace {

constexpr double pi = two_pi / 2.0;

QuadratureSpec spec(std::size_t n) {
    QuadratureSpec q;
    q.n = n;
    return q;
}

// central finite difference of the energy along theta + t*phi, with the
// perturbed lifts represented on a dense table so both signs share the same
// representation bias
double fd_variation(const AngleMap& theta, const Perturbation& phi, double t,
                    const QuadratureSpec& q) {
    const std::size_t n = 8192;
    std::vector<double> x(n + 1), up(n + 1), dn(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = static_cast<double>(i) * two_pi / static_cast<double>(n);
        const double base = theta(x[i]);
        const double bump = phi(x[i]);
        up[i] = base + t * bump;
        dn[i] = base - t * bump;
    }
    const double ep = conf::conformal_energy(AngleMap::tabulated(x, up), q).value;
    const double em = conf::conformal_energy(AngleMap::tabulated(x, dn), q).value;
    return (ep - em) / (2.0 * t);
}

AngleMap cubic_pinch() {
    // theta ~ t^3 near 0; the variation integrals for it diverge
    const std::size_t n = 2048;
    std::vector<double> x(n + 1), th(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = static_cast<double>(i) * two_pi / static_cast<double>(n);
        th[i] = x[i] <= 1.0 ? x[i] * x[i] * x[i] : x[i];
    }
    return AngleMap::tabulated(x, th);
}

}  // namespace

TEST_CASE("perturbation basics") {
    const Perturbation phi{{0.0, 1.0}};  // sin(2t)
    CHECK(phi(0.0) == doctest::Approx(0.0));
    CHECK(phi(two_pi) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(phi(pi / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi.derivative(0.0) == doctest::Approx(2.0));
    const Perturbation unit = Perturbation{{3.0, 1.0}}.unit_slope();
    double peak = 0.0;
    for (std::size_t i = 0; i < 2048; ++i)
        peak = std::max(peak, std::abs(unit.derivative(
                                  static_cast<double>(i) * two_pi / 2048.0)));
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("first variation vanishes at Moebius minimizers") {
    const Perturbation phi1{{1.0}}, phi2{{0.0, 1.0}};
    CHECK(std::abs(first_variation(AngleMap::identity(), phi1, spec(256))) <= 1e-6);
    CHECK(std::abs(first_variation(AngleMap::identity(), phi2, spec(256))) <= 1e-6);
    CHECK(std::abs(first_variation(AngleMap::moebius({0.4, 0.0}), phi2, spec(512))) <= 1e-5);
}

TEST_CASE("first variation matches central finite differences") {
    const QuadratureSpec q = spec(512);
    struct Case {
        AngleMap theta;
        Perturbation phi;
    };
    const std::vector<Case> cases = {
        {AngleMap::square(), Perturbation{{1.0}}},
        {AngleMap::square(), Perturbation{{0.0, 0.5}}},
        {AngleMap::sin_series({0.3}), Perturbation{{0.0, 1.0}}},
        {AngleMap::moebius({0.3, 0.0}), Perturbation{{0.5, 0.25}}},
    };
    for (const auto& cs : cases) {
        // the FD energies refine once, so their effective grid is 2 q.n;
        // evaluate the variation on the matching grid
        const double fv = first_variation(cs.theta, cs.phi, spec(2 * q.n));
        const double fd = fd_variation(cs.theta, cs.phi, 1e-4, q);
        CHECK(std::abs(fv - fd) / std::max(1.0, std::abs(fd)) <= 1e-4);
    }
    // a genuinely nonzero case
    CHECK(std::abs(first_variation(AngleMap::square(), Perturbation{{1.0}}, q)) > 1e-3);
}

TEST_CASE("integrability gate refuses cubically pinching maps") {
    CHECK_THROWS_AS(first_variation(cubic_pinch(), Perturbation{{1.0}}, spec(256)),
                    std::domain_error);
    CHECK_NOTHROW(first_variation(AngleMap::square(), Perturbation{{1.0}}, spec(64)));
    CHECK_NOTHROW(conf::require_variation_integrable(AngleMap::pwl(0.1)));
}

TEST_CASE("critical residual vanishes exactly for the identity") {
    for (double y : {0.0, 0.7, 3.0, 5.5})
        CHECK(std::abs(critical_residual(AngleMap::identity(), y, spec(256))) <= 1e-9);
}

TEST_CASE("critical residual is small for Moebius maps, large for the square map") {
    const QuadratureSpec q = spec(256);
    for (double y : {0.0, 1.0, 2.0})
        CHECK(std::abs(critical_residual(AngleMap::moebius({0.3, 0.0}), y, q)) <= 1e-3);
    const double ceiling = 1e-3;
    CHECK(std::abs(critical_residual(AngleMap::square(), 0.5, q)) >= 10.0 * ceiling);
}

TEST_CASE("half-interval evaluation agrees with the full interval") {
    const QuadratureSpec q = spec(256);
    for (const auto& m : {AngleMap::moebius({0.3, 0.0}), AngleMap::square()}) {
        for (double y : {0.4, 2.0}) {
            const double half = critical_residual(m, y, q, true);
            const double full = critical_residual(m, y, q, false);
            CHECK(half == doctest::Approx(full).epsilon(1e-9));
        }
    }
}

TEST_CASE("residual ladder reports non-convergence for a cubic pinch") {
    CHECK_THROWS_AS(critical_residual(cubic_pinch(), 0.0, spec(256)), std::runtime_error);
}

TEST_CASE("u-form residual equals minus the cot-form residual") {
    const QuadratureSpec q = spec(256);
    CHECK(std::abs(conf::u_form_residual(AngleMap::identity(), 1.0, q)) <= 1e-12);
    for (double y : {0.0, 1.0, 2.0})
        CHECK(std::abs(conf::u_form_residual(AngleMap::moebius({0.3, 0.0}), y, q)) <= 1e-3);

    const double r = critical_residual(AngleMap::square(), 0.5, q);
    const double u = conf::u_form_residual(AngleMap::square(), 0.5, q);
    CHECK(std::abs(u) > 1e-2);
    CHECK(u == doctest::Approx(-r).epsilon(1e-9));
}

TEST_CASE("residual profile over a y grid") {
    const auto p = conf::residual_profile(AngleMap::moebius({0.3, 0.0}), 32, spec(256));
    CHECK(p.y.size() == 32);
    CHECK(p.max_abs <= 1e-3);
    // the square map's residual diverges at y = 0, so the profile operation
    // refuses it up front (its Hoelder certificate needs p = 2)
    CHECK_THROWS_AS(conf::residual_profile(AngleMap::square(), 16, spec(256)),
                    std::domain_error);
}

TEST_CASE("moebius fitting recovers family members") {
    const auto fit = conf::fit_moebius(AngleMap::moebius({0.55, 0.0}, 2.0));
    CHECK(fit.a == doctest::Approx(0.55).epsilon(1e-3));
    CHECK(fit.rot == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(fit.sup_distance <= 1e-3);

    const auto idfit = conf::fit_moebius(AngleMap::identity());
    CHECK(std::abs(idfit.a) <= 1e-3);
    CHECK(idfit.sup_distance <= 1e-6);
}

TEST_CASE("descent from the identity converges immediately") {
    const auto tr = conf::descend(AngleMap::identity(), 4, 50, spec(256));
    CHECK(tr.converged);
    CHECK(tr.steps.size() == 1);
    CHECK(std::abs(tr.fitted_a) <= 1e-3);
    CHECK(tr.fit_sup_distance <= 1e-6);
}

TEST_CASE("descent sees Moebius maps as critical points") {
    const auto tr = conf::descend(AngleMap::moebius({0.4, 0.0}), 8, 50, spec(256));
    CHECK(tr.steps.front().grad_norm < 1e-5);
    CHECK(tr.converged);
    CHECK(tr.fitted_a == doctest::Approx(0.4).epsilon(5e-3));
}

TEST_CASE("descent from a smooth non-Moebius start") {
    const auto tr = conf::descend(AngleMap::sin_series({0.0, 0.2}), 8, 200, spec(256));
    REQUIRE(tr.steps.size() >= 2);
    for (std::size_t i = 1; i < tr.steps.size(); ++i)
        CHECK(tr.steps[i].energy < tr.steps[i - 1].energy);
    for (const auto& s : tr.steps) CHECK(s.energy >= 1.0 - 1e-6);
    CHECK(tr.final_energy <= 1.0 + 1e-3);
    CHECK(tr.fit_sup_distance <= 1e-2);
    CHECK_FALSE(tr.stalled);
    // every iterate stays a homeomorphism
    const auto d = conf::validate(AngleMap::sin_series(tr.final_coeffs), 256);
    CHECK(d.monotone_ok);
    CHECK(d.endpoint_ok);
}

TEST_CASE("descend validates its arguments") {
    CHECK_THROWS_AS(conf::descend(AngleMap::identity(), 0, 10, spec(256)),
                    std::invalid_argument);
    CHECK_THROWS_AS(conf::descend(AngleMap::identity(), 33, 10, spec(256)),
                    std::invalid_argument);
}
