#include "conf/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/cross_ratio.hpp"
#include "conf/disk_extension.hpp"
#include "conf/energy.hpp"
#include "conf/variational.hpp"

namespace conf {

namespace {

constexpr double pi = two_pi / 2.0;

QuadratureSpec spec(std::size_t n) {
    QuadratureSpec q;
    q.n = n;
    return q;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Central finite difference of the energy along theta + t*phi, on a dense
// shared table so both signs carry the same representation bias.
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
    const double ep = conformal_energy(AngleMap::tabulated(x, up), q).value;
    const double em = conformal_energy(AngleMap::tabulated(x, dn), q).value;
    return (ep - em) / (2.0 * t);
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    return num / den;
}

CriterionResult moebius_unit_energy() {
    CriterionResult r{1, "moebius maps have unit energy", true, ""};
    double worst = 0.0;
    for (double a : {0.0, 0.3, 0.6})
        for (double rot : {0.0, 1.1})
            worst = std::max(worst,
                             std::abs(conformal_energy(AngleMap::moebius({a, 0.0}, rot),
                                                       spec(1024)).value - 1.0));
    r.passed = worst <= 5e-4;
    r.detail = "max |E - 1| = " + fmt(worst) + " over a in {0, 0.3, 0.6} x rot in {0, 1.1} (tol 5e-4)";
    return r;
}

CriterionResult bound_closed_forms() {
    CriterionResult r{2, "quasi-Moebius bound closed forms", true, ""};
    const double b1 = qm_energy_bound(DistortionGauge::identity());
    double worst = std::abs(b1 - 1.0);
    for (double alpha : {2.0, std::exp(pi)}) {
        const double b = qm_energy_bound(DistortionGauge::linear(alpha));
        worst = std::max(worst, std::abs(b - (1.0 + std::log(alpha) / pi)));
    }
    r.passed = worst <= 1e-8;
    r.detail = "identity gauge -> " + fmt(b1) + ", max closed-form gap " + fmt(worst) + " (tol 1e-8)";
    return r;
}

CriterionResult conformal_invariance() {
    CriterionResult r{3, "energy invariance under moebius post-composition", true, ""};
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<AngleMap> phis;
    for (int i = 0; i < 2; ++i) {
        const double rad = 0.7 * unif(rng);
        const double beta = two_pi * unif(rng);
        const double rot = two_pi * unif(rng);
        phis.push_back(AngleMap::moebius({rad * std::cos(beta), rad * std::sin(beta)}, rot));
    }
    double worst = 0.0;
    for (const auto& m : {AngleMap::square(), AngleMap::pwl(0.1)})
        for (const auto& phi : phis)
            worst = std::max(worst, invariance_gap(m, phi, spec(512)));
    r.passed = worst <= 2e-3;
    r.detail = "max gap " + fmt(worst) + " over {square, pwl(0.1)} x 2 random moebius maps (tol 2e-3)";
    return r;
}

CriterionResult dual_method_agreement() {
    CriterionResult r{4, "double-integral energy matches the harmonic-extension energy", true, ""};
    double worst = 0.0, budget = 0.0;
    for (const auto& m : {AngleMap::identity(), AngleMap::moebius({0.5, 0.0}, 0.7),
                          AngleMap::square()}) {
        const auto direct = conformal_energy(m, spec(512));
        const double ext = extension_energy(m, 512);
        const double gap = std::abs(ext - direct.value);
        if (gap - direct.err > worst - budget) {
            worst = gap;
            budget = direct.err;
        }
        if (gap > 1e-3 + direct.err) r.passed = false;
    }
    r.detail = "worst gap " + fmt(worst) + " with error bar " + fmt(budget) + " (tol 1e-3 + err)";
    return r;
}

CriterionResult pwl_family_study() {
    CriterionResult r{5, "piecewise-linear family: bounded forward, logarithmic inverse", true, ""};
    const std::vector<double> lambdas = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> e_fwd, e_inv, logs;
    for (double lam : lambdas) {
        e_fwd.push_back(energy_oracle(AngleMap::pwl(lam), 4096));
        e_inv.push_back(energy_oracle(AngleMap::pwl(lam).inverse(), 4096));
        logs.push_back(std::log(1.0 / lam));
    }
    const double fmin = *std::min_element(e_fwd.begin(), e_fwd.end());
    const double fmax = *std::max_element(e_fwd.begin(), e_fwd.end());
    const double variation = (fmax - fmin) / fmin;
    const double slope = regression_slope(logs, e_inv);
    const double target = (2.0 - 2.0 * std::cos(1.0)) / (2.0 * pi * pi);
    r.passed = variation < 0.10 && std::abs(slope - target) <= 0.25 * target;
    r.detail = "forward variation " + fmt(variation) + " (tol 0.10); inverse slope " + fmt(slope) +
               " vs " + fmt(target) + " (tol 25%)";
    return r;
}

CriterionResult square_pair() {
    CriterionResult r{6, "square-map pair: finite energies, unbounded distortion envelope", true, ""};
    QuadratureSpec q = spec(256);
    q.refine = 2;
    std::string detail;
    try {
        const auto ef = conformal_energy(AngleMap::square(), q);
        const auto ei = conformal_energy(AngleMap::square().inverse(), q);
        const bool finite = std::isfinite(ef.value) && std::isfinite(ei.value);
        r.passed = finite && ef.err < 1e-2 && ei.err < 1e-2;
        detail = "E(square) = " + fmt(ef.value) + " +- " + fmt(ef.err) + ", E(inverse) = " +
                 fmt(ei.value) + " +- " + fmt(ei.err);
    } catch (const std::exception& e) {
        r.passed = false;
        detail = std::string("energy evaluation failed: ") + e.what();
    }
    // the envelope trend is reported, not asserted
    const auto scan = cr_distortion_scan(AngleMap::square(), 2000, 1);
    double small_bin_eta = 0.0, small_bin_t = 0.0;
    for (const auto& b : scan.bins) {
        if (b.support > 0) {
            small_bin_eta = b.eta_hat;
            small_bin_t = b.t;
            break;
        }
    }
    detail += "; envelope: eta_hat(" + fmt(small_bin_t) + ") = " + fmt(small_bin_eta) +
              ", alpha_hat = " + fmt(scan.alpha_hat) + " (unbounded trend, reported only)";
    r.detail = detail;
    return r;
}

CriterionResult cross_ratio_witnesses() {
    CriterionResult r{7, "cross-ratio witnesses", true, ""};
    const double lam = 1e-3;
    const cplx one{1.0, 0.0};
    const double cr = cross_ratio(one, std::polar(1.0, lam), -one, std::polar(1.0, 1.5 * pi));
    const bool near_half_lambda = std::abs(cr - lam / 2.0) <= 0.05 * (lam / 2.0);

    // look for a quadruple with moderate input cross ratio blown past 1/lam
    const double lam_map = 1e-2;
    const AngleMap f = AngleMap::pwl(lam_map);
    bool witness = false;
    double best_in = 0.0, best_out = 0.0;
    for (double eps : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
        const double quads[3][4] = {{0.0, eps, pi, 1.5 * pi},
                                    {0.0, eps, two_pi - eps, pi},
                                    {0.0, two_pi - eps, eps, pi}};
        for (const auto& qd : quads) {
            const double cin = cross_ratio_angles(qd[0], qd[1], qd[2], qd[3]);
            const double cout = cross_ratio_angles(f(qd[0]), f(qd[1]), f(qd[2]), f(qd[3]));
            if (cin <= 2.0 && cout >= 1.0 / lam_map && (!witness || cout > best_out)) {
                witness = true;
                best_in = cin;
                best_out = cout;
            }
        }
    }
    r.passed = near_half_lambda && witness;
    r.detail = "cr = " + fmt(cr) + " vs lambda/2 = " + fmt(lam / 2.0) + " (tol 5%); pwl(0.01) sends cr " +
               fmt(best_in) + " -> " + fmt(best_out) + " (needs >= 100)";
    return r;
}

CriterionResult variational_consistency() {
    CriterionResult r{8, "first variation and critical residuals", true, ""};
    const QuadratureSpec q = spec(512);
    const std::vector<AngleMap> maps = {AngleMap::identity(), AngleMap::moebius({0.3, 0.0}),
                                        AngleMap::moebius({0.6, 0.0}),
                                        AngleMap::sin_series({0.1, 0.05}), AngleMap::square()};
    const std::vector<Perturbation> phis = {Perturbation{{1.0}}, Perturbation{{0.0, 1.0}},
                                            Perturbation{{0.5, 0.25}}};
    double worst_rel = 0.0;
    for (const auto& m : maps) {
        for (const auto& phi : phis) {
            // the finite differences refine once internally, so the matching
            // variation grid is 2 q.n
            const double fv = first_variation(m, phi, spec(2 * q.n));
            const double fd = fd_variation(m, phi, 1e-4, q);
            worst_rel = std::max(worst_rel, std::abs(fv - fd) / std::max(1.0, std::abs(fd)));
        }
    }
    const bool fv_ok = worst_rel <= 1e-4;

    double worst_moebius = 0.0;
    for (const auto& m : {AngleMap::moebius({0.3, 0.0}), AngleMap::moebius({0.6, 0.0}, 1.1)})
        worst_moebius = std::max(worst_moebius, residual_profile(m, 32, spec(256)).max_abs);
    // the square map's residual diverges at y = 0, so probe an offset grid
    double square_max = 0.0;
    for (std::size_t k = 0; k < 32; ++k) {
        const double y = (static_cast<double>(k) + 0.5) * two_pi / 32.0;
        square_max = std::max(square_max, std::abs(critical_residual(AngleMap::square(), y, spec(256))));
    }
    const bool res_ok = worst_moebius <= 1e-3 && square_max >= 1e-2;
    r.passed = fv_ok && res_ok;
    r.detail = "max rel FD gap " + fmt(worst_rel) + " over 5 maps x 3 perturbations (tol 1e-4); residual max " +
               fmt(worst_moebius) + " moebius (tol 1e-3) vs " + fmt(square_max) + " square (needs >= 1e-2)";
    return r;
}

CriterionResult descent_probe() {
    CriterionResult r{9, "gradient descent reaches the moebius family", true, ""};
    const auto tr = descend(AngleMap::sin_series({0.0, 0.2}), 8, 200, spec(256));
    bool monotone = tr.steps.size() >= 2;
    for (std::size_t i = 1; i < tr.steps.size(); ++i)
        if (tr.steps[i].energy >= tr.steps[i - 1].energy) monotone = false;
    bool floored = true;
    for (const auto& s : tr.steps)
        if (s.energy < 1.0 - 1e-6) floored = false;
    r.passed = monotone && floored && tr.final_energy <= 1.0 + 1e-3 && tr.fit_sup_distance <= 1e-2;
    r.detail = std::to_string(tr.steps.size()) + " accepted steps, final energy " + fmt(tr.final_energy) +
               " (tol 1 + 1e-3), sup distance to fitted moebius " + fmt(tr.fit_sup_distance) + " (tol 1e-2)";
    return r;
}

CriterionResult deformation_curve_check() {
    CriterionResult r{10, "deformation bound curve of the square map", true, ""};
    const auto fb = boundary_fourier(AngleMap::square().inverse(), 1024, std::size_t{1} << 17);
    GridSpec g;
    g.nr = 512;
    g.nphi = 2048;
    g.gauss_radial = true;
    const auto field = poisson_field(fb, g);
    std::vector<double> t(32);
    for (std::size_t i = 0; i < 32; ++i) t[i] = static_cast<double>(i) / 32.0;
    const auto c = deformation_bound_curve(field, t);
    const double target = douglas_energy(fb);
    const bool b0_ok = std::abs(c.b0 - 1.0) <= 1e-6;
    const bool limit_ok = std::abs(c.limit_value - target) <= 1e-3;
    r.passed = b0_ok && c.strictly_increasing && !c.truncated && c.B.size() == 32 && limit_ok;
    r.detail = "B(0) = 1 + " + fmt(c.b0 - 1.0) + " (tol 1e-6), strictly increasing = " +
               (c.strictly_increasing ? "yes" : "no") + ", limit " + fmt(c.limit_value) +
               " vs extension energy " + fmt(target) + " (tol 1e-3)";
    return r;
}

CriterionResult energy_floor() {
    CriterionResult r{11, "energy floor across the corpus", true, ""};
    std::vector<double> x(257), th(257);
    for (std::size_t i = 0; i <= 256; ++i) {
        x[i] = static_cast<double>(i) * two_pi / 256.0;
        th[i] = AngleMap::square()(x[i]);
    }
    const std::vector<AngleMap> corpus = {
        AngleMap::identity(), AngleMap::moebius({0.3, 0.0}), AngleMap::moebius({0.5, 0.0}, 1.1),
        AngleMap::moebius({0.2, 0.6}, 0.4), AngleMap::pwl(0.1), AngleMap::pwl(0.5),
        AngleMap::square(), AngleMap::square().inverse(), AngleMap::sin_series({0.2}),
        AngleMap::sin_series({0.0, 0.2}),
        AngleMap::compose(AngleMap::moebius({0.3, 0.0}), AngleMap::square()),
        AngleMap::tabulated(x, th)};
    double worst = 1.0;
    std::string worst_name;
    for (const auto& m : corpus) {
        const auto e = conformal_energy(m, spec(256));
        const double margin = e.value - (1.0 - e.err);
        if (margin < worst) {
            worst = margin;
            worst_name = m.describe();
        }
        if (margin < -1e-9) r.passed = false;
    }
    r.detail = std::to_string(corpus.size()) + " maps, smallest margin over 1 - err: " + fmt(worst) +
               " (" + worst_name + ")";
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
    std::vector<CriterionResult> out;
    out.push_back(moebius_unit_energy());
    out.push_back(bound_closed_forms());
    out.push_back(conformal_invariance());
    out.push_back(dual_method_agreement());
    out.push_back(pwl_family_study());
    out.push_back(square_pair());
    out.push_back(cross_ratio_witnesses());
    out.push_back(variational_consistency());
    out.push_back(descent_probe());
    out.push_back(deformation_curve_check());
    out.push_back(energy_floor());
    return out;
}

int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& out) {
    int failures = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS" : "FAIL") << " " << r.index << ". " << r.title << ": "
            << r.detail << "\n";
        if (!r.passed) ++failures;
    }
    return failures;
}

}  // namespace conf
