#include "conf/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace conf {

namespace {

constexpr double pi = two_pi / 2.0;
constexpr double residual_cutoff = 1e-4;  // inner edge of the panel ladder

double eq12_probe(const AngleMap& theta, std::size_t n) {
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> tha(n), thb(n), ta(n), tb(n);
    for (std::size_t i = 0; i < n; ++i) {
        ta[i] = (static_cast<double>(i) + 0.25) * h;
        tb[i] = (static_cast<double>(i) + 0.75) * h;
        tha[i] = theta(ta[i]);
        thb[i] = theta(tb[i]);
    }
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j)
            row[j] = std::abs(ta[i] - tb[j]) / std::abs(tha[i] - thb[j]);
        rows[i] = pairwise_sum(row);
    });
    return h * h * pairwise_sum(rows);
}

// Off-diagonal kernel matrix row sums for the first variation; M_ij =
// cot((theta_i - theta_j)/2) cos(t_i - t_j) is antisymmetric, so each
// gradient component needs only these row sums and the diagonal limit.
struct VariationGrid {
    std::size_t n;
    double h;
    std::vector<double> t;         // midpoint nodes
    std::vector<double> rowsum;    // sum_j M_ij, j != i
    std::vector<double> inv_dtheta;  // 1 / theta'(t_i) by half-cell slopes
};

VariationGrid variation_grid(const AngleMap& theta, std::size_t n) {
    VariationGrid g;
    g.n = n;
    g.h = two_pi / static_cast<double>(n);
    g.t.resize(n);
    g.inv_dtheta.resize(n);
    std::vector<double> th(n), ct(n), st(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.t[i] = (static_cast<double>(i) + 0.5) * g.h;
        th[i] = theta(g.t[i]);
        ct[i] = std::cos(g.t[i]);
        st[i] = std::sin(g.t[i]);
        g.inv_dtheta[i] = g.h / (theta(g.t[i] + 0.5 * g.h) - theta(g.t[i] - 0.5 * g.h));
    }
    g.rowsum.resize(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> row(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            row[j] = (ct[i] * ct[j] + st[i] * st[j]) / std::tan(0.5 * (th[i] - th[j]));
        }
        g.rowsum[i] = pairwise_sum(row);
    });
    return g;
}

double variation_from_grid(const VariationGrid& g, const Perturbation& phi) {
    std::vector<double> terms(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        // off-diagonal: 2 phi(t_i) rowsum_i by antisymmetry of M
        // diagonal limit: 2 phi'(t_i) / theta'(t_i)
        terms[i] = 2.0 * phi(g.t[i]) * g.rowsum[i] +
                   2.0 * phi.derivative(g.t[i]) * g.inv_dtheta[i];
    }
    return -(1.0 / (4.0 * pi * pi)) * g.h * g.h * pairwise_sum(terms);
}

// Gauss-Legendre on geometric panels of [cutoff, pi] plus a rectangle
// closure on [0, cutoff]; detects integrands whose panel sums grow as the
// panels shrink.
template <typename F>
double panel_ladder(const F& f, const char* what) {
    static const GaussLegendre gl(16);
    std::vector<double> panels;
    double hi = pi;
    std::size_t growing = 0;
    while (hi > residual_cutoff) {
        const double lo = std::max(hi * 0.5, residual_cutoff);
        double s = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl.nodes[i];
            s += gl.weights[i] * f(x) * std::cos(x);
        }
        s *= 0.5 * (hi - lo);
        // growth is only meaningful deep in the ladder, where the
        // integrand's x -> 0 behaviour dominates the panel values
        if (hi <= 0.05 && !panels.empty() && std::abs(s) > std::abs(panels.back()) &&
            std::abs(s) > 1e-8) {
            if (++growing >= 3) {
                std::ostringstream os;
                os << what << ": panel sums grow toward x = 0 (last |panel| = " << std::abs(s)
                   << "), integral declared non-convergent";
                throw std::runtime_error(os.str());
            }
        } else {
            growing = 0;
        }
        panels.push_back(s);
        hi = lo;
    }
    panels.push_back(residual_cutoff * f(residual_cutoff) * std::cos(residual_cutoff));
    std::reverse(panels.begin(), panels.end());
    return pairwise_sum(panels);
}

double wrapped_sup_distance(const AngleMap& a, const AngleMap& b, std::size_t n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * two_pi / static_cast<double>(n);
        double d = std::fmod(a(t) - b(t), two_pi);
        if (d > pi) d -= two_pi;
        if (d < -pi) d += two_pi;
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

}  // namespace

double Perturbation::operator()(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
        s += c[k] * std::sin(static_cast<double>(k + 1) * t);
    return s;
}

double Perturbation::derivative(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double kk = static_cast<double>(k + 1);
        s += kk * c[k] * std::cos(kk * t);
    }
    return s;
}

Perturbation Perturbation::unit_slope() const {
    double peak = 0.0;
    for (std::size_t i = 0; i < 4096; ++i)
        peak = std::max(peak, std::abs(derivative(static_cast<double>(i) * two_pi / 4096.0)));
    Perturbation out = *this;
    if (peak > 0.0)
        for (double& x : out.c) x /= peak;
    return out;
}

void require_variation_integrable(const AngleMap& theta) {
    const double i1 = eq12_probe(theta, 512);
    const double i2 = eq12_probe(theta, 1024);
    if (i2 - i1 > 0.05) {
        std::ostringstream os;
        os << "first variation refused: the integrability certificate for "
           << theta.describe() << " fails (|x-y|/|theta(x)-theta(y)| probe grows by "
           << i2 - i1 << " under doubling; the variation integral may diverge)";
        throw std::domain_error(os.str());
    }
}

double first_variation(const AngleMap& theta, const Perturbation& phi,
                       const QuadratureSpec& q) {
    if (q.n < 64) throw std::invalid_argument("first_variation: n must be >= 64");
    require_variation_integrable(theta);
    return variation_from_grid(variation_grid(theta, q.n), phi);
}

double critical_residual(const AngleMap& theta, double y, const QuadratureSpec& q,
                         bool use_evenness) {
    (void)q;
    const auto f = [&](double x) {
        return 1.0 / std::tan(0.5 * (theta(y) - theta(y - x))) -
               1.0 / std::tan(0.5 * (theta(y + x) - theta(y)));
    };
    if (use_evenness) return 2.0 * panel_ladder(f, "critical_residual");
    const auto fneg = [&](double x) { return f(-x); };  // cos is even in x
    return panel_ladder(f, "critical_residual") + panel_ladder(fneg, "critical_residual");
}

double u_form_residual(const AngleMap& theta, double y, const QuadratureSpec& q) {
    (void)q;
    const double c = theta(y);  // recentre so u(y) = 0, away from the tan pole
    const auto u = [&](double t) { return std::tan(0.5 * (theta(t) - c)); };
    const auto f = [&](double x) {
        const double up = u(y + x), um = u(y - x);
        const double a = std::isinf(up) ? 0.0 : 1.0 / up;
        const double b = std::isinf(um) ? 0.0 : 1.0 / (-um);
        return a - b;
    };
    return 2.0 * panel_ladder(f, "u_form_residual");
}

ResidualProfile residual_profile(const AngleMap& theta, std::size_t n_grid,
                                 const QuadratureSpec& q) {
    if (n_grid < 2) throw std::invalid_argument("residual_profile: n_grid must be >= 2");
    const MapDiagnostics d = validate(theta, 1024);
    if (!d.hoelder_ok || d.hoelder_p >= 2.0) {
        std::ostringstream os;
        os << "residual_profile: " << theta.describe()
           << " only admits a Hoelder lower bound with exponent p = " << d.hoelder_p
           << " >= 2, so the residual integral may diverge on parts of the grid; "
              "evaluate critical_residual pointwise instead";
        throw std::domain_error(os.str());
    }
    ResidualProfile p;
    p.resolution = q.n;
    p.y.resize(n_grid);
    p.residual.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i)
        p.y[i] = static_cast<double>(i) * two_pi / static_cast<double>(n_grid);
    parallel_for(n_grid, [&](std::size_t i) {
        p.residual[i] = critical_residual(theta, p.y[i], q);
    });
    for (double r : p.residual) p.max_abs = std::max(p.max_abs, std::abs(r));
    return p;
}

MoebiusFit fit_moebius(const AngleMap& target, std::size_t rounds) {
    MoebiusFit best;
    best.sup_distance = std::numeric_limits<double>::infinity();
    double ca = 0.0, wa = 0.95;
    double cr = pi, wr = pi;
    const std::size_t grid = 33, samples = 1024;
    for (std::size_t round = 0; round < rounds; ++round) {
        std::vector<MoebiusFit> row_best(grid);
        parallel_for(grid, [&](std::size_t ia) {
            MoebiusFit local;
            local.sup_distance = std::numeric_limits<double>::infinity();
            const double a =
                ca - wa + 2.0 * wa * static_cast<double>(ia) / static_cast<double>(grid - 1);
            if (std::abs(a) >= 0.95) {
                row_best[ia] = local;
                return;
            }
            for (std::size_t ir = 0; ir < grid; ++ir) {
                const double rot =
                    cr - wr + 2.0 * wr * static_cast<double>(ir) / static_cast<double>(grid - 1);
                const AngleMap cand = AngleMap::moebius({a, 0.0}, rot);
                const double d = wrapped_sup_distance(cand, target, samples);
                if (d < local.sup_distance) local = {a, rot, d};
            }
            row_best[ia] = local;
        });
        for (const auto& f : row_best)
            if (f.sup_distance < best.sup_distance) best = f;
        ca = best.a;
        cr = best.rot;
        wa *= 2.5 * 2.0 / static_cast<double>(grid - 1);
        wr *= 2.5 * 2.0 / static_cast<double>(grid - 1);
    }
    return best;
}

DescentTrace descend(const AngleMap& theta0, std::size_t K, std::size_t max_steps,
                     const QuadratureSpec& q) {
    if (K < 1 || K > 32) throw std::invalid_argument("descend: K must be in [1, 32]");
    require_variation_integrable(theta0);

    // project theta0(t) - t onto the first K sine modes
    std::vector<double> c(K, 0.0);
    {
        const std::size_t n = 2048;
        const double h = two_pi / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (static_cast<double>(i) + 0.5) * h;
            const double dev = theta0(t) - t;
            for (std::size_t k = 0; k < K; ++k)
                c[k] += dev * std::sin(static_cast<double>(k + 1) * t) * h / pi;
        }
    }

    const auto energy_of = [&](const AngleMap& m) { return conformal_energy(m, q).value; };
    const auto gradient_of = [&](const AngleMap& m) {
        const VariationGrid g = variation_grid(m, q.n);
        std::vector<double> grad(K);
        for (std::size_t k = 0; k < K; ++k) {
            Perturbation basis;
            basis.c.assign(k + 1, 0.0);
            basis.c[k] = 1.0;
            grad[k] = variation_from_grid(g, basis);
        }
        return grad;
    };
    const auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    DescentTrace trace;
    AngleMap cur = theta0;
    double energy = energy_of(cur);
    std::vector<double> grad = gradient_of(cur);
    double gnorm = norm(grad);
    trace.steps.push_back({0, energy, gnorm, 0.0});

    double step = 1.0;
    for (std::size_t it = 1; it <= max_steps && gnorm >= 1e-6; ++it) {
        bool accepted = false;
        while (step >= 1e-12) {
            std::vector<double> cand(K);
            for (std::size_t k = 0; k < K; ++k) cand[k] = c[k] - step * grad[k];
            try {
                const AngleMap m = AngleMap::sin_series(cand);
                const double e = energy_of(m);
                if (e < energy - 1e-14) {
                    c = cand;
                    cur = m;
                    energy = e;
                    accepted = true;
                    break;
                }
            } catch (const std::domain_error&) {
                // candidate lift not monotone: shrink like any rejected step
            }
            step *= 0.5;
        }
        if (!accepted) {
            trace.stalled = true;
            break;
        }
        grad = gradient_of(cur);
        gnorm = norm(grad);
        trace.steps.push_back({it, energy, gnorm, step});
        step *= 2.0;
    }
    trace.converged = gnorm < 1e-6;
    trace.final_coeffs = c;
    trace.final_energy = energy;
    trace.final_grad_norm = gnorm;

    const MoebiusFit fit = fit_moebius(cur);
    trace.fitted_a = fit.a;
    trace.fitted_rot = fit.rot;
    trace.fit_sup_distance = fit.sup_distance;
    return trace;
}

}  // namespace conf
