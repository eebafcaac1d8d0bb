#include "conf/energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace conf {

namespace {

constexpr double pi = two_pi / 2.0;
constexpr double inv_two_pi_sq = 1.0 / (2.0 * pi * pi);

void reject_degenerate(const AngleMap& map, std::size_t n) {
    const double h = two_pi / static_cast<double>(n);
    double prev = map(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = map(static_cast<double>(i) * h);
        if ((cur - prev) / h < 1e-8) {
            std::ostringstream os;
            os << "degenerate map (sampled slope " << (cur - prev) / h << " < 1e-8 near t = "
               << static_cast<double>(i) * h << "); run validate() for diagnostics";
            throw std::domain_error(os.str());
        }
        prev = cur;
    }
}

[[noreturn]] void throw_collision(std::size_t i, std::size_t j, double ti, double sj) {
    std::ostringstream os;
    os << "degenerate map: theta collides off-diagonal at node pair (" << i << ", " << j
       << "), t = " << ti << ", s = " << sj;
    throw std::domain_error(os.str());
}

double grid_energy_subtracted(const AngleMap& map, std::size_t n) {
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> th(n), ct(n), st(n), diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) * h;
        th[i] = map(t);
        ct[i] = std::cos(t);
        st[i] = std::sin(t);
        diag[i] = std::log((map(t + 0.5 * h) - map(t - 0.5 * h)) / h);
    }
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                row[j] = diag[i];
                continue;
            }
            const double sdt = std::sin(0.5 * (static_cast<double>(i) - static_cast<double>(j)) * h);
            const double sdth = std::sin(0.5 * (th[i] - th[j]));
            if (sdth == 0.0)
                throw_collision(i, j, (static_cast<double>(i) + 0.5) * h,
                                (static_cast<double>(j) + 0.5) * h);
            const double cosdt = ct[i] * ct[j] + st[i] * st[j];
            row[j] = std::log(std::abs(sdth / sdt)) * cosdt;
        }
        rows[i] = pairwise_sum(row);
    });
    return 1.0 - inv_two_pi_sq * h * h * pairwise_sum(rows);
}

double grid_energy_staggered(const AngleMap& map, std::size_t n) {
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> tha(n), thb(n), ca(n), sa(n), cb(n), sb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.25) * h;
        const double s = (static_cast<double>(i) + 0.75) * h;
        tha[i] = map(t);
        thb[i] = map(s);
        ca[i] = std::cos(t);
        sa[i] = std::sin(t);
        cb[i] = std::cos(s);
        sb[i] = std::sin(s);
    }
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double sdth = std::sin(0.5 * (tha[i] - thb[j]));
            if (sdth == 0.0)
                throw_collision(i, j, (static_cast<double>(i) + 0.25) * h,
                                (static_cast<double>(j) + 0.75) * h);
            const double cosdt = ca[i] * cb[j] + sa[i] * sb[j];
            row[j] = std::log(std::abs(2.0 * sdth)) * cosdt;
        }
        rows[i] = pairwise_sum(row);
    });
    return -inv_two_pi_sq * h * h * pairwise_sum(rows);
}

double grid_energy(const AngleMap& map, std::size_t n, QuadScheme scheme) {
    return scheme == QuadScheme::midpoint_subtracted ? grid_energy_subtracted(map, n)
                                                     : grid_energy_staggered(map, n);
}

}  // namespace

std::string scheme_name(QuadScheme s) {
    return s == QuadScheme::midpoint_subtracted ? "midpoint-subtracted" : "midpoint-excluded";
}

EnergyEstimate conformal_energy(const AngleMap& map, const QuadratureSpec& q) {
    if (q.n < 64) throw std::invalid_argument("conformal_energy: n must be >= 64");
    if (q.refine < 1) throw std::invalid_argument("conformal_energy: refine must be >= 1");
    reject_degenerate(map, q.n);
    double prev = grid_energy(map, q.n, q.scheme);
    std::size_t n = q.n;
    double cur = prev;
    for (std::size_t level = 0; level < q.refine; ++level) {
        n *= 2;
        cur = grid_energy(map, n, q.scheme);
        prev = (level + 1 == q.refine) ? prev : cur;
    }
    EnergyEstimate e;
    e.value = cur;
    e.err = std::abs(cur - prev);
    e.n_used = n;
    e.method = scheme_name(q.scheme);
    return e;
}

double energy_oracle(const AngleMap& map, std::size_t n) {
    if (n < 64) throw std::invalid_argument("energy_oracle: n must be >= 64");
    reject_degenerate(map, n);
    return grid_energy_staggered(map, n);
}

double log_sin_moment(std::size_t k, std::size_t n) {
    if (k < 1) throw std::invalid_argument("log_sin_moment: k must be >= 1");
    if (n < 8) throw std::invalid_argument("log_sin_moment: n must be >= 8");
    // Integration by parts removes the log singularity:
    //   int log|2 sin(u/2)| cos(ku) du = -(1/2k) int cot(u/2) sin(ku) du,
    // and the right-hand integrand extends smoothly and periodically.
    const double kk = static_cast<double>(k);
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) * h;
        vals[i] = std::sin(kk * u) / std::tan(0.5 * u);
    }
    return -(1.0 / (2.0 * kk)) * h * pairwise_sum(vals);
}

double invariance_gap(const AngleMap& map, const AngleMap& phi, const QuadratureSpec& q) {
    if (!phi.is_moebius_kind())
        throw std::invalid_argument("invariance_gap: phi must be a Moebius boundary map, got " +
                                    phi.describe());
    const double base = conformal_energy(map, q).value;
    const double composed = conformal_energy(AngleMap::compose(phi, map), q).value;
    return std::abs(composed - base);
}

BilipReport bilip_bounds_report(const AngleMap& f, const AngleMap& g, double L,
                                const QuadratureSpec& q, std::size_t cert_samples) {
    if (L < 1.0) throw std::invalid_argument("bilip_bounds_report: L must be >= 1");
    if (cert_samples < 16)
        throw std::invalid_argument("bilip_bounds_report: cert_samples must be >= 16");

    BilipReport r;
    r.L = L;
    r.cert_samples = cert_samples;

    const std::size_t m = cert_samples;
    std::vector<cplx> pts(m), img(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) * two_pi / static_cast<double>(m);
        pts[i] = cplx(std::cos(t), std::sin(t));
        img[i] = f.circle_image(t);
    }
    std::vector<double> row_max(m, 0.0), row_min(m, std::numeric_limits<double>::infinity());
    parallel_for(m, [&](std::size_t i) {
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < m; ++j) {
            const double ratio = std::abs(img[i] - img[j]) / std::abs(pts[i] - pts[j]);
            mx = std::max(mx, ratio);
            mn = std::min(mn, ratio);
        }
        row_max[i] = mx;
        row_min[i] = mn;
    });
    r.ratio_max = 0.0;
    r.ratio_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        r.ratio_max = std::max(r.ratio_max, row_max[i]);
        r.ratio_min = std::min(r.ratio_min, row_min[i]);
    }
    const double slack = 1e-9;
    r.certified = r.ratio_max <= L + slack && r.ratio_min >= 1.0 / L - slack;
    if (!r.certified) {
        std::ostringstream os;
        os << "bilipschitz certificate failed for L = " << L << ": observed chordal ratios in ["
           << r.ratio_min << ", " << r.ratio_max << "] over " << m << " samples";
        throw std::domain_error(os.str());
    }

    r.e_g = conformal_energy(g, q);
    r.e_fg = conformal_energy(AngleMap::compose(f, g), q);
    r.e_f = conformal_energy(f, q);

    const double logL = std::log(L);
    r.lower_bound = std::max(1.0, r.e_g.value - logL / (pi * pi));
    r.upper_bound = r.e_g.value + inv_two_pi_sq * logL;
    const double tol = r.e_g.err + r.e_fg.err + 1e-9;
    r.lower_ok = r.e_fg.value >= r.lower_bound - tol;
    r.upper_ok = r.e_fg.value <= r.upper_bound + tol;

    r.standalone_printed = inv_two_pi_sq * logL;
    r.standalone_printed_holds = r.e_f.value <= r.standalone_printed + r.e_f.err + 1e-9;
    r.standalone_corrected = 1.0 + inv_two_pi_sq * logL;
    r.standalone_corrected_holds = r.e_f.value <= r.standalone_corrected + r.e_f.err + 1e-9;
    return r;
}

}  // namespace conf
