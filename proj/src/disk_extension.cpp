#include "conf/disk_extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conf {

namespace {

// Energy carried by coefficients with |k| in (lo, hi], optionally weighted
// by |k| (the Douglas weight).
double band_energy(const FourierBoundary& fb, std::size_t lo, std::size_t hi, bool weighted) {
    double s = 0.0;
    for (std::size_t k = lo + 1; k <= hi; ++k) {
        const double w = weighted ? static_cast<double>(k) : 1.0;
        s += w * std::norm(fb.coeff(static_cast<long>(k)));
        s += w * std::norm(fb.coeff(-static_cast<long>(k)));
    }
    return s;
}

}  // namespace

cplx FourierBoundary::coeff(long k) const {
    const long m = static_cast<long>(truncation);
    if (k < -m || k > m) return {0.0, 0.0};
    return coefficients[static_cast<std::size_t>(k + m)];
}

FourierBoundary boundary_fourier(const AngleMap& map, std::size_t M, std::size_t n_samples) {
    if (M < 16) throw std::invalid_argument("boundary_fourier: truncation must be >= 16");
    const std::size_t N = next_pow2(std::max({n_samples, 8 * M, std::size_t{8192}}));

    std::vector<cplx> data(N);
    parallel_for(N, [&](std::size_t j) {
        data[j] = map.circle_image(static_cast<double>(j) * two_pi / static_cast<double>(N));
    });
    fft_radix2(data);

    FourierBoundary fb;
    fb.truncation = M;
    fb.samples = N;
    fb.coefficients.resize(2 * M + 1);
    const double scale = 1.0 / static_cast<double>(N);
    for (std::size_t k = 0; k <= M; ++k) {
        fb.coefficients[M + k] = data[k] * scale;
        if (k > 0) fb.coefficients[M - k] = data[N - k] * scale;
    }

    std::vector<double> sq(fb.coefficients.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(fb.coefficients[i]);
    fb.parseval_sum = pairwise_sum(sq);

    // Geometric tail estimate from the last two coefficient octaves.
    const double e_last = band_energy(fb, M / 2, M, false);
    const double e_prev = band_energy(fb, M / 4, M / 2, false);
    fb.tail_decaying = e_last <= e_prev || e_last <= 1e-24;
    if (fb.tail_decaying && e_prev > 0.0 && e_last > 0.0) {
        const double rho = std::min(e_last / e_prev, 1.0 - 1e-9);
        fb.tail_energy = e_last * rho / (1.0 - rho);
    } else {
        fb.tail_energy = e_last;
    }
    return fb;
}

double douglas_energy(const FourierBoundary& fb) {
    const std::size_t M = fb.truncation;
    const double w_last = band_energy(fb, M / 2, M, true);
    const double w_prev = band_energy(fb, M / 4, M / 2, true);
    if (w_last > w_prev && w_last > 1e-12) {
        std::ostringstream os;
        os << "douglas_energy: weighted octave sums grow (" << w_prev << " -> " << w_last
           << " near k = " << M << "); the Douglas sum looks divergent, energy infinite";
        throw std::runtime_error(os.str());
    }
    std::vector<double> terms(fb.coefficients.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double k = std::abs(static_cast<double>(i) - static_cast<double>(M));
        terms[i] = k * std::norm(fb.coefficients[i]);
    }
    return pairwise_sum(terms);
}

double extension_energy(const AngleMap& map, std::size_t M) {
    return douglas_energy(boundary_fourier(map.inverse(), M));
}

DiskField poisson_field(const FourierBoundary& fb, const GridSpec& grid) {
    if (grid.nr < 2) throw std::invalid_argument("poisson_field: need at least 2 radial cells");
    const std::size_t nr = grid.nr;
    const std::size_t nphi = next_pow2(std::max<std::size_t>(grid.nphi, 8));
    const std::size_t M = fb.truncation;

    DiskField f;
    f.nr = nr;
    f.nphi = nphi;
    f.r.resize(nr);
    f.r_weight.resize(nr);
    if (grid.gauss_radial) {
        // Nodes in u = r^2: integral f(r) r dr = (1/2) integral f(sqrt u) du.
        const GaussLegendre gl(nr);
        for (std::size_t i = 0; i < nr; ++i) {
            const double u = 0.5 * (gl.nodes[i] + 1.0);
            f.r[i] = std::sqrt(u);
            f.r_weight[i] = gl.weights[i] / 4.0;
        }
    } else {
        const double dr = 1.0 / static_cast<double>(nr);
        for (std::size_t i = 0; i < nr; ++i) {
            f.r[i] = (static_cast<double>(i) + 0.5) * dr;
            f.r_weight[i] = f.r[i] * dr;
        }
    }

    const std::size_t cells = nr * nphi;
    f.H.resize(cells);
    f.Hw.resize(cells);
    f.Hwb.resize(cells);
    f.nu.resize(cells);
    f.J.resize(cells);
    f.flagged.assign(cells, 0);

    parallel_for(nr, [&](std::size_t i) {
        const double r = f.r[i];
        // Spectra of H, H_w, H_wbar along the circle of radius r; an inverse
        // FFT turns each into exact samples (wrapped bins alias correctly).
        std::vector<cplx> sH(nphi), sHw(nphi), sHwb(nphi);
        double rk = 1.0;  // r^k
        for (std::size_t k = 0; k <= M; ++k) {
            const cplx cp = fb.coeff(static_cast<long>(k));
            const cplx cm = fb.coeff(-static_cast<long>(k));
            sH[k % nphi] += cp * rk;
            if (k > 0) {
                sH[(nphi - k % nphi) % nphi] += cm * rk;
                const double krk1 = static_cast<double>(k) * (k == 1 ? 1.0 : rk / r);
                sHw[(k - 1) % nphi] += cp * krk1;
                sHwb[(nphi - (k - 1) % nphi) % nphi] += cm * krk1;
            }
            rk *= r;
        }
        auto synth = [](std::vector<cplx>& v) {
            for (auto& z : v) z = std::conj(z);
            fft_radix2(v);
            for (auto& z : v) z = std::conj(z);
        };
        synth(sH);
        synth(sHw);
        synth(sHwb);
        for (std::size_t j = 0; j < nphi; ++j) {
            const std::size_t idx = i * nphi + j;
            f.H[idx] = sH[j];
            f.Hw[idx] = sHw[j];
            f.Hwb[idx] = sHwb[j];
            const double a2 = std::norm(sHw[j]);
            const double b2 = std::norm(sHwb[j]);
            f.J[idx] = a2 - b2;
            if (std::sqrt(a2) < 1e-13) {
                f.flagged[idx] = 1;
                f.nu[idx] = {0.0, 0.0};
            } else {
                f.nu[idx] = std::conj(sHwb[j]) / sHw[j];
                if (f.J[idx] <= 0.0 || std::abs(f.nu[idx]) >= 1.0) f.flagged[idx] = 1;
            }
        }
    });

    f.min_J = f.J[0];
    for (std::size_t idx = 0; idx < cells; ++idx) {
        f.min_J = std::min(f.min_J, f.J[idx]);
        if (f.flagged[idx]) {
            ++f.flag_count;
        } else {
            f.max_abs_nu = std::max(f.max_abs_nu, std::abs(f.nu[idx]));
        }
    }
    return f;
}

double nu_holomorphy_residual(const DiskField& f, double r_max) {
    // dbar in polar coordinates: (e^{i phi}/2)(d/dr + (i/r) d/dphi).
    const double dphi = two_pi / static_cast<double>(f.nphi);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < f.nr; ++i) {
        if (f.r[i + 1] > r_max) continue;
        const double dr2 = f.r[i + 1] - f.r[i - 1];
        for (std::size_t j = 0; j < f.nphi; ++j) {
            const std::size_t jm = (j + f.nphi - 1) % f.nphi;
            const std::size_t jp = (j + 1) % f.nphi;
            const std::size_t c = i * f.nphi + j;
            const std::size_t up = (i + 1) * f.nphi + j;
            const std::size_t dn = (i - 1) * f.nphi + j;
            if (f.flagged[c] || f.flagged[up] || f.flagged[dn] ||
                f.flagged[i * f.nphi + jp] || f.flagged[i * f.nphi + jm])
                continue;
            const cplx d_r = (f.nu[up] - f.nu[dn]) / dr2;
            const cplx d_phi = (f.nu[i * f.nphi + jp] - f.nu[i * f.nphi + jm]) / (2.0 * dphi);
            const cplx res = 0.5 * (d_r + cplx(0.0, 1.0) / f.r[i] * d_phi);
            worst = std::max(worst, std::abs(res));
        }
    }
    return worst;
}

namespace {

constexpr double pi = two_pi / 2.0;

// (1/pi) sum of per-cell values, fixed-order pairwise for reproducibility.
double field_sum(const DiskField& f, const std::function<double(std::size_t)>& cell) {
    std::vector<double> terms(f.nr * f.nphi);
    parallel_for(f.nr, [&](std::size_t i) {
        for (std::size_t j = 0; j < f.nphi; ++j) {
            const std::size_t idx = i * f.nphi + j;
            terms[idx] = f.cell_weight(i) * cell(idx);
        }
    });
    return pairwise_sum(terms) / pi;
}

}  // namespace

DeformationCurve deformation_bound_curve(const DiskField& f, const std::vector<double>& t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || t_grid[i] >= 1.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
            throw std::invalid_argument("deformation_bound_curve: t grid must increase within [0, 1)");
    }

    DeformationCurve c;
    c.b0 = field_sum(f, [&](std::size_t idx) { return f.J[idx]; });
    c.limit_value = field_sum(f, [&](std::size_t idx) {
        return f.flagged[idx] ? f.J[idx] : std::norm(f.Hw[idx]) + std::norm(f.Hwb[idx]);
    });
    double gap = 0.0;
    for (std::size_t idx = 0; idx < f.J.size(); ++idx) {
        if (f.flagged[idx]) continue;
        const double n2 = std::norm(f.nu[idx]);
        gap = std::max(gap, std::abs((1.0 + n2) / (1.0 - n2) * f.J[idx] -
                                     (std::norm(f.Hw[idx]) + std::norm(f.Hwb[idx]))));
    }
    c.limit_identity_gap = gap;

    for (double t : t_grid) {
        const double t2 = t * t;
        bool hit = false;
        for (std::size_t idx = 0; idx < f.J.size() && !hit; ++idx)
            if (!f.flagged[idx] && t2 * std::norm(f.nu[idx]) >= 1.0) hit = true;
        if (hit) {
            c.truncated = true;
            break;
        }
        c.t.push_back(t);
        c.B.push_back(field_sum(f, [&](std::size_t idx) {
            if (f.flagged[idx]) return f.J[idx];
            const double n2 = std::norm(f.nu[idx]);
            return (1.0 + t2 * n2) / (1.0 - t2 * n2) * f.J[idx];
        }));
    }

    c.strictly_increasing = c.B.size() >= 2;
    for (std::size_t i = 1; i < c.B.size(); ++i)
        if (c.B[i] <= c.B[i - 1]) c.strictly_increasing = false;
    return c;
}

double deformation_rate(const DiskField& f, double t) {
    if (t < 0.0 || t >= 1.0)
        throw std::invalid_argument("deformation_rate: t must lie in [0, 1)");
    const double t2 = t * t;
    return field_sum(f, [&](std::size_t idx) {
        if (f.flagged[idx]) return 0.0;
        const double n2 = std::norm(f.nu[idx]);
        const double d = 1.0 - t2 * n2;
        return 4.0 * t * n2 / (d * d) * f.J[idx];
    });
}

cplx moebius_boundary_coeff(cplx a, double rot, long k) {
    const cplx phase = std::polar(1.0, rot);
    if (k < 0) return {0.0, 0.0};
    if (k == 0) return -a * phase;
    cplx p(1.0, 0.0);
    for (long m = 1; m < k; ++m) p *= std::conj(a);
    return (1.0 - std::norm(a)) * p * phase;
}

}  // namespace conf
