#pragma once

#include <cstddef>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/numeric.hpp"

namespace conf {

/// Fourier coefficients c_k, k = -M..M, of the circle-valued boundary
/// function s -> e^{i theta(s)}.
struct FourierBoundary {
    std::size_t truncation = 0;          // M
    std::vector<cplx> coefficients;      // 2M+1 entries, index k + M
    std::size_t samples = 0;             // DFT length actually used
    double parseval_sum = 0.0;           // sum_{|k| <= M} |c_k|^2
    double tail_energy = 0.0;            // geometric estimate beyond M
    bool tail_decaying = true;           // false -> aliasing advisory

    cplx coeff(long k) const;
};

/// DFT of s -> e^{i theta(s)} on n_samples uniform points, n_samples
/// rounded up to a power of two and to at least max(8M, 8192).
/// Requires M >= 16.
FourierBoundary boundary_fourier(const AngleMap& map, std::size_t M,
                                 std::size_t n_samples = 0);

/// sum_k |k| |c_k|^2, which is (1/pi) times the Wirtinger Dirichlet
/// integral of the harmonic extension of the boundary data. Throws when
/// the weighted octave sums fail to decay (infinite-energy report).
double douglas_energy(const FourierBoundary& fb);

/// douglas_energy(boundary_fourier(map.inverse(), M)): the energy of map
/// recovered from the harmonic extension of its inverse boundary values.
double extension_energy(const AngleMap& map, std::size_t M = 512);

struct GridSpec {
    std::size_t nr = 256;      // radial cells
    std::size_t nphi = 512;    // angular cells (rounded up to a power of two)
    /// Midpoint radii by default; Gauss-Legendre nodes in u = r^2 when set,
    /// making the weighted sums exact for polynomial integrands of degree
    /// < 2 nr in u (used by the deformation-curve endpoints).
    bool gauss_radial = false;
};

/// Harmonic extension H(w) = sum_{k>=0} c_k w^k + sum_{k>0} c_{-k} wbar^k
/// sampled on a polar grid, with Wirtinger derivatives, Jacobian
/// J = |H_w|^2 - |H_wbar|^2 and second Beltrami field nu = conj(H_wbar)/H_w.
struct DiskField {
    std::size_t nr = 0, nphi = 0;
    std::vector<double> r;         // nr radii, all <= 1 - 1/(2 nr) in midpoint mode
    std::vector<double> r_weight;  // radial quadrature weight including the r dr factor
    // row-major nr x nphi
    std::vector<cplx> H, Hw, Hwb, nu;
    std::vector<double> J;
    std::vector<unsigned char> flagged;  // H_w ~ 0, J <= 0 or |nu| >= 1
    std::size_t flag_count = 0;
    double max_abs_nu = 0.0;  // over unflagged points
    double min_J = 0.0;

    double cell_weight(std::size_t i) const { return r_weight[i] * two_pi / static_cast<double>(nphi); }
};

DiskField poisson_field(const FourierBoundary& fb, const GridSpec& grid = {});

/// Max modulus of a centered-difference Wirtinger dbar derivative of nu
/// over interior unflagged grid points with r <= r_max; decays under
/// refinement when nu is holomorphic there. Restrict r_max away from 1
/// when nu has boundary singularities, otherwise refinement samples ever
/// worse spots.
double nu_holomorphy_residual(const DiskField& f, double r_max = 1.0);

/// B(t) = (1/pi) sum_grid (1 + t^2 |nu|^2) / (1 - t^2 |nu|^2) * J * cell area.
struct DeformationCurve {
    std::vector<double> t;
    std::vector<double> B;
    double b0 = 0.0;            // value at t = 0, i.e. (1/pi) integral of J
    double limit_value = 0.0;   // t -> 1 limit, (1/pi) integral of |H_w|^2 + |H_wbar|^2
    double limit_identity_gap = 0.0;  // max pointwise |(1+|nu|^2)/(1-|nu|^2) J - (|H_w|^2+|H_wbar|^2)|
    bool strictly_increasing = false;
    bool truncated = false;     // t^2 |nu|^2 >= 1 hit at an unflagged point
};

/// Flagged grid points contribute with distortion factor 1 (their J only).
/// Requires t values in [0, 1), increasing.
DeformationCurve deformation_bound_curve(const DiskField& f, const std::vector<double>& t_grid);

/// Analytic dB/dt = (1/pi) sum 4 t |nu|^2 / (1 - t^2 |nu|^2)^2 * J * cell area.
double deformation_rate(const DiskField& f, double t);

/// Closed-form boundary coefficient of the moebius(a, rot) circle map:
/// c_0 = -a e^{i rot}, c_m = (1-|a|^2) conj(a)^{m-1} e^{i rot} for m >= 1.
cplx moebius_boundary_coeff(cplx a, double rot, long k);

}  // namespace conf
