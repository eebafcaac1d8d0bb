#pragma once

#include <cstddef>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/energy.hpp"

namespace conf {

/// Smooth perturbation phi(t) = sum_k c[k-1] sin(kt); vanishes at 0 and 2*pi
/// by construction.
struct Perturbation {
    std::vector<double> c;

    double operator()(double t) const;
    double derivative(double t) const;
    /// Copy rescaled so max |phi'| = 1 on a dense grid.
    Perturbation unit_slope() const;
};

/// Throws unless the double integral of |x-y| / |theta(x)-theta(y)| is
/// numerically convergent (its doubling increments shrink); this is the
/// integrability certificate required before evaluating the first variation.
void require_variation_integrable(const AngleMap& theta);

/// d/dt E(theta + t phi) at t = 0:
///   -(1/4 pi^2) int int cot[(theta(x)-theta(y))/2] (phi(x)-phi(y)) cos(x-y) dx dy
/// with the diagonal handled by its limit 2 phi'(x)/theta'(x). Midpoint
/// tensor rule at q.n nodes per axis.
double first_variation(const AngleMap& theta, const Perturbation& phi, const QuadratureSpec& q);

/// Critical-point residual
///   R(y) = int_{-pi}^{pi} (cot[(theta(y)-theta(y-x))/2]
///                          - cot[(theta(y+x)-theta(y))/2]) cos x dx,
/// which vanishes at energy-critical homeomorphisms. The integrand is even,
/// so by default the (0, pi] half is integrated on geometric Gauss-Legendre
/// panels (refined to x = 1e-4, closed by a rectangle rule) and doubled;
/// use_evenness = false evaluates both halves independently. Throws when the
/// panel sums grow toward x = 0 (integral not numerically convergent).
double critical_residual(const AngleMap& theta, double y, const QuadratureSpec& q,
                         bool use_evenness = true);

/// Same residual through the substitution u = tan((theta - theta(y))/2)
/// (recentred at y so the evaluation window avoids the tangent pole):
///   int_{-pi}^{pi} (1/(u(y+x)-u(y)) - 1/(u(y)-u(y-x))) cos x dx.
/// Equals -critical_residual(theta, y) identically; the sign is the factor
/// the substitution chain drops.
double u_form_residual(const AngleMap& theta, double y, const QuadratureSpec& q);

struct ResidualProfile {
    std::vector<double> y;
    std::vector<double> residual;
    std::size_t resolution = 0;  // quadrature nodes per axis used
    double max_abs = 0.0;
};

ResidualProfile residual_profile(const AngleMap& theta, std::size_t n_grid,
                                 const QuadratureSpec& q);

struct DescentStep {
    std::size_t step = 0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double step_size = 0.0;
};

struct DescentTrace {
    std::vector<DescentStep> steps;  // energies non-increasing over accepted steps
    std::vector<double> final_coeffs;
    double final_energy = 0.0;
    double final_grad_norm = 0.0;
    bool converged = false;  // gradient norm < 1e-6 reached
    bool stalled = false;    // line search hit the monotonicity boundary
    double fitted_a = 0.0;   // nearest Moebius boundary map, real axis parameter
    double fitted_rot = 0.0;
    double fit_sup_distance = 0.0;
};

/// Steepest descent on the coefficients of theta(t) = t + sum c_k sin(kt),
/// gradient components g_k = first_variation(theta, sin(kt)), backtracking
/// line search that rejects non-monotone iterates. theta0 is projected onto
/// the first K sine modes (K <= 32). Finishes by fitting the nearest
/// real-parameter Moebius map (a, rot) in sup-norm on the lift.
DescentTrace descend(const AngleMap& theta0, std::size_t K, std::size_t max_steps,
                     const QuadratureSpec& q);

/// Coarse-to-fine sup-norm fit of moebius(a, rot), a real in (-0.95, 0.95),
/// against the given lift; returns (a, rot, sup_distance).
struct MoebiusFit {
    double a = 0.0;
    double rot = 0.0;
    double sup_distance = 0.0;
};
MoebiusFit fit_moebius(const AngleMap& target, std::size_t rounds = 6);

}  // namespace conf
