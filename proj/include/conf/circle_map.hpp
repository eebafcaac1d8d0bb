#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "conf/numeric.hpp"

namespace conf {

/// A circle homeomorphism g(e^{it}) = e^{i theta(t)} represented by its
/// lifted angle function. The lift is strictly increasing, satisfies
/// theta(t + 2*pi) = theta(t) + 2*pi, and theta(0) lies in [0, 2*pi)
/// (zero for every built-in family except rotated Moebius maps).
class AngleMap {
public:
    static AngleMap identity();

    /// Boundary values of w -> e^{i rot} (w - a) / (1 - conj(a) w), |a| < 1.
    /// Throws std::domain_error when |a| >= 1.
    static AngleMap moebius(cplx a, double rot = 0.0);

    /// Piecewise-linear family: theta(t) = t/lambda on [0, lambda], then the
    /// affine branch through (lambda, 1) and (2*pi, 2*pi). lambda in (0, 1].
    static AngleMap pwl(double lambda);

    /// theta(t) = t^2 on [0, 1], theta(t) = t on [1, 2*pi].
    static AngleMap square();

    /// Monotone piecewise-linear interpolation of strictly increasing
    /// samples (t_i, theta_i) with t_0 = 0, theta_0 = 0 and
    /// t_last = theta_last = 2*pi. Throws std::invalid_argument listing the
    /// offending indices when the data is not strictly increasing.
    static AngleMap tabulated(std::vector<double> t, std::vector<double> theta);

    /// theta(t) = t + sum_k c[k-1] * sin(k t). Throws when the slope is not
    /// strictly positive on a dense grid.
    static AngleMap sin_series(std::vector<double> coeffs);

    /// Inverse lift. Closed form for identity, moebius, pwl and square;
    /// monotone bisection on the lift (tolerance 1e-12) otherwise.
    AngleMap inverse() const;

    /// outer after inner: theta(t) = theta_outer(theta_inner(t)).
    static AngleMap compose(AngleMap outer, AngleMap inner);

    /// Lifted angle at any real t.
    double operator()(double t) const;

    /// d theta / dt; closed form for analytic families, symmetric difference
    /// (h = 1e-6) otherwise.
    double derivative(double t) const;

    /// Image point e^{i theta(t)} on the unit circle.
    cplx circle_image(double t) const;

    std::string describe() const;

    bool is_moebius_kind() const;

    struct Impl;  // internal representation, defined in circle_map.cpp

private:
    explicit AngleMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Sampled diagnostics of an angle map lift.
struct MapDiagnostics {
    bool monotone_ok = false;
    bool endpoint_ok = false;
    double min_slope_estimate = 0.0;
    /// Smallest exponent p in {1, 2, 3} admitting a sampled lower bound
    /// |theta(x) - theta(y)| >= alpha |x - y|^p with alpha >= 1e-2, together
    /// with the fitted alpha (the minimum sampled ratio, so the bound holds
    /// on every sampled pair by construction).
    double hoelder_p = 0.0;
    double hoelder_alpha = 0.0;
    bool hoelder_ok = false;
    std::vector<std::size_t> offending_indices;  // non-monotone sample gaps
};

/// Grid diagnostics with n_samples >= 16 uniform samples of [0, 2*pi].
MapDiagnostics validate(const AngleMap& map, std::size_t n_samples);

/// Floor used by the Hoelder exponent fit in validate().
inline constexpr double hoelder_alpha_floor = 1e-2;

}  // namespace conf
