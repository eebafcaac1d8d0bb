#pragma once

#include <cstddef>
#include <string>

#include "conf/circle_map.hpp"
#include "conf/numeric.hpp"

namespace conf {

enum class QuadScheme {
    midpoint_subtracted,  // identity-kernel subtraction, diagonal via log(theta')
    midpoint_excluded,    // staggered plain rule, no subtraction (oracle scheme)
};

std::string scheme_name(QuadScheme s);

struct QuadratureSpec {
    std::size_t n = 256;  // nodes per axis, >= 64
    QuadScheme scheme = QuadScheme::midpoint_subtracted;
    std::size_t refine = 1;  // doubling levels used for the error estimate, >= 1
};

struct EnergyEstimate {
    double value = 0.0;
    double err = 0.0;  // |last doubling difference|
    std::size_t n_used = 0;
    std::string method;
};

/// Conformal energy
///   E(g) = 1 - (1/2 pi^2) double-integral log| sin(dtheta/2) / sin(dt/2) | cos(t-s) dt ds,
/// evaluated on the requested grid and each doubling up to q.refine; the
/// reported err is the last doubling difference. Throws on degenerate maps
/// (min sampled slope < 1e-8, or theta values colliding off-diagonal).
EnergyEstimate conformal_energy(const AngleMap& map, const QuadratureSpec& q);

/// Structurally independent check: staggered midpoint tensor rule on
///   -(1/2 pi^2) log|2 sin(dtheta/2)| cos(t-s)
/// with nodes t_i = (i+1/4)h, s_j = (j+3/4)h, so the singular diagonal is
/// never sampled and no subtraction is applied. First-order accurate.
double energy_oracle(const AngleMap& map, std::size_t n);

/// Numerical value of integral_0^{2pi} log|2 sin(u/2)| cos(ku) du
/// (exact value -pi/k), via the integrated-by-parts smooth form
/// -(1/2k) integral cot(u/2) sin(ku) du and the midpoint rule.
double log_sin_moment(std::size_t k, std::size_t n);

/// |E(phi o map) - E(map)| for a Moebius-kind phi; Lemma-style invariance
/// says this is zero up to quadrature error.
double invariance_gap(const AngleMap& map, const AngleMap& phi, const QuadratureSpec& q);

/// Two-sided energy bounds under bilipschitz post-composition, plus the
/// standalone bound on E(f) itself in both the literature form
/// (1/2 pi^2) log L (which contradicts E >= 1 as L -> 1) and the corrected
/// form 1 + (1/2 pi^2) log L.
struct BilipReport {
    double L = 1.0;
    std::size_t cert_samples = 0;
    double ratio_max = 0.0;  // observed chordal expansion of f
    double ratio_min = 0.0;  // observed chordal contraction of f
    bool certified = false;
    EnergyEstimate e_g, e_fg, e_f;
    double lower_bound = 0.0;  // max{1, E(g) - (1/pi^2) log L}
    double upper_bound = 0.0;  // E(g) + (1/2 pi^2) log L
    bool lower_ok = false;
    bool upper_ok = false;
    double standalone_printed = 0.0;  // (1/2 pi^2) log L
    bool standalone_printed_holds = false;
    double standalone_corrected = 0.0;  // 1 + (1/2 pi^2) log L
    bool standalone_corrected_holds = false;
};

/// Certifies f as L-bilipschitz by a chordal ratio scan over cert_samples
/// uniform points (all pairs), then evaluates E(g), E(f o g), E(f) and the
/// bounds above. Throws if the certificate fails for the supplied L.
BilipReport bilip_bounds_report(const AngleMap& f, const AngleMap& g, double L,
                                const QuadratureSpec& q, std::size_t cert_samples = 1024);

}  // namespace conf
