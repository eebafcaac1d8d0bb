#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conf/circle_map.hpp"
#include "conf/energy.hpp"

namespace conf {

/// Chordal cross ratio |a-b||c-d| / (|a-c||b-d|) of four pairwise distinct
/// points. Throws on (numerically) coincident points.
double cross_ratio(cplx a, cplx b, cplx c, cplx d);

/// Same, with the four points given as angles on the unit circle.
double cross_ratio_angles(double ta, double tb, double tc, double td);

/// Monotone distortion control eta : [0, inf] -> [0, inf] for the
/// quasi-Moebius condition cr_out <= eta(cr_in).
class DistortionGauge {
public:
    static DistortionGauge identity();
    static DistortionGauge linear(double alpha);  // eta(t) = alpha * t, alpha >= 1
    /// Strictly increasing positive (t, eta) pairs; evaluation interpolates
    /// linearly in log-log coordinates and extrapolates with the end slopes.
    static DistortionGauge tabulated(std::vector<std::pair<double, double>> pairs);

    double operator()(double t) const;
    std::string describe() const;

private:
    enum class Kind { identity, linear, tabulated };
    Kind kind_ = Kind::identity;
    double alpha_ = 1.0;
    std::vector<double> logt_, logeta_;
};

/// Sharp quasi-Moebius bound (1/pi) int_0^{pi/2} log eta(cot^2(t/2)) cos t dt,
/// by Gauss-Legendre panels on a geometric grid refined toward t = 0 until
/// the last panel contributes < 1e-12. gl_points is the rule order per panel.
double qm_energy_bound(const DistortionGauge& eta, std::size_t gl_points = 16);

struct EnvelopeBin {
    double t = 0.0;         // bin upper edge for cr_in
    double eta_hat = 0.0;   // max cr_out over samples with cr_in <= t
    std::size_t support = 0;  // samples whose cr_in falls in this bin
    bool interpolated = false;  // no direct support, value carried monotonically
};

struct EnvelopeReport {
    std::vector<EnvelopeBin> bins;
    double alpha_hat = 0.0;  // smallest alpha with cr_out <= alpha * cr_in on all samples
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double max_cr_out = 0.0;
    double min_cr_in = 0.0;

    /// Tabulated gauge over the supported bins, usable in qm_energy_bound.
    DistortionGauge gauge() const;
};

inline constexpr std::size_t envelope_bins = 64;
inline constexpr double envelope_t_min = 1e-4;
inline constexpr double envelope_t_max = 1e4;

/// Samples n_quadruples well-separated random quadruples (chordal separation
/// >= 1e-3, deterministic in seed) plus a fixed adversarial family of
/// near-degenerate quadruples, and returns the empirical cross-ratio
/// distortion envelope on 64 log-spaced bins.
EnvelopeReport cr_distortion_scan(const AngleMap& map, std::size_t n_quadruples,
                                  std::uint64_t seed);

struct BoundComparison {
    EnergyEstimate energy;
    double bound_envelope = 0.0;  // qm bound of the tabulated envelope gauge
    double bound_linear = 0.0;    // 1 + log(alpha_hat)/pi
    double gap_envelope = 0.0;    // bound_envelope - energy
    double gap_linear = 0.0;
    double tolerance = 0.0;  // energy err + envelope bin resolution
    bool envelope_ok = false;
    bool linear_ok = false;
};

/// Compares conformal_energy(map) against the bound evaluated on the scan's
/// envelope gauge and on its linear-alpha fit.
BoundComparison bound_vs_energy(const AngleMap& map, const QuadratureSpec& q,
                                const EnvelopeReport& scan);

}  // namespace conf
