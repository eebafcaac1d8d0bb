#include "conf/cross_ratio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace conf {

namespace {

constexpr double pi = two_pi / 2.0;

cplx on_circle(double t) { return cplx(std::cos(t), std::sin(t)); }

}  // namespace

double cross_ratio(cplx a, cplx b, cplx c, cplx d) {
    const cplx pts[4] = {a, b, c, d};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(pts[i] - pts[j]) < 1e-14) {
                std::ostringstream os;
                os << "degenerate quadruple: points " << i << " and " << j << " coincide";
                throw std::domain_error(os.str());
            }
    return (std::abs(a - b) * std::abs(c - d)) / (std::abs(a - c) * std::abs(b - d));
}

double cross_ratio_angles(double ta, double tb, double tc, double td) {
    return cross_ratio(on_circle(ta), on_circle(tb), on_circle(tc), on_circle(td));
}

DistortionGauge DistortionGauge::identity() { return DistortionGauge{}; }

DistortionGauge DistortionGauge::linear(double alpha) {
    if (!(alpha >= 1.0))
        throw std::domain_error("linear gauge requires alpha >= 1, got " + std::to_string(alpha));
    DistortionGauge g;
    g.kind_ = Kind::linear;
    g.alpha_ = alpha;
    return g;
}

DistortionGauge DistortionGauge::tabulated(std::vector<std::pair<double, double>> pairs) {
    if (pairs.size() < 2) throw std::invalid_argument("tabulated gauge needs >= 2 pairs");
    DistortionGauge g;
    g.kind_ = Kind::tabulated;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [t, eta] = pairs[i];
        if (!(t > 0.0) || !(eta > 0.0))
            throw std::domain_error("tabulated gauge needs positive (t, eta) pairs");
        if (i > 0 && (!(t > pairs[i - 1].first) || eta < pairs[i - 1].second))
            throw std::domain_error("tabulated gauge pairs must be increasing");
        g.logt_.push_back(std::log(t));
        g.logeta_.push_back(std::log(eta));
    }
    return g;
}

double DistortionGauge::operator()(double t) const {
    if (!(t >= 0.0)) throw std::domain_error("gauge argument must be >= 0");
    switch (kind_) {
        case Kind::identity:
            return t;
        case Kind::linear:
            return alpha_ * t;
        case Kind::tabulated:
            break;
    }
    if (t == 0.0) return 0.0;
    const double x = std::log(t);
    const std::size_t m = logt_.size();
    std::size_t i;
    if (x <= logt_.front())
        i = 0;
    else if (x >= logt_.back())
        i = m - 2;
    else
        i = static_cast<std::size_t>(std::upper_bound(logt_.begin(), logt_.end(), x) -
                                     logt_.begin()) - 1;
    const double dt = logt_[i + 1] - logt_[i];
    const double slope = dt > 0.0 ? (logeta_[i + 1] - logeta_[i]) / dt : 0.0;
    return std::exp(logeta_[i] + slope * (x - logt_[i]));
}

std::string DistortionGauge::describe() const {
    switch (kind_) {
        case Kind::identity:
            return "identity";
        case Kind::linear: {
            std::ostringstream os;
            os << "linear:alpha=" << alpha_;
            return os.str();
        }
        case Kind::tabulated:
            break;
    }
    std::ostringstream os;
    os << "tabulated:<" << logt_.size() << " pairs>";
    return os.str();
}

double qm_energy_bound(const DistortionGauge& eta, std::size_t gl_points) {
    if (gl_points < 2) throw std::invalid_argument("qm_energy_bound: gl_points must be >= 2");
    const GaussLegendre gl(gl_points);
    std::vector<double> panels;
    double hi = pi / 2.0;
    for (int k = 0; k < 400; ++k) {
        const double lo = hi * 0.5;
        double s = 0.0;
        for (std::size_t i = 0; i < gl_points; ++i) {
            const double t = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl.nodes[i];
            const double c = std::tan(0.5 * t);
            const double v = eta(1.0 / (c * c));
            if (!(v > 0.0))
                throw std::domain_error("qm_energy_bound: gauge non-positive at cr argument " +
                                        std::to_string(1.0 / (c * c)));
            s += gl.weights[i] * std::log(v) * std::cos(t);
        }
        s *= 0.5 * (hi - lo);
        panels.push_back(s);
        if (std::abs(s) < 1e-12) break;
        hi = lo;
    }
    std::reverse(panels.begin(), panels.end());
    return pairwise_sum(panels) / pi;
}

namespace {

// First bin whose upper edge is >= cr_in, so eta_hat(t) really is the
// max over samples with cr_in <= t.
std::size_t envelope_bin_index(double cr_in) {
    const double x = envelope_bins *
                     (std::log10(cr_in) - std::log10(envelope_t_min)) /
                     (std::log10(envelope_t_max) - std::log10(envelope_t_min));
    const double i = std::ceil(x - 1e-9) - 1.0;  // guard edge values against roundoff
    if (i < 0.0) return 0;
    return std::min(static_cast<std::size_t>(i), envelope_bins - 1);
}

}  // namespace

DistortionGauge EnvelopeReport::gauge() const {
    std::vector<std::pair<double, double>> pairs;
    double running = 0.0;
    for (const auto& b : bins) {
        if (b.eta_hat > running) {
            pairs.emplace_back(b.t, b.eta_hat);
            running = b.eta_hat;
        } else if (b.eta_hat > 0.0 && !pairs.empty()) {
            pairs.emplace_back(b.t, std::max(b.eta_hat, pairs.back().second));
        }
    }
    if (pairs.size() < 2) throw std::domain_error("envelope too sparse to build a gauge");
    return DistortionGauge::tabulated(std::move(pairs));
}

EnvelopeReport cr_distortion_scan(const AngleMap& map, std::size_t n_quadruples,
                                  std::uint64_t seed) {
    if (n_quadruples < 1000)
        throw std::invalid_argument("cr_distortion_scan: need n_quadruples >= 1000");

    std::vector<std::array<double, 4>> quads;
    quads.reserve(n_quadruples + 16);
    // Fixed near-degenerate quadruples: the (1, e^{i lam}, -1, e^{3 i pi/2})
    // family plus the symmetric companion (1, e^{i lam}, e^{-i lam}, -1) in
    // both orientations, whose image cross ratio blows up like 1/lam for
    // maps that pinch or stretch strongly at angle 0.
    for (double lam : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
        quads.push_back({0.0, lam, pi, 1.5 * pi});
        quads.push_back({0.0, lam, two_pi - lam, pi});
        quads.push_back({0.0, two_pi - lam, lam, pi});
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, two_pi);
    while (quads.size() < n_quadruples + 10) {
        std::array<double, 4> q{uni(rng), uni(rng), uni(rng), uni(rng)};
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i)
            for (int j = i + 1; j < 4 && ok; ++j)
                if (std::abs(on_circle(q[i]) - on_circle(q[j])) < 1e-3) ok = false;
        if (ok) quads.push_back(q);
    }

    EnvelopeReport rep;
    rep.bins.resize(envelope_bins);
    const double lg0 = std::log10(envelope_t_min);
    const double lg1 = std::log10(envelope_t_max);
    for (std::size_t b = 0; b < envelope_bins; ++b)
        rep.bins[b].t = std::pow(10.0, lg0 + (lg1 - lg0) * static_cast<double>(b + 1) /
                                                 static_cast<double>(envelope_bins));
    rep.seed = seed;
    rep.n_samples = quads.size();
    rep.min_cr_in = std::numeric_limits<double>::infinity();

    std::vector<double> bin_max(envelope_bins, 0.0);
    for (const auto& q : quads) {
        const double cr_in = cross_ratio_angles(q[0], q[1], q[2], q[3]);
        const double cr_out = cross_ratio(map.circle_image(q[0]), map.circle_image(q[1]),
                                          map.circle_image(q[2]), map.circle_image(q[3]));
        const std::size_t b = envelope_bin_index(cr_in);
        rep.bins[b].support += 1;
        bin_max[b] = std::max(bin_max[b], cr_out);
        rep.alpha_hat = std::max(rep.alpha_hat, cr_out / cr_in);
        rep.max_cr_out = std::max(rep.max_cr_out, cr_out);
        rep.min_cr_in = std::min(rep.min_cr_in, cr_in);
    }
    double running = 0.0;
    for (std::size_t b = 0; b < envelope_bins; ++b) {
        running = std::max(running, bin_max[b]);
        rep.bins[b].eta_hat = running;
        rep.bins[b].interpolated = rep.bins[b].support == 0;
    }
    return rep;
}

BoundComparison bound_vs_energy(const AngleMap& map, const QuadratureSpec& q,
                                const EnvelopeReport& scan) {
    BoundComparison cmp;
    cmp.energy = conformal_energy(map, q);
    cmp.bound_envelope = qm_energy_bound(scan.gauge());
    cmp.bound_linear = 1.0 + std::log(std::max(scan.alpha_hat, 1.0)) / pi;
    cmp.gap_envelope = cmp.bound_envelope - cmp.energy.value;
    cmp.gap_linear = cmp.bound_linear - cmp.energy.value;
    // One envelope bin of log-resolution plus the quadrature error bar.
    const double bin_res = (std::log(envelope_t_max) - std::log(envelope_t_min)) /
                           static_cast<double>(envelope_bins) / pi;
    cmp.tolerance = cmp.energy.err + bin_res;
    cmp.envelope_ok = cmp.energy.value <= cmp.bound_envelope + cmp.tolerance;
    cmp.linear_ok = cmp.energy.value <= cmp.bound_linear + cmp.tolerance;
    return cmp;
}

}  // namespace conf
