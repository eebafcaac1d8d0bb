#include "conf/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace conf {

struct AngleMap::Impl {
    virtual ~Impl() = default;
    /// Lift value for x in [0, 2*pi].
    virtual double eval_base(double x) const = 0;
    virtual bool has_closed_deriv() const { return false; }
    virtual double deriv(double /*x*/) const { return 0.0; }
    virtual std::shared_ptr<const Impl> closed_inverse() const { return nullptr; }
    virtual std::string describe() const = 0;
    virtual bool moebius_like() const { return false; }
};

namespace {

double reduce_angle(double t, double& turns) {
    double k = std::floor(t / two_pi);
    double x = t - k * two_pi;
    if (x >= two_pi) {  // rounding at the seam
        x -= two_pi;
        k += 1.0;
    }
    if (x < 0.0) {
        x += two_pi;
        k -= 1.0;
    }
    turns = k;
    return x;
}

double lift_eval(const AngleMap::Impl& impl, double t);

struct IdentityImpl final : AngleMap::Impl {
    double eval_base(double x) const override { return x; }
    bool has_closed_deriv() const override { return true; }
    double deriv(double) const override { return 1.0; }
    std::shared_ptr<const Impl> closed_inverse() const override;
    std::string describe() const override { return "identity"; }
    bool moebius_like() const override { return true; }
};

std::shared_ptr<const AngleMap::Impl> IdentityImpl::closed_inverse() const {
    return std::make_shared<IdentityImpl>();
}

struct MoebiusImpl final : AngleMap::Impl {
    cplx a;
    double rot;
    double r, beta;
    double shift;  // multiple of 2*pi putting theta(0) into [0, 2*pi)

    MoebiusImpl(cplx a_, double rot_) : a(a_), rot(rot_) {
        r = std::abs(a);
        beta = (r > 0.0) ? std::arg(a) : 0.0;
        const double raw0 = rot + 2.0 * std::atan2(r * std::sin(-beta), 1.0 - r * std::cos(-beta));
        shift = -two_pi * std::floor(raw0 / two_pi);
    }
    double eval_base(double x) const override {
        return x + rot + 2.0 * std::atan2(r * std::sin(x - beta), 1.0 - r * std::cos(x - beta)) +
               shift;
    }
    bool has_closed_deriv() const override { return true; }
    double deriv(double x) const override {
        return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(x - beta) + r * r);
    }
    std::shared_ptr<const Impl> closed_inverse() const override {
        // (e^{i rot}(w-a)/(1-conj(a)w))^{-1} = e^{-i rot}(v-a')/(1-conj(a')v)
        // with a' = -a e^{i rot}. The candidate lift can sit a full period
        // away from the functional inverse; snap it so inv(theta(0)) = 0.
        const cplx ainv = -a * std::exp(cplx(0.0, rot));
        auto inv = std::make_shared<MoebiusImpl>(ainv, -rot);
        const double resid = lift_eval(*inv, eval_base(0.0));
        inv->shift -= two_pi * std::round(resid / two_pi);
        return inv;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "mobius:a=" << a.real() << (a.imag() < 0 ? "" : "+") << a.imag() << "i,rot=" << rot;
        return os.str();
    }
    bool moebius_like() const override { return true; }
};

struct PwlImpl final : AngleMap::Impl {
    double lambda;
    double slope2;  // (2*pi - 1) / (2*pi - lambda)
    explicit PwlImpl(double l) : lambda(l), slope2((two_pi - 1.0) / (two_pi - l)) {}
    double eval_base(double x) const override {
        return x <= lambda ? x / lambda : 1.0 + slope2 * (x - lambda);
    }
    bool has_closed_deriv() const override { return true; }
    double deriv(double x) const override { return x <= lambda ? 1.0 / lambda : slope2; }
    std::shared_ptr<const Impl> closed_inverse() const override;
    std::string describe() const override {
        std::ostringstream os;
        os << "pwl:lambda=" << lambda;
        return os.str();
    }
};

struct PwlInvImpl final : AngleMap::Impl {
    double lambda;
    double inv_slope2;
    explicit PwlInvImpl(double l) : lambda(l), inv_slope2((two_pi - l) / (two_pi - 1.0)) {}
    double eval_base(double y) const override {
        return y <= 1.0 ? lambda * y : lambda + inv_slope2 * (y - 1.0);
    }
    bool has_closed_deriv() const override { return true; }
    double deriv(double y) const override { return y <= 1.0 ? lambda : inv_slope2; }
    std::shared_ptr<const Impl> closed_inverse() const override {
        return std::make_shared<PwlImpl>(lambda);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "inv(pwl:lambda=" << lambda << ")";
        return os.str();
    }
};

std::shared_ptr<const AngleMap::Impl> PwlImpl::closed_inverse() const {
    return std::make_shared<PwlInvImpl>(lambda);
}

struct SquareImpl final : AngleMap::Impl {
    double eval_base(double x) const override { return x <= 1.0 ? x * x : x; }
    bool has_closed_deriv() const override { return true; }
    double deriv(double x) const override { return x < 1.0 ? 2.0 * x : 1.0; }
    std::shared_ptr<const Impl> closed_inverse() const override;
    std::string describe() const override { return "square"; }
};

struct SqrtImpl final : AngleMap::Impl {
    double eval_base(double y) const override { return y <= 1.0 ? std::sqrt(y) : y; }
    bool has_closed_deriv() const override { return true; }
    double deriv(double y) const override {
        return y < 1.0 ? 0.5 / std::sqrt(std::max(y, 1e-300)) : 1.0;
    }
    std::shared_ptr<const Impl> closed_inverse() const override {
        return std::make_shared<SquareImpl>();
    }
    std::string describe() const override { return "inv(square)"; }
};

std::shared_ptr<const AngleMap::Impl> SquareImpl::closed_inverse() const {
    return std::make_shared<SqrtImpl>();
}

struct TabulatedImpl final : AngleMap::Impl {
    std::vector<double> t, th;
    TabulatedImpl(std::vector<double> t_, std::vector<double> th_)
        : t(std::move(t_)), th(std::move(th_)) {}
    std::size_t segment(double x) const {
        auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t i = static_cast<std::size_t>(it - t.begin());
        if (i == 0) return 0;
        if (i >= t.size()) return t.size() - 2;
        return i - 1;
    }
    double eval_base(double x) const override {
        const std::size_t i = segment(x);
        const double w = (x - t[i]) / (t[i + 1] - t[i]);
        return th[i] + w * (th[i + 1] - th[i]);
    }
    bool has_closed_deriv() const override { return true; }
    double deriv(double x) const override {
        const std::size_t i = segment(x);
        return (th[i + 1] - th[i]) / (t[i + 1] - t[i]);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "table:<" << t.size() << " samples>";
        return os.str();
    }
};

struct SinSeriesImpl final : AngleMap::Impl {
    std::vector<double> c;
    explicit SinSeriesImpl(std::vector<double> c_) : c(std::move(c_)) {}
    double eval_base(double x) const override {
        double s = x;
        for (std::size_t k = 0; k < c.size(); ++k)
            s += c[k] * std::sin(static_cast<double>(k + 1) * x);
        return s;
    }
    bool has_closed_deriv() const override { return true; }
    double deriv(double x) const override {
        double s = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double kk = static_cast<double>(k + 1);
            s += kk * c[k] * std::cos(kk * x);
        }
        return s;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "sin-series:K=" << c.size();
        return os.str();
    }
};

double lift_eval(const AngleMap::Impl& impl, double t) {
    double turns = 0.0;
    const double x = reduce_angle(t, turns);
    return impl.eval_base(x) + two_pi * turns;
}

struct BisectInvImpl final : AngleMap::Impl {
    std::shared_ptr<const AngleMap::Impl> base;
    explicit BisectInvImpl(std::shared_ptr<const AngleMap::Impl> b) : base(std::move(b)) {}
    double eval_base(double y) const override {
        // theta(t) - t stays within [c - 2*pi, c + 2*pi] for c = theta(0),
        // so the preimage of y is bracketed by y -+ (|c| + 2*pi).
        const double c = base->eval_base(0.0);
        double lo = y - c - two_pi, hi = y - c + two_pi;
        for (int iter = 0; iter < 90 && hi - lo > 1e-13; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (lift_eval(*base, mid) < y)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    std::shared_ptr<const Impl> closed_inverse() const override { return base; }
    std::string describe() const override { return "inv(" + base->describe() + ")"; }
    bool moebius_like() const override { return base->moebius_like(); }
};

struct ComposeImpl final : AngleMap::Impl {
    std::shared_ptr<const AngleMap::Impl> outer, inner;
    ComposeImpl(std::shared_ptr<const AngleMap::Impl> o, std::shared_ptr<const AngleMap::Impl> i)
        : outer(std::move(o)), inner(std::move(i)) {}
    double eval_base(double x) const override { return lift_eval(*outer, inner->eval_base(x)); }
    bool has_closed_deriv() const override {
        return outer->has_closed_deriv() && inner->has_closed_deriv();
    }
    double deriv(double x) const override {
        double turns = 0.0;
        const double y = reduce_angle(inner->eval_base(x), turns);
        return outer->deriv(y) * inner->deriv(x);
    }
    std::string describe() const override {
        return "comp(" + outer->describe() + "," + inner->describe() + ")";
    }
    bool moebius_like() const override { return outer->moebius_like() && inner->moebius_like(); }
};

}  // namespace

AngleMap AngleMap::identity() { return AngleMap(std::make_shared<IdentityImpl>()); }

AngleMap AngleMap::moebius(cplx a, double rot) {
    if (std::abs(a) >= 1.0)
        throw std::domain_error("moebius map requires |a| < 1, got |a| = " +
                                std::to_string(std::abs(a)));
    if (std::abs(a) == 0.0 && rot == 0.0) return identity();
    return AngleMap(std::make_shared<MoebiusImpl>(a, rot));
}

AngleMap AngleMap::pwl(double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::domain_error("pwl map requires lambda in (0, 1], got " +
                                std::to_string(lambda));
    return AngleMap(std::make_shared<PwlImpl>(lambda));
}

AngleMap AngleMap::square() { return AngleMap(std::make_shared<SquareImpl>()); }

AngleMap AngleMap::tabulated(std::vector<double> t, std::vector<double> theta) {
    if (t.size() != theta.size() || t.size() < 2)
        throw std::invalid_argument("tabulated map needs >= 2 equal-length columns");
    const double tol = 1e-9;
    if (std::abs(t.front()) > tol || std::abs(theta.front()) > tol ||
        std::abs(t.back() - two_pi) > tol || std::abs(theta.back() - two_pi) > tol)
        throw std::invalid_argument("tabulated map must start at (0,0) and end at (2pi,2pi)");
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (!(t[i + 1] > t[i]) || !(theta[i + 1] > theta[i])) bad.push_back(i);
    if (!bad.empty()) {
        std::ostringstream os;
        os << "tabulated map not strictly increasing at sample indices:";
        for (std::size_t i : bad) os << ' ' << i;
        throw std::invalid_argument(os.str());
    }
    t.front() = 0.0;
    theta.front() = 0.0;
    t.back() = two_pi;
    theta.back() = two_pi;
    return AngleMap(std::make_shared<TabulatedImpl>(std::move(t), std::move(theta)));
}

AngleMap AngleMap::sin_series(std::vector<double> coeffs) {
    auto impl = std::make_shared<SinSeriesImpl>(std::move(coeffs));
    for (std::size_t i = 0; i < 4096; ++i) {
        const double x = static_cast<double>(i) * two_pi / 4096.0;
        if (impl->deriv(x) <= 0.0)
            throw std::domain_error("sin_series coefficients give a non-monotone lift");
    }
    return AngleMap(std::move(impl));
}

AngleMap AngleMap::inverse() const {
    if (auto closed = impl_->closed_inverse()) return AngleMap(std::move(closed));
    return AngleMap(std::make_shared<BisectInvImpl>(impl_));
}

AngleMap AngleMap::compose(AngleMap outer, AngleMap inner) {
    return AngleMap(std::make_shared<ComposeImpl>(std::move(outer.impl_), std::move(inner.impl_)));
}

double AngleMap::operator()(double t) const { return lift_eval(*impl_, t); }

double AngleMap::derivative(double t) const {
    double turns = 0.0;
    const double x = reduce_angle(t, turns);
    if (impl_->has_closed_deriv()) return impl_->deriv(x);
    const double h = 1e-6;
    return (lift_eval(*impl_, t + h) - lift_eval(*impl_, t - h)) / (2.0 * h);
}

cplx AngleMap::circle_image(double t) const {
    const double th = (*this)(t);
    return cplx(std::cos(th), std::sin(th));
}

std::string AngleMap::describe() const { return impl_->describe(); }

bool AngleMap::is_moebius_kind() const { return impl_->moebius_like(); }

MapDiagnostics validate(const AngleMap& map, std::size_t n_samples) {
    if (n_samples < 16) throw std::invalid_argument("validate: n_samples must be >= 16");
    const std::size_t n = n_samples;
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> th(n + 1);
    for (std::size_t i = 0; i <= n; ++i) th[i] = map(static_cast<double>(i) * h);

    MapDiagnostics d;
    d.monotone_ok = true;
    d.min_slope_estimate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double slope = (th[i + 1] - th[i]) / h;
        d.min_slope_estimate = std::min(d.min_slope_estimate, slope);
        if (!(th[i + 1] > th[i])) {
            d.monotone_ok = false;
            d.offending_indices.push_back(i);
        }
    }
    d.endpoint_ok = std::abs(th[n] - th[0] - two_pi) <= 1e-9;

    // Hoelder lower bound |dtheta| >= alpha |dt|^p over all sampled pairs,
    // for the candidate exponents p = 1, 2, 3.
    std::vector<double> row_min1(n + 1), row_min2(n + 1), row_min3(n + 1);
    parallel_for(n + 1, [&](std::size_t i) {
        double m1 = std::numeric_limits<double>::infinity(), m2 = m1, m3 = m1;
        for (std::size_t j = i + 1; j <= n; ++j) {
            const double dt = static_cast<double>(j - i) * h;
            const double dth = std::abs(th[j] - th[i]);
            const double r1 = dth / dt;
            m1 = std::min(m1, r1);
            m2 = std::min(m2, r1 / dt);
            m3 = std::min(m3, r1 / (dt * dt));
        }
        row_min1[i] = m1;
        row_min2[i] = m2;
        row_min3[i] = m3;
    });
    double a1 = row_min1[0], a2 = row_min2[0], a3 = row_min3[0];
    for (std::size_t i = 1; i < n; ++i) {
        a1 = std::min(a1, row_min1[i]);
        a2 = std::min(a2, row_min2[i]);
        a3 = std::min(a3, row_min3[i]);
    }
    if (a1 >= hoelder_alpha_floor) {
        d.hoelder_p = 1.0;
        d.hoelder_alpha = a1;
        d.hoelder_ok = true;
    } else if (a2 >= hoelder_alpha_floor) {
        d.hoelder_p = 2.0;
        d.hoelder_alpha = a2;
        d.hoelder_ok = true;
    } else {
        d.hoelder_p = 3.0;
        d.hoelder_alpha = a3;
        d.hoelder_ok = a3 >= hoelder_alpha_floor;
    }
    return d;
}

}  // namespace conf
