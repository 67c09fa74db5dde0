#include "fnls/cauchy_transform.hpp"

#include <algorithm>
#include <cmath>

#include "fnls/contour_quadrature.hpp"

namespace fnls {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
constexpr double gl_x[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double gl_w[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

struct BoxTailModel {
    double q0, beta, chi, L;

    // Mean of f over one cot-oscillation at real nu:
    // 1 + |r|^2 = (A cos^2 t + B1 sin^2 t)/(A cos^2 t + B2 sin^2 t) with
    // t = 2 L sqrt(nu^2 + beta^2), and
    // <ln(a^2 cos^2 + b^2 sin^2)> = 2 ln((a + b)/2).
    double averaged_f(double nu) const {
        double lam2 = nu * nu + q0 * q0;
        double A = lam2 * (nu * nu + beta * beta);
        double B2 = nu * nu + q0 * beta * std::cos(chi);
        B2 = B2 * B2;
        double N2 = std::pow((beta * std::cos(chi) - q0) * nu, 2) +
                    beta * beta * lam2 * std::sin(chi) * std::sin(chi);
        double B1 = B2 + N2;
        double sA = std::sqrt(A), s1 = std::sqrt(B1), s2 = std::sqrt(B2);
        return 2.0 * std::log((sA + s1) / (sA + s2));
    }
};

} // namespace

ReflectionCauchy::ReflectionCauchy(const ReflectionData& r, double k_end)
    : r_(r), k_end_(k_end) {
    const BackgroundParams& bg = r_.background();
    const double scale = std::max(1.0, bg.q0);

    // trivial transform for r == 0
    {
        bool zero = true;
        for (double nu : {k_end - 0.3 * scale, k_end - 1.7 * scale, k_end - 5.1 * scale})
            if (r_.log_one_plus_rr(nu) != 0.0) { zero = false; break; }
        zero_ = zero;
        if (zero_) return;
    }

    const bool box = r_.datum() && r_.datum()->is_box();
    double osc_period = 0.5 * scale;
    double osc_amp2 = 1.0;
    if (box) {
        const BoxDatum& b = r_.datum()->box();
        osc_period = pi / (2.0 * b.halfwidth);
        osc_amp2 = b.beta * b.beta + bg.q0 * bg.q0 -
                   2.0 * b.beta * bg.q0 * std::cos(b.chi);
    }
    bulk_panel_ = std::min(0.35 * scale, 0.25 * osc_period);

    // Tail start: averaging error ~ (2/3) T amp^2 / M0^3 kept near 1e-10.
    double m0_err = std::cbrt(osc_period * std::max(osc_amp2, 1e-4) / 1.5e-10);
    m0_ = std::max({40.0 * scale, 1.6 * std::abs(k_end) + 10.0, m0_err});
    if (!box) m0_ = std::max(m0_, 4.0 * r_.datum()->effective_halfwidth());

    // Panel boundaries ascending from -M0 to k_end, refined geometrically in
    // the last bulk panel toward the endpoint (log singularity of L there).
    std::vector<double> bounds;
    bounds.push_back(k_end_);
    double w = 1e-12 * scale;
    double pos = k_end_;
    while (pos - (k_end_ - m0_) > w && w < bulk_panel_) {
        pos -= w;
        bounds.push_back(pos);
        w *= 2.0;
    }
    while (pos > k_end_ - m0_) {
        pos = std::max(pos - bulk_panel_, k_end_ - m0_);
        bounds.push_back(pos);
    }
    std::reverse(bounds.begin(), bounds.end());
    panel_lo_ = bounds;

    nodes_.reserve(16 * (bounds.size() + 40));
    for (size_t p = 0; p + 1 < bounds.size(); ++p) {
        double a = bounds[p], b = bounds[p + 1];
        double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 7; i >= 0; --i) {
            nodes_.push_back(c - h * gl_x[i]);
            weights_.push_back(h * gl_w[i]);
        }
        for (int i = 0; i < 8; ++i) {
            nodes_.push_back(c + h * gl_x[i]);
            weights_.push_back(h * gl_w[i]);
        }
    }
    fvals_.resize(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        double v = r_.log_one_plus_rr(nodes_[i]);
        if (!std::isfinite(v))
            throw spectral_singularity_error(
                "ln(1+|r|^2) not finite on the real axis");
        fvals_[i] = v;
    }

    if (box) {
        // dyadic tail panels on the oscillation-averaged f
        BoxTailModel tail{bg.q0, r_.datum()->box().beta, r_.datum()->box().chi,
                          r_.datum()->box().halfwidth};
        double lo = m0_;
        for (int j = 0; j < 48; ++j) {
            double hi = 2.0 * lo;
            double c = -0.5 * (lo + hi), h = 0.5 * (hi - lo);
            double panel_mass = 0.0;
            for (int i = 0; i < 8; ++i) {
                double n1 = c - h * gl_x[i], n2 = c + h * gl_x[i];
                double f1 = tail.averaged_f(n1), f2 = tail.averaged_f(n2);
                nodes_.push_back(n1);
                weights_.push_back(h * gl_w[i]);
                fvals_.push_back(f1);
                nodes_.push_back(n2);
                weights_.push_back(h * gl_w[i]);
                fvals_.push_back(f2);
                panel_mass += h * gl_w[i] * (std::abs(f1) + std::abs(f2));
            }
            if (panel_mass < 1e-18) break;
            lo = hi;
        }
    } else {
        // no tail model for sampled data: record the neglected mass bound
        double f_m0 = r_.log_one_plus_rr(-m0_);
        tail_bound_ = std::abs(f_m0) * m0_; // |f| ~ C/nu^2 proxy
    }
}

cx ReflectionCauchy::cached_sum(cx k, double exclude_lo, double exclude_hi) const {
    cx acc{};
    const size_t n = nodes_.size();
    for (size_t i = 0; i < n; ++i) {
        double nu = nodes_[i];
        if (nu >= exclude_lo && nu <= exclude_hi) continue;
        acc += weights_[i] * fvals_[i] / (nu - k);
    }
    return acc;
}

cx ReflectionCauchy::live_window(cx k, double lo, double hi) const {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-14;
    auto f = [this, k](cx nu) -> cx {
        return r_.log_one_plus_rr(nu.real()) / (nu.real() - k);
    };
    cx total{};
    double far_hi = hi;
    cx dk = k - cx(k_end_, 0.0);
    // When k hugs the cut endpoint, nu - k cancels catastrophically in
    // absolute coordinates; integrate the endpoint-adjacent piece in the
    // shifted variable u = nu - k_end, where both u and k - k_end are small
    // and carry full relative precision.
    if (hi == k_end_ && std::abs(dk) < 1e-4) {
        double w2 = std::min(std::max(1e4 * std::abs(dk), 1e-8), 0.5 * (hi - lo));
        auto fu = [this, dk](cx uc) -> cx {
            double u = uc.real();
            return r_.log_one_plus_rr(k_end_ + u) / (cx(u, 0.0) - dk);
        };
        PathSegment near{cx(-w2, 0.0), cx(0.0, 0.0)};
        total += integrate_segment(fu, near, spec).value;
        far_hi = k_end_ - w2;
    }
    if (far_hi > lo) {
        PathSegment seg{cx(lo, 0.0), cx(far_hi, 0.0)};
        total += integrate_segment(f, seg, spec).value;
    }
    return total;
}

cx ReflectionCauchy::log_delta(cx k) const {
    if (zero_) return cx(0.0, 0.0);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find({k.real(), k.imag()});
        if (it != memo_.end()) return it->second;
    }
    cx val = log_delta_uncached(k);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        if (memo_.size() < 400000) memo_.emplace(std::pair{k.real(), k.imag()}, val);
    }
    return val;
}

cx ReflectionCauchy::log_delta_uncached(cx k) const {
    const double scale = std::max(1.0, r_.background().q0);
    if (std::abs(k.imag()) <= on_cut_tol * scale && k.real() < k_end_)
        throw path_error("log_delta on the cut: a side must be specified");

    // distance from k to the cut (-inf, k_end]
    double dist = (k.real() <= k_end_)
                      ? std::abs(k.imag())
                      : std::abs(k - cx(k_end_, 0.0));
    cx acc;
    if (dist < 3.0 * bulk_panel_ && k.real() > -m0_) {
        // swap cached panels near Re(k) for a live adaptive integral
        double w = 6.0 * bulk_panel_ + 2.0 * std::abs(k.imag());
        double lo = std::max(std::min(k.real() - w, k_end_ - 2.0 * w), -m0_);
        double hi = std::min(k.real() + w, k_end_);
        // snap to panel boundaries
        auto it_lo = std::lower_bound(panel_lo_.begin(), panel_lo_.end(), lo);
        if (it_lo != panel_lo_.begin()) --it_lo;
        lo = *it_lo;
        auto it_hi = std::lower_bound(panel_lo_.begin(), panel_lo_.end(), hi);
        hi = (it_hi == panel_lo_.end()) ? k_end_ : *it_hi;
        acc = cached_sum(k, lo, hi) + live_window(k, lo, hi);
    } else {
        acc = cached_sum(k, 1.0, -1.0);
    }
    return acc / cx(0.0, 2.0 * pi);
}

cx ReflectionCauchy::log_delta_side(double nu, LimitSide side) const {
    if (zero_) return cx(0.0, 0.0);
    if (nu >= k_end_)
        throw path_error("side limit requested off the open cut");
    // The cut is part of R traversed rightward, so the left-of-travel side
    // is the upper half plane (the + side of the Plemelj jump).
    const double scale = std::max(1.0, r_.background().q0);
    const double sgn = (side == LimitSide::left) ? 1.0 : -1.0;
    // L(nu + i eps) is analytic in eps on each side; extrapolate to eps -> 0
    double xs[4] = {1.0, 0.5, 0.25, 0.125};
    cx vals[4];
    for (int j = 0; j < 4; ++j)
        vals[j] = log_delta(cx(nu, sgn * 1e-3 * scale * xs[j]));
    for (int m = 1; m < 4; ++m)
        for (int i = 3; i >= m; --i)
            vals[i] = (xs[i - m] * vals[i] - xs[i] * vals[i - 1]) /
                      (xs[i - m] - xs[i]);
    return vals[3];
}

} // namespace fnls
