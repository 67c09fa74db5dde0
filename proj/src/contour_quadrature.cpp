#include "fnls/contour_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fnls {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Nodes are symmetric; only the nonnegative half is stored.
constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    cx value{};
    double err = 0.0;
    double resasc = 0.0; // scale of the integrand over the panel
};

// One GK15 evaluation of g over [a, b] (real parameter interval).
PanelResult gk15(const std::function<cx(double)>& g, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cx fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = g(c - h * gk_nodes[i]);
        fv[14 - i] = g(c + h * gk_nodes[i]);
    }
    fv[7] = g(c);

    cx kron{}, gaus{};
    double resabs = 0.0;
    for (int i = 0; i < 8; ++i) {
        cx s = (i < 7) ? fv[i] + fv[14 - i] : fv[7];
        kron += kronrod_w[i] * s;
        resabs += kronrod_w[i] * ((i < 7) ? std::abs(fv[i]) + std::abs(fv[14 - i])
                                          : std::abs(fv[7]));
    }
    for (int i = 0; i < 4; ++i) {
        cx s = (i < 3) ? fv[2 * i + 1] + fv[13 - 2 * i] : fv[7];
        gaus += gauss_w[i] * s;
    }
    PanelResult r;
    r.value = h * kron;
    double mean_abs = std::abs(h) * resabs;
    double diff = std::abs(h) * std::abs(kron - gaus);
    // QUADPACK-style sharpened estimate
    r.err = (mean_abs > 0.0 && diff > 0.0)
                ? std::min(diff, diff * std::sqrt(diff / mean_abs) * 10.0 + diff * 1e-3)
                : diff;
    r.err = std::max(r.err, 50.0 * std::numeric_limits<double>::epsilon() * mean_abs);
    r.resasc = mean_abs;
    return r;
}

struct Interval {
    double a, b;
    PanelResult res;
    bool operator<(const Interval& o) const { return res.err < o.res.err; }
};

// Globally adaptive bisection driven by a max-error heap.  Intervals that
// collapse to roundoff width stop being split; their error moves to a
// finalized bucket that still counts toward the reported estimate.
QuadratureResult adaptive(const std::function<cx(double)>& g, double a, double b,
                          const QuadratureSpec& spec) {
    std::priority_queue<Interval> heap;
    Interval whole{a, b, gk15(g, a, b)};
    cx total = whole.res.value;
    double heap_err = whole.res.err;
    double finalized_err = 0.0;
    heap.push(whole);

    const size_t max_intervals =
        size_t(1) << std::min(spec.max_subdivision_depth, 22);
    size_t n = 1;
    while (heap_err + finalized_err >
           std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (n >= max_intervals || heap.empty())
            throw non_convergence_error("adaptive quadrature: depth exhausted",
                                        total, heap_err + finalized_err);
        Interval worst = heap.top();
        heap.pop();
        heap_err -= worst.res.err;
        double mid = 0.5 * (worst.a + worst.b);
        double width_floor =
            4.0 * std::numeric_limits<double>::epsilon() *
            std::max({std::abs(worst.a), std::abs(worst.b), 1e-30});
        if (mid <= worst.a || mid >= worst.b ||
            (worst.b - worst.a) < width_floor) {
            finalized_err += worst.res.err;
            continue;
        }
        Interval left{worst.a, mid, gk15(g, worst.a, mid)};
        Interval right{mid, worst.b, gk15(g, mid, worst.b)};
        total += left.res.value + right.res.value - worst.res.value;
        heap_err += left.res.err + right.res.err;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    return {total, heap_err + finalized_err};
}

// Integrate g over [0,1] with a logarithmic singularity at t = 0: geometric
// panels toward the origin, stopping once panels stop contributing.
QuadratureResult log_refined(const std::function<cx(double)>& g,
                             const QuadratureSpec& spec) {
    cx total{};
    double err = 0.0;
    double hi = 1.0;
    QuadratureSpec panel_spec = spec;
    for (int j = 0; j < 60; ++j) {
        double lo = hi * 0.5;
        QuadratureResult p = adaptive(g, lo, hi, panel_spec);
        total += p.value;
        err += p.err_est;
        double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
        if (j > 6 && std::abs(p.value) < 0.05 * tol) {
            // geometric decay: remaining panels bounded by a few times the last
            err += 4.0 * std::abs(p.value);
            return {total, err};
        }
        hi = lo;
    }
    // Tail below 2^-60 of the parameter range is negligible for any
    // integrable log singularity.
    return {total, err};
}

std::function<cx(double)> on_unit_interval(const Integrand& f,
                                           const PathSegment& seg) {
    cx d = seg.tangent();
    cx s0 = seg.start;
    return [f, d, s0](double t) { return f(s0 + t * d) * d; };
}

} // namespace

QuadratureResult integrate_segment(const Integrand& f, const PathSegment& seg,
                                   const QuadratureSpec& spec) {
    using ES = EndpointSingularity;
    const ES ss = seg.start_singularity, es = seg.end_singularity;

    if (ss != ES::none && es != ES::none) {
        cx mid = seg.point(0.5);
        PathSegment first(seg.start, mid, ss, ES::none);
        PathSegment second(mid, seg.end, ES::none, es);
        QuadratureResult r1 = integrate_segment(f, first, spec);
        QuadratureResult r2 = integrate_segment(f, second, spec);
        return {r1.value + r2.value, r1.err_est + r2.err_est};
    }
    if (es != ES::none) {
        QuadratureResult r = integrate_segment(f, seg.reversed(), spec);
        return {-r.value, r.err_est};
    }

    auto g = on_unit_interval(f, seg);
    switch (ss) {
    case ES::none:
        return adaptive(g, 0.0, 1.0, spec);
    case ES::inverse_sqrt: {
        // t = u^2 removes half-integer powers at t = 0
        auto gu = [g](double u) { return g(u * u) * (2.0 * u); };
        return adaptive(gu, 0.0, 1.0, spec);
    }
    case ES::logarithmic:
        return log_refined(g, spec);
    }
    throw numeric_error("unreachable");
}

QuadratureResult integrate_contour(const Integrand& f, const Contour& contour,
                                   const QuadratureSpec& spec) {
    contour.validate();
    cx total{};
    double err = 0.0;
    for (const auto& seg : contour.segments) {
        QuadratureResult r = integrate_segment(f, seg, spec);
        total += r.value;
        err += r.err_est;
    }
    return {total, err};
}

QuadratureResult integrate_ray(const Integrand& f, cx origin, cx direction,
                               const QuadratureSpec& spec) {
    cx dir = direction / std::abs(direction);
    auto g = [&f, origin, dir](double s) { return f(origin + s * dir) * dir; };

    cx total{};
    double err = 0.0;
    double lo = 0.0, hi = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    int non_decaying = 0;
    for (int j = 0; j < 64; ++j) {
        QuadratureResult p = adaptive(g, lo, hi, spec);
        total += p.value;
        err += p.err_est;
        double mag = std::abs(p.value);
        if (j > 0) {
            // dyadic panels of an s^-2 tail may legitimately grow until the
            // panel width reaches the scale of the origin offset
            if (mag >= prev_mag && mag > std::max(spec.abs_tol, spec.tail_cutoff * std::abs(total))) {
                if (++non_decaying >= 24)
                    throw divergence_error(
                        "integrate_ray: no decay detected within panel budget");
            } else {
                non_decaying = 0;
            }
        }
        if (j > 1 && mag < std::max(spec.abs_tol,
                                    spec.tail_cutoff * std::abs(total))) {
            // geometric tail bound from the observed panel ratio
            double ratio = prev_mag > 0.0 ? std::min(0.9, mag / prev_mag) : 0.5;
            err += mag * ratio / (1.0 - ratio) + mag;
            return {total, err};
        }
        prev_mag = mag;
        lo = hi;
        hi *= 2.0;
    }
    throw divergence_error("integrate_ray: panel budget exhausted before tail cutoff");
}

double brent_root(const std::function<double(double)>& F, double lo, double hi,
                  double tol) {
    double a = lo, b = hi;
    double fa = F(a), fb = F(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw bracketing_error("brent_root: no sign change on bracket");

    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, s = b, fs = fb, d = 0.0;
    bool mflag = true;
    for (int iter = 0; iter < 200 && fb != 0.0 && std::abs(b - a) > tol; ++iter) {
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) +
                b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        double lo34 = 0.25 * (3.0 * a + b);
        bool cond = !((s > std::min(lo34, b) && s < std::max(lo34, b))) ||
                    (mflag && std::abs(s - b) >= 0.5 * std::abs(b - c)) ||
                    (!mflag && std::abs(s - b) >= 0.5 * std::abs(c - d)) ||
                    (mflag && std::abs(b - c) < tol) ||
                    (!mflag && std::abs(c - d) < tol);
        if (cond) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        fs = F(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return b;
}

std::vector<cx> unwrap_log(const std::vector<cx>& values) {
    std::vector<cx> out;
    out.reserve(values.size());
    double offset = 0.0;
    double prev_arg = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] == cx(0.0, 0.0))
            throw pole_error("unwrap_log: zero sample");
        double mag = std::log(std::abs(values[i]));
        double arg = std::arg(values[i]);
        if (i > 0) {
            double jump = arg - prev_arg;
            if (jump > pi) offset -= 2.0 * pi;
            else if (jump < -pi) offset += 2.0 * pi;
            double step = std::abs(std::remainder(jump, 2.0 * pi));
            if (step >= pi - 1e-12)
                throw resolution_error(
                    "unwrap_log: phase increment >= pi between samples");
        }
        prev_arg = arg;
        out.emplace_back(mag, arg + offset);
    }
    return out;
}

} // namespace fnls
