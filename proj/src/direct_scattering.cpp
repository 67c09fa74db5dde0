#include "fnls/direct_scattering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fnls/cauchy_transform.hpp"

namespace fnls {

// ---------------------------------------------------------------------------
// InitialDatum
// ---------------------------------------------------------------------------

InitialDatum::InitialDatum(const BackgroundParams& bg, BoxDatum box)
    : bg_(bg), shape_(box) {
    bg_.validate();
    if (!(box.beta > 0.0) || !(box.halfwidth > 0.0))
        throw config_error("box datum requires beta > 0 and L > 0");
}

InitialDatum::InitialDatum(const BackgroundParams& bg, SampledDatum samples)
    : bg_(bg), shape_(std::move(samples)) {
    bg_.validate();
    const auto& s = std::get<SampledDatum>(shape_);
    if (s.x.size() != s.q.size() || s.x.size() < 4)
        throw config_error("sampled datum needs matching x/q arrays");
    double h = s.x[1] - s.x[0];
    for (size_t i = 1; i < s.x.size(); ++i)
        if (std::abs((s.x[i] - s.x[i - 1]) - h) > 1e-9 * std::abs(h))
            throw config_error("sampled datum grid must be uniform");
    if (std::abs(s.q.front() - bg_.q_minus) > 1e-10 ||
        std::abs(s.q.back() - bg_.q_plus) > 1e-10)
        throw config_error("sampled datum must decay to q_-+ at the grid ends");
}

cx InitialDatum::value(double x) const {
    if (is_box()) {
        const auto& b = box();
        if (std::abs(x) < b.halfwidth) return b.beta * std::exp(cx(0.0, b.chi));
        return x < 0.0 ? bg_.q_minus : bg_.q_plus;
    }
    const auto& s = samples();
    if (x <= s.x.front()) return bg_.q_minus;
    if (x >= s.x.back()) return bg_.q_plus;
    double h = s.x[1] - s.x[0];
    double u = (x - s.x.front()) / h;
    size_t i = std::min(size_t(u), s.x.size() - 2);
    double t = u - double(i);
    // Catmull-Rom through the four surrounding samples
    cx p0 = (i > 0) ? s.q[i - 1] : s.q[0];
    cx p1 = s.q[i], p2 = s.q[i + 1];
    cx p3 = (i + 2 < s.q.size()) ? s.q[i + 2] : s.q.back();
    cx m1 = 0.5 * (p2 - p0), m2 = 0.5 * (p3 - p1);
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p1 + (t3 - 2 * t2 + t) * m1 +
           (-2 * t3 + 3 * t2) * p2 + (t3 - t2) * m2;
}

double InitialDatum::effective_halfwidth(double tol) const {
    if (is_box()) return box().halfwidth;
    const auto& s = samples();
    double lo = s.x.front(), hi = s.x.back();
    size_t i = 0, j = s.x.size() - 1;
    while (i < j && std::abs(s.q[i] - bg_.q_minus) < tol) ++i;
    while (j > i && std::abs(s.q[j] - bg_.q_plus) < tol) --j;
    lo = s.x[i > 0 ? i - 1 : 0];
    hi = s.x[j + 1 < s.x.size() ? j + 1 : j];
    return std::max({std::abs(lo), std::abs(hi), s.support_halfwidth});
}

InitialDatum InitialDatum::reflected() const {
    if (is_box()) return InitialDatum(bg_.reflected(), box());
    SampledDatum s = samples();
    std::reverse(s.q.begin(), s.q.end());
    std::vector<double> xr(s.x.size());
    for (size_t i = 0; i < s.x.size(); ++i) xr[i] = -s.x[s.x.size() - 1 - i];
    s.x = std::move(xr);
    return InitialDatum(bg_.reflected(), std::move(s));
}

InitialDatum load_sampled_csv(const std::string& path, const BackgroundParams& bg) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open sampled datum file: " + path);
    SampledDatum s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, re, im;
        if (!(ls >> x >> re >> im)) {
            if (s.x.empty()) continue; // header row
            throw config_error("malformed row in sampled datum file");
        }
        s.x.push_back(x);
        s.q.emplace_back(re, im);
    }
    s.support_halfwidth = s.x.empty() ? 0.0 : std::max(std::abs(s.x.front()), std::abs(s.x.back()));
    return InitialDatum(bg, std::move(s));
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) for the 2x2 eigenfunction system
// ---------------------------------------------------------------------------

namespace {

struct MuSystem {
    const InitialDatum& datum;
    cx ik, ilam;

    Mat2 rhs(double x, const Mat2& m) const {
        cx q = datum.value(x);
        cx qb = std::conj(q);
        // mu' = (ik sigma3 + Q) mu - i lambda mu sigma3
        return {(ik - ilam) * m.a11 + q * m.a21, (ik + ilam) * m.a12 + q * m.a22,
                -(ik + ilam) * m.a21 - qb * m.a11, (ilam - ik) * m.a22 - qb * m.a12};
    }
};

Mat2 axpy(const Mat2& a, double c, const Mat2& b) {
    return {a.a11 + c * b.a11, a.a12 + c * b.a12, a.a21 + c * b.a21,
            a.a22 + c * b.a22};
}

// Adaptive Dormand-Prince 5(4).
Mat2 dopri5(const MuSystem& sys, Mat2 y, double x0, double x1,
            const OdeOptions& opts) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double span = x1 - x0;
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    const double freq = std::abs(sys.ik) + std::abs(sys.ilam) + 1.0;
    double h = dir * std::min(std::abs(span) * opts.max_step_fraction, 0.5 / freq);
    double x = x0;
    Mat2 k1 = sys.rhs(x, y);
    int rejects_in_row = 0;

    while (dir * (x1 - x) >
           8.0 * std::numeric_limits<double>::epsilon() * std::abs(span)) {
        if (dir * (x + h - x1) > 0.0) h = x1 - x;
        Mat2 y2 = axpy(y, h * a21, k1);
        Mat2 k2 = sys.rhs(x + c2 * h, y2);
        Mat2 y3 = axpy(axpy(y, h * a31, k1), h * a32, k2);
        Mat2 k3 = sys.rhs(x + c3 * h, y3);
        Mat2 y4 = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
        Mat2 k4 = sys.rhs(x + c4 * h, y4);
        Mat2 y5 = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3),
                       h * a54, k4);
        Mat2 k5 = sys.rhs(x + c5 * h, y5);
        Mat2 y6 = axpy(
            axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3),
                 h * a64, k4),
            h * a65, k5);
        Mat2 k6 = sys.rhs(x + h, y6);
        Mat2 ynew = axpy(
            axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5,
                 k5),
            h * b6, k6);
        Mat2 k7 = sys.rhs(x + h, ynew);
        Mat2 err = axpy(
            axpy(axpy(axpy(axpy(axpy(Mat2{}, h * e1, k1), h * e3, k3), h * e4, k4),
                      h * e5, k5),
                 h * e6, k6),
            h * e7, k7);
        double sc = opts.abs_tol +
                    opts.rel_tol * std::max(y.max_abs(), ynew.max_abs());
        double errnorm = err.max_abs() / sc;
        if (errnorm <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;
            rejects_in_row = 0;
        } else if (++rejects_in_row > 60) {
            throw non_convergence_error("dopri5: step size underflow", y.a11,
                                        errnorm);
        }
        double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (rejects_in_row > 0 && std::abs(h) < 1e-15 * std::abs(span))
            throw non_convergence_error("dopri5: vanishing step", y.a11, errnorm);
    }
    return y;
}

} // namespace

Mat2 integrate_mu(const InitialDatum& datum, cx k, IntegrationDirection dir,
                  const OdeOptions& opts) {
    const auto& bg = datum.background();
    cx lam = lambda_branch(k, bg);
    MuSystem sys{datum, cx(0.0, 1.0) * k, cx(0.0, 1.0) * lam};
    double L = datum.effective_halfwidth();
    if (dir == IntegrationDirection::from_left) {
        Mat2 start = boundary_eigenmatrix(bg, SideOfInfinity::minus, k);
        return dopri5(sys, start, -L, L, opts);
    }
    Mat2 start = boundary_eigenmatrix(bg, SideOfInfinity::plus, k);
    return dopri5(sys, start, L, -L, opts);
}

std::pair<cx, cx> scattering_entries(const InitialDatum& datum, cx k,
                                     const OdeOptions& opts) {
    const auto& bg = datum.background();
    double scale = std::max(1.0, bg.q0);
    if (std::abs(k - cx(0.0, bg.q0)) <= on_cut_tol * scale ||
        std::abs(k + cx(0.0, bg.q0)) <= on_cut_tol * scale)
        throw branch_point_error("scattering entries undefined at k = +-i q0");

    double L = datum.effective_halfwidth();
    cx lam = lambda_branch(k, bg);
    Mat2 muL = integrate_mu(datum, k, IntegrationDirection::from_left, opts);
    Mat2 Einv = boundary_eigenmatrix(bg, SideOfInfinity::plus, k).inverse();
    cx w = cx(0.0, 1.0) * lam * L;
    Mat2 S = (Einv * muL).left_exp_sigma3(-w).right_exp_sigma3(w);
    return {S.a11, S.a21};
}

// ---------------------------------------------------------------------------
// Reflection coefficient
// ---------------------------------------------------------------------------

cx box_reflection_closed_form(const BackgroundParams& bg, const BoxDatum& box,
                              cx k, LimitSide side) {
    const double q0 = bg.q0, beta = box.beta, chi = box.chi, L = box.halfwidth;
    cx lam = lambda_branch(k, bg, side);
    // sqrt(k^2 + beta^2): the expression below is even in this root, so the
    // principal branch is safe.
    cx w = std::sqrt(k * k + beta * beta);
    cx arg = 2.0 * L * w;
    // w cot(w arg-scale) evaluated stably for large |Im|
    cx wcot;
    if (std::abs(arg.imag()) > 30.0) {
        wcot = w * cx(0.0, arg.imag() > 0 ? 1.0 : -1.0);
    } else if (std::abs(arg) < 1e-8) {
        wcot = (std::abs(w) < 1e-12) ? cx(1.0 / (2.0 * L), 0.0) : w / arg;
    } else {
        wcot = w * std::cos(arg) / std::sin(arg);
    }
    // The phase carried by the eigenfunction normalization used here is
    // e^{-2 i lambda L}; direct integration of the Lax pair and the jump
    // relation r+ = -(qbar_-/q_-) rbar across B both confirm it.
    cx numer = std::exp(-2.0 * cx(0.0, 1.0) * lam * L) *
               ((beta * std::cos(chi) - q0) * k -
                cx(0.0, 1.0) * beta * lam * std::sin(chi));
    cx denom = lam * wcot - cx(0.0, 1.0) * (k * k + q0 * beta * std::cos(chi));
    return numer / denom;
}

struct ReflectionData::CauchyCache {
    std::mutex mutex;
    std::map<double, std::shared_ptr<const ReflectionCauchy>> by_end;
};

ReflectionData ReflectionData::closed_form_box(const InitialDatum& datum) {
    if (!datum.is_box())
        throw config_error("closed_form_box requires a box datum");
    ReflectionData r;
    r.source_ = Source::closed_form_box;
    r.bg_ = datum.background();
    r.margin_ = 0.0;
    r.datum_ = std::make_shared<InitialDatum>(datum);
    r.cache_ = std::make_shared<CauchyCache>();
    return r;
}

ReflectionData ReflectionData::from_ode(const InitialDatum& datum,
                                        double analyticity_margin,
                                        const OdeOptions& opts) {
    ReflectionData r;
    r.source_ = Source::ode_derived;
    r.bg_ = datum.background();
    r.margin_ = analyticity_margin;
    r.datum_ = std::make_shared<InitialDatum>(datum);
    r.ode_opts_ = opts;
    r.cache_ = std::make_shared<CauchyCache>();
    return r;
}

ReflectionData ReflectionData::reflectionless(const BackgroundParams& bg) {
    ReflectionData r;
    r.source_ = Source::closed_form_box;
    r.bg_ = bg;
    r.zero_ = true;
    r.cache_ = std::make_shared<CauchyCache>();
    return r;
}

cx ReflectionData::r(cx k) const {
    if (zero_) return 0.0;
    if (source_ == Source::closed_form_box)
        return box_reflection_closed_form(bg_, datum_->box(), k);

    if (margin_ > 0.0 && std::abs(im_lambda(k, bg_)) >= margin_)
        throw analyticity_domain_error(
            "reflection requested outside the declared strip Sigma_eps");
    // r = -b/abar with abar(k) = conj(a(conj k)); in Sigma_eps both a and b
    // extend analytically, so b is evaluated directly at complex k.
    auto [a_at_kbar, b_unused] = scattering_entries(*datum_, std::conj(k), ode_opts_);
    (void)b_unused;
    cx abar = std::conj(a_at_kbar);
    if (std::abs(abar) < 1e-12)
        throw spectral_singularity_error("abar(k) ~ 0: discrete spectrum present");
    auto [a2, b2] = scattering_entries(*datum_, k, ode_opts_);
    (void)a2;
    return -b2 / abar;
}

double ReflectionData::log_one_plus_rr(double nu) const {
    if (zero_) return 0.0;
    cx rv = r(cx(nu, 0.0));
    return std::log1p(std::norm(rv));
}

std::shared_ptr<const ReflectionCauchy> ReflectionData::cauchy(double k_end) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->by_end.find(k_end);
    if (it != cache_->by_end.end()) return it->second;
    auto built = std::make_shared<const ReflectionCauchy>(*this, k_end);
    cache_->by_end.emplace(k_end, built);
    return built;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

SpectrumReport certify_no_discrete_spectrum(const InitialDatum& datum,
                                            const SpectrumGrid& grid,
                                            double threshold,
                                            const OdeOptions& opts) {
    const auto& bg = datum.background();
    SpectrumReport rep;
    rep.threshold = threshold;
    rep.min_abs_a = std::numeric_limits<double>::infinity();
    auto visit = [&](cx k) {
        double scale = std::max(1.0, bg.q0);
        if (std::abs(k - cx(0.0, bg.q0)) <= 1e-6 * scale ||
            std::abs(k + cx(0.0, bg.q0)) <= 1e-6 * scale)
            return; // excluded points of Sigma*
        // keep off the cut itself: a on B- is its right limit
        if (std::abs(k.real()) < 1e-9 && std::abs(k.imag()) < bg.q0)
            k += cx(1e-9, 0.0);
        auto [a, b] = scattering_entries(datum, k, opts);
        (void)b;
        ++rep.samples;
        if (std::abs(a) < rep.min_abs_a) {
            rep.min_abs_a = std::abs(a);
            rep.argmin = k;
        }
    };
    for (int i = 0; i < grid.n_re; ++i) {
        double re = -grid.re_max + 2.0 * grid.re_max * i / (grid.n_re - 1);
        for (int j = 0; j < grid.n_im; ++j) {
            double im = -grid.im_max * j / (grid.n_im - 1);
            visit(cx(re, im));
        }
    }
    rep.certified = rep.min_abs_a > threshold;
    return rep;
}

} // namespace fnls
