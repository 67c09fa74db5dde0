#include "fnls/asymptotic_profile.hpp"

#include <algorithm>
#include <cmath>

namespace fnls {

Region classify_region(double xi, const BackgroundParams& bg) {
    double b = 4.0 * std::sqrt(2.0) * bg.q0;
    if (xi <= -b) return Region::plane_wave_left;
    if (xi >= b) return Region::plane_wave_right;
    return xi <= 0.0 ? Region::elliptic_left : Region::elliptic_right;
}

namespace {

// barycentric interpolation on Chebyshev-Lobatto nodes
struct ChebTable {
    double lo = 0.0, hi = 1.0;
    std::vector<double> nodes; // ascending in [lo, hi]
    std::vector<std::vector<double>> columns;

    void build_nodes(double a, double b, int n) {
        lo = a;
        hi = b;
        nodes.resize(n + 1);
        for (int j = 0; j <= n; ++j) {
            double c = std::cos(pi * double(j) / double(n));
            nodes[n - j] = 0.5 * (a + b) + 0.5 * (b - a) * c;
        }
    }
    double eval(int col, double x) const {
        const auto& v = columns[col];
        const int n = int(nodes.size()) - 1;
        double num = 0.0, den = 0.0;
        for (int j = 0; j <= n; ++j) {
            double w = (j == 0 || j == n) ? 0.5 : 1.0;
            if ((n - j) & 1) w = -w; // weights for ascending node order
            double d = x - nodes[j];
            if (std::abs(d) < 1e-14 * std::max(1.0, std::abs(x))) return v[j];
            double q = w / d;
            num += q * v[j];
            den += q;
        }
        return num / den;
    }
};

} // namespace

struct AsymptoticEvaluator::SideCache {
    bool built_elliptic = false;
    bool built_pw = false;
    ChebTable ell; // columns: k0, omega, g_inf, H0, Re v_inf, Im v_inf
    ChebTable pw;  // in u = -b/xi; column: g_inf
    std::mutex mutex;
};

AsymptoticEvaluator::AsymptoticEvaluator(const ReflectionData& r, Options opts)
    : r_(r), r_reflected_(r), bg_(r.background()), opts_(opts),
      left_(std::make_shared<SideCache>()), right_(std::make_shared<SideCache>()) {}

Region AsymptoticEvaluator::region(double x, double t) const {
    if (t <= 0.0) throw config_error("asymptotic evaluator needs t > 0");
    return classify_region(x / t, bg_);
}

bool AsymptoticEvaluator::in_mask(double x, double t) const {
    if (t <= 0.0) return false;
    double b = 4.0 * std::sqrt(2.0) * bg_.q0;
    double axi = std::abs(x / t);
    if (std::abs(axi - b) < opts_.boundary_margin * b) return false;
    if (axi < opts_.center_margin * b) return false;
    return true;
}

const AsymptoticEvaluator::SideCache&
AsymptoticEvaluator::side_cache(bool right) const {
    auto self = const_cast<AsymptoticEvaluator*>(this);
    if (right && !self->have_reflected_) {
        if (!r_.datum())
            throw config_error("right-side evaluation needs a datum to reflect");
        InitialDatum refl = r_.datum()->reflected();
        self->r_reflected_ =
            (r_.source() == ReflectionData::Source::closed_form_box)
                ? ReflectionData::closed_form_box(refl)
                : ReflectionData::from_ode(refl, r_.analyticity_margin());
        self->have_reflected_ = true;
    }
    return right ? *right_ : *left_;
}

EllipticParams AsymptoticEvaluator::elliptic_at(double xi) const {
    const bool right = xi > 0.0;
    const double axi = std::abs(xi);
    const double b = 4.0 * std::sqrt(2.0) * bg_.q0;
    const SideCache& cache_ref = side_cache(right);
    auto& cache = const_cast<SideCache&>(cache_ref);
    const ReflectionData& rwork = right ? r_reflected_ : r_;

    {
        std::lock_guard<std::mutex> lock(cache.mutex);
        if (!cache.built_elliptic) {
            double lo = -b * (1.0 - opts_.boundary_margin);
            double hi = -b * opts_.center_margin;
            cache.ell.build_nodes(lo, hi, opts_.spline_nodes);
            cache.ell.columns.assign(6, {});
            for (double node : cache.ell.nodes) {
                EllipticBuildOptions bo;
                bo.with_diagnostics = false;
                EllipticParams p = make_elliptic_params(node, rwork, bo);
                cache.ell.columns[0].push_back(p.k0);
                cache.ell.columns[1].push_back(p.omega_small);
                cache.ell.columns[2].push_back(p.g_inf);
                cache.ell.columns[3].push_back(p.H0);
                cache.ell.columns[4].push_back(p.v_inf.real());
                cache.ell.columns[5].push_back(p.v_inf.imag());
            }
            cache.built_elliptic = true;
        }
    }
    double xw = -axi; // left-side similarity value of the working problem
    if (xw < cache.ell.lo || xw > cache.ell.hi)
        throw wrong_region_error(
            "xi outside the cached elliptic window (transition zone)");

    const BackgroundParams& bgw = rwork.background();
    EllipticParams p;
    p.xi = xi;
    p.side = right ? RegionSide::right : RegionSide::left;
    p.bg = bg_;
    p.bg_work = bgw;
    p.k0 = cache.ell.eval(0, xw);
    EllipticGeometry geom = make_geometry(xw, p.k0, bgw);
    p.alpha = geom.alpha;
    double mod_dist = std::abs(p.alpha + cx(0.0, bgw.q0));
    p.m = 2.0 * std::sqrt(bgw.q0 * p.alpha.imag()) / mod_dist;
    p.Kval = complete_K(p.m);
    p.Cnorm = cx(0.0, 1.0) * mod_dist / (4.0 * p.Kval);
    double Kp = complete_K(std::sqrt((1.0 - p.m) * (1.0 + p.m)));
    p.tau = cx(0.0, Kp / p.Kval);
    p.theta_ctx = theta_context(p.m);
    p.Omega_big = omega_big(geom, p.m, p.Kval);
    p.omega_small = cache.ell.eval(1, xw);
    p.g_inf = cache.ell.eval(2, xw);
    p.H0 = cache.ell.eval(3, xw);
    p.G_inf = p.H0 + bgw.q0 * bgw.q0;
    p.v_inf = cx(cache.ell.eval(4, xw), cache.ell.eval(5, xw));
    p.X_offset = X_offset(p.omega_small, bgw);
    p.k_star = bgw.q0 * p.alpha.real() / (bgw.q0 + p.alpha.imag());
    return p;
}

double AsymptoticEvaluator::pw_g_inf(double xi) const {
    const bool right = xi > 0.0;
    const double axi = std::abs(xi);
    const double b = 4.0 * std::sqrt(2.0) * bg_.q0;
    const SideCache& cache_ref = side_cache(right);
    auto& cache = const_cast<SideCache&>(cache_ref);
    const ReflectionData& rwork = right ? r_reflected_ : r_;

    {
        std::lock_guard<std::mutex> lock(cache.mutex);
        if (!cache.built_pw) {
            // u = b/|xi| in (0, 1); g_inf is smooth in u and -> 0 with u
            double u_lo = 0.005;
            double u_hi = 1.0 / (1.0 + opts_.boundary_margin);
            cache.pw.build_nodes(u_lo, u_hi, std::max(16, opts_.spline_nodes / 2));
            cache.pw.columns.assign(1, {});
            for (double u : cache.pw.nodes) {
                double xw = -b / u;
                auto [k1, k2] = stationary_points(xw, rwork.background());
                (void)k2;
                cache.pw.columns[0].push_back(
                    g_inf_pw(rwork, k1, rwork.background()));
            }
            cache.built_pw = true;
        }
    }
    double u = b / axi;
    if (u > cache.pw.hi)
        throw wrong_region_error("xi inside the plane-wave transition zone");
    if (u < cache.pw.lo) return 0.0; // |xi| beyond the cache: g_inf ~ 0
    return cache.pw.eval(0, u);
}

double AsymptoticEvaluator::modulus(double x, double t) const {
    if (r_.is_reflectionless()) return bg_.q0; // background solves exactly
    switch (region(x, t)) {
    case Region::plane_wave_left:
    case Region::plane_wave_right:
        return bg_.q0;
    default: {
        EllipticParams p = elliptic_at(x / t);
        return std::sqrt(q_abs2_sn(x, t, p, bg_));
    }
    }
}

cx AsymptoticEvaluator::value(double x, double t) const {
    if (r_.is_reflectionless())
        return (x < 0.0) ? bg_.q_minus : bg_.q_plus;
    switch (region(x, t)) {
    case Region::plane_wave_left:
        return bg_.q_minus * std::exp(cx(0.0, 2.0 * pw_g_inf(x / t)));
    case Region::plane_wave_right:
        return bg_.q_plus * std::exp(cx(0.0, 2.0 * pw_g_inf(x / t)));
    default: {
        EllipticParams p = elliptic_at(x / t);
        return q_asymp_ell(x, t, p, bg_);
    }
    }
}

} // namespace fnls
