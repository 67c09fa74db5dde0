#include "fnls/plane_wave.hpp"

#include <cmath>

#include "fnls/contour_quadrature.hpp"

namespace fnls {

std::pair<double, double> stationary_points(double xi, const BackgroundParams& bg) {
    double b = 4.0 * std::sqrt(2.0) * bg.q0;
    if (std::abs(xi) < b)
        throw wrong_region_error(
            "|xi| < 4 sqrt(2) q0: no real stationary points; use the "
            "modulated elliptic wave region");
    double disc = std::sqrt((xi - b) * (xi + b));
    double k1 = (xi - disc) / 8.0, k2 = (xi + disc) / 8.0;
    if (k1 > k2) std::swap(k1, k2);
    return {k1, k2};
}

cx delta_pw(cx k, const ReflectionData& r, double k1) {
    return r.cauchy(k1)->delta(k);
}

cx delta_pw_side(double nu, const ReflectionData& r, double k1, LimitSide side) {
    return r.cauchy(k1)->delta_side(nu, side);
}

double g_inf_pw(const ReflectionData& r, double k1, const BackgroundParams& bg,
                double* im_residual) {
    auto cauchy = r.cauchy(k1);
    const double q0 = bg.q0;
    // zeta = i y on B, right limit; lambda = sqrt(q0^2 - y^2) there
    auto integrand = [&](cx z) -> cx {
        double y = z.real();
        return cauchy->log_delta(cx(0.0, y)) * cx(0.0, 1.0) /
               std::sqrt((q0 - y) * (q0 + y));
    };
    PathSegment seg{cx(-q0, 0.0), cx(q0, 0.0), EndpointSingularity::inverse_sqrt,
                    EndpointSingularity::inverse_sqrt};
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-14;
    cx val = -integrate_segment(integrand, seg, spec).value / pi;
    if (im_residual) *im_residual = std::abs(val.imag());
    if (std::abs(val.imag()) > 1e-9)
        throw numeric_error("g_inf_pw: imaginary residue above 1e-9");
    return val.real();
}

cx q_asymp_pw(double x, double t, const PlaneWaveParams& params,
              const BackgroundParams& bg) {
    double b = 4.0 * std::sqrt(2.0) * bg.q0;
    if (t > 0.0) {
        double xi = x / t;
        if (std::abs(xi) < b || (xi < 0.0) != (params.side == RegionSide::left))
            throw wrong_region_error("(x, t) not in the stored plane wave region");
        if (std::abs(xi - params.xi) > 1e-6 * std::max(1.0, std::abs(params.xi)))
            throw wrong_region_error("x/t does not match the stored xi");
    }
    cx q = (params.side == RegionSide::left) ? bg.q_minus : bg.q_plus;
    return q * std::exp(cx(0.0, 2.0 * params.g_inf));
}

PlaneWaveParams make_plane_wave_params(double xi, const ReflectionData& r) {
    const BackgroundParams& bg = r.background();
    PlaneWaveParams p;
    p.bg = bg;
    p.xi = xi;
    std::tie(p.k1, p.k2) = stationary_points(xi, bg);
    if (xi < 0.0) {
        p.side = RegionSide::left;
        p.g_inf = g_inf_pw(r, p.k1, bg, &p.g_inf_im_residual);
    } else {
        // right region through the reflected problem: k1_refl = -k2
        p.side = RegionSide::right;
        if (!r.datum())
            throw config_error("right plane-wave region needs a datum to reflect");
        InitialDatum refl = r.datum()->reflected();
        ReflectionData r_refl =
            (r.source() == ReflectionData::Source::closed_form_box)
                ? ReflectionData::closed_form_box(refl)
                : ReflectionData::from_ode(refl, r.analyticity_margin());
        p.g_inf = g_inf_pw(r_refl, -p.k2, refl.background(), &p.g_inf_im_residual);
    }
    return p;
}

} // namespace fnls
