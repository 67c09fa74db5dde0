#ifndef FNLS_PLANE_WAVE_HPP
#define FNLS_PLANE_WAVE_HPP

#include "fnls/cauchy_transform.hpp"
#include "fnls/direct_scattering.hpp"
#include "fnls/types.hpp"

namespace fnls {

enum class RegionSide { left, right };

// Everything Theorem 1 needs for one similarity value xi in the plane wave
// region |xi| > 4 sqrt(2) q0.
struct PlaneWaveParams {
    double xi = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double g_inf = 0.0;
    double g_inf_im_residual = 0.0;
    RegionSide side = RegionSide::left;
    BackgroundParams bg;
};

// Real stationary points of theta, k1 <= k2, roots of k^2 - (xi/4)k + q0^2/2.
// Throws wrong_region_error for |xi| < 4 sqrt(2) q0.
std::pair<double, double> stationary_points(double xi, const BackgroundParams& bg);

// delta(k) for the plane-wave cut (-inf, k1]; jump delta+ = delta- (1+r rbar).
cx delta_pw(cx k, const ReflectionData& r, double k1);
cx delta_pw_side(double nu, const ReflectionData& r, double k1, LimitSide side);

// g_inf = -(1/pi) int_B ln delta(zeta)/lambda(zeta) dzeta, obtained from the
// double integral of the paper by recognizing the inner Cauchy integral as
// 2 i pi ln delta.  Real; the imaginary residue is a health metric and any
// residue above 1e-9 aborts.
double g_inf_pw(const ReflectionData& r, double k1, const BackgroundParams& bg,
                double* im_residual = nullptr);

// Leading-order plane-wave profile e^{2 i g_inf} q_-+ (modulus exactly q0).
cx q_asymp_pw(double x, double t, const PlaneWaveParams& params,
              const BackgroundParams& bg);

// Full parameter build for one xi; the right region is evaluated through the
// spatially reflected problem.
PlaneWaveParams make_plane_wave_params(double xi, const ReflectionData& r);

} // namespace fnls

#endif
