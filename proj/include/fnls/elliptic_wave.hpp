#ifndef FNLS_ELLIPTIC_WAVE_HPP
#define FNLS_ELLIPTIC_WAVE_HPP

#include <optional>

#include "fnls/cauchy_transform.hpp"
#include "fnls/direct_scattering.hpp"
#include "fnls/elliptic_functions.hpp"
#include "fnls/plane_wave.hpp"
#include "fnls/types.hpp"

namespace fnls {

// Branch-point geometry of one similarity value in the modulated elliptic
// wave region |xi| < 4 sqrt(2) q0 (left half, xi < 0; the right half is
// reached through spatial reflection).
struct EllipticGeometry {
    BackgroundParams bg;
    double xi = 0.0;
    double k0 = 0.0;
    cx alpha{};
    double c0 = 0.0, c1 = 0.0, c2 = 0.0; // cubic (z-k0)(z-alpha)(z-abar)

    double alpha_re() const { return alpha.real(); }
    double alpha_im() const { return alpha.imag(); }

    // gamma with cuts B and the straight segment [abar, alpha]; equals the
    // paper's sheet-1 gamma everywhere outside the lens triangle
    // (abar, alpha, k0) swept by the contour deformation.
    cx gamma(cx k, LimitSide side = LimitSide::right) const;

    // (z - k0)(z - alpha)(z - abar)/gamma(z), the Abelian differential dh/-4.
    cx dh_over_m4(cx z) const;

    // dh_over_m4(z) - (z - xi/4), algebraically stabilized so the O(z^-2)
    // tail survives cancellation at large |z|.
    cx dh_regularized(cx z) const;

    bool inside_lens(cx k) const;

    // Right-sided limit of the deformed-cut gamma on the legs k0 -> alpha,
    // k0 -> abar, expressed through the straight-cut gamma above.  When k0
    // lies west of alpha_re the legs bulge west of the straight cut and the
    // east side of each leg is the lens interior, where the two branches
    // differ by a sign.
    double leg_gamma_sign() const { return (k0 < alpha.real()) ? -1.0 : 1.0; }
};

struct EllipticDiagnostics {
    double omega_im_residual = 0.0;
    double g_inf_im_residual = 0.0;
    double H0_im_residual = 0.0;
    double C_cross_check_err = 0.0;   // |C_quad - C_closed|
    double tau_cross_check_err = 0.0; // |tau_cycles - tau_modulus|
    double Omega_cross_rel_err = 0.0; // quadrature vs closed form
    double h_alpha_residual = 0.0;    // |Im h(alpha)|
    double beta_cycle_err = 0.0;      // |oint_beta dw - 1|
};

// The complete constant set of Theorems 2-3 for one xi.
struct EllipticParams {
    double xi = 0.0;
    RegionSide side = RegionSide::left;
    BackgroundParams bg;      // physical background
    BackgroundParams bg_work; // reflected when side == right

    double k0 = 0.0;
    cx alpha{};
    double m = 0.0;     // elliptic modulus
    double Kval = 0.0;  // K(m)
    cx tau{};           // Riemann period, in iR+
    cx Cnorm{};         // normalization of dw, in iR
    double Omega_big = 0.0;
    double omega_small = 0.0;
    double H0 = 0.0;
    double G_inf = 0.0;
    double g_inf = 0.0;
    double X_offset = 0.0;
    double k_star = 0.0;
    cx v_inf{};
    cx c_const{};
    std::optional<ThetaContext> theta_ctx;
    EllipticDiagnostics diag;
};

// Unique root k0(xi) of the paper's defining integral equation, bracketed in
// (xi/8, 0]; endpoints of the region are returned in closed form.
double solve_k0(double xi, const BackgroundParams& bg);

EllipticGeometry make_geometry(double xi, double k0, const BackgroundParams& bg);

struct AlphaModulus {
    cx alpha;
    double m;
    double Kval;
    cx tau;
    cx Cnorm;
    double C_cross_check_err;
    double tau_cross_check_err;
    double beta_cycle_err;
};

// alpha, modulus, period and normalization constants, with the closed forms
// cross-checked against cycle quadrature.
AlphaModulus alpha_and_modulus(double xi, double k0, const BackgroundParams& bg);

// Omega = pi |alpha + i q0| (xi - 2 alpha_re) / K(m)  (closed form).
double omega_big(const EllipticGeometry& geom, double m, double Kval);
// Abelian-integral form of Omega over the paths i q0 -> alpha, -i q0 -> abar.
double omega_big_quadrature(const EllipticGeometry& geom);

// Abel map v(k) = C int_{i q0}^k dz/gamma on the first sheet, path routed
// around the cuts.  Throws path_error if k lies inside the lens triangle.
cx abel_map(cx k, const EllipticGeometry& geom, cx Cnorm);

// v_inf = C int_{i q0}^{i inf} dz/gamma along the imaginary axis.
cx v_infinity(const EllipticGeometry& geom, cx Cnorm);

// delta for the elliptic-region cut (-inf, k0].
cx delta_ell(cx k, const ReflectionData& r, double k0);

// Contour pieces of the omega / g_inf expressions, with gamma taken as its
// right-sided limit on each contour (on the legs this is leg_gamma_sign()
// times the straight-cut branch).
struct OmegaTerms {
    cx I_B{};       // int_B ln delta^2 / gamma
    cx I_L7{};      // int_{k0->alpha}    ln(delta^2 / r)    / gamma
    cx I_L8{};      // int_{k0->abar}     ln(delta^2 rbar)   / gamma
    cx den{};       // int_{Btilde} dnu / gamma  ( = 1/(2C) )
    cx I_B_nu{}, I_L7_nu{}, I_L8_nu{}; // nu-weighted versions
};

OmegaTerms omega_contour_terms(const ReflectionData& r,
                               const EllipticGeometry& geom);

// omega = i (I_B + I_L7 - I_L8) / den; real, residue reported and enforced.
double omega_small(const ReflectionData& r, const EllipticGeometry& geom,
                   double* im_residual = nullptr,
                   const OmegaTerms* precomputed = nullptr);

// H0 from the regularized rays i q0 -> inf, -i q0 -> inf, and G_inf = H0+q0^2.
std::pair<double, double> H0_and_Ginf(const EllipticGeometry& geom,
                                      double* im_residual = nullptr);

// g_inf of the elliptic region (four-term contour expression).
double g_inf_ell(const ReflectionData& r, const EllipticGeometry& geom,
                 double omega, double* im_residual = nullptr,
                 const OmegaTerms* precomputed = nullptr);

// X = (omega - i Log(q_- / q0)) / 2 pi + 1/4.
double X_offset(double omega, const BackgroundParams& bg);

// |Im h(alpha)| from direct quadrature of the Abelian integral along
// i q0 -> alpha and -i q0 -> abar -> alpha; independent residual for k0.
double h_residual_at_alpha(const EllipticGeometry& geom);

// Theorem 2 profile (theta-function ratio).
cx q_asymp_ell(double x, double t, const EllipticParams& params,
               const BackgroundParams& bg);

// Theorem 3 modulus-squared (sn form).
double q_abs2_sn(double x, double t, const EllipticParams& params,
                 const BackgroundParams& bg);

struct EllipticBuildOptions {
    bool with_diagnostics = true; // run the quadrature cross-checks
};

EllipticParams make_elliptic_params(double xi, const ReflectionData& r,
                                    const EllipticBuildOptions& opts = {});

} // namespace fnls

#endif
