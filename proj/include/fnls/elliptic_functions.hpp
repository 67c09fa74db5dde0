#ifndef FNLS_ELLIPTIC_FUNCTIONS_HPP
#define FNLS_ELLIPTIC_FUNCTIONS_HPP

#include "fnls/types.hpp"

namespace fnls {

// Genus-1 machinery: complete elliptic integral K, Jacobi theta functions
// with purely imaginary period, and the elliptic function sn.
//
// Modulus convention: K(m) = int_0^{pi/2} dz / sqrt(1 - m^2 sin^2 z),
// i.e. m is the modulus (m^2 would be the parameter).

// Complete elliptic integral of the first kind by AGM iteration.
// Requires 0 <= m < 1.
double complete_K(double m);

// Immutable nome/period data shared by all theta evaluations for one modulus.
struct ThetaContext {
    double tau_im = 0.0;        // tau = i tau_im, tau_im > 0
    double rho = 0.0;           // nome e^{i pi tau} = e^{-pi tau_im}
    int truncation_terms = 0;   // series cap for this context

    cx tau() const { return cx(0.0, tau_im); }
};

// Context from the elliptic modulus: tau = i K(sqrt(1-m^2)) / K(m).
// Requires 0 < m < 1 (both endpoints have a degenerate nome).
ThetaContext theta_context(double m);

// Context directly from a purely imaginary period i*tau_im.
ThetaContext theta_context_from_tau(double tau_im);

// Jacobi theta_j(z, rho), j = 1..4, by truncated symmetric series.
cx theta_j(int j, cx z, const ThetaContext& ctx);

// d/dz theta_j(z, rho) from the term-differentiated series.
cx theta_j_dz(int j, cx z, const ThetaContext& ctx);

// Theta(k) = theta_3(pi k, rho); entire, Theta(k + 1) = Theta(k) and
// Theta(k + tau) = e^{-2 i pi k - i pi tau} Theta(k).
cx Theta_cap(cx k, const ThetaContext& ctx);

// Jacobi sn via the theta quotient; m = 0 degenerates to sin.
cx sn(cx z, double m);

} // namespace fnls

#endif
