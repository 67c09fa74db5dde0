#include "fnls/elliptic_functions.hpp"

#include <cmath>

namespace fnls {

double complete_K(double m) {
    if (m < 0.0 || m >= 1.0)
        throw degenerate_modulus_error("complete_K requires 0 <= m < 1");
    double a = 1.0, b = std::sqrt((1.0 - m) * (1.0 + m));
    for (int i = 0; i < 64; ++i) {
        double an = 0.5 * (a + b);
        double bn = std::sqrt(a * b);
        a = an;
        b = bn;
        if (std::abs(a - b) <= 1e-14 * a) break;
    }
    return pi / (2.0 * a);
}

ThetaContext theta_context_from_tau(double tau_im) {
    if (!(tau_im > 0.0))
        throw degenerate_modulus_error("theta period must have Im tau > 0");
    ThetaContext ctx;
    ctx.tau_im = tau_im;
    ctx.rho = std::exp(-pi * tau_im);
    // First omitted term rho^{N^2} below 1e-18 at real arguments; complex
    // arguments extend the cap at evaluation time up to the hard limit.
    double need = 18.0 * std::log(10.0) / (pi * tau_im);
    ctx.truncation_terms = std::min(200, int(std::ceil(std::sqrt(need))) + 4);
    return ctx;
}

ThetaContext theta_context(double m) {
    if (m <= 0.0 || m >= 1.0)
        throw degenerate_modulus_error("theta_context requires 0 < m < 1");
    double Kp = complete_K(std::sqrt((1.0 - m) * (1.0 + m)));
    double K = complete_K(m);
    return theta_context_from_tau(Kp / K);
}

namespace {

constexpr int hard_cap = 200;

// theta_2/theta_1 share the half-integer exponent ladder, theta_3/theta_4 the
// integer one.  Terms are added until two successive partial sums agree to
// 1e-16 relative, with the context cap as a guard.
cx theta_series(int j, cx z, const ThetaContext& ctx) {
    const double lnrho = -pi * ctx.tau_im;
    const int cap = std::min(hard_cap, std::max(ctx.truncation_terms, 8) * 4);
    cx sum{};
    double scale = 0.0;
    int stable = 0;
    for (int n = 0; n <= cap; ++n) {
        cx term;
        switch (j) {
        case 1: {
            double e = (n + 0.5) * (n + 0.5);
            term = 2.0 * std::exp(e * lnrho) * std::sin((2.0 * n + 1.0) * z);
            if (n & 1) term = -term;
            break;
        }
        case 2: {
            double e = (n + 0.5) * (n + 0.5);
            term = 2.0 * std::exp(e * lnrho) * std::cos((2.0 * n + 1.0) * z);
            break;
        }
        case 3: {
            if (n == 0) { term = 1.0; break; }
            term = 2.0 * std::exp(double(n) * n * lnrho) * std::cos(2.0 * n * z);
            break;
        }
        case 4: {
            if (n == 0) { term = 1.0; break; }
            term = 2.0 * std::exp(double(n) * n * lnrho) * std::cos(2.0 * n * z);
            if (n & 1) term = -term;
            break;
        }
        default:
            throw config_error("theta_j index must be 1..4");
        }
        sum += term;
        scale = std::max(scale, std::abs(sum));
        if (std::abs(term) < 1e-16 * std::max(scale, 1e-300)) {
            if (++stable >= 2) return sum;
        } else {
            stable = 0;
        }
    }
    throw precision_error("theta series did not converge within the term cap");
}

cx theta_series_dz(int j, cx z, const ThetaContext& ctx) {
    const double lnrho = -pi * ctx.tau_im;
    const int cap = std::min(hard_cap, std::max(ctx.truncation_terms, 8) * 4);
    cx sum{};
    double scale = 0.0;
    int stable = 0;
    for (int n = 0; n <= cap; ++n) {
        cx term;
        switch (j) {
        case 1: {
            double e = (n + 0.5) * (n + 0.5), f = 2.0 * n + 1.0;
            term = 2.0 * f * std::exp(e * lnrho) * std::cos(f * z);
            if (n & 1) term = -term;
            break;
        }
        case 2: {
            double e = (n + 0.5) * (n + 0.5), f = 2.0 * n + 1.0;
            term = -2.0 * f * std::exp(e * lnrho) * std::sin(f * z);
            break;
        }
        case 3: {
            if (n == 0) { term = 0.0; break; }
            term = -4.0 * n * std::exp(double(n) * n * lnrho) * std::sin(2.0 * n * z);
            break;
        }
        case 4: {
            if (n == 0) { term = 0.0; break; }
            term = -4.0 * n * std::exp(double(n) * n * lnrho) * std::sin(2.0 * n * z);
            if (n & 1) term = -term;
            break;
        }
        default:
            throw config_error("theta_j index must be 1..4");
        }
        sum += term;
        scale = std::max(scale, std::abs(sum));
        if (n >= 1 && std::abs(term) < 1e-16 * std::max(scale, 1e-300)) {
            if (++stable >= 2) return sum;
        } else {
            stable = 0;
        }
    }
    throw precision_error("theta derivative series did not converge");
}

} // namespace

cx theta_j(int j, cx z, const ThetaContext& ctx) { return theta_series(j, z, ctx); }

cx theta_j_dz(int j, cx z, const ThetaContext& ctx) {
    return theta_series_dz(j, z, ctx);
}

cx Theta_cap(cx k, const ThetaContext& ctx) { return theta_series(3, pi * k, ctx); }

cx sn(cx z, double m) {
    if (m < 0.0 || m >= 1.0)
        throw degenerate_modulus_error("sn requires 0 <= m < 1");
    if (m == 0.0) return std::sin(z);
    ThetaContext ctx = theta_context(m);
    cx t30 = theta_series(3, 0.0, ctx);
    cx t20 = theta_series(2, 0.0, ctx);
    cx u = z / (t30 * t30);
    cx den = theta_series(4, u, ctx);
    if (std::abs(den) < 1e-14)
        throw pole_error("sn evaluated too close to a pole");
    return (t30 / t20) * theta_series(1, u, ctx) / den;
}

} // namespace fnls
