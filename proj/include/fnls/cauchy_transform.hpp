#ifndef FNLS_CAUCHY_TRANSFORM_HPP
#define FNLS_CAUCHY_TRANSFORM_HPP

#include <map>
#include <mutex>
#include <vector>

#include "fnls/direct_scattering.hpp"
#include "fnls/types.hpp"

namespace fnls {

// Cauchy transform of f(nu) = ln(1 + r(nu) rbar(nu)) over (-inf, k_end]:
//
//   L(k) = (1/2 i pi) int_{-inf}^{k_end} f(nu) / (nu - k) dnu,
//
// so that delta(k) = exp(L(k)).  The integrand oscillates (box data) and has
// a slowly decaying O(nu^-2) tail, so the transform is evaluated from a
// composite Gauss-Legendre node cache built once per (datum, k_end):
//
//  - panels sized below a quarter of the local oscillation period on the
//    bulk range [-M0, k_end], refined geometrically toward k_end where the
//    transform has its logarithmic endpoint singularity;
//  - for box data the tail nu < -M0 uses the closed-form oscillation
//    average of f (the mean of ln(a cos^2 + b sin^2) over a period), whose
//    replacement error is O(period / M0^3);
//  - evaluation points close to the contour swap the affected cached panels
//    for a live adaptive integral, so side limits stay accurate.
class ReflectionCauchy {
  public:
    ReflectionCauchy(const ReflectionData& r, double k_end);

    double k_end() const { return k_end_; }

    // f(nu) = ln(1 + |r(nu)|^2) on the real axis.
    double f(double nu) const { return r_.log_one_plus_rr(nu); }

    // L(k); throws path_error for k on the cut (-inf, k_end].
    cx log_delta(cx k) const;

    cx delta(cx k) const { return std::exp(log_delta(k)); }

    // One-sided limits on the open cut nu < k_end, by Richardson
    // extrapolation in the offset off the axis.
    cx log_delta_side(double nu, LimitSide side) const;
    cx delta_side(double nu, LimitSide side) const {
        return std::exp(log_delta_side(nu, side));
    }

    // Reported bound on the neglected tail (zero when a tail model exists).
    double tail_bound() const { return tail_bound_; }

  private:
    ReflectionData r_;
    double k_end_;
    double bulk_panel_ = 0.0;
    double m0_ = 0.0;
    bool zero_ = false;

    // cached composite rule: per node position, weight, f value
    std::vector<double> nodes_, weights_, fvals_;
    std::vector<double> panel_lo_; // panel boundaries, ascending
    double tail_bound_ = 0.0;

    // contour integrals revisit the same spectral points many times
    mutable std::mutex memo_mutex_;
    mutable std::map<std::pair<double, double>, cx> memo_;

    cx cached_sum(cx k, double exclude_lo, double exclude_hi) const;
    cx live_window(cx k, double lo, double hi) const;
    cx log_delta_uncached(cx k) const;
};

} // namespace fnls

#endif
