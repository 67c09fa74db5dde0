#ifndef FNLS_CONTOUR_QUADRATURE_HPP
#define FNLS_CONTOUR_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "fnls/types.hpp"

namespace fnls {

// Integrable endpoint behavior of an integrand on a path segment.
// inverse_sqrt covers any half-integer power |s|^(n/2); the substitution
// s = u^2 used internally smooths both (s)^(-1/2) poles and (s)^(1/2) zeros.
enum class EndpointSingularity { none, inverse_sqrt, logarithmic };

// Straight segment with an affine parametrization from [0,1].
struct PathSegment {
    cx start;
    cx end;
    EndpointSingularity start_singularity = EndpointSingularity::none;
    EndpointSingularity end_singularity = EndpointSingularity::none;

    PathSegment(cx s, cx e,
                EndpointSingularity ss = EndpointSingularity::none,
                EndpointSingularity es = EndpointSingularity::none)
        : start(s), end(e), start_singularity(ss), end_singularity(es) {
        if (s == e) throw config_error("degenerate path segment");
    }
    cx point(double t) const { return start + t * (end - start); }
    cx tangent() const { return end - start; }
    PathSegment reversed() const {
        return PathSegment(end, start, end_singularity, start_singularity);
    }
};

// Chain of segments; consecutive segments must share endpoints.
struct Contour {
    std::vector<PathSegment> segments;
    bool oriented_upward = true;

    void validate() const {
        for (size_t i = 1; i < segments.size(); ++i)
            if (std::abs(segments[i].start - segments[i - 1].end) >
                1e-12 * (1.0 + std::abs(segments[i].start)))
                throw config_error("contour segments are not chained");
    }
};

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_subdivision_depth = 24;
    double tail_cutoff = 1e-14;

    QuadratureSpec scaled(double factor) const {
        QuadratureSpec s = *this;
        s.rel_tol *= factor;
        s.abs_tol *= factor;
        return s;
    }
};

struct QuadratureResult {
    cx value{};
    double err_est = 0.0;
};

using Integrand = std::function<cx(cx)>;

// Adaptive Gauss-Kronrod integral of f over a straight segment, endpoint
// singularities removed per the segment annotations.
QuadratureResult integrate_segment(const Integrand& f, const PathSegment& seg,
                                   const QuadratureSpec& spec = {});

QuadratureResult integrate_contour(const Integrand& f, const Contour& contour,
                                   const QuadratureSpec& spec = {});

// Integral of f over origin + s*direction, s in (0, inf).  |f| must decay
// like s^(-2) or faster; dyadic panels are summed until a panel falls below
// tail_cutoff relative to the accumulated value.
QuadratureResult integrate_ray(const Integrand& f, cx origin, cx direction,
                               const QuadratureSpec& spec = {});

// Bracketed root of a continuous real function (Brent's method).
double brent_root(const std::function<double(double)>& F, double lo, double hi,
                  double tol);

// Continuous branch of log along an ordered sample sequence; the first
// sample uses the principal branch.
std::vector<cx> unwrap_log(const std::vector<cx>& values);

} // namespace fnls

#endif
