#ifndef FNLS_ASYMPTOTIC_PROFILE_HPP
#define FNLS_ASYMPTOTIC_PROFILE_HPP

#include <memory>
#include <optional>
#include <vector>

#include "fnls/elliptic_wave.hpp"
#include "fnls/plane_wave.hpp"

namespace fnls {

enum class Region { plane_wave_left, elliptic_left, elliptic_right, plane_wave_right };

Region classify_region(double xi, const BackgroundParams& bg);

// Regionwise leading-order profile evaluator across the whole (x, t)
// half-plane.  The cheap constants (k0, alpha, m, K, H0, Omega, v_inf) are
// solved exactly per point; the contour constants omega(xi) and g_inf(xi),
// which need the delta transform, are interpolated from a Chebyshev-node
// cache in xi built on first use of each region.
class AsymptoticEvaluator {
  public:
    struct Options {
        int spline_nodes = 40;          // omega/g_inf cache nodes per side
        double boundary_margin = 0.04;  // skip zone at |xi| ~ 4 sqrt2 q0, rel.
        double center_margin = 0.02;    // skip zone at xi ~ 0, relative
    };

    explicit AsymptoticEvaluator(const ReflectionData& r)
        : AsymptoticEvaluator(r, Options{}) {}
    AsymptoticEvaluator(const ReflectionData& r, Options opts);

    Region region(double x, double t) const;
    bool in_mask(double x, double t) const; // away from transition zones

    double modulus(double x, double t) const;
    cx value(double x, double t) const;

    // Elliptic constants at one xi with interpolated contour constants.
    EllipticParams elliptic_at(double xi) const;

    const BackgroundParams& background() const { return bg_; }

  private:
    struct SideCache;
    ReflectionData r_;
    ReflectionData r_reflected_; // built lazily only if a right region is hit
    bool have_reflected_ = false;
    BackgroundParams bg_;
    Options opts_;
    std::shared_ptr<SideCache> left_, right_;

    const SideCache& side_cache(bool right) const;
    double pw_g_inf(double xi) const;
};

} // namespace fnls

#endif
