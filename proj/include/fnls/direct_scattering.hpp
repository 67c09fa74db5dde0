#ifndef FNLS_DIRECT_SCATTERING_HPP
#define FNLS_DIRECT_SCATTERING_HPP

#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "fnls/branch_functions.hpp"
#include "fnls/types.hpp"

namespace fnls {

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

// q(x,0) = q0 for |x| > L, beta e^{i chi} for |x| < L.
struct BoxDatum {
    double beta;
    double chi;
    double halfwidth;
};

// Uniformly sampled datum; q - q_+- must decay below 1e-10 at the grid ends.
struct SampledDatum {
    std::vector<double> x;
    std::vector<cx> q;
    double support_halfwidth;
};

class InitialDatum {
  public:
    InitialDatum(const BackgroundParams& bg, BoxDatum box);
    InitialDatum(const BackgroundParams& bg, SampledDatum samples);

    const BackgroundParams& background() const { return bg_; }
    bool is_box() const { return std::holds_alternative<BoxDatum>(shape_); }
    const BoxDatum& box() const { return std::get<BoxDatum>(shape_); }
    const SampledDatum& samples() const { return std::get<SampledDatum>(shape_); }

    // q(x, 0); sampled data interpolated by a cubic Hermite rule.
    cx value(double x) const;

    // Point beyond which |q - q_+-| < tol; integration starts/ends there.
    double effective_halfwidth(double tol = 1e-12) const;

    // Datum of the spatially reflected problem q(-x, 0).
    InitialDatum reflected() const;

  private:
    BackgroundParams bg_;
    std::variant<BoxDatum, SampledDatum> shape_;
};

// CSV with three numeric columns x, Re q, Im q on a uniform grid; a header
// row is permitted.
InitialDatum load_sampled_csv(const std::string& path, const BackgroundParams& bg);

// ---------------------------------------------------------------------------
// Eigenfunctions and scattering data
// ---------------------------------------------------------------------------

enum class IntegrationDirection { from_left, from_right };

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-13;
    double max_step_fraction = 0.05; // of the support width
};

// mu solving mu_x = (ik sigma3 + Q) mu - i lambda mu sigma3 across the
// effective support, normalized to E_-+ at the approach end; returns the
// value at the far end of the support.
Mat2 integrate_mu(const InitialDatum& datum, cx k, IntegrationDirection dir,
                  const OdeOptions& opts = {});

// Scattering entries a(k) = S11, b(k) = S21 from
// S = e^{-i lambda L sigma3} E_+^{-1} mu_-(L) e^{i lambda L sigma3}.
std::pair<cx, cx> scattering_entries(const InitialDatum& datum, cx k,
                                     const OdeOptions& opts = {});

class ReflectionCauchy; // defined in cauchy_transform.hpp

// Evaluator for the reflection coefficient r(k) = -b(k)/abar(k) and its
// Schwartz conjugate, analytic in the strip Sigma_eps.
class ReflectionData {
  public:
    enum class Source { closed_form_box, ode_derived };

    static ReflectionData closed_form_box(const InitialDatum& datum);
    static ReflectionData from_ode(const InitialDatum& datum,
                                   double analyticity_margin,
                                   const OdeOptions& opts = {});
    // r identically zero on the background (used by tests and limits).
    static ReflectionData reflectionless(const BackgroundParams& bg);

    cx r(cx k) const;
    cx rbar(cx k) const { return std::conj(r(std::conj(k))); }
    // ln(1 + r rbar) on the real axis (real-valued there).
    double log_one_plus_rr(double nu) const;

    Source source() const { return source_; }
    bool is_reflectionless() const { return zero_; }
    const BackgroundParams& background() const { return bg_; }
    double analyticity_margin() const { return margin_; }
    const InitialDatum* datum() const { return datum_ ? &*datum_ : nullptr; }

    // Shared Cauchy-transform cache for delta integrals with cut end k_end.
    std::shared_ptr<const ReflectionCauchy> cauchy(double k_end) const;

  private:
    ReflectionData() = default;
    Source source_ = Source::closed_form_box;
    BackgroundParams bg_;
    double margin_ = 0.0; // <= 0 means unrestricted (entire continuation)
    std::shared_ptr<const InitialDatum> datum_;
    OdeOptions ode_opts_;
    bool zero_ = false;

    struct CauchyCache;
    std::shared_ptr<CauchyCache> cache_;
    friend class ReflectionCauchy;
};

// Closed-form reflection coefficient of the box datum.
cx box_reflection_closed_form(const BackgroundParams& bg, const BoxDatum& box,
                              cx k, LimitSide side = LimitSide::right);

// ---------------------------------------------------------------------------
// Discrete-spectrum certification
// ---------------------------------------------------------------------------

struct SpectrumGrid {
    double re_max = 4.0;  // grid spans [-re_max, re_max] x [-im_max, 0]
    double im_max = 3.0;
    int n_re = 41;
    int n_im = 21;
};

struct SpectrumReport {
    double min_abs_a = 0.0;
    cx argmin{};
    double threshold = 0.0;
    bool certified = false;
    int samples = 0;
};

// Samples |a| over the lower half plane and the continuous spectrum and
// reports the minimum; certified = (min > threshold).
SpectrumReport certify_no_discrete_spectrum(const InitialDatum& datum,
                                            const SpectrumGrid& grid = {},
                                            double threshold = 1e-3,
                                            const OdeOptions& opts = {});

} // namespace fnls

#endif
