#ifndef FNLS_TYPES_HPP
#define FNLS_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace fnls {

using cx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Base class for all numerical failures raised by this library.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation requested exactly at a branch point (+-i q0, alpha, ...).
struct branch_point_error : numeric_error {
    using numeric_error::numeric_error;
};

// Adaptive quadrature ran out of subdivision depth.  Carries the best
// available estimate so callers can decide whether to accept it.
struct non_convergence_error : numeric_error {
    cx best_estimate;
    double err_est;
    non_convergence_error(const std::string& msg, cx best, double err)
        : numeric_error(msg), best_estimate(best), err_est(err) {}
};

struct divergence_error : numeric_error {
    using numeric_error::numeric_error;
};

struct bracketing_error : numeric_error {
    using numeric_error::numeric_error;
};

// Phase increment >= pi between adjacent samples while unwrapping a log.
struct resolution_error : numeric_error {
    using numeric_error::numeric_error;
};

// Theta series truncation cap reached before the requested precision.
struct precision_error : numeric_error {
    using numeric_error::numeric_error;
};

struct degenerate_modulus_error : numeric_error {
    using numeric_error::numeric_error;
};

struct pole_error : numeric_error {
    using numeric_error::numeric_error;
};

// Similarity variable xi fell outside the region a routine handles.
struct wrong_region_error : numeric_error {
    using numeric_error::numeric_error;
};

// Evaluation outside the declared analyticity strip Sigma_eps.
struct analyticity_domain_error : numeric_error {
    using numeric_error::numeric_error;
};

// abar vanished: datum violates the solitonless hypothesis.
struct spectral_singularity_error : numeric_error {
    using numeric_error::numeric_error;
};

// ln r requested where |r| ~ 0 on a deformation contour.
struct reflectionless_error : numeric_error {
    using numeric_error::numeric_error;
};

struct path_error : numeric_error {
    using numeric_error::numeric_error;
};

struct domain_too_small_error : numeric_error {
    double front_speed;
    domain_too_small_error(const std::string& msg, double speed)
        : numeric_error(msg), front_speed(speed) {}
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Background and branch-point data
// ---------------------------------------------------------------------------

// Nonzero boundary values q(x) -> q_-, q_+ with |q_-| = |q_+| = q0 > 0.
struct BackgroundParams {
    double q0 = 1.0;
    cx q_minus{1.0, 0.0};
    cx q_plus{1.0, 0.0};

    BackgroundParams() = default;
    BackgroundParams(double q0_, cx qm, cx qp) : q0(q0_), q_minus(qm), q_plus(qp) {
        validate();
    }
    // Common case: both boundary values equal q0 * e^{i phase}.
    static BackgroundParams symmetric(double q0, double phase = 0.0) {
        cx q = q0 * std::exp(cx(0.0, phase));
        return BackgroundParams(q0, q, q);
    }
    void validate() const {
        if (!(q0 > 0.0))
            throw config_error("background amplitude q0 must be positive");
        if (std::abs(std::abs(q_minus) - q0) > 1e-12 * q0 ||
            std::abs(std::abs(q_plus) - q0) > 1e-12 * q0)
            throw config_error("|q_minus| and |q_plus| must equal q0");
    }
    // Spatial reflection x -> -x swaps the two boundary values.
    BackgroundParams reflected() const { return BackgroundParams(q0, q_plus, q_minus); }
};

// Upper branch point alpha of the elliptic-region cut; the conjugate is
// implied.  Re(alpha) <= 0 in the left-half-plane regime implemented here.
struct BranchPointPair {
    cx alpha;
    BranchPointPair() = default;
    explicit BranchPointPair(cx a) : alpha(a) {
        if (a.imag() < 0.0)
            throw config_error("alpha must lie in the closed upper half plane");
    }
    cx alpha_bar() const { return std::conj(alpha); }
    double re() const { return alpha.real(); }
    double im() const { return alpha.imag(); }
};

// Side from which a point on a branch cut is approached.  Cuts here are
// oriented upward, so the right side is the east side.
enum class LimitSide { right, left };

// ---------------------------------------------------------------------------
// Small dense 2x2 complex matrix (Lax-pair eigenfunctions, scattering)
// ---------------------------------------------------------------------------

struct Mat2 {
    cx a11{}, a12{}, a21{}, a22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    cx det() const { return a11 * a22 - a12 * a21; }
    Mat2 inverse() const {
        cx d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    friend Mat2 operator*(const Mat2& A, const Mat2& B) {
        return {A.a11 * B.a11 + A.a12 * B.a21, A.a11 * B.a12 + A.a12 * B.a22,
                A.a21 * B.a11 + A.a22 * B.a21, A.a21 * B.a12 + A.a22 * B.a22};
    }
    friend Mat2 operator-(const Mat2& A, const Mat2& B) {
        return {A.a11 - B.a11, A.a12 - B.a12, A.a21 - B.a21, A.a22 - B.a22};
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }
    // diag(e^{w}, e^{-w}) * A and A * diag(e^{w}, e^{-w})
    Mat2 left_exp_sigma3(cx w) const {
        cx e = std::exp(w), f = std::exp(-w);
        return {e * a11, e * a12, f * a21, f * a22};
    }
    Mat2 right_exp_sigma3(cx w) const {
        cx e = std::exp(w), f = std::exp(-w);
        return {e * a11, f * a12, e * a21, f * a22};
    }
};

} // namespace fnls

#endif
