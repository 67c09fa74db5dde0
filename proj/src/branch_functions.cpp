#include "fnls/branch_functions.hpp"

#include <cmath>

namespace fnls {

namespace detail {

cx vertical_cut_sqrt(cx w, double a, LimitSide side) {
    // Cut on i[-a, a]; on it the right limit is +sqrt(a^2 - y^2).  The side
    // shortcut applies only well inside the segment: near the tips the jump
    // vanishes and the closed form below is accurate on both sides.
    double scale = std::max({1.0, std::abs(w), a});
    if (std::abs(w.real()) <= on_cut_tol * scale &&
        std::abs(w.imag()) <= a - on_cut_tol * scale) {
        double y = w.imag();
        double v = std::sqrt(std::max(0.0, (a - y) * (a + y)));
        return side == LimitSide::right ? cx(v, 0.0) : cx(-v, 0.0);
    }
    if (w == cx(0.0, a) || w == cx(0.0, -a)) return cx(0.0, 0.0);
    // w * principal_sqrt(1 + a^2/w^2): the argument misses (-inf, 0] exactly
    // when w is off the cut, so the composition is analytic there and ~ w.
    return w * std::sqrt(1.0 + (a / w) * (a / w));
}

namespace {

// Principal fourth root of the Moebius ratio (w - i a)/(w + i a); its cut is
// exactly the vertical segment i[-a, a].
cx moebius_quartic(cx w, double a, LimitSide side) {
    double scale = std::max({1.0, std::abs(w), a});
    if (std::abs(w + cx(0.0, a)) <= on_cut_tol * scale)
        throw branch_point_error("fourth-root pole at a branch point");
    if (std::abs(w.real()) <= on_cut_tol * scale &&
        std::abs(w.imag()) <= a - on_cut_tol * scale) {
        double y = w.imag();
        double ratio = (a - y) / (a + y); // |(w - ia)/(w + ia)| on the cut
        // right limit: arg -> -pi, fourth root picks e^{-i pi/4}
        cx unit = (side == LimitSide::right) ? std::polar(1.0, -pi / 4.0)
                                             : std::polar(1.0, pi / 4.0);
        return std::pow(ratio, 0.25) * unit;
    }
    return std::pow((w - cx(0.0, a)) / (w + cx(0.0, a)), 0.25);
}

void require_not_branch_point(cx k, const BackgroundParams& bg) {
    double scale = std::max(1.0, bg.q0);
    if (std::abs(k - cx(0.0, bg.q0)) <= on_cut_tol * scale ||
        std::abs(k + cx(0.0, bg.q0)) <= on_cut_tol * scale)
        throw branch_point_error("evaluation at branch point +-i q0");
}

} // namespace
} // namespace detail

cx lambda_branch(cx k, const BackgroundParams& bg, LimitSide side) {
    return detail::vertical_cut_sqrt(k, bg.q0, side);
}

double im_lambda(cx k, const BackgroundParams& bg) {
    return lambda_branch(k, bg).imag();
}

cx d_det(cx k, const BackgroundParams& bg, LimitSide side) {
    detail::require_not_branch_point(k, bg);
    cx lam = lambda_branch(k, bg, side);
    return 2.0 * lam / (lam + k);
}

cx gamma_fn(cx k, const BackgroundParams& bg, const BranchPointPair& bp,
            LimitSide side) {
    cx lam = lambda_branch(k, bg, side);
    cx s = detail::vertical_cut_sqrt(k - bp.re(), bp.im(), side);
    return lam * s;
}

cx Lambda_qr(cx k, const BackgroundParams& bg, LimitSide side) {
    return detail::moebius_quartic(k, bg.q0, side);
}

cx p_fn(cx k, const BackgroundParams& bg, const BranchPointPair& bp,
        LimitSide side) {
    cx first = detail::moebius_quartic(k, bg.q0, side);
    cx second = detail::moebius_quartic(k - bp.re(), bp.im(), side);
    return first * second;
}

cx theta_phase(double xi, cx k, const BackgroundParams& bg, LimitSide side) {
    return lambda_branch(k, bg, side) * (xi - 2.0 * k);
}

Mat2 boundary_eigenmatrix(const BackgroundParams& bg, SideOfInfinity which,
                          cx k, LimitSide side) {
    detail::require_not_branch_point(k, bg);
    cx q = (which == SideOfInfinity::minus) ? bg.q_minus : bg.q_plus;
    cx lam = lambda_branch(k, bg, side);
    cx w = cx(0.0, 1.0) * (lam - k);
    return {1.0, w / std::conj(q), w / q, 1.0};
}

} // namespace fnls
