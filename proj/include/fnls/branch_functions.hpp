#ifndef FNLS_BRANCH_FUNCTIONS_HPP
#define FNLS_BRANCH_FUNCTIONS_HPP

#include "fnls/types.hpp"

namespace fnls {

// Branch-cut-aware special functions of the spectral variable k.
//
// All fractional powers here are single-valued closed forms whose cuts land
// exactly on the physical cuts:
//   B        = i[-q0, q0]                 (background cut)
//   B~       = straight segment [conj(alpha), alpha]  (elliptic cut)
// On-cut points are detected to within 1e-13 of the segment and evaluated as
// the requested side limit; the default is the right (east) limit, matching
// the upward orientation of both cuts.

inline constexpr double on_cut_tol = 1e-13;

// lambda(k) = (k^2 + q0^2)^{1/2} with cut B, lambda ~ k at infinity.
// Real positive on R+ and on B from the right, real negative on R-.
cx lambda_branch(cx k, const BackgroundParams& bg,
                 LimitSide side = LimitSide::right);

// Im(lambda); vanishes exactly on the continuous spectrum R u B.
double im_lambda(cx k, const BackgroundParams& bg);

// d(k) = 2 lambda / (lambda + k) = det Psi+-.  Throws at k = +-i q0.
cx d_det(cx k, const BackgroundParams& bg, LimitSide side = LimitSide::right);

// gamma(k) = [(k^2+q0^2)(k-alpha)(k-conj alpha)]^{1/2}, cuts B and B~,
// gamma ~ k^2 at infinity, right-continuous on both cuts.
cx gamma_fn(cx k, const BackgroundParams& bg, const BranchPointPair& bp,
            LimitSide side = LimitSide::right);

// Lambda(k) = ((k - i q0)/(k + i q0))^{1/4}, cut B, -> 1 at infinity.
cx Lambda_qr(cx k, const BackgroundParams& bg,
             LimitSide side = LimitSide::right);

// p(k) = [(k-iq0)(k-alpha) / ((k+iq0)(k-conj alpha))]^{1/4},
// cuts B and B~ with jump p+ = i p- on both; p -> 1 at infinity.
cx p_fn(cx k, const BackgroundParams& bg, const BranchPointPair& bp,
        LimitSide side = LimitSide::right);

// theta(xi, k) = lambda(k) (xi - 2k); the full phase is theta * t.
cx theta_phase(double xi, cx k, const BackgroundParams& bg,
               LimitSide side = LimitSide::right);

enum class SideOfInfinity { minus, plus };

// Eigenvector matrix E+-(k) of the constant-background Lax generator;
// det E = d(k).  Throws at k = +-i q0.
Mat2 boundary_eigenmatrix(const BackgroundParams& bg, SideOfInfinity which,
                          cx k, LimitSide side = LimitSide::right);

namespace detail {
// (w^2 + a^2)^{1/2} with cut on the vertical segment w in i[-a, a] and
// value ~ w at infinity; shared kernel of lambda_branch and gamma_fn.
cx vertical_cut_sqrt(cx w, double a, LimitSide side);
} // namespace detail

} // namespace fnls

#endif
