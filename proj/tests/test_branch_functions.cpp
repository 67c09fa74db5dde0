#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fnls/branch_functions.hpp"

using namespace fnls;

namespace {

// Brute-force oracle: product of (k - b_j)^{e_j}, phases tracked
// continuously along a straight walk from a far reference point on R+
// where every factor is principal.
cx continued_power_product(const std::vector<std::pair<cx, double>>& factors,
                           cx target, cx start, int steps = 20000) {
    std::vector<double> args(factors.size());
    for (size_t i = 0; i < factors.size(); ++i)
        args[i] = std::arg(start - factors[i].first);
    for (int s = 1; s <= steps; ++s) {
        cx z = start + (target - start) * (double(s) / steps);
        for (size_t i = 0; i < factors.size(); ++i) {
            double a = std::arg(z - factors[i].first);
            args[i] += std::remainder(a - args[i], 2.0 * pi);
        }
    }
    cx out(1.0, 0.0);
    for (size_t i = 0; i < factors.size(); ++i) {
        double mag = std::abs(target - factors[i].first);
        out *= std::pow(mag, factors[i].second) *
               std::exp(cx(0.0, factors[i].second * args[i]));
    }
    return out;
}

const BackgroundParams bg1 = BackgroundParams::symmetric(1.0);

} // namespace

TEST_CASE("lambda branch values") {
    CHECK(std::abs(lambda_branch(cx(0.0, 0.0), bg1) - cx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(lambda_branch(cx(-3.0, 0.0), bg1) + std::sqrt(10.0)) < 1e-14);
    // numeric analytic continuation from lambda ~ k above the cut
    CHECK(std::abs(lambda_branch(cx(0.0, 2.0), bg1) - cx(0.0, std::sqrt(3.0))) <
          1e-14);
    auto oracle = continued_power_product(
        {{cx(0.0, 1.0), 0.5}, {cx(0.0, -1.0), 0.5}}, cx(0.0, 2.0), cx(1e4, 1.0));
    CHECK(std::abs(lambda_branch(cx(0.0, 2.0), bg1) - oracle) < 1e-10);
}

TEST_CASE("lambda squared identity and side limits") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        cx k(ur(rng), ur(rng));
        cx lam = lambda_branch(k, bg1);
        CHECK(std::abs(lam * lam - (k * k + 1.0)) < 1e-12 * (1.0 + std::norm(k)));
    }
    std::uniform_real_distribution<double> uy(-0.95, 0.95);
    for (int i = 0; i < 200; ++i) {
        cx k(0.0, uy(rng));
        cx right = lambda_branch(k, bg1, LimitSide::right);
        cx left = lambda_branch(k, bg1, LimitSide::left);
        CHECK(std::abs(right + left) < 1e-14);
        CHECK(right.real() > 0.0);
        CHECK(std::abs(right.imag()) < 1e-14);
        // off the cut the two side labels must agree
        cx koff(0.5 + std::abs(uy(rng)), uy(rng));
        CHECK(std::abs(lambda_branch(koff, bg1, LimitSide::right) -
                       lambda_branch(koff, bg1, LimitSide::left)) < 1e-15);
    }
}

TEST_CASE("im_lambda") {
    CHECK(im_lambda(cx(0.7, 0.0), bg1) == 0.0);
    CHECK(im_lambda(cx(0.0, 0.3), bg1) == 0.0);
    // Im lambda(x0 + i y0) equals the integral of d(Re lambda)/dx up the
    // vertical line (Cauchy-Riemann), starting from 0 on the real axis
    double x0 = 0.5, y0 = 0.1;
    int n = 2000;
    double h = 1e-6, acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double y = y0 * (i + 0.5) / n;
        double dre = (lambda_branch(cx(x0 + h, y), bg1).real() -
                      lambda_branch(cx(x0 - h, y), bg1).real()) /
                     (2.0 * h);
        acc += dre * (y0 / n);
    }
    double v = im_lambda(cx(x0, y0), bg1);
    CHECK(v > 0.0);
    CHECK(v == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("d_det") {
    CHECK(std::abs(d_det(cx(0.0, 0.0), bg1) - cx(2.0, 0.0)) < 1e-14);
    CHECK(std::abs(d_det(cx(1e6, 0.0), bg1) - cx(1.0, 0.0)) < 1e-5);
    CHECK_THROWS_AS(d_det(cx(0.0, 1.0), bg1), branch_point_error);
}

TEST_CASE("gamma function") {
    BranchPointPair bp(cx(-0.5, 0.8));
    SUBCASE("asymptotics") {
        cx k(1e6, 0.0);
        CHECK(std::abs(gamma_fn(k, bg1, bp) / (k * k) - 1.0) < 1e-5);
    }
    SUBCASE("jump across B") {
        cx k(0.0, 0.4);
        cx right = gamma_fn(k, bg1, bp, LimitSide::right);
        cx left = gamma_fn(k, bg1, bp, LimitSide::left);
        CHECK(std::abs(left + right) < 1e-13);
    }
    SUBCASE("jump across the elliptic cut") {
        cx k(-0.5, 0.3);
        cx right = gamma_fn(k, bg1, bp, LimitSide::right);
        cx left = gamma_fn(k, bg1, bp, LimitSide::left);
        CHECK(std::abs(left + right) < 1e-13);
    }
    SUBCASE("square identity") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> ur(-2.5, 2.5);
        for (int i = 0; i < 200; ++i) {
            cx k(ur(rng), ur(rng));
            cx g = gamma_fn(k, bg1, bp);
            cx expect = (k * k + 1.0) * (k - bp.alpha) * (k - bp.alpha_bar());
            CHECK(std::abs(g * g - expect) < 1e-11 * (1.0 + std::abs(expect)));
        }
    }
    SUBCASE("phase continuation oracle at k = 1") {
        auto oracle = continued_power_product({{cx(0.0, 1.0), 0.5},
                                               {cx(0.0, -1.0), 0.5},
                                               {bp.alpha, 0.5},
                                               {bp.alpha_bar(), 0.5}},
                                              cx(1.0, 0.0), cx(1e4, 0.0));
        CHECK(std::abs(gamma_fn(cx(1.0, 0.0), bg1, bp) - oracle) < 1e-9);
    }
}

TEST_CASE("quartic root Lambda") {
    CHECK(std::abs(Lambda_qr(cx(1e8, 0.0), bg1) - 1.0) < 1e-7);
    for (double x : {-2.3, -0.4, 0.7, 3.1})
        CHECK(std::abs(std::abs(Lambda_qr(cx(x, 0.0), bg1)) - 1.0) < 1e-14);
    CHECK(std::abs(Lambda_qr(cx(0.0, 2.0), bg1) - std::pow(1.0 / 3.0, 0.25)) <
          1e-14);
    auto oracle = continued_power_product(
        {{cx(0.0, 1.0), 0.25}, {cx(0.0, -1.0), -0.25}}, cx(0.0, 2.0),
        cx(1e4, 1.0));
    CHECK(std::abs(Lambda_qr(cx(0.0, 2.0), bg1) - oracle) < 1e-10);
}

TEST_CASE("p function") {
    BranchPointPair bp(cx(-0.5, 0.8));
    SUBCASE("normalization at infinity and expansion") {
        // leading coefficient -i(q0 + alpha_im)/2 from expanding ln p^4;
        // consistent with the half-(q0+alpha_im) profile prefactor
        cx k(1e5, 0.0);
        cx expect = 1.0 - cx(0.0, 1.0) * (1.0 + 0.8) / (2.0 * k);
        CHECK(std::abs(p_fn(k, bg1, bp) - expect) < 1e-9);
    }
    SUBCASE("jump ratio i on both cuts") {
        cx kB(0.0, 0.35);
        cx ratio = p_fn(kB, bg1, bp, LimitSide::left) /
                   p_fn(kB, bg1, bp, LimitSide::right);
        CHECK(std::abs(ratio - cx(0.0, 1.0)) < 1e-13);
        cx kT(-0.5, -0.3);
        ratio = p_fn(kT, bg1, bp, LimitSide::left) /
                p_fn(kT, bg1, bp, LimitSide::right);
        CHECK(std::abs(ratio - cx(0.0, 1.0)) < 1e-13);
    }
    SUBCASE("fourth power identity") {
        std::mt19937 rng(6);
        std::uniform_real_distribution<double> ur(-2.0, 2.0);
        for (int i = 0; i < 200; ++i) {
            cx k(ur(rng), ur(rng));
            cx p = p_fn(k, bg1, bp);
            cx p4 = p * p * p * p;
            cx expect = (k - cx(0.0, 1.0)) * (k - bp.alpha) /
                        ((k + cx(0.0, 1.0)) * (k - bp.alpha_bar()));
            CHECK(std::abs(p4 - expect) < 1e-11 * (1.0 + std::abs(expect)));
        }
    }
    SUBCASE("p - 1/p vanishes at k_star") {
        double kstar = bg1.q0 * bp.re() / (bg1.q0 + bp.im());
        cx p = p_fn(cx(kstar, 0.0), bg1, bp);
        CHECK(std::abs(p - 1.0 / p) < 1e-12);
    }
}

TEST_CASE("theta phase") {
    CHECK(std::abs(theta_phase(0.0, cx(0.0, 0.0), bg1)) < 1e-15);

    SUBCASE("small k_im expansion (upper side)") {
        double xi = -6.0;
        for (double kre : {-1.7, -0.75, 0.4, 1.3}) {
            double kim = 1e-3;
            double got = (cx(0.0, 1.0) * theta_phase(xi, cx(kre, kim), bg1)).real();
            double lead = (kre > 0 ? 1.0 : -1.0) * 4.0 /
                          std::sqrt(kre * kre + 1.0) *
                          (kre * kre - 0.25 * xi * kre + 0.5) * kim;
            CHECK(std::abs(got - lead) < 200.0 * kim * kim * kim);
        }
    }
    SUBCASE("large k_im asymptote") {
        double xi = -6.0;
        for (double kre : {-2.0, 0.5, 1.5}) {
            double kim = 1e4;
            double got = (cx(0.0, 1.0) * theta_phase(xi, cx(kre, kim), bg1)).real();
            double lead = (4.0 * kre - xi) * kim;
            CHECK(std::abs(got - lead) / std::abs(lead) < 1e-4);
        }
    }
    SUBCASE("sign changes on the real axis at the stationary points") {
        // zero curves of Re(i theta) cross the axis at k1 = -1, k2 = -0.5 for
        // xi = -6; k = 0 is the branch-cut jump, not a zero curve, so the
        // cell containing it is skipped
        double xi = -6.0, offset = 1e-3;
        std::vector<double> crossings;
        double prev = 0.0;
        bool have_prev = false;
        for (double x = -2.0; x <= 1.0 + 1e-12; x += 1.0 / 256.0) {
            if (std::abs(x) < 1.0 / 128.0) {
                have_prev = false;
                continue;
            }
            double v = (cx(0.0, 1.0) * theta_phase(xi, cx(x, offset), bg1)).real();
            if (have_prev && prev * v < 0.0) crossings.push_back(x);
            prev = v;
            have_prev = true;
        }
        REQUIRE(crossings.size() == 2);
        CHECK(crossings[0] == doctest::Approx(-1.0).epsilon(0.01));
        CHECK(crossings[1] == doctest::Approx(-0.5).epsilon(0.01));
    }
}

TEST_CASE("boundary eigenvector matrices") {
    SUBCASE("identity at infinity") {
        Mat2 e = boundary_eigenmatrix(bg1, SideOfInfinity::minus, cx(1e9, 0.0));
        CHECK(std::abs(e.a12) < 1e-8);
        CHECK(std::abs(e.a21) < 1e-8);
        CHECK(std::abs(e.a11 - 1.0) < 1e-15);
    }
    SUBCASE("determinant equals d(k)") {
        cx k(0.7, 0.0);
        Mat2 e = boundary_eigenmatrix(bg1, SideOfInfinity::plus, k);
        CHECK(std::abs(e.det() - d_det(k, bg1)) < 1e-14);
    }
    SUBCASE("off-diagonals i at the cut center") {
        Mat2 e = boundary_eigenmatrix(bg1, SideOfInfinity::minus, cx(0.0, 0.0));
        CHECK(std::abs(e.a12 - cx(0.0, 1.0)) < 1e-14);
        CHECK(std::abs(e.a21 - cx(0.0, 1.0)) < 1e-14);
    }
    SUBCASE("branch point rejected") {
        CHECK_THROWS_AS(
            boundary_eigenmatrix(bg1, SideOfInfinity::minus, cx(0.0, -1.0)),
            branch_point_error);
    }
}
