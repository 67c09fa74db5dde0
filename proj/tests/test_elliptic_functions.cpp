#include <doctest.h>

#include <cmath>
#include <random>

#include "fnls/contour_quadrature.hpp"
#include "fnls/elliptic_functions.hpp"

using namespace fnls;

namespace {

// quadrature oracle for the defining integral of K
double K_oracle(double m) {
    auto f = [m](cx z) {
        double s = std::sin(z.real());
        return cx(1.0 / std::sqrt(1.0 - m * m * s * s), 0.0);
    };
    PathSegment seg{cx(0.0, 0.0), cx(pi / 2.0, 0.0)};
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    return integrate_segment(f, seg, spec).value.real();
}

// inverse of the incomplete elliptic integral of the first kind by bisection
double amplitude_oracle(double z, double m) {
    auto u_of_phi = [m](double phi) {
        auto f = [m](cx t) {
            double s = std::sin(t.real());
            return cx(1.0 / std::sqrt(1.0 - m * m * s * s), 0.0);
        };
        PathSegment seg{cx(0.0, 0.0), cx(phi, 0.0)};
        return integrate_segment(f, seg).value.real();
    };
    double lo = 0.0, hi = pi / 2.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (u_of_phi(mid) < z ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("complete elliptic integral K") {
    CHECK(complete_K(0.0) == doctest::Approx(pi / 2.0).epsilon(1e-15));
    double m = 1.0 / std::sqrt(2.0);
    CHECK(complete_K(m) ==
          doctest::Approx(complete_K(std::sqrt(1.0 - m * m))).epsilon(1e-14));
    CHECK(std::abs(complete_K(0.8) - K_oracle(0.8)) < 1e-12);
    CHECK(std::abs(complete_K(0.3) - K_oracle(0.3)) < 1e-12);
    CHECK_THROWS_AS(complete_K(1.0), degenerate_modulus_error);
    CHECK_THROWS_AS(complete_K(-0.1), degenerate_modulus_error);
}

TEST_CASE("theta context") {
    SUBCASE("self-complementary point") {
        ThetaContext ctx = theta_context(1.0 / std::sqrt(2.0));
        CHECK(ctx.rho == doctest::Approx(std::exp(-pi)).epsilon(1e-14));
        CHECK(ctx.tau_im == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("nome vanishes with the modulus") {
        CHECK(theta_context(1e-4).rho < 1e-8);
    }
    SUBCASE("composition oracle at m = 0.5") {
        ThetaContext ctx = theta_context(0.5);
        double expect = std::exp(-pi * K_oracle(std::sqrt(0.75)) / K_oracle(0.5));
        CHECK(ctx.rho == doctest::Approx(expect).epsilon(1e-13));
    }
    SUBCASE("degenerate endpoints rejected") {
        CHECK_THROWS_AS(theta_context(0.0), degenerate_modulus_error);
        CHECK_THROWS_AS(theta_context(1.0), degenerate_modulus_error);
    }
}

TEST_CASE("theta series basics") {
    SUBCASE("theta3 -> 1 as the nome vanishes") {
        ThetaContext ctx = theta_context_from_tau(20.0); // rho ~ 5e-28
        CHECK(std::abs(theta_j(3, cx(0.4, 0.0), ctx) - 1.0) < 1e-15);
    }
    SUBCASE("theta1 odd: vanishes at 0") {
        ThetaContext ctx = theta_context_from_tau(-std::log(0.1) / pi); // rho=0.1
        CHECK(std::abs(ctx.rho - 0.1) < 1e-15);
        CHECK(std::abs(theta_j(1, cx(0.0, 0.0), ctx)) < 1e-16);
        cx z(0.37, 0.21);
        CHECK(std::abs(theta_j(1, z, ctx) + theta_j(1, -z, ctx)) < 1e-14);
        CHECK(std::abs(theta_j(2, z, ctx) - theta_j(2, -z, ctx)) < 1e-14);
        CHECK(std::abs(theta_j(4, z, ctx) - theta_j(4, -z, ctx)) < 1e-14);
    }
    SUBCASE("pi-periodicity of theta3") {
        ThetaContext ctx = theta_context_from_tau(-std::log(0.2) / pi); // rho=0.2
        cx z(0.3, 0.1);
        CHECK(std::abs(theta_j(3, z + pi, ctx) - theta_j(3, z, ctx)) < 1e-13);
    }
    SUBCASE("precision error when the cap cannot reach the tolerance") {
        ThetaContext ctx = theta_context_from_tau(0.05);
        CHECK_THROWS_AS(theta_j(3, cx(0.0, 30.0), ctx), precision_error);
    }
}

TEST_CASE("Theta translation identities") {
    ThetaContext ctx = theta_context_from_tau(1.5);
    cx k(0.2, 0.0), tau(0.0, 1.5);
    CHECK(std::abs(Theta_cap(k + 1.0, ctx) - Theta_cap(k, ctx)) < 1e-14);
    cx lhs = Theta_cap(k + tau, ctx);
    cx rhs = std::exp(-2.0 * cx(0.0, pi) * k - cx(0.0, pi) * tau) *
             Theta_cap(k, ctx);
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(rhs));
    CHECK(std::abs(Theta_cap(cx(0.37, 0.0), ctx) -
                   Theta_cap(cx(-0.37, 0.0), ctx)) < 1e-14);
}

TEST_CASE("sn function") {
    CHECK(std::abs(sn(cx(0.0, 0.0), 0.6)) < 1e-15);
    CHECK(std::abs(sn(cx(0.7, 0.0), 0.0) - std::sin(0.7)) < 1e-15);
    SUBCASE("sn(K) = 1 via the inversion oracle") {
        double m = 0.6, K = complete_K(m);
        CHECK(std::abs(sn(cx(K, 0.0), m) - 1.0) < 1e-12);
        // generic point: sn(z) = sin(amplitude(z))
        double z = 0.7 * K;
        double phi = amplitude_oracle(z, m);
        CHECK(std::abs(sn(cx(z, 0.0), m) - std::sin(phi)) < 1e-10);
    }
    SUBCASE("real range and periodicity") {
        double m = 0.8, K = complete_K(m);
        for (double z = -6.0; z <= 6.0; z += 0.37) {
            cx v = sn(cx(z, 0.0), m);
            CHECK(std::abs(v.imag()) < 1e-12);
            CHECK(v.real() * v.real() <= 1.0 + 1e-12);
            CHECK(std::abs(sn(cx(z + 4.0 * K, 0.0), m) - v) < 1e-10);
        }
    }
}

TEST_CASE("theta zero-value identities") {
    for (double m : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        ThetaContext ctx = theta_context(m);
        double K = complete_K(m);
        double t2 = theta_j(2, cx(0, 0), ctx).real();
        double t3 = theta_j(3, cx(0, 0), ctx).real();
        double t4 = theta_j(4, cx(0, 0), ctx).real();
        CHECK(t2 * t2 ==
              doctest::Approx(2.0 * m * K / pi).epsilon(1e-10));
        CHECK(t3 * t3 == doctest::Approx(2.0 * K / pi).epsilon(1e-10));
        CHECK(t4 * t4 ==
              doctest::Approx(2.0 * std::sqrt(1.0 - m * m) * K / pi)
                  .epsilon(1e-10));
        // derivative identity from the term-differentiated series
        double d1 = theta_j_dz(1, cx(0, 0), ctx).real();
        CHECK(d1 == doctest::Approx(t2 * t3 * t4).epsilon(1e-10));
        // modulus round trip
        CHECK(t2 * t2 / (t3 * t3) == doctest::Approx(m).epsilon(1e-10));
    }
}

TEST_CASE("duplication identities at random points") {
    ThetaContext ctx = theta_context(0.62);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ur(-0.5, 0.5);
    for (int i = 0; i < 50; ++i) {
        cx y(pi * ur(rng), 0.45 * pi * ctx.tau_im * ur(rng));
        cx t0[5];
        cx ty[5], t2y[5];
        for (int j = 1; j <= 4; ++j) {
            t0[j] = theta_j(j, cx(0, 0), ctx);
            ty[j] = theta_j(j, y, ctx);
            t2y[j] = theta_j(j, 2.0 * y, ctx);
        }
        cx lhs1 = t2y[1] * t0[2] * t0[3] * t0[4];
        cx rhs1 = 2.0 * ty[1] * ty[2] * ty[3] * ty[4];
        CHECK(std::abs(lhs1 - rhs1) <= 1e-9 * (1.0 + std::abs(rhs1)));
        cx lhs2 = t2y[4] * t0[4] * t0[4] * t0[4];
        cx rhs2 = std::pow(ty[3], 4) - std::pow(ty[2], 4);
        CHECK(std::abs(lhs2 - rhs2) <= 1e-9 * (1.0 + std::abs(rhs2)));
    }
}
