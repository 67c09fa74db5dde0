// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.  Exit code 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fnls/asymptotic_profile.hpp"
#include "fnls/cli_commands.hpp"
#include "fnls/elliptic_wave.hpp"
#include "fnls/plane_wave.hpp"
#include "fnls/split_step.hpp"

using namespace fnls;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

template <typename Fn>
void criterion(int id, const std::string& name, double time_limit_s, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool in_time = time_limit_s <= 0.0 || secs <= time_limit_s;
    bool pass = o.pass && in_time;
    std::printf("[%s] criterion %2d: %-38s  (%.2f s%s)  %s\n",
                pass ? "PASS" : "FAIL", id, name.c_str(), secs,
                in_time ? "" : " OVER LIMIT", o.detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

const BackgroundParams bg1 = BackgroundParams::symmetric(1.0);
const double b1 = 4.0 * std::sqrt(2.0);

ReflectionData box_unit_r() {
    return ReflectionData::closed_form_box(
        InitialDatum(bg1, BoxDatum{1.0, pi / 2.0, 1.0}));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

} // namespace

int main() {
    // 1. boundary constants of the k0 solve
    criterion(1, "k0 boundary values", 1.0, [] {
        Outcome o;
        double e1 = std::abs(solve_k0(-b1, bg1) + 1.0 / std::sqrt(2.0));
        double e2 = std::abs(solve_k0(0.0, bg1));
        o.pass = e1 < 1e-8 && e2 < 1e-8;
        o.detail = "errors " + fmt(e1) + ", " + fmt(e2);
        return o;
    });

    // 2. scattering unitarity for the box datum
    criterion(2, "scattering unitarity (100 real k)", 10.0, [] {
        InitialDatum box(bg1, BoxDatum{1.0, pi / 2.0, 1.0});
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            double kre = -6.0 + 12.0 * i / 99.0;
            auto [a, b] = scattering_entries(box, cx(kre, 0.0));
            worst = std::max(worst, std::abs(std::norm(a) + std::norm(b) - 1.0));
        }
        Outcome o;
        o.pass = worst < 1e-8;
        o.detail = "worst defect " + fmt(worst);
        return o;
    });

    // 3. reflection coefficient: ODE route vs closed form
    criterion(3, "dual-path reflection (50 + 20 points)", 30.0, [] {
        InitialDatum box(bg1, BoxDatum{1.0, pi / 2.0, 1.0});
        ReflectionData closed = ReflectionData::closed_form_box(box);
        ReflectionData ode = ReflectionData::from_ode(box, 0.5);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            cx k(-4.0 + 8.0 * i / 49.0, 0.0);
            cx rc = closed.r(k);
            worst = std::max(worst, std::abs(ode.r(k) - rc) /
                                        std::max(1.0, std::abs(rc)));
        }
        for (int i = 0; i < 20; ++i) {
            cx k(((i % 2) ? 0.06 : -0.06), -0.85 + 1.7 * i / 19.0);
            cx rc = closed.r(k);
            worst = std::max(worst, std::abs(ode.r(k) - rc) /
                                        std::max(1.0, std::abs(rc)));
        }
        Outcome o;
        o.pass = worst < 1e-6;
        o.detail = "worst rel err " + fmt(worst);
        return o;
    });

    // xi grid shared by criteria 4, 5, 8
    std::vector<double> xi_grid;
    for (int j = 0; j < 9; ++j)
        xi_grid.push_back(-b1 + (b1 - 0.2) * (j + 1) / 10.0);

    // 4. Omega: Abelian quadrature vs closed form, plus the boundary value
    criterion(4, "Omega cross-check (9 xi) + boundary", 60.0, [&] {
        double worst = 0.0;
        for (double xi : xi_grid) {
            double k0 = solve_k0(xi, bg1);
            AlphaModulus am = alpha_and_modulus(xi, k0, bg1);
            EllipticGeometry geom = make_geometry(xi, k0, bg1);
            double closed = omega_big(geom, am.m, am.Kval);
            double quad = omega_big_quadrature(geom);
            worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
        }
        EllipticGeometry gb = make_geometry(-b1, solve_k0(-b1, bg1), bg1);
        double bv = omega_big(gb, 0.0, complete_K(0.0));
        double bverr = std::abs(bv + 6.0 * std::sqrt(3.0));
        Outcome o;
        o.pass = worst < 1e-6 && bverr < 1e-5;
        o.detail = "worst rel " + fmt(worst) + ", boundary err " + fmt(bverr);
        return o;
    });

    // 5. C and tau: cycle quadrature vs closed forms
    criterion(5, "C and tau cross-checks", 60.0, [&] {
        double worstC = 0.0, worstT = 0.0;
        for (double xi : xi_grid) {
            double k0 = solve_k0(xi, bg1);
            AlphaModulus am = alpha_and_modulus(xi, k0, bg1);
            worstC = std::max(worstC, am.C_cross_check_err);
            worstT = std::max(worstT, am.tau_cross_check_err);
        }
        Outcome o;
        o.pass = worstC < 1e-8 && worstT < 1e-8;
        o.detail = "C " + fmt(worstC) + ", tau " + fmt(worstT);
        return o;
    });

    // 6. theta identity suite at the solved parameters
    criterion(6, "theta identity suite (5 xi)", 60.0, [] {
        double worst = 0.0;
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> ur(-0.5, 0.5);
        for (int i = 1; i <= 5; ++i) {
            double xi = -b1 * i / 6.0;
            double k0 = solve_k0(xi, bg1);
            AlphaModulus am = alpha_and_modulus(xi, k0, bg1);
            ThetaContext ctx = theta_context(am.m);
            double m = am.m, K = am.Kval;
            double mp = std::sqrt((1.0 - m) * (1.0 + m));
            auto th = [&](int j, cx z) { return theta_j(j, z, ctx); };
            double t2 = th(2, cx(0, 0)).real(), t3 = th(3, cx(0, 0)).real(),
                   t4 = th(4, cx(0, 0)).real();
            double scale = 2.0 * K / pi;
            worst = std::max(worst,
                             std::abs(t2 * t2 - 2.0 * m * K / pi) / scale);
            worst = std::max(worst, std::abs(t3 * t3 - 2.0 * K / pi) / scale);
            worst = std::max(worst,
                             std::abs(t4 * t4 - 2.0 * mp * K / pi) / scale);
            worst = std::max(worst,
                             std::abs(theta_j_dz(1, cx(0, 0), ctx).real() -
                                      t2 * t3 * t4) /
                                 std::abs(t2 * t3 * t4));
            for (int d = 0; d < 10; ++d) {
                cx y(pi * ur(rng), 0.45 * pi * ctx.tau_im * ur(rng));
                cx lhs1 = th(1, 2.0 * y) * t2 * t3 * t4;
                cx rhs1 = 2.0 * th(1, y) * th(2, y) * th(3, y) * th(4, y);
                worst = std::max(worst, std::abs(lhs1 - rhs1) /
                                            std::max(1.0, std::abs(rhs1)));
                cx lhs2 = th(4, 2.0 * y) * t4 * t4 * t4;
                cx rhs2 = std::pow(th(3, y), 4) - std::pow(th(2, y), 4);
                worst = std::max(worst, std::abs(lhs2 - rhs2) /
                                            std::max(1.0, std::abs(rhs2)));
            }
            EllipticGeometry geom = make_geometry(xi, k0, bg1);
            cx v_inf = v_infinity(geom, am.Cnorm);
            cx y = pi * v_inf;
            cx iq0(0.0, 1.0);
            double a2 = std::norm(am.alpha + iq0);
            cx f42 = -2.0 * iq0 * (iq0 + std::conj(am.alpha)) / (m * mp * a2);
            worst = std::max(
                worst, std::abs(th(4, y) * th(4, y) / (th(2, y) * th(2, y)) -
                                f42) /
                           std::abs(f42));
            cx f12 = -(iq0 + am.alpha) * (iq0 + std::conj(am.alpha)) / (mp * a2);
            worst = std::max(
                worst, std::abs(th(1, y) * th(1, y) / (th(2, y) * th(2, y)) -
                                f12) /
                           std::abs(f12));
            cx f32 = -2.0 * iq0 * (iq0 + am.alpha) / (m * a2);
            worst = std::max(
                worst, std::abs(th(3, y) * th(3, y) / (th(2, y) * th(2, y)) -
                                f32) /
                           std::abs(f32));
            cx f14 = 4.0 * am.alpha.imag() /
                     (m * std::pow(1.0 + am.alpha.imag(), 2));
            worst = std::max(worst,
                             std::abs(th(1, 2.0 * y) * th(1, 2.0 * y) /
                                          (th(4, 2.0 * y) * th(4, 2.0 * y)) -
                                      f14) /
                                 std::abs(f14));
        }
        Outcome o;
        o.pass = worst < 1e-8;
        o.detail = "worst rel " + fmt(worst);
        return o;
    });

    // 7. Theorem 2 vs Theorem 3 representation equivalence
    criterion(7, "theta vs sn representation (200 pts)", 120.0, [] {
        ReflectionData r = box_unit_r();
        EllipticParams p = make_elliptic_params(-2.0 * std::sqrt(2.0), r);
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> ut(1.0, 50.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            double t = ut(rng);
            double x = p.xi * t;
            cx q = q_asymp_ell(x, t, p, bg1);
            double sq = q_abs2_sn(x, t, p, bg1);
            worst = std::max(worst, std::abs(std::norm(q) - sq));
        }
        Outcome o;
        o.pass = worst < 1e-8;
        o.detail = "worst |.|^2 gap " + fmt(worst);
        return o;
    });

    // 8. h(alpha) residual and its sensitivity
    criterion(8, "h(alpha) residual + sensitivity", 120.0, [&] {
        double worst = 0.0;
        for (double xi : xi_grid) {
            double k0 = solve_k0(xi, bg1);
            worst = std::max(worst,
                             h_residual_at_alpha(make_geometry(xi, k0, bg1)));
        }
        double xi = -2.0 * std::sqrt(2.0);
        double pert = h_residual_at_alpha(
            make_geometry(xi, solve_k0(xi, bg1) + 1e-3, bg1));
        Outcome o;
        o.pass = worst < 1e-7 && pert > 1e-5;
        o.detail = "worst " + fmt(worst) + ", perturbed " + fmt(pert);
        return o;
    });

    // 9. realness residues of the contour constants (box preset)
    criterion(9, "realness residues (box preset)", 300.0, [] {
        BackgroundParams bg = BackgroundParams::symmetric(0.5);
        InitialDatum box(bg, BoxDatum{0.45, 0.0, 2.0});
        ReflectionData r = ReflectionData::closed_form_box(box);
        EllipticParams p = make_elliptic_params(-std::sqrt(2.0), r);
        double res_pw = 1.0;
        double k1 = stationary_points(-4.0, bg).first;
        g_inf_pw(r, k1, bg, &res_pw);
        double worst = std::max({p.diag.omega_im_residual,
                                 p.diag.g_inf_im_residual,
                                 p.diag.H0_im_residual, res_pw});
        Outcome o;
        o.pass = worst < 1e-8;
        o.detail = "worst Im residue " + fmt(worst);
        return o;
    });

    // 10. desk-scale PDE validation of the asymptotic profiles
    criterion(10, "split-step validation (box preset)", 1200.0, [] {
        BackgroundParams bg = BackgroundParams::symmetric(0.5);
        InitialDatum box(bg, BoxDatum{0.45, 0.0, 2.0});
        ReflectionData r = ReflectionData::closed_form_box(box);

        SimulationConfig sim;
        sim.domain_halfwidth = 600.0;
        sim.n_points = 1 << 14;
        sim.dt = 2e-3;
        sim.snapshot_times = {10.0, 20.0, 40.0};
        sim.t_final = 40.0;
        auto snaps = evolve(box, bg, sim);

        AsymptoticEvaluator eval(r);
        auto rep = compare_to_asymptotics(
            snaps, [&](double x, double t) { return eval.modulus(x, t); },
            [&](double x, double t) { return eval.in_mask(x, t); });

        bool decreasing = true;
        std::string errs;
        for (size_t i = 0; i < rep.per_snapshot.size(); ++i) {
            errs += fmt(rep.per_snapshot[i].sup_err) + " ";
            if (i > 0 &&
                rep.per_snapshot[i].sup_err >= rep.per_snapshot[i - 1].sup_err)
                decreasing = false;
        }
        double expo = rep.fitted_decay_exponent;

        const GridField& last = snaps.back();
        double b = 4.0 * std::sqrt(2.0) * bg.q0;
        double xi_c = -0.5 * b, half_w = 0.15 * b;
        double max_num = 0.0, min_num = 1e300;
        for (size_t i = 0; i < last.x.size(); ++i) {
            double xi = last.x[i] / last.time;
            if (xi < xi_c - half_w || xi > xi_c + half_w) continue;
            double a = std::abs(last.values[i]);
            max_num = std::max(max_num, a);
            min_num = std::min(min_num, a);
        }
        double max_pred = 0.0, min_pred = 1e300;
        for (int i = 0; i <= 60; ++i) {
            double xi = xi_c - half_w + 2.0 * half_w * i / 60.0;
            EllipticParams p = eval.elliptic_at(xi);
            max_pred = std::max(max_pred, bg.q0 + p.alpha.imag());
            min_pred = std::min(min_pred, std::abs(bg.q0 - p.alpha.imag()));
        }
        bool env_max = std::abs(max_num - max_pred) <= 0.05 * max_pred;
        bool env_min = std::abs(min_num - min_pred) <=
                       0.05 * std::max(min_pred, 0.2 * bg.q0);
        Outcome o;
        o.pass = decreasing && expo >= -0.75 && expo <= -0.3 && env_max && env_min;
        o.detail = "sup errs " + errs + "exponent " + fmt(expo) + ", envelope " +
                   fmt(min_num) + "/" + fmt(min_pred) + " " + fmt(max_num) +
                   "/" + fmt(max_pred);
        return o;
    });

    // 11. plane-wave sanity
    criterion(11, "plane-wave modulus + far-field g_inf", 120.0, [] {
        BackgroundParams bg = BackgroundParams::symmetric(0.5);
        InitialDatum box(bg, BoxDatum{0.45, 0.0, 2.0});
        ReflectionData r = ReflectionData::closed_form_box(box);
        PlaneWaveParams p = make_plane_wave_params(-4.0, r);
        bool mod_exact = true;
        for (double t : {3.0, 11.0, 29.0})
            mod_exact = mod_exact &&
                        std::abs(q_asymp_pw(-4.0 * t, t, p, bg)) == bg.q0;
        double k1far = stationary_points(-100.0, bg).first;
        double gfar = std::abs(g_inf_pw(r, k1far, bg));
        Outcome o;
        o.pass = mod_exact && gfar < 1e-3;
        o.detail = "|g_inf(-100)| = " + fmt(gfar);
        return o;
    });

    std::printf("%s: %d criterion(s) failed\n",
                failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : exit_acceptance;
}
