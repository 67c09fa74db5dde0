#include "fnls/cli_commands.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fnls/asymptotic_profile.hpp"
#include "fnls/elliptic_wave.hpp"
#include "fnls/plane_wave.hpp"
#include "fnls/split_step.hpp"

namespace fnls {

using nlohmann::json;

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("background")) {
        const auto& b = j["background"];
        double q0 = b.value("q0", 1.0);
        double phm = b.value("phase_minus", 0.0);
        double php = b.value("phase_plus", 0.0);
        cfg.bg = BackgroundParams(q0, q0 * std::exp(cx(0.0, phm)),
                                  q0 * std::exp(cx(0.0, php)));
    }
    if (j.contains("datum")) {
        const auto& d = j["datum"];
        std::string type = d.value("type", "box");
        if (type == "box") {
            cfg.box = BoxDatum{d.value("beta", cfg.bg.q0), d.value("chi", 0.0),
                               d.value("halfwidth", 1.0)};
        } else if (type == "samples") {
            cfg.samples_path = d.value("path", "");
            if (cfg.samples_path.empty())
                throw config_error("sampled datum needs a path");
        } else if (type == "background") {
            cfg.background_only = true;
        } else {
            throw config_error("unknown datum type: " + type);
        }
    } else {
        cfg.box = BoxDatum{cfg.bg.q0, 0.0, 1.0};
        cfg.background_only = true;
    }
    if (j.contains("reflection")) {
        cfg.reflection_mode = j["reflection"].value("mode", "auto");
        cfg.epsilon_margin = j["reflection"].value("epsilon", 0.25);
    }
    cfg.xi = j.value("xi", 0.0);
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        cfg.grid.xi_lo = g.value("xi_lo", -2.0);
        cfg.grid.xi_hi = g.value("xi_hi", -0.5);
        cfg.grid.n_xi = g.value("n_xi", 32);
        cfg.grid.t_lo = g.value("t_lo", 1.0);
        cfg.grid.t_hi = g.value("t_hi", 20.0);
        cfg.grid.n_t = g.value("n_t", 16);
    }
    if (j.contains("k_grid")) {
        const auto& g = j["k_grid"];
        cfg.k_grid.lo = g.value("lo", -5.0);
        cfg.k_grid.hi = g.value("hi", 5.0);
        cfg.k_grid.n = g.value("n", 101);
        cfg.k_grid.im = g.value("im", 0.0);
    }
    if (j.contains("sim")) {
        const auto& s = j["sim"];
        cfg.sim.domain_halfwidth = s.value("domain_halfwidth", 600.0);
        cfg.sim.n_points = s.value("n_points", 1 << 14);
        cfg.sim.dt = s.value("dt", 2e-3);
        if (s.contains("snapshots"))
            cfg.sim.snapshots = s["snapshots"].get<std::vector<double>>();
    }
    if (j.contains("quadrature"))
        cfg.tol_scale = j["quadrature"].value("tol_scale", 1.0);
    cfg.out_path = j.value("out", "");
    return cfg;
}

} // namespace

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

RunConfig preset_config(const std::string& name) {
    json j;
    if (name == "box-unit") {
        j = {{"background", {{"q0", 1.0}}},
             {"datum",
              {{"type", "box"}, {"beta", 1.0}, {"chi", pi / 2.0}, {"halfwidth", 1.0}}}};
    } else if (name == "box-default") {
        j = {{"background", {{"q0", 0.5}}},
             {"datum",
              {{"type", "box"}, {"beta", 0.45}, {"chi", 0.0}, {"halfwidth", 2.0}}},
             {"sim",
              {{"domain_halfwidth", 600.0},
               {"n_points", 1 << 14},
               {"dt", 2e-3},
               {"snapshots", {10.0, 20.0, 40.0}}}}};
    } else if (name == "fig-qmod") {
        double b = 2.0 * std::sqrt(2.0);
        j = {{"background", {{"q0", 0.5}}},
             {"datum",
              {{"type", "box"}, {"beta", 0.45}, {"chi", 0.0}, {"halfwidth", 2.0}}},
             {"grid",
              {{"xi_lo", -b * 0.955},
               {"xi_hi", -b * 0.025},
               {"n_xi", 48},
               {"t_lo", 1.0},
               {"t_hi", 20.0},
               {"n_t", 20}}}};
    } else {
        throw config_error("unknown preset: " + name);
    }
    return config_from_json(j);
}

InitialDatum make_datum(const RunConfig& cfg) {
    if (!cfg.samples_path.empty())
        return load_sampled_csv(cfg.samples_path, cfg.bg);
    if (cfg.background_only)
        return InitialDatum(cfg.bg, BoxDatum{cfg.bg.q0, std::arg(cfg.bg.q_minus),
                                             1.0});
    if (!cfg.box) throw config_error("no datum specified");
    return InitialDatum(cfg.bg, *cfg.box);
}

ReflectionData make_reflection(const RunConfig& cfg) {
    if (cfg.background_only &&
        (!cfg.box || (std::abs(cfg.box->beta - cfg.bg.q0) < 1e-15 &&
                      std::abs(std::arg(cfg.bg.q_minus) - cfg.box->chi) < 1e-15)))
        return ReflectionData::reflectionless(cfg.bg);
    InitialDatum datum = make_datum(cfg);
    if (cfg.reflection_mode == "ode")
        return ReflectionData::from_ode(datum, cfg.epsilon_margin);
    if (cfg.reflection_mode == "closed-form" || datum.is_box())
        return ReflectionData::closed_form_box(datum);
    return ReflectionData::from_ode(datum, cfg.epsilon_margin);
}

// ---------------------------------------------------------------------------
// params
// ---------------------------------------------------------------------------

namespace {

json params_record(const RunConfig& cfg) {
    const BackgroundParams& bg = cfg.bg;
    double b = 4.0 * std::sqrt(2.0) * bg.q0;
    double xi = cfg.xi;
    json rec;
    rec["xi"] = xi;
    rec["q0"] = bg.q0;
    rec["region_boundary"] = b;

    if (std::abs(std::abs(xi) - b) < 1e-9 * std::max(1.0, b)) {
        rec["region"] = "boundary";
        rec["k0"] = -bg.q0 / std::sqrt(2.0) * (xi < 0 ? 1.0 : -1.0);
        rec["alpha_re"] = rec["k0"];
        rec["alpha_im"] = 0.0;
        rec["m"] = 0.0;
        rec["note"] = "interface of the plane-wave and elliptic descriptions";
        return rec;
    }
    if (std::abs(xi) < 1e-9 * b) {
        rec["region"] = "degenerate-center";
        rec["k0"] = 0.0;
        rec["m"] = 1.0;
        rec["note"] = "branch points collapse to +-i q0; modulus degenerates";
        return rec;
    }

    ReflectionData r = make_reflection(cfg);
    if (std::abs(xi) > b) {
        PlaneWaveParams p = make_plane_wave_params(xi, r);
        rec["region"] = xi < 0 ? "plane-wave-left" : "plane-wave-right";
        rec["k1"] = p.k1;
        rec["k2"] = p.k2;
        rec["g_inf"] = p.g_inf;
        rec["diagnostics"] = {{"g_inf_im_residual", p.g_inf_im_residual}};
        return rec;
    }
    EllipticParams p = make_elliptic_params(xi, r);
    rec["region"] = xi < 0 ? "elliptic-left" : "elliptic-right";
    rec["k0"] = p.k0;
    rec["alpha_re"] = p.alpha.real();
    rec["alpha_im"] = p.alpha.imag();
    rec["m"] = p.m;
    rec["K"] = p.Kval;
    rec["tau_im"] = p.tau.imag();
    rec["C_im"] = p.Cnorm.imag();
    rec["Omega"] = p.Omega_big;
    rec["omega"] = p.omega_small;
    rec["H0"] = p.H0;
    rec["G_inf"] = p.G_inf;
    rec["g_inf"] = p.g_inf;
    rec["X"] = p.X_offset;
    rec["k_star"] = p.k_star;
    rec["v_inf_re"] = p.v_inf.real();
    rec["v_inf_im"] = p.v_inf.imag();
    rec["c_re"] = p.c_const.real();
    rec["c_im"] = p.c_const.imag();
    rec["diagnostics"] = {
        {"omega_im_residual", p.diag.omega_im_residual},
        {"g_inf_im_residual", p.diag.g_inf_im_residual},
        {"H0_im_residual", p.diag.H0_im_residual},
        {"h_alpha_residual", p.diag.h_alpha_residual},
        {"C_cross_check_err", p.diag.C_cross_check_err},
        {"tau_cross_check_err", p.diag.tau_cross_check_err},
        {"Omega_cross_rel_err", p.diag.Omega_cross_rel_err},
        {"beta_cycle_err", p.diag.beta_cycle_err},
    };
    return rec;
}

std::ostream& open_output(const RunConfig& cfg, std::ofstream& file,
                          std::ostream& fallback) {
    if (cfg.out_path.empty()) return fallback;
    file.open(cfg.out_path);
    if (!file) throw config_error("cannot open output file: " + cfg.out_path);
    return file;
}

} // namespace

int cmd_params(const RunConfig& cfg, std::ostream& out) {
    std::ofstream file;
    std::ostream& os = open_output(cfg, file, out);
    os << params_record(cfg).dump(2) << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// asymp
// ---------------------------------------------------------------------------

int cmd_asymp(const RunConfig& cfg, std::ostream& out) {
    if (cfg.grid.n_xi < 1 || cfg.grid.n_t < 1)
        throw config_error("asymp needs a grid (or use --preset fig-qmod)");
    ReflectionData r = make_reflection(cfg);
    AsymptoticEvaluator eval(r);

    struct Row {
        double x, t;
        cx q;
        Region reg;
    };
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < cfg.grid.n_t; ++i) {
        double t = (cfg.grid.n_t == 1)
                       ? cfg.grid.t_lo
                       : cfg.grid.t_lo + (cfg.grid.t_hi - cfg.grid.t_lo) * i /
                                             (cfg.grid.n_t - 1);
        for (int jx = 0; jx < cfg.grid.n_xi; ++jx) {
            double xi = (cfg.grid.n_xi == 1)
                            ? cfg.grid.xi_lo
                            : cfg.grid.xi_lo + (cfg.grid.xi_hi - cfg.grid.xi_lo) *
                                                   jx / (cfg.grid.n_xi - 1);
            pts.emplace_back(xi * t, t);
        }
    }
    // warm the caches before going parallel
    if (!pts.empty()) eval.value(pts.front().first, pts.front().second);

    std::vector<Row> rows(pts.size());
    int nthreads = std::max(1, cfg.threads);
    auto work = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            rows[i].x = pts[i].first;
            rows[i].t = pts[i].second;
            rows[i].q = eval.value(pts[i].first, pts[i].second);
            rows[i].reg = eval.region(pts[i].first, pts[i].second);
        }
    };
    if (nthreads == 1) {
        work(0, rows.size());
    } else {
        std::vector<std::future<void>> futs;
        size_t chunk = (rows.size() + nthreads - 1) / nthreads;
        for (int th = 0; th < nthreads; ++th) {
            size_t b = th * chunk, e = std::min(rows.size(), b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, work, b, e));
        }
        for (auto& f : futs) f.get();
    }

    std::ofstream file;
    std::ostream& os = open_output(cfg, file, out);
    os << "x,t,re_q,im_q,abs_q,region\n";
    const char* names[] = {"pw-left", "ell-left", "ell-right", "pw-right"};
    for (const auto& row : rows)
        os << num17(row.x) << ',' << num17(row.t) << ',' << num17(row.q.real())
           << ',' << num17(row.q.imag()) << ',' << num17(std::abs(row.q)) << ','
           << names[int(row.reg)] << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// scatter
// ---------------------------------------------------------------------------

int cmd_scatter(const RunConfig& cfg, std::ostream& out) {
    InitialDatum datum = make_datum(cfg);
    ReflectionData r = make_reflection(cfg);

    std::ofstream file;
    std::ostream& os = open_output(cfg, file, out);
    os << "re_k,im_k,re_r,im_r,unitarity_defect\n";
    for (int i = 0; i < cfg.k_grid.n; ++i) {
        double re = (cfg.k_grid.n == 1)
                        ? cfg.k_grid.lo
                        : cfg.k_grid.lo + (cfg.k_grid.hi - cfg.k_grid.lo) * i /
                                              (cfg.k_grid.n - 1);
        cx k(re, cfg.k_grid.im);
        cx rv = r.r(k);
        double defect = std::nan("");
        if (cfg.k_grid.im == 0.0) {
            auto [a, b] = scattering_entries(datum, k);
            defect = std::norm(a) + std::norm(b) - 1.0;
        }
        os << num17(k.real()) << ',' << num17(k.imag()) << ',' << num17(rv.real())
           << ',' << num17(rv.imag()) << ',' << num17(defect) << "\n";
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    if (std::abs(cfg.bg.q_minus - cfg.bg.q_plus) > 1e-12 * cfg.bg.q0)
        throw config_error("validate requires q_- = q_+");
    InitialDatum datum = make_datum(cfg);
    ReflectionData r = make_reflection(cfg);

    SimulationConfig sim;
    sim.domain_halfwidth = cfg.sim.domain_halfwidth;
    sim.n_points = cfg.sim.n_points;
    sim.dt = cfg.sim.dt;
    sim.snapshot_times = cfg.sim.snapshots;
    sim.t_final = cfg.sim.snapshots.empty() ? 0.0 : cfg.sim.snapshots.back();

    std::vector<GridField> snaps = evolve(datum, cfg.bg, sim);

    AsymptoticEvaluator eval(r);
    auto modulus = [&](double x, double t) { return eval.modulus(x, t); };
    auto mask = [&](double x, double t) { return eval.in_mask(x, t); };
    ComparisonReport rep = compare_to_asymptotics(snaps, modulus, mask);

    json j;
    j["snapshots"] = json::array();
    bool decreasing = true;
    for (size_t i = 0; i < rep.per_snapshot.size(); ++i) {
        const auto& e = rep.per_snapshot[i];
        j["snapshots"].push_back({{"t", e.time},
                                  {"sup_err", e.sup_err},
                                  {"l2_err", e.l2_err},
                                  {"points", e.points}});
        if (i > 0 && e.sup_err >= rep.per_snapshot[i - 1].sup_err)
            decreasing = false;
    }
    j["fitted_exponent"] = rep.fitted_decay_exponent;

    // envelope extrema on an interior window at the last snapshot
    const GridField& last = snaps.back();
    double b = 4.0 * std::sqrt(2.0) * cfg.bg.q0;
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
    for (int i = 0; i <= 40; ++i) {
        double xi = xi_c - half_w + 2.0 * half_w * i / 40.0;
        EllipticParams p = eval.elliptic_at(xi);
        max_pred = std::max(max_pred, cfg.bg.q0 + p.alpha.imag());
        min_pred = std::min(min_pred, std::abs(cfg.bg.q0 - p.alpha.imag()));
    }
    j["envelope"] = {{"window_xi_center", xi_c},
                     {"window_xi_halfwidth", half_w},
                     {"max_numeric", max_num},
                     {"max_predicted", max_pred},
                     {"min_numeric", min_num},
                     {"min_predicted", min_pred}};

    double ts = cfg.tol_scale;
    bool exp_ok = rep.fitted_decay_exponent >= -0.75 * ts - (ts - 1.0) &&
                  rep.fitted_decay_exponent <= -0.3 / ts;
    bool env_max_ok = std::abs(max_num - max_pred) <= 0.05 * ts * max_pred;
    bool env_min_ok = std::abs(min_num - min_pred) <=
                      0.05 * ts * std::max(min_pred, 0.2 * cfg.bg.q0);
    j["criteria"] = {{"sup_error_decreasing", decreasing},
                     {"exponent_in_range", exp_ok},
                     {"envelope_max_within_5pct", env_max_ok},
                     {"envelope_min_within_5pct", env_min_ok}};
    bool pass = decreasing && exp_ok && env_max_ok && env_min_ok;
    j["pass"] = pass;

    std::ofstream file;
    std::ostream& os = open_output(cfg, file, out);
    os << j.dump(2) << "\n";
    return pass ? exit_ok : exit_acceptance;
}

// ---------------------------------------------------------------------------
// identities
// ---------------------------------------------------------------------------

namespace {

json identity_record(const std::string& name, double residual, double threshold) {
    return {{"name", name},
            {"residual", residual},
            {"threshold", threshold},
            {"pass", residual <= threshold}};
}

} // namespace

int cmd_identities(const RunConfig& cfg, std::ostream& out) {
    json recs = json::array();
    const double ts = cfg.tol_scale;

    // theta identities at the solved parameters over a xi grid
    ReflectionData r = make_reflection(cfg);
    const BackgroundParams& bg = cfg.bg;
    double b = 4.0 * std::sqrt(2.0) * bg.q0;
    for (int i = 1; i <= 5; ++i) {
        double xi = -b * double(i) / 6.0;
        double k0 = solve_k0(xi, bg);
        AlphaModulus am = alpha_and_modulus(xi, k0, bg);
        ThetaContext ctx = theta_context(am.m);
        double K = am.Kval, m = am.m;

        auto t0 = [&](int jth) { return theta_j(jth, 0.0, ctx); };
        double z2 = std::abs(t0(2) * t0(2) - 2.0 * m * K / pi);
        double z3 = std::abs(t0(3) * t0(3) - 2.0 * K / pi);
        double z4 = std::abs(t0(4) * t0(4) -
                             2.0 * std::sqrt((1.0 - m) * (1.0 + m)) * K / pi);
        double scale = 2.0 * K / pi;
        recs.push_back(identity_record(
            "theta-zero-values xi=" + num17(xi),
            std::max({z2, z3, z4}) / scale, 1e-8 * ts));
        double dz = std::abs(theta_j_dz(1, 0.0, ctx) - t0(2) * t0(3) * t0(4));
        recs.push_back(identity_record("theta1-derivative xi=" + num17(xi),
                                       dz / std::abs(t0(2) * t0(3) * t0(4)),
                                       1e-8 * ts));

        EllipticGeometry geom = make_geometry(xi, k0, bg);
        cx v_inf = v_infinity(geom, am.Cnorm);
        cx y = pi * v_inf;
        cx alpha = am.alpha;
        cx iq0 = cx(0.0, bg.q0);
        double mp = std::sqrt((1.0 - m) * (1.0 + m));
        double a2 = std::norm(alpha + iq0);
        auto th = [&](int jth, cx z) { return theta_j(jth, z, ctx); };
        cx r42 = th(4, y) * th(4, y) / (th(2, y) * th(2, y));
        cx f42 = -2.0 * iq0 * (iq0 + std::conj(alpha)) / (m * mp * a2);
        recs.push_back(identity_record("theta-ratio-42 xi=" + num17(xi),
                                       std::abs(r42 - f42) / std::abs(f42),
                                       1e-8 * ts));
        cx r12 = th(1, y) * th(1, y) / (th(2, y) * th(2, y));
        cx f12 = -(iq0 + alpha) * (iq0 + std::conj(alpha)) / (mp * a2);
        recs.push_back(identity_record("theta-ratio-12 xi=" + num17(xi),
                                       std::abs(r12 - f12) / std::abs(f12),
                                       1e-8 * ts));
        cx r32 = th(3, y) * th(3, y) / (th(2, y) * th(2, y));
        cx f32 = -2.0 * iq0 * (iq0 + alpha) / (m * a2);
        recs.push_back(identity_record("theta-ratio-32 xi=" + num17(xi),
                                       std::abs(r32 - f32) / std::abs(f32),
                                       1e-8 * ts));
        cx r14 = th(1, 2.0 * y) * th(1, 2.0 * y) / (th(4, 2.0 * y) * th(4, 2.0 * y));
        cx f14 = 4.0 * bg.q0 * alpha.imag() /
                 (m * std::pow(bg.q0 + alpha.imag(), 2));
        recs.push_back(identity_record("theta-ratio-squared-14 xi=" + num17(xi),
                                       std::abs(r14 - f14) / std::abs(f14),
                                       1e-8 * ts));

        recs.push_back(identity_record("C-cross-check xi=" + num17(xi),
                                       am.C_cross_check_err, 1e-8 * ts));
        recs.push_back(identity_record("tau-cross-check xi=" + num17(xi),
                                       am.tau_cross_check_err, 1e-8 * ts));
        double om_closed = omega_big(geom, m, K);
        double om_quad = omega_big_quadrature(geom);
        recs.push_back(identity_record(
            "Omega-cross-check xi=" + num17(xi),
            std::abs(om_quad - om_closed) / std::abs(om_closed), 1e-6 * ts));
        recs.push_back(identity_record("h-alpha-residual xi=" + num17(xi),
                                       h_residual_at_alpha(geom), 1e-7 * ts));
    }

    // duplication identities at random points in the fundamental domain
    {
        ThetaContext ctx = theta_context(0.6);
        std::mt19937 rng(20240917);
        std::uniform_real_distribution<double> ur(-0.5, 0.5);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            cx y(ur(rng) * pi, ur(rng) * 0.4 * pi * ctx.tau_im);
            auto th = [&](int jth, cx z) { return theta_j(jth, z, ctx); };
            cx lhs1 = th(1, 2.0 * y) * th(2, 0.0) * th(3, 0.0) * th(4, 0.0);
            cx rhs1 = 2.0 * th(1, y) * th(2, y) * th(3, y) * th(4, y);
            cx lhs2 = th(4, 2.0 * y) * std::pow(th(4, 0.0), 3);
            cx rhs2 = std::pow(th(3, y), 4) - std::pow(th(2, y), 4);
            worst = std::max(worst, std::abs(lhs1 - rhs1) /
                                        std::max(1.0, std::abs(rhs1)));
            worst = std::max(worst, std::abs(lhs2 - rhs2) /
                                        std::max(1.0, std::abs(rhs2)));
        }
        recs.push_back(identity_record("theta-duplication m=0.6", worst, 1e-9 * ts));
    }

    // realness residuals of the contour constants at one interior xi
    {
        double xi = -0.5 * b;
        EllipticParams p = make_elliptic_params(xi, r);
        recs.push_back(identity_record("omega-realness", p.diag.omega_im_residual,
                                       1e-8 * ts));
        recs.push_back(identity_record("g-inf-realness", p.diag.g_inf_im_residual,
                                       1e-8 * ts));
        recs.push_back(
            identity_record("H0-realness", p.diag.H0_im_residual, 1e-8 * ts));
    }

    bool all = true;
    for (const auto& rec : recs) all = all && rec["pass"].get<bool>();
    json j = {{"records", recs}, {"all_pass", all}};

    std::ofstream file;
    std::ostream& os = open_output(cfg, file, out);
    os << j.dump(2) << "\n";
    return all ? exit_ok : exit_acceptance;
}

} // namespace fnls
