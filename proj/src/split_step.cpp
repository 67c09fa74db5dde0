#include "fnls/split_step.hpp"

#include <algorithm>
#include <cmath>

namespace fnls {

void fft_radix2(std::vector<cx>& a, bool inverse) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw config_error("fft size must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * pi / double(len) * (inverse ? 1.0 : -1.0);
        cx wl = std::polar(1.0, ang);
        for (size_t i = 0; i < n; i += len) {
            cx w(1.0, 0.0);
            for (size_t j2 = 0; j2 < len / 2; ++j2) {
                cx u = a[i + j2];
                cx v = a[i + j2 + len / 2] * w;
                a[i + j2] = u + v;
                a[i + j2 + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= double(n);
}

double mass_proxy(const GridField& field, double q0) {
    // trapezoid on the periodic domain: the wrap point x = L is identified
    // with x = -L, so the rule reduces to the uniform sum
    double h = field.x[1] - field.x[0];
    double acc = 0.0;
    for (const cx& v : field.values) acc += std::norm(v) - q0 * q0;
    return acc * h;
}

namespace {

struct EdgeMonitor {
    double t_first_hit = -1.0;
    double r_prev = 0.0;
    double t_prev = 0.0;
    double speed = 0.0;

    // track the radius of the disturbed region to estimate the front speed
    void update(const GridField& f, const BackgroundParams& bg, double t) {
        double thresh = 2e-3 * bg.q0;
        size_t n = f.values.size();
        double r = 0.0;
        for (size_t i = 0; i < n / 2; ++i) {
            size_t lo = i, hi = n - 1 - i;
            if (std::abs(f.values[lo] - bg.q_minus) > thresh ||
                std::abs(f.values[hi] - bg.q_plus) > thresh) {
                r = std::abs(f.x[lo]);
                break;
            }
        }
        if (r > r_prev && t > t_prev) {
            speed = (r - r_prev) / (t - t_prev);
            r_prev = r;
            t_prev = t;
        }
    }
};

} // namespace

std::vector<GridField> evolve(const InitialDatum& datum,
                              const BackgroundParams& bg,
                              const SimulationConfig& cfg) {
    if (std::abs(bg.q_minus - bg.q_plus) > 1e-12 * bg.q0)
        throw config_error(
            "evolve requires q_- = q_+ (periodic-compatible background)");
    const int n = cfg.n_points;
    if (n < (1 << 10) || (n & (n - 1)) != 0)
        throw config_error("n_points must be a power of two, at least 2^10");
    const double L = cfg.domain_halfwidth;
    const double h = 2.0 * L / n;
    if (cfg.dt > 0.5 * h * h)
        throw config_error("dt violates the 0.5 dx^2 step heuristic");

    GridField f;
    f.x.resize(n);
    f.values.resize(n);
    for (int i = 0; i < n; ++i) {
        f.x[i] = -L + i * h;
        f.values[i] = datum.value(f.x[i]);
    }
    // datum must match the background near the identified edges
    for (int i = 0; i < n / 20; ++i) {
        if (std::abs(f.values[i] - bg.q_minus) > 1e-12 * std::max(1.0, bg.q0) ||
            std::abs(f.values[n - 1 - i] - bg.q_plus) > 1e-12 * std::max(1.0, bg.q0))
            throw config_error(
                "datum differs from the background within 5% of the domain edge");
    }

    std::vector<double> k2(n);
    for (int i = 0; i < n; ++i) {
        double kap = (i <= n / 2 ? i : i - n) * pi / L;
        k2[i] = kap * kap;
    }
    std::vector<cx> lin_phase(n);
    for (int i = 0; i < n; ++i) lin_phase[i] = std::polar(1.0, -k2[i] * cfg.dt);

    const double c0 = cfg.background_rotation * bg.q0 * bg.q0;
    auto nonlinear_half = [&](std::vector<cx>& v, double dt_half) {
        for (auto& z : v) {
            double amp2 = std::norm(z);
            z *= std::polar(1.0, 2.0 * (amp2 - c0) * dt_half);
        }
    };

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::vector<GridField> out;
    if (!snaps.empty() && snaps.front() <= 0.0) {
        out.push_back(f);
        snaps.erase(snaps.begin());
    }

    EdgeMonitor monitor;
    double t = 0.0;
    size_t next_snap = 0;
    long step = 0;
    while (next_snap < snaps.size() && t < cfg.t_final + 1e-12) {
        double target = snaps[next_snap];
        double dt = cfg.dt;
        bool at_snap = false;
        if (t + dt >= target - 1e-12) {
            dt = target - t;
            at_snap = true;
        }
        if (dt > 1e-15) {
            std::vector<cx> short_phase;
            const std::vector<cx>* lp = &lin_phase;
            if (dt != cfg.dt) {
                short_phase.resize(n);
                for (int i = 0; i < n; ++i)
                    short_phase[i] = std::polar(1.0, -k2[i] * dt);
                lp = &short_phase;
            }
            nonlinear_half(f.values, 0.5 * dt);
            fft_radix2(f.values, false);
            for (int i = 0; i < n; ++i) f.values[i] *= (*lp)[i];
            fft_radix2(f.values, true);
            nonlinear_half(f.values, 0.5 * dt);
            t += dt;
        } else {
            t = target;
        }
        if (++step % 64 == 0 || at_snap) {
            monitor.update(f, bg, t);
            // contamination check: edges must stay at the (possibly gauge-
            // rotated) background value
            cx edge = bg.q_minus *
                      std::exp(cx(0.0, 2.0 * (1.0 - cfg.background_rotation) *
                                           bg.q0 * bg.q0 * t));
            double worst = 0.0;
            for (int i = 0; i < n / 50; ++i)
                worst = std::max({worst, std::abs(f.values[i] - edge),
                                  std::abs(f.values[n - 1 - i] - edge)});
            if (worst > cfg.edge_tolerance * bg.q0)
                throw domain_too_small_error(
                    "radiation reached the domain edge before t_final",
                    monitor.speed);
        }
        if (at_snap) {
            f.time = t;
            out.push_back(f);
            ++next_snap;
        }
    }
    return out;
}

ComparisonReport compare_to_asymptotics(
    const std::vector<GridField>& snapshots,
    const std::function<double(double, double)>& asymp_modulus,
    const std::function<bool(double, double)>& region_mask) {
    ComparisonReport rep;
    for (const auto& snap : snapshots) {
        SnapshotError e;
        e.time = snap.time;
        double l2 = 0.0;
        int count = 0;
        for (size_t i = 0; i < snap.x.size(); ++i) {
            if (!region_mask(snap.x[i], snap.time)) continue;
            double diff =
                std::abs(std::abs(snap.values[i]) - asymp_modulus(snap.x[i], snap.time));
            e.sup_err = std::max(e.sup_err, diff);
            l2 += diff * diff;
            ++count;
        }
        if (count == 0)
            throw config_error("compare_to_asymptotics: empty region mask");
        e.l2_err = std::sqrt(l2 / count);
        e.points = count;
        rep.per_snapshot.push_back(e);
    }
    // least-squares fit of ln(sup_err) against ln(t)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& e : rep.per_snapshot) {
        if (e.time <= 0.0 || e.sup_err <= 0.0) continue;
        double lx = std::log(e.time), ly = std::log(e.sup_err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    rep.fitted_decay_exponent =
        (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return rep;
}

} // namespace fnls
