#ifndef FNLS_CLI_COMMANDS_HPP
#define FNLS_CLI_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "fnls/direct_scattering.hpp"

namespace fnls {

// Exit codes shared by the command-line front end.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;      // region/config errors
inline constexpr int exit_numerics = 3;    // non-convergence
inline constexpr int exit_acceptance = 4;  // validation criteria failed

struct GridSpec {
    double xi_lo = 0.0, xi_hi = 0.0;
    int n_xi = 0;
    double t_lo = 0.0, t_hi = 0.0;
    int n_t = 0;
};

struct KGridSpec {
    double lo = -5.0, hi = 5.0;
    int n = 101;
    double im = 0.0;
};

struct SimulationConfigJson {
    double domain_halfwidth = 600.0;
    int n_points = 1 << 14;
    double dt = 2e-3;
    std::vector<double> snapshots = {10.0, 20.0, 40.0};
};

struct RunConfig {
    BackgroundParams bg = BackgroundParams::symmetric(1.0);
    std::optional<BoxDatum> box;
    std::string samples_path;   // sampled datum CSV, exclusive with box
    bool background_only = false;
    std::string reflection_mode = "auto"; // auto | closed-form | ode
    double epsilon_margin = 0.25;

    double xi = 0.0;
    GridSpec grid;
    KGridSpec k_grid;
    SimulationConfigJson sim;

    double tol_scale = 1.0;
    int threads = 1;
    std::string out_path; // empty = stdout
};

RunConfig parse_config_file(const std::string& path);
RunConfig preset_config(const std::string& name);

InitialDatum make_datum(const RunConfig& cfg);
ReflectionData make_reflection(const RunConfig& cfg);

int cmd_params(const RunConfig& cfg, std::ostream& out);
int cmd_asymp(const RunConfig& cfg, std::ostream& out);
int cmd_scatter(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_identities(const RunConfig& cfg, std::ostream& out);

// 17-significant-digit decimal rendering (round-trip safe).
std::string num17(double v);

} // namespace fnls

#endif
