#include <iostream>

#include <CLI11.hpp>

#include "fnls/cli_commands.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_path;
    int threads = 1;
    double tol_scale = 1.0;
    double xi = std::nan("");
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_xi) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--preset", o.preset,
                    "built-in preset: box-unit, box-default, fig-qmod");
    cmd->add_option("--out", o.out_path, "output path (default: stdout)");
    cmd->add_option("--threads", o.threads, "worker threads for grid evaluation");
    cmd->add_option("--tol-scale", o.tol_scale,
                    "scale factor on report thresholds");
    if (with_xi) cmd->add_option("--xi", o.xi, "similarity value x/t");
}

fnls::RunConfig build_config(const CommonOpts& o) {
    fnls::RunConfig cfg;
    if (!o.config_path.empty())
        cfg = fnls::parse_config_file(o.config_path);
    else if (!o.preset.empty())
        cfg = fnls::preset_config(o.preset);
    else
        throw fnls::config_error("provide --config or --preset");
    if (!o.out_path.empty()) cfg.out_path = o.out_path;
    if (!std::isnan(o.xi)) cfg.xi = o.xi;
    cfg.threads = o.threads;
    cfg.tol_scale = o.tol_scale;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-time asymptotics of focusing NLS with a nonzero "
                 "background: constants, profiles, scattering and validation"};
    app.require_subcommand(1);

    CommonOpts o_params, o_asymp, o_scatter, o_validate, o_identities;
    CLI::App* c_params =
        app.add_subcommand("params", "constant set for one similarity value");
    add_common(c_params, o_params, true);
    CLI::App* c_asymp =
        app.add_subcommand("asymp", "asymptotic profile on an (x/t, t) grid");
    add_common(c_asymp, o_asymp, false);
    CLI::App* c_scatter =
        app.add_subcommand("scatter", "reflection coefficient on a k grid");
    add_common(c_scatter, o_scatter, false);
    CLI::App* c_validate =
        app.add_subcommand("validate", "split-step run against the asymptotics");
    add_common(c_validate, o_validate, false);
    CLI::App* c_identities =
        app.add_subcommand("identities", "module invariant suite");
    add_common(c_identities, o_identities, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_params->parsed())
            return fnls::cmd_params(build_config(o_params), std::cout);
        if (c_asymp->parsed())
            return fnls::cmd_asymp(build_config(o_asymp), std::cout);
        if (c_scatter->parsed())
            return fnls::cmd_scatter(build_config(o_scatter), std::cout);
        if (c_validate->parsed())
            return fnls::cmd_validate(build_config(o_validate), std::cout);
        if (c_identities->parsed())
            return fnls::cmd_identities(build_config(o_identities), std::cout);
    } catch (const fnls::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return fnls::exit_config;
    } catch (const fnls::wrong_region_error& e) {
        std::cerr << "region error: " << e.what() << "\n";
        return fnls::exit_config;
    } catch (const fnls::numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return fnls::exit_numerics;
    }
    return fnls::exit_config;
}
