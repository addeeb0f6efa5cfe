// Command-line front end: experiment orchestration over the JSON config
// surface. Exit codes: 0 ok, 2 config error, 3 numerical guard, 4 I/O.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wv/errors.hpp"
#include "wv/experiment.hpp"

namespace {

using wv::json;

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw wv::IoError("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw wv::ConfigError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    double h = 0.0;
    double T = 0.0;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->set_help_flag("--help", "print help");  // frees -h for the h option
    cmd->add_option("--config", a.config_path,
                    "JSON config file (merged over the preset)");
    cmd->add_option("--preset", a.preset, "named preset to start from");
    cmd->add_option("--out", a.out_dir, "output directory for artifacts");
    cmd->add_option("--h", a.h, "override the wavelength parameter h");
    cmd->add_option("--T", a.T, "override the terminal time");
    cmd->add_option("--seed", a.seed, "override the run seed");
}

json resolve_config(const CommonArgs& a, const std::string& mode) {
    json cfg = json::object();
    if (!a.preset.empty()) cfg = wv::preset_config(a.preset);
    if (!a.config_path.empty())
        cfg = wv::merge_config(cfg, load_json_file(a.config_path));
    if (a.h > 0) cfg["h"] = a.h;
    if (a.T > 0) cfg["T"] = a.T;
    if (a.seed != 0) cfg["seed"] = a.seed;
    if (!cfg.contains("mode")) cfg["mode"] = mode;
    if (cfg.at("mode").get<std::string>() != mode)
        throw wv::ConfigError("config.mode '" +
                              cfg.at("mode").get<std::string>() +
                              "' does not match the subcommand '" + mode + "'");
    return cfg;
}

std::filesystem::path resolve_out_dir(const CommonArgs& a, const json& cfg) {
    if (!a.out_dir.empty()) return a.out_dir;
    if (cfg.contains("output_dir") && cfg.at("output_dir").is_string() &&
        !cfg.at("output_dir").get<std::string>().empty())
        return cfg.at("output_dir").get<std::string>();
    const char* root = std::getenv("WESTERVELT_OUTPUT_ROOT");
    const std::string label = cfg.value("label", "run");
    return std::filesystem::path(root ? root : "runs") / label;
}

void print_scalars(const json& manifest) {
    for (auto it = manifest["scalars"].begin(); it != manifest["scalars"].end();
         ++it)
        std::cout << "  " << it.key() << " = " << it.value().dump() << "\n";
}

int run_and_report(const json& cfg, const std::filesystem::path& out_dir) {
    const wv::RunOutcome outcome = wv::run_experiment(cfg, out_dir);
    std::cout << "wrote " << (outcome.out_dir / "manifest.json").string() << "\n";
    if (cfg.at("mode") == "validate") {
        const auto& m = outcome.manifest;
        for (const auto& c : m["checks"])
            std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ")
                      << c["name"].get<std::string>()
                      << "  value=" << c["value"].get<double>()
                      << "  bound=" << c["bound"].get<double>() << "\n";
        const int passed = m["scalars"]["checks_passed"].get<int>();
        const int total = m["scalars"]["checks_total"].get<int>();
        std::cout << passed << "/" << total << " checks passed\n";
        return passed == total ? 0 : 3;
    }
    print_scalars(outcome.manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward and inverse toolkit for weakly nonlinear acoustic "
                 "wave packets"};
    app.require_subcommand(1);

    CommonArgs profile_args, fdtd_args, sino_args, recon_args, validate_args;

    auto* cmd_profile = app.add_subcommand(
        "profile", "evolve a phase profile along one ray and measure tilts");
    add_common(cmd_profile, profile_args);

    auto* cmd_fdtd = app.add_subcommand(
        "fdtd", "direct simulation of the quasilinear wave equation");
    add_common(cmd_fdtd, fdtd_args);

    auto* cmd_sino = app.add_subcommand(
        "sinogram",
        "acquire ray-integral measurements over an angle/offset grid");
    add_common(cmd_sino, sino_args);
    std::string sino_mode;
    cmd_sino->add_option("--mode", sino_mode,
                         "acquisition mode: exact, profile or fdtd");

    auto* cmd_recon =
        app.add_subcommand("reconstruct", "invert a sinogram onto an image grid");
    add_common(cmd_recon, recon_args);
    std::string recon_input, recon_method;
    int recon_size = 0;
    cmd_recon->add_option("--input", recon_input, "sinogram CSV to invert");
    cmd_recon->add_option("--method", recon_method, "fbp or ridge");
    cmd_recon->add_option("--image-size", recon_size, "output grid size");

    auto* cmd_validate =
        app.add_subcommand("validate", "run the cross-method invariant suite");
    add_common(cmd_validate, validate_args);
    bool no_fdtd = false;
    cmd_validate->add_flag("--no-fdtd", no_fdtd,
                           "skip the direct-simulation checks");

    auto* cmd_plots = app.add_subcommand(
        "emit-plots", "write tidy CSV bundles for an existing run");
    std::string run_dir;
    cmd_plots->add_option("--run", run_dir, "run directory with a manifest")
        ->required();

    auto* cmd_preset = app.add_subcommand("preset", "built-in presets");
    std::string dump_name;
    cmd_preset->add_option("--dump", dump_name, "print the named preset JSON");
    bool list_presets = false;
    cmd_preset->add_flag("--list", list_presets, "list preset names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_profile->parsed())
            return run_and_report(resolve_config(profile_args, "profile"),
                                  resolve_out_dir(profile_args,
                                                  resolve_config(profile_args,
                                                                 "profile")));
        if (cmd_fdtd->parsed()) {
            const json cfg = resolve_config(fdtd_args, "fdtd");
            return run_and_report(cfg, resolve_out_dir(fdtd_args, cfg));
        }
        if (cmd_sino->parsed()) {
            json cfg = resolve_config(sino_args, "sinogram");
            if (!sino_mode.empty()) cfg["acquisition"]["mode"] = sino_mode;
            return run_and_report(cfg, resolve_out_dir(sino_args, cfg));
        }
        if (cmd_recon->parsed()) {
            json cfg = resolve_config(recon_args, "reconstruct");
            if (!recon_input.empty()) cfg["input"] = recon_input;
            if (!recon_method.empty()) cfg["method"] = recon_method;
            if (recon_size > 0) cfg["image_size"] = recon_size;
            return run_and_report(cfg, resolve_out_dir(recon_args, cfg));
        }
        if (cmd_validate->parsed()) {
            json cfg = resolve_config(validate_args, "validate");
            if (no_fdtd) cfg["include_fdtd"] = false;
            return run_and_report(cfg, resolve_out_dir(validate_args, cfg));
        }
        if (cmd_plots->parsed()) {
            for (const auto& p : wv::emit_plot_data(run_dir))
                std::cout << "wrote " << p.string() << "\n";
            return 0;
        }
        if (cmd_preset->parsed()) {
            if (list_presets) {
                for (const auto& n : wv::preset_names()) std::cout << n << "\n";
                return 0;
            }
            if (dump_name.empty())
                throw wv::ConfigError("preset: use --dump <name> or --list");
            std::cout << wv::preset_config(dump_name).dump(2) << "\n";
            return 0;
        }
    } catch (const wv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const wv::NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const wv::GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const wv::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const wv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
