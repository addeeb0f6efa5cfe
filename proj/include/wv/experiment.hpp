#ifndef WV_EXPERIMENT_HPP
#define WV_EXPERIMENT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wv/beam.hpp"
#include "wv/fdtd.hpp"
#include "wv/nonlinearity.hpp"
#include "wv/tomography.hpp"

namespace wv {

using json = nlohmann::json;

/// Field / envelope factories for the JSON config surface.
NonlinearityField field_from_json(const json& j);
BeamEnvelope envelope_from_json(const json& j);

/// Built-in experiment presets, dumpable through the CLI.
json preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Validated deep-merge of user keys over preset/default keys.
json merge_config(json base, const json& overrides);

struct Experiment1dResult {
    Grid1D grid;
    Eigen::ArrayXd terminal;
    Eigen::ArrayXd terminal_linear;  // size 0 unless a reference run was made
    std::vector<std::pair<double, Eigen::ArrayXd>> snapshots;
    double h = 0.0, T = 0.0;
    double envelope_center = 0.0;
    json scalars;
};

struct Experiment2dResult {
    Grid2D grid;
    Eigen::ArrayXXd terminal;
    Eigen::ArrayXXd terminal_linear;
    double h = 0.0, T = 0.0;
    Eigen::Vector2d envelope_center = Eigen::Vector2d::Zero();
    json scalars;
};

Experiment1dResult run_fdtd_1d(const json& config);
Experiment2dResult run_fdtd_2d(const json& config);

struct TiltExtraction {
    double recovered = 0.0;  // mean over levels of d/k
    double truth = 0.0;      // quadrature along the packet-center ray
    double rel_error = 0.0;
    double level_spread = 0.0;  // relative spread of d/k across levels
    std::vector<TiltMeasurement> tilts;
    DemodulationResult demod_nonlinear, demod_linear;
};

/// Demodulate the terminal packets of a 1D run and measure the tilt of the
/// nonlinear profile against the linear reference.
TiltExtraction extract_tilt_1d(const Experiment1dResult& run,
                               const NonlinearityField& alpha,
                               const json& config);

/// Full-simulation sinogram: one 2D run per angle with the nonlinearity
/// rotated, one shared linear reference run, per-offset demodulation.
Sinogram assemble_sinogram_fdtd(const NonlinearityField& alpha,
                                const AcquisitionGeometry& geom,
                                const json& config);

struct LadderRung {
    double h = 0.0;
    double dx = 0.0;
    double err_sup = 0.0;
};

struct LadderReport {
    std::vector<LadderRung> rungs;
    std::vector<double> orders;     // log2(err_i / err_{i+1})
    std::vector<double> h2_ratios;  // (err_i/h_i^2) / (err_{i+1}/h_{i+1}^2)
};

/// Error ladder of the 1D linear run against the two-term expansion; grids
/// refine like h^2 so the scheme error follows the target scaling.
LadderReport linear_remainder_ladder(const json& base_config,
                                     const std::vector<double>& hs);
/// Same ladder for the nonlinear preset against h * U0.
LadderReport nonlinear_remainder_ladder(const json& base_config,
                                        const std::vector<double>& hs);

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

/// Cross-method invariant suite behind the `validate` CLI mode.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed,
                                              bool include_fdtd = true);

struct RunOutcome {
    std::filesystem::path out_dir;
    json manifest;
};

/// Execute a config end to end; writes artifacts and manifest.json.
RunOutcome run_experiment(const json& config,
                          const std::filesystem::path& out_dir);

/// Tidy long-format CSV bundles next to an existing run's artifacts.
std::vector<std::filesystem::path> emit_plot_data(
    const std::filesystem::path& run_dir);

std::string config_hash_hex(const json& config);

}  // namespace wv

#endif
