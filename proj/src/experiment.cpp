#include "wv/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "wv/io.hpp"
#include "wv/profile.hpp"

namespace wv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr const char* kVersion = "0.1.0";

double jnum(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError("config." + path + "." + key + ": number required");
    return j.at(key).get<double>();
}

double jnum_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("config." + key + ": number required");
    return j.at(key).get<double>();
}

Eigen::VectorXd jvec(const json& j, const std::string& path,
                     const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw ConfigError("config." + path + "." + key + ": array required");
    const auto& arr = j.at(key);
    Eigen::VectorXd v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ConfigError("config." + path + "." + key +
                              ": numeric entries required");
        v[i] = arr[i].get<double>();
    }
    return v;
}

}  // namespace

NonlinearityField field_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("config.field: object with a 'kind' key required");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        const int dim = static_cast<int>(jnum(j, "field", "dimension"));
        return NonlinearityField::zero(dim);
    }
    if (kind == "constant") {
        const int dim = static_cast<int>(jnum(j, "field", "dimension"));
        return NonlinearityField::constant(dim, jnum(j, "field", "value"));
    }
    if (kind == "gaussian") {
        const Eigen::VectorXd c = jvec(j, "field", "center");
        return NonlinearityField::gaussian(static_cast<int>(c.size()),
                                           jnum(j, "field", "amplitude"),
                                           jnum(j, "field", "width"), c);
    }
    if (kind == "gaussian_anisotropic") {
        return NonlinearityField::gaussian_anisotropic(
            jvec(j, "field", "widths"), jnum(j, "field", "amplitude"),
            jvec(j, "field", "center"));
    }
    if (kind == "disk") {
        const Eigen::VectorXd c = jvec(j, "field", "center");
        return NonlinearityField::disk(static_cast<int>(c.size()),
                                       jnum(j, "field", "amplitude"),
                                       jnum(j, "field", "radius"), c);
    }
    if (kind == "grid") {
        const Eigen::VectorXd origin = jvec(j, "field", "origin");
        const Eigen::VectorXd spacing = jvec(j, "field", "spacing");
        std::vector<int> shape;
        for (const auto& s : j.at("shape")) shape.push_back(s.get<int>());
        const Eigen::VectorXd values = jvec(j, "field", "values");
        return NonlinearityField::from_grid(origin, spacing, shape, values);
    }
    throw ConfigError("config.field.kind: unknown kind '" + kind + "'");
}

BeamEnvelope envelope_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("config.envelope: object with a 'kind' key required");
    const std::string kind = j.at("kind").get<std::string>();
    const Eigen::VectorXd c = jvec(j, "envelope", "center");
    const int dim = static_cast<int>(c.size());
    if (kind == "bump")
        return BeamEnvelope::bump(dim, jnum(j, "envelope", "amplitude"),
                                  jnum(j, "envelope", "radius"), c);
    if (kind == "gaussian")
        return BeamEnvelope::gaussian(dim, jnum(j, "envelope", "amplitude"),
                                      jnum(j, "envelope", "width"), c);
    if (kind == "plateau")
        return BeamEnvelope::plateau(dim, jnum(j, "envelope", "amplitude"), c,
                                     jnum(j, "envelope", "flat_radius"),
                                     jnum(j, "envelope", "skirt_radius"));
    if (kind == "beam")
        return BeamEnvelope::beam(dim, jnum(j, "envelope", "amplitude"), c,
                                  jnum(j, "envelope", "flat_transverse"),
                                  jnum(j, "envelope", "skirt_transverse"),
                                  jnum(j, "envelope", "flat_longitudinal"),
                                  jnum(j, "envelope", "skirt_longitudinal"));
    throw ConfigError("config.envelope.kind: unknown kind '" + kind + "'");
}

json merge_config(json base, const json& overrides) {
    if (!overrides.is_object()) return overrides;
    if (!base.is_object()) base = json::object();
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        if (it->is_object() && base.contains(it.key()))
            base[it.key()] = merge_config(base[it.key()], *it);
        else
            base[it.key()] = *it;
    }
    return base;
}

std::vector<std::string> preset_names() {
    return {"westervelt-1d", "westervelt-2d", "sinogram-profile",
            "sinogram-fdtd", "phantom-fbp", "validate"};
}

json preset_config(const std::string& name) {
    if (name == "westervelt-1d") {
        // 1D transmission run: unit-amplitude gaussian coefficient of width
        // 0.3, flat-top envelope supported on [-1, -0.75], h = 0.02, terminal
        // time 1.4. The envelope amplitude keeps every ray well below the
        // shock threshold (0.75 * 0.752 = 0.56 < 1; an amplitude of 1.5 would
        // cross it before the terminal time), and the default grid densifies
        // to 160 points per wavelength so the harmonic phases survive the
        // scheme's dispersion over the 70-wavelength traverse.
        return json{
            {"mode", "fdtd"},
            {"label", "westervelt-1d"},
            {"dimension", 1},
            {"h", 0.02},
            {"T", 1.4},
            {"field",
             {{"kind", "gaussian"}, {"amplitude", 1.0}, {"width", 0.3},
              {"center", {0.0}}}},
            {"envelope",
             {{"kind", "plateau"}, {"amplitude", 0.75}, {"flat_radius", 0.08},
              {"skirt_radius", 0.125}, {"center", {-0.875}}}},
            {"fdtd",
             {{"points_per_wavelength", 160.0}, {"cfl", 0.4}, {"b0", 0.5},
              {"boundary", "dirichlet"}, {"start", "cauchy"},
              {"margin", 0.25}, {"geometry_level", 0.05},
              {"run_linear_reference", true}, {"override_preflight", false},
              {"snapshot_times", json::array()}}},
            {"demod", {{"harmonics", 8}, {"window_width", 0.1257}}},
            {"levels", {0.3, 0.5, 0.7}},
            {"theta_grid", 1024},
            {"seed", 20260809}};
    }
    if (name == "westervelt-2d") {
        return json{
            {"mode", "fdtd"},
            {"label", "westervelt-2d"},
            {"dimension", 2},
            {"h", 0.05},
            {"T", 2.9},
            {"field",
             {{"kind", "gaussian"}, {"amplitude", 1.0}, {"width", 0.3},
              {"center", {0.0, 0.0}}}},
            {"envelope",
             {{"kind", "beam"}, {"amplitude", 0.75},
              {"center", {0.0, -1.45}}, {"flat_transverse", 0.3},
              {"skirt_transverse", 0.6}, {"flat_longitudinal", 0.3},
              {"skirt_longitudinal", 0.45}}},
            {"fdtd",
             {{"points_per_wavelength", 20.0}, {"cfl", 0.4}, {"b0", 0.5},
              {"boundary", "dirichlet"}, {"start", "cauchy"},
              {"margin", 0.3}, {"geometry_level", 0.01},
              {"run_linear_reference", true}, {"override_preflight", false}}},
            {"demod", {{"harmonics", 3}, {"window_width", 0.6}}},
            {"levels", {0.3, 0.5, 0.7}},
            {"theta_grid", 1024},
            {"seed", 20260809}};
    }
    if (name == "sinogram-profile") {
        return json{
            {"mode", "sinogram"},
            {"label", "sinogram-profile"},
            {"field",
             {{"kind", "gaussian_anisotropic"}, {"amplitude", 1.0},
              {"widths", {0.32, 0.22}}, {"center", {0.0, 0.0}}}},
            {"acquisition",
             {{"mode", "profile"}, {"angles", 60}, {"offsets", 64},
              {"offset_max", 1.1}, {"amplitude", 1.0}, {"theta_grid", 4096},
              {"emit_truth", true}}},
            {"levels", {0.3, 0.5, 0.7}},
            {"seed", 20260809}};
    }
    if (name == "sinogram-fdtd") {
        return json{
            {"mode", "sinogram"},
            {"label", "sinogram-fdtd"},
            {"field",
             {{"kind", "gaussian_anisotropic"}, {"amplitude", 1.0},
              {"widths", {0.32, 0.22}}, {"center", {0.0, 0.0}}}},
            {"acquisition",
             {{"mode", "fdtd"}, {"angles", 20}, {"offsets", 24},
              {"offset_max", 0.9}, {"emit_truth", true},
              {"h", 0.05}, {"T", 2.9},
              {"envelope",
               {{"kind", "beam"}, {"amplitude", 0.75},
                {"center", {0.0, -1.45}}, {"flat_transverse", 0.95},
                {"skirt_transverse", 1.25}, {"flat_longitudinal", 0.3},
                {"skirt_longitudinal", 0.45}}},
              {"fdtd",
               {{"points_per_wavelength", 40.0}, {"cfl", 0.4}, {"b0", 0.5},
                {"boundary", "dirichlet"}, {"start", "cauchy"},
                {"margin", 0.3}, {"geometry_level", 0.01},
                {"override_preflight", false}}},
              {"demod", {{"harmonics", 6}, {"window_width", 0.6}}},
              {"min_amplitude", 0.05}}},
            {"levels", {0.3, 0.5, 0.7}},
            {"seed", 20260809}};
    }
    if (name == "phantom-fbp") {
        return json{{"mode", "reconstruct"},
                    {"label", "phantom-fbp"},
                    {"input", "sinogram.csv"},
                    {"method", "fbp"},
                    {"image_size", 128},
                    {"cutoff", 1.0},
                    {"hann", true},
                    {"truth_field",
                     {{"kind", "gaussian_anisotropic"}, {"amplitude", 1.0},
                      {"widths", {0.32, 0.22}}, {"center", {0.0, 0.0}}}},
                    {"seed", 20260809}};
    }
    if (name == "validate")
        return json{{"mode", "validate"}, {"label", "validate"},
                    {"seed", 20260809}, {"include_fdtd", true}};
    throw ConfigError("unknown preset '" + name + "'");
}

namespace {

struct FdtdParams {
    double ppw = 20.0;
    FdtdOptions opts;
    std::string start = "cauchy";
    double margin = 0.25;
    double geometry_level = 1e-2;
    double t0 = 0.0;  // 0 => auto for handoff starts
    bool run_linear_reference = true;
    bool override_preflight = false;
    std::vector<double> snapshot_times;
};

FdtdParams fdtd_params(const json& config) {
    FdtdParams p;
    const json fd = config.value("fdtd", json::object());
    p.ppw = jnum_or(fd, "points_per_wavelength", 20.0);
    p.opts.cfl = jnum_or(fd, "cfl", 0.4);
    p.opts.b0 = jnum_or(fd, "b0", 0.5);
    if (p.opts.cfl <= 0 || p.opts.cfl > 0.5)
        throw ConfigError("config.fdtd.cfl: must lie in (0, 0.5]");
    if (p.opts.b0 <= 0 || p.opts.b0 >= 1)
        throw ConfigError("config.fdtd.b0: must lie in (0, 1)");
    const std::string b = fd.value("boundary", "dirichlet");
    if (b == "dirichlet")
        p.opts.boundary = Boundary::dirichlet;
    else if (b == "periodic")
        p.opts.boundary = Boundary::periodic;
    else if (b == "absorbing")
        p.opts.boundary = Boundary::absorbing;
    else
        throw ConfigError("config.fdtd.boundary: unknown boundary '" + b + "'");
    p.start = fd.value("start", "cauchy");
    if (p.start != "cauchy" && p.start != "handoff")
        throw ConfigError("config.fdtd.start: 'cauchy' or 'handoff' required");
    p.margin = jnum_or(fd, "margin", 0.25);
    p.geometry_level = jnum_or(fd, "geometry_level", 1e-2);
    p.t0 = jnum_or(fd, "t0", 0.0);
    p.run_linear_reference = fd.value("run_linear_reference", true);
    p.override_preflight = fd.value("override_preflight", false);
    if (fd.contains("snapshot_times"))
        for (const auto& t : fd.at("snapshot_times"))
            p.snapshot_times.push_back(t.get<double>());
    return p;
}

void preflight_checks(const NonlinearityField& alpha, const BeamEnvelope& chi,
                      const Eigen::VectorXd& omega, const FdtdParams& p,
                      json& scalars) {
    NoShockOptions nso;
    nso.omega = omega;
    const NoShockReport ns = no_shock_condition(alpha, chi.chi_max(), nso);
    scalars["no_shock_lhs"] = ns.lhs;
    scalars["no_shock"] = ns.no_shock;
    const double gap =
        support_gap(chi, alpha, Eigen::VectorXd::Zero(chi.dimension()),
                    p.geometry_level);
    scalars["support_gap"] = gap;
    if (p.override_preflight) return;
    if (!ns.no_shock)
        throw NumericalGuardError(
            "preflight: no-shock condition fails (lhs = " +
            std::to_string(ns.lhs) + " >= 1); override_preflight to force");
    if (gap <= 0.0)
        throw GeometryError(
            "preflight: envelope support meets the nonlinearity region at "
            "level " +
            std::to_string(p.geometry_level) + " (gap = " +
            std::to_string(gap) + "); override_preflight to force");
}

}  // namespace

Experiment1dResult run_fdtd_1d(const json& config) {
    if (config.value("dimension", 1) != 1)
        throw ConfigError("run_fdtd_1d: config.dimension must be 1");
    const NonlinearityField alpha = field_from_json(config.at("field"));
    const BeamEnvelope chi = envelope_from_json(config.at("envelope"));
    if (alpha.dimension() != 1 || chi.dimension() != 1)
        throw ConfigError("run_fdtd_1d: field and envelope must be 1D");
    const double h = jnum(config, "", "h");
    const double T = jnum(config, "", "T");
    if (!(h > 0) || !(T > 0))
        throw ConfigError("config.h / config.T: positive numbers required");
    const FdtdParams p = fdtd_params(config);
    Eigen::VectorXd omega(1);
    omega << 1.0;

    Experiment1dResult out;
    out.h = h;
    out.T = T;
    out.envelope_center = chi.support_center()[0];
    preflight_checks(alpha, chi, omega, p, out.scalars);

    const double c = chi.support_center()[0];
    const double r = chi.support_box_halfwidths()[0];
    const double lo =
        c - r - (p.start == "cauchy" ? T : 0.0) - p.margin;
    const double hi = c + r + T + p.margin;
    const double dx = kTwoPi * h / p.ppw;
    Grid1D grid{lo, dx, static_cast<int>(std::ceil((hi - lo) / dx)) + 1};
    out.grid = grid;

    Eigen::ArrayXd alpha_s(grid.n), zero_s = Eigen::ArrayXd::Zero(grid.n);
    Eigen::VectorXd pt(1);
    for (int i = 0; i < grid.n; ++i) {
        pt[0] = grid.x(i);
        alpha_s[i] = alpha(pt);
    }

    double t_start = 0.0;
    Eigen::ArrayXd p0(grid.n), q0 = Eigen::ArrayXd::Zero(grid.n);
    if (p.start == "cauchy") {
        for (int i = 0; i < grid.n; ++i) {
            pt[0] = grid.x(i);
            p0[i] = 2.0 * h * chi(pt) * std::cos(grid.x(i) / h);
        }
    } else {
        t_start = p.t0 > 0 ? p.t0
                           : default_handoff_time(chi, alpha, omega,
                                                  p.geometry_level);
        check_handoff_geometry(chi, alpha, omega, t_start, p.geometry_level);
        for (int i = 0; i < grid.n; ++i) {
            pt[0] = grid.x(i);
            p0[i] = handoff_p(chi, omega, h, t_start, pt);
            q0[i] = handoff_q(chi, omega, h, t_start, pt);
        }
    }
    out.scalars["t_start"] = t_start;

    const auto [steps, dt] =
        steps_for(T - t_start, cfl_time_step(dx, 1, p.opts));
    out.scalars["dx"] = dx;
    out.scalars["dt"] = dt;
    out.scalars["steps"] = steps;

    auto run_one = [&](const Eigen::ArrayXd& a) {
        WaveSolver1D solver(grid, a, dt, p.opts);
        solver.start_with_velocity(p0, q0, t_start);
        std::vector<std::pair<double, Eigen::ArrayXd>> snaps;
        size_t next_snap = 0;
        std::vector<double> want = p.snapshot_times;
        std::sort(want.begin(), want.end());
        for (int s = 1; s < steps; ++s) {
            solver.step();
            while (next_snap < want.size() &&
                   solver.time() >= want[next_snap] - 0.5 * dt) {
                snaps.emplace_back(solver.time(), solver.current());
                ++next_snap;
            }
        }
        return std::make_pair(solver.current(), snaps);
    };

    auto [terminal, snaps] = run_one(alpha_s);
    out.terminal = terminal;
    out.snapshots = snaps;
    if (p.run_linear_reference) out.terminal_linear = run_one(zero_s).first;

    Eigen::VectorXd base(1);
    base << c;
    out.scalars["stilde_center"] =
        line_integral(alpha, Ray(base, omega), 0.0, T);
    return out;
}

Experiment2dResult run_fdtd_2d(const json& config) {
    const NonlinearityField alpha = field_from_json(config.at("field"));
    const BeamEnvelope chi = envelope_from_json(config.at("envelope"));
    if (alpha.dimension() != 2 || chi.dimension() != 2)
        throw ConfigError("run_fdtd_2d: field and envelope must be 2D");
    const double h = jnum(config, "", "h");
    const double T = jnum(config, "", "T");
    const FdtdParams p = fdtd_params(config);
    Eigen::VectorXd omega(2);
    omega << 0.0, 1.0;
    if (config.contains("omega")) {
        const Eigen::VectorXd w = jvec(config, "", "omega");
        if ((w - omega).norm() > 1e-12)
            throw ConfigError(
                "config.omega: 2D runs propagate along (0,1); rotate the "
                "field instead");
    }

    Experiment2dResult out;
    out.h = h;
    out.T = T;
    out.envelope_center = chi.support_center();
    preflight_checks(alpha, chi, omega, p, out.scalars);

    const Eigen::VectorXd box = chi.support_box_halfwidths();
    const double cx = chi.support_center()[0], cy = chi.support_center()[1];
    const double dx = kTwoPi * h / p.ppw;
    const double xlo = cx - box[0] - p.margin, xhi = cx + box[0] + p.margin;
    const double ylo =
        cy - box[1] - (p.start == "cauchy" ? T : 0.0) - p.margin;
    const double yhi = cy + box[1] + T + p.margin;
    Grid2D grid;
    grid.x0 = xlo;
    grid.y0 = ylo;
    grid.dx = dx;
    grid.nx = static_cast<int>(std::ceil((xhi - xlo) / dx)) + 1;
    grid.ny = static_cast<int>(std::ceil((yhi - ylo) / dx)) + 1;
    out.grid = grid;

    Eigen::ArrayXXd alpha_s(grid.nx, grid.ny);
    Eigen::VectorXd pt(2);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            pt << grid.x(i), grid.y(j);
            alpha_s(i, j) = alpha(pt);
        }

    double t_start = 0.0;
    Eigen::ArrayXXd p0(grid.nx, grid.ny),
        q0 = Eigen::ArrayXXd::Zero(grid.nx, grid.ny);
    if (p.start == "cauchy") {
        for (int i = 0; i < grid.nx; ++i)
            for (int j = 0; j < grid.ny; ++j) {
                pt << grid.x(i), grid.y(j);
                p0(i, j) = 2.0 * h * chi(pt) * std::cos(grid.y(j) / h);
            }
    } else {
        t_start = p.t0 > 0 ? p.t0
                           : default_handoff_time(chi, alpha, omega,
                                                  p.geometry_level);
        check_handoff_geometry(chi, alpha, omega, t_start, p.geometry_level);
        for (int i = 0; i < grid.nx; ++i)
            for (int j = 0; j < grid.ny; ++j) {
                pt << grid.x(i), grid.y(j);
                p0(i, j) = handoff_p(chi, omega, h, t_start, pt);
                q0(i, j) = handoff_q(chi, omega, h, t_start, pt);
            }
    }
    out.scalars["t_start"] = t_start;

    const auto [steps, dt] =
        steps_for(T - t_start, cfl_time_step(dx, 2, p.opts));
    out.scalars["dx"] = dx;
    out.scalars["dt"] = dt;
    out.scalars["steps"] = steps;
    out.scalars["grid_nodes"] = grid.nx * grid.ny;

    auto run_one = [&](const Eigen::ArrayXXd& a) {
        WaveSolver2D solver(grid, a, dt, p.opts);
        solver.start_with_velocity(p0, q0, t_start);
        for (int s = 1; s < steps; ++s) solver.step();
        return solver.current();
    };
    out.terminal = run_one(alpha_s);
    if (p.run_linear_reference)
        out.terminal_linear = run_one(Eigen::ArrayXXd::Zero(grid.nx, grid.ny));

    Eigen::VectorXd base(2);
    base << cx, cy;
    out.scalars["stilde_center"] =
        line_integral(alpha, Ray(base, omega), 0.0, T);
    return out;
}

TiltExtraction extract_tilt_1d(const Experiment1dResult& run,
                               const NonlinearityField& alpha,
                               const json& config) {
    if (run.terminal_linear.size() == 0)
        throw ConfigError("extract_tilt_1d: linear reference run required");
    const json dm = config.value("demod", json::object());
    const int K = static_cast<int>(jnum_or(dm, "harmonics", 4));
    const double width = jnum_or(dm, "window_width", 0.22);
    const int n_theta = static_cast<int>(jnum_or(config, "theta_grid", 1024));
    const double xc = run.envelope_center + run.T;

    std::vector<double> pos, pn, pl;
    for (int i = 0; i < run.grid.n; ++i) {
        const double x = run.grid.x(i);
        if (std::abs(x - xc) <= 0.5 * width) {
            pos.push_back(x);
            pn.push_back(run.terminal[i]);
            pl.push_back(run.terminal_linear[i]);
        }
    }
    const Eigen::ArrayXd positions = Eigen::Map<Eigen::ArrayXd>(pos.data(), pos.size());
    const Eigen::ArrayXd vn = Eigen::Map<Eigen::ArrayXd>(pn.data(), pn.size());
    const Eigen::ArrayXd vl = Eigen::Map<Eigen::ArrayXd>(pl.data(), pl.size());

    TiltExtraction out;
    out.demod_nonlinear = demodulate(positions, vn, run.T, run.h, K, n_theta);
    out.demod_linear = demodulate(positions, vl, run.T, run.h, K, n_theta);

    const double M = out.demod_linear.profile.values.abs().maxCoeff();
    std::vector<double> levels;
    const json lv = config.value("levels", json{0.3, 0.5, 0.7});
    for (const auto& f : lv) {
        levels.push_back(f.get<double>() * M);
        levels.push_back(-f.get<double>() * M);
    }
    out.tilts = measure_tilt(out.demod_nonlinear.profile,
                             out.demod_linear.profile, levels);
    double acc = 0.0, lo = 1e300, hi = -1e300;
    for (const auto& t : out.tilts) {
        acc += t.recovered;
        lo = std::min(lo, t.recovered);
        hi = std::max(hi, t.recovered);
    }
    out.recovered = acc / out.tilts.size();
    out.level_spread =
        std::abs(out.recovered) > 0 ? (hi - lo) / std::abs(out.recovered) : 0.0;

    Eigen::VectorXd base(1), omega(1);
    base << run.envelope_center;
    omega << 1.0;
    out.truth = line_integral(alpha, Ray(base, omega), 0.0, run.T);
    out.rel_error = std::abs(out.truth) > 0
                        ? std::abs(out.recovered - out.truth) / std::abs(out.truth)
                        : std::abs(out.recovered);
    return out;
}

namespace {

// Column demodulation + tilt for one offset of a 2D terminal field.
double tilt_for_column(const Eigen::ArrayXXd& field,
                       const Eigen::ArrayXXd& field_lin, const Grid2D& grid,
                       int ix, double T, double h, double window_center,
                       double window_width, int K,
                       const std::vector<double>& level_fractions,
                       double min_amplitude) {
    std::vector<double> pos, pn, pl;
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        if (std::abs(y - window_center) <= 0.5 * window_width) {
            pos.push_back(y);
            pn.push_back(field(ix, j));
            pl.push_back(field_lin(ix, j));
        }
    }
    const Eigen::ArrayXd positions =
        Eigen::Map<Eigen::ArrayXd>(pos.data(), pos.size());
    const Eigen::ArrayXd vn = Eigen::Map<Eigen::ArrayXd>(pn.data(), pn.size());
    const Eigen::ArrayXd vl = Eigen::Map<Eigen::ArrayXd>(pl.data(), pl.size());
    const DemodulationResult dn = demodulate(positions, vn, T, h, K, 512);
    const DemodulationResult dl = demodulate(positions, vl, T, h, K, 512);
    const double M = dl.profile.values.abs().maxCoeff();
    if (M < min_amplitude * h)
        throw LevelError("column amplitude below the measurement floor");
    std::vector<double> levels;
    for (double f : level_fractions) {
        levels.push_back(f * M);
        levels.push_back(-f * M);
    }
    const auto tilts = measure_tilt(dn.profile, dl.profile, levels);
    double acc = 0.0;
    for (const auto& t : tilts) acc += t.recovered;
    return acc / tilts.size();
}

}  // namespace

Sinogram assemble_sinogram_fdtd(const NonlinearityField& alpha,
                                const AcquisitionGeometry& geom,
                                const json& config) {
    if (alpha.dimension() != 2)
        throw ConfigError("assemble_sinogram_fdtd: 2D fields only");
    const double h = jnum(config, "acquisition", "h");
    const double T = jnum(config, "acquisition", "T");
    const BeamEnvelope chi = envelope_from_json(config.at("envelope"));
    const json dm = config.value("demod", json::object());
    const int K = static_cast<int>(jnum_or(dm, "harmonics", 3));
    const double window_width = jnum_or(dm, "window_width", 0.9);
    const double min_amp = jnum_or(config, "min_amplitude", 0.05);
    std::vector<double> fractions;
    const json lv = config.value("level_fractions", json{0.3, 0.5, 0.7});
    for (const auto& f : lv) fractions.push_back(f.get<double>());

    json run_cfg;
    run_cfg["dimension"] = 2;
    run_cfg["h"] = h;
    run_cfg["T"] = T;
    run_cfg["envelope"] = config.at("envelope");
    run_cfg["fdtd"] = config.value("fdtd", json::object());
    run_cfg["fdtd"]["run_linear_reference"] = false;

    Sinogram s;
    {
        const double span = geom.full_turn ? kTwoPi : std::numbers::pi;
        s.angles.resize(geom.n_angles);
        for (int i = 0; i < geom.n_angles; ++i)
            s.angles[i] = span * i / geom.n_angles;
    }
    s.offsets = Eigen::VectorXd::LinSpaced(geom.n_offsets, -geom.offset_max,
                                           geom.offset_max);
    s.values.setZero(geom.n_angles, geom.n_offsets);
    s.valid.setOnes(geom.n_angles, geom.n_offsets);

    const FdtdParams params = fdtd_params(run_cfg);
    if (params.start != "cauchy")
        throw ConfigError(
            "assemble_sinogram_fdtd: only the cauchy start is supported");

    // One linear reference run shared by all rotations (its terminal field IS
    // the linear solution).
    json lin_cfg = run_cfg;
    lin_cfg["field"] = json{{"kind", "zero"}, {"dimension", 2}};
    const Experiment2dResult lin = run_fdtd_2d(lin_cfg);
    const Grid2D& grid = lin.grid;
    const double window_center = chi.support_center()[1] + T;

    // Cauchy data and time stepping are identical across angles.
    Eigen::ArrayXXd p0(grid.nx, grid.ny);
    {
        Eigen::VectorXd pt(2);
        for (int i = 0; i < grid.nx; ++i)
            for (int j = 0; j < grid.ny; ++j) {
                pt << grid.x(i), grid.y(j);
                p0(i, j) = 2.0 * h * chi(pt) * std::cos(grid.y(j) / h);
            }
    }
    const auto [steps, dt] = steps_for(T, cfl_time_step(grid.dx, 2, params.opts));

    Eigen::VectorXd omega(2);
    omega << 0.0, 1.0;
    for (int ia = 0; ia < geom.n_angles; ++ia) {
        const NonlinearityField rotated =
            apply_motion(alpha, RigidMotion::planar_rotation(s.angles[ia]));
        Eigen::ArrayXXd terminal;
        try {
            json scal;
            preflight_checks(rotated, chi, omega, params, scal);
            Eigen::ArrayXXd a(grid.nx, grid.ny);
            Eigen::VectorXd pt(2);
            for (int i = 0; i < grid.nx; ++i)
                for (int j = 0; j < grid.ny; ++j) {
                    pt << grid.x(i), grid.y(j);
                    a(i, j) = rotated(pt);
                }
            WaveSolver2D solver(grid, a, dt, params.opts);
            solver.start_from_rest(p0);
            for (int st = 1; st < steps; ++st) solver.step();
            terminal = solver.current();
        } catch (const Error& e) {
            for (int io = 0; io < geom.n_offsets; ++io) {
                s.valid(ia, io) = 0;
                s.failures.push_back("angle " + std::to_string(ia) + ": " +
                                     e.what());
            }
            continue;
        }

        for (int io = 0; io < geom.n_offsets; ++io) {
            const int ix = static_cast<int>(
                std::lround((s.offsets[io] - grid.x0) / grid.dx));
            if (ix < 1 || ix >= grid.nx - 1) {
                s.valid(ia, io) = 0;
                s.failures.push_back("offset outside the simulated domain");
                continue;
            }
            try {
                s.values(ia, io) = tilt_for_column(
                    terminal, lin.terminal, grid, ix, T, h, window_center,
                    window_width, K, fractions, min_amp);
            } catch (const Error& e) {
                s.valid(ia, io) = 0;
                s.failures.push_back("angle " + std::to_string(ia) +
                                     " offset " + std::to_string(io) + ": " +
                                     e.what());
            }
        }
    }
    return s;
}

LadderReport linear_remainder_ladder(const json& base_config,
                                     const std::vector<double>& hs) {
    LadderReport rep;
    const double h0 = hs.front();
    const double ppw0 =
        jnum_or(base_config.value("fdtd", json::object()),
                "points_per_wavelength", 20.0);
    const BeamEnvelope chi = envelope_from_json(base_config.at("envelope"));
    const double c = chi.support_center()[0];
    const double r = chi.support_box_halfwidths()[0];
    for (double h : hs) {
        json cfg = base_config;
        cfg["h"] = h;
        cfg["field"] = json{{"kind", "zero"}, {"dimension", 1}};
        cfg["fdtd"]["points_per_wavelength"] = ppw0 * h0 / h;
        cfg["fdtd"]["run_linear_reference"] = false;
        const Experiment1dResult run = run_fdtd_1d(cfg);
        const double T = run.T;
        double err = 0.0;
        Eigen::VectorXd pt(1);
        for (int i = 0; i < run.grid.n; ++i) {
            const double x = run.grid.x(i);
            if (x < c + T - r - 0.02 || x > c + T + r + 0.02) continue;
            pt[0] = x - T;
            const double ref = h * chi(pt) * std::cos((x - T) / h);
            err = std::max(err, std::abs(run.terminal[i] - ref));
        }
        rep.rungs.push_back({h, run.grid.dx, err});
    }
    for (size_t i = 0; i + 1 < rep.rungs.size(); ++i) {
        rep.orders.push_back(
            observed_order(rep.rungs[i].err_sup, rep.rungs[i + 1].err_sup));
        const double r0 = rep.rungs[i].err_sup / (rep.rungs[i].h * rep.rungs[i].h);
        const double r1 =
            rep.rungs[i + 1].err_sup / (rep.rungs[i + 1].h * rep.rungs[i + 1].h);
        rep.h2_ratios.push_back(r0 / r1);
    }
    return rep;
}

LadderReport nonlinear_remainder_ladder(const json& base_config,
                                        const std::vector<double>& hs) {
    LadderReport rep;
    const double h0 = hs.front();
    const double ppw0 =
        jnum_or(base_config.value("fdtd", json::object()),
                "points_per_wavelength", 20.0);
    const NonlinearityField alpha = field_from_json(base_config.at("field"));
    const BeamEnvelope chi = envelope_from_json(base_config.at("envelope"));
    const double c = chi.support_center()[0];
    const double r = chi.support_box_halfwidths()[0];
    Eigen::VectorXd omega(1);
    omega << 1.0;
    for (double h : hs) {
        json cfg = base_config;
        cfg["h"] = h;
        cfg["fdtd"]["points_per_wavelength"] = ppw0 * h0 / h;
        cfg["fdtd"]["run_linear_reference"] = false;
        const Experiment1dResult run = run_fdtd_1d(cfg);
        const double T = run.T;
        double err = 0.0;
        Eigen::VectorXd pt(1), base(1);
        for (int i = 0; i < run.grid.n; ++i) {
            const double x = run.grid.x(i);
            if (x < c + T - r - 0.02 || x > c + T + r + 0.02) continue;
            pt[0] = x - T;
            const double M = chi(pt);
            double ref = 0.0;
            if (M != 0.0) {
                base << x - T;
                const double stilde =
                    line_integral(alpha, Ray(base, omega), 0.0, T);
                ref = h * solve_implicit(M, stilde, (x - T) / h);
            }
            err = std::max(err, std::abs(run.terminal[i] - ref));
        }
        rep.rungs.push_back({h, run.grid.dx, err});
    }
    for (size_t i = 0; i + 1 < rep.rungs.size(); ++i) {
        rep.orders.push_back(
            observed_order(rep.rungs[i].err_sup, rep.rungs[i + 1].err_sup));
        const double r0 = rep.rungs[i].err_sup / (rep.rungs[i].h * rep.rungs[i].h);
        const double r1 =
            rep.rungs[i + 1].err_sup / (rep.rungs[i + 1].h * rep.rungs[i + 1].h);
        rep.h2_ratios.push_back(r0 / r1);
    }
    return rep;
}

std::vector<CheckResult> run_validation_suite(std::uint64_t seed,
                                              bool include_fdtd) {
    std::vector<CheckResult> out;
    auto push = [&](const std::string& name, double value, double bound) {
        out.push_back({name, value <= bound, value, bound});
    };

    // Hermitian symmetry and vanishing zeroth mode of the evolved spectrum.
    {
        const HarmonicSpectrum sp = evolve_spectrum(1.0, 0.5, 32);
        push("spectrum_hermitian_symmetry", sp.hermitian_defect(), 1e-10);
        push("spectrum_zero_mode", std::abs(sp.at(0)), 1e-10);
    }
    // Zero mean of evolved profiles.
    {
        const NonlinearityField alpha = NonlinearityField::gaussian(1, 1.0, 0.3);
        Eigen::VectorXd base(1), omega(1);
        base << -5.0;
        omega << 1.0;
        const PhaseProfile prof =
            evolve_profile(alpha, Ray(base, omega), 1.2, 10.0, 2048);
        push("profile_zero_mean", std::abs(prof.mean()), 1e-8);
    }
    // Zeros do not move: shift at a near-zero level is below grid resolution.
    {
        const int N = 2048;
        PhaseProfile prof;
        prof.values.resize(N);
        for (int j = 0; j < N; ++j)
            prof.values[j] = solve_implicit(1.0, 0.6, kTwoPi * j / N);
        const PhaseProfile lin = cosine_profile(1.0, N);
        const auto tilts = measure_tilt(prof, lin, {5e-4});
        push("zero_level_fixity", std::abs(tilts[0].shift), kTwoPi / N);
    }
    // Level independence of d/k (exact characteristics route).
    {
        const int N = 4096;
        PhaseProfile prof;
        prof.values.resize(N);
        for (int j = 0; j < N; ++j)
            prof.values[j] = solve_implicit(1.0, 0.55, kTwoPi * j / N);
        const PhaseProfile lin = cosine_profile(1.0, N);
        const auto tilts =
            measure_tilt(prof, lin, {0.3, -0.3, 0.5, -0.5, 0.7, -0.7}, 1e-10);
        double lo = 1e300, hi = -1e300, acc = 0.0;
        for (const auto& t : tilts) {
            lo = std::min(lo, t.recovered);
            hi = std::max(hi, t.recovered);
            acc += t.recovered;
        }
        acc /= tilts.size();
        push("level_independence_profile", (hi - lo) / std::abs(acc), 1e-6);
    }
    if (include_fdtd) {
        const json cfg = preset_config("westervelt-1d");
        const Experiment1dResult run = run_fdtd_1d(cfg);
        const TiltExtraction tilt =
            extract_tilt_1d(run, field_from_json(cfg.at("field")), cfg);
        push("level_independence_fdtd", tilt.level_spread, 0.05);
    }
    // Moment condition and FBP linearity on a seeded random phantom.
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> upos(-0.35, 0.35);
        std::uniform_real_distribution<double> uw(0.12, 0.3);
        std::uniform_real_distribution<double> ua(0.4, 1.0);
        auto phantom = [&] {
            std::vector<NonlinearityField> parts;
            for (int k = 0; k < 3; ++k) {
                Eigen::VectorXd c(2);
                c << upos(rng), upos(rng);
                parts.push_back(
                    NonlinearityField::gaussian(2, ua(rng), uw(rng), c));
            }
            auto eval = [parts](const Eigen::VectorXd& x) {
                double acc = 0.0;
                for (const auto& p : parts) acc += p(x);
                return acc;
            };
            double R = 0.0;
            for (const auto& p : parts) R = std::max(R, p.support_radius());
            return NonlinearityField(2, eval, R, "random-phantom");
        }();

        AcquisitionGeometry g;
        g.n_angles = 12;
        g.n_offsets = 257;
        g.offset_max = phantom.support_radius() + 0.2;
        const Sinogram sino = assemble_sinogram_exact(phantom, g);
        const Eigen::VectorXd m = sino.moments();
        const double spread =
            (m.maxCoeff() - m.minCoeff()) / std::abs(m.mean());
        push("sinogram_moment_condition", spread, 1e-8);

        AcquisitionGeometry g2;
        g2.n_angles = 24;
        g2.n_offsets = 65;
        g2.offset_max = g.offset_max;
        const Sinogram s2 = assemble_sinogram_exact(phantom, g2);
        FbpOptions fo;
        fo.image_size = 64;
        const Eigen::MatrixXd r1 = reconstruct_fbp(s2, fo);
        Sinogram s3 = s2;
        s3.values *= 3.7;
        const Eigen::MatrixXd r2 = reconstruct_fbp(s3, fo);
        const double defect = (r2 - 3.7 * r1).cwiseAbs().maxCoeff() /
                              std::max(1e-300, (3.7 * r1).cwiseAbs().maxCoeff());
        push("fbp_linearity", defect, 1e-10);
    }
    return out;
}

std::string config_hash_hex(const json& config) {
    const std::string s = config.dump();
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << hash;
    return os.str();
}

namespace {

void write_manifest(const std::filesystem::path& dir, const json& manifest) {
    std::ofstream f(dir / "manifest.json");
    if (!f) throw IoError("cannot write manifest in " + dir.string());
    f << manifest.dump(2) << '\n';
}

json manifest_skeleton(const json& config) {
    json m;
    m["version"] = kVersion;
    m["mode"] = config.value("mode", "");
    m["label"] = config.value("label", "");
    m["config_hash"] = config_hash_hex(config);
    m["config"] = config;
    m["artifacts"] = json::array();
    m["scalars"] = json::object();
    return m;
}

}  // namespace

RunOutcome run_experiment(const json& config,
                          const std::filesystem::path& out_dir) {
    if (!config.is_object() || !config.contains("mode"))
        throw ConfigError("config.mode: one of profile, fdtd, sinogram, "
                          "reconstruct, validate required");
    const std::string mode = config.at("mode").get<std::string>();
    std::filesystem::create_directories(out_dir);
    const auto t_begin = std::chrono::steady_clock::now();
    json manifest = manifest_skeleton(config);
    auto add_artifact = [&](const std::filesystem::path& p) {
        manifest["artifacts"].push_back(p.filename().string());
    };

    if (mode == "profile") {
        const NonlinearityField alpha = field_from_json(config.at("field"));
        const json jr = config.value("ray", json::object());
        const Eigen::VectorXd base = jvec(jr, "ray", "base");
        Eigen::VectorXd dir = jvec(jr, "ray", "direction");
        dir.normalize();
        const Ray ray(base, dir);
        const double M = jnum(config, "", "amplitude");
        const double s = jnum(config, "", "duration");
        const int n_theta = static_cast<int>(jnum_or(config, "theta_grid", 1024));
        const PhaseProfile prof = evolve_profile(alpha, ray, M, s, n_theta);
        const PhaseProfile lin = cosine_profile(M, n_theta);

        std::vector<double> levels;
        for (const auto& f : config.value("levels", json{0.3, 0.5, 0.7})) {
            levels.push_back(f.get<double>() * M);
            levels.push_back(-f.get<double>() * M);
        }
        const auto tilts = measure_tilt(prof, lin, levels);
        double recovered = 0.0;
        for (const auto& t : tilts) recovered += t.recovered;
        recovered /= tilts.size();

        io::write_profile_csv(out_dir / "profile.csv", prof);
        add_artifact("profile.csv");
        io::write_profile_csv(out_dir / "profile_linear.csv", lin);
        add_artifact("profile_linear.csv");
        io::write_profile_json(out_dir / "profile.json", prof);
        add_artifact("profile.json");
        io::write_spectrum_json(
            out_dir / "spectrum.json",
            profile_to_spectrum(prof, std::min(64, n_theta / 2 - 1)));
        add_artifact("spectrum.json");
        {
            Eigen::ArrayXd lv(tilts.size()), sh(tilts.size()), rec(tilts.size());
            for (size_t i = 0; i < tilts.size(); ++i) {
                lv[i] = tilts[i].level;
                sh[i] = tilts[i].shift;
                rec[i] = tilts[i].recovered;
            }
            io::write_csv(out_dir / "tilt.csv", {"level", "shift", "recovered"},
                          {lv, sh, rec});
            add_artifact("tilt.csv");
        }
        manifest["scalars"]["stilde"] = prof.stilde;
        manifest["scalars"]["recovered_integral"] = recovered;
        manifest["scalars"]["recovered_error"] =
            std::abs(recovered - prof.stilde);
    } else if (mode == "fdtd") {
        const int dim = config.value("dimension", 1);
        if (dim == 1) {
            const Experiment1dResult run = run_fdtd_1d(config);
            manifest["scalars"] = run.scalars;
            const Eigen::ArrayXd xs = run.grid.coords();
            io::write_csv(out_dir / "terminal_nonlinear.csv", {"x", "p"},
                          {xs, run.terminal});
            add_artifact("terminal_nonlinear.csv");
            if (run.terminal_linear.size()) {
                io::write_csv(out_dir / "terminal_linear.csv", {"x", "p"},
                              {xs, run.terminal_linear});
                add_artifact("terminal_linear.csv");
                const TiltExtraction tilt = extract_tilt_1d(
                    run, field_from_json(config.at("field")), config);
                manifest["scalars"]["recovered_integral"] = tilt.recovered;
                manifest["scalars"]["integral_truth"] = tilt.truth;
                manifest["scalars"]["recovered_rel_error"] = tilt.rel_error;
                manifest["scalars"]["level_spread"] = tilt.level_spread;
            }
            int si = 0;
            for (const auto& [t, field] : run.snapshots) {
                const std::string name =
                    "snapshot_" + std::to_string(si++) + ".csv";
                io::write_csv(out_dir / name, {"x", "p"}, {xs, field});
                add_artifact(name);
                manifest["scalars"]["snapshot_" + std::to_string(si - 1) +
                                    "_time"] = t;
            }
        } else if (dim == 2) {
            const Experiment2dResult run = run_fdtd_2d(config);
            manifest["scalars"] = run.scalars;
            io::write_grid2d(out_dir / "terminal_nonlinear.bin", run.grid,
                             run.terminal, run.T);
            add_artifact("terminal_nonlinear.bin");
            if (run.terminal_linear.size()) {
                io::write_grid2d(out_dir / "terminal_linear.bin", run.grid,
                                 run.terminal_linear, run.T);
                add_artifact("terminal_linear.bin");
                const Eigen::ArrayXXd diff =
                    (run.terminal - run.terminal_linear).abs();
                Eigen::Index di = 0, dj = 0;
                const double dmax = diff.maxCoeff(&di, &dj);
                manifest["scalars"]["max_nonlinear_deviation"] = dmax;
                manifest["scalars"]["deviation_x"] =
                    run.grid.x(static_cast<int>(di));
                manifest["scalars"]["deviation_y"] =
                    run.grid.y(static_cast<int>(dj));
            }
        } else {
            throw ConfigError("config.dimension: 1 or 2 required");
        }
    } else if (mode == "sinogram") {
        const NonlinearityField alpha = field_from_json(config.at("field"));
        const json acq = config.value("acquisition", json::object());
        AcquisitionGeometry geom;
        geom.n_angles = static_cast<int>(jnum_or(acq, "angles", 60));
        geom.n_offsets = static_cast<int>(jnum_or(acq, "offsets", 64));
        geom.offset_max = jnum_or(acq, "offset_max", 0.9);
        geom.full_turn = acq.value("full_turn", false);
        const std::string amode = acq.value("mode", "exact");
        Sinogram sino;
        if (amode == "exact") {
            sino = assemble_sinogram_exact(alpha, geom);
        } else if (amode == "profile") {
            ProfileAcquisitionOptions po;
            po.amplitude = jnum_or(acq, "amplitude", 1.0);
            po.n_theta = static_cast<int>(jnum_or(acq, "theta_grid", 4096));
            if (config.contains("levels")) {
                po.level_fractions.clear();
                for (const auto& f : config.at("levels"))
                    po.level_fractions.push_back(f.get<double>());
            }
            sino = assemble_sinogram_profile(alpha, geom, po);
        } else if (amode == "fdtd") {
            json acq2 = acq;
            if (config.contains("levels") && !acq2.contains("level_fractions"))
                acq2["level_fractions"] = config.at("levels");
            sino = assemble_sinogram_fdtd(alpha, geom, acq2);
        } else {
            throw ConfigError("config.acquisition.mode: exact, profile or "
                              "fdtd required");
        }
        io::write_sinogram_csv(out_dir / "sinogram.csv", sino);
        add_artifact("sinogram.csv");
        io::write_sinogram_bin(out_dir / "sinogram.bin", sino);
        add_artifact("sinogram.bin");
        manifest["scalars"]["masked_rays"] =
            static_cast<int>(sino.valid.size()) -
            static_cast<int>(sino.valid.cast<int>().sum());
        if (acq.value("emit_truth", true) && amode != "exact") {
            const Sinogram truth = assemble_sinogram_exact(alpha, geom);
            io::write_sinogram_csv(out_dir / "sinogram_truth.csv", truth);
            add_artifact("sinogram_truth.csv");
            double max_err = 0.0, rms = 0.0;
            int counted = 0;
            for (int ia = 0; ia < geom.n_angles; ++ia)
                for (int io2 = 0; io2 < geom.n_offsets; ++io2) {
                    if (!sino.valid(ia, io2)) continue;
                    const double e =
                        std::abs(sino.values(ia, io2) - truth.values(ia, io2));
                    max_err = std::max(max_err, e);
                    rms += e * e;
                    ++counted;
                }
            manifest["scalars"]["max_error_vs_truth"] = max_err;
            manifest["scalars"]["rms_error_vs_truth"] =
                counted ? std::sqrt(rms / counted) : 0.0;
        }
        if (!sino.failures.empty()) {
            std::ofstream f(out_dir / "failures.txt");
            for (const auto& msg : sino.failures) f << msg << '\n';
            add_artifact("failures.txt");
        }
    } else if (mode == "reconstruct") {
        const std::filesystem::path input = config.value("input", "");
        if (input.empty())
            throw ConfigError("config.input: path to a sinogram CSV required");
        const std::filesystem::path resolved =
            input.is_absolute() ? input : out_dir / input;
        const Sinogram sino = io::read_sinogram_csv(
            std::filesystem::exists(resolved) ? resolved : input);
        const std::string method = config.value("method", "fbp");
        Eigen::MatrixXd image;
        double extent = jnum_or(config, "extent", 0.0);
        if (extent <= 0) extent = std::abs(sino.offsets[sino.offsets.size() - 1]);
        if (method == "fbp") {
            FbpOptions fo;
            fo.image_size = static_cast<int>(jnum_or(config, "image_size", 128));
            fo.extent = extent;
            fo.cutoff = jnum_or(config, "cutoff", 1.0);
            fo.hann = config.value("hann", true);
            image = reconstruct_fbp(sino, fo);
        } else if (method == "ridge") {
            RidgeOptions ro;
            ro.image_size = static_cast<int>(jnum_or(config, "image_size", 64));
            ro.extent = extent;
            ro.lambda = jnum_or(config, "ridge_lambda", 1e-3);
            image = reconstruct_ridge(sino, ro);
        } else {
            throw ConfigError("config.method: fbp or ridge required");
        }
        io::write_image(out_dir / "reconstruction.bin", image, extent);
        add_artifact("reconstruction.bin");
        manifest["scalars"]["image_size"] = static_cast<int>(image.rows());
        manifest["scalars"]["extent"] = extent;
        if (config.contains("truth_field")) {
            const NonlinearityField truth =
                field_from_json(config.at("truth_field"));
            const ReconstructionErrorReport rep =
                reconstruction_error(image, extent, truth);
            manifest["scalars"]["rmse"] = rep.rmse;
            manifest["scalars"]["rmse_over_peak"] = rep.rmse_over_peak;
            manifest["scalars"]["max_abs_error"] = rep.max_abs;
            manifest["scalars"]["truth_peak"] = rep.truth_peak;
        }
    } else if (mode == "validate") {
        const std::uint64_t seed = config.value("seed", std::uint64_t{20260809});
        const auto checks =
            run_validation_suite(seed, config.value("include_fdtd", true));
        int passed = 0;
        json jt = json::array();
        for (const auto& c : checks) {
            passed += c.pass ? 1 : 0;
            jt.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"value", c.value},
                          {"bound", c.bound}});
        }
        manifest["scalars"]["checks_passed"] = passed;
        manifest["scalars"]["checks_total"] = static_cast<int>(checks.size());
        manifest["checks"] = jt;
        std::ofstream f(out_dir / "validate.txt");
        for (const auto& c : checks)
            f << (c.pass ? "PASS" : "FAIL") << ' ' << c.name << " value="
              << c.value << " bound=" << c.bound << '\n';
        add_artifact("validate.txt");
    } else {
        throw ConfigError("config.mode: unknown mode '" + mode + "'");
    }

    const auto t_end = std::chrono::steady_clock::now();
    manifest["timing"]["wall_seconds"] =
        std::chrono::duration<double>(t_end - t_begin).count();
    write_manifest(out_dir, manifest);
    return {out_dir, manifest};
}

namespace {

std::map<std::string, Eigen::ArrayXd> read_columns(
    const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty file " + path.string());
    std::vector<std::string> names;
    {
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) names.push_back(tok);
    }
    std::vector<std::vector<double>> cols(names.size());
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        size_t c = 0;
        while (std::getline(ss, tok, ',') && c < cols.size())
            cols[c++].push_back(tok.empty() ? std::nan("") : std::stod(tok));
    }
    std::map<std::string, Eigen::ArrayXd> out;
    for (size_t c = 0; c < names.size(); ++c)
        out[names[c]] =
            Eigen::Map<Eigen::ArrayXd>(cols[c].data(), cols[c].size());
    return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(
    const std::filesystem::path& run_dir) {
    std::ifstream mf(run_dir / "manifest.json");
    if (!mf) throw IoError("no manifest.json in " + run_dir.string());
    json manifest;
    mf >> manifest;
    const std::string mode = manifest.value("mode", "");
    const json config = manifest.value("config", json::object());
    std::vector<std::filesystem::path> written;
    const auto plots = run_dir / "plots";
    std::filesystem::create_directories(plots);

    if (mode == "fdtd" && config.value("dimension", 1) == 1) {
        auto nl = read_columns(run_dir / "terminal_nonlinear.csv");
        const auto out = plots / "plot_packet.csv";
        if (std::filesystem::exists(run_dir / "terminal_linear.csv")) {
            auto lin = read_columns(run_dir / "terminal_linear.csv");
            io::write_csv(out, {"x", "p_nonlinear", "p_linear"},
                          {nl["x"], nl["p"], lin["p"]});
        } else {
            io::write_csv(out, {"x", "p_nonlinear"}, {nl["x"], nl["p"]});
        }
        written.push_back(out);
    } else if (mode == "profile") {
        auto prof = read_columns(run_dir / "profile.csv");
        auto lin = read_columns(run_dir / "profile_linear.csv");
        auto tilt = read_columns(run_dir / "tilt.csv");
        const Eigen::Index n = prof["theta"].size();
        const Eigen::Index m = tilt["level"].size();
        Eigen::ArrayXd theta(n + m), u(n + m), ul(n + m), level(n + m),
            shift(n + m);
        theta.head(n) = prof["theta"];
        u.head(n) = prof["u"];
        ul.head(n) = lin["u"];
        level.head(n).setConstant(std::nan(""));
        shift.head(n).setConstant(std::nan(""));
        for (Eigen::Index i = 0; i < m; ++i) {
            theta[n + i] = std::nan("");
            u[n + i] = std::nan("");
            ul[n + i] = std::nan("");
            level[n + i] = tilt["level"][i];
            shift[n + i] = tilt["shift"][i];
        }
        const auto out = plots / "plot_profile.csv";
        io::write_csv(out, {"theta", "u", "u_linear", "level", "shift"},
                      {theta, u, ul, level, shift});
        written.push_back(out);
    } else if (mode == "sinogram") {
        auto s = read_columns(run_dir / "sinogram.csv");
        const auto out = plots / "plot_sinogram.csv";
        if (std::filesystem::exists(run_dir / "sinogram_truth.csv")) {
            auto t = read_columns(run_dir / "sinogram_truth.csv");
            io::write_csv(out, {"angle", "offset", "value", "truth", "error"},
                          {s["angle"], s["offset"], s["value"], t["value"],
                           (s["value"] - t["value"]).eval()});
        } else {
            io::write_csv(out, {"angle", "offset", "value"},
                          {s["angle"], s["offset"], s["value"]});
        }
        written.push_back(out);
    } else if (mode == "reconstruct") {
        Grid2D g;
        const Eigen::ArrayXXd img =
            io::read_grid2d(run_dir / "reconstruction.bin", g);
        const Eigen::Index n = g.nx * g.ny;
        Eigen::ArrayXd xs(n), ys(n), vs(n);
        Eigen::Index k = 0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j, ++k) {
                xs[k] = g.x(i);
                ys[k] = g.y(j);
                vs[k] = img(i, j);
            }
        const auto out = plots / "plot_reconstruction.csv";
        if (config.contains("truth_field")) {
            const NonlinearityField truth =
                field_from_json(config.at("truth_field"));
            Eigen::ArrayXd ts(n);
            Eigen::VectorXd pt(2);
            k = 0;
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j, ++k) {
                    pt << g.x(i), g.y(j);
                    ts[k] = truth(pt);
                }
            io::write_csv(out, {"x", "y", "value", "truth", "error"},
                          {xs, ys, vs, ts, (vs - ts).eval()});
        } else {
            io::write_csv(out, {"x", "y", "value"}, {xs, ys, vs});
        }
        written.push_back(out);
    } else {
        throw ConfigError("emit_plot_data: no plot bundle for mode '" + mode +
                          "'");
    }
    return written;
}

}  // namespace wv
