#include "wv/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "wv/errors.hpp"

namespace wv::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f << std::setprecision(17);
    return f;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw IoError("cannot open for reading: " + path.string());
    return f;
}

std::filesystem::path sidecar(const std::filesystem::path& bin_path) {
    std::filesystem::path p = bin_path;
    p.replace_extension(".json");
    return p;
}

}  // namespace

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<Eigen::ArrayXd>& columns) {
    if (header.size() != columns.size())
        throw IoError("write_csv: header/column count mismatch");
    auto f = open_out(path);
    for (size_t c = 0; c < header.size(); ++c)
        f << header[c] << (c + 1 < header.size() ? ',' : '\n');
    const Eigen::Index n = columns.empty() ? 0 : columns[0].size();
    for (const auto& col : columns)
        if (col.size() != n) throw IoError("write_csv: ragged columns");
    for (Eigen::Index i = 0; i < n; ++i)
        for (size_t c = 0; c < columns.size(); ++c)
            f << columns[c][i] << (c + 1 < columns.size() ? ',' : '\n');
}

void write_profile_csv(const std::filesystem::path& path,
                       const PhaseProfile& profile) {
    write_csv(path, {"theta", "u"}, {profile.theta_grid(), profile.values});
}

void write_profile_json(const std::filesystem::path& path,
                        const PhaseProfile& profile,
                        const std::string& ray_description) {
    nlohmann::json j;
    j["n_theta"] = profile.size();
    j["amplitude"] = profile.amplitude;
    j["stilde"] = profile.stilde;
    if (!ray_description.empty()) j["ray"] = ray_description;
    j["values"] = std::vector<double>(profile.values.data(),
                                      profile.values.data() + profile.size());
    open_out(path) << j.dump(2) << '\n';
}

void write_spectrum_json(const std::filesystem::path& path,
                         const HarmonicSpectrum& spec) {
    nlohmann::json arr = nlohmann::json::array();
    for (int k = -spec.K; k <= spec.K; ++k)
        arr.push_back({k, spec.at(k).real(), spec.at(k).imag()});
    nlohmann::json j;
    j["K"] = spec.K;
    j["stilde"] = spec.stilde;
    j["coefficients"] = arr;
    open_out(path) << j.dump(2) << '\n';
}

void write_grid2d(const std::filesystem::path& bin_path, const Grid2D& grid,
                  const Eigen::ArrayXXd& field, double time) {
    if (field.rows() != grid.nx || field.cols() != grid.ny)
        throw IoError("write_grid2d: field shape != grid shape");
    nlohmann::json j;
    j["nx"] = grid.nx;
    j["ny"] = grid.ny;
    j["x0"] = grid.x0;
    j["y0"] = grid.y0;
    j["dx"] = grid.dx;
    j["time"] = time;
    j["dtype"] = "float64";
    j["order"] = "row-major";  // x index outer, y index inner
    open_out(sidecar(bin_path)) << j.dump(2) << '\n';

    auto f = open_out(bin_path, true);
    for (int i = 0; i < grid.nx; ++i)
        for (int jj = 0; jj < grid.ny; ++jj) {
            const double v = field(i, jj);
            f.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

Eigen::ArrayXXd read_grid2d(const std::filesystem::path& bin_path,
                            Grid2D& grid) {
    nlohmann::json j;
    open_in(sidecar(bin_path)) >> j;
    grid.nx = j.at("nx").get<int>();
    grid.ny = j.at("ny").get<int>();
    grid.x0 = j.at("x0").get<double>();
    grid.y0 = j.at("y0").get<double>();
    grid.dx = j.at("dx").get<double>();
    Eigen::ArrayXXd field(grid.nx, grid.ny);
    auto f = open_in(bin_path, true);
    for (int i = 0; i < grid.nx; ++i)
        for (int jj = 0; jj < grid.ny; ++jj) {
            double v;
            f.read(reinterpret_cast<char*>(&v), sizeof(double));
            if (!f) throw IoError("read_grid2d: truncated file " + bin_path.string());
            field(i, jj) = v;
        }
    return field;
}

void write_sinogram_csv(const std::filesystem::path& path,
                        const Sinogram& sino) {
    auto f = open_out(path);
    f << "angle,offset,value,valid\n";
    for (Eigen::Index ia = 0; ia < sino.angles.size(); ++ia)
        for (Eigen::Index io = 0; io < sino.offsets.size(); ++io)
            f << sino.angles[ia] << ',' << sino.offsets[io] << ','
              << sino.values(ia, io) << ',' << int(sino.valid(ia, io)) << '\n';
}

Sinogram read_sinogram_csv(const std::filesystem::path& path) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty sinogram file");
    std::vector<double> angles, offsets, values;
    std::vector<int> valid;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double a, o, v;
        int ok = 1;
        char comma;
        if (!(ss >> a >> comma >> o >> comma >> v))
            throw IoError("bad sinogram row: " + line);
        if (ss >> comma) ss >> ok;
        angles.push_back(a);
        offsets.push_back(o);
        values.push_back(v);
        valid.push_back(ok);
    }
    if (angles.empty()) throw IoError("sinogram has no data rows");
    // rows are written angle-major: the offset pattern repeats every n_offsets
    int no = 1;
    while (no < static_cast<int>(offsets.size()) && offsets[no] != offsets[0])
        ++no;
    if (no == 0 || angles.size() % no != 0)
        throw IoError("sinogram rows do not form a rectangular grid");
    const int na = static_cast<int>(angles.size()) / no;
    Sinogram s;
    s.angles.resize(na);
    s.offsets.resize(no);
    s.values.resize(na, no);
    s.valid.resize(na, no);
    for (int ia = 0; ia < na; ++ia) {
        s.angles[ia] = angles[static_cast<size_t>(ia) * no];
        for (int io = 0; io < no; ++io) {
            s.offsets[io] = offsets[io];
            s.values(ia, io) = values[static_cast<size_t>(ia) * no + io];
            s.valid(ia, io) =
                static_cast<std::uint8_t>(valid[static_cast<size_t>(ia) * no + io]);
        }
    }
    return s;
}

void write_sinogram_bin(const std::filesystem::path& bin_path,
                        const Sinogram& sino) {
    nlohmann::json j;
    j["n_angles"] = sino.angles.size();
    j["n_offsets"] = sino.offsets.size();
    j["angle0"] = sino.angles.size() ? sino.angles[0] : 0.0;
    j["angle_spacing"] =
        sino.angles.size() > 1 ? sino.angles[1] - sino.angles[0] : 0.0;
    j["offset0"] = sino.offsets.size() ? sino.offsets[0] : 0.0;
    j["offset_spacing"] = sino.offset_spacing();
    j["dtype"] = "float64";
    j["order"] = "row-major";  // angle outer, offset inner
    open_out(sidecar(bin_path)) << j.dump(2) << '\n';
    auto f = open_out(bin_path, true);
    for (Eigen::Index ia = 0; ia < sino.angles.size(); ++ia)
        for (Eigen::Index io = 0; io < sino.offsets.size(); ++io) {
            const double v = sino.values(ia, io);
            f.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

void write_image(const std::filesystem::path& bin_path,
                 const Eigen::MatrixXd& image, double extent) {
    Grid2D g;
    g.nx = static_cast<int>(image.rows());
    g.ny = static_cast<int>(image.cols());
    g.x0 = -extent;
    g.y0 = -extent;
    g.dx = g.nx > 1 ? 2.0 * extent / (g.nx - 1) : 1.0;
    write_grid2d(bin_path, g, image.array(), 0.0);
}

}  // namespace wv::io
