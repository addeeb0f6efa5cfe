#ifndef WV_IO_HPP
#define WV_IO_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "wv/fdtd.hpp"
#include "wv/harmonics.hpp"
#include "wv/profile.hpp"
#include "wv/tomography.hpp"

namespace wv::io {

/// Column-oriented CSV with one header row. Columns must share a length.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<Eigen::ArrayXd>& columns);

void write_profile_csv(const std::filesystem::path& path,
                       const PhaseProfile& profile);
void write_profile_json(const std::filesystem::path& path,
                        const PhaseProfile& profile,
                        const std::string& ray_description = "");

void write_spectrum_json(const std::filesystem::path& path,
                         const HarmonicSpectrum& spec);

/// Row-major float64 grid with a JSON sidecar header (same basename, .json).
void write_grid2d(const std::filesystem::path& bin_path, const Grid2D& grid,
                  const Eigen::ArrayXXd& field, double time);
Eigen::ArrayXXd read_grid2d(const std::filesystem::path& bin_path, Grid2D& grid);

void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& sino);
Sinogram read_sinogram_csv(const std::filesystem::path& path);
void write_sinogram_bin(const std::filesystem::path& bin_path,
                        const Sinogram& sino);

/// Square image on [-extent, extent]^2 written like a 2D field snapshot.
void write_image(const std::filesystem::path& bin_path,
                 const Eigen::MatrixXd& image, double extent);

}  // namespace wv::io

#endif
