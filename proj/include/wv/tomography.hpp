#ifndef WV_TOMOGRAPHY_HPP
#define WV_TOMOGRAPHY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wv/errors.hpp"
#include "wv/harmonics.hpp"
#include "wv/nonlinearity.hpp"
#include "wv/profile.hpp"

namespace wv {

struct DemodulationResult {
    HarmonicSpectrum spectrum;
    PhaseProfile profile;
    double residual = 0.0;          // rms misfit of p/h over the window
    double condition_number = 0.0;  // of the least-squares design
};

/// Least-squares fit of p/h to sum_{|k|<=K} c_k e^{ik phi/h} over a sampling
/// window along the ray. positions are the ray coordinates x.omega of the
/// samples, taken at time T (phase phi = -T + x.omega).
DemodulationResult demodulate(const Eigen::ArrayXd& positions,
                              const Eigen::ArrayXd& p_values, double T,
                              double h, int K, int n_theta = 1024,
                              double max_condition = 1e8);

struct TiltMeasurement {
    int ray_id = -1;
    double level = 0.0;      // signed level k in profile units
    double shift = 0.0;      // signed theta shift d of the level set
    double recovered = 0.0;  // d / k, the per-ray accumulated nonlinearity
    double residual = 0.0;   // spread across the matched crossings
};

/// Locate the level-k crossings of both profiles between the shared fixed
/// zeros and return the signed shift per level. Levels are absolute values in
/// profile units.
std::vector<TiltMeasurement> measure_tilt(const PhaseProfile& profile,
                                          const PhaseProfile& linear_ref,
                                          const std::vector<double>& levels,
                                          double theta_tol = 1e-9);

/// Default measurement levels {0.3, 0.5, 0.7} * M, signed pairs added by
/// measure_tilt callers.
std::vector<double> default_levels(double M);

struct AcquisitionGeometry {
    int n_angles = 60;
    int n_offsets = 64;
    double offset_max = 0.9;  // offsets uniform in [-offset_max, offset_max]
    bool full_turn = false;   // angles in [0, 2 pi) instead of [0, pi)
};

struct Sinogram {
    Eigen::VectorXd angles;
    Eigen::VectorXd offsets;
    Eigen::MatrixXd values;  // n_angles x n_offsets
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> valid;
    std::vector<std::string> failures;

    double offset_spacing() const {
        return offsets.size() > 1 ? offsets[1] - offsets[0] : 1.0;
    }
    /// Zeroth moment over offset per angle (mass of the transform).
    Eigen::VectorXd moments() const;
};

/// Ground-truth sinogram by quadrature along each acquisition ray.
Sinogram assemble_sinogram_exact(const NonlinearityField& alpha,
                                 const AcquisitionGeometry& geom);

struct ProfileAcquisitionOptions {
    double amplitude = 1.0;
    int n_theta = 4096;
    std::vector<double> level_fractions = {0.3, 0.5, 0.7};
    double theta_tol = 1e-10;
};

/// Per ray: evolve the cosine profile through the field, measure the tilt
/// against the linear reference, average the recovered integral over the
/// levels. Per-ray failures are masked, recorded and non-fatal.
Sinogram assemble_sinogram_profile(const NonlinearityField& alpha,
                                   const AcquisitionGeometry& geom,
                                   const ProfileAcquisitionOptions& opts = {});

struct FbpOptions {
    int image_size = 128;
    double extent = 0.0;   // image half-width; 0 selects the offset range
    double cutoff = 1.0;   // ramp cutoff as a fraction of Nyquist
    bool hann = true;      // Hann apodization of the ramp
};

/// Filtered backprojection for a parallel-beam sinogram with uniform angles
/// and offsets. Returns an image_size^2 map on [-extent, extent]^2
/// (row index = x, column index = y).
Eigen::MatrixXd reconstruct_fbp(const Sinogram& sino, const FbpOptions& opts);

struct RidgeOptions {
    int image_size = 64;
    double extent = 0.0;
    double lambda = 1e-3;
    double tol = 1e-10;
    int max_iters = 2000;
};

/// Ridge-regularized least squares on a pixel basis; intended for few-angle
/// acquisitions where FBP streaks dominate.
Eigen::MatrixXd reconstruct_ridge(const Sinogram& sino, const RidgeOptions& opts);

/// Stack of independent 2D reconstructions (slice-by-slice reduction of a 3D
/// acquisition). Experimental.
std::vector<Eigen::MatrixXd> reconstruct_slices(
    const std::vector<Sinogram>& slices, const FbpOptions& opts);

struct ReconstructionErrorReport {
    double rmse = 0.0;
    double max_abs = 0.0;
    double truth_peak = 0.0;
    double rmse_over_peak = 0.0;
};

ReconstructionErrorReport reconstruction_error(const Eigen::MatrixXd& image,
                                               double extent,
                                               const NonlinearityField& truth);

struct SecondHarmonicEstimate {
    double xray = 0.0;          // linearized estimate of the ray integral
    bool linear_regime = true;  // false when quadratic corrections matter
};

/// Linearized inversion of the second harmonic: the sin(2 theta) coefficient
/// equals (M^2/2) * integral at leading order.
SecondHarmonicEstimate xray_from_second_harmonic(const HarmonicSpectrum& spec,
                                                 double M);

}  // namespace wv

#endif
