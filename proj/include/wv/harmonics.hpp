#ifndef WV_HARMONICS_HPP
#define WV_HARMONICS_HPP

#include <Eigen/Dense>
#include <complex>

#include "wv/errors.hpp"
#include "wv/profile.hpp"

namespace wv {

/// Truncated Fourier coefficients u_k, |k| <= K, of a real profile.
/// Hermitian symmetry u_{-k} = conj(u_k) holds to 1e-10; profiles evolved
/// from pure-cosine data additionally carry u_0 = 0.
struct HarmonicSpectrum {
    int K = 0;
    Eigen::VectorXcd coeffs;  // index k + K
    double stilde = 0.0;

    std::complex<double> at(int k) const { return coeffs[k + K]; }
    std::complex<double>& at(int k) { return coeffs[k + K]; }

    static HarmonicSpectrum zero(int K);
    double hermitian_defect() const;  // max |u_{-k} - conj(u_k)|
    void require_hermitian(double tol = 1e-10) const;
};

/// Integrate the coefficient hierarchy of the profile equation (unit
/// coefficient form) from cosine initial data u_{+-1} = M/2 by RK4 with the
/// convolution truncated to |k1|,|k2| <= K. Throws on detected blow-up.
/// steps <= 0 selects the default resolution of 1000 steps per unit stilde.
HarmonicSpectrum evolve_spectrum(double M, double stilde_final, int K,
                                 int steps = 0);

/// Linearized second-harmonic coefficient: (M^2/2) * xray multiplies
/// sin(2*theta) at leading order in the accumulated nonlinearity.
double second_harmonic_linearized(double M, double xray);

/// Real profile sum u_k e^{ik theta} on the uniform grid. Requires a
/// Hermitian-symmetric spectrum (checked; data error otherwise).
PhaseProfile spectrum_to_profile(const HarmonicSpectrum& spec, int n_theta);

/// Fourier projection of a sampled profile onto |k| <= K.
HarmonicSpectrum profile_to_spectrum(const PhaseProfile& profile, int K);

}  // namespace wv

#endif
