#ifndef WV_PROFILE_HPP
#define WV_PROFILE_HPP

#include <Eigen/Dense>
#include <limits>

#include "wv/beam.hpp"
#include "wv/errors.hpp"
#include "wv/nonlinearity.hpp"

namespace wv {

/// 2*pi-periodic profile sampled on the uniform grid theta_j = 2*pi*j/N.
struct PhaseProfile {
    Eigen::ArrayXd values;
    double amplitude = std::numeric_limits<double>::quiet_NaN();  // M
    double stilde = std::numeric_limits<double>::quiet_NaN();

    int size() const { return static_cast<int>(values.size()); }
    double theta(int j) const;
    Eigen::ArrayXd theta_grid() const;
    double mean() const { return values.mean(); }
};

/// chi(y) * cos(theta) sampled on an n-point grid.
PhaseProfile cosine_profile(double M, int n);

/// Characteristic fan: seeds q_i carrying constant values u_i, with exit
/// positions q_i + u_i * stilde. Ordering is preserved pre-shock.
struct CharacteristicFan {
    Eigen::ArrayXd seeds;
    Eigen::ArrayXd values;
    Eigen::ArrayXd exits;
    double stilde = 0.0;
};

/// Root of u = M cos(theta - u*stilde), unique for |M*stilde| < 1, found by
/// safeguarded Newton in [-|M|, |M|] with residual < f_tol.
double solve_implicit(double M, double stilde, double theta,
                      double f_tol = 1e-12);

/// Push the initial profile along characteristics: exits = q + u*stilde.
/// Throws ShockError if the exit positions fold.
CharacteristicFan evolve_characteristics(const PhaseProfile& initial,
                                         double stilde);

/// Resample a fan onto the uniform n_theta grid by monotone piecewise-cubic
/// (no overshoot at steep fronts).
PhaseProfile resample(const CharacteristicFan& fan, int n_theta);

/// Evolve the cosine profile with amplitude M along the ray for duration s:
/// accumulates stilde by quadrature, then solves the implicit relation per
/// grid node.
PhaseProfile evolve_profile(const NonlinearityField& alpha, const Ray& ray,
                            double M, double s, int n_theta = 1024);

struct CorrectorOptions {
    int n_theta = 256;
    double dt = 5e-3;       // RK4 step in t
    double fd_step = 1e-3;  // centered-difference step for the wave operator
    double beta1 = 0.0;     // undetermined integration function, held constant
};

struct CorrectorResult {
    PhaseProfile u1;  // second profile term at (T, y + T*omega)
    PhaseProfile u0;  // leading profile at the same point
    double stilde = 0.0;
};

/// Integrate the transport equation for the second profile term along the
/// integral curves of d/dt + omega.grad + alpha*U0*d/dtheta from t0 to T,
/// starting from the linear-optics corrector data. The leading profile enters
/// through the implicit relation; its wave-operator source is formed by
/// centered differences in (t, x).
CorrectorResult solve_corrector(const NonlinearityField& alpha,
                                const BeamEnvelope& chi,
                                const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& ray_base, double t0,
                                double T, const CorrectorOptions& opts = {});

}  // namespace wv

#endif
