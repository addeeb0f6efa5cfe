#ifndef WV_BEAM_HPP
#define WV_BEAM_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <utility>

#include "wv/errors.hpp"
#include "wv/nonlinearity.hpp"

namespace wv {

/// Smooth compactly supported beam envelope chi. Named profiles (gaussian,
/// bump, plateau_bump) carry closed-form first and second derivatives; custom
/// evaluators fall back to 4th-order centered differences.
class BeamEnvelope {
public:
    using Evaluator = std::function<double(const Eigen::VectorXd&)>;

    static BeamEnvelope gaussian(int dim, double amplitude, double width,
                                 Eigen::VectorXd center);
    /// Radial C-infinity bump exp(1 - 1/(1-u^2)), u = |x-c|/radius; exactly
    /// zero outside the ball.
    static BeamEnvelope bump(int dim, double amplitude, double radius,
                             Eigen::VectorXd center);
    /// Radial flat-top profile: constant amplitude for |x-c| <= flat_radius,
    /// C-infinity skirt to zero at skirt_radius.
    static BeamEnvelope plateau(int dim, double amplitude,
                                Eigen::VectorXd center, double flat_radius,
                                double skirt_radius);
    /// Separable beam (dim >= 2): flat transverse plateau times a flat-top
    /// longitudinal window along the last axis.
    static BeamEnvelope beam(int dim, double amplitude, Eigen::VectorXd center,
                             double flat_transverse, double skirt_transverse,
                             double flat_longitudinal,
                             double skirt_longitudinal);
    static BeamEnvelope custom(int dim, Evaluator f, double chi_max,
                               Eigen::VectorXd support_center,
                               double support_radius);

    double operator()(const Eigen::VectorXd& x) const { return eval_(x); }
    int dimension() const { return dim_; }
    double chi_max() const { return chi_max_; }
    const Eigen::VectorXd& support_center() const { return support_center_; }
    double support_radius() const { return support_radius_; }
    /// Axis-aligned bounding box half-widths of the support around its center.
    const Eigen::VectorXd& support_box_halfwidths() const { return box_; }
    const std::string& tag() const { return tag_; }
    bool has_closed_form() const { return static_cast<bool>(second_derivative_); }

    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    /// d^2/ds^2 chi(x + s*dir) at s=0; dir need not be unit.
    double second_derivative(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& dir) const;
    double laplacian(const Eigen::VectorXd& x) const;
    /// Laplacian restricted to the hyperplane orthogonal to unit omega.
    double transverse_laplacian(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& omega) const;

private:
    BeamEnvelope() = default;

    int dim_ = 0;
    Evaluator eval_;
    double chi_max_ = 0.0;
    Eigen::VectorXd support_center_;
    double support_radius_ = 0.0;
    Eigen::VectorXd box_;
    std::string tag_;
    // closed forms when available
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient_;
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        second_derivative_;
};

/// Leading amplitudes of the two-phase linear expansion:
/// (chi(x - t*omega), chi(x + t*omega)).
std::pair<double, double> leading_amplitudes(const BeamEnvelope& chi,
                                             const Eigen::VectorXd& omega,
                                             double t, const Eigen::VectorXd& x);

/// First corrector of the forward wave: (i t / 2) * transverse Laplacian of
/// chi at the retarded point x - t*omega. Pure imaginary for real chi.
std::complex<double> first_corrector(const BeamEnvelope& chi,
                                     const Eigen::VectorXd& omega, double t,
                                     const Eigen::VectorXd& x);

/// Two-term forward amplitude a0 + h*a1 at (t, x).
std::complex<double> two_term_amplitude(const BeamEnvelope& chi,
                                        const Eigen::VectorXd& omega, double h,
                                        double t, const Eigen::VectorXd& x);

/// Forward-packet handoff field p = Re(e^{i phi/h} h (a0 + h a1)),
/// phi = -t + x.omega, and its exact time derivative q.
double handoff_p(const BeamEnvelope& chi, const Eigen::VectorXd& omega, double h,
                 double t, const Eigen::VectorXd& x);
double handoff_q(const BeamEnvelope& chi, const Eigen::VectorXd& omega, double h,
                 double t, const Eigen::VectorXd& x);

/// Distance between the envelope support box, advanced by shift, and the ball
/// where |alpha| >= level (negative when they overlap).
double support_gap(const BeamEnvelope& chi, const NonlinearityField& alpha,
                   const Eigen::VectorXd& shift, double level = 1e-2);

/// Throws GeometryError unless the envelope support, advanced to time t0,
/// still has positive distance to the ball where |alpha| >= level.
void check_handoff_geometry(const BeamEnvelope& chi,
                            const NonlinearityField& alpha,
                            const Eigen::VectorXd& omega, double t0,
                            double level = 1e-2);

/// Default handoff time: half the gap between the envelope support and the
/// level set of alpha, at unit propagation speed.
double default_handoff_time(const BeamEnvelope& chi,
                            const NonlinearityField& alpha,
                            const Eigen::VectorXd& omega, double level = 1e-2);

}  // namespace wv

#endif
