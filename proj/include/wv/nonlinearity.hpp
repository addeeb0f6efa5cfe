#ifndef WV_NONLINEARITY_HPP
#define WV_NONLINEARITY_HPP

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "wv/errors.hpp"

namespace wv {

/// Straight ray y + s*omega. Direction must be unit to within 1e-12.
struct Ray {
    Eigen::VectorXd base;
    Eigen::VectorXd direction;
    double amplitude = std::numeric_limits<double>::quiet_NaN();

    Ray(Eigen::VectorXd y, Eigen::VectorXd omega)
        : base(std::move(y)), direction(std::move(omega)) {
        if (base.size() != direction.size())
            throw ConfigError("Ray: base/direction dimension mismatch");
        if (std::abs(direction.norm() - 1.0) > 1e-12)
            throw ConfigError("Ray: direction is not unit length");
    }

    Eigen::VectorXd point_at(double s) const { return base + s * direction; }
    int dimension() const { return static_cast<int>(base.size()); }
};

/// Shift by (y',0) followed by a rotation: x -> B(x + (y',0)).
struct RigidMotion {
    Eigen::VectorXd shift;     // length n-1
    Eigen::MatrixXd rotation;  // n x n, orthogonal, det +1

    RigidMotion(Eigen::VectorXd yprime, Eigen::MatrixXd B)
        : shift(std::move(yprime)), rotation(std::move(B)) {
        const auto n = rotation.rows();
        if (rotation.cols() != n)
            throw ConfigError("RigidMotion: rotation must be square");
        if (shift.size() != n - 1)
            throw ConfigError("RigidMotion: shift must have dimension n-1");
        const Eigen::MatrixXd gram = rotation.transpose() * rotation;
        if ((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
            throw ConfigError("RigidMotion: rotation is not orthogonal");
        if (std::abs(rotation.determinant() - 1.0) > 1e-9)
            throw ConfigError("RigidMotion: rotation must have det +1");
    }

    static RigidMotion identity(int n) {
        return RigidMotion(Eigen::VectorXd::Zero(n - 1),
                           Eigen::MatrixXd::Identity(n, n));
    }

    /// 2D rotation by angle (radians), no shift.
    static RigidMotion planar_rotation(double angle) {
        Eigen::MatrixXd B(2, 2);
        B << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        return RigidMotion(Eigen::VectorXd::Zero(1), B);
    }
};

/// Scalar coefficient field on R^n, n in {1,2,3}. Evaluable anywhere;
/// |alpha| < 1e-12 outside the ball of radius support_radius() (exactly zero
/// for grid-sampled and compactly supported closed forms).
class NonlinearityField {
public:
    using Evaluator = std::function<double(const Eigen::VectorXd&)>;

    NonlinearityField(int dim, Evaluator eval, double support_radius,
                      std::string tag = "custom",
                      std::function<double(double)> radius_at_level = {});

    static NonlinearityField zero(int dim);
    static NonlinearityField constant(int dim, double value);  // unbounded support
    static NonlinearityField gaussian(int dim, double amplitude, double width,
                                      Eigen::VectorXd center = Eigen::VectorXd());
    static NonlinearityField gaussian_anisotropic(Eigen::VectorXd widths,
                                                  double amplitude,
                                                  Eigen::VectorXd center);
    static NonlinearityField disk(int dim, double amplitude, double radius,
                                  Eigen::VectorXd center = Eigen::VectorXd());
    /// Row-major sampled grid with separable Catmull-Rom (cubic) interpolation;
    /// zero outside the sampled box.
    static NonlinearityField from_grid(Eigen::VectorXd origin,
                                       Eigen::VectorXd spacing,
                                       std::vector<int> shape,
                                       Eigen::VectorXd values);

    double operator()(const Eigen::VectorXd& x) const { return eval_(x); }
    int dimension() const { return dim_; }
    /// Radius of the declared support ball (|alpha| < 1e-12 outside). May be +inf.
    double support_radius() const { return support_radius_; }
    /// Radius outside which |alpha| stays below `level`. Exact for closed
    /// forms; falls back to support_radius() otherwise.
    double radius_at_level(double level) const;
    const std::string& tag() const { return tag_; }
    bool bounded_support() const { return std::isfinite(support_radius_); }

private:
    int dim_;
    Evaluator eval_;
    double support_radius_;
    std::string tag_;
    std::function<double(double)> radius_at_level_;
};

/// Integral of alpha along ray.base + s*ray.direction for s in [s0, s1],
/// by adaptive Gauss-Kronrod quadrature with absolute tolerance abs_tol.
double line_integral(const NonlinearityField& alpha, const Ray& ray, double s0,
                     double s1, double abs_tol = 1e-10);

/// Integral over the whole line (requires bounded support).
double full_line_integral(const NonlinearityField& alpha, const Ray& ray,
                          double abs_tol = 1e-10);

/// Smallest s >= 0 with int_0^s alpha(ray(sigma)) dsigma = 1/M, or +inf if the
/// accumulated integral never reaches 1/M. M must be positive.
double first_shock_time(const NonlinearityField& alpha, const Ray& ray, double M);

struct NoShockReport {
    bool no_shock;        // lhs < 1
    double lhs;           // chi_max * max ray integral
    double max_integral;  // max over the sampled ray family
};

struct NoShockOptions {
    int offsets_per_axis = 401;  // reduced to 51 by default in 3D
    Eigen::VectorXd omega;       // probe direction; default e_n
};

/// Discretized version of the no-shock condition: max over a grid of rays
/// parallel to omega of the full line integral, times chi_max.
NoShockReport no_shock_condition(const NonlinearityField& alpha, double chi_max,
                                 const NoShockOptions& opts = {});

/// alpha_eta(x) = alpha(B(x + (y',0))). Support radius grows by |y'|.
NonlinearityField apply_motion(const NonlinearityField& alpha,
                               const RigidMotion& eta);

}  // namespace wv

#endif
