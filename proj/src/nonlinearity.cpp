#include "wv/nonlinearity.hpp"

#include <cmath>
#include <vector>

#include "wv/quadrature.hpp"
#include "wv/roots.hpp"

namespace wv {

namespace {

constexpr double kSupportLevel = 1e-12;

void check_dim(int dim) {
    if (dim < 1 || dim > 3)
        throw ConfigError("NonlinearityField: dimension must be 1, 2 or 3");
}

Eigen::VectorXd resolve_center(int dim, const Eigen::VectorXd& center) {
    if (center.size() == 0) return Eigen::VectorXd::Zero(dim);
    if (center.size() != dim)
        throw ConfigError("field center has wrong dimension");
    return center;
}

// Catmull-Rom weights at fractional offset u in [0,1) for samples -1,0,1,2.
inline void cubic_weights(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = -0.5 * u3 + u2 - 0.5 * u;
    w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
    w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
    w[3] = 0.5 * u3 - 0.5 * u2;
}

}  // namespace

NonlinearityField::NonlinearityField(int dim, Evaluator eval,
                                     double support_radius, std::string tag,
                                     std::function<double(double)> radius_at_level)
    : dim_(dim),
      eval_(std::move(eval)),
      support_radius_(support_radius),
      tag_(std::move(tag)),
      radius_at_level_(std::move(radius_at_level)) {
    check_dim(dim);
    if (!(support_radius > 0) && support_radius != 0)
        throw ConfigError("NonlinearityField: support radius must be >= 0");
}

double NonlinearityField::radius_at_level(double level) const {
    if (radius_at_level_) return radius_at_level_(level);
    return support_radius_;
}

NonlinearityField NonlinearityField::zero(int dim) {
    return NonlinearityField(
        dim, [](const Eigen::VectorXd&) { return 0.0; }, 0.0, "zero",
        [](double) { return 0.0; });
}

NonlinearityField NonlinearityField::constant(int dim, double value) {
    return NonlinearityField(
        dim, [value](const Eigen::VectorXd&) { return value; },
        std::numeric_limits<double>::infinity(), "constant");
}

NonlinearityField NonlinearityField::gaussian(int dim, double amplitude,
                                              double width,
                                              Eigen::VectorXd center) {
    if (!(width > 0)) throw ConfigError("gaussian field: width must be > 0");
    const Eigen::VectorXd c = resolve_center(dim, center);
    auto radius = [amplitude, width, cnorm = c.norm()](double level) {
        const double a = std::abs(amplitude);
        if (a <= level) return 0.0;
        return cnorm + width * std::sqrt(2.0 * std::log(a / level));
    };
    return NonlinearityField(
        dim,
        [amplitude, width, c](const Eigen::VectorXd& x) {
            return amplitude * std::exp(-(x - c).squaredNorm() / (2 * width * width));
        },
        radius(kSupportLevel), "gaussian", radius);
}

NonlinearityField NonlinearityField::gaussian_anisotropic(
    Eigen::VectorXd widths, double amplitude, Eigen::VectorXd center) {
    const int dim = static_cast<int>(widths.size());
    check_dim(dim);
    if ((widths.array() <= 0).any())
        throw ConfigError("gaussian field: widths must be > 0");
    const Eigen::VectorXd c = resolve_center(dim, center);
    const double wmax = widths.maxCoeff();
    auto radius = [amplitude, wmax, cnorm = c.norm()](double level) {
        const double a = std::abs(amplitude);
        if (a <= level) return 0.0;
        return cnorm + wmax * std::sqrt(2.0 * std::log(a / level));
    };
    return NonlinearityField(
        dim,
        [amplitude, widths, c](const Eigen::VectorXd& x) {
            const Eigen::ArrayXd z = (x - c).array() / widths.array();
            return amplitude * std::exp(-0.5 * z.square().sum());
        },
        radius(kSupportLevel), "gaussian-anisotropic", radius);
}

NonlinearityField NonlinearityField::disk(int dim, double amplitude,
                                          double radius,
                                          Eigen::VectorXd center) {
    if (!(radius > 0)) throw ConfigError("disk field: radius must be > 0");
    const Eigen::VectorXd c = resolve_center(dim, center);
    const double R = c.norm() + radius;
    return NonlinearityField(
        dim,
        [amplitude, radius, c](const Eigen::VectorXd& x) {
            return (x - c).norm() <= radius ? amplitude : 0.0;
        },
        R, "disk", [R](double) { return R; });
}

NonlinearityField NonlinearityField::from_grid(Eigen::VectorXd origin,
                                               Eigen::VectorXd spacing,
                                               std::vector<int> shape,
                                               Eigen::VectorXd values) {
    const int dim = static_cast<int>(shape.size());
    check_dim(dim);
    if (origin.size() != dim || spacing.size() != dim)
        throw ConfigError("grid field: origin/spacing dimension mismatch");
    if ((spacing.array() <= 0).any())
        throw ConfigError("grid field: spacing must be > 0");
    long total = 1;
    for (int s : shape) {
        if (s < 4) throw ConfigError("grid field: need >= 4 samples per axis");
        total *= s;
    }
    if (values.size() != total)
        throw ConfigError("grid field: value count does not match shape");

    // Support ball: everything outside the sampled box evaluates to zero.
    double R = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
        Eigen::VectorXd p(dim);
        for (int a = 0; a < dim; ++a)
            p[a] = origin[a] + ((corner >> a) & 1 ? (shape[a] - 1) * spacing[a] : 0.0);
        R = std::max(R, p.norm());
    }

    auto eval = [origin, spacing, shape, values,
                 dim](const Eigen::VectorXd& x) -> double {
        int base[3];
        double w[3][4];
        for (int a = 0; a < dim; ++a) {
            const double t = (x[a] - origin[a]) / spacing[a];
            if (t < 0.0 || t > shape[a] - 1) return 0.0;
            int i = static_cast<int>(std::floor(t));
            i = std::min(std::max(i, 1), shape[a] - 3);
            cubic_weights(t - i, w[a]);
            base[a] = i;
        }
        // row-major: last axis fastest
        long stride[3] = {1, 1, 1};
        for (int a = dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * shape[a + 1];
        double acc = 0.0;
        const int n0 = (dim > 0) ? 4 : 1, n1 = (dim > 1) ? 4 : 1,
                  n2 = (dim > 2) ? 4 : 1;
        for (int i0 = 0; i0 < n0; ++i0)
            for (int i1 = 0; i1 < n1; ++i1)
                for (int i2 = 0; i2 < n2; ++i2) {
                    long idx = (base[0] - 1 + i0) * stride[0];
                    double wt = w[0][i0];
                    if (dim > 1) {
                        idx += (base[1] - 1 + i1) * stride[1];
                        wt *= w[1][i1];
                    }
                    if (dim > 2) {
                        idx += (base[2] - 1 + i2) * stride[2];
                        wt *= w[2][i2];
                    }
                    acc += wt * values[idx];
                }
        return acc;
    };
    return NonlinearityField(dim, eval, R, "grid", [R](double) { return R; });
}

double line_integral(const NonlinearityField& alpha, const Ray& ray, double s0,
                     double s1, double abs_tol) {
    if (alpha.dimension() != ray.dimension())
        throw ConfigError("line_integral: field/ray dimension mismatch");
    if (!(s0 <= s1)) throw EvaluationError("line_integral: requires s0 <= s1");
    auto f = [&](double s) { return alpha(ray.point_at(s)); };
    // Restrict to the chord through the support ball; the integrand vanishes
    // (to below tolerance) outside it.
    if (alpha.bounded_support()) {
        const double R = alpha.radius_at_level(1e-16);
        if (R == 0.0) return 0.0;
        const double sc = -ray.base.dot(ray.direction);
        const double d2 = (ray.base + sc * ray.direction).squaredNorm();
        if (d2 >= R * R) return 0.0;
        const double L = std::sqrt(R * R - d2);
        const double lo = std::max(s0, sc - L);
        const double hi = std::min(s1, sc + L);
        if (lo >= hi) return 0.0;
        return integrate(f, lo, hi, abs_tol);
    }
    return integrate(f, s0, s1, abs_tol);
}

double full_line_integral(const NonlinearityField& alpha, const Ray& ray,
                          double abs_tol) {
    if (!alpha.bounded_support())
        throw EvaluationError("full_line_integral: field has unbounded support");
    const double R = alpha.radius_at_level(1e-16);
    const double sc = -ray.base.dot(ray.direction);
    return line_integral(alpha, ray, sc - R - 1.0, sc + R + 1.0, abs_tol);
}

double first_shock_time(const NonlinearityField& alpha, const Ray& ray,
                        double M) {
    if (!(M > 0))
        throw ConfigError("first_shock_time: amplitude M must be positive");
    const double target = 1.0 / M;
    const double inf = std::numeric_limits<double>::infinity();

    // Horizon past which the accumulated integral stays constant.
    double s_end;
    if (alpha.bounded_support()) {
        const double R = alpha.radius_at_level(1e-16);
        const double sc = -ray.base.dot(ray.direction);
        const double d2 = (ray.base + sc * ray.direction).squaredNorm();
        if (d2 >= R * R) return inf;
        s_end = sc + std::sqrt(R * R - d2);
        if (s_end <= 0.0) return inf;
    } else {
        s_end = 1.0;
        double acc = line_integral(alpha, ray, 0.0, s_end, 1e-12);
        while (acc < target && s_end < 1e9) {
            acc += line_integral(alpha, ray, s_end, 2.0 * s_end, 1e-12);
            s_end *= 2.0;
        }
        if (acc < target) return inf;
    }

    const int n_scan = 512;
    const double ds = s_end / n_scan;
    double acc = 0.0;
    for (int k = 0; k < n_scan; ++k) {
        const double a = k * ds, b = (k + 1) * ds;
        const double inc = line_integral(alpha, ray, a, b, 1e-13);
        if (acc + inc >= target) {
            const double acc0 = acc;
            auto g = [&](double s) {
                return acc0 + line_integral(alpha, ray, a, s, 1e-13) - target;
            };
            if (g(a) >= 0.0) return a;
            return bisect(g, a, b, 1e-12 * (1.0 + s_end));
        }
        acc += inc;
    }
    return inf;
}

NoShockReport no_shock_condition(const NonlinearityField& alpha, double chi_max,
                                 const NoShockOptions& opts) {
    if (chi_max < 0)
        throw ConfigError("no_shock_condition: chi_max must be >= 0");
    const int n = alpha.dimension();
    Eigen::VectorXd omega = opts.omega;
    if (omega.size() == 0) {
        omega = Eigen::VectorXd::Zero(n);
        omega[n - 1] = 1.0;
    }
    if (omega.size() != n)
        throw ConfigError("no_shock_condition: omega dimension mismatch");
    omega.normalize();
    if (!alpha.bounded_support())
        throw EvaluationError("no_shock_condition: field has unbounded support");

    double max_int = 0.0;
    const double R = alpha.support_radius();
    if (n == 1 || R == 0.0) {
        max_int = std::abs(full_line_integral(alpha, Ray(Eigen::VectorXd::Zero(n), omega)));
    } else {
        // orthonormal transverse frame
        std::vector<Eigen::VectorXd> frame;
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) -
                            omega * omega.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullU);
        for (int k = 0; k < n - 1; ++k) frame.push_back(svd.matrixU().col(k));

        int per_axis = opts.offsets_per_axis;
        if (n == 3 && per_axis > 51 && opts.offsets_per_axis == 401) per_axis = 51;
        const int m = per_axis;
        auto offset = [&](int i) { return -R + 2.0 * R * i / (m - 1); };
        if (n == 2) {
            for (int i = 0; i < m; ++i) {
                const Eigen::VectorXd y = offset(i) * frame[0];
                max_int = std::max(
                    max_int, std::abs(full_line_integral(alpha, Ray(y, omega))));
            }
        } else {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const Eigen::VectorXd y =
                        offset(i) * frame[0] + offset(j) * frame[1];
                    max_int = std::max(
                        max_int,
                        std::abs(full_line_integral(alpha, Ray(y, omega))));
                }
        }
    }
    const double lhs = chi_max * max_int;
    return {lhs < 1.0, lhs, max_int};
}

NonlinearityField apply_motion(const NonlinearityField& alpha,
                               const RigidMotion& eta) {
    const int n = alpha.dimension();
    if (eta.rotation.rows() != n)
        throw ConfigError("apply_motion: motion dimension mismatch");
    Eigen::VectorXd embedded = Eigen::VectorXd::Zero(n);
    embedded.head(n - 1) = eta.shift;
    const Eigen::MatrixXd B = eta.rotation;
    const double shift_norm = embedded.norm();
    auto base_radius = [&alpha](double level) { return alpha.radius_at_level(level); };
    auto eval = [alpha, B, embedded](const Eigen::VectorXd& x) {
        return alpha(B * (x + embedded));
    };
    return NonlinearityField(
        n, eval, alpha.support_radius() + shift_norm,
        alpha.tag() + "+motion",
        [base_radius, shift_norm](double level) {
            return base_radius(level) + shift_norm;
        });
}

}  // namespace wv
