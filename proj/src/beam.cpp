#include "wv/beam.hpp"

#include <cmath>

namespace wv {

namespace {

// C-infinity bump profile on (-1,1): psi(u) = exp(1 - 1/(1-u^2)), psi(0)=1.
struct BumpProfile {
    static double value(double u) {
        const double u2 = u * u;
        if (u2 >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u2));
    }
    static double d1(double u) {
        const double u2 = u * u;
        if (u2 >= 1.0) return 0.0;
        const double g = 1.0 - u2;
        return value(u) * (-2.0 * u / (g * g));
    }
    static double d2(double u) {
        const double u2 = u * u;
        if (u2 >= 1.0) return 0.0;
        const double g = 1.0 - u2;
        const double g2 = g * g;
        return value(u) * (4.0 * u2 / (g2 * g2) - 2.0 / g2 - 8.0 * u2 / (g2 * g));
    }
};

// Smooth step S: [0,1] -> [1,0] with all derivatives vanishing at both ends.
// S(u) = e(1-u) / (e(1-u) + e(u)), e(v) = exp(-1/v).
struct SmoothStep {
    static double e(double v) { return v > 0 ? std::exp(-1.0 / v) : 0.0; }
    static double e1(double v) { return v > 0 ? e(v) / (v * v) : 0.0; }
    static double e2(double v) {
        if (v <= 0) return 0.0;
        return e(v) * (1.0 / (v * v * v * v) - 2.0 / (v * v * v));
    }
    static void eval(double u, double& s, double& s1, double& s2) {
        if (u <= 0.0) {
            s = 1.0;
            s1 = s2 = 0.0;
            return;
        }
        if (u >= 1.0) {
            s = s1 = s2 = 0.0;
            return;
        }
        const double A = e(1.0 - u), B = e(u);
        const double A1 = -e1(1.0 - u), B1 = e1(u);
        const double A2 = e2(1.0 - u), B2 = e2(u);
        const double D = A + B;
        const double N = A1 * B - A * B1;
        s = A / D;
        s1 = N / (D * D);
        s2 = ((A2 * B - A * B2) * D - 2.0 * N * (A1 + B1)) / (D * D * D);
    }
};

// Directional second derivative of a radial profile g(|x - c|).
double radial_second_derivative(const Eigen::VectorXd& r, double g1, double g2,
                                const Eigen::VectorXd& dir) {
    const double rho = r.norm();
    if (rho < 1e-14) return g2 * dir.squaredNorm();  // g1/rho -> g2 at center
    const double along = r.dot(dir) / rho;
    return g2 * along * along + g1 * (dir.squaredNorm() - along * along) / rho;
}

Eigen::VectorXd fd_gradient(const BeamEnvelope::Evaluator& f,
                            const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd p = x;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        const double x0 = x[a];
        p[a] = x0 + step;
        const double f1 = f(p);
        p[a] = x0 - step;
        const double fm1 = f(p);
        p[a] = x0 + 2 * step;
        const double f2 = f(p);
        p[a] = x0 - 2 * step;
        const double fm2 = f(p);
        p[a] = x0;
        g[a] = (8.0 * (f1 - fm1) - (f2 - fm2)) / (12.0 * step);
    }
    return g;
}

// 4th-order centered second derivative along dir.
double fd_second_derivative(const BeamEnvelope::Evaluator& f,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
                            double step) {
    auto v = [&](double s) { return f(x + s * dir); };
    return (-v(2 * step) + 16 * v(step) - 30 * v(0) + 16 * v(-step) -
            v(-2 * step)) /
           (12.0 * step * step);
}

constexpr double kFdStep = 1e-3;

}  // namespace

BeamEnvelope BeamEnvelope::gaussian(int dim, double amplitude, double width,
                                    Eigen::VectorXd center) {
    if (!(width > 0)) throw ConfigError("envelope gaussian: width must be > 0");
    if (center.size() != dim) throw ConfigError("envelope: bad center dimension");
    BeamEnvelope env;
    env.dim_ = dim;
    env.chi_max_ = std::abs(amplitude);
    env.support_center_ = center;
    // declared support: |chi| < 1e-12 outside
    env.support_radius_ =
        width * std::sqrt(2.0 * std::log(std::max(std::abs(amplitude), 1e-11) / 1e-12));
    env.box_ = Eigen::VectorXd::Constant(dim, env.support_radius_);
    env.tag_ = "gaussian";
    env.eval_ = [amplitude, width, center](const Eigen::VectorXd& x) {
        return amplitude *
               std::exp(-(x - center).squaredNorm() / (2 * width * width));
    };
    const double w2 = width * width;
    env.gradient_ = [env_eval = env.eval_, center, w2](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(-(x - center) * env_eval(x) / w2);
    };
    env.second_derivative_ = [env_eval = env.eval_, center, w2](
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& d) {
        const double along = (x - center).dot(d);
        return env_eval(x) * (along * along / (w2 * w2) - d.squaredNorm() / w2);
    };
    return env;
}

BeamEnvelope BeamEnvelope::bump(int dim, double amplitude, double radius,
                                Eigen::VectorXd center) {
    if (!(radius > 0)) throw ConfigError("envelope bump: radius must be > 0");
    if (center.size() != dim) throw ConfigError("envelope: bad center dimension");
    BeamEnvelope env;
    env.dim_ = dim;
    env.chi_max_ = std::abs(amplitude);
    env.support_center_ = center;
    env.support_radius_ = radius;
    env.box_ = Eigen::VectorXd::Constant(dim, radius);
    env.tag_ = "bump";
    env.eval_ = [amplitude, radius, center](const Eigen::VectorXd& x) {
        return amplitude * BumpProfile::value((x - center).norm() / radius);
    };
    env.gradient_ = [amplitude, radius, center](const Eigen::VectorXd& x) {
        const Eigen::VectorXd r = x - center;
        const double rho = r.norm();
        if (rho < 1e-14) return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
        const double g1 = amplitude * BumpProfile::d1(rho / radius) / radius;
        return Eigen::VectorXd(g1 * r / rho);
    };
    env.second_derivative_ = [amplitude, radius, center](
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& d) {
        const Eigen::VectorXd r = x - center;
        const double u = r.norm() / radius;
        const double g1 = amplitude * BumpProfile::d1(u) / radius;
        const double g2 = amplitude * BumpProfile::d2(u) / (radius * radius);
        return radial_second_derivative(r, g1, g2, d);
    };
    return env;
}

BeamEnvelope BeamEnvelope::plateau(int dim, double amplitude,
                                   Eigen::VectorXd center, double flat_radius,
                                   double skirt_radius) {
    if (!(skirt_radius > flat_radius) || !(flat_radius >= 0))
        throw ConfigError("plateau: requires 0 <= flat_radius < skirt_radius");
    if (center.size() != dim) throw ConfigError("envelope: bad center dimension");
    BeamEnvelope env;
    env.dim_ = dim;
    env.chi_max_ = std::abs(amplitude);
    env.support_center_ = center;
    env.support_radius_ = skirt_radius;
    env.box_ = Eigen::VectorXd::Constant(dim, skirt_radius);
    env.tag_ = "plateau";
    const double a = flat_radius, span = skirt_radius - flat_radius;
    env.eval_ = [amplitude, a, span, center](const Eigen::VectorXd& x) {
        double s, s1, s2;
        SmoothStep::eval(((x - center).norm() - a) / span, s, s1, s2);
        return amplitude * s;
    };
    env.gradient_ = [amplitude, a, span, center](const Eigen::VectorXd& x) {
        const Eigen::VectorXd r = x - center;
        const double rho = r.norm();
        if (rho < 1e-14) return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
        double s, s1, s2;
        SmoothStep::eval((rho - a) / span, s, s1, s2);
        return Eigen::VectorXd(amplitude * s1 / span * r / rho);
    };
    env.second_derivative_ = [amplitude, a, span, center](
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& d) {
        const Eigen::VectorXd r = x - center;
        double s, s1, s2;
        SmoothStep::eval((r.norm() - a) / span, s, s1, s2);
        return radial_second_derivative(r, amplitude * s1 / span,
                                        amplitude * s2 / (span * span), d);
    };
    return env;
}

BeamEnvelope BeamEnvelope::beam(int dim, double amplitude,
                                Eigen::VectorXd center, double flat_transverse,
                                double skirt_transverse,
                                double flat_longitudinal,
                                double skirt_longitudinal) {
    if (dim < 2) throw ConfigError("beam: needs dim >= 2");
    if (!(skirt_transverse > flat_transverse) || !(flat_transverse >= 0) ||
        !(skirt_longitudinal > flat_longitudinal) || !(flat_longitudinal >= 0))
        throw ConfigError("beam: invalid radii");
    if (center.size() != dim) throw ConfigError("envelope: bad center dimension");
    BeamEnvelope env;
    env.dim_ = dim;
    env.chi_max_ = std::abs(amplitude);
    env.support_center_ = center;
    env.support_radius_ = std::sqrt(skirt_transverse * skirt_transverse +
                                    skirt_longitudinal * skirt_longitudinal);
    env.box_ = Eigen::VectorXd::Constant(dim, skirt_transverse);
    env.box_[dim - 1] = skirt_longitudinal;
    env.tag_ = "beam";
    const double at = flat_transverse, st = skirt_transverse - flat_transverse;
    const double al = flat_longitudinal,
                 sl = skirt_longitudinal - flat_longitudinal;
    const int nl = dim - 1;  // transverse components are x[0..nl-1]

    auto parts = [=](const Eigen::VectorXd& x, double& P, double& P1, double& P2,
                     double& Q, double& Q1, double& Q2, Eigen::VectorXd& rt,
                     double& rho) {
        rt = (x - center).head(nl);
        rho = rt.norm();
        SmoothStep::eval((rho - at) / st, P, P1, P2);
        P1 /= st;
        P2 /= (st * st);
        const double v = x[nl] - center[nl];
        SmoothStep::eval((std::abs(v) - al) / sl, Q, Q1, Q2);
        Q1 *= (v < 0 ? -1.0 : 1.0) / sl;  // sign kink sits inside the flat top
        Q2 /= (sl * sl);
    };

    env.eval_ = [=](const Eigen::VectorXd& x) {
        double P, P1, P2, Q, Q1, Q2, rho;
        Eigen::VectorXd rt;
        parts(x, P, P1, P2, Q, Q1, Q2, rt, rho);
        return amplitude * P * Q;
    };
    env.gradient_ = [=](const Eigen::VectorXd& x) {
        double P, P1, P2, Q, Q1, Q2, rho;
        Eigen::VectorXd rt;
        parts(x, P, P1, P2, Q, Q1, Q2, rt, rho);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        if (rho > 1e-14) g.head(nl) = amplitude * Q * P1 * rt / rho;
        g[nl] = amplitude * P * Q1;
        return g;
    };
    env.second_derivative_ = [=](const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& d) {
        double P, P1, P2, Q, Q1, Q2, rho;
        Eigen::VectorXd rt;
        parts(x, P, P1, P2, Q, Q1, Q2, rt, rho);
        const Eigen::VectorXd dt = d.head(nl);
        const double dn = d[nl];
        const double trans = radial_second_derivative(rt, P1, P2, dt);
        double cross = 0.0;
        if (rho > 1e-14) cross = 2.0 * (rt.dot(dt) / rho) * P1 * Q1 * dn;
        return amplitude * (Q * trans + cross + P * Q2 * dn * dn);
    };
    return env;
}

BeamEnvelope BeamEnvelope::custom(int dim, Evaluator f, double chi_max,
                                  Eigen::VectorXd support_center,
                                  double support_radius) {
    BeamEnvelope env;
    env.dim_ = dim;
    env.eval_ = std::move(f);
    env.chi_max_ = chi_max;
    env.support_center_ = std::move(support_center);
    env.support_radius_ = support_radius;
    env.box_ = Eigen::VectorXd::Constant(dim, support_radius);
    env.tag_ = "custom";
    return env;
}

Eigen::VectorXd BeamEnvelope::gradient(const Eigen::VectorXd& x) const {
    if (gradient_) return gradient_(x);
    return fd_gradient(eval_, x, kFdStep);
}

double BeamEnvelope::second_derivative(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& dir) const {
    if (second_derivative_) return second_derivative_(x, dir);
    return fd_second_derivative(eval_, x, dir, kFdStep);
}

double BeamEnvelope::laplacian(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (int a = 0; a < dim_; ++a) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
        e[a] = 1.0;
        acc += second_derivative(x, e);
    }
    return acc;
}

double BeamEnvelope::transverse_laplacian(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& omega) const {
    return laplacian(x) - second_derivative(x, omega);
}

std::pair<double, double> leading_amplitudes(const BeamEnvelope& chi,
                                             const Eigen::VectorXd& omega,
                                             double t, const Eigen::VectorXd& x) {
    return {chi(x - t * omega), chi(x + t * omega)};
}

std::complex<double> first_corrector(const BeamEnvelope& chi,
                                     const Eigen::VectorXd& omega, double t,
                                     const Eigen::VectorXd& x) {
    if (chi.dimension() == 1) return {0.0, 0.0};  // no transverse directions
    const double lap = chi.transverse_laplacian(x - t * omega, omega);
    return std::complex<double>(0.0, 0.5 * t * lap);
}

std::complex<double> two_term_amplitude(const BeamEnvelope& chi,
                                        const Eigen::VectorXd& omega, double h,
                                        double t, const Eigen::VectorXd& x) {
    const double a0 = chi(x - t * omega);
    return a0 + h * first_corrector(chi, omega, t, x);
}

namespace {
std::complex<double> phase_factor(const Eigen::VectorXd& omega, double h,
                                  double t, const Eigen::VectorXd& x) {
    const double phi = -t + x.dot(omega);
    return std::polar(1.0, phi / h);
}
}  // namespace

double handoff_p(const BeamEnvelope& chi, const Eigen::VectorXd& omega, double h,
                 double t, const Eigen::VectorXd& x) {
    return h * std::real(phase_factor(omega, h, t, x) *
                         two_term_amplitude(chi, omega, h, t, x));
}

double handoff_q(const BeamEnvelope& chi, const Eigen::VectorXd& omega, double h,
                 double t, const Eigen::VectorXd& x) {
    const double dt = 1e-6;
    const std::complex<double> da =
        (two_term_amplitude(chi, omega, h, t + dt, x) -
         two_term_amplitude(chi, omega, h, t - dt, x)) /
        (2.0 * dt);
    const std::complex<double> a = two_term_amplitude(chi, omega, h, t, x);
    const std::complex<double> i(0.0, 1.0);
    return h * std::real(phase_factor(omega, h, t, x) * (-i / h * a + da));
}

double support_gap(const BeamEnvelope& chi, const NonlinearityField& alpha,
                   const Eigen::VectorXd& shift, double level) {
    const Eigen::VectorXd c = chi.support_center() + shift;
    const Eigen::VectorXd& w = chi.support_box_halfwidths();
    double acc = 0.0;
    for (Eigen::Index a = 0; a < c.size(); ++a) {
        const double e = std::max(0.0, std::abs(c[a]) - w[a]);
        acc += e * e;
    }
    return std::sqrt(acc) - alpha.radius_at_level(level);
}

void check_handoff_geometry(const BeamEnvelope& chi,
                            const NonlinearityField& alpha,
                            const Eigen::VectorXd& omega, double t0,
                            double level) {
    const double gap = support_gap(chi, alpha, t0 * omega, level);
    if (gap <= 0.0)
        throw GeometryError(
            "handoff: envelope support overlaps the nonlinearity region at t0 "
            "(gap = " +
            std::to_string(gap) + ")");
}

double default_handoff_time(const BeamEnvelope& chi,
                            const NonlinearityField& alpha,
                            const Eigen::VectorXd& omega, double level) {
    const double gap =
        support_gap(chi, alpha, Eigen::VectorXd::Zero(chi.dimension()), level);
    if (gap <= 0.0)
        throw GeometryError("envelope support already meets the nonlinearity");
    (void)omega;
    return 0.5 * gap;
}

}  // namespace wv
