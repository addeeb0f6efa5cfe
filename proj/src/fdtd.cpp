#include "wv/fdtd.hpp"

#include <cmath>
#include <string>

namespace wv {

double cfl_time_step(double dx, int dim, const FdtdOptions& opts) {
    return opts.cfl * dx * std::sqrt(opts.b0) / std::sqrt(double(dim));
}

std::pair<int, double> steps_for(double T, double dt_max) {
    const int n = std::max(1, static_cast<int>(std::ceil(T / dt_max - 1e-12)));
    return {n, T / n};
}

namespace {

// One scalar implicit node update: x = B + g*(x - pm)^2, from the predictor.
inline double fixed_point_node(double B, double g, double pm, double x0,
                               double tol, int max_iters, bool& ok) {
    double x = x0;
    for (int it = 0; it < max_iters; ++it) {
        const double d = x - pm;
        const double xn = B + g * d * d;
        if (std::abs(xn - x) < tol) {
            ok = true;
            return xn;
        }
        x = xn;
    }
    ok = false;
    return x;
}

}  // namespace

WaveSolver1D::WaveSolver1D(Grid1D grid, Eigen::ArrayXd alpha_samples, double dt,
                           FdtdOptions opts)
    : grid_(grid), alpha_(std::move(alpha_samples)), dt_(dt), opts_(opts) {
    if (alpha_.size() != grid_.n)
        throw ConfigError("WaveSolver1D: alpha sample count != grid size");
    if (!(dt > 0)) throw ConfigError("WaveSolver1D: dt must be > 0");
    const double dt_max = cfl_time_step(grid_.dx, 1, opts_);
    if (dt > dt_max * (1.0 + 1e-12))
        throw ConfigError("WaveSolver1D: dt violates the CFL bound " +
                          std::to_string(dt_max));
    for (int i = 0; i < grid_.n; ++i)
        if (alpha_[i] != 0.0) nonlinear_nodes_.push_back(i);
}

Eigen::ArrayXd WaveSolver1D::laplacian(const Eigen::ArrayXd& p) const {
    const int n = grid_.n;
    const double inv = 1.0 / (grid_.dx * grid_.dx);
    Eigen::ArrayXd lap(n);
    lap.segment(1, n - 2) =
        (p.segment(0, n - 2) - 2.0 * p.segment(1, n - 2) + p.segment(2, n - 2)) *
        inv;
    if (opts_.boundary == Boundary::periodic) {
        lap[0] = (p[n - 1] - 2.0 * p[0] + p[1]) * inv;
        lap[n - 1] = (p[n - 2] - 2.0 * p[n - 1] + p[0]) * inv;
    } else {
        lap[0] = (-2.0 * p[0] + p[1]) * inv;
        lap[n - 1] = (p[n - 2] - 2.0 * p[n - 1]) * inv;
    }
    return lap;
}

void WaveSolver1D::start_from_rest(const Eigen::ArrayXd& p0, double t_start) {
    start_with_velocity(p0, Eigen::ArrayXd::Zero(p0.size()), t_start);
}

void WaveSolver1D::start_with_velocity(const Eigen::ArrayXd& p0,
                                       const Eigen::ArrayXd& q0,
                                       double t_start) {
    if (p0.size() != grid_.n || q0.size() != grid_.n)
        throw ConfigError("WaveSolver1D: initial data size mismatch");
    const Eigen::ArrayXd D = 1.0 - 2.0 * alpha_ * p0;
    if (D.minCoeff() < opts_.b0)
        throw HyperbolicityError("WaveSolver1D: initial data breaches 1-2ap >= b0");
    pm_ = p0;
    p_ = p0 + dt_ * q0 +
         0.5 * dt_ * dt_ * (laplacian(p0) + 2.0 * alpha_ * q0.square()) / D;
    t_ = t_start + dt_;
    started_ = true;
}

void WaveSolver1D::step() {
    if (!started_) throw EvaluationError("WaveSolver1D: no initial data");
    const Eigen::ArrayXd D = 1.0 - 2.0 * alpha_ * p_;
    int imin = 0;
    const double dmin = D.minCoeff(&imin);
    if (dmin < opts_.b0)
        throw HyperbolicityError(
            "hyperbolicity guard: 1-2*alpha*p = " + std::to_string(dmin) +
            " < b0 at t = " + std::to_string(t_) + ", node " +
            std::to_string(imin) + " (x = " + std::to_string(grid_.x(imin)) + ")");

    const Eigen::ArrayXd lap = laplacian(p_);
    Eigen::ArrayXd B = 2.0 * p_ - pm_ + dt_ * dt_ * lap / D;
    Eigen::ArrayXd pp = B;  // exact where alpha == 0
    for (int i : nonlinear_nodes_) {
        const double g = alpha_[i] / (2.0 * D[i]);
        const double v0 = (p_[i] - pm_[i]) / dt_;
        const double d0 = 2.0 * dt_ * v0;  // predictor for (x - pm)
        bool ok = false;
        const double x = fixed_point_node(B[i], g, pm_[i], B[i] + g * d0 * d0,
                                          opts_.fp_tol, opts_.fp_max_iters, ok);
        if (!ok)
            throw NumericalGuardError(
                "WaveSolver1D: implicit velocity iteration failed to converge "
                "at t = " +
                std::to_string(t_) + ", node " + std::to_string(i) +
                "; reduce dt");
        pp[i] = x;
    }
    if (opts_.boundary == Boundary::absorbing) {
        const double c = (dt_ - grid_.dx) / (dt_ + grid_.dx);
        pp[0] = p_[1] + c * (pp[1] - p_[0]);
        const int n = grid_.n;
        pp[n - 1] = p_[n - 2] + c * (pp[n - 2] - p_[n - 1]);
    }
    pm_.swap(p_);
    p_.swap(pp);
    t_ += dt_;
}

void WaveSolver1D::advance_to(double T) {
    while (t_ < T - 0.5 * dt_) step();
}

double WaveSolver1D::energy() const {
    const Eigen::ArrayXd v = (p_ - pm_) / dt_;
    const int n = grid_.n;
    const Eigen::ArrayXd gp =
        (p_.segment(1, n - 1) - p_.segment(0, n - 1)) / grid_.dx;
    return (v.square().sum() + gp.square().sum()) * grid_.dx;
}

WaveSolver2D::WaveSolver2D(Grid2D grid, Eigen::ArrayXXd alpha_samples,
                           double dt, FdtdOptions opts)
    : grid_(grid), alpha_(std::move(alpha_samples)), dt_(dt), opts_(opts) {
    if (alpha_.rows() != grid_.nx || alpha_.cols() != grid_.ny)
        throw ConfigError("WaveSolver2D: alpha sample shape != grid shape");
    const double dt_max = cfl_time_step(grid_.dx, 2, opts_);
    if (dt > dt_max * (1.0 + 1e-12))
        throw ConfigError("WaveSolver2D: dt violates the CFL bound " +
                          std::to_string(dt_max));
    for (long j = 0; j < alpha_.cols(); ++j)
        for (long i = 0; i < alpha_.rows(); ++i)
            if (alpha_(i, j) != 0.0) nonlinear_nodes_.push_back(i + j * alpha_.rows());
}

Eigen::ArrayXXd WaveSolver2D::laplacian(const Eigen::ArrayXXd& p) const {
    const long nx = grid_.nx, ny = grid_.ny;
    const double inv = 1.0 / (grid_.dx * grid_.dx);
    Eigen::ArrayXXd lap = Eigen::ArrayXXd::Zero(nx, ny);
    lap.block(1, 1, nx - 2, ny - 2) =
        (p.block(0, 1, nx - 2, ny - 2) + p.block(2, 1, nx - 2, ny - 2) +
         p.block(1, 0, nx - 2, ny - 2) + p.block(1, 2, nx - 2, ny - 2) -
         4.0 * p.block(1, 1, nx - 2, ny - 2)) *
        inv;
    if (opts_.boundary == Boundary::periodic) {
        for (long j = 0; j < ny; ++j)
            for (long i = 0; i < nx; ++i) {
                if (i > 0 && i < nx - 1 && j > 0 && j < ny - 1) continue;
                const long im = (i + nx - 1) % nx, ip = (i + 1) % nx;
                const long jm = (j + ny - 1) % ny, jp = (j + 1) % ny;
                lap(i, j) =
                    (p(im, j) + p(ip, j) + p(i, jm) + p(i, jp) - 4.0 * p(i, j)) *
                    inv;
            }
    } else {
        // Dirichlet ghosts: zero outside
        for (long i = 1; i + 1 < nx; ++i) {
            lap(i, 0) = (p(i - 1, 0) + p(i + 1, 0) + p(i, 1) - 4.0 * p(i, 0)) * inv;
            lap(i, ny - 1) =
                (p(i - 1, ny - 1) + p(i + 1, ny - 1) + p(i, ny - 2) -
                 4.0 * p(i, ny - 1)) *
                inv;
        }
        for (long j = 1; j + 1 < ny; ++j) {
            lap(0, j) = (p(1, j) + p(0, j - 1) + p(0, j + 1) - 4.0 * p(0, j)) * inv;
            lap(nx - 1, j) =
                (p(nx - 2, j) + p(nx - 1, j - 1) + p(nx - 1, j + 1) -
                 4.0 * p(nx - 1, j)) *
                inv;
        }
        lap(0, 0) = (p(1, 0) + p(0, 1) - 4.0 * p(0, 0)) * inv;
        lap(nx - 1, 0) = (p(nx - 2, 0) + p(nx - 1, 1) - 4.0 * p(nx - 1, 0)) * inv;
        lap(0, ny - 1) = (p(1, ny - 1) + p(0, ny - 2) - 4.0 * p(0, ny - 1)) * inv;
        lap(nx - 1, ny - 1) =
            (p(nx - 2, ny - 1) + p(nx - 1, ny - 2) - 4.0 * p(nx - 1, ny - 1)) *
            inv;
    }
    return lap;
}

void WaveSolver2D::start_from_rest(const Eigen::ArrayXXd& p0, double t_start) {
    start_with_velocity(p0, Eigen::ArrayXXd::Zero(p0.rows(), p0.cols()), t_start);
}

void WaveSolver2D::start_with_velocity(const Eigen::ArrayXXd& p0,
                                       const Eigen::ArrayXXd& q0,
                                       double t_start) {
    if (p0.rows() != grid_.nx || p0.cols() != grid_.ny)
        throw ConfigError("WaveSolver2D: initial data shape mismatch");
    const Eigen::ArrayXXd D = 1.0 - 2.0 * alpha_ * p0;
    if (D.minCoeff() < opts_.b0)
        throw HyperbolicityError("WaveSolver2D: initial data breaches 1-2ap >= b0");
    pm_ = p0;
    p_ = p0 + dt_ * q0 +
         0.5 * dt_ * dt_ * (laplacian(p0) + 2.0 * alpha_ * q0.square()) / D;
    t_ = t_start + dt_;
    started_ = true;
}

void WaveSolver2D::step() {
    if (!started_) throw EvaluationError("WaveSolver2D: no initial data");
    const Eigen::ArrayXXd D = 1.0 - 2.0 * alpha_ * p_;
    long imin = 0, jmin = 0;
    const double dmin = D.minCoeff(&imin, &jmin);
    if (dmin < opts_.b0)
        throw HyperbolicityError(
            "hyperbolicity guard: 1-2*alpha*p = " + std::to_string(dmin) +
            " < b0 at t = " + std::to_string(t_) + ", node (" +
            std::to_string(imin) + "," + std::to_string(jmin) + ")");

    const Eigen::ArrayXXd lap = laplacian(p_);
    Eigen::ArrayXXd B = 2.0 * p_ - pm_ + dt_ * dt_ * lap / D;
    Eigen::ArrayXXd pp = B;
    const double* pmd = pm_.data();
    const double* pd = p_.data();
    const double* Dd = D.data();
    const double* ad = alpha_.data();
    const double* Bd = B.data();
    double* ppd = pp.data();
    for (long idx : nonlinear_nodes_) {
        const double g = ad[idx] / (2.0 * Dd[idx]);
        const double d0 = 2.0 * (pd[idx] - pmd[idx]);
        bool ok = false;
        const double x =
            fixed_point_node(Bd[idx], g, pmd[idx], Bd[idx] + g * d0 * d0,
                             opts_.fp_tol, opts_.fp_max_iters, ok);
        if (!ok)
            throw NumericalGuardError(
                "WaveSolver2D: implicit velocity iteration failed at t = " +
                std::to_string(t_) + "; reduce dt");
        ppd[idx] = x;
    }
    if (opts_.boundary == Boundary::absorbing) {
        const double c = (dt_ - grid_.dx) / (dt_ + grid_.dx);
        const long nx = grid_.nx, ny = grid_.ny;
        for (long i = 0; i < nx; ++i) {
            pp(i, 0) = p_(i, 1) + c * (pp(i, 1) - p_(i, 0));
            pp(i, ny - 1) = p_(i, ny - 2) + c * (pp(i, ny - 2) - p_(i, ny - 1));
        }
        for (long j = 0; j < ny; ++j) {
            pp(0, j) = p_(1, j) + c * (pp(1, j) - p_(0, j));
            pp(nx - 1, j) = p_(nx - 2, j) + c * (pp(nx - 2, j) - p_(nx - 1, j));
        }
    }
    pm_.swap(p_);
    p_.swap(pp);
    t_ += dt_;
}

void WaveSolver2D::advance_to(double T) {
    while (t_ < T - 0.5 * dt_) step();
}

namespace {

double l2_norm(const Eigen::ArrayXd& u, double cell) {
    return std::sqrt(u.square().sum() * cell);
}

}  // namespace

ScaledNormReport scaled_norms(const Eigen::ArrayXd& u, double dx, double h,
                              int max_order) {
    ScaledNormReport rep;
    rep.h = h;
    const int n = static_cast<int>(u.size());
    rep.sup.push_back(u.abs().maxCoeff());
    rep.l2.push_back(l2_norm(u, dx));
    if (max_order >= 1) {
        Eigen::ArrayXd d1 =
            h * (u.segment(2, n - 2) - u.segment(0, n - 2)) / (2.0 * dx);
        rep.sup.push_back(d1.abs().maxCoeff());
        rep.l2.push_back(l2_norm(d1, dx));
    }
    if (max_order >= 2) {
        Eigen::ArrayXd d2 = h * h *
                            (u.segment(2, n - 2) - 2.0 * u.segment(1, n - 2) +
                             u.segment(0, n - 2)) /
                            (dx * dx);
        rep.sup.push_back(d2.abs().maxCoeff());
        rep.l2.push_back(l2_norm(d2, dx));
    }
    return rep;
}

ScaledNormReport scaled_norms(const Eigen::ArrayXXd& u, double dx, double h,
                              int max_order) {
    ScaledNormReport rep;
    rep.h = h;
    const long nx = u.rows(), ny = u.cols();
    const double cell = dx * dx;
    rep.sup.push_back(u.abs().maxCoeff());
    rep.l2.push_back(std::sqrt(u.square().sum() * cell));
    if (max_order >= 1) {
        Eigen::ArrayXXd gx =
            h * (u.block(2, 1, nx - 2, ny - 2) - u.block(0, 1, nx - 2, ny - 2)) /
            (2.0 * dx);
        Eigen::ArrayXXd gy =
            h * (u.block(1, 2, nx - 2, ny - 2) - u.block(1, 0, nx - 2, ny - 2)) /
            (2.0 * dx);
        rep.sup.push_back(std::max(gx.abs().maxCoeff(), gy.abs().maxCoeff()));
        rep.l2.push_back(std::max(std::sqrt(gx.square().sum() * cell),
                                  std::sqrt(gy.square().sum() * cell)));
    }
    if (max_order >= 2) {
        const auto c = u.block(1, 1, nx - 2, ny - 2);
        Eigen::ArrayXXd dxx =
            h * h *
            (u.block(2, 1, nx - 2, ny - 2) - 2.0 * c + u.block(0, 1, nx - 2, ny - 2)) /
            (dx * dx);
        Eigen::ArrayXXd dyy =
            h * h *
            (u.block(1, 2, nx - 2, ny - 2) - 2.0 * c + u.block(1, 0, nx - 2, ny - 2)) /
            (dx * dx);
        Eigen::ArrayXXd dxy = h * h *
                              (u.block(2, 2, nx - 2, ny - 2) -
                               u.block(2, 0, nx - 2, ny - 2) -
                               u.block(0, 2, nx - 2, ny - 2) +
                               u.block(0, 0, nx - 2, ny - 2)) /
                              (4.0 * dx * dx);
        double s = std::max({dxx.abs().maxCoeff(), dyy.abs().maxCoeff(),
                             dxy.abs().maxCoeff()});
        double l = std::max({std::sqrt(dxx.square().sum() * cell),
                             std::sqrt(dyy.square().sum() * cell),
                             std::sqrt(dxy.square().sum() * cell)});
        rep.sup.push_back(s);
        rep.l2.push_back(l);
    }
    return rep;
}

}  // namespace wv
