#ifndef WV_FDTD_HPP
#define WV_FDTD_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "wv/errors.hpp"
#include "wv/nonlinearity.hpp"

namespace wv {

struct Grid1D {
    double x0 = 0.0;
    double dx = 1.0;
    int n = 0;
    double x(int i) const { return x0 + i * dx; }
    Eigen::ArrayXd coords() const {
        return x0 + dx * Eigen::ArrayXd::LinSpaced(n, 0, n - 1);
    }
};

struct Grid2D {
    double x0 = 0.0, y0 = 0.0;
    double dx = 1.0;  // same spacing on both axes
    int nx = 0, ny = 0;
    double x(int i) const { return x0 + i * dx; }
    double y(int j) const { return y0 + j * dx; }
};

enum class Boundary { dirichlet, periodic, absorbing };

struct FdtdOptions {
    double cfl = 0.4;
    double b0 = 0.5;
    double fp_tol = 1e-12;
    int fp_max_iters = 25;
    Boundary boundary = Boundary::dirichlet;
};

/// Largest stable time step for dimension n: cfl * dx * sqrt(b0) / sqrt(n).
double cfl_time_step(double dx, int dim, const FdtdOptions& opts);
/// Step count and exact step landing on T.
std::pair<int, double> steps_for(double T, double dt_max);

/// Leapfrog update of (1-2*alpha*p) p_tt = lap p + 2*alpha*(p_t)^2 with the
/// velocity taken centered, resolved per node by fixed-point iteration.
class WaveSolver1D {
public:
    WaveSolver1D(Grid1D grid, Eigen::ArrayXd alpha_samples, double dt,
                 FdtdOptions opts = {});

    void start_from_rest(const Eigen::ArrayXd& p0, double t_start = 0.0);
    void start_with_velocity(const Eigen::ArrayXd& p0, const Eigen::ArrayXd& q0,
                             double t_start = 0.0);
    void step();
    void advance_to(double T);

    const Grid1D& grid() const { return grid_; }
    const Eigen::ArrayXd& current() const { return p_; }
    const Eigen::ArrayXd& previous() const { return pm_; }
    double time() const { return t_; }
    double dt() const { return dt_; }
    /// Discrete energy sum(v^2 + (grad p)^2) dx of the linear wave.
    double energy() const;

private:
    Eigen::ArrayXd laplacian(const Eigen::ArrayXd& p) const;

    Grid1D grid_;
    Eigen::ArrayXd alpha_;
    std::vector<int> nonlinear_nodes_;
    double dt_;
    FdtdOptions opts_;
    Eigen::ArrayXd pm_, p_;
    double t_ = 0.0;
    bool started_ = false;
};

class WaveSolver2D {
public:
    WaveSolver2D(Grid2D grid, Eigen::ArrayXXd alpha_samples, double dt,
                 FdtdOptions opts = {});

    void start_from_rest(const Eigen::ArrayXXd& p0, double t_start = 0.0);
    void start_with_velocity(const Eigen::ArrayXXd& p0,
                             const Eigen::ArrayXXd& q0, double t_start = 0.0);
    void step();
    void advance_to(double T);

    const Grid2D& grid() const { return grid_; }
    const Eigen::ArrayXXd& current() const { return p_; }
    double time() const { return t_; }
    double dt() const { return dt_; }

private:
    Eigen::ArrayXXd laplacian(const Eigen::ArrayXXd& p) const;

    Grid2D grid_;
    Eigen::ArrayXXd alpha_;
    std::vector<long> nonlinear_nodes_;  // flat col-major indices
    double dt_;
    FdtdOptions opts_;
    Eigen::ArrayXXd pm_, p_;
    double t_ = 0.0;
    bool started_ = false;
};

/// Sup- and L2-norms of (h d/dx)^gamma u for |gamma| <= max_order, formed
/// with centered differences; entry m holds the worst norm among the
/// multi-indices of order m.
struct ScaledNormReport {
    double h = 0.0;
    std::vector<double> sup;
    std::vector<double> l2;
};

ScaledNormReport scaled_norms(const Eigen::ArrayXd& u, double dx, double h,
                              int max_order = 2);
ScaledNormReport scaled_norms(const Eigen::ArrayXXd& u, double dx, double h,
                              int max_order = 2);

/// Observed convergence order between successive ladder errors.
inline double observed_order(double err_coarse, double err_fine) {
    return std::log2(err_coarse / err_fine);
}

}  // namespace wv

#endif
