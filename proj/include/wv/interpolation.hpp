#ifndef WV_INTERPOLATION_HPP
#define WV_INTERPOLATION_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "wv/errors.hpp"

namespace wv {

/// Monotone (Fritsch-Carlson) piecewise-cubic interpolant on one period of a
/// periodic function. Nodes must be strictly increasing and span < period.
/// Monotone data yields a monotone interpolant (no overshoot at steep fronts).
class PeriodicPchip {
public:
    PeriodicPchip(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double period)
        : x_(x), y_(y), period_(period) {
        const Eigen::Index n = x.size();
        if (n < 4) throw EvaluationError("PeriodicPchip: need >= 4 nodes");
        if (y.size() != n) throw EvaluationError("PeriodicPchip: size mismatch");
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            if (!(x[i + 1] > x[i]))
                throw EvaluationError("PeriodicPchip: nodes not increasing");
        if (!(x[n - 1] - x[0] < period))
            throw EvaluationError("PeriodicPchip: nodes exceed one period");

        h_.resize(n);
        delta_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index ip = (i + 1) % n;
            const double hi = (ip == 0) ? (x[0] + period - x[n - 1]) : (x[ip] - x[i]);
            h_[i] = hi;
            delta_[i] = (y[ip] - y[i]) / hi;
        }
        m_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index im = (i + n - 1) % n;
            const double d0 = delta_[im], d1 = delta_[i];
            if (d0 * d1 <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h_[i] + h_[im];
                const double w2 = h_[i] + 2.0 * h_[im];
                m_[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
    }

    double operator()(double x) const {
        const Eigen::Index n = x_.size();
        double t = std::fmod(x - x_[0], period_);
        if (t < 0) t += period_;
        // interval index: last node <= x0 + t
        const double* beg = x_.data();
        Eigen::Index j = std::upper_bound(beg, beg + n, x_[0] + t) - beg - 1;
        if (j < 0) j = n - 1;  // t in the wrap interval before x_[0]: unreachable since t>=0
        const Eigen::Index jp = (j + 1) % n;
        const double h = h_[j];
        const double s = (x_[0] + t - x_[j]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * y_[j] + h01 * y_[jp] + h * (h10 * m_[j] + h11 * m_[jp]);
    }

private:
    Eigen::ArrayXd x_, y_, h_, delta_, m_;
    double period_;
};

/// C2 cubic spline through uniformly spaced samples of a periodic function.
/// Node j sits at x0 + j*dx, j = 0..n-1, with period n*dx.
class PeriodicCubicSpline {
public:
    PeriodicCubicSpline(double x0, double dx, const Eigen::ArrayXd& y)
        : x0_(x0), dx_(dx), y_(y) {
        const Eigen::Index n = y.size();
        if (n < 4) throw EvaluationError("PeriodicCubicSpline: need >= 4 nodes");
        // C2 condition for node derivatives m: m_{j-1} + 4 m_j + m_{j+1} =
        // 3 (y_{j+1} - y_{j-1}) / dx, cyclic. Solved by Sherman-Morrison.
        Eigen::ArrayXd d(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index jm = (j + n - 1) % n, jp = (j + 1) % n;
            d[j] = 3.0 * (y[jp] - y[jm]) / dx;
        }
        m_ = solve_cyclic_141(d);
    }

    double operator()(double x) const {
        const Eigen::Index n = y_.size();
        const double period = n * dx_;
        double t = std::fmod(x - x0_, period);
        if (t < 0) t += period;
        Eigen::Index j = static_cast<Eigen::Index>(std::floor(t / dx_));
        if (j >= n) j = n - 1;
        const Eigen::Index jp = (j + 1) % n;
        const double s = t / dx_ - static_cast<double>(j);
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[j] + (-2 * s3 + 3 * s2) * y_[jp] +
               dx_ * ((s3 - 2 * s2 + s) * m_[j] + (s3 - s2) * m_[jp]);
    }

    double derivative(double x) const {
        const Eigen::Index n = y_.size();
        const double period = n * dx_;
        double t = std::fmod(x - x0_, period);
        if (t < 0) t += period;
        Eigen::Index j = static_cast<Eigen::Index>(std::floor(t / dx_));
        if (j >= n) j = n - 1;
        const Eigen::Index jp = (j + 1) % n;
        const double s = t / dx_ - static_cast<double>(j);
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * (y_[j] - y_[jp]) / dx_ +
                (3 * s2 - 4 * s + 1) * m_[j] + (3 * s2 - 2 * s) * m_[jp]);
    }

private:
    // Tridiagonal (1,4,1) with cyclic corners, constant coefficients.
    static Eigen::ArrayXd solve_cyclic_141(const Eigen::ArrayXd& d) {
        const Eigen::Index n = d.size();
        const double gamma = -4.0;
        Eigen::ArrayXd b = Eigen::ArrayXd::Constant(n, 4.0);
        b[0] -= gamma;
        b[n - 1] -= 1.0 / gamma;
        auto thomas = [&](const Eigen::ArrayXd& rhs) {
            Eigen::ArrayXd c(n), x(n);
            c[0] = 1.0 / b[0];
            x[0] = rhs[0] / b[0];
            for (Eigen::Index i = 1; i < n; ++i) {
                const double piv = b[i] - c[i - 1];
                c[i] = 1.0 / piv;
                x[i] = (rhs[i] - x[i - 1]) / piv;
            }
            for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
            return x;
        };
        Eigen::ArrayXd u = Eigen::ArrayXd::Zero(n);
        u[0] = gamma;
        u[n - 1] = 1.0;
        const Eigen::ArrayXd y = thomas(d);
        const Eigen::ArrayXd z = thomas(u);
        const double fact =
            (y[0] + y[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
        return y - fact * z;
    }

    double x0_, dx_;
    Eigen::ArrayXd y_, m_;
};

}  // namespace wv

#endif
