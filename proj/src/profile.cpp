#include "wv/profile.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wv/interpolation.hpp"
#include "wv/roots.hpp"

namespace wv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double PhaseProfile::theta(int j) const { return kTwoPi * j / size(); }

Eigen::ArrayXd PhaseProfile::theta_grid() const {
    return Eigen::ArrayXd::LinSpaced(size(), 0.0, kTwoPi * (size() - 1) / size());
}

PhaseProfile cosine_profile(double M, int n) {
    PhaseProfile p;
    p.values = M * Eigen::ArrayXd::LinSpaced(n, 0.0, kTwoPi * (n - 1) / n).cos();
    p.amplitude = M;
    p.stilde = 0.0;
    return p;
}

double solve_implicit(double M, double stilde, double theta, double f_tol) {
    if (M == 0.0) return 0.0;
    const double lambda = std::abs(M * stilde);
    if (lambda >= 1.0)
        throw ShockError("solve_implicit: M*stilde = " + std::to_string(M * stilde) +
                         " is past the shock; root may be non-unique");
    const double a = std::abs(M);
    auto f = [&](double u) { return u - M * std::cos(theta - u * stilde); };
    auto fp = [&](double u) { return 1.0 - M * stilde * std::sin(theta - u * stilde); };
    return newton_safeguarded(f, fp, -a, a, M * std::cos(theta), f_tol);
}

CharacteristicFan evolve_characteristics(const PhaseProfile& initial,
                                         double stilde) {
    CharacteristicFan fan;
    fan.seeds = initial.theta_grid();
    fan.values = initial.values;
    fan.stilde = stilde;
    fan.exits = fan.seeds + stilde * fan.values;
    const Eigen::Index n = fan.exits.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        if (!(fan.exits[i + 1] > fan.exits[i]))
            throw ShockError("evolve_characteristics: fold at seed index " +
                             std::to_string(i));
    if (!(fan.exits[0] + kTwoPi > fan.exits[n - 1]))
        throw ShockError("evolve_characteristics: fold across the period seam");
    return fan;
}

PhaseProfile resample(const CharacteristicFan& fan, int n_theta) {
    PeriodicPchip interp(fan.exits, fan.values, kTwoPi);
    PhaseProfile out;
    out.values.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) out.values[j] = interp(kTwoPi * j / n_theta);
    out.stilde = fan.stilde;
    out.amplitude = fan.values.abs().maxCoeff();
    return out;
}

PhaseProfile evolve_profile(const NonlinearityField& alpha, const Ray& ray,
                            double M, double s, int n_theta) {
    if (s < 0) throw ConfigError("evolve_profile: negative duration");
    const double stilde = line_integral(alpha, ray, 0.0, s);
    if (std::abs(M * stilde) >= 1.0)
        throw ShockError("evolve_profile: shock before s (M*stilde = " +
                         std::to_string(M * stilde) + ")");
    PhaseProfile p;
    p.values.resize(n_theta);
    for (int j = 0; j < n_theta; ++j)
        p.values[j] = solve_implicit(M, stilde, kTwoPi * j / n_theta);
    p.amplitude = M;
    p.stilde = stilde;
    return p;
}

namespace {

// theta-antiderivative of a zero-mean periodic grid function, evaluated at
// arbitrary positions through its Fourier series (antiderivative of the mean
// part is excluded; the caller handles it).
class PeriodicAntiderivative {
public:
    explicit PeriodicAntiderivative(const Eigen::ArrayXd& samples) {
        const int n = static_cast<int>(samples.size());
        const int kmax = n / 2 - 1;
        coeffs_.resize(kmax);
        for (int k = 1; k <= kmax; ++k) {
            std::complex<double> c(0.0, 0.0);
            for (int j = 0; j < n; ++j) {
                const double ang = -kTwoPi * k * j / n;
                c += samples[j] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            coeffs_[k - 1] = c / static_cast<double>(n);
        }
    }

    double operator()(double theta) const {
        double acc = 0.0;
        for (int k = 1; k <= static_cast<int>(coeffs_.size()); ++k) {
            const std::complex<double> c = coeffs_[k - 1];
            const std::complex<double> e(std::cos(k * theta), std::sin(k * theta));
            acc += 2.0 / k * (std::imag(c * e) - std::imag(c));
        }
        return acc;
    }

private:
    std::vector<std::complex<double>> coeffs_;
};

}  // namespace

CorrectorResult solve_corrector(const NonlinearityField& alpha,
                                const BeamEnvelope& chi,
                                const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& ray_base, double t0,
                                double T, const CorrectorOptions& opts) {
    const int n = alpha.dimension();
    if (chi.dimension() != n || omega.size() != n || ray_base.size() != n)
        throw ConfigError("solve_corrector: dimension mismatch");
    if (!(T > t0)) throw ConfigError("solve_corrector: requires T > t0");
    const int N = opts.n_theta;
    const double delta = opts.fd_step;

    // Stencil rays. Center carries the running accumulator; the time-shifted
    // points reduce to the center ray with a constant stilde offset; the
    // space-shifted points carry their own accumulators.
    const Ray center(ray_base, omega);
    const double M0 = chi(ray_base);
    const double m_tp = chi(ray_base - delta * omega);  // stencil (t+delta, x)
    const double m_tm = chi(ray_base + delta * omega);
    const double corr_tp = line_integral(alpha, center, t0 - delta, t0);
    const double corr_tm = -line_integral(alpha, center, t0, t0 + delta);

    std::vector<Ray> space_rays;
    std::vector<double> space_M;
    for (int a = 0; a < n; ++a) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[a] = delta;
        space_rays.emplace_back(ray_base + e, omega);
        space_rays.emplace_back(ray_base - e, omega);
        space_M.push_back(chi(ray_base + e));
        space_M.push_back(chi(ray_base - e));
    }

    // Accumulated integrals, advanced incrementally.
    double acc_center = 0.0;
    std::vector<double> acc_space(space_rays.size(), 0.0);
    double acc_time = t0;
    auto advance_to = [&](double t) {
        if (t == acc_time) return;
        acc_center += line_integral(alpha, center, acc_time, t);
        for (size_t r = 0; r < space_rays.size(); ++r)
            acc_space[r] += line_integral(alpha, space_rays[r], acc_time, t);
        acc_time = t;
    };

    const Eigen::ArrayXd grid =
        Eigen::ArrayXd::LinSpaced(N, 0.0, kTwoPi * (N - 1) / N);

    struct StageData {
        double t = 0.0;
        double stilde = 0.0;      // center accumulator
        double alpha_here = 0.0;  // alpha at the current ray point
        PeriodicAntiderivative box_antideriv{Eigen::ArrayXd::Zero(8)};
        double box_mean = 0.0;
        // per-stencil (M, stilde) pairs for pointwise solves
        double m_tp = 0.0, s_tp = 0.0, m_tm = 0.0, s_tm = 0.0;
        std::vector<double> sm, ss;
    };

    auto make_stage = [&](double t) {
        advance_to(t);
        StageData st;
        st.t = t;
        st.stilde = acc_center;
        st.alpha_here = alpha(ray_base + t * omega);
        st.m_tp = m_tp;
        st.s_tp = acc_center + corr_tp;
        st.m_tm = m_tm;
        st.s_tm = acc_center + corr_tm;
        st.sm = space_M;
        st.ss = acc_space;

        // wave-operator profile on the uniform grid, then its antiderivative
        Eigen::ArrayXd box(N);
        const double inv_d2 = 1.0 / (delta * delta);
        for (int j = 0; j < N; ++j) {
            const double th = grid[j];
            const double u_c = solve_implicit(M0, st.stilde, th);
            const double u_tp = solve_implicit(st.m_tp, st.s_tp, th);
            const double u_tm = solve_implicit(st.m_tm, st.s_tm, th);
            double lap = 0.0;
            for (int a = 0; a < n; ++a) {
                const double u_p = solve_implicit(st.sm[2 * a], st.ss[2 * a], th);
                const double u_m =
                    solve_implicit(st.sm[2 * a + 1], st.ss[2 * a + 1], th);
                lap += (u_p - 2.0 * u_c + u_m) * inv_d2;
            }
            box[j] = (u_tp - 2.0 * u_c + u_tm) * inv_d2 - lap;
        }
        // The zeroth mode of U0 vanishes, so the wave operator applied to it
        // has zero theta-mean; the sampled mean is pure discretization noise
        // and is removed before periodizing the antiderivative.
        st.box_mean = box.mean();
        st.box_antideriv = PeriodicAntiderivative(box - st.box_mean);
        return st;
    };

    // RHS of the transport equation at exit position theta for state w.
    auto rhs_at = [&](const StageData& st, double theta, double w) {
        const double u0 = solve_implicit(M0, st.stilde, theta);
        const double psi = theta - u0 * st.stilde;
        const double du0 = -M0 * std::sin(psi) /
                           (1.0 - M0 * st.stilde * std::sin(psi));
        const double u_tp = solve_implicit(st.m_tp, st.s_tp, theta);
        const double u_tm = solve_implicit(st.m_tm, st.s_tm, theta);
        const double dt_u0sq =
            (u_tp * u_tp - u_tm * u_tm) / (2.0 * delta);
        const double source = 0.5 * st.box_antideriv(theta) +
                              st.alpha_here * dt_u0sq + opts.beta1;
        return -st.alpha_here * du0 * w + source;
    };

    // Initial data: (i * a_{+,1}) * sin(theta), real since a_{+,1} is pure
    // imaginary; a_{+,1} evaluated on the ray at t0.
    Eigen::ArrayXd w(N);
    const std::complex<double> a1 =
        first_corrector(chi, omega, t0, ray_base + t0 * omega);
    for (int j = 0; j < N; ++j) w[j] = -std::imag(a1) * std::sin(grid[j]);

    const int steps = std::max(1, static_cast<int>(std::ceil((T - t0) / opts.dt)));
    const double dt = (T - t0) / steps;

    auto exit_at = [&](int j, double stilde) {
        return grid[j] + M0 * std::cos(grid[j]) * stilde;
    };

    StageData st0 = make_stage(t0);
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * dt;
        StageData st_half = make_stage(t + 0.5 * dt);
        StageData st_full = make_stage(t + dt);
        if (std::abs(M0 * st_full.stilde) >= 1.0)
            throw ShockError("solve_corrector: shock before T");
        for (int j = 0; j < N; ++j) {
            const double th0 = exit_at(j, st0.stilde);
            const double th1 = exit_at(j, st_half.stilde);
            const double th2 = exit_at(j, st_full.stilde);
            const double k1 = rhs_at(st0, th0, w[j]);
            const double k2 = rhs_at(st_half, th1, w[j] + 0.5 * dt * k1);
            const double k3 = rhs_at(st_half, th1, w[j] + 0.5 * dt * k2);
            const double k4 = rhs_at(st_full, th2, w[j] + dt * k3);
            w[j] += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        st0 = st_full;
    }

    // Resample from exit positions back to the uniform grid.
    CharacteristicFan fan;
    fan.seeds = grid;
    fan.values = w;
    fan.stilde = st0.stilde;
    fan.exits = grid + M0 * grid.cos() * st0.stilde;
    const Eigen::Index nn = fan.exits.size();
    for (Eigen::Index i = 0; i + 1 < nn; ++i)
        if (!(fan.exits[i + 1] > fan.exits[i]))
            throw ShockError("solve_corrector: characteristic fold");

    CorrectorResult out;
    out.stilde = st0.stilde;
    out.u1 = resample(fan, N);
    out.u1.amplitude = std::numeric_limits<double>::quiet_NaN();
    out.u1.stilde = st0.stilde;
    out.u0.values.resize(N);
    for (int j = 0; j < N; ++j)
        out.u0.values[j] = solve_implicit(M0, st0.stilde, grid[j]);
    out.u0.amplitude = M0;
    out.u0.stilde = st0.stilde;
    return out;
}

}  // namespace wv
