#include "wv/harmonics.hpp"

#include <cmath>
#include <numbers>

namespace wv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Cvec = Eigen::VectorXcd;
}  // namespace

HarmonicSpectrum HarmonicSpectrum::zero(int K) {
    HarmonicSpectrum s;
    s.K = K;
    s.coeffs = Cvec::Zero(2 * K + 1);
    return s;
}

double HarmonicSpectrum::hermitian_defect() const {
    double worst = 0.0;
    for (int k = 0; k <= K; ++k)
        worst = std::max(worst, std::abs(at(-k) - std::conj(at(k))));
    return worst;
}

void HarmonicSpectrum::require_hermitian(double tol) const {
    const double d = hermitian_defect();
    if (d > tol)
        throw EvaluationError("HarmonicSpectrum: Hermitian symmetry defect " +
                              std::to_string(d) + " exceeds tolerance");
}

namespace {

// du_k/ds = -(i/2) k sum_{k1+k2=k} u_{k1} u_{k2}, |k1|,|k2| <= K.
Cvec spectrum_rhs(const Cvec& u, int K) {
    Cvec out(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        std::complex<double> conv(0.0, 0.0);
        const int lo = std::max(-K, k - K);
        const int hi = std::min(K, k + K);
        for (int k1 = lo; k1 <= hi; ++k1) conv += u[k1 + K] * u[k - k1 + K];
        out[k + K] = std::complex<double>(0.0, -0.5 * k) * conv;
    }
    return out;
}

}  // namespace

HarmonicSpectrum evolve_spectrum(double M, double stilde_final, int K,
                                 int steps) {
    if (K < 2) throw ConfigError("evolve_spectrum: K must be >= 2");
    if (stilde_final < 0)
        throw ConfigError("evolve_spectrum: stilde must be >= 0");
    if (std::abs(M) * stilde_final >= 1.0)
        throw ShockError("evolve_spectrum: M*stilde past the shock");
    if (steps <= 0)
        steps = std::max(1, static_cast<int>(std::ceil(stilde_final * 1000.0)));

    HarmonicSpectrum spec = HarmonicSpectrum::zero(K);
    spec.at(1) = spec.at(-1) = 0.5 * M;
    spec.stilde = stilde_final;
    if (stilde_final == 0.0) return spec;

    const double ds = stilde_final / steps;
    Cvec u = spec.coeffs;
    const double blowup = 10.0 * std::max(std::abs(M), 1e-30);
    for (int s = 0; s < steps; ++s) {
        const Cvec k1 = spectrum_rhs(u, K);
        const Cvec k2 = spectrum_rhs(u + 0.5 * ds * k1, K);
        const Cvec k3 = spectrum_rhs(u + 0.5 * ds * k2, K);
        const Cvec k4 = spectrum_rhs(u + ds * k3, K);
        u += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (u.cwiseAbs().maxCoeff() > blowup)
            throw NumericalGuardError(
                "evolve_spectrum: coefficient blow-up at stilde = " +
                std::to_string((s + 1) * ds) + " (shock or truncation loss)");
    }
    spec.coeffs = u;
    return spec;
}

double second_harmonic_linearized(double M, double xray) {
    return 0.5 * M * M * xray;
}

PhaseProfile spectrum_to_profile(const HarmonicSpectrum& spec, int n_theta) {
    spec.require_hermitian();
    PhaseProfile p;
    p.values = Eigen::ArrayXd::Zero(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        const double theta = kTwoPi * j / n_theta;
        double acc = spec.at(0).real();
        for (int k = 1; k <= spec.K; ++k) {
            const std::complex<double> e(std::cos(k * theta), std::sin(k * theta));
            acc += 2.0 * std::real(spec.at(k) * e);
        }
        p.values[j] = acc;
    }
    p.stilde = spec.stilde;
    return p;
}

HarmonicSpectrum profile_to_spectrum(const PhaseProfile& profile, int K) {
    const int n = profile.size();
    if (2 * K + 1 > n)
        throw ConfigError("profile_to_spectrum: grid too coarse for K");
    HarmonicSpectrum spec = HarmonicSpectrum::zero(K);
    for (int k = -K; k <= K; ++k) {
        std::complex<double> c(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const double ang = -kTwoPi * k * j / n;
            c += profile.values[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        spec.at(k) = c / static_cast<double>(n);
    }
    spec.stilde = profile.stilde;
    return spec;
}

}  // namespace wv
