#include "wv/tomography.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "wv/interpolation.hpp"
#include "wv/roots.hpp"

namespace wv {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_to_pi(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a - kPi;
}
}  // namespace

DemodulationResult demodulate(const Eigen::ArrayXd& positions,
                              const Eigen::ArrayXd& p_values, double T,
                              double h, int K, int n_theta,
                              double max_condition) {
    const Eigen::Index m = positions.size();
    if (p_values.size() != m)
        throw ConfigError("demodulate: positions/values size mismatch");
    if (K < 1) throw ConfigError("demodulate: K must be >= 1");
    const int cols = 2 * K + 1;
    if (m < cols)
        throw ConditioningError("demodulate: window holds fewer samples than "
                                "fit coefficients");

    Eigen::MatrixXd A(m, cols);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double theta = (positions[i] - T) / h;
        A(i, 0) = 1.0;
        for (int k = 1; k <= K; ++k) {
            A(i, 2 * k - 1) = std::cos(k * theta);
            A(i, 2 * k) = std::sin(k * theta);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                                 Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double cond =
        smin > 0 ? svd.singularValues().maxCoeff() / smin
                 : std::numeric_limits<double>::infinity();
    if (!(cond < max_condition))
        throw ConditioningError(
            "demodulate: ill-conditioned design (condition number " +
            std::to_string(cond) +
            "); widen the window or refine the sampling");

    const Eigen::VectorXd rhs = (p_values / h).matrix();
    const Eigen::VectorXd coef = svd.solve(rhs);

    DemodulationResult out;
    out.condition_number = cond;
    out.residual = std::sqrt((A * coef - rhs).squaredNorm() / double(m));
    out.spectrum = HarmonicSpectrum::zero(K);
    out.spectrum.at(0) = coef[0];
    for (int k = 1; k <= K; ++k) {
        const std::complex<double> ck(0.5 * coef[2 * k - 1],
                                      -0.5 * coef[2 * k]);
        out.spectrum.at(k) = ck;
        out.spectrum.at(-k) = std::conj(ck);
    }
    out.profile = spectrum_to_profile(out.spectrum, n_theta);
    return out;
}

namespace {

struct Crossing {
    double theta;
    bool rising;
};

std::vector<Crossing> find_crossings(const PhaseProfile& p, double level,
                                     double theta_tol) {
    const int n = p.size();
    const double dtheta = kTwoPi / n;
    PeriodicCubicSpline spline(0.0, dtheta, p.values);
    std::vector<Crossing> out;
    for (int j = 0; j < n; ++j) {
        const double a = p.values[j] - level;
        const double b = p.values[(j + 1) % n] - level;
        if (a == 0.0) {
            out.push_back({j * dtheta, b > a});
            continue;
        }
        if ((a < 0 && b >= 0) || (a > 0 && b <= 0)) {
            auto f = [&](double th) { return spline(th) - level; };
            const double lo = j * dtheta, hi = (j + 1) * dtheta;
            double root;
            if (f(lo) == 0.0)
                root = lo;
            else if (f(hi) == 0.0)
                root = hi;
            else if ((f(lo) > 0) == (f(hi) > 0))
                continue;  // spline pulled back inside; grid-level wiggle
            else
                root = bisect(f, lo, hi, theta_tol);
            out.push_back({std::fmod(root, kTwoPi), a < b});
        }
    }
    return out;
}

}  // namespace

namespace {

// Drop ripple artifacts: adjacent opposite-direction crossings closer than
// min_sep are small oscillations through the level, not level-set geometry.
std::vector<Crossing> debounce(std::vector<Crossing> cs, double min_sep) {
    bool changed = true;
    while (changed && cs.size() >= 2) {
        changed = false;
        for (size_t i = 0; i < cs.size(); ++i) {
            const size_t j = (i + 1) % cs.size();
            double gap = cs[j].theta - cs[i].theta;
            if (j == 0) gap += kTwoPi;
            if (gap < min_sep && cs[i].rising != cs[j].rising) {
                if (j > i) {
                    cs.erase(cs.begin() + j);
                    cs.erase(cs.begin() + i);
                } else {
                    cs.erase(cs.begin() + i);
                    cs.erase(cs.begin() + j);
                }
                changed = true;
                break;
            }
        }
    }
    return cs;
}

}  // namespace

std::vector<double> default_levels(double M) {
    return {0.3 * std::abs(M), 0.5 * std::abs(M), 0.7 * std::abs(M)};
}

std::vector<TiltMeasurement> measure_tilt(const PhaseProfile& profile,
                                          const PhaseProfile& linear_ref,
                                          const std::vector<double>& levels,
                                          double theta_tol) {
    std::vector<TiltMeasurement> out;
    const double min_sep = 0.3;
    for (double level : levels) {
        if (level == 0.0)
            throw ConfigError("measure_tilt: level must be nonzero");
        const auto lin =
            debounce(find_crossings(linear_ref, level, theta_tol), min_sep);
        const auto nl =
            debounce(find_crossings(profile, level, theta_tol), min_sep);
        if (lin.empty())
            throw LevelError("measure_tilt: level " + std::to_string(level) +
                             " not attained by the linear reference");
        if (nl.empty())
            throw LevelError("measure_tilt: level " + std::to_string(level) +
                             " not attained by the profile");
        if (lin.size() != nl.size())
            throw ShapeError(
                "measure_tilt: crossing multiplicity differs at level " +
                std::to_string(level) + " (near-shock data?)");

        std::vector<bool> used(nl.size(), false);
        double sum = 0.0;
        std::vector<double> ds;
        for (const auto& c : lin) {
            int best = -1;
            double best_dist = 1e300;
            for (size_t i = 0; i < nl.size(); ++i) {
                if (used[i] || nl[i].rising != c.rising) continue;
                const double d = std::abs(wrap_to_pi(nl[i].theta - c.theta));
                if (d < best_dist) {
                    best_dist = d;
                    best = static_cast<int>(i);
                }
            }
            if (best < 0)
                throw ShapeError("measure_tilt: unmatched crossing at level " +
                                 std::to_string(level));
            used[best] = true;
            const double d = wrap_to_pi(nl[best].theta - c.theta);
            ds.push_back(d);
            sum += d;
        }
        TiltMeasurement t;
        t.level = level;
        t.shift = sum / ds.size();
        t.recovered = t.shift / level;
        for (double d : ds) t.residual = std::max(t.residual, std::abs(d - t.shift));
        out.push_back(t);
    }
    return out;
}

Eigen::VectorXd Sinogram::moments() const {
    return values.rowwise().sum() * offset_spacing();
}

namespace {

Eigen::VectorXd make_angles(const AcquisitionGeometry& g) {
    const double span = g.full_turn ? kTwoPi : kPi;
    Eigen::VectorXd a(g.n_angles);
    for (int i = 0; i < g.n_angles; ++i) a[i] = span * i / g.n_angles;
    return a;
}

Eigen::VectorXd make_offsets(const AcquisitionGeometry& g) {
    if (g.n_offsets < 2) throw ConfigError("acquisition: need >= 2 offsets");
    return Eigen::VectorXd::LinSpaced(g.n_offsets, -g.offset_max, g.offset_max);
}

Ray acquisition_ray(double angle, double offset) {
    Eigen::VectorXd base(2), dir(2);
    base << offset * std::cos(angle), offset * std::sin(angle);
    dir << -std::sin(angle), std::cos(angle);
    return Ray(base, dir);
}

}  // namespace

Sinogram assemble_sinogram_exact(const NonlinearityField& alpha,
                                 const AcquisitionGeometry& geom) {
    if (alpha.dimension() != 2)
        throw ConfigError("assemble_sinogram: 2D fields only");
    Sinogram s;
    s.angles = make_angles(geom);
    s.offsets = make_offsets(geom);
    s.values.setZero(geom.n_angles, geom.n_offsets);
    s.valid.setOnes(geom.n_angles, geom.n_offsets);
    for (int ia = 0; ia < geom.n_angles; ++ia)
        for (int io = 0; io < geom.n_offsets; ++io) {
            try {
                s.values(ia, io) = full_line_integral(
                    alpha, acquisition_ray(s.angles[ia], s.offsets[io]));
            } catch (const Error& e) {
                s.valid(ia, io) = 0;
                s.failures.push_back("angle " + std::to_string(ia) + " offset " +
                                     std::to_string(io) + ": " + e.what());
            }
        }
    return s;
}

Sinogram assemble_sinogram_profile(const NonlinearityField& alpha,
                                   const AcquisitionGeometry& geom,
                                   const ProfileAcquisitionOptions& opts) {
    if (alpha.dimension() != 2)
        throw ConfigError("assemble_sinogram: 2D fields only");
    if (!alpha.bounded_support())
        throw ConfigError("assemble_sinogram: field must be compactly supported");
    Sinogram s;
    s.angles = make_angles(geom);
    s.offsets = make_offsets(geom);
    s.values.setZero(geom.n_angles, geom.n_offsets);
    s.valid.setOnes(geom.n_angles, geom.n_offsets);

    const double R = alpha.radius_at_level(1e-14);
    const double M = opts.amplitude;
    const PhaseProfile linear_ref = cosine_profile(M, opts.n_theta);
    std::vector<double> levels;
    for (double f : opts.level_fractions) {
        levels.push_back(f * M);
        levels.push_back(-f * M);
    }

    for (int ia = 0; ia < geom.n_angles; ++ia)
        for (int io = 0; io < geom.n_offsets; ++io) {
            try {
                const Ray chord = acquisition_ray(s.angles[ia], s.offsets[io]);
                // start behind the support so the traverse covers the chord
                const Ray ray(chord.base - (R + 0.5) * chord.direction,
                              chord.direction);
                const PhaseProfile prof =
                    evolve_profile(alpha, ray, M, 2.0 * (R + 0.5), opts.n_theta);
                const auto tilts =
                    measure_tilt(prof, linear_ref, levels, opts.theta_tol);
                double acc = 0.0;
                for (const auto& t : tilts) acc += t.recovered;
                s.values(ia, io) = acc / tilts.size();
            } catch (const Error& e) {
                s.valid(ia, io) = 0;
                s.failures.push_back("angle " + std::to_string(ia) + " offset " +
                                     std::to_string(io) + ": " + e.what());
            }
        }
    return s;
}

namespace {

// Spatial ramp-filter kernel, optionally Hann-apodized, built from the
// frequency response on a padded grid by direct inverse DFT.
Eigen::VectorXd ramp_kernel(int n_offsets, double dr, double cutoff,
                            bool hann) {
    int L = 1;
    while (L < 4 * n_offsets) L <<= 1;
    const double nyquist = 0.5 / dr;
    const double nu_cut = std::max(1e-12, cutoff * nyquist);
    Eigen::VectorXd H(L);
    for (int m = 0; m < L; ++m) {
        const double nu = std::min(m, L - m) / (L * dr);
        double v = (nu <= nu_cut) ? nu : 0.0;
        if (hann && nu <= nu_cut) v *= 0.5 * (1.0 + std::cos(kPi * nu / nu_cut));
        H[m] = v;
    }
    Eigen::VectorXd kernel(2 * n_offsets - 1);
    for (int l = -(n_offsets - 1); l <= n_offsets - 1; ++l) {
        double acc = 0.0;
        for (int m = 0; m < L; ++m) acc += H[m] * std::cos(kTwoPi * m * l / L);
        kernel[l + n_offsets - 1] = acc / L;
    }
    return kernel;
}

}  // namespace

Eigen::MatrixXd reconstruct_fbp(const Sinogram& sino, const FbpOptions& opts) {
    const int na = static_cast<int>(sino.angles.size());
    const int no = static_cast<int>(sino.offsets.size());
    if (na < 2) throw ConfigError("reconstruct_fbp: need >= 2 angles");
    if (no < 4) throw ConfigError("reconstruct_fbp: need >= 4 offsets");
    const double dr = sino.offset_spacing();
    for (int i = 1; i < no; ++i)
        if (std::abs(sino.offsets[i] - sino.offsets[i - 1] - dr) > 1e-9 * dr)
            throw ConfigError("reconstruct_fbp: offsets must be uniform");

    const double extent = opts.extent > 0 ? opts.extent
                                          : std::abs(sino.offsets[no - 1]);
    const int N = opts.image_size;
    const Eigen::VectorXd kernel = ramp_kernel(no, dr, opts.cutoff, opts.hann);

    // filter projections (invalid rays contribute zero)
    Eigen::MatrixXd filtered(na, no);
    for (int ia = 0; ia < na; ++ia) {
        for (int j = 0; j < no; ++j) {
            double acc = 0.0;
            for (int i = 0; i < no; ++i) {
                if (!sino.valid(ia, i)) continue;
                acc += sino.values(ia, i) * kernel[j - i + no - 1];
            }
            filtered(ia, j) = acc * dr;
        }
    }

    Eigen::MatrixXd image = Eigen::MatrixXd::Zero(N, N);
    const double w = kPi / na;
    const double r0 = sino.offsets[0];
    for (int ia = 0; ia < na; ++ia) {
        const double c = std::cos(sino.angles[ia]), s = std::sin(sino.angles[ia]);
        for (int ix = 0; ix < N; ++ix) {
            const double x = -extent + 2.0 * extent * ix / (N - 1);
            for (int iy = 0; iy < N; ++iy) {
                const double y = -extent + 2.0 * extent * iy / (N - 1);
                const double r = x * c + y * s;
                const double u = (r - r0) / dr;
                const int i0 = static_cast<int>(std::floor(u));
                if (i0 < 0 || i0 >= no - 1) continue;
                const double frac = u - i0;
                image(ix, iy) +=
                    w * ((1.0 - frac) * filtered(ia, i0) + frac * filtered(ia, i0 + 1));
            }
        }
    }
    return image;
}

Eigen::MatrixXd reconstruct_ridge(const Sinogram& sino,
                                  const RidgeOptions& opts) {
    const int na = static_cast<int>(sino.angles.size());
    const int no = static_cast<int>(sino.offsets.size());
    const double extent =
        opts.extent > 0 ? opts.extent : std::abs(sino.offsets[no - 1]);
    const int N = opts.image_size;
    const double px = 2.0 * extent / (N - 1);
    const int n_pix = N * N;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd b(na * no + n_pix);
    b.setZero();
    const double step = 0.5 * px;
    int row = 0;
    for (int ia = 0; ia < na; ++ia) {
        const double c = std::cos(sino.angles[ia]), s = std::sin(sino.angles[ia]);
        for (int io = 0; io < no; ++io, ++row) {
            if (!sino.valid(ia, io)) continue;
            b[row] = sino.values(ia, io);
            const double r = sino.offsets[io];
            const double half_chord = std::numbers::sqrt2 * extent;
            for (double t = -half_chord; t <= half_chord; t += step) {
                const double x = r * c - t * s;
                const double y = r * s + t * c;
                const double u = (x + extent) / px;
                const double v = (y + extent) / px;
                const int i0 = static_cast<int>(std::floor(u));
                const int j0 = static_cast<int>(std::floor(v));
                if (i0 < 0 || i0 >= N - 1 || j0 < 0 || j0 >= N - 1) continue;
                const double fu = u - i0, fv = v - j0;
                const double w00 = (1 - fu) * (1 - fv) * step;
                const double w10 = fu * (1 - fv) * step;
                const double w01 = (1 - fu) * fv * step;
                const double w11 = fu * fv * step;
                trips.emplace_back(row, i0 + j0 * N, w00);
                trips.emplace_back(row, i0 + 1 + j0 * N, w10);
                trips.emplace_back(row, i0 + (j0 + 1) * N, w01);
                trips.emplace_back(row, i0 + 1 + (j0 + 1) * N, w11);
            }
        }
    }
    const double sq = std::sqrt(opts.lambda);
    for (int k = 0; k < n_pix; ++k)
        trips.emplace_back(na * no + k, k, sq);

    Eigen::SparseMatrix<double> A(na * no + n_pix, n_pix);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> solver;
    solver.setTolerance(opts.tol);
    solver.setMaxIterations(opts.max_iters);
    solver.compute(A);
    const Eigen::VectorXd x = solver.solve(b);

    Eigen::MatrixXd image(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) image(i, j) = x[i + j * N];
    return image;
}

std::vector<Eigen::MatrixXd> reconstruct_slices(
    const std::vector<Sinogram>& slices, const FbpOptions& opts) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(slices.size());
    for (const auto& s : slices) out.push_back(reconstruct_fbp(s, opts));
    return out;
}

ReconstructionErrorReport reconstruction_error(const Eigen::MatrixXd& image,
                                               double extent,
                                               const NonlinearityField& truth) {
    const int N = static_cast<int>(image.rows());
    ReconstructionErrorReport rep;
    double acc = 0.0;
    Eigen::VectorXd x(2);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            x[0] = -extent + 2.0 * extent * ix / (N - 1);
            x[1] = -extent + 2.0 * extent * iy / (N - 1);
            const double t = truth(x);
            const double d = image(ix, iy) - t;
            acc += d * d;
            rep.max_abs = std::max(rep.max_abs, std::abs(d));
            rep.truth_peak = std::max(rep.truth_peak, std::abs(t));
        }
    rep.rmse = std::sqrt(acc / (double(N) * N));
    rep.rmse_over_peak = rep.truth_peak > 0 ? rep.rmse / rep.truth_peak : rep.rmse;
    return rep;
}

SecondHarmonicEstimate xray_from_second_harmonic(const HarmonicSpectrum& spec,
                                                 double M) {
    if (M == 0.0)
        throw ConfigError("xray_from_second_harmonic: M must be nonzero");
    if (spec.K < 2)
        throw ConfigError("xray_from_second_harmonic: spectrum lacks k=2");
    SecondHarmonicEstimate est;
    est.xray = -4.0 * std::imag(spec.at(2)) / (M * M);
    est.linear_regime = std::abs(est.xray) * std::abs(M) <= 0.3;
    return est;
}

}  // namespace wv
