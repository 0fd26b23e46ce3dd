#include "csl/ion_models.hpp"
#include "csl/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace csl {

namespace {

// 2 sin(t/2)/t with the removable singularity at t = 0.
double sinc_half(double t) {
    if (t == 0.0) return 1.0;
    return std::sin(0.5 * t) / (0.5 * t);
}

double binomial(int n, int j) {
    double b = 1.0;
    for (int i = 1; i <= j; ++i) b = b * (n - j + i) / i;
    return b;
}

// Cardinal B-spline of order k (k-fold convolution of the unit box),
// supported on [-k/2, k/2]; its transform is sinc_half(t)^k.
double bspline(int k, double x) {
    double t = x + 0.5 * k;
    if (t <= 0.0 || t >= k) return 0.0;
    double fact = 1.0;
    for (int i = 2; i < k; ++i) fact *= i;
    double s = 0.0;
    for (int j = 0; j <= k; ++j) {
        double u = t - j;
        if (u <= 0.0) break;
        double term = binomial(k, j) * std::pow(u, k - 1);
        s += (j % 2 == 0) ? term : -term;
    }
    return s / fact;
}

// Per-axis Fourier factor of unit total charge.
double fhat1(const IonDensityModel& m, double t) {
    switch (m.kind) {
        case IonKind::Box: return sinc_half(t);
        case IonKind::SmoothedBox: return std::pow(sinc_half(t), m.k);
        case IonKind::GaussianSinc: return sinc_half(t) * std::exp(-t * t);
        default: throw std::logic_error("fhat1: kind is not separable");
    }
}

// Upper bound on the squared per-axis factor, used by the lattice-sum tail
// estimate.  Always <= 1 and integrable along the dual lattice.
double axis_majorant(const IonDensityModel& m, double t) {
    double box = std::min(1.0, 4.0 / (t * t));
    switch (m.kind) {
        case IonKind::Box:
        case IonKind::SmoothedBox: return box;
        case IonKind::GaussianSinc: return box * std::exp(-2.0 * t * t);
        case IonKind::SineGaussian: return std::exp(-t * t / 8.0);
        default: return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

IonDensityModel IonDensityModel::box(double eZ) {
    IonDensityModel m;
    m.kind = IonKind::Box;
    m.eZ = eZ;
    return m;
}

IonDensityModel IonDensityModel::smoothed_box(double eZ, int k) {
    if (k < 1) throw std::invalid_argument("smoothed_box: k must be >= 1");
    IonDensityModel m;
    m.kind = IonKind::SmoothedBox;
    m.eZ = eZ;
    m.k = k;
    return m;
}

IonDensityModel IonDensityModel::gaussian_sinc(double eZ) {
    IonDensityModel m;
    m.kind = IonKind::GaussianSinc;
    m.eZ = eZ;
    return m;
}

IonDensityModel IonDensityModel::sine_gaussian(double eZ) {
    IonDensityModel m;
    m.kind = IonKind::SineGaussian;
    m.eZ = eZ;
    return m;
}

IonDensityModel IonDensityModel::tabulated(Field samples, bool interpolate) {
    IonDensityModel m;
    m.kind = IonKind::Tabulated;
    m.table_hat = fourier_forward(samples);
    m.table = std::move(samples);
    m.interpolate = interpolate;
    // eZ is the integral of the samples over the torus.
    cd s(0.0, 0.0);
    for (const auto& z : m.table->v) s += z;
    m.eZ = (s * m.table->grid.cell_volume()).real();
    return m;
}

bool IonDensityModel::has_real_space() const {
    return kind == IonKind::Box || kind == IonKind::SmoothedBox ||
           kind == IonKind::GaussianSinc;
}

double IonDensityModel::profile1(double x) const {
    switch (kind) {
        case IonKind::Box:
            if (std::abs(x) < 0.5) return 1.0;
            if (std::abs(x) == 0.5) return 0.5;
            return 0.0;
        case IonKind::SmoothedBox: return bspline(k, x);
        case IonKind::GaussianSinc:
            return 0.5 * (std::erf(0.5 * (x + 0.5)) - std::erf(0.5 * (x - 0.5)));
        default:
            throw std::logic_error("profile1: no real-space formula for this kind");
    }
}

double IonDensityModel::sigma_real(const Vec3& x) const {
    return eZ * profile1(x[0]) * profile1(x[1]) * profile1(x[2]);
}

cd ion_fourier(const IonDensityModel& model, const Vec3& xi) {
    switch (model.kind) {
        case IonKind::Box:
        case IonKind::SmoothedBox:
        case IonKind::GaussianSinc:
            return cd(model.eZ * fhat1(model, xi[0]) * fhat1(model, xi[1]) *
                          fhat1(model, xi[2]),
                      0.0);
        case IonKind::SineGaussian: {
            double num = 0.0, den = 0.0;
            for (int a = 0; a < 3; ++a) {
                double h = 0.5 * xi[a];
                double s = std::sin(h);
                num += s * s;
                den += h * h;
            }
            double ratio = den == 0.0 ? 1.0 : num / den;
            return cd(model.eZ * std::exp(-xi.squaredNorm() / 16.0) * ratio, 0.0);
        }
        case IonKind::Tabulated: {
            const Field& hat = *model.table_hat;
            const TorusGrid& g = hat.grid;
            // xi = (2 pi / N) s with integer s on the sample grid.
            int s[3];
            bool on_grid = true;
            for (int a = 0; a < 3; ++a) {
                double raw = xi[a] * g.N / two_pi;
                double r = std::round(raw);
                if (std::abs(raw - r) > 1e-9) on_grid = false;
                // Indices beyond the Nyquist box alias back onto the grid:
                // the tabulated density is its own spectral truncation.
                s[a] = int(r);
            }
            if (on_grid) {
                // sigma_hat(xi) = |T| * c(-xi).
                int i = ((-s[0]) % g.n + g.n) % g.n;
                int j = ((-s[1]) % g.n + g.n) % g.n;
                int k = ((-s[2]) % g.n + g.n) % g.n;
                return g.volume() * hat.v[g.idx(i, j, k)];
            }
            if (!model.interpolate)
                throw std::invalid_argument(
                    "ion_fourier: tabulated model queried off its frequency "
                    "grid without interpolation enabled");
            // Trapezoid-rule transform of the samples.
            const Field& tab = *model.table;
            cd acc(0.0, 0.0);
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j)
                    for (int k = 0; k < g.n; ++k) {
                        Vec3 x = g.point(i, j, k);
                        acc += std::exp(cd(0.0, xi.dot(x))) * tab.v[g.idx(i, j, k)];
                    }
            return acc * g.cell_volume();
        }
    }
    throw std::logic_error("ion_fourier: unknown kind");
}

JelliumReport check_jellium(const IonDensityModel& model, double tol) {
    JelliumReport rep;
    rep.window = 4;
    for (int a = -rep.window; a <= rep.window; ++a)
        for (int b = -rep.window; b <= rep.window; ++b)
            for (int c = -rep.window; c <= rep.window; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                Vec3 xi(two_pi * a, two_pi * b, two_pi * c);
                double v = std::abs(ion_fourier(model, xi));
                if (v > rep.max_abs) {
                    rep.max_abs = v;
                    rep.worst_m = Vec3i(a, b, c);
                }
            }
    rep.pass = rep.max_abs < tol;
    return rep;
}

Field periodized_density(const IonDensityModel& model, const TorusGrid& grid) {
    Field hat(grid, Layout::FourierSpace);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            for (int k = 0; k < grid.n; ++k) {
                int si = grid.signed_index(i);
                int sj = grid.signed_index(j);
                int sk = grid.signed_index(k);
                // Only frequencies on 2 pi Z^3 survive the lattice sum.
                if (si % grid.N || sj % grid.N || sk % grid.N) continue;
                Vec3 xi = grid.freq(i, j, k);
                hat.v[grid.idx(i, j, k)] = ion_fourier(model, -xi);
            }
    return fourier_inverse(hat);
}

WienerMatrix wiener_matrix(const IonDensityModel& model, const Vec3& theta,
                           int M_max, double raise_until_tail) {
    {
        // Distance of theta to the coarse dual lattice 2 pi Z^3.
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            double r = std::remainder(theta[a], two_pi);
            d2 += r * r;
        }
        if (std::sqrt(d2) <= 1e-8)
            throw std::invalid_argument("wiener_matrix: theta too close to the dual lattice");
    }
    if (M_max < 2) throw std::invalid_argument("wiener_matrix: M_max must be >= 2");

    auto tail_bound = [&](int M) -> double {
        if (!model.closed_form())
            return std::numeric_limits<double>::quiet_NaN();
        // One-axis sum of the majorant along the shifted dual lattice
        // (worst case over |theta_j| <= pi) and its tail beyond M.
        double S1 = 1.0;
        for (int m = 1; m <= 4000; ++m) {
            double term = 2.0 * axis_majorant(model, two_pi * m - pi);
            S1 += term;
            if (term < 1e-16 * S1 && m > M + 2) break;
        }
        double T1;
        if (model.kind == IonKind::Box || model.kind == IonKind::SmoothedBox) {
            // Integral bound for sum_{|m|>M} 4/(2 pi m - pi)^2.
            T1 = 4.0 / (pi * (two_pi * M - pi));
        } else {
            T1 = 0.0;
            double last = 0.0;
            for (int m = M + 1; m <= M + 60; ++m) {
                last = 2.0 * axis_majorant(model, two_pi * m - pi);
                T1 += last;
            }
            T1 += last; // remainder is dominated by the last (decreasing) term
        }
        return model.eZ * model.eZ * 3.0 * S1 * S1 * T1;
    };

    if (raise_until_tail > 0.0) {
        while (M_max < 64 && !(tail_bound(M_max) < raise_until_tail)) M_max *= 2;
    }

    WienerMatrix out;
    out.theta = theta;
    out.M_max = M_max;
    out.tail_bound = tail_bound(M_max);
    Mat3 S = Mat3::Zero();
    const int side = 2 * M_max + 1;
    // Gram factor: Sigma = G^T G with one row sqrt(w) xi per lattice term.
    // sigma0 = sigma_min(G)^2 resolves tiny minimal eigenvalues that would
    // drown in the rounding noise of the O(1) entries of the 3x3 sum.
    Eigen::MatrixXd G(std::size_t(side) * side * side, 3);
    Eigen::Index row = 0;
    for (int a = -M_max; a <= M_max; ++a)
        for (int b = -M_max; b <= M_max; ++b)
            for (int c = -M_max; c <= M_max; ++c) {
                Vec3 xi = theta + two_pi * Vec3(a, b, c);
                double q = xi.squaredNorm();
                if (q == 0.0) continue;
                double w = std::norm(ion_fourier(model, xi)) / q;
                S += w * (xi * xi.transpose());
                G.row(row++) = std::sqrt(w) * xi.transpose();
            }
    out.matrix = S;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G.topRows(row));
    double smin = svd.singularValues()(2);
    out.sigma0 = smin * smin;
    return out;
}

std::vector<WienerScanRow> wiener_scan(const IonDensityModel& model,
                                       const std::vector<Vec3>& theta_grid,
                                       int M_max, double tol) {
    std::vector<WienerScanRow> rows;
    rows.reserve(theta_grid.size());
    for (const auto& th : theta_grid) {
        WienerMatrix wm = wiener_matrix(model, th, M_max);
        rows.push_back({th, wm.sigma0, wm.sigma0 < tol});
    }
    return rows;
}

} // namespace csl
