#include "csl/crystal.hpp"
#include "csl/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace csl {

Field sigma_hat_grid(const IonDensityModel& model, const TorusGrid& grid) {
    Field out(grid, Layout::FourierSpace);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            for (int k = 0; k < grid.n; ++k)
                out.v[grid.idx(i, j, k)] = ion_fourier(model, grid.freq(i, j, k));
    return out;
}

namespace {

// Per-ion, per-axis phase tables e^{-i xi_a (n_a + q_a)} for all grid
// frequencies; products of three table entries give the ion's phase factor.
void phase_tables(const TorusGrid& g, const Vec3& pos, cd* t0, cd* t1, cd* t2) {
    cd* tabs[3] = {t0, t1, t2};
    for (int a = 0; a < 3; ++a)
        for (int k = 0; k < g.n; ++k)
            tabs[a][k] = std::exp(cd(0.0, -g.freq1(k) * pos[a]));
}

} // namespace

Field ion_lattice_density_hat(const CrystalState& X) {
    const TorusGrid& g = X.grid;
    Field shat = sigma_hat_grid(X.model, g);
    Field out(g, Layout::FourierSpace);
    std::vector<cd> t0(g.n), t1(g.n), t2(g.n);
    for (int a = 0; a < g.N; ++a)
        for (int b = 0; b < g.N; ++b)
            for (int c = 0; c < g.N; ++c) {
                Vec3 pos = X.cell_point(a, b, c) + X.q[X.cell_idx(a, b, c)];
                phase_tables(g, pos, t0.data(), t1.data(), t2.data());
                for (int i = 0; i < g.n; ++i)
                    for (int j = 0; j < g.n; ++j) {
                        cd pij = t0[i] * t1[j];
                        for (int k = 0; k < g.n; ++k)
                            out.v[g.idx(i, j, k)] += pij * t2[k];
                    }
            }
    double invT = 1.0 / g.volume();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                std::size_t id = g.idx(i, j, k);
                // sigma_hat(-xi) = conj(sigma_hat(xi)) for real sigma.
                out.v[id] *= invT * std::conj(shat.v[id]);
            }
    return out;
}

Field charge_density(const CrystalState& X) {
    Field rho = fourier_inverse(ion_lattice_density_hat(X));
    const Field& psi = X.psi;
    for (std::size_t i = 0; i < rho.v.size(); ++i)
        rho.v[i] -= X.e * std::norm(psi.v[i]);
    return rho;
}

double energy(const CrystalState& X) {
    double kin_ion = 0.0;
    for (const auto& pn : X.p) kin_ion += pn.squaredNorm();
    kin_ion /= 2.0 * X.M;
    return 0.5 * grad_sq(X.psi) + 0.5 * coulomb_form(charge_density(X)) + kin_ion;
}

double charge(const CrystalState& X) { return l2_sq(X.psi); }

std::vector<Vec3> force(const CrystalState& X) {
    const TorusGrid& g = X.grid;
    Field rho_hat = to_fourier(charge_density(X));
    Field phi_hat = poisson_green(rho_hat);
    Field shat = sigma_hat_grid(X.model, g);

    // w(xi) = phi_hat(xi) sigma_hat(xi); then
    // f_a(n) = -sum_xi Re[ i xi_a w(xi) e^{i xi.(n+q(n))} ].
    std::vector<cd> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = phi_hat.v[i] * shat.v[i];

    std::vector<Vec3> f(X.cells(), Vec3::Zero());
    std::vector<cd> t0(g.n), t1(g.n), t2(g.n);
    for (int a = 0; a < g.N; ++a)
        for (int b = 0; b < g.N; ++b)
            for (int c = 0; c < g.N; ++c) {
                std::size_t id = X.cell_idx(a, b, c);
                Vec3 pos = X.cell_point(a, b, c) + X.q[id];
                phase_tables(g, pos, t0.data(), t1.data(), t2.data());
                Vec3 acc = Vec3::Zero();
                for (int i = 0; i < g.n; ++i)
                    for (int j = 0; j < g.n; ++j) {
                        // conj of the tables gives e^{+i xi.(n+q)}.
                        cd pij = std::conj(t0[i] * t1[j]);
                        for (int k = 0; k < g.n; ++k) {
                            cd z = w[g.idx(i, j, k)] * pij * std::conj(t2[k]);
                            Vec3 xi = g.freq(i, j, k);
                            // Re[i xi_a z] = -xi_a Im z.
                            acc += xi * z.imag();
                        }
                    }
                f[id] = acc; // minus sign and Re[i.] = -Im combine to +Im
            }
    return f;
}

namespace {

double wrap_half(double t, double period) {
    double r = std::remainder(t, period);
    return r;
}

} // namespace

ManifoldDistance distance_to_manifold(const CrystalState& X) {
    const TorusGrid& g = X.grid;
    double sqrtZ = std::sqrt(X.Z());

    // alpha*: the H^1 inner product of psi with a constant reduces to the L^2
    // one, so the optimal phase is the argument of the mean of psi.
    cd mean(0.0, 0.0);
    for (const auto& z : X.psi.v) mean += z;
    double alpha = std::abs(mean) > 0.0 ? std::arg(mean) : 0.0;
    if (alpha < 0.0) alpha += two_pi;

    Field diff = X.psi;
    cd ph = std::exp(cd(0.0, alpha)) * sqrtZ;
    for (auto& z : diff.v) z -= ph;
    double dpsi = std::sqrt(h1_sq(diff));

    double pnorm2 = 0.0;
    for (const auto& pn : X.p) pnorm2 += pn.squaredNorm();
    double dp = std::sqrt(pnorm2);

    // The squared displacement objective separates per axis into
    // f_a(r) = sum_n wrap_half(q_n[a] - r, L)^2, a piecewise-quadratic
    // function of r whose pieces correspond to cyclic unwrappings of the
    // sorted values.  Each piece is minimized at the mean of its unwrapped
    // values, so scanning the n cut positions finds the exact minimizer.
    const double L = g.side();
    Vec3 best = Vec3::Zero();
    double bestv = 0.0;
    for (int a = 0; a < 3; ++a) {
        std::vector<double> v;
        v.reserve(X.q.size());
        for (const auto& qn : X.q) {
            double t = std::fmod(qn[a], L);
            if (t < 0.0) t += L;
            v.push_back(t);
        }
        std::sort(v.begin(), v.end());
        const double n = double(v.size());
        double S = 0.0;
        for (double t : v) S += t;
        auto f1 = [&](double r) {
            double s = 0.0;
            for (double t : v) {
                double w = wrap_half(t - r, L);
                s += w * w;
            }
            return s;
        };
        double br = 0.0, bf = f1(0.0);
        for (std::size_t c = 0; c < v.size(); ++c) {
            double r = std::fmod((S + L * double(c)) / n, L);
            if (r < 0.0) r += L;
            double f = f1(r);
            if (f < bf) {
                bf = f;
                br = r;
            }
        }
        best[a] = br;
        bestv += bf;
    }
    for (int a = 0; a < 3; ++a) {
        best[a] = std::fmod(best[a], g.side());
        if (best[a] < 0.0) best[a] += g.side();
    }

    ManifoldDistance out;
    out.alpha = alpha;
    out.r = best;
    out.d = dpsi + std::sqrt(bestv) + dp;
    return out;
}

} // namespace csl
