#include "csl/dynamics.hpp"
#include "csl/ground_states.hpp"
#include "csl/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace csl {

namespace {

void free_flight(Field& psi, double tau) {
    Field hat = to_fourier(psi);
    const TorusGrid& g = hat.grid;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                hat.v[g.idx(i, j, k)] *=
                    std::exp(cd(0.0, -0.5 * g.freq(i, j, k).squaredNorm() * tau));
    psi = fourier_inverse(hat);
}

void check_finite(const CrystalState& X) {
    for (const auto& z : X.psi.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::runtime_error("step: non-finite field value (trajectory aborted)");
    for (const auto& v : X.p)
        if (!v.allFinite())
            throw std::runtime_error("step: non-finite momentum (trajectory aborted)");
    for (const auto& v : X.q)
        if (!v.allFinite())
            throw std::runtime_error("step: non-finite displacement (trajectory aborted)");
}

} // namespace

CrystalState step(const CrystalState& X0, double dt, Scheme scheme) {
    CrystalState X = X0;
    if (scheme == Scheme::Strang) {
        std::vector<Vec3> f = force(X);
        for (std::size_t i = 0; i < X.p.size(); ++i) X.p[i] += 0.5 * dt * f[i];
        for (std::size_t i = 0; i < X.q.size(); ++i) X.q[i] += 0.5 * dt * X.p[i] / X.M;
        free_flight(X.psi, 0.5 * dt);
        {
            Field phi = poisson_green(charge_density(X));
            for (std::size_t i = 0; i < X.psi.v.size(); ++i)
                X.psi.v[i] *= std::exp(cd(0.0, X.e * phi.v[i].real() * dt));
        }
        free_flight(X.psi, 0.5 * dt);
        for (std::size_t i = 0; i < X.q.size(); ++i) X.q[i] += 0.5 * dt * X.p[i] / X.M;
        f = force(X);
        for (std::size_t i = 0; i < X.p.size(); ++i) X.p[i] += 0.5 * dt * f[i];
    } else {
        // One Picard sweep of the integral form, all right-hand sides frozen
        // at the initial state.
        Field phi = poisson_green(charge_density(X0));
        std::vector<Vec3> f = force(X0);
        for (std::size_t i = 0; i < X.psi.v.size(); ++i)
            X.psi.v[i] = X0.psi.v[i] * (1.0 + cd(0.0, X.e * phi.v[i].real() * dt));
        free_flight(X.psi, dt);
        for (std::size_t i = 0; i < X.q.size(); ++i) X.q[i] += dt * X0.p[i] / X.M;
        for (std::size_t i = 0; i < X.p.size(); ++i) X.p[i] += dt * f[i];
    }
    check_finite(X);
    return X;
}

EvolveResult evolve(const CrystalState& X0, const IntegratorConfig& cfg) {
    EvolveResult out;
    long steps = std::lround(cfg.T_end / cfg.dt);
    double E0 = energy(X0);
    double Q0 = charge(X0);
    auto record = [&](const CrystalState& X, double t) {
        MonitorRow row;
        row.t = t;
        row.E = energy(X);
        row.Q = charge(X);
        row.dV = distance_to_manifold(X).d;
        out.rows.push_back(row);
        out.max_abs_E = std::max(out.max_abs_E, std::abs(row.E));
        out.max_rel_E_drift = std::max(out.max_rel_E_drift,
                                       std::abs(row.E - E0) / std::max(std::abs(E0), 1e-300));
        out.max_rel_Q_drift = std::max(out.max_rel_Q_drift,
                                       std::abs(row.Q - Q0) / std::max(std::abs(Q0), 1e-300));
        out.max_dV = std::max(out.max_dV, row.dV);
    };
    CrystalState X = X0;
    record(X, 0.0);
    try {
        for (long s = 1; s <= steps; ++s) {
            X = step(X, cfg.dt, cfg.scheme);
            if (s % cfg.monitor_every == 0 || s == steps) record(X, s * cfg.dt);
        }
    } catch (const std::runtime_error&) {
        out.aborted = true;
    }
    return out;
}

std::vector<std::vector<Vec3>> defect_directions(const IonDensityModel& model, int N) {
    std::vector<std::vector<Vec3>> basis;
    const std::size_t cells = std::size_t(N) * N * N;
    auto add_candidate = [&](const std::vector<Vec3>& cand) {
        std::vector<Vec3> v = cand;
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < cells; ++i) dot += v[i].dot(b[i]);
            for (std::size_t i = 0; i < cells; ++i) v[i] -= dot * b[i];
        }
        double nrm2 = 0.0;
        for (const auto& x : v) nrm2 += x.squaredNorm();
        if (nrm2 > 1e-16) {
            double inv = 1.0 / std::sqrt(nrm2);
            for (auto& x : v) x *= inv;
            basis.push_back(std::move(v));
        }
    };
    for (int m1 = 0; m1 < N; ++m1)
        for (int m2 = 0; m2 < N; ++m2)
            for (int m3 = 0; m3 < N; ++m3) {
                if (m1 == 0 && m2 == 0 && m3 == 0) continue;
                Vec3 theta = (two_pi / N) * Vec3(m1, m2, m3);
                WienerMatrix wm = wiener_matrix(model, theta, 8);
                Eigen::SelfAdjointEigenSolver<Mat3> es(wm.matrix);
                for (int ev = 0; ev < 3; ++ev) {
                    if (es.eigenvalues()[ev] >= 1e-10) continue;
                    Vec3 w = es.eigenvectors().col(ev);
                    std::vector<Vec3> vc(cells), vs(cells);
                    for (int a = 0; a < N; ++a)
                        for (int b = 0; b < N; ++b)
                            for (int c = 0; c < N; ++c) {
                                double ph = theta.dot(Vec3(a, b, c));
                                std::size_t id = (std::size_t(a) * N + b) * N + c;
                                vc[id] = std::cos(ph) * w;
                                vs[id] = std::sin(ph) * w;
                            }
                    add_candidate(vc);
                    add_candidate(vs);
                }
            }
    return basis;
}

namespace {

struct Perturbation {
    Field phi;               // additive field perturbation
    std::vector<Vec3> kappa; // displacement perturbation
    std::vector<Vec3> pi;    // momentum perturbation
};

CrystalState apply_perturbation(const CrystalState& S, const Perturbation& Y,
                                double scale) {
    CrystalState X = S;
    for (std::size_t i = 0; i < X.psi.v.size(); ++i)
        X.psi.v[i] += scale * Y.phi.v[i];
    // Exact charge renormalization back to the constraint sphere.
    double target = S.Z() * S.grid.volume();
    double s = std::sqrt(target / l2_sq(X.psi));
    for (auto& z : X.psi.v) z *= s;
    for (std::size_t i = 0; i < X.q.size(); ++i) X.q[i] += scale * Y.kappa[i];
    for (std::size_t i = 0; i < X.p.size(); ++i) X.p[i] += scale * Y.pi[i];
    return X;
}

} // namespace

std::vector<StabilityRow> orbital_stability_experiment(
    const IonDensityModel& model, const TorusGrid& grid, double e, double M,
    const std::vector<double>& deltas, double T_end, double dt,
    PerturbationMode mode, unsigned long long seed) {
    CrystalState S = periodic_ground_state(model, grid, 0.0, Vec3::Zero(), e, M).X;
    const std::size_t cells = S.cells();

    Perturbation Y{Field(grid, Layout::RealSpace),
                   std::vector<Vec3>(cells, Vec3::Zero()),
                   std::vector<Vec3>(cells, Vec3::Zero())};

    std::vector<std::vector<Vec3>> V = defect_directions(model, grid.N);

    if (mode == PerturbationMode::KernelMomentum) {
        if (V.empty())
            throw std::invalid_argument(
                "orbital_stability_experiment: no kernel direction exists for this model");
        Y.pi = V.front();
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        // Smooth random field with no constant mode: charge-preserving to
        // first order and orthogonal to the gauge direction.
        Field hat(grid, Layout::FourierSpace);
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                for (int k = 0; k < grid.n; ++k) {
                    Vec3 xi = grid.freq(i, j, k);
                    if (xi.squaredNorm() == 0.0) continue;
                    double damp = std::exp(-0.1 * xi.squaredNorm());
                    hat.v[grid.idx(i, j, k)] = damp * cd(gauss(rng), gauss(rng));
                }
        Y.phi = fourier_inverse(hat);
        for (std::size_t i = 0; i < cells; ++i) {
            Y.kappa[i] = Vec3(gauss(rng), gauss(rng), gauss(rng));
            Y.pi[i] = Vec3(gauss(rng), gauss(rng), gauss(rng));
        }
        auto remove_mean = [&](std::vector<Vec3>& v) {
            Vec3 mean = Vec3::Zero();
            for (const auto& x : v) mean += x;
            mean /= double(cells);
            for (auto& x : v) x -= mean;
        };
        remove_mean(Y.kappa);
        remove_mean(Y.pi);
        // Project off the Wiener-kernel subspace: motion along it feels no
        // restoring force and would grow ballistically.
        auto project_off = [&](std::vector<Vec3>& v) {
            for (const auto& b : V) {
                double dot = 0.0;
                for (std::size_t i = 0; i < cells; ++i) dot += v[i].dot(b[i]);
                for (std::size_t i = 0; i < cells; ++i) v[i] -= dot * b[i];
            }
        };
        project_off(Y.kappa);
        project_off(Y.pi);
    }

    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.T_end = T_end;
    cfg.scheme = Scheme::Strang;
    cfg.monitor_every = 10;

    std::vector<StabilityRow> rows;
    for (double delta : deltas) {
        double scale = delta;
        // One calibration pass makes d_V(X0, S) = delta to high accuracy.
        for (int pass = 0; pass < 2; ++pass) {
            double d0 = distance_to_manifold(apply_perturbation(S, Y, scale)).d;
            if (d0 > 0.0) scale *= delta / d0;
        }
        CrystalState X0 = apply_perturbation(S, Y, scale);
        EvolveResult res = evolve(X0, cfg);
        rows.push_back({delta, res.max_dV});
    }
    return rows;
}

} // namespace csl
