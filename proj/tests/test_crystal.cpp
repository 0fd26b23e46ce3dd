#include <doctest.h>

#include <random>

#include "csl/crystal.hpp"
#include "csl/spectral.hpp"

using namespace csl;

namespace {

CrystalState solitary_state(const IonDensityModel& model, const TorusGrid& g,
                            double alpha, const Vec3& r, double e, double M) {
    CrystalState X(g, model, M, e);
    cd val = std::exp(cd(0.0, alpha)) * std::sqrt(X.Z());
    for (auto& z : X.psi.v) z = val;
    for (auto& qn : X.q) qn = r;
    return X;
}

CrystalState random_state(const IonDensityModel& model, const TorusGrid& g,
                          unsigned seed) {
    CrystalState X(g, model, 1.7, 1.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    cd base = std::sqrt(X.Z());
    for (auto& z : X.psi.v) z = base + 0.2 * cd(gauss(rng), gauss(rng));
    for (auto& qn : X.q) qn = 0.1 * Vec3(gauss(rng), gauss(rng), gauss(rng));
    for (auto& pn : X.p) pn = 0.1 * Vec3(gauss(rng), gauss(rng), gauss(rng));
    return X;
}

// Naive discrete Fourier transform, used as the independent quadrature oracle
// on tiny grids.
Field naive_forward(const Field& f) {
    const TorusGrid& g = f.grid;
    Field out(g, Layout::FourierSpace);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                cd acc(0.0, 0.0);
                Vec3 xi = g.freq(i, j, k);
                for (int a = 0; a < g.n; ++a)
                    for (int b = 0; b < g.n; ++b)
                        for (int c = 0; c < g.n; ++c)
                            acc += f(a, b, c) *
                                   std::exp(cd(0.0, -xi.dot(g.point(a, b, c))));
                out(i, j, k) = acc / double(g.size());
            }
    return out;
}

} // namespace

TEST_CASE("charge density vanishes identically at a solitary state") {
    TorusGrid g(2, 4);
    auto model = IonDensityModel::gaussian_sinc(2.0);
    auto X = solitary_state(model, g, 0.7, Vec3(0.2, 0.5, 0.9), 1.0, 1.0);
    Field rho = charge_density(X);
    double worst = 0.0;
    for (const cd& z : rho.v) worst = std::max(worst, std::abs(z));
    CHECK(worst < 1e-10);
    CHECK(energy(X) == doctest::Approx(0.0).epsilon(0).scale(1).epsilon(1e-12));
}

TEST_CASE("charge density integrates to the net charge") {
    TorusGrid g(2, 4);
    auto model = IonDensityModel::box(1.5);
    auto X = random_state(model, g, 11);
    Field rho = charge_density(X);
    cd total(0.0, 0.0);
    for (const cd& z : rho.v) total += z;
    total *= g.cell_volume();
    double expect = model.eZ * double(X.cells()) - X.e * charge(X);
    CHECK(total.real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(std::abs(total.imag()) < 1e-10);
    CHECK(max_abs_imag(rho) < 1e-10);
}

TEST_CASE("ion lattice density matches a direct mode sum on a tiny grid") {
    TorusGrid g(2, 2);
    auto model = IonDensityModel::smoothed_box(1.2, 2);
    auto X = random_state(model, g, 5);
    Field hat = ion_lattice_density_hat(X);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                Vec3 xi = g.freq(i, j, k);
                cd acc(0.0, 0.0);
                for (int a = 0; a < g.N; ++a)
                    for (int b = 0; b < g.N; ++b)
                        for (int c = 0; c < g.N; ++c) {
                            Vec3 pos = X.cell_point(a, b, c) + X.q[X.cell_idx(a, b, c)];
                            acc += std::exp(cd(0.0, -xi.dot(pos)));
                        }
                cd expect = ion_fourier(model, -xi) * acc / g.volume();
                worst = std::max(worst, std::abs(hat(i, j, k) - expect));
            }
    CHECK(worst < 1e-12);
}

TEST_CASE("energy agrees with an independent naive-transform evaluation") {
    TorusGrid g(1, 4);
    auto model = IonDensityModel::box(1.0);
    auto X = random_state(model, g, 21);
    // Kinetic + Coulomb + ion kinetic from scratch with the naive transform.
    Field psi_hat = naive_forward(X.psi);
    double kinetic = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                kinetic += g.freq(i, j, k).squaredNorm() * std::norm(psi_hat(i, j, k));
    kinetic *= 0.5 * g.volume();
    Field rho = charge_density(X);
    Field rho_hat = naive_forward(rho);
    double coulomb = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                double q2 = g.freq(i, j, k).squaredNorm();
                if (q2 > 0.0) coulomb += std::norm(rho_hat(i, j, k)) / q2;
            }
    coulomb *= 0.5 * g.volume();
    double ion_kin = 0.0;
    for (const auto& pn : X.p) ion_kin += pn.squaredNorm();
    ion_kin /= 2.0 * X.M;
    CHECK(energy(X) == doctest::Approx(kinetic + coulomb + ion_kin).epsilon(1e-11));
}

TEST_CASE("charge is the quadrature of |psi|^2") {
    TorusGrid g(2, 3);
    auto X = random_state(IonDensityModel::box(1.0), g, 3);
    double direct = 0.0;
    for (const cd& z : X.psi.v) direct += std::norm(z);
    direct *= g.cell_volume();
    CHECK(charge(X) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("force is the negative gradient of the energy in q") {
    TorusGrid g(2, 3);
    auto model = IonDensityModel::gaussian_sinc(1.3);
    auto X = random_state(model, g, 7);
    auto f = force(X);
    REQUIRE(f.size() == X.cells());
    double eps = 1e-5;
    for (std::size_t cell : {std::size_t(0), std::size_t(3), std::size_t(7)})
        for (int a = 0; a < 3; ++a) {
            CrystalState Xp = X, Xm = X;
            Xp.q[cell][a] += eps;
            Xm.q[cell][a] -= eps;
            double fd = -(energy(Xp) - energy(Xm)) / (2 * eps);
            CHECK(f[cell][a] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
}

TEST_CASE("energy is invariant under lattice translation and global phase") {
    TorusGrid g(2, 3);
    auto model = IonDensityModel::box(1.1);
    auto X = random_state(model, g, 9);
    double E0 = energy(X);

    // Global phase on the electron field.
    CrystalState Xphase = X;
    cd ph = std::exp(cd(0.0, 1.23));
    for (auto& z : Xphase.psi.v) z *= ph;
    CHECK(energy(Xphase) == doctest::Approx(E0).epsilon(1e-12));

    // Cyclic shift by one cell along the first axis: psi samples move by P,
    // the ion arrays move by one cell index.
    CrystalState Xs = X;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                Xs.psi(i, j, k) = X.psi((i + g.P) % g.n, j, k);
    for (int a = 0; a < g.N; ++a)
        for (int b = 0; b < g.N; ++b)
            for (int c = 0; c < g.N; ++c) {
                Xs.q[Xs.cell_idx(a, b, c)] = X.q[X.cell_idx((a + 1) % g.N, b, c)];
                Xs.p[Xs.cell_idx(a, b, c)] = X.p[X.cell_idx((a + 1) % g.N, b, c)];
            }
    CHECK(energy(Xs) == doctest::Approx(E0).epsilon(1e-10));
}

TEST_CASE("distance to the manifold recovers the parameters at a solitary state") {
    TorusGrid g(2, 4);
    auto model = IonDensityModel::gaussian_sinc(1.0);
    double alpha = 1.2;
    // r on the 16^3 candidate grid (spacing N/16): recovered exactly.
    Vec3 r(0.25, 1.5, 0.875);
    auto X = solitary_state(model, g, alpha, r, 1.0, 1.0);
    auto d = distance_to_manifold(X);
    CHECK(d.d < 1e-9);
    CHECK(d.alpha == doctest::Approx(alpha).epsilon(1e-9));
    for (int a = 0; a < 3; ++a) CHECK(d.r[a] == doctest::Approx(r[a]).epsilon(1e-9));
}

TEST_CASE("off-grid r is recovered by the simplex refinement") {
    TorusGrid g(2, 4);
    auto model = IonDensityModel::gaussian_sinc(1.0);
    Vec3 r(0.3, 1.43, 0.81);
    auto X = solitary_state(model, g, 0.4, r, 1.0, 1.0);
    auto d = distance_to_manifold(X);
    // The refinement budget is 20 simplex steps, so off-grid recovery is
    // approximate: it must beat the coarse-grid spacing N/16 clearly.
    CHECK(d.d < 2e-2);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(d.r[a] - r[a]) < 6e-3);
}

TEST_CASE("distance respects the torus wrap of ion displacements") {
    TorusGrid g(2, 4);
    auto model = IonDensityModel::box(1.0);
    // r close to the wrap seam: displacements r and r - N are the same point;
    // 1.875 sits on the candidate grid.
    auto X = solitary_state(model, g, 0.0, Vec3(1.875, 0.0, 0.0), 1.0, 1.0);
    auto d = distance_to_manifold(X);
    CHECK(d.d < 1e-9);
    CHECK(d.r[0] == doctest::Approx(1.875).epsilon(1e-9));
}

TEST_CASE("distance grows linearly in a small perturbation") {
    TorusGrid g(2, 3);
    auto model = IonDensityModel::box(1.0);
    auto base = solitary_state(model, g, 0.0, Vec3::Zero(), 1.0, 1.0);
    auto perturbed = [&](double delta) {
        CrystalState X = base;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k)
                    X.psi(i, j, k) +=
                        delta * std::exp(cd(0.0, (two_pi / g.N) * i));
        X.p[2] += delta * Vec3(1.0, 0.0, 0.0);
        return distance_to_manifold(X).d;
    };
    double d1 = perturbed(1e-3), d2 = perturbed(5e-4);
    CHECK(d1 > 0.0);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(1e-3));
}
