#include <doctest.h>

#include <random>

#include "csl/hessian.hpp"
#include "csl/spectral.hpp"

using namespace csl;

namespace {

Eigen::VectorXd random_direction(const HessianMatrix& H, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd y(H.dim());
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = gauss(rng);
    return y / y.norm();
}

double energy_at(const HessianMatrix& H, const Eigen::VectorXd& y, double eps) {
    return energy(perturbed_state(H, basis_to_perturbation(H, y), eps));
}

} // namespace

TEST_CASE("hessian is symmetric and matches finite differences") {
    TorusGrid g(2, 2);
    SolitaryPoint S{0.7, Vec3(0.3, 0.1, 0.6)};
    auto H = assemble_hessian(IonDensityModel::gaussian_sinc(1.0), g, 1.0, 1.3, S);
    CHECK((H.H - H.H.transpose()).norm() < 1e-12);
    double eps = 1e-3;
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        Eigen::VectorXd y = random_direction(H, seed);
        double quad = y.dot(H.H * y);
        // E(S) = 0, so the second difference is E(+) + E(-) over eps^2.
        double fd = (energy_at(H, y, eps) + energy_at(H, y, -eps)) / (eps * eps);
        CHECK(quad == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("taylor remainder beyond the quadratic term vanishes cubically") {
    TorusGrid g(2, 2);
    SolitaryPoint S{0.0, Vec3::Zero()};
    auto H = assemble_hessian(IonDensityModel::box(1.0), g, 1.0, 1.0, S);
    Eigen::VectorXd y = random_direction(H, 7);
    double quad = y.dot(H.H * y);
    auto remainder = [&](double eps) {
        return std::abs(energy_at(H, y, eps) - 0.5 * quad * eps * eps);
    };
    double r1 = remainder(1e-2), r2 = remainder(5e-3);
    double order = std::log2(r1 / r2);
    CHECK(order > 2.7);
    CHECK(order < 3.3);
}

TEST_CASE("kernel dimension is 5 when the discrete wiener condition holds") {
    TorusGrid g(2, 2);
    auto H = assemble_hessian(IonDensityModel::sine_gaussian(1.0), g, 1.0, 1.0,
                              SolitaryPoint{});
    auto ns = null_space(H);
    CHECK(ns.dimension == 5);
    // All non-kernel eigenvalues are strictly positive: the state is a
    // minimum.
    CHECK(ns.eigenvalues[0] > -1e-8);
    CHECK(ns.eigenvalues[5] > 1e-6);
}

TEST_CASE("kernel grows by the defect dimension for the box ion") {
    TorusGrid g(2, 2);
    auto model = IonDensityModel::box(1.0);
    CHECK(kernel_defect_dimension(model, 2) == 9);
    auto H = assemble_hessian(model, g, 1.0, 1.0, SolitaryPoint{});
    auto ns = null_space(H);
    CHECK(ns.dimension == 5 + 9);
    CHECK(ns.eigenvalues[0] > -1e-8);
}

TEST_CASE("analytic kernel columns annihilate the hessian") {
    TorusGrid g(2, 2);
    auto H = assemble_hessian(IonDensityModel::smoothed_box(1.0, 2), g, 1.0, 2.0,
                              SolitaryPoint{0.4, Vec3(0.2, 0.0, 0.5)});
    Eigen::MatrixXd K = analytic_kernel(H);
    REQUIRE(K.cols() == 5);
    CHECK((K.transpose() * K - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-12);
    CHECK((H.H * K).norm() < 1e-10);
}

TEST_CASE("constrained spectrum separates wiener-passing from failing ions") {
    TorusGrid g(2, 2);
    auto Hgood = assemble_hessian(IonDensityModel::sine_gaussian(1.0), g, 1.0, 1.0,
                                  SolitaryPoint{});
    auto good = constrained_spectrum(Hgood);
    CHECK(good.min_eig > 1e-6);
    auto Hbox = assemble_hessian(IonDensityModel::box(1.0), g, 1.0, 1.0,
                                 SolitaryPoint{});
    auto box = constrained_spectrum(Hbox);
    CHECK(std::abs(box.min_eig) < 1e-8);
}

TEST_CASE("fixing r leaves the translation kernel in play") {
    TorusGrid g(2, 2);
    auto H = assemble_hessian(IonDensityModel::sine_gaussian(1.0), g, 1.0, 1.0,
                              SolitaryPoint{});
    auto cs = constrained_spectrum(H, true);
    // Uniform ion translations remain zero modes of the constrained form.
    CHECK(std::abs(cs.min_eig) < 1e-8);
    REQUIRE(cs.head.size() >= 3);
    CHECK(std::abs(cs.head[2]) < 1e-8);
}

TEST_CASE("basis map produces charge-neutral field modes") {
    TorusGrid g(2, 2);
    auto H = assemble_hessian(IonDensityModel::box(1.0), g, 1.0, 1.0,
                              SolitaryPoint{0.3, Vec3::Zero()});
    // A non-constant mode must integrate to zero against the ground state:
    // pick the unit vector of a nonzero-frequency Psi1 mode.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(H.dim());
    y[1] = 1.0;
    auto Y = basis_to_perturbation(H, y);
    cd mean(0.0, 0.0);
    for (const cd& z : Y.phi.v) mean += z;
    CHECK(std::abs(mean) * g.cell_volume() < 1e-12);
    CHECK(l2_sq(Y.phi) == doctest::Approx(1.0).epsilon(1e-10));
}
