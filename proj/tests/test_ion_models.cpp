#include <doctest.h>

#include "csl/ion_models.hpp"
#include "csl/spectral.hpp"

using namespace csl;

namespace {

Field gaussian_samples(const TorusGrid& g, double width = 1.0) {
    Field f(g, Layout::RealSpace);
    Vec3 c(0.5 * g.N, 0.5 * g.N, 0.5 * g.N);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                f(i, j, k) = std::exp(-(g.point(i, j, k) - c).squaredNorm() / width);
    return f;
}

} // namespace

TEST_CASE("box transform: closed-form values and dual-lattice zeros") {
    auto m = IonDensityModel::box(1.0);
    CHECK(ion_fourier(m, Vec3::Zero()).real() == doctest::Approx(1.0));
    // Independently computed 1D values: 2 sin(pi/2)/pi and (2 sin(0.65)/1.3)^3.
    CHECK(ion_fourier(m, Vec3(pi, 0, 0)).real() ==
          doctest::Approx(0.63661977236758138).epsilon(1e-14));
    CHECK(ion_fourier(m, Vec3(1.3, 1.3, 1.3)).real() ==
          doctest::Approx(0.80710013855643992).epsilon(1e-14));
    for (int a = 1; a <= 5; ++a) {
        CHECK(std::abs(ion_fourier(m, Vec3(two_pi * a, 0.3, -0.2))) < 1e-13);
        CHECK(std::abs(ion_fourier(m, Vec3(0.3, -two_pi * a, 1.0))) < 1e-13);
    }
}

TEST_CASE("smoothed box and gaussian sinc transforms match hand values") {
    auto sb = IonDensityModel::smoothed_box(1.0, 3);
    CHECK(ion_fourier(sb, Vec3(2.1, 0, 0)).real() ==
          doctest::Approx(0.56380022117464623).epsilon(1e-14));
    auto gs = IonDensityModel::gaussian_sinc(1.0);
    CHECK(ion_fourier(gs, Vec3(2.1, 2.1, 2.1)).real() ==
          doctest::Approx(1.0125331396230328e-06).epsilon(1e-12));
}

TEST_CASE("transform scales linearly in the total charge") {
    auto m1 = IonDensityModel::box(1.0);
    auto m3 = IonDensityModel::box(3.0);
    Vec3 xi(0.9, -1.7, 2.3);
    CHECK(ion_fourier(m3, xi).real() ==
          doctest::Approx(3.0 * ion_fourier(m1, xi).real()).epsilon(1e-14));
}

TEST_CASE("real-space profiles integrate to the stated charge") {
    // Trapezoid quadrature of the 1D profile over its support.
    auto quad = [](const IonDensityModel& m, double reach) {
        int n = 24000; // multiple of 16: nodes land on the box breakpoints
        double h = 2 * reach / n, acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            acc += w * m.profile1(-reach + i * h);
        }
        return acc * h;
    };
    CHECK(quad(IonDensityModel::box(1.0), 0.75) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(quad(IonDensityModel::smoothed_box(1.0, 4), 2.5) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(quad(IonDensityModel::gaussian_sinc(1.0), 13.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(IonDensityModel::sine_gaussian(1.0).has_real_space());
}

TEST_CASE("jellium check passes for the lattice-adapted kinds") {
    for (auto m : {IonDensityModel::box(2.0), IonDensityModel::smoothed_box(1.0, 3),
                   IonDensityModel::gaussian_sinc(1.5),
                   IonDensityModel::sine_gaussian(1.0)}) {
        auto rep = check_jellium(m);
        CHECK(rep.pass);
        CHECK(rep.max_abs < 1e-12);
    }
}

TEST_CASE("jellium check fails for a generic tabulated gaussian") {
    auto m = IonDensityModel::tabulated(gaussian_samples(TorusGrid(1, 16)));
    auto rep = check_jellium(m);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_abs > 1e-4);
}

TEST_CASE("tabulated transform is exact on the sample grid") {
    TorusGrid g(1, 16);
    auto m = IonDensityModel::tabulated(gaussian_samples(g));
    // sigma_hat(xi) = |T| c(-xi) must reproduce the quadrature transform of
    // the samples at a grid frequency.
    Vec3 xi(two_pi * 2, -two_pi, 0.0);
    cd direct(0.0, 0.0);
    Field samples = gaussian_samples(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                direct += samples(i, j, k) *
                          std::exp(cd(0.0, xi.dot(g.point(i, j, k))));
    direct *= g.cell_volume();
    CHECK(std::abs(ion_fourier(m, xi) - direct) < 1e-12);
    // Off-grid frequencies throw unless interpolation was requested.
    CHECK_THROWS(ion_fourier(m, Vec3(0.1, 0, 0)));
    auto mi = IonDensityModel::tabulated(gaussian_samples(g), true);
    CHECK(std::abs(ion_fourier(mi, xi) - direct) < 1e-12);
    CHECK(std::isfinite(ion_fourier(mi, Vec3(0.1, 0, 0)).real()));
}

TEST_CASE("periodized density is the jellium constant for adapted kinds") {
    TorusGrid g(2, 8);
    for (auto m : {IonDensityModel::box(1.0), IonDensityModel::gaussian_sinc(2.0)}) {
        Field rho = periodized_density(m, g);
        double worst = 0.0;
        for (const cd& z : rho.v) worst = std::max(worst, std::abs(z - cd(m.eZ, 0.0)));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("periodized density of a generic ion is visibly non-flat") {
    TorusGrid g(2, 8);
    auto m = IonDensityModel::tabulated(gaussian_samples(TorusGrid(2, 8)));
    Field rho = periodized_density(m, g);
    double lo = 1e300, hi = -1e300;
    for (const cd& z : rho.v) {
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
    }
    CHECK(hi - lo > 1e-3);
}

TEST_CASE("wiener matrix reproduces independently summed values") {
    // Frozen reference values from a separate implementation of the lattice
    // sum at the same truncation |m|_inf <= 8.
    auto box = IonDensityModel::box(1.0);
    auto wm = wiener_matrix(box, Vec3(pi, pi, pi), 8);
    CHECK(wm.sigma0 == doctest::Approx(0.31000369011600826).epsilon(1e-12));
    CHECK(wm.matrix(0, 0) == doctest::Approx(0.31000463974287035).epsilon(1e-12));
    CHECK(wm.matrix(0, 1) == doctest::Approx(9.4962686251302087e-07).epsilon(1e-9));
    auto wm2 = wiener_matrix(box, Vec3(0.7, 1.9, 4.1), 8);
    CHECK(wm2.sigma0 == doctest::Approx(0.040879882407703835).epsilon(1e-12));
    CHECK(wm2.matrix(0, 1) == doctest::Approx(0.066431303343625278).epsilon(1e-12));
    auto gs = IonDensityModel::gaussian_sinc(1.0);
    auto wm3 = wiener_matrix(gs, Vec3(0.7, 1.9, 4.1), 8);
    CHECK(wm3.matrix(0, 0) == doctest::Approx(5.1137194817340516e-10).epsilon(1e-10));
}

TEST_CASE("wiener matrix is symmetric, PSD and even in theta") {
    auto m = IonDensityModel::smoothed_box(1.3, 2);
    Vec3 theta(0.9, 2.2, 5.0);
    auto a = wiener_matrix(m, theta, 6);
    CHECK((a.matrix - a.matrix.transpose()).norm() < 1e-14);
    CHECK(a.sigma0 > -1e-14);
    auto b = wiener_matrix(m, -theta, 6);
    CHECK((a.matrix - b.matrix).norm() < 1e-12);
}

TEST_CASE("wiener matrix is 2 pi periodic for rapidly decaying kinds") {
    auto m = IonDensityModel::gaussian_sinc(1.0);
    Vec3 theta(0.8, 1.1, 2.9);
    auto a = wiener_matrix(m, theta, 8);
    auto b = wiener_matrix(m, theta + Vec3(two_pi, 0, 0), 8);
    CHECK((a.matrix - b.matrix).norm() < 1e-13);
}

TEST_CASE("box degenerates on the zone face with kernel e1") {
    auto box = IonDensityModel::box(1.0);
    auto wm = wiener_matrix(box, Vec3(0.0, pi, pi), 8);
    CHECK(wm.sigma0 < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat3> es(wm.matrix);
    Vec3 v = es.eigenvectors().col(0);
    CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-8);
    // The gaussian-modulated box shares the plane zeros ...
    auto gs = wiener_matrix(IonDensityModel::gaussian_sinc(1.0), Vec3(0.0, pi, pi), 8);
    CHECK(gs.sigma0 < 1e-10);
    // ... while the sine-gaussian kind only vanishes at the lattice itself.
    auto sg = wiener_matrix(IonDensityModel::sine_gaussian(1.0), Vec3(0.0, pi, pi), 8);
    CHECK(sg.sigma0 > 1e-6);
}

TEST_CASE("wiener matrix rejects lattice-adjacent theta") {
    auto box = IonDensityModel::box(1.0);
    CHECK_THROWS(wiener_matrix(box, Vec3(two_pi, 0, 0), 8));
    CHECK_THROWS(wiener_matrix(box, Vec3(1e-10, 0, 0), 8));
}

TEST_CASE("tail bound is honest for the gaussian kinds") {
    auto m = IonDensityModel::gaussian_sinc(1.0);
    Vec3 theta(1.0, 2.0, 3.0);
    auto coarse = wiener_matrix(m, theta, 2);
    auto fine = wiener_matrix(m, theta, 12);
    CHECK((coarse.matrix - fine.matrix).norm() <= 10 * coarse.tail_bound + 1e-30);
    auto tab = IonDensityModel::tabulated(gaussian_samples(TorusGrid(1, 8)), true);
    CHECK(std::isnan(wiener_matrix(tab, theta, 2).tail_bound));
}

TEST_CASE("raising the cutoff shrinks the reported tail") {
    auto m = IonDensityModel::box(1.0);
    Vec3 theta(1.0, 2.0, 3.0);
    auto base = wiener_matrix(m, theta, 2);
    auto raised = wiener_matrix(m, theta, 2, base.tail_bound / 4);
    CHECK(raised.M_max > base.M_max);
    CHECK(raised.tail_bound < base.tail_bound);
}

TEST_CASE("wiener scan flags exactly the degenerate points") {
    auto box = IonDensityModel::box(1.0);
    std::vector<Vec3> grid = {Vec3(0.0, pi, pi), Vec3(pi, pi, pi), Vec3(1.0, 2.0, 3.0)};
    auto rows = wiener_scan(box, grid);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].degenerate);
    CHECK_FALSE(rows[1].degenerate);
    CHECK_FALSE(rows[2].degenerate);
    CHECK(rows[1].sigma0 == doctest::Approx(0.31000369011600826).epsilon(1e-12));
}
