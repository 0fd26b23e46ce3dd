#include "csl/hessian.hpp"
#include "csl/linalg.hpp"
#include "csl/spectral.hpp"

#include <cmath>

namespace csl {

namespace {

// Enumerate the real plane-wave basis: one function per self-conjugate grid
// frequency, a cos/sin pair per {xi, -xi} pair (canonical member: smaller
// flattened index).  Total count = grid.size().
std::vector<FieldMode> enumerate_modes(const TorusGrid& g) {
    std::vector<FieldMode> modes;
    modes.reserve(g.size());
    double invT = 1.0 / g.volume();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                int ni = (g.n - i) % g.n, nj = (g.n - j) % g.n, nk = (g.n - k) % g.n;
                std::size_t id = g.idx(i, j, k);
                std::size_t pid = g.idx(ni, nj, nk);
                if (id > pid) continue;
                if (id == pid) {
                    FieldMode m;
                    m.xi = g.freq(i, j, k);
                    m.coef[0] = {id, cd(std::sqrt(invT), 0.0)};
                    m.n_coef = 1;
                    modes.push_back(m);
                } else {
                    double c = std::sqrt(0.5 * invT);
                    FieldMode mc; // sqrt(2/|T|) cos(xi x)
                    mc.xi = g.freq(i, j, k);
                    mc.coef[0] = {id, cd(c, 0.0)};
                    mc.coef[1] = {pid, cd(c, 0.0)};
                    mc.n_coef = 2;
                    modes.push_back(mc);
                    FieldMode ms; // sqrt(2/|T|) sin(xi x)
                    ms.xi = mc.xi;
                    ms.coef[0] = {id, cd(0.0, -c)};
                    ms.coef[1] = {pid, cd(0.0, c)};
                    ms.n_coef = 2;
                    modes.push_back(ms);
                }
            }
    return modes;
}

} // namespace

HessianMatrix assemble_hessian(const IonDensityModel& model, const TorusGrid& grid,
                               double e, double M, const SolitaryPoint& S) {
    HessianMatrix out;
    out.grid = grid;
    out.model = model;
    out.e = e;
    out.M = M;
    out.S = S;
    out.modes = enumerate_modes(grid);
    out.n_field = out.modes.size();
    const std::size_t F = out.n_field;
    const std::size_t cells = std::size_t(grid.N) * grid.N * grid.N;
    out.off_psi1 = 0;
    out.off_psi2 = F;
    out.off_kappa = 2 * F;
    out.off_pi = 2 * F + 3 * cells;
    const std::size_t dim = 2 * F + 6 * cells;
    out.H = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd& H = out.H;

    const double Z = model.eZ / e;
    const double sqrtZ = std::sqrt(Z);
    Field shat = sigma_hat_grid(model, grid);

    // Field diagonal blocks.
    for (std::size_t m = 0; m < F; ++m) {
        double q2 = out.modes[m].xi.squaredNorm();
        double psi1 = q2 == 0.0 ? 0.0 : q2 + 4.0 * e * e * Z / q2;
        H(out.off_psi1 + m, out.off_psi1 + m) = psi1;
        H(out.off_psi2 + m, out.off_psi2 + m) = q2;
    }

    // Momentum block.
    for (std::size_t c = 0; c < 3 * cells; ++c)
        H(out.off_pi + c, out.off_pi + c) = 1.0 / M;

    // Displacement-displacement block: K(Delta)_{ab} =
    // (1/|T|) sum_{xi != 0} xi_a xi_b |sigma_hat(xi)|^2 cos(xi.Delta)/|xi|^2.
    const int N = grid.N;
    std::vector<Mat3> K(cells, Mat3::Zero());
    for (int d1 = 0; d1 < N; ++d1)
        for (int d2 = 0; d2 < N; ++d2)
            for (int d3 = 0; d3 < N; ++d3) {
                Vec3 delta(d1, d2, d3);
                Mat3 acc = Mat3::Zero();
                for (int i = 0; i < grid.n; ++i)
                    for (int j = 0; j < grid.n; ++j)
                        for (int k = 0; k < grid.n; ++k) {
                            Vec3 xi = grid.freq(i, j, k);
                            double q2 = xi.squaredNorm();
                            if (q2 == 0.0) continue;
                            double w = std::norm(shat.v[grid.idx(i, j, k)]) *
                                       std::cos(xi.dot(delta)) / q2;
                            acc += w * (xi * xi.transpose());
                        }
                K[(std::size_t(d1) * N + d2) * N + d3] = acc / grid.volume();
            }
    auto cell_of = [N](int a, int b, int c) {
        return (std::size_t(a) * N + b) * N + c;
    };
    for (int a1 = 0; a1 < N; ++a1)
        for (int b1 = 0; b1 < N; ++b1)
            for (int c1 = 0; c1 < N; ++c1)
                for (int a2 = 0; a2 < N; ++a2)
                    for (int b2 = 0; b2 < N; ++b2)
                        for (int c2 = 0; c2 < N; ++c2) {
                            const Mat3& blk =
                                K[cell_of(((a1 - a2) % N + N) % N, ((b1 - b2) % N + N) % N,
                                          ((c1 - c2) % N + N) % N)];
                            std::size_t r0 = out.kappa_index(cell_of(a1, b1, c1), 0);
                            std::size_t c0 = out.kappa_index(cell_of(a2, b2, c2), 0);
                            for (int a = 0; a < 3; ++a)
                                for (int b = 0; b < 3; ++b)
                                    H(r0 + a, c0 + b) = blk(a, b);
                        }

    // Psi1-kappa coupling:
    // entry = -2 e sqrt(Z) sum_xi Re[b_hat(xi) i xi_a sigma_hat(xi)
    //                                e^{i xi.(n+r)}] / |xi|^2.
    for (std::size_t m = 0; m < F; ++m) {
        const FieldMode& mode = out.modes[m];
        double q2 = mode.xi.squaredNorm();
        if (q2 == 0.0) continue;
        for (int a1 = 0; a1 < N; ++a1)
            for (int b1 = 0; b1 < N; ++b1)
                for (int c1 = 0; c1 < N; ++c1) {
                    Vec3 pos = Vec3(a1, b1, c1) + S.r;
                    Vec3 entry = Vec3::Zero();
                    for (int t = 0; t < mode.n_coef; ++t) {
                        std::size_t id = mode.coef[t].first;
                        // Recover this coefficient's own frequency.
                        int gi = int(id / (std::size_t(grid.n) * grid.n));
                        int gj = int((id / grid.n) % grid.n);
                        int gk = int(id % grid.n);
                        Vec3 xi = grid.freq(gi, gj, gk);
                        cd ph = mode.coef[t].second * cd(0.0, 1.0) * shat.v[id] *
                                std::exp(cd(0.0, xi.dot(pos)));
                        entry += xi * ph.real();
                    }
                    entry *= -2.0 * e * sqrtZ / q2;
                    std::size_t kc = out.kappa_index(cell_of(a1, b1, c1), 0);
                    for (int a = 0; a < 3; ++a) {
                        H(out.off_psi1 + m, kc + a) = entry[a];
                        H(kc + a, out.off_psi1 + m) = entry[a];
                    }
                }
    }
    return out;
}

PerturbationY basis_to_perturbation(const HessianMatrix& Hm, const Eigen::VectorXd& y) {
    const TorusGrid& g = Hm.grid;
    const std::size_t cells = std::size_t(g.N) * g.N * g.N;
    PerturbationY Y{Field(g, Layout::RealSpace), std::vector<Vec3>(cells, Vec3::Zero()),
                    std::vector<Vec3>(cells, Vec3::Zero())};
    Field hat(g, Layout::FourierSpace);
    for (std::size_t m = 0; m < Hm.n_field; ++m) {
        cd c1(y[Hm.off_psi1 + m], 0.0);
        cd c2(y[Hm.off_psi2 + m], 0.0);
        cd amp = c1 + cd(0.0, 1.0) * c2; // Psi1 + i Psi2
        if (amp == cd(0.0, 0.0)) continue;
        const FieldMode& mode = Hm.modes[m];
        for (int t = 0; t < mode.n_coef; ++t)
            hat.v[mode.coef[t].first] += amp * mode.coef[t].second;
    }
    Y.phi = fourier_inverse(hat);
    cd frame = std::exp(cd(0.0, Hm.S.alpha));
    for (auto& z : Y.phi.v) z *= frame;
    for (std::size_t c = 0; c < cells; ++c)
        for (int a = 0; a < 3; ++a) {
            Y.kappa[c][a] = y[Hm.off_kappa + 3 * c + a];
            Y.pi[c][a] = y[Hm.off_pi + 3 * c + a];
        }
    return Y;
}

CrystalState perturbed_state(const HessianMatrix& Hm, const PerturbationY& Y, double eps) {
    CrystalState X(Hm.grid, Hm.model, Hm.M, Hm.e);
    cd base = std::exp(cd(0.0, Hm.S.alpha)) * std::sqrt(Hm.model.eZ / Hm.e);
    for (std::size_t i = 0; i < X.psi.v.size(); ++i)
        X.psi.v[i] = base + eps * Y.phi.v[i];
    for (std::size_t c = 0; c < X.cells(); ++c) {
        X.q[c] = Hm.S.r + eps * Y.kappa[c];
        X.p[c] = eps * Y.pi[c];
    }
    return X;
}

NullSpace null_space(const HessianMatrix& Hm, double tol) {
    NullSpace out;
    Eigen::MatrixXd vecs;
    out.eigenvalues = sym_eigensystem(Hm.H, vecs);
    double scale = out.eigenvalues.cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < out.eigenvalues.size(); ++i)
        if (std::abs(out.eigenvalues[i]) < tol * scale) keep.push_back(i);
    out.dimension = int(keep.size());
    out.basis.resize(Hm.H.rows(), out.dimension);
    for (int i = 0; i < out.dimension; ++i) out.basis.col(i) = vecs.col(keep[i]);
    return out;
}

Eigen::MatrixXd analytic_kernel(const HessianMatrix& Hm) {
    const std::size_t cells = std::size_t(Hm.grid.N) * Hm.grid.N * Hm.grid.N;
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(Hm.H.rows(), 5);
    // Constant modes sit at xi = 0, which enumerate_modes lists first.
    U(Hm.off_psi1 + 0, 0) = 1.0;
    U(Hm.off_psi2 + 0, 1) = 1.0;
    double inv = 1.0 / std::sqrt(double(cells));
    for (std::size_t c = 0; c < cells; ++c)
        for (int a = 0; a < 3; ++a) U(Hm.kappa_index(c, a), 2 + a) = inv;
    return U;
}

int kernel_defect_dimension(const IonDensityModel& model, int N, int M_max) {
    int d = 0;
    for (int m1 = 0; m1 < N; ++m1)
        for (int m2 = 0; m2 < N; ++m2)
            for (int m3 = 0; m3 < N; ++m3) {
                if (m1 == 0 && m2 == 0 && m3 == 0) continue;
                Vec3 theta = (two_pi / N) * Vec3(m1, m2, m3);
                WienerMatrix wm = wiener_matrix(model, theta, M_max);
                Eigen::SelfAdjointEigenSolver<Mat3> es(wm.matrix);
                for (int ev = 0; ev < 3; ++ev)
                    if (es.eigenvalues()[ev] < 1e-10) ++d;
            }
    return d;
}

ConstrainedSpectrum constrained_spectrum(const HessianMatrix& Hm, bool fix_r,
                                         int head_size) {
    Eigen::MatrixXd U = analytic_kernel(Hm);
    if (fix_r) U = U.leftCols(2);
    // Penalize the removed directions far above the spectrum.
    double bound = Hm.H.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::MatrixXd A = Hm.H + (10.0 * bound) * (U * U.transpose());
    Eigen::MatrixXd vecs;
    Eigen::VectorXd w = sym_eigensystem(A, vecs);
    ConstrainedSpectrum out;
    out.min_eig = w[0];
    out.head = w.head(std::min<Eigen::Index>(head_size, w.size()));
    out.min_vector = vecs.col(0);
    return out;
}

} // namespace csl
