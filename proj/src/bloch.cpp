#include "csl/bloch.hpp"
#include "csl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace csl {

Eigen::MatrixXcd BlochMatrices::full() const {
    std::size_t n = dim(), h = F() + 3;
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
    B.topLeftCorner(h, h) = Bu;
    for (std::size_t i = 0; i < h; ++i) B(h + i, h + i) = Bv_diag[i];
    return B;
}

BlochMatrices bloch_energy_matrix(const IonDensityModel& model, const Vec3& theta,
                                  int K_cut, double e, double M) {
    BlochMatrices bm;
    bm.theta = theta;
    bm.K_cut = K_cut;
    bm.e = e;
    bm.M = M;
    bm.Z = model.eZ / e;
    {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            double r = std::remainder(theta[a], two_pi);
            d2 += r * r;
        }
        bm.d_theta = std::sqrt(d2);
        if (bm.d_theta <= 1e-6)
            throw std::invalid_argument("bloch_energy_matrix: theta too close to the dual lattice");
    }
    for (int m1 = -K_cut; m1 <= K_cut; ++m1)
        for (int m2 = -K_cut; m2 <= K_cut; ++m2)
            for (int m3 = -K_cut; m3 <= K_cut; ++m3)
                bm.ms.push_back(Vec3i(m1, m2, m3));
    const std::size_t F = bm.ms.size();
    bm.kappa2.resize(F);

    WienerMatrix wm = wiener_matrix(model, theta, std::max(8, K_cut));
    bm.sigma_theta = wm.matrix;
    bm.sigma0 = wm.sigma0;

    bm.Bu = Eigen::MatrixXcd::Zero(F + 3, F + 3);
    bm.Bv_diag.resize(F + 3);
    double sqrtZ = std::sqrt(bm.Z);
    for (std::size_t m = 0; m < F; ++m) {
        Vec3 kap = theta + two_pi * bm.ms[m].cast<double>();
        double q2 = kap.squaredNorm();
        bm.kappa2[m] = q2;
        bm.Bu(m, m) = q2 + 4.0 * e * e * bm.Z / q2;
        bm.Bv_diag[m] = q2;
        cd shat = ion_fourier(model, kap);
        for (int b = 0; b < 3; ++b) {
            cd w = cd(0.0, 2.0 * e * sqrtZ) * kap[b] * shat / q2;
            bm.Bu(m, F + b) = w;
            bm.Bu(F + b, m) = std::conj(w);
        }
    }
    for (int a = 0; a < 3; ++a) {
        bm.Bv_diag[F + a] = 1.0 / M;
        for (int b = 0; b < 3; ++b) bm.Bu(F + a, F + b) = bm.sigma_theta(a, b);
    }

    // Small spectrum of B_u via the Schur complement S = Sigma - W* D^{-1} W.
    // Folding W into the lattice sum gives S = sum w_m g_m kappa kappa^T /
    // |kappa|^2 with g_m = |kappa|^4 / (|kappa|^4 + 4 e^2 Z) for modes inside
    // the plane-wave window and g_m = 1 outside; eigenvalues of B_u below the
    // diagonal scale min(D) ~ 4eZ agree with those of S up to O(lambda^2).
    // The Gram-factor SVD keeps the result meaningful far below the absolute
    // resolution of a dense eigensolve of B_u.
    {
        int Ml = std::max(8, K_cut);
        int side = 2 * Ml + 1;
        Eigen::MatrixXd G(std::size_t(side) * side * side, 3);
        Eigen::Index row = 0;
        for (int a = -Ml; a <= Ml; ++a)
            for (int b = -Ml; b <= Ml; ++b)
                for (int c = -Ml; c <= Ml; ++c) {
                    Vec3 xi = theta + two_pi * Vec3(a, b, c);
                    double q = xi.squaredNorm();
                    if (q == 0.0) continue;
                    double w = std::norm(ion_fourier(model, xi)) / q;
                    if (std::max({std::abs(a), std::abs(b), std::abs(c)}) <= K_cut)
                        w *= q * q / (q * q + 4.0 * e * e * bm.Z);
                    G.row(row++) = std::sqrt(w) * xi.transpose();
                }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G.topRows(row));
        double smin = svd.singularValues()(2);
        bm.b0_small = smin * smin;
    }
    return bm;
}

SandwichReport positivity_sandwich(const BlochMatrices& bm, double epsilon) {
    SandwichReport rep;
    Eigen::VectorXd w = herm_eigenvalues(bm.Bu);
    // Below the dense solver's absolute resolution the Schur-complement value
    // carries the small spectrum; above it the dense value is exact enough.
    double lam = w[0] > 1e-8 ? std::min(w[0], bm.b0_small) : bm.b0_small;
    rep.b0 = std::min(lam, bm.Bv_diag.minCoeff());
    rep.sigma0 = bm.sigma0;
    rep.upper = bm.sigma0;
    double d4 = std::pow(bm.d_theta, 4);
    rep.lower = epsilon * d4 * bm.sigma0;
    rep.ok = rep.b0 >= rep.lower - 1e-12 && rep.b0 <= rep.upper + 1e-12;
    return rep;
}

double calibrate_epsilon(const IonDensityModel& model, int K_cut, double e, double M,
                         const std::vector<Vec3>& training) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& th : training) {
        BlochMatrices bm = bloch_energy_matrix(model, th, K_cut, e, M);
        SandwichReport rep = positivity_sandwich(bm, 0.0);
        double d4 = std::pow(bm.d_theta, 4);
        if (rep.sigma0 > 0.0 && d4 > 0.0)
            best = std::min(best, rep.b0 / (d4 * rep.sigma0));
    }
    return 0.5 * best;
}

KMatrices k_matrix(const BlochMatrices& bm) {
    const std::size_t h = bm.F() + 3, n = bm.dim();
    Eigen::MatrixXcd B = bm.full();
    Eigen::MatrixXcd vecs;
    Eigen::VectorXd w = herm_eigensystem(B, vecs);
    if (w[0] < -1e-8)
        throw std::runtime_error("k_matrix: B(theta) is not positive semidefinite");
    KMatrices km;
    Eigen::VectorXd root(n), root_inv(n);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        double v = w[i];
        if (v < 1e-12) {
            v = 1e-12;
            ++km.clip_count;
        }
        root[i] = std::sqrt(v);
        root_inv[i] = 1.0 / root[i];
    }
    km.Lambda = vecs * root.asDiagonal() * vecs.adjoint();
    km.Lambda_inv = vecs * root_inv.asDiagonal() * vecs.adjoint();

    // i J in the (u, v) ordering: u_dot = C (Bz)_v, v_dot = -C (Bz)_u with
    // C = diag(I_F / 2, I_3).
    Eigen::VectorXd C(h);
    for (std::size_t i = 0; i < bm.F(); ++i) C[i] = 0.5;
    for (std::size_t i = bm.F(); i < h; ++i) C[i] = 1.0;
    Eigen::MatrixXcd iJ = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < h; ++i) {
        iJ(i, h + i) = cd(0.0, 1.0) * C[i];
        iJ(h + i, i) = cd(0.0, -1.0) * C[i];
    }
    Eigen::MatrixXcd K = km.Lambda * iJ * km.Lambda;
    K = 0.5 * (K + K.adjoint().eval()); // enforce exact Hermiticity
    km.omega = herm_eigensystem(K, km.vectors);
    return km;
}

Eigen::VectorXcd linearized_evolve(const KMatrices& km, const Eigen::VectorXcd& Y0,
                                   double t) {
    Eigen::VectorXcd w = km.vectors.adjoint() * (km.Lambda * Y0);
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w[i] *= std::exp(cd(0.0, -km.omega[i] * t));
    return km.Lambda_inv * (km.vectors * w);
}

Eigen::VectorXd dispersion_omegas(const BlochMatrices& bm) {
    const std::size_t h = bm.F() + 3;
    Eigen::VectorXd droot(h);
    for (std::size_t m = 0; m < bm.F(); ++m) droot[m] = 0.5 * std::sqrt(bm.kappa2[m]);
    for (std::size_t i = bm.F(); i < h; ++i) droot[i] = 1.0 / std::sqrt(bm.M);
    Eigen::MatrixXcd A = droot.asDiagonal() * bm.Bu * droot.asDiagonal();
    // For real ion transforms the coupling block is purely imaginary, and the
    // unitary rotation diag(I, iI3) of the ion columns makes A real symmetric;
    // the real solver is several times faster at large plane-wave cutoffs.
    Eigen::MatrixXcd R = A;
    R.rightCols(3) *= cd(0.0, 1.0);
    R.bottomRows(3) *= cd(0.0, -1.0);
    Eigen::VectorXd w2;
    if (R.imag().cwiseAbs().maxCoeff() < 1e-14 * R.real().cwiseAbs().maxCoeff())
        w2 = sym_eigenvalues(R.real());
    else
        w2 = herm_eigenvalues(A);
    Eigen::VectorXd w(h);
    for (std::size_t i = 0; i < h; ++i) w[i] = std::sqrt(std::max(0.0, w2[i]));
    return w;
}

DispersionTable dispersion_relations(const IonDensityModel& model,
                                     const std::vector<Vec3>& theta_path,
                                     int n_eigs, int K_cut, double e, double M) {
    DispersionTable out;
    Eigen::MatrixXcd prev_vecs;
    std::vector<int> perm; // branch label -> eigen index at current theta
    std::vector<std::vector<double>> by_branch(n_eigs);
    for (const auto& th : theta_path) {
        BlochMatrices bm = bloch_energy_matrix(model, th, K_cut, e, M);
        const std::size_t h = bm.F() + 3;
        Eigen::VectorXd droot(h);
        for (std::size_t m = 0; m < bm.F(); ++m) droot[m] = 0.5 * std::sqrt(bm.kappa2[m]);
        for (std::size_t i = bm.F(); i < h; ++i) droot[i] = 1.0 / std::sqrt(bm.M);
        Eigen::MatrixXcd A = droot.asDiagonal() * bm.Bu * droot.asDiagonal();
        Eigen::MatrixXcd vecs;
        Eigen::VectorXd w2 = herm_eigensystem(A, vecs);

        std::vector<int> this_perm(n_eigs);
        if (prev_vecs.size() == 0) {
            for (int b = 0; b < n_eigs; ++b) this_perm[b] = b;
        } else {
            std::vector<bool> used(h, false);
            for (int b = 0; b < n_eigs; ++b) {
                // Maximal overlap with the previous eigenvector of branch b.
                Eigen::VectorXcd ref = prev_vecs.col(perm[b]);
                int best = -1;
                double best_ov = -1.0;
                for (int cand = 0; cand < int(h); ++cand) {
                    if (used[cand]) continue;
                    double ov = std::abs((ref.adjoint() * vecs.col(cand))(0, 0));
                    if (ov > best_ov + 1e-12) {
                        best_ov = ov;
                        best = cand;
                    }
                }
                used[best] = true;
                this_perm[b] = best;
            }
        }
        for (int b = 0; b < n_eigs; ++b) {
            double om = std::sqrt(std::max(0.0, w2[this_perm[b]]));
            out.rows.push_back({th, b, om});
            by_branch[b].push_back(om);
        }
        prev_vecs = vecs;
        perm = this_perm;
    }
    for (int b = 0; b < n_eigs; ++b) {
        double lo = *std::min_element(by_branch[b].begin(), by_branch[b].end());
        double hi = *std::max_element(by_branch[b].begin(), by_branch[b].end());
        if (hi - lo < 1e-6) out.flat_branches.push_back(b);
    }
    return out;
}

double growth_exponent_fit(const IonDensityModel& model, const Vec3& theta,
                           int K_cut, double e, double M) {
    BlochMatrices bm = bloch_energy_matrix(model, theta, K_cut, e, M);
    Eigen::VectorXd w = dispersion_omegas(bm);
    // The spectrum of K is {+-omega}: duplicate, drop the near-zero entries,
    // and sort ascending.
    std::vector<double> om;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] < 1e-10) continue;
        om.push_back(w[i]);
        om.push_back(w[i]);
    }
    std::sort(om.begin(), om.end());
    // Truncation-valid window: branches inside the inscribed ball of the
    // mode cube; beyond it the cube corners distort the counting law.
    double limit = 0.5 * std::pow(two_pi * K_cut, 2);
    std::size_t kmax = 0;
    while (kmax < om.size() && om[kmax] <= limit) ++kmax;
    if (kmax < 8) throw std::runtime_error("growth_exponent_fit: too few eigenvalues");
    std::size_t k0 = kmax / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = 0;
    for (std::size_t k = k0; k < kmax; ++k) {
        double x = std::log(double(k + 1));
        double y = std::log(om[k]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FiberProvider real_fiber_provider(const IonDensityModel& model, int K_cut,
                                  double e, double M) {
    return [model, K_cut, e, M](const Vec3& theta) {
        KMatrices km = k_matrix(bloch_energy_matrix(model, theta, K_cut, e, M));
        return Fiber{km.omega, km.vectors};
    };
}

DecayCurve dispersive_decay_experiment(const FiberProvider& provider, int L,
                                       const std::vector<double>& times,
                                       double alpha, double branch_cutoff,
                                       unsigned long long seed) {
    DecayCurve out;
    out.times = times;
    const std::size_t P = std::size_t(L) * L * L;
    std::vector<Vec3> thetas(P);
    std::vector<Fiber> fibers(P);
    auto theta_of = [&](int a, int b, int c) -> Vec3 {
        return (two_pi / L) * Vec3(a + 0.5, b + 0.5, c + 0.5);
    };
    int dim = -1;
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b)
            for (int c = 0; c < L; ++c) {
                std::size_t id = (std::size_t(a) * L + b) * L + c;
                thetas[id] = theta_of(a, b, c);
                fibers[id] = provider(thetas[id]);
                if (dim < 0) dim = int(fibers[id].omega.size());
            }

    // Initial data: smooth bump times the projection onto the occupied
    // branches applied to a fixed random vector.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd w0(dim);
    for (int i = 0; i < dim; ++i) w0[i] = cd(gauss(rng), gauss(rng));
    w0.normalize();

    int occupied = -1;
    std::vector<Eigen::VectorXcd> coeff(P); // eigenbasis coefficients per theta
    std::vector<std::vector<int>> occ_idx(P);
    for (std::size_t id = 0; id < P; ++id) {
        const Fiber& f = fibers[id];
        double bump = 1.0;
        for (int a = 0; a < 3; ++a) bump *= std::pow(std::sin(0.5 * thetas[id][a]), 4);
        std::vector<int> idx;
        for (int k = 0; k < dim; ++k)
            if (f.omega[k] > 1e-9 && f.omega[k] < branch_cutoff) idx.push_back(k);
        if (occupied < 0) occupied = int(idx.size());
        else if (occupied != int(idx.size()))
            throw std::runtime_error(
                "dispersive_decay_experiment: branch count below the cutoff is "
                "not constant across the grid");
        Eigen::VectorXcd c(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            c[j] = bump * (f.vectors.col(idx[j]).adjoint() * w0)(0, 0);
        coeff[id] = c;
        occ_idx[id] = idx;
    }
    out.occupied_branches = occupied;

    // Phase-resolution guard: max group velocity over occupied branches,
    // estimated from adjacent grid points (sorted occupied frequencies).
    double vmax = 0.0;
    double dtheta = two_pi / L;
    auto occ_sorted = [&](std::size_t id) {
        std::vector<double> v;
        for (int k : occ_idx[id]) v.push_back(fibers[id].omega[k]);
        std::sort(v.begin(), v.end());
        return v;
    };
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b)
            for (int c = 0; c < L; ++c) {
                std::size_t id = (std::size_t(a) * L + b) * L + c;
                std::size_t nbr[3] = {
                    (std::size_t((a + 1) % L) * L + b) * L + c,
                    (std::size_t(a) * L + (b + 1) % L) * L + c,
                    (std::size_t(a) * L + b) * L + (c + 1) % L};
                auto v0 = occ_sorted(id);
                for (std::size_t nb : nbr) {
                    auto v1 = occ_sorted(nb);
                    for (std::size_t k = 0; k < v0.size(); ++k)
                        vmax = std::max(vmax, std::abs(v1[k] - v0[k]) / dtheta);
                }
            }
    out.t_guard = vmax > 0.0 ? pi / (dtheta * vmax) : std::numeric_limits<double>::infinity();

    // Weighted norm of the inverse Bloch transform at each requested time.
    for (double t : times) {
        // W(theta, t) in the ambient basis.
        std::vector<Eigen::VectorXcd> W(P);
        for (std::size_t id = 0; id < P; ++id) {
            const Fiber& f = fibers[id];
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
            for (std::size_t j = 0; j < occ_idx[id].size(); ++j) {
                int k = occ_idx[id][j];
                acc += coeff[id][j] * std::exp(cd(0.0, -f.omega[k] * t)) * f.vectors.col(k);
            }
            W[id] = acc;
        }
        // Inverse Bloch transform, one separable axis at a time; cell labels
        // n run over the centered window [-L/2, L/2).
        std::vector<int> labels(L);
        for (int i = 0; i < L; ++i) labels[i] = i - L / 2;
        Eigen::MatrixXcd T(L, L); // kernel e^{-i theta_axis(a) * n}
        for (int n = 0; n < L; ++n)
            for (int a = 0; a < L; ++a)
                T(n, a) = std::exp(cd(0.0, -(two_pi / L) * (a + 0.5) * labels[n]));
        auto pass = [&](std::vector<Eigen::VectorXcd>& data, int axis) {
            std::vector<Eigen::VectorXcd> next(P, Eigen::VectorXcd::Zero(dim));
            std::size_t stride[3] = {std::size_t(L) * L, std::size_t(L), 1};
            for (int u = 0; u < L; ++u)
                for (int v = 0; v < L; ++v) {
                    // Iterate over the plane orthogonal to `axis`.
                    std::size_t base = 0;
                    int others[2];
                    int oi = 0;
                    for (int ax = 0; ax < 3; ++ax)
                        if (ax != axis) others[oi++] = ax;
                    base = std::size_t(u) * stride[others[0]] +
                           std::size_t(v) * stride[others[1]];
                    for (int n = 0; n < L; ++n) {
                        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
                        for (int a = 0; a < L; ++a)
                            acc += T(n, a) * data[base + std::size_t(a) * stride[axis]];
                        next[base + std::size_t(n) * stride[axis]] = acc;
                    }
                }
            data.swap(next);
        };
        pass(W, 0);
        pass(W, 1);
        pass(W, 2);
        double norm2 = 0.0;
        for (int i1 = 0; i1 < L; ++i1)
            for (int i2 = 0; i2 < L; ++i2)
                for (int i3 = 0; i3 < L; ++i3) {
                    Vec3 n(labels[i1], labels[i2], labels[i3]);
                    double wgt = std::pow(1.0 + n.squaredNorm(), alpha);
                    std::size_t id = (std::size_t(i1) * L + i2) * L + i3;
                    norm2 += wgt * (W[id] / double(P)).squaredNorm();
                }
        out.norms.push_back(std::sqrt(norm2));
    }
    return out;
}

} // namespace csl
