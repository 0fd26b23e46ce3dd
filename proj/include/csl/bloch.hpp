// bloch.hpp
// Infinite-crystal linear stability: the quasimomentum fibers of the
// linearized energy B(theta), the Hamiltonian generator A = J B, the
// symmetrized generator K = Lambda (iJ) Lambda with Lambda = B^{1/2},
// dispersion relations, the positivity sandwich, and the dispersive decay
// experiment on a quasimomentum grid.
//
// Basis ordering: [a1 modes | q_hat (3)] then [a2 modes | p_hat (3)], with
// plane waves kappa_m = theta + 2 pi m, |m|_inf <= K_cut.  The leading block
// B_u carries all coupling; the trailing block is diagonal.
#pragma once

#include <functional>
#include "csl/ion_models.hpp"

namespace csl {

struct BlochMatrices {
    Vec3 theta = Vec3::Zero();
    int K_cut = 4;
    double e = 1.0, M = 1.0, Z = 1.0;
    double d_theta = 0.0;               // dist(theta, 2 pi Z^3)
    std::vector<Vec3i> ms;              // mode lattice points
    Eigen::VectorXd kappa2;             // |kappa_m|^2 per mode
    Eigen::MatrixXcd Bu;                // coupled block, size F+3
    Eigen::VectorXd Bv_diag;            // trailing diagonal block: |kappa|^2, 1/M
    Mat3 sigma_theta = Mat3::Zero();    // lattice-sum matrix Sigma(theta)
    double sigma0 = 0.0;
    // Minimal eigenvalue of the Schur complement Sigma - W* D^{-1} W, the
    // small-spectrum part of B_u, computed from its Gram factor so values far
    // below the dense eigensolver resolution stay meaningful.
    double b0_small = 0.0;

    std::size_t F() const { return ms.size(); }
    std::size_t dim() const { return 2 * (F() + 3); }
    // Full Hermitian matrix (assembled on demand; used by k_matrix and tests).
    Eigen::MatrixXcd full() const;
};

BlochMatrices bloch_energy_matrix(const IonDensityModel& model, const Vec3& theta,
                                  int K_cut, double e, double M);

struct SandwichReport {
    double b0 = 0.0;       // min eig B(theta)
    double sigma0 = 0.0;
    double upper = 0.0;    // Sigma_0(theta)
    double lower = 0.0;    // epsilon d^4 Sigma_0(theta)
    bool ok = false;       // lower <= b0 <= upper (+ slack)
};

SandwichReport positivity_sandwich(const BlochMatrices& bm, double epsilon);

// 0.5 * min over the training grid of b0 / (d^4 Sigma_0); deterministic.
double calibrate_epsilon(const IonDensityModel& model, int K_cut, double e, double M,
                         const std::vector<Vec3>& training);

struct KMatrices {
    Eigen::MatrixXcd Lambda;     // B^{1/2}
    Eigen::MatrixXcd Lambda_inv;
    Eigen::VectorXd omega;       // eigenvalues of K (ascending)
    Eigen::MatrixXcd vectors;    // eigenvectors of K (columns)
    int clip_count = 0;          // eigenvalues of B clipped at 1e-12
};

// Requires B positive semidefinite; eigenvalues below 1e-12 are clipped
// (counted) before rooting.  Throws if B has an eigenvalue < -1e-8.
KMatrices k_matrix(const BlochMatrices& bm);

// Y(t) = Lambda^{-1} e^{-iKt} Lambda Y0.
Eigen::VectorXcd linearized_evolve(const KMatrices& km, const Eigen::VectorXcd& Y0,
                                   double t);

// Positive dispersion branches at theta: omega_k = sqrt of the eigenvalues of
// Dtilde^{1/2} B_u Dtilde^{1/2}, Dtilde = diag(|kappa|^2/4, (1/M) I3);
// the spectrum of K is {+-omega_k}.
Eigen::VectorXd dispersion_omegas(const BlochMatrices& bm);

struct DispersionRow {
    Vec3 theta;
    int branch;
    double omega;
};

struct DispersionTable {
    std::vector<DispersionRow> rows;
    std::vector<int> flat_branches;  // variation < 1e-6 across the path
};

// Tracks the lowest n_eigs branches along the theta path by eigenvector
// overlap; ties broken by eigenvalue proximity.
DispersionTable dispersion_relations(const IonDensityModel& model,
                                     const std::vector<Vec3>& theta_path,
                                     int n_eigs, int K_cut, double e, double M);

// Least-squares slope of log|omega_k| vs log k over the top half of the
// truncation-valid window |omega_k| <= (2 pi K_cut)^2 / 2.
double growth_exponent_fit(const IonDensityModel& model, const Vec3& theta,
                           int K_cut, double e, double M);

// A quasimomentum fiber for the decay experiment: eigenpairs of K(theta).
struct Fiber {
    Eigen::VectorXd omega;
    Eigen::MatrixXcd vectors;
};
using FiberProvider = std::function<Fiber(const Vec3& theta)>;

FiberProvider real_fiber_provider(const IonDensityModel& model, int K_cut,
                                  double e, double M);

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> norms;      // weighted norm ||W(t)||_alpha
    double t_guard = 0.0;           // phase-resolution bound on usable t
    int occupied_branches = 0;
};

// Evolves W(theta,t) = e^{-iK(theta)t} W(theta,0) on the offset grid
// theta = 2 pi (j+1/2)/L per axis, with W(theta,0) = bump(theta) P w0 where
// P projects onto the branches with 0 < omega < branch_cutoff.  The curve
// reports sum_n <n>^{2 alpha} ||W_n(t)||^2 with W_n the discrete inverse
// Bloch transform over the grid.
DecayCurve dispersive_decay_experiment(const FiberProvider& provider, int L,
                                       const std::vector<double>& times,
                                       double alpha, double branch_cutoff,
                                       unsigned long long seed = 0);

} // namespace csl
