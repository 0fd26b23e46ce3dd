// hessian.hpp
// The energy Hessian at a solitary state in a real plane-wave basis:
// [modes of Psi1] + [modes of Psi2] + [ion displacements] + [ion momenta],
// where the field perturbation is psi = psi^alpha + (Psi1 + i Psi2) e^{i alpha}.
// Entries are the exact second derivatives of the discrete energy, so the
// matrix is real symmetric and matches central finite differences.
#pragma once

#include "csl/crystal.hpp"

namespace csl {

// One real plane-wave basis function for real fields on the grid:
// a list of (flattened frequency index, Fourier coefficient).
struct FieldMode {
    Vec3 xi = Vec3::Zero();
    // (grid index, coefficient) pairs; one entry for self-conjugate modes
    // (zero/Nyquist), two for cos/sin pairs.
    std::array<std::pair<std::size_t, cd>, 2> coef;
    int n_coef = 1;
};

struct HessianMatrix {
    Eigen::MatrixXd H;
    TorusGrid grid;
    IonDensityModel model;
    double e = 1.0, M = 1.0;
    SolitaryPoint S;
    std::vector<FieldMode> modes; // shared by the Psi1 and Psi2 blocks
    std::size_t n_field = 0;      // modes.size() = grid.size()
    std::size_t off_psi1 = 0, off_psi2 = 0, off_kappa = 0, off_pi = 0;
    std::size_t dim() const { return std::size_t(H.rows()); }
    std::size_t kappa_index(std::size_t cell, int axis) const {
        return off_kappa + 3 * cell + axis;
    }
    std::size_t pi_index(std::size_t cell, int axis) const {
        return off_pi + 3 * cell + axis;
    }
};

HessianMatrix assemble_hessian(const IonDensityModel& model, const TorusGrid& grid,
                               double e, double M, const SolitaryPoint& S);

struct PerturbationY {
    Field phi;                // complex field perturbation (real-space layout)
    std::vector<Vec3> kappa;
    std::vector<Vec3> pi;
};

// Maps basis coordinates to the concrete perturbation (phi includes the
// e^{i alpha} frame factor).
PerturbationY basis_to_perturbation(const HessianMatrix& H, const Eigen::VectorXd& y);

// S + eps * Y as a crystal state (no renormalization).
CrystalState perturbed_state(const HessianMatrix& H, const PerturbationY& Y, double eps);

struct NullSpace {
    int dimension = 0;
    Eigen::MatrixXd basis;        // columns
    Eigen::VectorXd eigenvalues;  // full ascending spectrum
};

// Eigenvectors with |lambda| < tol * max|lambda|.
NullSpace null_space(const HessianMatrix& H, double tol = 1e-8);

// Columns spanning the analytic kernel {(C, s, 0)}: constant Psi1, constant
// Psi2, and the three uniform displacement directions (orthonormal).
Eigen::MatrixXd analytic_kernel(const HessianMatrix& H);

// d = sum over theta in the discrete zone (2 pi m / N, m != 0) of
// dim ker Sigma(theta); zero iff the Wiener condition holds on the zone.
int kernel_defect_dimension(const IonDensityModel& model, int N, int M_max = 8);

struct ConstrainedSpectrum {
    double min_eig = 0.0;
    Eigen::VectorXd head;      // lowest eigenvalues of the constrained form
    Eigen::VectorXd min_vector;
};

// Spectrum of the Hessian restricted to the complement of the manifold
// tangent plus the charge direction (constant Psi1, constant Psi2, uniform
// kappa).  With fix_r = true only the gauge and charge directions are
// removed, leaving the translations in play.
ConstrainedSpectrum constrained_spectrum(const HessianMatrix& H, bool fix_r = false,
                                         int head_size = 10);

} // namespace csl
