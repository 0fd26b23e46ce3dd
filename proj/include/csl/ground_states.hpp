// ground_states.hpp
// Periodic and non-periodic ground states: the zero-energy solitary states,
// flat-density ion arrangements and their verification, and the constrained
// energy minimizer on a single cell.
#pragma once

#include "csl/crystal.hpp"

namespace csl {

struct GroundStateResult {
    CrystalState X;
    bool jellium = false;     // warning flag: false means energy will not vanish
    double energy_value = 0.0;
};

// (e^{i alpha} sqrt(Z), r, 0) with Z = eZ/e; zero energy under a Jellium model.
GroundStateResult periodic_ground_state(const IonDensityModel& model,
                                        const TorusGrid& grid, double alpha,
                                        const Vec3& r, double e, double M);

enum class ArrangementMode { BoxShear, Spectral };

struct Arrangement {
    std::vector<Vec3> q;      // positions q*(n), indexed as CrystalState cells
    std::string provenance;   // which spectral identities justify flatness
};

// box_shear: q*(n) = (r1, r2, r3 + tau(n1,n2)) — flat for the box model
// because each column sums to a z-independent constant.
// spectral: q*(n) = (a1(n1,n2), a2(n1,n2), r3) — flat for any model whose
// transform vanishes on the planes xi3 in 2 pi Z \ 0 and on the residual
// plane lattice (xi1,xi2,0) in 2 pi Z^2 \ 0 (the spectral condition).
// tau/a1/a2 are N x N tables indexed by (n1*N + n2).
Arrangement nonperiodic_arrangement(ArrangementMode mode,
                                    const IonDensityModel& model, int N,
                                    const Vec3& r,
                                    const std::vector<double>& tau,
                                    const std::vector<double>& a1,
                                    const std::vector<double>& a2);

// Max |sigma_hat| over the spectral-condition sample planes; the condition
// holds when this is below tol.
double spectral_condition_defect(const IonDensityModel& model);

struct FlatDensityReport {
    double max_real_dev = 0.0;    // max_x |sum_n sigma(x - q*(n)) - eZ|
    double max_fourier = 0.0;     // max over grid xi off the coarse lattice
    bool pass = false;
};

// Two independent checks of sum_n sigma(x - q*(n)) = eZ: direct real-space
// summation with periodic images (closed-form kinds only) and the Fourier
// criterion |sigma_hat(xi) sum_n e^{i xi.(n + q*(n))}| on the grid
// frequencies outside 2 pi Z^3.
FlatDensityReport verify_flat_density(const std::vector<Vec3>& qstar,
                                      const IonDensityModel& model,
                                      const TorusGrid& grid, double tol = 1e-8);

struct MinimizeResult {
    Field psi;                // minimizer, real-space layout
    double omega0 = 0.0;      // Rayleigh quotient of H = -1/2 Laplace - e phi
    double residual = 0.0;    // ||H psi - omega0 psi|| / ||psi||
    double energy_value = 0.0;
    int iterations = 0;
    bool converged = false;
    // convergence history rows (iteration, energy, residual)
    std::vector<std::array<double, 3>> history;
};

// Projected gradient descent with Barzilai-Borwein steps and backtracking on
// the sphere ||psi||^2 = Z for the per-cell energy
//   E = 1/2 int |grad psi|^2 + 1/2 <rho, G rho>,  rho = rho_i - e |psi|^2.
// Stops when the energy decrease is < 1e-12 and the eigen-residual < 1e-6.
MinimizeResult minimize_energy_per_cell(const IonDensityModel& model, double Z,
                                        double e, const TorusGrid& grid,
                                        const Field& init, int max_iters = 10000);

} // namespace csl
