// dynamics.hpp
// Time integration of the coupled Schroedinger-Newton system: a palindromic
// Strang splitting (order 2) with a Picard cross-check mode, trajectory
// monitoring, and the orbital-stability experiment.
#pragma once

#include <functional>
#include "csl/crystal.hpp"

namespace csl {

enum class Scheme { Strang, Picard };

struct IntegratorConfig {
    double dt = 1e-3;
    double T_end = 1.0;
    Scheme scheme = Scheme::Strang;
    int monitor_every = 10;   // record E, Q, d_V every this many steps
};

// One step.  Strang: half-kick p, half-drift q, half free flight, potential
// phase e^{i e phi dt}, half free flight, half-drift q, half-kick p.
// Picard: one fixed-point sweep of the integral form (order 1).
// Throws std::runtime_error on NaN/overflow.
CrystalState step(const CrystalState& X, double dt, Scheme scheme = Scheme::Strang);

struct MonitorRow {
    double t = 0.0;
    double E = 0.0;
    double Q = 0.0;
    double dV = 0.0;
};

struct EvolveResult {
    std::vector<MonitorRow> rows;
    double max_abs_E = 0.0;       // max |E(t)|
    double max_rel_E_drift = 0.0; // max |E(t)-E(0)| / max(|E(0)|, 1e-300)
    double max_rel_Q_drift = 0.0;
    double max_dV = 0.0;
    bool aborted = false;
};

EvolveResult evolve(const CrystalState& X0, const IntegratorConfig& cfg);

struct StabilityRow {
    double delta = 0.0;
    double sup_d = 0.0; // sup over monitored t of d_V(X(t), S)
};

enum class PerturbationMode {
    Generic,        // charge-preserving, manifold-orthogonal, off the defect subspace
    KernelMomentum  // delta into ion momenta along a Wiener-kernel direction
};

// Kernel directions of Sigma(theta) over the discrete zone, mapped to real
// ion-displacement fields v(n); empty when the discrete Wiener condition holds.
std::vector<std::vector<Vec3>> defect_directions(const IonDensityModel& model, int N);

// Builds X0 with d_V(X0, S) = delta and integrates to T_end, recording the
// supremum of the manifold distance.  One row per delta.
std::vector<StabilityRow> orbital_stability_experiment(
    const IonDensityModel& model, const TorusGrid& grid, double e, double M,
    const std::vector<double>& deltas, double T_end, double dt,
    PerturbationMode mode, unsigned long long seed = 0);

} // namespace csl
