// crystal.hpp
// The finite-crystal state X = (psi, q, p): electron field on the torus, ion
// displacements and momenta on the cell lattice Gamma = Z^3 / N Z^3, together
// with its charge density, energy, total charge, ion forces, and the distance
// to the solitary manifold S_{alpha,r} = (e^{i alpha} sqrt(Z), r, 0).
#pragma once

#include "csl/grid.hpp"
#include "csl/ion_models.hpp"

namespace csl {

struct CrystalState {
    TorusGrid grid;
    IonDensityModel model;
    Field psi;              // real-space layout
    std::vector<Vec3> q;    // one displacement per n in Gamma
    std::vector<Vec3> p;    // one momentum per n in Gamma
    double M = 1.0;         // ion mass
    double e = 1.0;         // elementary charge

    CrystalState() = default;
    CrystalState(const TorusGrid& g, const IonDensityModel& m, double mass,
                 double charge)
        : grid(g), model(m), psi(g, Layout::RealSpace),
          q(std::size_t(g.N) * g.N * g.N, Vec3::Zero()),
          p(std::size_t(g.N) * g.N * g.N, Vec3::Zero()),
          M(mass), e(charge) {}

    std::size_t cells() const { return q.size(); }
    std::size_t cell_idx(int a, int b, int c) const {
        return (std::size_t(a) * grid.N + b) * grid.N + c;
    }
    Vec3 cell_point(int a, int b, int c) const { return Vec3(a, b, c); }
    double Z() const { return model.eZ / e; }
};

struct SolitaryPoint {
    double alpha = 0.0; // in [0, 2 pi)
    Vec3 r = Vec3::Zero();
};

// sigma_hat sampled on the grid's frequency set (helper shared by the charge
// density, force, and Hessian assembly).
Field sigma_hat_grid(const IonDensityModel& model, const TorusGrid& grid);

// Fourier coefficients of the shifted-ion lattice density
// sum_n sigma(x - n - q(n)); coefficient at xi is
// (1/|T|) sigma_hat(-xi) sum_n e^{-i xi.(n+q(n))}.
Field ion_lattice_density_hat(const CrystalState& X);

// rho = sum_n sigma(. - n - q(n)) - e |psi|^2, returned in real space.
Field charge_density(const CrystalState& X);

// E = 1/2 int |grad psi|^2 + 1/2 <rho, G rho> + sum_n |p(n)|^2 / (2M).
double energy(const CrystalState& X);

// Q = int |psi|^2.
double charge(const CrystalState& X);

// f(n) = -<grad phi, sigma(. - n - q(n))> with phi = G rho, per ion.
std::vector<Vec3> force(const CrystalState& X);

struct ManifoldDistance {
    double d = 0.0;
    double alpha = 0.0;
    Vec3 r = Vec3::Zero();
};

// Minimizes ||psi - e^{i alpha} sqrt(Z)||_{H^1} + |q - r| + |p| over
// (alpha, r); alpha in closed form from the mean of psi, r by a 16^3 coarse
// grid followed by 20 Nelder-Mead refinement steps.  Component differences of
// torus-valued q are reduced to the minimal representative.
ManifoldDistance distance_to_manifold(const CrystalState& X);

} // namespace csl
