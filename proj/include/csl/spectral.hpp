// spectral.hpp
// FFT-backed spectral operators on torus fields: the Fourier transform pair,
// the Coulomb inverse G = (-Laplace)^{-1} (zero mode dropped), its square root
// Lambda = (-Laplace)^{-1/2}, spectral derivatives and norms.
#pragma once

#include "csl/grid.hpp"

namespace csl {

// Forward: real-space samples -> coefficients of e^{i xi.x}.
Field fourier_forward(const Field& f);
// Inverse: coefficients -> real-space samples (exact round trip).
Field fourier_inverse(const Field& f);

// Convenience: return a copy in the requested layout.
Field to_fourier(const Field& f);
Field to_real(const Field& f);

// phi with phi_hat(xi) = rho_hat(xi)/|xi|^2 for xi != 0, phi_hat(0) = 0.
// Accepts either layout; the result is returned in the layout of the input.
Field poisson_green(const Field& rho);

// (Lambda rho)_hat(xi) = rho_hat(xi)/|xi| for xi != 0, 0 at xi = 0.
Field half_green(const Field& rho);

// Spectral partial derivative along axis (0,1,2): multiplies by i*xi_axis.
Field gradient(const Field& f, int axis);

// integral over T of |f|^2 (quadrature or Parseval depending on layout).
double l2_sq(const Field& f);
// integral over T of f * conj(g).
cd inner(const Field& f, const Field& g);
// sum_xi volume * (1+|xi|^2) |c(xi)|^2  (squared H^1 norm).
double h1_sq(const Field& f);
// integral over T of |grad f|^2 evaluated spectrally.
double grad_sq(const Field& f);
// <rho, G rho> = volume * sum_{xi!=0} |c(xi)|^2/|xi|^2 (Coulomb quadratic form).
double coulomb_form(const Field& rho);

double max_abs_imag(const Field& f);

} // namespace csl
