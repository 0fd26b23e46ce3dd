// ion_models.hpp
// Ion charge density models with exact Fourier transforms, the Jellium and
// Wiener condition checkers, the periodized ion density, and the lattice-sum
// matrix Sigma(theta).
//
// The transform convention for a single ion density sigma is
//   sigma_hat(xi) = integral over R^3 of e^{i xi.x} sigma(x) dx,
// so sigma_hat(0) equals the total ion charge eZ.  All closed-form kinds are
// products of identical one-dimensional profiles, except sine_gaussian which
// is defined directly in Fourier space.
#pragma once

#include <optional>
#include <string>
#include "csl/grid.hpp"

namespace csl {

enum class IonKind { Box, SmoothedBox, GaussianSinc, SineGaussian, Tabulated };

struct IonDensityModel {
    IonKind kind = IonKind::Box;
    double eZ = 1.0;   // total charge of one ion
    int k = 2;         // smoothing order for smoothed_box

    // Tabulated kind: real-space samples on their own grid plus the
    // FFT-derived coefficients.  sigma_hat is exact on the sample grid's
    // frequency set; off-grid queries require interpolate = true and use the
    // trapezoid-rule transform of the samples.
    std::optional<Field> table;        // real-space samples
    std::optional<Field> table_hat;    // Fourier coefficients of the samples
    bool interpolate = false;

    static IonDensityModel box(double eZ);
    static IonDensityModel smoothed_box(double eZ, int k);
    static IonDensityModel gaussian_sinc(double eZ);
    static IonDensityModel sine_gaussian(double eZ);
    static IonDensityModel tabulated(Field samples, bool interpolate = false);

    bool closed_form() const { return kind != IonKind::Tabulated; }
    // True when sigma(x) has a closed real-space formula (all kinds except
    // sine_gaussian, which is specified by its transform only).
    bool has_real_space() const;

    // One-dimensional real-space profile (unit charge); sigma(x) =
    // eZ * prod_j profile1(x_j) for the separable kinds.
    double profile1(double x) const;
    double sigma_real(const Vec3& x) const;
};

// sigma_hat(xi); throws for a tabulated model queried off its frequency grid
// with interpolation disabled.
cd ion_fourier(const IonDensityModel& model, const Vec3& xi);

struct JelliumReport {
    double max_abs = 0.0;   // max |sigma_hat(2 pi m)| over the tested window
    int window = 0;         // tested |m|_inf <= window, m != 0
    bool pass = false;
    Vec3i worst_m = Vec3i::Zero();
};

// Evaluates sigma_hat on the dual lattice 2 pi Z^3 \ {0} within |m|_inf <= 4.
JelliumReport check_jellium(const IonDensityModel& model, double tol = 1e-12);

// rho_i(x) = sum_{n in Gamma} sigma(x - n), built spectrally: the grid
// coefficient at xi is sigma_hat(-xi)/|cell| for xi in 2 pi Z^3 and zero
// otherwise.  Under the Jellium condition the result is the constant eZ.
Field periodized_density(const IonDensityModel& model, const TorusGrid& grid);

struct WienerMatrix {
    Vec3 theta = Vec3::Zero();
    Mat3 matrix = Mat3::Zero();
    double sigma0 = 0.0;     // minimal eigenvalue Sigma_0(theta)
    int M_max = 0;           // lattice-sum truncation |m|_inf <= M_max
    double tail_bound = 0.0; // NaN when no decay majorant is available
};

// Sigma(theta) = sum_{|m|_inf <= M_max} (xi xi^T / |xi|^2) |sigma_hat(xi)|^2
// at xi = theta + 2 pi m.  Requires dist(theta, 2 pi Z^3) > 1e-8.
// When raise_until_tail is positive, M_max is doubled (capped at 64) until
// the reported tail bound drops below it.
WienerMatrix wiener_matrix(const IonDensityModel& model, const Vec3& theta,
                           int M_max = 8, double raise_until_tail = 0.0);

struct WienerScanRow {
    Vec3 theta;
    double sigma0;
    bool degenerate;   // sigma0 < tol
};

std::vector<WienerScanRow> wiener_scan(const IonDensityModel& model,
                                       const std::vector<Vec3>& theta_grid,
                                       int M_max = 8, double tol = 1e-10);

} // namespace csl
