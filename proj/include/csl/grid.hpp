// grid.hpp
// Discretization of the torus T = R^3 / N Z^3 with N*P sample points per side
// and dual frequencies xi in (2*pi/N) Z^3 truncated to the Nyquist box.
//
// Conventions (fixed once here, relied on everywhere):
//   * Samples live at x = (i,j,k)/P, 0 <= i,j,k < n with n = N*P.
//   * A field f and its coefficients c are related by
//       f(x) = sum_xi c(xi) e^{i xi.x},
//     i.e. the forward transform returns the coefficient of e^{i xi.x}.
//   * Frequency index k maps to the signed index s = k for k <= n/2 and
//     s = k - n otherwise (the highest frequency sits on the positive side),
//     and xi = (2*pi/N) * s.
//   * Parseval: integral over T of |f|^2 = volume * sum |c|^2
//             = cell_volume * sum over samples of |f|^2.
#pragma once

#include <stdexcept>
#include "csl/types.hpp"

namespace csl {

struct TorusGrid {
    int N = 1; // cells per side
    int P = 8; // sample points per cell side
    int n = 8; // points per side, n = N*P

    TorusGrid() = default;
    TorusGrid(int N_, int P_) : N(N_), P(P_), n(N_ * P_) {
        if (N < 1 || P < 1) throw std::invalid_argument("TorusGrid: N and P must be positive");
    }

    std::size_t size() const { return std::size_t(n) * n * n; }
    double side() const { return double(N); }
    double volume() const { return double(N) * N * N; }
    double spacing() const { return 1.0 / P; }
    double cell_volume() const { double h = spacing(); return h * h * h; }

    int signed_index(int k) const { return k <= n / 2 ? k : k - n; }
    double freq1(int k) const { return (two_pi / N) * signed_index(k); }

    std::size_t idx(int i, int j, int k) const {
        return (std::size_t(i) * n + j) * n + k;
    }
    Vec3 point(int i, int j, int k) const {
        double h = spacing();
        return Vec3(h * i, h * j, h * k);
    }
    Vec3 freq(int i, int j, int k) const {
        return Vec3(freq1(i), freq1(j), freq1(k));
    }

    bool operator==(const TorusGrid& o) const { return N == o.N && P == o.P; }
};

enum class Layout { RealSpace, FourierSpace };

// Complex samples on a TorusGrid; houses wave functions, densities and
// potentials alike (realness is a property asserted by tests, not a type).
struct Field {
    TorusGrid grid;
    Layout layout = Layout::RealSpace;
    std::vector<cd> v;

    Field() = default;
    Field(const TorusGrid& g, Layout l) : grid(g), layout(l), v(g.size(), cd(0.0, 0.0)) {}

    cd& operator()(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
    const cd& operator()(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
};

} // namespace csl
