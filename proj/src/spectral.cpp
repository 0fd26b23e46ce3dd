#include "csl/spectral.hpp"

#include <fftw3.h>
#include <map>
#include <mutex>
#include <cmath>

namespace csl {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// FFTW planner calls are not thread safe; plans are created once per grid
// size under a lock and then executed re-entrantly on caller buffers.
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::size_t sz = std::size_t(n) * n * n;
    fftw_complex* in = fftw_alloc_complex(sz);
    fftw_complex* out = fftw_alloc_complex(sz);
    PlanPair pp;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    pp.fwd = fftw_plan_dft_3d(n, n, n, in, out, FFTW_FORWARD, flags);
    pp.bwd = fftw_plan_dft_3d(n, n, n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    return cache.emplace(n, pp).first->second;
}

void execute(fftw_plan plan, const std::vector<cd>& in, std::vector<cd>& out) {
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace

Field fourier_forward(const Field& f) {
    if (f.layout != Layout::RealSpace)
        throw std::invalid_argument("fourier_forward: field is not in real space");
    Field out(f.grid, Layout::FourierSpace);
    execute(plans_for(f.grid.n).fwd, f.v, out.v);
    double scale = 1.0 / double(f.grid.size());
    for (auto& z : out.v) z *= scale;
    return out;
}

Field fourier_inverse(const Field& f) {
    if (f.layout != Layout::FourierSpace)
        throw std::invalid_argument("fourier_inverse: field is not in Fourier space");
    Field out(f.grid, Layout::RealSpace);
    execute(plans_for(f.grid.n).bwd, f.v, out.v);
    return out;
}

Field to_fourier(const Field& f) {
    return f.layout == Layout::FourierSpace ? f : fourier_forward(f);
}

Field to_real(const Field& f) {
    return f.layout == Layout::RealSpace ? f : fourier_inverse(f);
}

namespace {

template <class Fn>
Field apply_multiplier(const Field& rho, Fn&& factor) {
    Field hat = to_fourier(rho);
    const TorusGrid& g = hat.grid;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                Vec3 xi = g.freq(i, j, k);
                hat.v[g.idx(i, j, k)] *= factor(xi);
            }
    return rho.layout == Layout::RealSpace ? fourier_inverse(hat) : hat;
}

} // namespace

Field poisson_green(const Field& rho) {
    return apply_multiplier(rho, [](const Vec3& xi) {
        double s = xi.squaredNorm();
        return s == 0.0 ? 0.0 : 1.0 / s;
    });
}

Field half_green(const Field& rho) {
    return apply_multiplier(rho, [](const Vec3& xi) {
        double s = xi.squaredNorm();
        return s == 0.0 ? 0.0 : 1.0 / std::sqrt(s);
    });
}

Field gradient(const Field& f, int axis) {
    Field hat = to_fourier(f);
    const TorusGrid& g = hat.grid;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                double xi = g.freq1(axis == 0 ? i : axis == 1 ? j : k);
                hat.v[g.idx(i, j, k)] *= cd(0.0, xi);
            }
    return f.layout == Layout::RealSpace ? fourier_inverse(hat) : hat;
}

double l2_sq(const Field& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::norm(z);
    return f.layout == Layout::RealSpace ? f.grid.cell_volume() * s
                                         : f.grid.volume() * s;
}

cd inner(const Field& f, const Field& g) {
    if (f.layout != g.layout || !(f.grid == g.grid))
        throw std::invalid_argument("inner: layout/grid mismatch");
    cd s(0.0, 0.0);
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * std::conj(g.v[i]);
    return f.layout == Layout::RealSpace ? f.grid.cell_volume() * s
                                         : f.grid.volume() * s;
}

double h1_sq(const Field& f) {
    Field hat = to_fourier(f);
    const TorusGrid& g = hat.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                s += (1.0 + g.freq(i, j, k).squaredNorm()) * std::norm(hat.v[g.idx(i, j, k)]);
    return g.volume() * s;
}

double grad_sq(const Field& f) {
    Field hat = to_fourier(f);
    const TorusGrid& g = hat.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                s += g.freq(i, j, k).squaredNorm() * std::norm(hat.v[g.idx(i, j, k)]);
    return g.volume() * s;
}

double coulomb_form(const Field& rho) {
    Field hat = to_fourier(rho);
    const TorusGrid& g = hat.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                double q = g.freq(i, j, k).squaredNorm();
                if (q > 0.0) s += std::norm(hat.v[g.idx(i, j, k)]) / q;
            }
    return g.volume() * s;
}

double max_abs_imag(const Field& f) {
    double m = 0.0;
    for (const auto& z : f.v) m = std::max(m, std::abs(z.imag()));
    return m;
}

} // namespace csl
