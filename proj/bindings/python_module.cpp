// Python bindings for the crystal laboratory core: ion density models and
// their transforms, the Wiener matrix, periodic ground states and their
// evolution, Bloch dispersion, the cell minimizer, and Slater densities.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csl/bloch.hpp"
#include "csl/dynamics.hpp"
#include "csl/fermion.hpp"
#include "csl/ground_states.hpp"
#include "csl/spectral.hpp"

namespace py = pybind11;
using namespace csl;

PYBIND11_MODULE(_cslab, m) {
    m.doc() = "Schroedinger-Poisson-Newton crystal laboratory (C++ core)";

    py::class_<IonDensityModel>(m, "IonDensityModel")
        .def_readonly("eZ", &IonDensityModel::eZ)
        .def_static("box", &IonDensityModel::box, py::arg("eZ"))
        .def_static("smoothed_box", &IonDensityModel::smoothed_box,
                    py::arg("eZ"), py::arg("k"))
        .def_static("gaussian_sinc", &IonDensityModel::gaussian_sinc,
                    py::arg("eZ"))
        .def_static("sine_gaussian", &IonDensityModel::sine_gaussian,
                    py::arg("eZ"));

    m.def(
        "ion_fourier",
        [](const IonDensityModel& model, const Vec3& xi) {
            return ion_fourier(model, xi);
        },
        py::arg("model"), py::arg("xi"),
        "Fourier transform of the ion density at frequency xi.");

    m.def(
        "check_jellium",
        [](const IonDensityModel& model, double tol) {
            auto rep = check_jellium(model, tol);
            return py::make_tuple(rep.pass, rep.max_abs);
        },
        py::arg("model"), py::arg("tol") = 1e-12,
        "(pass, max |sigma_hat|) over the dual lattice window minus zero.");

    m.def(
        "wiener_matrix",
        [](const IonDensityModel& model, const Vec3& theta, int M_max) {
            auto wm = wiener_matrix(model, theta, M_max);
            return py::make_tuple(wm.matrix, wm.sigma0);
        },
        py::arg("model"), py::arg("theta"), py::arg("M_max") = 8,
        "(Sigma(theta) as 3x3, minimal eigenvalue Sigma0).");

    m.def(
        "evolve_ground_state",
        [](const IonDensityModel& model, int N, int P, double T_end, double dt,
           double e, double M) {
            TorusGrid g(N, P);
            auto gs = periodic_ground_state(model, g, 0.0, Vec3::Zero(), e, M);
            IntegratorConfig cfg;
            cfg.dt = dt;
            cfg.T_end = T_end;
            auto res = evolve(gs.X, cfg);
            py::dict out;
            out["aborted"] = res.aborted;
            out["max_dV"] = res.max_dV;
            out["max_abs_E"] = res.max_abs_E;
            out["max_rel_Q_drift"] = res.max_rel_Q_drift;
            return out;
        },
        py::arg("model"), py::arg("N"), py::arg("P"), py::arg("T_end") = 1.0,
        py::arg("dt") = 1e-3, py::arg("e") = 1.0, py::arg("M") = 1.0,
        "Evolve the periodic ground state and report conservation drifts.");

    m.def(
        "dispersion_omegas",
        [](const IonDensityModel& model, const Vec3& theta, int K_cut, double e,
           double M) {
            return dispersion_omegas(bloch_energy_matrix(model, theta, K_cut, e, M));
        },
        py::arg("model"), py::arg("theta"), py::arg("K_cut") = 2,
        py::arg("e") = 1.0, py::arg("M") = 1.0,
        "Positive dispersion branches at quasimomentum theta.");

    m.def(
        "positivity_sandwich",
        [](const IonDensityModel& model, const Vec3& theta, int K_cut, double e,
           double M, double epsilon) {
            auto sw = positivity_sandwich(
                bloch_energy_matrix(model, theta, K_cut, e, M), epsilon);
            py::dict out;
            out["b0"] = sw.b0;
            out["sigma0"] = sw.sigma0;
            out["lower"] = sw.lower;
            out["upper"] = sw.upper;
            out["ok"] = sw.ok;
            return out;
        },
        py::arg("model"), py::arg("theta"), py::arg("K_cut") = 2,
        py::arg("e") = 1.0, py::arg("M") = 1.0, py::arg("epsilon") = 0.0,
        "Two-sided bound on the minimal Bloch eigenvalue at theta.");

    m.def(
        "minimize_cell",
        [](const IonDensityModel& model, double Z, double e, int P,
           int max_iters) {
            TorusGrid g(1, P);
            Field init(g, Layout::RealSpace);
            for (auto& z : init.v) z = cd(1.0, 0.0);
            auto res = minimize_energy_per_cell(model, Z, e, g, init, max_iters);
            py::dict out;
            out["converged"] = res.converged;
            out["energy"] = res.energy_value;
            out["omega0"] = res.omega0;
            out["residual"] = res.residual;
            out["iterations"] = res.iterations;
            return out;
        },
        py::arg("model"), py::arg("Z") = 1.0, py::arg("e") = 1.0,
        py::arg("P") = 8, py::arg("max_iters") = 10000,
        "Constrained per-cell energy minimizer from the constant initializer.");

    m.def(
        "slater_density",
        [](const std::string& json_text,
           const std::vector<std::vector<double>>& points) {
            auto st = slater_from_json(json_text);
            auto dens = slater_density(st);
            std::vector<double> vals;
            vals.reserve(points.size());
            for (const auto& x : points) vals.push_back(dens.eval(x));
            py::dict out;
            out["values"] = vals;
            out["constant_term"] = dens.constant_term();
            out["max_deviation"] = dens.max_deviation_from_constant();
            out["pair_distance_ok"] = check_pair_distance(st);
            return out;
        },
        py::arg("state_json"), py::arg("points"),
        "Electron density of a Slater-determinant superposition at points.");
}
