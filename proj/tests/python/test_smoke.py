"""Smoke tests for the _cslab extension module."""

import math
import os
import sys

if "CSL_PYMODULE_DIR" in os.environ:
    sys.path.insert(0, os.environ["CSL_PYMODULE_DIR"])

import _cslab as cslab


def test_jellium_check():
    box = cslab.IonDensityModel.box(1.0)
    ok, max_abs = cslab.check_jellium(box, 1e-12)
    assert ok
    assert max_abs < 1e-12
    sg = cslab.IonDensityModel.sine_gaussian(2.0)
    assert abs(cslab.ion_fourier(sg, [0.0, 0.0, 0.0]) - 2.0) < 1e-14


def test_wiener_matrix_degeneracy_and_positivity():
    box = cslab.IonDensityModel.box(1.0)
    mat, sigma0 = cslab.wiener_matrix(box, [0.0, math.pi, math.pi])
    assert sigma0 < 1e-10
    assert abs(mat[0][0]) < 1e-8
    gs = cslab.IonDensityModel.gaussian_sinc(1.0)
    _, sigma0 = cslab.wiener_matrix(gs, [1.0, 2.0, 3.0])
    assert sigma0 > 0.0


def test_ground_state_evolution_conserves():
    box = cslab.IonDensityModel.box(1.0)
    out = cslab.evolve_ground_state(box, 1, 4, T_end=0.1, dt=1e-3)
    assert not out["aborted"]
    assert out["max_dV"] < 1e-9
    assert out["max_abs_E"] < 1e-10
    assert out["max_rel_Q_drift"] < 1e-10


def test_dispersion_and_sandwich():
    sg = cslab.IonDensityModel.sine_gaussian(1.0)
    omegas = cslab.dispersion_omegas(sg, [0.7, 1.5, 2.6], K_cut=1)
    assert len(omegas) > 0
    assert all(w >= 0.0 for w in omegas)
    sw = cslab.positivity_sandwich(sg, [0.7, 1.5, 2.6], K_cut=1)
    assert 0.0 < sw["b0"] <= sw["upper"] + 1e-12


def test_minimize_cell_jellium():
    box = cslab.IonDensityModel.box(1.0)
    out = cslab.minimize_cell(box, Z=1.0, P=8)
    assert out["converged"]
    assert abs(out["energy"]) < 1e-10
    assert abs(out["omega0"]) < 1e-8


def test_slater_density():
    state = """{
        "d": 1, "N": 2,
        "terms": [
            {"c": [1.0, 0.0], "k": [[0], [1]]},
            {"c": [0.5, 0.5], "k": [[2], [3]]}
        ]
    }"""
    out = cslab.slater_density(state, [[0.0], [0.5], [1.3]])
    assert out["pair_distance_ok"]
    assert out["max_deviation"] < 1e-12
    for v in out["values"]:
        assert abs(v - out["constant_term"]) < 1e-12
