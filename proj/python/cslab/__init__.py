"""Python interface to the crystal laboratory C++ core."""

from ._cslab import (  # noqa: F401
    IonDensityModel,
    check_jellium,
    dispersion_omegas,
    evolve_ground_state,
    ion_fourier,
    minimize_cell,
    positivity_sandwich,
    slater_density,
    wiener_matrix,
)

__all__ = [
    "IonDensityModel",
    "check_jellium",
    "dispersion_omegas",
    "evolve_ground_state",
    "ion_fourier",
    "minimize_cell",
    "positivity_sandwich",
    "slater_density",
    "wiener_matrix",
]
