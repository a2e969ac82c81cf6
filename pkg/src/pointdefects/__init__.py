"""Numerical laboratory for the laws of motion of point charges.

Submodules
----------
core
    Constants, error types and relativistic kinematics.
worldlines
    Prescribed worldlines, retarded times and Lienard-Wiechert fields.
born_infeld
    Born-Infeld aether law, Born's static solution, conserved integrals,
    stress tensor and surface forces.
electrostatics
    Variational grid solver for static Born-Infeld fields of smeared charges.
classical
    Lorentz, Abraham-Lorentz-Dirac and Landau-Lifshitz integrators.
hamilton_jacobi
    Hamilton-Jacobi phase evolution, guidance and gauge transformations.
quantum
    Klein-Gordon and Dirac evolution with Bohmian guidance; Hydrogen levels.
runner
    JSON scenarios and artifact emission behind the ``pointdefects`` CLI.
"""

__version__ = "0.1.0"

from .core import (ATOMIC_UNITS, BORN_UNITS, Constants, ParticleState, gamma,  # noqa: E402
                   momentum_of_velocity, preset, velocity_of_momentum)

__all__ = [
    "__version__",
    "ATOMIC_UNITS",
    "BORN_UNITS",
    "Constants",
    "ParticleState",
    "gamma",
    "momentum_of_velocity",
    "preset",
    "velocity_of_momentum",
]
