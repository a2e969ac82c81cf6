"""Physical constants, error types and relativistic kinematics.

Formulas are written in Gaussian units with an explicit speed of light ``c``;
nothing is silently nondimensionalized.  Vectors are plain ``numpy`` arrays
whose last axis has length 3, so every function here broadcasts over leading
axes.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "PointDefectError",
    "SuperluminalError",
    "SingularityError",
    "DomainError",
    "ConfigError",
    "AccuracyError",
    "OptimizationError",
    "NodeError",
    "Constants",
    "BORN_UNITS",
    "ATOMIC_UNITS",
    "preset",
    "gamma",
    "velocity_of_momentum",
    "momentum_of_velocity",
    "ParticleState",
]


class PointDefectError(Exception):
    """Base class for all errors raised by this package."""


class SuperluminalError(PointDefectError, ValueError):
    """A velocity with ``|v| >= c`` was supplied."""


class SingularityError(PointDefectError, ValueError):
    """A field was evaluated at (or too close to) a point charge."""


class DomainError(PointDefectError, ValueError):
    """An evaluation fell outside the domain on which data is available."""


class ConfigError(PointDefectError, ValueError):
    """Invalid numerical or scenario configuration."""


class AccuracyError(PointDefectError, RuntimeError):
    """A quadrature or iteration failed to reach the requested accuracy."""


class OptimizationError(PointDefectError, RuntimeError):
    """The energy minimizer could not make progress."""


class NodeError(PointDefectError, ValueError):
    """A Bohmian velocity was requested where the density vanishes."""


@dataclass(frozen=True)
class Constants:
    """Physical parameter set threaded through every formula.

    Attributes
    ----------
    c : float
        Speed of light.
    e : float
        Elementary charge magnitude (the electron carries ``-e``).
    m : float
        Intrinsic inert mass of the point defect.
    b : float
        Born's field strength.  ``np.inf`` recovers Maxwell's aether law.
    hbar : float
        Quantum of action.
    """

    c: float = 1.0
    e: float = 1.0
    m: float = 1.0
    b: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("c", "e", "m", "b", "hbar"):
            val = getattr(self, name)
            if not (val > 0) or np.isnan(val):
                raise ConfigError(f"constant {name} must be > 0, got {val!r}")
            if name != "b" and not np.isfinite(val):
                raise ConfigError(f"constant {name} must be finite, got {val!r}")

    @property
    def born_radius(self) -> float:
        """Length scale ``sqrt(e/b)`` below which Born-Infeld effects dominate."""
        return float(np.sqrt(self.e / self.b))

    def with_(self, **changes) -> "Constants":
        return replace(self, **changes)


BORN_UNITS = Constants()
# c is the inverse fine-structure constant in Hartree atomic units
ATOMIC_UNITS = Constants(c=137.035999084, e=1.0, m=1.0, b=np.inf, hbar=1.0)

_PRESETS = {"born-units": BORN_UNITS, "atomic-units": ATOMIC_UNITS}


def preset(name: str, **overrides) -> Constants:
    """Return a named constants preset, optionally with some fields replaced.

    ``"born-units"`` sets ``c = e = m = hbar = 1`` and ``b = 1`` (``b`` is
    meant to be overridden).  ``"atomic-units"`` sets ``hbar = m = e = 1``
    with ``c = 137.036`` and ``b = inf``.
    """
    try:
        base = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown constants preset {name!r}; "
                          f"choose from {sorted(_PRESETS)}") from None
    return base.with_(**overrides) if overrides else base


def _speed2(v):
    v = np.asarray(v, dtype=float)
    return np.einsum("...i,...i->...", v, v)


def gamma(v, c: float = 1.0):
    """Lorentz factor ``1/sqrt(1 - |v|^2/c^2)``.

    Raises
    ------
    SuperluminalError
        If any ``|v| >= c``.
    """
    beta2 = _speed2(v) / c**2
    if np.any(beta2 >= 1.0):
        raise SuperluminalError(f"|v|/c = {np.sqrt(np.max(beta2)):.17g} >= 1")
    return 1.0 / np.sqrt(1.0 - beta2)


def velocity_of_momentum(P, m: float, c: float = 1.0):
    """Velocity ``c P / sqrt(m^2 c^2 + |P|^2)`` of a particle with momentum P."""
    P = np.asarray(P, dtype=float)
    return c * P / np.sqrt(m * m * c * c + _speed2(P))[..., None]


def momentum_of_velocity(v, m: float, c: float = 1.0):
    """Intrinsic momentum ``m gamma(v) v``; inverse of :func:`velocity_of_momentum`."""
    v = np.asarray(v, dtype=float)
    return m * np.asarray(gamma(v, c))[..., None] * v


@dataclass(frozen=True)
class ParticleState:
    """Time-stamped position and mechanical momentum of a point defect."""

    t: float
    Q: np.ndarray
    P: np.ndarray

    def velocity(self, m: float, c: float) -> np.ndarray:
        return velocity_of_momentum(self.P, m, c)

    @classmethod
    def from_velocity(cls, t, Q, v, m: float, c: float) -> "ParticleState":
        return cls(float(t), np.asarray(Q, dtype=float),
                   momentum_of_velocity(v, m, c))
