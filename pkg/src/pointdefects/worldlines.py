"""Prescribed subluminal worldlines and their Lienard-Wiechert fields."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .core import ConfigError, DomainError, SingularityError, SuperluminalError

__all__ = [
    "Worldline",
    "rest",
    "uniform",
    "circular",
    "from_samples",
    "load_worldline_csv",
    "write_worldline_csv",
    "retarded_time",
    "lw_fields",
    "FieldSample",
    "maxwell_residuals",
]

# distance below which a field point is considered to sit on the charge
SINGULAR_RADIUS = 1e-9


@dataclass(frozen=True)
class Worldline:
    """A C^2 subluminal trajectory ``t -> Q(t)`` with its first two derivatives.

    All three evaluators accept scalar or array ``t`` and return arrays of
    shape ``t.shape + (3,)``.  ``vmax`` bounds ``|Qdot|`` from above and is used
    to bracket the retarded time; ``t_range`` is the interval on which the
    worldline is defined (infinite for analytic kinds).
    """

    Q: Callable
    Qdot: Callable
    Qddot: Callable
    kind: str
    c: float
    vmax: float
    t_range: tuple = (-np.inf, np.inf)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.vmax < self.c:
            raise SuperluminalError(
                f"worldline speed bound {self.vmax!r} is not below c={self.c!r}")


def _tile(vec, t):
    t = np.asarray(t, dtype=float)
    return np.broadcast_to(np.asarray(vec, dtype=float), t.shape + (3,)).copy()


def rest(Q0=(0.0, 0.0, 0.0), c: float = 1.0) -> Worldline:
    Q0 = np.asarray(Q0, dtype=float)
    return Worldline(lambda t: _tile(Q0, t), lambda t: _tile(0.0, t),
                     lambda t: _tile(0.0, t), "rest", c, 0.0)


def uniform(v, Q0=(0.0, 0.0, 0.0), c: float = 1.0) -> Worldline:
    """Straight line ``Q(t) = Q0 + v t``."""
    v = np.asarray(v, dtype=float)
    Q0 = np.asarray(Q0, dtype=float)
    speed = float(np.linalg.norm(v))
    if speed >= c:
        raise SuperluminalError(f"|v| = {speed} >= c = {c}")
    return Worldline(
        lambda t: Q0 + np.asarray(t, dtype=float)[..., None] * v,
        lambda t: _tile(v, t), lambda t: _tile(0.0, t), "uniform", c, speed)


def circular(radius: float, omega: float, center=(0.0, 0.0, 0.0),
             c: float = 1.0) -> Worldline:
    """Uniform circular motion in the plane ``z = center[2]``."""
    center = np.asarray(center, dtype=float)
    speed = abs(radius * omega)
    if speed >= c:
        raise SuperluminalError(f"|v| = {speed} >= c = {c}")

    def Q(t):
        ph = omega * np.asarray(t, dtype=float)
        return center + radius * np.stack([np.cos(ph), np.sin(ph), np.zeros_like(ph)], -1)

    def Qdot(t):
        ph = omega * np.asarray(t, dtype=float)
        return radius * omega * np.stack([-np.sin(ph), np.cos(ph), np.zeros_like(ph)], -1)

    def Qddot(t):
        ph = omega * np.asarray(t, dtype=float)
        return -radius * omega**2 * np.stack([np.cos(ph), np.sin(ph), np.zeros_like(ph)], -1)

    return Worldline(Q, Qdot, Qddot, "circular", c, speed,
                     meta={"radius": radius, "omega": omega})


def from_samples(t, Q, c: float = 1.0) -> Worldline:
    """C^2 cubic-spline worldline through knots ``(t_i, Q_i)``.

    Subluminality is checked at the knots and at the interval midpoints.
    """
    t = np.asarray(t, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if t.ndim != 1 or Q.shape != (t.size, 3) or t.size < 4:
        raise ConfigError("need at least 4 knots with positions of shape (n, 3)")
    if np.any(np.diff(t) <= 0):
        raise ConfigError("knot times must be strictly increasing")
    spl = CubicSpline(t, Q, axis=0)
    d1, d2 = spl.derivative(1), spl.derivative(2)
    probe = np.concatenate([t, 0.5 * (t[1:] + t[:-1])])
    vmax = float(np.max(np.linalg.norm(d1(probe), axis=-1)))
    if vmax >= c:
        raise SuperluminalError(f"spline worldline reaches |v| = {vmax} >= c = {c}")
    return Worldline(spl, d1, d2, "sampled-spline", c, vmax,
                     t_range=(float(t[0]), float(t[-1])))


def load_worldline_csv(path, c: float = 1.0) -> Worldline:
    """Read a spline worldline from a CSV file with columns ``t,qx,qy,qz``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        data = np.array([[float(r[k]) for k in ("t", "qx", "qy", "qz")] for r in rows])
    except KeyError as exc:
        raise ConfigError(f"worldline CSV is missing column {exc}") from None
    return from_samples(data[:, 0], data[:, 1:], c=c)


def write_worldline_csv(path, t, Q):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "qx", "qy", "qz"])
        for ti, qi in zip(np.asarray(t, float), np.asarray(Q, float)):
            w.writerow([f"{ti:.17g}"] + [f"{x:.17g}" for x in qi])


def _light_cone_gap(w, t, s, tr):
    """``c (t - tr) - |s - Q(tr)|``; strictly decreasing in ``tr``."""
    return w.c * (t - tr) - np.linalg.norm(s - w.Q(tr), axis=-1)


def retarded_time(w: Worldline, t, s, tol: float = 1e-13):
    """Solve ``c (t - t_ret) = |s - Q(t_ret)|`` for the retarded time.

    Vectorized over the leading axes of ``s`` (and ``t``).  The root is
    bracketed by ``[t - r0/(c - vmax), t]`` with ``r0 = |s - Q(t)|``,
    narrowed by bisection and polished by safeguarded Newton steps.

    Raises
    ------
    SingularityError
        If ``s`` coincides with ``Q(t)``.
    DomainError
        If a spline worldline does not reach back far enough in time.
    """
    if not tol > 0:
        raise ConfigError("tol must be positive")
    s = np.asarray(s, dtype=float)
    t = np.broadcast_to(np.asarray(t, dtype=float), s.shape[:-1]).astype(float)
    c = w.c
    r0 = np.linalg.norm(s - w.Q(t), axis=-1)
    if np.any(r0 < SINGULAR_RADIUS):
        raise SingularityError("retarded time requested on the worldline itself")

    hi = t.copy()
    lo = t - r0 / (c - w.vmax)
    t_min = w.t_range[0]
    if np.any(lo < t_min):
        lo = np.maximum(lo, t_min)
        if np.any(_light_cone_gap(w, t, s, lo) < 0):
            raise DomainError("past light cone leaves the worldline's time range")
    # a loose vmax for splines could leave a bad bracket; widen if needed
    for _ in range(60):
        bad = _light_cone_gap(w, t, s, lo) < 0
        if not np.any(bad):
            break
        lo = np.where(bad, t - 2.0 * (t - lo), lo)
        if np.any(lo < t_min):
            raise DomainError("past light cone leaves the worldline's time range")

    width0 = hi - lo
    while np.any(hi - lo > 1e-3 * width0):
        mid = 0.5 * (lo + hi)
        pos = _light_cone_gap(w, t, s, mid) >= 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)

    tr = 0.5 * (lo + hi)
    for _ in range(50):
        d = s - w.Q(tr)
        r = np.linalg.norm(d, axis=-1)
        f = c * (t - tr) - r
        fp = -c + np.einsum("...i,...i->...", d, w.Qdot(tr)) / r
        new = tr - f / fp
        new = np.where((new < lo) | (new > hi), 0.5 * (lo + hi), new)
        pos = _light_cone_gap(w, t, s, new) >= 0
        lo = np.where(pos, new, lo)
        hi = np.where(pos, hi, new)
        moved = np.abs(new - tr)
        tr = new
        if np.all((moved < 0.25 * tol) | (hi - lo < tol)):
            break
    else:
        if np.any(np.abs(_light_cone_gap(w, t, s, tr)) >= c * tol):
            raise DomainError("retarded-time iteration did not converge")
    return tr if tr.ndim else float(tr)


@dataclass(frozen=True)
class FieldSample:
    E: np.ndarray
    B: np.ndarray


def lw_fields(w: Worldline, q: float, t, s, tol: float = 1e-13) -> FieldSample:
    """Lienard-Wiechert fields of a charge ``q`` moving on ``w``.

    ``q = -e`` reproduces the electron field.  Vectorized over ``s``.
    """
    s = np.asarray(s, dtype=float)
    c = w.c
    tr = np.asarray(retarded_time(w, t, s, tol))
    d = s - w.Q(tr)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r < SINGULAR_RADIUS):
        raise SingularityError("Lienard-Wiechert field evaluated on the worldline")
    n = d / r[..., None]
    beta = w.Qdot(tr) / c
    acc = w.Qddot(tr) / c**2
    g2 = 1.0 / (1.0 - np.einsum("...i,...i->...", beta, beta))
    k = 1.0 - np.einsum("...i,...i->...", n, beta)
    nb = n - beta
    E = q / k[..., None] ** 3 * (
        nb / (g2 * r * r)[..., None] + np.cross(n, np.cross(nb, acc)) / r[..., None])
    return FieldSample(E, np.cross(n, E))


def maxwell_residuals(sampler, lo, hi, h: float, t: float = 0.0, c: float = 1.0,
                      centers=(), exclusion: float = 0.0) -> dict:
    """Max-norm residuals of the source-free Maxwell equations on a grid.

    Parameters
    ----------
    sampler : callable
        ``sampler(t, s) -> (E, B)`` with ``s`` of shape ``(..., 3)``.
    lo, hi : array_like
        Opposite corners of the box of evaluation points.
    h : float
        Grid spacing; time derivatives use the step ``h / c``.
    centers : sequence of array_like
        Charge positions at time ``t``; grid points closer than
        ``exclusion`` (plus one stencil width) are skipped.

    Returns
    -------
    dict
        ``faraday``: ``(1/c) dB/dt + curl E``, ``ampere``: ``(1/c) dE/dt - curl B``,
        ``div_B`` and ``div_E``.
    """
    if not h > 0:
        raise ConfigError("grid spacing h must be positive")
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    axes = [np.arange(a, b_ + 0.5 * h, h) for a, b_ in zip(lo, hi)]
    X = np.stack(np.meshgrid(*axes, indexing="ij"), -1)
    mask = np.ones(X.shape[:-1], bool)
    for ctr in centers:
        mask &= np.linalg.norm(X - np.asarray(ctr, float), axis=-1) > exclusion + h
    pts = X[mask]
    if pts.size == 0:
        raise ConfigError("exclusion radius removes every grid point")
    dt = h / c

    def grad_parts(fn_t):
        """Return the spatial Jacobians dF_i/dx_j of E and B at ``pts``."""
        JE = np.empty(pts.shape + (3,))
        JB = np.empty(pts.shape + (3,))
        for j in range(3):
            off = np.zeros(3)
            off[j] = h
            Ep, Bp = fn_t(pts + off)
            Em, Bm = fn_t(pts - off)
            JE[..., j] = (Ep - Em) / (2 * h)
            JB[..., j] = (Bp - Bm) / (2 * h)
        return JE, JB

    JE, JB = grad_parts(lambda x: sampler(t, x))
    Ep, Bp = sampler(t + dt, pts)
    Em, Bm = sampler(t - dt, pts)
    dEdt = (np.asarray(Ep) - np.asarray(Em)) / (2 * dt)
    dBdt = (np.asarray(Bp) - np.asarray(Bm)) / (2 * dt)

    def curl(J):
        return np.stack([J[..., 2, 1] - J[..., 1, 2],
                         J[..., 0, 2] - J[..., 2, 0],
                         J[..., 1, 0] - J[..., 0, 1]], -1)

    def div(J):
        return J[..., 0, 0] + J[..., 1, 1] + J[..., 2, 2]

    return {
        "faraday": float(np.max(np.linalg.norm(dBdt / c + curl(JE), axis=-1))),
        "ampere": float(np.max(np.linalg.norm(dEdt / c - curl(JB), axis=-1))),
        "div_B": float(np.max(np.abs(div(JB)))),
        "div_E": float(np.max(np.abs(div(JE)))),
        "n_points": int(pts.shape[0]),
    }
