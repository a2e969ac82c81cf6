"""Born-Infeld aether law, Born's static point-charge solution and field stresses.

Sign conventions follow the electron: a charge ``-e`` at the origin has
displacement ``D = -e s/|s|^3`` and a negative, bounded potential.  Passing
``b = np.inf`` everywhere recovers the linear Maxwell vacuum.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import beta as _beta

from .core import AccuracyError, ConfigError, SingularityError

__all__ = [
    "BETA_QUARTER",
    "FIELD_ENERGY_COEFF",
    "aether_map",
    "bi_energy_density",
    "born_displacement",
    "born_potential",
    "born_field_energy",
    "radial_field_energy",
    "b_born",
    "stress_tensor",
    "BoxGrid",
    "ConservedIntegrals",
    "bi_conserved_integrals",
    "Sphere",
    "Box",
    "HalfSpace",
    "surface_force",
    "superpose",
    "point_charge_sampler",
    "write_field_csv",
]

#: Euler's Beta(1/4, 1/4) = Gamma(1/4)^2 / Gamma(1/2)
BETA_QUARTER = float(_beta(0.25, 0.25))
#: Born field energy in units of sqrt(b e^3): Beta(1/4, 1/4) / 6
FIELD_ENERGY_COEFF = BETA_QUARTER / 6.0

_GL_X, _GL_W = leggauss(64)


def _gauss(f, a, b, panels=1):
    """Composite 64-point Gauss-Legendre rule for smooth integrands.

    ``a`` and ``b`` may be arrays (one interval per entry).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = np.zeros(np.broadcast(a, b).shape)
    edges = np.linspace(0.0, 1.0, panels + 1)
    for lo_frac, hi_frac in zip(edges[:-1], edges[1:]):
        lo = a + (b - a) * lo_frac
        hi = a + (b - a) * hi_frac
        half = 0.5 * (hi - lo)
        x = 0.5 * (hi + lo)[..., None] + half[..., None] * _GL_X
        total = total + half * np.sum(_GL_W * f(x), axis=-1)
    return total


def _bi_root(X):
    """``sqrt(1 + X) - 1`` without cancellation for small ``X``."""
    return X / (np.sqrt(1.0 + X) + 1.0)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _invariant(B, D, b):
    """``(|B|^2 + |D|^2)/b^2 + |B x D|^2/b^4``."""
    BxD = np.cross(B, D)
    return (_dot(B, B) + _dot(D, D)) / b**2 + _dot(BxD, BxD) / b**4


def aether_map(B, D, b: float):
    """Born-Infeld aether law ``(B, D) -> (E, H)``.

    Returns
    -------
    E, H : ndarray
        ``E = (D - B x (B x D)/b^2)/sqrt(...)`` and
        ``H = (B - D x (D x B)/b^2)/sqrt(...)``.
    """
    B = np.asarray(B, dtype=float)
    D = np.asarray(D, dtype=float)
    if not b > 0:
        raise ConfigError("Born field strength b must be positive")
    if np.isinf(b):
        return D.copy(), B.copy()
    root = np.sqrt(1.0 + _invariant(B, D, b))[..., None]
    E = (D - np.cross(B, np.cross(B, D)) / b**2) / root
    H = (B - np.cross(D, np.cross(D, B)) / b**2) / root
    return E, H


def bi_energy_density(B, D, b: float):
    """Field energy density ``b^2/(4 pi) (sqrt(1 + ...) - 1)``."""
    B = np.asarray(B, dtype=float)
    D = np.asarray(D, dtype=float)
    if np.isinf(b):
        return (_dot(B, B) + _dot(D, D)) / (8 * np.pi)
    return b * b / (4 * np.pi) * _bi_root(_invariant(B, D, b))


def born_displacement(s, e: float = 1.0, center=(0.0, 0.0, 0.0)):
    """Displacement field ``-e (s - center)/|s - center|^3`` of Born's solution."""
    d = np.asarray(s, dtype=float) - np.asarray(center, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularityError("Born displacement is singular at the charge")
    return -e * d / r[..., None] ** 3


def _tail_integral(x0):
    """``int_{x0}^inf dx / sqrt(1 + x^4)`` for ``x0 >= 0``.

    Uses ``int_{x0}^inf = int_0^{1/x0}`` (substitution x -> 1/x) so every
    piece is a smooth integral over a subinterval of [0, 1].
    """
    x0 = np.asarray(x0, dtype=float)
    f = lambda u: 1.0 / np.sqrt(1.0 + u**4)
    near = x0 < 1.0
    lo = np.where(near, x0, 0.0)
    hi = np.where(near, 1.0, 1.0 / np.where(near, 1.0, x0))
    head = _gauss(f, lo, hi)
    whole_tail = _gauss(f, 0.0, 1.0)
    return np.where(near, head + whole_tail, head)


def born_potential(r, e: float = 1.0, b: float = 1.0):
    """Electrostatic potential of Born's solution for the charge ``-e``.

    ``phi(r) = -sqrt(b e) int_{r sqrt(b/e)}^inf dx / sqrt(1 + x^4)``, finite at
    ``r = 0`` where it equals ``-(1/4) Beta(1/4, 1/4) sqrt(b e)``.  With
    ``b = inf`` this is the Coulomb potential ``-e/r``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ConfigError("radius must be non-negative")
    if np.isinf(b):
        with np.errstate(divide="ignore"):
            out = -e / r
        return out if out.ndim else float(out)
    out = -np.sqrt(b * e) * _tail_integral(r * np.sqrt(b / e))
    return out if out.ndim else float(out)


def radial_field_energy(D_of_r, b: float, r_split: float, r_max: float = np.inf):
    """Energy ``b^2 int_0^R (sqrt(1 + D(r)^2/b^2) - 1) r^2 dr`` of a radial field.

    The integral is split at ``r_split`` (normally the Born radius); the
    outer part uses ``r = 1/u`` so its integrand stays bounded.
    """
    def inner(r):
        return b * b * _bi_root((D_of_r(r) / b) ** 2) * r * r

    def outer(u):
        return inner(1.0 / u) / (u * u)

    if r_max <= r_split:
        return float(_gauss(inner, 0.0, r_max, panels=4))
    u_min = 0.0 if np.isinf(r_max) else 1.0 / r_max
    return float(_gauss(inner, 0.0, r_split, panels=4)
                 + _gauss(outer, u_min, 1.0 / r_split, panels=4))


def born_field_energy(e: float = 1.0, b: float = 1.0, r_max: float = np.inf):
    """Field energy of Born's solution inside radius ``r_max`` (default: all space).

    For all space this equals ``(1/6) Beta(1/4, 1/4) sqrt(b e^3)``.
    """
    return radial_field_energy(lambda r: e / r**2, b, np.sqrt(e / b), r_max)


def b_born(m: float = 1.0, c: float = 1.0, e: float = 1.0) -> float:
    """Born's field strength ``36 Beta(1/4,1/4)^-2 m^2 c^4 e^-3``."""
    return 36.0 * BETA_QUARTER**-2 * m * m * c**4 / e**3


def stress_tensor(B, D, b: float):
    """Maxwell-Born-Infeld stress tensor.

    ``Theta = (E (x) D + H (x) B - p I) / (4 pi)`` with ``E, H`` from
    :func:`aether_map` and the pressure ``p = E.D + H.B - h``, where ``h`` is
    ``4 pi`` times the energy density.  This ``p`` is the Legendre conjugate
    of ``h``, which makes ``div Theta`` vanish wherever the static field
    equations hold; it reduces to ``(|D|^2 + |B|^2)/2`` for ``b = inf`` and
    to ``b^2 (1 - 1/sqrt(1 + |D|^2/b^2))`` for ``B = 0``.  Shape ``(..., 3, 3)``.
    """
    B = np.asarray(B, dtype=float)
    D = np.asarray(D, dtype=float)
    E, H = aether_map(B, D, b)
    p = _dot(E, D) + _dot(H, B) - 4 * np.pi * bi_energy_density(B, D, b)
    theta = E[..., :, None] * D[..., None, :] + H[..., :, None] * B[..., None, :]
    theta -= p[..., None, None] * np.eye(3)
    return theta / (4 * np.pi)


# --------------------------------------------------------------------------
# field samplers


def point_charge_sampler(center=(0.0, 0.0, 0.0), q: float = -1.0):
    """Static sampler ``s -> (B, D)`` of a point charge ``q`` (B = 0)."""
    center = np.asarray(center, dtype=float)

    def sample(s):
        D = born_displacement(s, -q, center)
        return np.zeros_like(D), D

    return sample


def superpose(*samplers):
    """Sum of several ``(B, D)`` samplers."""
    def sample(s):
        parts = [f(s) for f in samplers]
        return sum(p[0] for p in parts), sum(p[1] for p in parts)

    return sample


# --------------------------------------------------------------------------
# volume integrals


@dataclass(frozen=True)
class BoxGrid:
    """Cell-centred cubic grid ``[lo, hi]^3`` with ``n`` cells per side."""

    lo: float
    hi: float
    n: int

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.n

    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.n) + 0.5) * self.h

    def scaled(self, factor: float, n: int | None = None) -> "BoxGrid":
        mid = 0.5 * (self.lo + self.hi)
        half = 0.5 * (self.hi - self.lo) * factor
        return BoxGrid(mid - half, mid + half, self.n if n is None else n)


@dataclass
class ConservedIntegrals:
    """Field energy, momentum and angular momentum.

    Iterates as ``(energy, momentum, angular_momentum)``; the remaining
    attributes describe how the value was obtained.
    """

    energy: float
    momentum: np.ndarray
    angular_momentum: np.ndarray
    method: str = "grid"
    tail_correction: float = 0.0
    diverging: bool = False
    detail: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.energy, self.momentum, self.angular_momentum))


def _taper(r, r_cut):
    """C^3 cutoff: 1 for ``r <= r_cut/2``, 0 for ``r >= r_cut``."""
    x = np.clip(2.0 * r / r_cut - 1.0, 0.0, 1.0)
    return 1.0 - x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3)


def _model_energy(q, b, r_cut):
    """Exact integral of the tapered Born density of charge ``q`` over all space."""
    inner = born_field_energy(abs(q), b, r_max=0.5 * r_cut)
    w = lambda r: b * b * _bi_root((q / (b * r * r)) ** 2) * r * r * _taper(r, r_cut)
    return inner + float(_gauss(w, 0.5 * r_cut, r_cut, panels=2))


def _grid_integrals(sampler, b, c, grid: BoxGrid, exclude):
    h = grid.h
    x = grid.centers()
    # Singularity subtraction: near each charge the density follows Born's
    # radial profile, integrated exactly; the grid only sees the bounded rest.
    models = []
    for ctr, q in exclude:
        r_cut = 0.9 * float(np.min(np.minimum(ctr - grid.lo, grid.hi - ctr)))
        models.append((ctr, q, r_cut if r_cut > 6 * h else None))
    Y, Z = np.meshgrid(x, x, indexing="ij")
    energy = []
    mom = []
    ang = []
    for xi in x:  # slab-wise so memory stays O(n^2); sums are per-slab pairwise
        s = np.stack([np.full_like(Y, xi), Y, Z], -1)
        keep = np.ones(Y.shape, bool)
        for ctr, _ in exclude:
            keep &= np.linalg.norm(s - ctr, axis=-1) > 3 * h
        s = s[keep]
        if s.size == 0:
            energy.append(0.0)
            mom.append(np.zeros(3))
            ang.append(np.zeros(3))
            continue
        B, D = sampler(s)
        w = bi_energy_density(B, D, b)
        for ctr, q, r_cut in models:
            if r_cut is not None:
                r = np.linalg.norm(s - ctr, axis=-1)
                w = w - b * b / (4 * np.pi) * _bi_root((q / (b * r * r)) ** 2) * _taper(r, r_cut)
        energy.append(np.sum(w))
        g = np.cross(D, B)
        mom.append(g.sum(0))
        ang.append(np.cross(s, g).sum(0))
    vol = h**3
    E = float(np.sum(energy)) * vol
    for ctr, q, r_cut in models:
        if not np.isfinite(b):
            E = np.inf
        elif r_cut is not None:
            E += _model_energy(q, b, r_cut)
        else:  # charge near the box edge: plain Born ball for the excluded cells
            E += born_field_energy(abs(q), b, r_max=3 * h)
    P = np.sum(mom, axis=0) * vol / (4 * np.pi * c)
    L = np.sum(ang, axis=0) * vol / (4 * np.pi * c)
    return E, P, L


def bi_conserved_integrals(sampler=None, b: float = 1.0, c: float = 1.0, *,
                           grid: BoxGrid | None = None, exclude=(),
                           radial=None, e: float | None = None) -> ConservedIntegrals:
    """Field energy, momentum and angular momentum of a Born-Infeld field.

    Parameters
    ----------
    sampler : callable, optional
        ``sampler(s) -> (B, D)`` for points ``s`` of shape ``(n, 3)``.
    b, c : float
        Born field strength and speed of light.
    grid : BoxGrid, optional
        Cell-centred quadrature grid for the general path.  The integral
        is repeated on a box of half the size and the ``1/L`` Coulomb tail
        is extrapolated from the two results.
    exclude : sequence of (center, charge)
        Point charges.  Balls of radius ``3 h`` around them are skipped; the
        local Born profile of each charge, smoothly cut off inside the box,
        is subtracted on the grid and added back from an exact radial
        integral.
    radial : callable, optional
        ``|D|(r)`` of a spherically symmetric field with ``B = 0``; selects
        the exact radial reduction (momentum and angular momentum vanish).
    e : float, optional
        Shortcut for ``radial = lambda r: e/r**2`` (Born's solution).
    """
    if e is not None:
        radial = lambda r, e=e: e / r**2
    if radial is not None:
        if np.isinf(b):
            raise ConfigError("the field energy of a point charge diverges for b = inf")
        r_split = np.sqrt(abs(radial(1.0)) / b) if e is None else np.sqrt(e / b)
        r_split = r_split if r_split > 0 else 1.0
        E = radial_field_energy(radial, b, r_split)
        return ConservedIntegrals(E, np.zeros(3), np.zeros(3), method="radial")
    if sampler is None or grid is None:
        raise ConfigError("grid quadrature needs both a sampler and a grid")
    if grid.n % 2:
        raise ConfigError("grid.n must be even so the half-size box nests")
    exclude = [(np.asarray(ct, float), float(q)) for ct, q in exclude]
    big = _grid_integrals(sampler, b, c, grid, exclude)
    small = _grid_integrals(sampler, b, c, grid.scaled(0.5, grid.n // 2), exclude)
    # energy outside a box of size L decays like 1/L for a Coulomb tail
    inc = big[0] - small[0]
    tail = inc  # geometric series of increments with ratio 1/2
    quarter = _grid_integrals(sampler, b, c, grid.scaled(0.25, grid.n // 4), exclude)
    inc_prev = small[0] - quarter[0]
    diverging = bool(abs(inc) > 0.75 * abs(inc_prev) and abs(inc) > 1e-12 * abs(big[0]))
    return ConservedIntegrals(big[0] + tail, big[1], big[2], method="grid",
                              tail_correction=tail, diverging=diverging,
                              detail={"box_energies": [quarter[0], small[0], big[0]]})


# --------------------------------------------------------------------------
# surface integrals


@dataclass(frozen=True)
class Sphere:
    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0
    order: int = 16

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigError("sphere radius must be positive")

    def nodes(self, order):
        ct, wt = leggauss(order)
        nph = 2 * order
        ph = 2 * np.pi * np.arange(nph) / nph
        st = np.sqrt(1 - ct**2)
        n = np.stack([st[:, None] * np.cos(ph), st[:, None] * np.sin(ph),
                      np.broadcast_to(ct[:, None], (order, nph))], -1).reshape(-1, 3)
        w = np.repeat(wt, nph) * (2 * np.pi / nph) * self.radius**2
        return np.asarray(self.center, float) + self.radius * n, n, w


@dataclass(frozen=True)
class Box:
    lo: tuple = (-1.0, -1.0, -1.0)
    hi: tuple = (1.0, 1.0, 1.0)
    order: int = 16

    def __post_init__(self):
        if not np.all(np.asarray(self.hi) > np.asarray(self.lo)):
            raise ConfigError("box needs hi > lo in every direction")

    def nodes(self, order):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        x, w = leggauss(order)
        pts, nrm, wts = [], [], []
        for ax in range(3):
            u, v = [k for k in range(3) if k != ax]
            uu = 0.5 * (lo[u] + hi[u]) + 0.5 * (hi[u] - lo[u]) * x
            vv = 0.5 * (lo[v] + hi[v]) + 0.5 * (hi[v] - lo[v]) * x
            U, V = np.meshgrid(uu, vv, indexing="ij")
            W = np.outer(w, w).ravel() * 0.25 * (hi[u] - lo[u]) * (hi[v] - lo[v])
            for side, val in ((-1.0, lo[ax]), (1.0, hi[ax])):
                p = np.empty((U.size, 3))
                p[:, ax] = val
                p[:, u] = U.ravel()
                p[:, v] = V.ravel()
                nn = np.zeros((U.size, 3))
                nn[:, ax] = side
                pts.append(p)
                nrm.append(nn)
                wts.append(W)
        return np.concatenate(pts), np.concatenate(nrm), np.concatenate(wts)


@dataclass(frozen=True)
class HalfSpace:
    """Disk of radius ``radius`` on a plane closed by a hemispherical cap.

    ``normal`` points out of the enclosed half-ball, i.e. away from the
    charges whose force is wanted.  Radial nodes on the disk are clustered
    geometrically towards ``origin`` with inner scale ``core``.
    """

    origin: tuple = (0.0, 0.0, 0.0)
    normal: tuple = (1.0, 0.0, 0.0)
    radius: float = 100.0
    core: float = 1.0
    order: int = 16

    def __post_init__(self):
        if not self.radius > self.core > 0:
            raise ConfigError("need radius > core > 0")

    def _frame(self):
        n = np.asarray(self.normal, float)
        n = n / np.linalg.norm(n)
        trial = np.eye(3)[np.argmin(np.abs(n))]
        e1 = np.cross(n, trial)
        e1 /= np.linalg.norm(e1)
        return n, e1, np.cross(n, e1)

    def nodes(self, order):
        n, e1, e2 = self._frame()
        o = np.asarray(self.origin, float)
        x, w = leggauss(order)
        nph = 2 * order
        ph = 2 * np.pi * np.arange(nph) / nph
        # disk: panels [0, core], then geometric up to radius
        edges = [0.0, self.core]
        while edges[-1] < self.radius:
            edges.append(min(2 * edges[-1], self.radius))
        rr, rw = [], []
        for a, b_ in zip(edges[:-1], edges[1:]):
            rr.append(0.5 * (a + b_) + 0.5 * (b_ - a) * x)
            rw.append(0.5 * (b_ - a) * w)
        rr, rw = np.concatenate(rr), np.concatenate(rw)
        R, PH = np.meshgrid(rr, ph, indexing="ij")
        disk = o + R[..., None] * (np.cos(PH)[..., None] * e1 + np.sin(PH)[..., None] * e2)
        dw = (rw[:, None] * rr[:, None] * (2 * np.pi / nph)) * np.ones_like(PH)
        disk_n = np.broadcast_to(n, disk.shape)
        # cap on the -n side
        ct = 0.5 + 0.5 * x  # cos of angle to -n, in (0, 1)
        cw = 0.5 * w
        CT, PH = np.meshgrid(ct, ph, indexing="ij")
        ST = np.sqrt(1 - CT**2)
        dirs = (-CT[..., None] * n + ST[..., None] * (np.cos(PH)[..., None] * e1
                                                        + np.sin(PH)[..., None] * e2))
        cap = o + self.radius * dirs
        capw = cw[:, None] * (2 * np.pi / nph) * self.radius**2 * np.ones_like(PH)
        return (np.concatenate([disk.reshape(-1, 3), cap.reshape(-1, 3)]),
                np.concatenate([disk_n.reshape(-1, 3), dirs.reshape(-1, 3)]),
                np.concatenate([dw.ravel(), capw.ravel()]))


def surface_force(sampler, b: float, surf, rtol: float = 1e-8, max_order: int = 256):
    """Force ``\\oint Theta . n dsigma`` on the charges enclosed by ``surf``.

    The quadrature order is doubled from ``surf.order`` until two successive
    results agree to ``rtol`` (relative to the largest surface traction
    scale) or ``max_order`` is exceeded.

    Raises
    ------
    AccuracyError
        If the order escalation does not converge.
    """
    def evaluate(order):
        pts, nrm, wts = surf.nodes(order)
        B, D = sampler(pts)
        theta = stress_tensor(B, D, b)
        trac = np.einsum("nij,nj->ni", theta, nrm)
        scale = np.sum(wts * np.linalg.norm(trac, axis=-1))
        return np.einsum("ni,n->i", trac, wts), scale

    order = surf.order
    prev, scale = evaluate(order)
    while order * 2 <= max_order:
        order *= 2
        cur, scale = evaluate(order)
        if np.linalg.norm(cur - prev) <= rtol * max(scale, np.finfo(float).tiny):
            return cur
        prev = cur
    raise AccuracyError(f"surface quadrature did not converge up to order {max_order}")


def write_field_csv(path, sampler, points):
    """Write samples on ``points`` with columns ``x,y,z,Bx,By,Bz,Dx,Dy,Dz``."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    B, D = sampler(points)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "z", "Bx", "By", "Bz", "Dx", "Dy", "Dz"])
        for row in np.hstack([points, B, D]):
            w.writerow([f"{v:.17g}" for v in row])
