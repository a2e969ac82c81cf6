"""Variational solver for electrostatic Born-Infeld fields of smeared point charges.

The displacement lives on the faces of a cubic staggered grid.  It is split
as ``D = D_p + curl_h a`` where ``D_p`` is a discrete gradient field carrying
the charge (discrete Gauss law holds exactly) and the edge potential ``a`` is
chosen to minimize the discrete Born-Infeld energy.  Tangential ``a`` vanishes
on the box surface, so the boundary flux is untouched by the minimization.
"""
from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import fft
from scipy.optimize import line_search
from scipy.optimize._linesearch import LineSearchWarning

from .born_infeld import Box, superpose, point_charge_sampler, surface_force
from .core import ConfigError, OptimizationError

__all__ = [
    "PointCharge",
    "ChargeConfig",
    "GridField",
    "SolverReport",
    "solve_electrostatic",
    "smeared_coulomb",
    "half_box_force",
    "coulomb_asymptotics_check",
]


@dataclass(frozen=True)
class PointCharge:
    position: tuple
    q: float
    a: float  # smearing radius (length units)


@dataclass(frozen=True)
class ChargeConfig:
    charges: tuple

    def __post_init__(self):
        pos = [np.asarray(c.position, float) for c in self.charges]
        for i in range(len(pos)):
            if self.charges[i].a < 0:
                raise ConfigError("smearing radius must be >= 0")
            for j in range(i):
                if np.allclose(pos[i], pos[j]):
                    raise ConfigError("charge positions must be distinct")

    @classmethod
    def of(cls, *triples):
        return cls(tuple(PointCharge(tuple(map(float, p)), float(q), float(a))
                         for p, q, a in triples))

    @property
    def total_charge(self) -> float:
        return sum(c.q for c in self.charges)


def _bump(r, a):
    """Unnormalized C^2 bump ``(1 - (r/a)^2)^3`` supported in ``r < a``."""
    u = np.clip(r / a, 0.0, 1.0)
    return (1.0 - u * u) ** 3


# int_0^a 4 pi r^2 (1 - r^2/a^2)^3 dr = 4 pi a^3 * 16/315
_BUMP_MASS = 4 * np.pi * 16.0 / 315.0


def _enclosed_fraction(r, a):
    """Fraction of a bump of radius ``a`` inside radius ``r``."""
    u = np.clip(np.asarray(r, float) / a, 0.0, 1.0)
    # int_0^u x^2 (1-x^2)^3 dx, scaled by its value at u = 1 (16/315)
    poly = u**3 / 3 - 3 * u**5 / 5 + 3 * u**7 / 7 - u**9 / 9
    return poly / (16.0 / 315.0)


def smeared_coulomb(cfg: ChargeConfig, s):
    """Linear (Maxwell) displacement of the smeared charges at points ``s``."""
    s = np.asarray(s, float)
    D = np.zeros(s.shape)
    for ch in cfg.charges:
        d = s - np.asarray(ch.position, float)
        r = np.linalg.norm(d, axis=-1)
        frac = _enclosed_fraction(r, ch.a) if ch.a > 0 else np.ones_like(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            D += np.where(r[..., None] > 0, ch.q * frac[..., None] * d / r[..., None] ** 3, 0.0)
    return D


# --------------------------------------------------------------------------
# staggered-grid operators


def _curl(ax, ay, az, h):
    Dx = (np.diff(az, axis=1) - np.diff(ay, axis=2)) / h
    Dy = (np.diff(ax, axis=2) - np.diff(az, axis=0)) / h
    Dz = (np.diff(ay, axis=0) - np.diff(ax, axis=1)) / h
    return Dx, Dy, Dz


def _diff_T(g, axis):
    """Adjoint of ``np.diff(., axis)``."""
    shape = list(g.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    hi = [slice(None)] * 3
    lo = [slice(None)] * 3
    hi[axis] = slice(1, None)
    lo[axis] = slice(0, -1)
    out[tuple(hi)] += g
    out[tuple(lo)] -= g
    return out


def _curl_T(gx, gy, gz, h):
    ax = (_diff_T(gy, 2) - _diff_T(gz, 1)) / h
    ay = (_diff_T(gz, 0) - _diff_T(gx, 2)) / h
    az = (_diff_T(gx, 1) - _diff_T(gy, 0)) / h
    return ax, ay, az


def _cell_sq(Dx, Dy, Dz):
    """|D|^2 at cell centres from face values (average of squares)."""
    return (0.5 * (Dx[1:] ** 2 + Dx[:-1] ** 2)
            + 0.5 * (Dy[:, 1:] ** 2 + Dy[:, :-1] ** 2)
            + 0.5 * (Dz[:, :, 1:] ** 2 + Dz[:, :, :-1] ** 2))


def _face_avg(inv, axis):
    """Average of a cell quantity onto the faces normal to ``axis``."""
    shape = list(inv.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    hi = [slice(None)] * 3
    lo = [slice(None)] * 3
    hi[axis] = slice(1, None)
    lo[axis] = slice(0, -1)
    out[tuple(hi)] += 0.5 * inv
    out[tuple(lo)] += 0.5 * inv
    return out


@dataclass
class GridField:
    """Face-centred displacement field on the box ``lo + [0, n h]^3``."""

    Dx: np.ndarray
    Dy: np.ndarray
    Dz: np.ndarray
    h: float
    lo: np.ndarray
    rho: np.ndarray

    @property
    def n(self) -> int:
        return self.Dy.shape[0]

    def axis(self, nodes=False):
        k = np.arange(self.n + 1) if nodes else np.arange(self.n) + 0.5
        return [self.lo[i] + k * self.h for i in range(3)]

    def divergence(self):
        return (np.diff(self.Dx, axis=0) + np.diff(self.Dy, axis=1)
                + np.diff(self.Dz, axis=2)) / self.h

    def constraint_residual(self) -> float:
        """Max ``|div_h D - 4 pi rho_h|`` over all cells."""
        return float(np.max(np.abs(self.divergence() - 4 * np.pi * self.rho)))

    def cell_D(self):
        """Displacement averaged to cell centres, shape ``(n, n, n, 3)``."""
        return np.stack([0.5 * (self.Dx[1:] + self.Dx[:-1]),
                         0.5 * (self.Dy[:, 1:] + self.Dy[:, :-1]),
                         0.5 * (self.Dz[:, :, 1:] + self.Dz[:, :, :-1])], -1)

    def cell_centers(self):
        return np.stack(np.meshgrid(*self.axis(), indexing="ij"), -1)

    def energy(self, b: float) -> float:
        q2 = _cell_sq(self.Dx, self.Dy, self.Dz)
        if np.isinf(b):
            return float(np.sum(q2) * self.h**3 / (8 * np.pi))
        return float(b * b / (4 * np.pi) * self.h**3
                     * np.sum(q2 / b**2 / (np.sqrt(1 + q2 / b**2) + 1)))

    def to_csv(self, path):
        """Cell-centre samples with columns ``x,y,z,Bx,By,Bz,Dx,Dy,Dz``."""
        X = self.cell_centers().reshape(-1, 3)
        D = self.cell_D().reshape(-1, 3)
        data = np.hstack([X, np.zeros_like(D), D])
        header = "x,y,z,Bx,By,Bz,Dx,Dy,Dz"
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")


@dataclass
class SolverReport:
    energy: float
    gradient_norm: float
    iterations: int
    constraint_residual: float
    exterior_energy: float = 0.0
    boundary_flux_mismatch: float = 0.0
    energy_history: list = field(default_factory=list)
    converged: bool = True

    @property
    def total_energy(self) -> float:
        """Interior Born-Infeld energy plus the linear exterior tail."""
        return self.energy + self.exterior_energy

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(asdict(self) | {"total_energy": self.total_energy}, fh,
                      indent=2, sort_keys=True)


# --------------------------------------------------------------------------


def _boundary_fluxes(cfg, n, h, lo):
    """Coulomb normal fluxes on the six box faces, corrected to Gauss' law."""
    xc = [lo[i] + (np.arange(n) + 0.5) * h for i in range(3)]
    hi = lo + n * h
    Fx = np.zeros((n + 1, n, n))
    Fy = np.zeros((n, n + 1, n))
    Fz = np.zeros((n, n, n + 1))
    A, B = np.meshgrid(xc[1], xc[2], indexing="ij")
    for idx, val in ((0, lo[0]), (n, hi[0])):
        Fx[idx] = smeared_coulomb(cfg, np.stack([np.full_like(A, val), A, B], -1))[..., 0]
    A, B = np.meshgrid(xc[0], xc[2], indexing="ij")
    for idx, val in ((0, lo[1]), (n, hi[1])):
        Fy[:, idx] = smeared_coulomb(cfg, np.stack([A, np.full_like(A, val), B], -1))[..., 1]
    A, B = np.meshgrid(xc[0], xc[1], indexing="ij")
    for idx, val in ((0, lo[2]), (n, hi[2])):
        Fz[:, :, idx] = smeared_coulomb(cfg, np.stack([A, B, np.full_like(A, val)], -1))[..., 2]
    flux = h * h * (Fx[-1].sum() - Fx[0].sum() + Fy[:, -1].sum() - Fy[:, 0].sum()
                    + Fz[:, :, -1].sum() - Fz[:, :, 0].sum())
    target = 4 * np.pi * cfg.total_charge
    delta = (target - flux) / (6 * n * n * h * h)
    Fx[-1] += delta
    Fx[0] -= delta
    Fy[:, -1] += delta
    Fy[:, 0] -= delta
    Fz[:, :, -1] += delta
    Fz[:, :, 0] -= delta
    mismatch = abs(target - flux) / max(abs(target), 4 * np.pi * max(abs(c.q) for c in cfg.charges))
    return Fx, Fy, Fz, mismatch


def _density(cfg, n, h, lo):
    xc = [lo[i] + (np.arange(n) + 0.5) * h for i in range(3)]
    X, Y, Z = np.meshgrid(*xc, indexing="ij")
    rho = np.zeros((n, n, n))
    for ch in cfg.charges:
        p = np.asarray(ch.position, float)
        r = np.sqrt((X - p[0]) ** 2 + (Y - p[1]) ** 2 + (Z - p[2]) ** 2)
        w = _bump(r, ch.a)
        if w.sum() == 0:
            raise ConfigError("smearing radius too small to be resolved by the grid")
        rho += ch.q * w / (w.sum() * h**3)
    return rho


def _particular_solution(cfg, n, h, lo):
    """Gradient field with exact discrete Gauss law and Coulomb boundary flux."""
    rho = _density(cfg, n, h, lo)
    Fx, Fy, Fz, mismatch = _boundary_fluxes(cfg, n, h, lo)
    rhs = -4 * np.pi * rho
    rhs[-1] += Fx[-1] / h
    rhs[0] -= Fx[0] / h
    rhs[:, -1] += Fy[:, -1] / h
    rhs[:, 0] -= Fy[:, 0] / h
    rhs[:, :, -1] += Fz[:, :, -1] / h
    rhs[:, :, 0] -= Fz[:, :, 0] / h
    # Neumann Laplacian on cell centres is diagonalized by DCT-II
    lam1 = (2 * np.cos(np.pi * np.arange(n) / n) - 2) / h**2
    lam = lam1[:, None, None] + lam1[None, :, None] + lam1[None, None, :]
    lam[0, 0, 0] = 1.0
    ph = fft.dctn(rhs, type=2, norm="ortho") / lam
    ph[0, 0, 0] = 0.0
    phi = fft.idctn(ph, type=2, norm="ortho")
    Fx[1:-1] = -np.diff(phi, axis=0) / h
    Fy[:, 1:-1] = -np.diff(phi, axis=1) / h
    Fz[:, :, 1:-1] = -np.diff(phi, axis=2) / h
    return Fx, Fy, Fz, rho, mismatch


class _EdgePotential:
    """Packing, energy/gradient and preconditioner for the free edge potential."""

    def __init__(self, Dp, h, b):
        self.Dp = Dp
        self.h = h
        self.b = b
        n = Dp[1].shape[0]
        self.n = n
        self.shapes = [(n, n - 1, n - 1), (n - 1, n, n - 1), (n - 1, n - 1, n)]
        self.sizes = [int(np.prod(s)) for s in self.shapes]
        self.q0 = _cell_sq(*Dp)
        self.s0 = np.sqrt(1 + self.q0 / b**2) if np.isfinite(b) else None
        lam = []
        for comp in range(3):
            parts = []
            for ax in range(3):
                m = self.shapes[comp][ax]
                if ax == comp:
                    k = np.arange(m)
                    parts.append((2 - 2 * np.cos(np.pi * k / m)) / h**2)
                else:
                    k = np.arange(1, m + 1)
                    parts.append((2 - 2 * np.cos(np.pi * k / (m + 1))) / h**2)
            lam.append(parts[0][:, None, None] + parts[1][None, :, None]
                       + parts[2][None, None, :])
        self.lam = lam

    def unpack(self, v):
        n = self.n
        parts = np.split(v, np.cumsum(self.sizes)[:-1])
        ax = np.zeros((n, n + 1, n + 1))
        ay = np.zeros((n + 1, n, n + 1))
        az = np.zeros((n + 1, n + 1, n))
        ax[:, 1:-1, 1:-1] = parts[0].reshape(self.shapes[0])
        ay[1:-1, :, 1:-1] = parts[1].reshape(self.shapes[1])
        az[1:-1, 1:-1, :] = parts[2].reshape(self.shapes[2])
        return ax, ay, az

    def pack(self, ax, ay, az):
        return np.concatenate([ax[:, 1:-1, 1:-1].ravel(), ay[1:-1, :, 1:-1].ravel(),
                               az[1:-1, 1:-1, :].ravel()])

    def field(self, v):
        c = _curl(*self.unpack(v), self.h)
        return tuple(d + dc for d, dc in zip(self.Dp, c))

    def energy_grad(self, v):
        """Energy relative to ``D_p`` and its gradient; also max |curl_h E|/max|E|."""
        D = self.field(v)
        q2 = _cell_sq(*D)
        h, b = self.h, self.b
        if np.isfinite(b):
            s = np.sqrt(1 + q2 / b**2)
            W = h**3 / (4 * np.pi) * np.sum((q2 - self.q0) / (s + self.s0))
            inv = 1.0 / s
        else:
            W = h**3 / (8 * np.pi) * np.sum(q2 - self.q0)
            inv = np.ones_like(q2)
        E = [_face_avg(inv, ax) * D[ax] for ax in range(3)]
        cE = _curl_T(*E, h)
        g = h**3 / (4 * np.pi) * self.pack(*cE)
        emax = max(np.max(np.abs(e)) for e in E)
        curl_rel = float(np.max(np.abs(g))) * 4 * np.pi / h**3 * h / emax
        return W, g, curl_rel

    def precondition(self, g):
        parts = np.split(g, np.cumsum(self.sizes)[:-1])
        out = []
        for comp in range(3):
            x = parts[comp].reshape(self.shapes[comp])
            for ax in range(3):
                if ax == comp:
                    x = fft.dct(x, type=2, axis=ax, norm="ortho")
                else:
                    x = fft.dst(x, type=1, axis=ax, norm="ortho")
            x = x / self.lam[comp]
            for ax in range(3):
                if ax == comp:
                    x = fft.idct(x, type=2, axis=ax, norm="ortho")
                else:
                    x = fft.idst(x, type=1, axis=ax, norm="ortho")
            out.append(x.ravel())
        return 4 * np.pi / self.h**3 * np.concatenate(out)


def _exterior_energy(cfg, lo, hi):
    """Linear field energy outside the box, ``-(1/8 pi) \\oint phi grad(phi).n``."""
    pts, nrm, wts = Box(tuple(lo), tuple(hi), order=64).nodes(64)
    phi = np.zeros(len(pts))
    grad = np.zeros_like(pts)
    for ch in cfg.charges:
        d = pts - np.asarray(ch.position, float)
        r = np.linalg.norm(d, axis=-1)
        phi += ch.q / r
        grad -= ch.q * d / r[:, None] ** 3
    return float(-np.sum(wts * phi * np.einsum("ni,ni->n", grad, nrm)) / (8 * np.pi))


def solve_electrostatic(cfg: ChargeConfig, n: int, h: float, b: float,
                        tol: float = 1e-7, lo=None, max_iter: int = 500,
                        restart: int = 50, max_boundary_field: float = 0.05):
    """Minimize the discrete Born-Infeld energy subject to Gauss' law.

    Parameters
    ----------
    cfg : ChargeConfig
        Smeared point charges.  Every smearing radius must be at least ``2 h``.
    n, h : int, float
        Cells per side and grid spacing.
    b : float
        Born field strength (``np.inf`` for the Maxwell vacuum).
    tol : float
        Stop when ``max |curl_h E| <= tol * max |E| / h``.
    lo : array_like, optional
        Lower box corner; by default the box is centred on the origin.
    max_boundary_field : float
        Largest admissible ``|D|/b`` on the box surface, where the Coulomb
        boundary data must be a good approximation.

    Returns
    -------
    (GridField, SolverReport)
    """
    if n < 8 or h <= 0:
        raise ConfigError("need n >= 8 and h > 0")
    lo = np.full(3, -0.5 * n * h) if lo is None else np.asarray(lo, float)
    hi = lo + n * h
    for ch in cfg.charges:
        if ch.a < 2 * h * (1 - 1e-12):
            raise ConfigError(f"smearing radius {ch.a} is below 2h = {2 * h}")
        p = np.asarray(ch.position, float)
        if np.any(p - ch.a - 2 * h < lo) or np.any(p + ch.a + 2 * h > hi):
            raise ConfigError("box too small: a smeared charge touches the boundary")

    Dp = _particular_solution(cfg, n, h, lo)
    rho, mismatch = Dp[3], Dp[4]
    Dp = Dp[:3]
    if np.isfinite(b):
        bnd = max(np.max(np.abs(Dp[0][[0, -1]])), np.max(np.abs(Dp[1][:, [0, -1]])),
                  np.max(np.abs(Dp[2][:, :, [0, -1]])))
        if bnd / b > max_boundary_field:
            raise ConfigError(f"box too small: |D|/b = {bnd / b:.3g} on the boundary "
                              f"exceeds {max_boundary_field}")
    if mismatch > 1e-2:
        raise ConfigError(f"box too small: boundary flux misses Gauss' law by {mismatch:.2%}")

    prob = _EdgePotential(Dp, h, b)
    v = np.zeros(sum(prob.sizes))
    W, g, crel = prob.energy_grad(v)
    history = [W]
    cache = {}

    def f(x):
        val, grad, cr = prob.energy_grad(x)
        cache["x"], cache["g"], cache["cr"] = x, grad, cr
        return val

    def fprime(x):
        if "x" in cache and cache["x"] is x:
            return cache["g"]
        return prob.energy_grad(x)[1]

    it = 0
    z = prob.precondition(g)
    d = -z
    gz = g @ z
    while crel > tol and it < max_iter:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LineSearchWarning)
            alpha = line_search(f, fprime, v, d, gfk=g, old_fval=W,
                                c1=1e-4, c2=0.1, maxiter=30)[0]
        if alpha is None:
            if crel <= 10 * tol:
                break  # rounding floor of the energy differences
            if np.array_equal(d, -z):
                raise OptimizationError(
                    f"line search failed at iteration {it}: energy {W:.17g}, "
                    f"relative curl residual {crel:.3g}")
            d = -z  # restart along the preconditioned gradient
            continue
        v = v + alpha * d
        W_new, g_new, crel = prob.energy_grad(v)
        if W_new > W:
            raise OptimizationError(f"energy increased at iteration {it}")
        history.append(W_new)
        z_new = prob.precondition(g_new)
        beta = max(0.0, (g_new @ z_new - g_new @ z) / gz)
        it += 1
        if it % restart == 0:
            beta = 0.0
        d = -z_new + beta * d
        g, z, gz, W = g_new, z_new, g_new @ z_new, W_new

    field_ = GridField(*prob.field(v), h=h, lo=lo, rho=rho)
    e_int = field_.energy(b)
    report = SolverReport(
        energy=e_int,
        gradient_norm=float(crel),
        iterations=it,
        constraint_residual=field_.constraint_residual(),
        exterior_energy=_exterior_energy(cfg, lo, hi),
        boundary_flux_mismatch=float(mismatch),
        energy_history=[e_int - history[-1] + w for w in history],
        converged=bool(crel <= 10 * tol),
    )
    return field_, report


# --------------------------------------------------------------------------
# forces


def _stress_traction(D, b, axis, sign):
    """``sign * Theta[:, axis]`` for an electrostatic field (B = 0)."""
    D2 = np.sum(D**2, axis=0)
    if np.isinf(b):
        E = D
        w = 0.5 * D2
    else:
        s = np.sqrt(1 + D2 / b**2)
        E = D / s
        w = D2 / (s * (s + 1))  # pressure E.D - h = b^2 (1 - 1/s)
    T = E * D[axis]
    T[axis] -= w
    return sign * T / (4 * np.pi)


def half_box_force(fld: GridField, b: float, axis: int = 0, index: int | None = None,
                   side: int = -1, margin: int = 1):
    """Stress-tensor force on the charges on one side of a node plane.

    The closed surface is the node plane ``index`` (default: the middle)
    completed by the box faces ``margin`` cells inside the boundary.  The
    surface integral uses the midpoint rule on cell faces.
    """
    if axis != 0:
        raise ConfigError("only planes normal to x are supported")
    n, h = fld.n, fld.h
    index = n // 2 if index is None else index
    Dx, Dy, Dz = fld.Dx, fld.Dy, fld.Dz

    def at_x(i):
        return np.array([Dx[i],
                         0.25 * (Dy[i - 1, :-1] + Dy[i - 1, 1:] + Dy[i, :-1] + Dy[i, 1:]),
                         0.25 * (Dz[i - 1, :, :-1] + Dz[i - 1, :, 1:] + Dz[i, :, :-1] + Dz[i, :, 1:])])

    def at_y(j):
        return np.array([0.25 * (Dx[:-1, j - 1] + Dx[1:, j - 1] + Dx[:-1, j] + Dx[1:, j]),
                         Dy[:, j],
                         0.25 * (Dz[:, j - 1, :-1] + Dz[:, j - 1, 1:] + Dz[:, j, :-1] + Dz[:, j, 1:])])

    def at_z(k):
        return np.array([0.25 * (Dx[:-1, :, k - 1] + Dx[1:, :, k - 1] + Dx[:-1, :, k] + Dx[1:, :, k]),
                         0.25 * (Dy[:, :-1, k - 1] + Dy[:, 1:, k - 1] + Dy[:, :-1, k] + Dy[:, 1:, k]),
                         Dz[:, :, k]])

    m = margin
    tr = slice(m, n - m)
    if side < 0:
        inner, outer, cells = index, m, slice(m, index)
    else:
        inner, outer, cells = index, n - m, slice(index, n - m)
    F = np.zeros(3)
    F += _stress_traction(at_x(inner)[:, tr, tr], b, 0, -side).sum((1, 2))
    F += _stress_traction(at_x(outer)[:, tr, tr], b, 0, side).sum((1, 2))
    F += _stress_traction(at_y(m)[:, cells, tr], b, 1, -1).sum((1, 2))
    F += _stress_traction(at_y(n - m)[:, cells, tr], b, 1, 1).sum((1, 2))
    F += _stress_traction(at_z(m)[:, cells, tr], b, 2, -1).sum((1, 2))
    F += _stress_traction(at_z(n - m)[:, cells, tr], b, 2, 1).sum((1, 2))
    return F * h * h


def coulomb_asymptotics_check(separations, b: float = 1.0, e: float = 1.0, *,
                              h: float | None = None, a: float | None = None,
                              n_max: int = 128, tol: float = 1e-7, threads: int = 1,
                              q_signs=(1, 1)):
    """Half-space stress force between two charges versus Coulomb's law.

    For each separation ``d`` two charges ``q_signs[k] * e`` are placed at
    ``x = -/+ d/2`` in a box centred on the origin; the force on the left
    charge is the stress integral over the bisector plane closed by the
    box faces.

    Returns
    -------
    dict
        ``rows``: list of dicts with ``d, force, coulomb, ratio, direction,
        iterations``; ``slope``: log-log slope of ``|force|`` against ``d``.
    """
    rb = math.sqrt(e / b)
    h = 0.5 * rb if h is None else h
    a = 2 * h if a is None else a
    for d in separations:
        if d < 10 * rb * (1 - 1e-12):
            raise ConfigError(f"separation {d} is below 10 sqrt(e/b) = {10 * rb}")

    def one(d):
        margin = 12 * rb
        n = 2 * math.ceil((0.5 * d + margin) / h)
        if n > n_max:
            raise ConfigError(f"separation {d} needs n = {n} > n_max = {n_max}")
        cfg = ChargeConfig.of(((-0.5 * d, 0, 0), q_signs[0] * e, a),
                              ((0.5 * d, 0, 0), q_signs[1] * e, a))
        fld, rep = solve_electrostatic(cfg, n, h, b, tol=tol)
        F = half_box_force(fld, b, side=-1)
        mag = float(np.linalg.norm(F))
        coul = e * e / d**2
        return {"d": float(d), "n": n, "force": F.tolist(), "magnitude": mag,
                "coulomb": coul, "ratio": mag / coul,
                "repulsive": bool(F[0] < 0),
                "iterations": rep.iterations}

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(one, separations))
    else:
        rows = [one(d) for d in separations]
    ds = np.log([r["d"] for r in rows])
    fs = np.log([r["magnitude"] for r in rows])
    slope = float(np.polyfit(ds, fs, 1)[0]) if len(rows) > 1 else float("nan")
    return {"rows": rows, "slope": slope, "b": b, "e": e, "h": h, "a": a}


def point_charge_field(cfg: ChargeConfig):
    """Superposed point-charge ``(B, D)`` sampler of the charge configuration."""
    return superpose(*[point_charge_sampler(c.position, c.q) for c in cfg.charges])
