"""Klein-Gordon and Dirac evolution with de Broglie-Bohm guidance.

One space dimension on a periodic grid, external potentials only.  Spatial
derivatives are spectral (FFT).  The Klein-Gordon equation for a charge
``q`` (electron: ``q = -e``)

    (i hbar d_t / c - q phi / c)^2 psi = m^2 c^2 psi + (-i hbar d_x - q A / c)^2 psi

is advanced by leapfrog; the Dirac equation
``i hbar d_t psi = c [m c beta + alpha (-i hbar d_x - q A / c)] psi + q phi psi``
(``alpha = sigma_1``, ``beta = sigma_3``) by Strang splitting with the exact
free propagator in Fourier space.

The module also holds the radial Schroedinger eigensolver for Hydrogen with
a Born-Infeld nucleus.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage, stats
from scipy.linalg import eigh_tridiagonal

from .born_infeld import born_potential
from .classical import Trajectory
from .core import ATOMIC_UNITS, BORN_UNITS, ConfigError, Constants, NodeError

__all__ = [
    "Grid1D",
    "StaticPotentials",
    "WaveHistory",
    "SpinorHistory",
    "VelocityHistory",
    "kg_plane_wave",
    "kg_packet",
    "evolve_kg",
    "kg_density",
    "bohm_velocity_kg",
    "dirac_plane_wave",
    "dirac_packet",
    "evolve_dirac",
    "bohm_velocity_dirac",
    "DIRAC_ALPHA",
    "bohm_trajectory",
    "sample_density",
    "equivariance_chi2",
    "SpectrumReport",
    "hydrogen_spectrum",
    "hydrogen_sweep",
    "write_sweep_csv",
]


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid ``x_j = lo + j L / n``."""

    lo: float
    length: float
    n: int

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return self.lo + self.h * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def deriv(self, f):
        return np.fft.ifft(1j * self.k * np.fft.fft(f, axis=-1), axis=-1)


@dataclass(frozen=True)
class StaticPotentials:
    """Time-independent ``phi(x)``, ``A(x)`` (x-component) in one dimension."""

    phi: Callable = staticmethod(lambda x: np.zeros_like(x))
    A: Callable = staticmethod(lambda x: np.zeros_like(x))

    def on(self, grid: Grid1D):
        return np.asarray(self.phi(grid.x), float), np.asarray(self.A(grid.x), float)


def _charge(consts, q):
    return -consts.e if q is None else float(q)


def _energy(p, consts):
    return consts.c * np.sqrt((consts.m * consts.c) ** 2 + p * p)


# --------------------------------------------------------------------------
# Klein-Gordon


@dataclass
class WaveHistory:
    """Snapshots of ``psi`` and ``d_t psi``; ``charge`` has one entry per step."""

    grid: Grid1D
    times: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    charge: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_csv(self, path, k: int = -1):
        """Columns ``x,re,im`` of snapshot ``k``."""
        data = np.column_stack([self.grid.x, self.psi[k].real, self.psi[k].imag])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,re,im", comments="")


def kg_plane_wave(grid: Grid1D, p: float, consts: Constants = BORN_UNITS):
    """Positive-energy free plane wave ``exp(i (p x - E t)/hbar)`` at ``t = 0``."""
    hb = consts.hbar
    psi = np.exp(1j * p * grid.x / hb)
    return psi, -1j * _energy(p, consts) / hb * psi


def kg_packet(grid: Grid1D, x0: float, p0: float, sigma: float,
              consts: Constants = BORN_UNITS):
    """Gaussian packet built from positive-frequency free modes only."""
    hb = consts.hbar
    k = grid.k
    p = hb * k
    amp = np.exp(-0.5 * ((p - p0) * sigma / hb) ** 2 - 1j * k * (x0 - grid.lo))
    psi = np.fft.ifft(amp) * grid.n
    dpsi = np.fft.ifft(-1j * _energy(p, consts) / hb * amp) * grid.n
    scale = 1.0 / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.h)
    return psi * scale, dpsi * scale


def _kg_operator(grid, phi, A, consts, q):
    """``psi -> m^2 c^2 psi + Pi^2 psi - (q phi / c)^2 psi`` (static potentials)."""
    c, m, hb = consts.c, consts.m, consts.hbar
    k = grid.k
    qa = q * A / c

    def op(psi):
        lap = np.fft.ifft(-(k * k) * np.fft.fft(psi))
        out = (m * c) ** 2 * psi - hb * hb * lap
        if np.any(qa):
            out += 1j * hb * (grid.deriv(qa * psi) + qa * grid.deriv(psi)) + qa * qa * psi
        return out - (q * phi / c) ** 2 * psi

    return op


def kg_density(psi, dpsi, phi, consts: Constants = BORN_UNITS, q: float | None = None):
    """``rho = Im(conj(psi) (-hbar d_t - i q phi) psi) / (m c^2)``."""
    q = _charge(consts, q)
    c, m, hb = consts.c, consts.m, consts.hbar
    return (np.imag(np.conj(psi) * (-hb * dpsi)) - q * phi * np.abs(psi) ** 2) / (m * c * c)


def evolve_kg(psi0, dpsi0, grid: Grid1D, pots: StaticPotentials, dt: float, T: float,
              consts: Constants = BORN_UNITS, q: float | None = None,
              store_every: int = 1, drift_tol: float = 1e-8) -> WaveHistory:
    """Leapfrog for the second-order Klein-Gordon equation.

    The first step uses the Taylor expansion with ``d_tt psi`` from the
    equation.  With static potentials the discrete charge
    ``sum_j [-hbar Im(conj(psi^n) psi^{n+1}) / dt - q phi Re(conj(psi^n) psi^{n+1})] h / (m c^2)``
    is conserved exactly; its history is returned and a relative drift above
    ``drift_tol`` per unit time sets ``meta["charge_drift_flag"]``.
    """
    q = _charge(consts, q)
    c, m, hb = consts.c, consts.m, consts.hbar
    kmax = np.max(np.abs(grid.k))
    limit = 2 * hb / (c * np.sqrt(hb * hb * kmax * kmax + (m * c) ** 2))
    phi, A = pots.on(grid)
    limit /= 1 + np.max(np.abs(q * phi)) / (m * c * c)
    if dt >= limit:
        raise ConfigError(f"dt = {dt} violates the leapfrog stability limit {limit:.4g}")
    n = int(round(T / dt))
    op = _kg_operator(grid, phi, A, consts, q)
    a2 = hb * hb / (c * c * dt * dt)
    a1 = hb * q * phi / (c * c * dt)
    coef_next = -a2 - 1j * a1
    coef_prev = -a2 + 1j * a1

    def ddot(psi, dpsi):
        # -hb^2/c^2 psi_tt - 2 i hb q phi / c^2 psi_t = op(psi)
        return -(c * c / (hb * hb)) * (op(psi) + 2j * hb * q * phi / c**2 * dpsi)

    prev = np.asarray(psi0, complex)
    cur = prev + dt * dpsi0 + 0.5 * dt * dt * ddot(prev, np.asarray(dpsi0, complex))

    def charge(a, b):
        z = np.conj(a) * b
        return float(np.sum(-hb * z.imag / dt - q * phi * z.real) * grid.h / (m * c * c))

    charges = [charge(prev, cur)]
    times, psis, dpsis = [0.0], [prev.copy()], [np.asarray(dpsi0, complex).copy()]
    for i in range(1, n + 1):
        nxt = (op(cur) - 2 * a2 * cur - coef_prev * prev) / coef_next
        if i % store_every == 0:
            times.append(i * dt)
            psis.append(cur.copy())
            dpsis.append((nxt - prev) / (2 * dt))
        charges.append(charge(cur, nxt))
        prev, cur = cur, nxt
    charges = np.array(charges)
    drift = float(np.max(np.abs(charges - charges[0])) / abs(charges[0]) / max(T, dt))
    meta = {"method": "kg-leapfrog-spectral", "dt": dt, "T": T, "q": q,
            "charge_drift_per_time": drift, "charge_drift_flag": drift > drift_tol}
    return WaveHistory(grid, np.array(times), np.array(psis), np.array(dpsis), charges, meta)


def bohm_velocity_kg(psi, dpsi, grid: Grid1D, pots: StaticPotentials,
                     consts: Constants = BORN_UNITS, q: float | None = None,
                     floor: float = 1e-12, strict: bool = True):
    """``v = c Im(conj(psi)(hbar d_x - i q A/c) psi) / Im(conj(psi)(-hbar d_t/c - i q phi/c) psi)``.

    Points where the density ``|rho|`` falls below ``floor`` raise
    :class:`NodeError` (``strict``) or yield ``nan``.
    """
    q = _charge(consts, q)
    c, hb = consts.c, consts.hbar
    phi, A = pots.on(grid)
    num = np.imag(np.conj(psi) * (hb * grid.deriv(psi) - 1j * q * A / c * psi))
    den = np.imag(np.conj(psi) * (-hb * dpsi / c - 1j * q * phi / c * psi))
    rho = den * c / (consts.m * c * c)
    bad = np.abs(rho) < floor
    if strict and np.any(bad):
        raise NodeError(f"density below {floor} at {int(bad.sum())} grid points")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(bad, np.nan, c * num / den)
    return v


# --------------------------------------------------------------------------
# Dirac

_S1 = np.array([[0, 1], [1, 0]], complex)
_S2 = np.array([[0, -1j], [1j, 0]], complex)
_S3 = np.array([[1, 0], [0, -1]], complex)
_Z2 = np.zeros((2, 2), complex)
# standard representation alpha_i = [[0, s_i], [s_i, 0]]
DIRAC_ALPHA = np.array([np.block([[_Z2, s], [s, _Z2]]) for s in (_S1, _S2, _S3)])


@dataclass
class SpinorHistory:
    grid: Grid1D
    times: np.ndarray
    psi: np.ndarray  # (n_t, 2, n_x)
    norm: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_csv(self, path, k: int = -1):
        """Columns ``x,re1,im1,re2,im2`` of snapshot ``k``."""
        s = self.psi[k]
        data = np.column_stack([self.grid.x, s[0].real, s[0].imag, s[1].real, s[1].imag])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,re1,im1,re2,im2",
                   comments="")


def dirac_plane_wave(grid: Grid1D, p: float, consts: Constants = BORN_UNITS):
    """Positive-energy spinor ``(E + m c^2, c p) exp(i p x / hbar)``, unit amplitude."""
    c, m = consts.c, consts.m
    E = _energy(p, consts)
    u = np.array([E + m * c * c, c * p]) / np.hypot(E + m * c * c, c * p)
    return u[:, None] * np.exp(1j * p * grid.x / consts.hbar)[None]


def dirac_packet(grid: Grid1D, x0: float, p0: float, sigma: float,
                 consts: Constants = BORN_UNITS):
    """Gaussian packet of positive-energy free spinors, normalized."""
    c, m, hb = consts.c, consts.m, consts.hbar
    k = grid.k
    p = hb * k
    E = _energy(p, consts)
    amp = np.exp(-0.5 * ((p - p0) * sigma / hb) ** 2 - 1j * k * (x0 - grid.lo))
    u = np.array([E + m * c * c, c * p]) / np.hypot(E + m * c * c, c * p)
    psi = np.fft.ifft(u * amp, axis=-1) * grid.n
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.h)


def evolve_dirac(psi0, grid: Grid1D, pots: StaticPotentials, dt: float, T: float,
                 consts: Constants = BORN_UNITS, q: float | None = None,
                 store_every: int = 1, drift_tol: float = 1e-10) -> SpinorHistory:
    """Strang split-step evolution of the 1+1D Dirac equation.

    Half steps with the local phase ``exp(-i q phi dt / 2 hbar)`` and the
    vector-potential rotation ``exp(i q A alpha dt / 2 hbar)`` bracket the
    exact free step ``cos(E dt/hbar) - i sin(E dt/hbar) H_k / E`` in Fourier
    space.  Every factor is unitary.
    """
    q = _charge(consts, q)
    c, m, hb = consts.c, consts.m, consts.hbar
    kmax = np.max(np.abs(grid.k))
    if c * hb * kmax * dt / hb > np.pi:
        raise ConfigError("dt too large: the fastest mode rotates by more than pi per step")
    phi, A = pots.on(grid)
    n = int(round(T / dt))
    p = hb * grid.k
    E = _energy(p, consts)
    cs, sn = np.cos(E * dt / hb), np.sin(E * dt / hb)
    # H_k = [[m c^2, c p], [c p, -m c^2]]
    K00 = cs - 1j * sn * m * c * c / E
    K11 = cs + 1j * sn * m * c * c / E
    K01 = -1j * sn * c * p / E
    vphase = np.exp(-0.5j * q * phi * dt / hb)
    theta = 0.5 * q * A * dt / hb
    ca, sa = np.cos(theta), 1j * np.sin(theta)
    has_a = bool(np.any(A))

    def half(psi):
        psi = psi * vphase
        if has_a:
            psi = np.array([ca * psi[0] + sa * psi[1], sa * psi[0] + ca * psi[1]])
        return psi

    def norm(psi):
        return float(np.sum(np.abs(psi) ** 2) * grid.h)

    psi = np.asarray(psi0, complex)
    norms = [norm(psi)]
    times, snaps = [0.0], [psi.copy()]
    for i in range(1, n + 1):
        psi = half(psi)
        f = np.fft.fft(psi, axis=-1)
        f = np.array([K00 * f[0] + K01 * f[1], K01 * f[0] + K11 * f[1]])
        psi = half(np.fft.ifft(f, axis=-1))
        norms.append(norm(psi))
        if i % store_every == 0:
            times.append(i * dt)
            snaps.append(psi.copy())
    norms = np.array(norms)
    step_drift = float(np.max(np.abs(np.diff(norms))) / norms[0]) if n else 0.0
    meta = {"method": "dirac-strang-spectral", "dt": dt, "T": T, "q": q,
            "norm_drift_per_step": step_drift, "norm_drift_flag": step_drift > drift_tol}
    return SpinorHistory(grid, np.array(times), np.array(snaps), norms, meta)


def bohm_velocity_dirac(psi, c: float = 1.0, floor: float = 0.0, strict: bool = True):
    """``v = c psi^dag alpha psi / psi^dag psi`` with components on axis 0.

    Two components: 1+1D with ``alpha = sigma_1`` (returns ``v_x``).  Four
    components: 3+1D standard representation (returns a vector on the last
    axis).  ``|v| <= c`` is asserted.
    """
    psi = np.asarray(psi, complex)
    dens = np.sum(np.abs(psi) ** 2, axis=0)
    bad = dens <= floor
    if strict and np.any(bad):
        raise NodeError("spinor density vanishes at an evaluated point")
    with np.errstate(divide="ignore", invalid="ignore"):
        if psi.shape[0] == 2:
            v = c * 2 * np.real(np.conj(psi[0]) * psi[1]) / dens
            speed = np.abs(v)
        elif psi.shape[0] == 4:
            cur = np.stack([np.real(np.einsum("i...,ij,j...->...", np.conj(psi), a, psi))
                            for a in DIRAC_ALPHA], axis=-1)
            v = c * cur / dens[..., None]
            speed = np.linalg.norm(v, axis=-1)
        else:
            raise ConfigError("spinors must have 2 or 4 components")
    ok = ~bad
    assert np.all(speed[ok] <= c * (1 + 1e-12)), "Dirac guiding velocity exceeded c"
    return v


# --------------------------------------------------------------------------
# trajectories


@dataclass
class VelocityHistory:
    """Velocity snapshots ``v[k, j]`` at ``times[k]`` on a periodic grid."""

    grid: Grid1D
    times: np.ndarray
    v: np.ndarray


def _wrap_coords(grid, Q):
    return ((Q - grid.lo) / grid.h) % grid.n


def bohm_trajectory(vfield, Q0, dt: float, T: float, t0: float = 0.0,
                    max_halvings: int = 4) -> Trajectory:
    """RK4 for ``dQ/dt = v(t, Q)`` for an ensemble of 1D starting points.

    ``vfield`` is a :class:`VelocityHistory` (cubic splines in space, linear
    in time) or a callable ``v(t, Q)``.  A step that meets a non-finite
    velocity (a node) is retried with up to ``max_halvings`` halvings of the
    step; members that still fail are frozen as ``nan`` and reported in
    ``meta["truncated"]``.
    """
    Q0 = np.atleast_1d(np.asarray(Q0, float))
    if isinstance(vfield, VelocityHistory):
        hist = vfield
        # nodes (nan velocities) are zero-filled for the spline and masked
        coef = [ndimage.spline_filter1d(np.nan_to_num(v, nan=0.0), order=3,
                                        mode="grid-wrap") for v in hist.v]
        valid = [np.isfinite(v).astype(float) for v in hist.v]

        def at(k, Q):
            idx = _wrap_coords(hist.grid, Q)[None]
            val = ndimage.map_coordinates(coef[k], idx, order=3, mode="grid-wrap",
                                          prefilter=False)
            ok = ndimage.map_coordinates(valid[k], idx, order=1, mode="grid-wrap")
            return np.where(ok > 1 - 1e-9, val, np.nan)

        def vel(t, Q):
            times = hist.times
            if len(times) == 1:
                return at(0, Q)
            k = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(times) - 2))
            w = (t - times[k]) / (times[k + 1] - times[k])
            return (1 - w) * at(k, Q) + w * at(k + 1, Q)
    else:
        vel = vfield

    def rk4(t, Q, h):
        k1 = vel(t, Q)
        k2 = vel(t + 0.5 * h, Q + 0.5 * h * k1)
        k3 = vel(t + 0.5 * h, Q + 0.5 * h * k2)
        k4 = vel(t + h, Q + h * k3)
        return Q + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    n = int(round(T / dt))
    Q = Q0.copy()
    alive = np.ones(Q.shape, bool)
    out = [Q.copy()]
    for i in range(n):
        t = t0 + i * dt
        new = np.full_like(Q, np.nan)
        new[alive] = rk4(t, Q[alive], dt)
        retry = alive & ~np.isfinite(new)
        for level in range(1, max_halvings + 1):
            if not np.any(retry):
                break
            sub = 2**level
            Qr = Q[retry]
            for j in range(sub):
                Qr = rk4(t + j * dt / sub, Qr, dt / sub)
            new[retry] = Qr
            retry = retry & ~np.isfinite(new)
        alive &= np.isfinite(new)
        Q = np.where(alive, new, np.nan)
        out.append(Q.copy())
    Qs = np.array(out)
    ts = t0 + dt * np.arange(n + 1)
    Qv = np.zeros(Qs.shape + (3,))
    Qv[..., 0] = Qs
    meta = {"method": "bohm-rk4", "dt": dt, "T": T, "truncated": int((~alive).sum()),
            "status": "ok" if alive.all() else "truncated"}
    return Trajectory(ts, Qv, np.zeros_like(Qv), meta=meta)


def sample_density(grid: Grid1D, rho, n: int, seed: int = 0):
    """Draw ``n`` positions distributed by the (positive) grid density ``rho``."""
    rho = np.asarray(rho, float)
    if np.any(rho < 0):
        raise NodeError("density is negative somewhere; cannot sample")
    rng = np.random.default_rng(seed)
    cdf = np.concatenate([[0.0], np.cumsum(rho)])
    cdf /= cdf[-1]
    edges = grid.lo + grid.h * (np.arange(grid.n + 1) - 0.5)
    return np.interp(rng.random(n), cdf, edges)


def equivariance_chi2(grid: Grid1D, rho, Q, bins: int = 20, min_expected: float = 5.0):
    """Pearson test of ensemble positions ``Q`` against the grid density ``rho``.

    Bins are equal-probability cells of ``rho``; those are merged until each
    expects at least ``min_expected`` members.  Returns ``(chi2, dof, p_value)``.
    """
    Q = np.asarray(Q, float)
    Q = Q[np.isfinite(Q)]
    rho = np.clip(np.asarray(rho, float), 0, None)
    cdf = np.concatenate([[0.0], np.cumsum(rho)])
    cdf /= cdf[-1]
    edges_x = grid.lo + grid.h * (np.arange(grid.n + 1) - 0.5)
    nb = int(max(2, min(bins, len(Q) // min_expected)))
    cuts = np.interp(np.linspace(0, 1, nb + 1), cdf, edges_x)
    wrapped = grid.lo - 0.5 * grid.h + (Q - grid.lo + 0.5 * grid.h) % grid.length
    observed = np.histogram(wrapped, cuts)[0]
    expected = len(Q) * np.diff(np.interp(cuts, edges_x, cdf))
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    dof = nb - 1
    return chi2, dof, float(stats.chi2.sf(chi2, dof))


# --------------------------------------------------------------------------
# Hydrogen


@dataclass
class SpectrumReport:
    b: float
    levels: list
    omitted: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    def energy(self, n: int, l: int = 0) -> float:
        for lev in self.levels:
            if lev["n"] == n and lev["l"] == l:
                return lev["energy"]
        raise KeyError((n, l))

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(asdict(self) | {"b": None if np.isinf(self.b) else self.b,
                                      "b_is_infinite": bool(np.isinf(self.b))},
                      fh, indent=2, sort_keys=True)


def _radial_levels(V, l, h, R, count):
    r = h * np.arange(1, int(round(R / h)))
    diag = 1.0 / (h * h) + l * (l + 1) / (2 * r * r) + V(r)
    off = np.full(len(r) - 1, -0.5 / (h * h))
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1),
                            eigvals_only=True)


def hydrogen_spectrum(b: float, consts: Constants = ATOMIC_UNITS, n_max: int = 3,
                      l_max: int = 2, h: float = 0.01, R: float = 80.0,
                      conv_tol: float = 1e-5) -> SpectrumReport:
    """Radial Schroedinger levels of an electron bound to a Born-Infeld nucleus.

    The potential energy is ``V(r) = born_potential(r, e, b) * e`` (Coulomb
    ``-e^2/r`` for ``b = inf``) and the kinetic term ``-hbar^2 u''/(2 m)``.
    Second-order finite differences on ``(0, R)`` with ``u(0) = u(R) = 0`` are
    solved at spacings ``h`` and ``h/2`` and Richardson-extrapolated; a level
    is omitted when the extrapolation correction or a box-size test with
    ``1.25 R`` exceeds ``conv_tol``.  Lengths are in units of the Bohr
    radius and energies in Hartree.
    """
    if not b > 0:
        raise ConfigError("b must be positive (or inf)")
    e, m, hb = consts.e, consts.m, consts.hbar
    a0 = hb * hb / (m * e * e)
    Eh = e * e / a0

    def V(r):
        return born_potential(r * a0, e, b) * e / Eh

    levels, omitted = [], []
    for l in range(min(l_max, n_max - 1) + 1):
        count = n_max - l
        coarse = _radial_levels(V, l, h, R, count)
        fine = _radial_levels(V, l, h / 2, R, count)
        rich = (4 * fine - coarse) / 3
        wide = (4 * _radial_levels(V, l, h / 2, 1.25 * R, count)
                - _radial_levels(V, l, h, 1.25 * R, count)) / 3
        for i in range(count):
            err = max(abs(rich[i] - fine[i]), abs(wide[i] - rich[i]))
            entry = {"n": l + 1 + i, "l": l, "energy": float(rich[i] * Eh),
                     "error_estimate": float(err * Eh)}
            (levels if err <= conv_tol else omitted).append(entry)
    return SpectrumReport(float(b), levels, omitted,
                          {"h": h, "R": R, "conv_tol": conv_tol, "richardson": "h, h/2"})


def hydrogen_sweep(bs, consts: Constants = ATOMIC_UNITS, threads: int = 1, **kw):
    """Ground-state energies ``E_1(b)``; returns ``(bs, E1, monotone)``.

    ``monotone`` is true when ``E_1`` strictly decreases as ``b`` grows.  An
    unconverged ground state enters as ``nan`` and makes ``monotone`` false.
    """
    bs = np.asarray(sorted(bs), float)

    def one(b):
        rep = hydrogen_spectrum(b, consts, n_max=1, l_max=0, **kw)
        return rep.energy(1, 0) if rep.levels else np.nan

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            E1 = np.array(list(pool.map(one, bs)))
    else:
        E1 = np.array([one(b) for b in bs])
    return bs, E1, bool(np.all(np.diff(E1) < 0))


def write_sweep_csv(path, bs, E1, E_ref: float = -0.5):
    """Columns ``b,E1,E1_minus_coulomb``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["b", "E1", "E1_minus_coulomb"])
        for b, E in zip(bs, E1):
            w.writerow([f"{b:.17g}", f"{E:.17g}", f"{E - E_ref:.17g}"])
