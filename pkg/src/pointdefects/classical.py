"""Classical laws of motion for a point charge in external fields.

Three integrators share one fixed-step RK4 driver:

* the Lorentz force law for a test charge,
* the third-order Abraham-Lorentz-Dirac (ALD) equation, written in the
  3+1 variables ``(Q, Qdot, Qddot)``,
* the Landau-Lifshitz (LL) reduction of order, where the third derivative in
  the ALD radiation term is replaced by the total time derivative of the
  Lorentz acceleration along the test-particle motion.

The charge ``q`` is signed; the electron has ``q = -e``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (BORN_UNITS, ConfigError, Constants, ParticleState, SuperluminalError,
                   gamma, velocity_of_momentum)

__all__ = [
    "ExternalField",
    "Trajectory",
    "lorentz_force",
    "integrate_lorentz",
    "integrate_ald",
    "shoot_ald_backward",
    "ll_reduce",
    "integrate_ll",
    "reaction_coefficient",
]

VectorField = Callable[[float, np.ndarray], np.ndarray]


def _zero(t, s):
    return np.zeros(np.shape(s))


def _const(vec):
    vec = np.asarray(vec, dtype=float)
    return lambda t, s: np.broadcast_to(vec, np.shape(s)).copy()


def _zero_jac(t, s):
    return np.zeros(np.shape(s) + (3,))


@dataclass(frozen=True)
class ExternalField:
    """External electric and magnetic fields ``E(t, s)``, ``B(t, s)``.

    Optional analytic derivatives: ``dE_dt``, ``dB_dt`` return vectors and
    ``grad_E``, ``grad_B`` return Jacobians ``J[..., i, j] = d F_i / d s_j``.
    Missing derivatives fall back to central differences with spatial step
    ``h_fd * length_scale`` and time step ``h_fd * length_scale / c``.
    """

    E: VectorField = _zero
    B: VectorField = _zero
    dE_dt: VectorField | None = None
    dB_dt: VectorField | None = None
    grad_E: Callable | None = None
    grad_B: Callable | None = None
    h_fd: float = 1e-5
    length_scale: float = 1.0
    finite_difference: bool = False

    @classmethod
    def uniform(cls, E0=(0.0, 0.0, 0.0), B0=(0.0, 0.0, 0.0)) -> "ExternalField":
        """Static homogeneous fields with exact (zero) derivatives."""
        return cls(_const(E0), _const(B0), _zero, _zero, _zero_jac, _zero_jac)

    @property
    def analytic(self) -> bool:
        return (not self.finite_difference and None not in
                (self.dE_dt, self.dB_dt, self.grad_E, self.grad_B))

    def numerical(self, h_fd: float | None = None) -> "ExternalField":
        """Same fields with derivatives forced to central differences."""
        return ExternalField(self.E, self.B, h_fd=self.h_fd if h_fd is None else h_fd,
                             length_scale=self.length_scale, finite_difference=True)

    def derivatives(self, t, s, c: float = 1.0):
        """Return ``(dE/dt, grad E, dB/dt, grad B)`` at ``(t, s)``."""
        s = np.asarray(s, dtype=float)
        if self.analytic:
            return self.dE_dt(t, s), self.grad_E(t, s), self.dB_dt(t, s), self.grad_B(t, s)
        h = self.h_fd * self.length_scale
        ht = h / c

        def time_d(F):
            return (F(t + ht, s) - F(t - ht, s)) / (2 * ht)

        def jac(F):
            cols = []
            for j in range(3):
                dh = np.zeros(3)
                dh[j] = h
                cols.append((F(t, s + dh) - F(t, s - dh)) / (2 * h))
            return np.stack(cols, axis=-1)

        return time_d(self.E), jac(self.E), time_d(self.B), jac(self.B)


@dataclass
class Trajectory:
    """Time-stamped states; ``A`` holds accelerations for ALD runs."""

    t: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    A: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def state(self, i: int = -1) -> ParticleState:
        return ParticleState(float(self.t[i]), self.Q[i].copy(), self.P[i].copy())

    def velocity(self) -> np.ndarray:
        return velocity_of_momentum(self.P, self.meta.get("m", 1.0), self.meta.get("c", 1.0))

    def to_csv(self, path):
        """Columns ``t,qx,qy,qz,px,py,pz`` (plus ``ax,ay,az``), 17 digits."""
        cols = [self.t[:, None], self.Q, self.P]
        header = "t,qx,qy,qz,px,py,pz"
        if self.A is not None:
            cols.append(self.A)
            header += ",ax,ay,az"
        np.savetxt(path, np.hstack(cols), fmt="%.17g", delimiter=",", header=header,
                   comments="")

    def write_header(self, path, params: dict | None = None):
        """JSON echo of the integrator metadata and scenario parameters."""
        with open(path, "w") as fh:
            json.dump({"meta": self.meta, "params": params or {}}, fh, indent=2,
                      sort_keys=True, default=float)


def reaction_coefficient(q: float, c: float) -> float:
    """Radiation-reaction prefactor ``2 q^2 / (3 c^3)``."""
    return 2.0 * q * q / (3.0 * c**3)


def lorentz_force(f: ExternalField, t, Q, v, q: float, c: float):
    """``q (E + v x B / c)``."""
    return q * (f.E(t, Q) + np.cross(v, f.B(t, Q)) / c)


def _rk4(rhs, y0, t0, dt, nsteps, check):
    """Classic RK4; stops early when ``check`` rejects a state.

    Returns the times, the stacked states and the reason for stopping
    (``None`` when all steps completed).
    """
    ts = [t0]
    ys = [np.array(y0, dtype=float)]
    y, t = ys[0], t0
    reason = None
    for i in range(nsteps):
        try:
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
            k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
            k4 = rhs(t + dt, y + dt * k3)
        except (SuperluminalError, FloatingPointError) as exc:
            reason = f"{type(exc).__name__}: {exc}"
            break
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * dt
        reason = check(y)
        if reason:
            break
        ts.append(t)
        ys.append(y)
    return np.array(ts), np.array(ys), reason


def _nsteps(dt, T):
    if not dt > 0 or not T >= 0:
        raise ConfigError("need dt > 0 and T >= 0")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(T, dt):
        raise ConfigError(f"T = {T} is not a multiple of dt = {dt}")
    return n


def _finite(y):
    return None if np.all(np.isfinite(y)) else "non-finite state"


def _resolve(consts, q):
    return consts, (-consts.e if q is None else float(q))


def _qp_integrate(state0, f, dt, T, consts, q, extra_force, method, error_estimate):
    c, m = consts.c, consts.m
    n = _nsteps(abs(dt), abs(T))
    gamma(state0.velocity(m, c), c)

    def rhs(t, y):
        Q, P = y[:3], y[3:]
        v = velocity_of_momentum(P, m, c)
        F = lorentz_force(f, t, Q, v, q, c)
        if extra_force is not None:
            F = F + extra_force(t, Q, v)
        return np.concatenate([v, F])

    y0 = np.concatenate([state0.Q, state0.P]).astype(float)
    ts, ys, reason = _rk4(rhs, y0, float(state0.t), dt, n, _finite)
    meta = {"method": method, "dt": dt, "T": T, "q": q, "m": m, "c": c,
            "status": "ok" if reason is None else "aborted", "reason": reason}
    if error_estimate and reason is None and n > 0:
        _, yh, rh = _rk4(rhs, y0, float(state0.t), 0.5 * dt, 2 * n, _finite)
        if rh is None:
            meta["error_estimate"] = float(np.max(np.abs(yh[-1] - ys[-1])) / 15.0)
    return Trajectory(ts, ys[:, :3].copy(), ys[:, 3:].copy(), meta=meta)


def integrate_lorentz(state0: ParticleState, f: ExternalField, dt: float, T: float,
                      consts: Constants = BORN_UNITS, q: float | None = None,
                      error_estimate: bool = False) -> Trajectory:
    """RK4 for ``dQ/dt = v(P)``, ``dP/dt = q (E + v x B / c)``.

    Parameters
    ----------
    state0 : ParticleState
        Initial position and mechanical momentum.
    f : ExternalField
    dt, T : float
        Step and total time (``T`` must be a multiple of ``dt``).  A negative
        ``dt`` integrates backward in time.
    consts : Constants
    q : float, optional
        Signed charge; defaults to the electron's ``-e``.
    error_estimate : bool
        Also run at ``dt/2`` and record the step-halving estimate of the
        final-state error in ``meta["error_estimate"]``.
    """
    consts, q = _resolve(consts, q)
    return _qp_integrate(state0, f, dt, T, consts, q, None, "lorentz-rk4", error_estimate)


def _ald_jerk(F, v, a, m, c, k):
    """Third derivative from the ALD equation solved for ``dQddot/dt``."""
    g2 = 1.0 / (1.0 - v @ v / c**2)
    proj_F = F - v * (v @ F) / c**2
    return (m * np.sqrt(g2) * a - proj_F) / (k * g2) - 3 * g2 / c**2 * (v @ a) * a


def integrate_ald(state0: ParticleState, a0, f: ExternalField, dt: float, T: float,
                  consts: Constants = BORN_UNITS, q: float | None = None) -> Trajectory:
    """RK4 for the third-order ALD system in ``(Q, Qdot, Qddot)``.

    The radiation term ``k [I + g^2 v v / c^2] (3 g^4 (v.a) a / c^2 + g^2 da/dt)``
    with ``k = 2 q^2 / 3 c^3`` is balanced against ``dP/dt`` expressed through
    the acceleration, and the result is solved for ``da/dt``.

    Runaway solutions reach non-finite or superluminal states; the trajectory
    is then truncated and ``meta["status"]`` is ``"runaway"``.  The flag is
    also set when the proper acceleration grows by more than ``exp(T / (2 tau))``.
    """
    consts, q = _resolve(consts, q)
    c, m = consts.c, consts.m
    k = reaction_coefficient(q, c)
    tau = k / m
    n = _nsteps(abs(dt), abs(T))
    v0 = state0.velocity(m, c)
    gamma(v0, c)

    def rhs(t, y):
        Q, v, a = y[:3], y[3:6], y[6:]
        F = lorentz_force(f, t, Q, v, q, c)
        return np.concatenate([v, a, _ald_jerk(F, v, a, m, c, k)])

    def check(y):
        if not np.all(np.isfinite(y)):
            return "non-finite state"
        if y[3:6] @ y[3:6] >= c * c:
            return "superluminal state"
        return None

    y0 = np.concatenate([state0.Q, v0, np.asarray(a0, float)])
    with np.errstate(over="ignore", invalid="ignore"):
        ts, ys, reason = _rk4(rhs, y0, float(state0.t), dt, n, check)
    # proper acceleration, since the coordinate acceleration saturates as |v| -> c
    v, acc = ys[:, 3:6], ys[:, 6:]
    g = gamma(v, c)
    va = np.einsum("ij,ij->i", v, acc)
    a_norm = g**2 * np.sqrt(np.einsum("ij,ij->i", acc, acc) + (g * va / c) ** 2)
    grew = (a_norm[0] > 0 and len(ts) > 1
            and np.log(a_norm[-1] / a_norm[0]) > 0.5 * abs(ts[-1] - ts[0]) / tau
            and abs(ts[-1] - ts[0]) >= 3 * tau)
    status = "runaway" if (reason is not None or grew) else "ok"
    P = m * gamma(ys[:, 3:6], c)[:, None] * ys[:, 3:6]
    meta = {"method": "ald-rk4", "dt": dt, "T": T, "q": q, "m": m, "c": c, "tau": tau,
            "status": status, "reason": reason}
    return Trajectory(ts, ys[:, :3].copy(), P, A=ys[:, 6:].copy(), meta=meta)


def shoot_ald_backward(state_T: ParticleState, a_T, f: ExternalField, dt: float,
                       T: float, consts: Constants = BORN_UNITS,
                       q: float | None = None) -> Trajectory:
    """Integrate the ALD system backward in time from ``state_T``.

    Backward in time the runaway mode decays, so the returned trajectory
    approaches the non-runaway solution; its last sample supplies an initial
    acceleration on (or very near) the stable manifold.
    """
    tr = integrate_ald(state_T, a_T, f, -abs(dt), abs(T), consts, q)
    tr.meta["method"] = "ald-rk4-backward"
    return tr


def ll_reduce(f: ExternalField, state: ParticleState, consts: Constants = BORN_UNITS,
              q: float | None = None) -> np.ndarray:
    """Landau-Lifshitz radiation-reaction force at ``state``.

    The acceleration is replaced by its Lorentz-force value
    ``a = (I - v v / c^2) F / (m gamma)``; its total time derivative along the
    motion, ``da/dt = d_t a + (v . grad) a + (a . grad_v) a``, replaces the
    third derivative in the ALD radiation term.
    """
    consts, q = _resolve(consts, q)
    c, m = consts.c, consts.m
    t, Q = state.t, np.asarray(state.Q, float)
    v = state.velocity(m, c)
    g = float(gamma(v, c))
    E, B = f.E(t, Q), f.B(t, Q)
    dEt, JE, dBt, JB = f.derivatives(t, Q, c)
    F = q * (E + np.cross(v, B) / c)

    def proj(X):
        return X - v * (v @ X) / c**2

    a = proj(F) / (m * g)
    # derivative of F along the motion, holding v fixed, plus the v-variation of F
    dF = q * (dEt + np.cross(v, dBt) / c + JE @ v + np.cross(v, JB @ v) / c
              + np.cross(a, B) / c)
    adot = (proj(dF) / (m * g)
            - g * g * (v @ a) / c**2 * a
            - (a * (v @ F) + v * (a @ F)) / (m * g * c**2))
    k = reaction_coefficient(q, c)
    inner = 3 * g**4 / c**2 * (v @ a) * a + g * g * adot
    return k * (inner + g * g * v * (v @ inner) / c**2)


def integrate_ll(state0: ParticleState, f: ExternalField, dt: float, T: float,
                 consts: Constants = BORN_UNITS, q: float | None = None,
                 error_estimate: bool = False) -> Trajectory:
    """RK4 for the Lorentz force plus the Landau-Lifshitz reaction force."""
    consts, q = _resolve(consts, q)

    def extra(t, Q, v):
        P = consts.m * gamma(v, consts.c) * v
        return ll_reduce(f, ParticleState(t, Q, P), consts, q)

    return _qp_integrate(state0, f, dt, T, consts, q, extra, "landau-lifshitz-rk4",
                         error_estimate)
