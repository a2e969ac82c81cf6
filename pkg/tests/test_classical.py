import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointdefects.core import BORN_UNITS, ConfigError, ParticleState, gamma
from pointdefects.classical import (ExternalField, integrate_ald, integrate_lorentz,
                                    integrate_ll, ll_reduce, reaction_coefficient,
                                    shoot_ald_backward)


def at_rest():
    return ParticleState(0.0, np.zeros(3), np.zeros(3))


def moving(v, Q=(0, 0, 0), t=0.0):
    return ParticleState.from_velocity(t, Q, v, 1.0, 1.0)


def wavy_field():
    """Smooth time-dependent field with analytic derivatives."""
    k, w = 0.7, 0.9

    def E(t, s):
        return np.array([0.3 * np.cos(k * s[1] - w * t), 0.1 * s[0], 0.2])

    def B(t, s):
        return np.array([0.05 * s[2], 0.0, 0.4 + 0.2 * np.sin(k * s[0] - w * t)])

    def dE_dt(t, s):
        return np.array([0.3 * w * np.sin(k * s[1] - w * t), 0.0, 0.0])

    def dB_dt(t, s):
        return np.array([0.0, 0.0, -0.2 * w * np.cos(k * s[0] - w * t)])

    def grad_E(t, s):
        J = np.zeros((3, 3))
        J[0, 1] = -0.3 * k * np.sin(k * s[1] - w * t)
        J[1, 0] = 0.1
        return J

    def grad_B(t, s):
        J = np.zeros((3, 3))
        J[0, 2] = 0.05
        J[2, 0] = 0.2 * k * np.cos(k * s[0] - w * t)
        return J

    return ExternalField(E, B, dE_dt, dB_dt, grad_E, grad_B)


def test_free_motion_is_straight():
    tr = integrate_lorentz(moving([0.3, -0.4, 0.1]), ExternalField(), 0.1, 10.0)
    np.testing.assert_allclose(tr.P, np.broadcast_to(tr.P[0], tr.P.shape), atol=0)
    np.testing.assert_allclose(tr.Q[-1], 10.0 * np.array([0.3, -0.4, 0.1]), rtol=1e-13)


def test_gyration_radius_and_momentum():
    B0, v = 0.5, 0.8
    s0 = moving([v, 0, 0])
    P = np.linalg.norm(s0.P)
    omega = 1.0 * B0 / (float(gamma([v, 0, 0])) * 1.0 * 1.0)
    period = 2 * np.pi / omega
    T = 10 * 0.01 * round(period / 0.01)
    tr = integrate_lorentz(s0, ExternalField.uniform(B0=(0, 0, B0)), 0.01, T)
    R = P * 1.0 / (1.0 * B0)
    center = np.array([0.0, R, 0.0])  # q = -e curls towards +y for v along +x
    np.testing.assert_allclose(np.linalg.norm(tr.Q - center, axis=1), R, rtol=1e-8)
    drift = np.abs(np.linalg.norm(tr.P, axis=1) - P).max() / P
    assert drift < 1e-10 * 10
    assert np.all(tr.Q[:, 2] == 0)


def test_hyperbolic_motion_against_series():
    E0, T = 0.4, 5.0
    tr = integrate_lorentz(at_rest(), ExternalField.uniform(E0=(E0, 0, 0)), 0.005, T,
                           error_estimate=True)
    assert tr.meta["error_estimate"] < 1e-10
    # q = -e: force along -x, x(t) = -int_0^t c u / sqrt(1 + u^2) with u = e E0 t / mc
    mpmath.mp.dps = 30
    for i in (200, 600, 1000):
        t = tr.t[i]
        ref = -mpmath.quad(lambda s: (E0 * s) / mpmath.sqrt(1 + (E0 * s) ** 2), [0, t])
        assert tr.Q[i, 0] == pytest.approx(float(ref), abs=1e-8)
        assert tr.P[i, 0] == pytest.approx(-E0 * t, abs=1e-12)


def test_energy_conserved_in_static_potential():
    s0 = np.array([0.0, 0.0, 0.0])
    kq = -2.0  # repulsive for q = -e

    def E(t, s):
        d = s - s0
        return kq * d / np.linalg.norm(d) ** 3

    f = ExternalField(E=E)
    state = moving([0.2, 0.5, 0.0], Q=(3.0, 0.0, 0.0))
    tr = integrate_lorentz(state, f, 0.01, 20.0)
    q = -1.0
    phi = kq / np.linalg.norm(tr.Q - s0, axis=1)
    energy = np.sqrt(1 + np.sum(tr.P**2, axis=1)) + q * phi
    assert np.ptp(energy) < 1e-9


def test_step_count_validation():
    with pytest.raises(ConfigError):
        integrate_lorentz(at_rest(), ExternalField(), 0.3, 1.0)


def test_ald_runaway_rate():
    tau = 2.0 / 3.0
    a0 = np.array([1e-8, 0.0, 0.0])
    tr = integrate_ald(at_rest(), a0, ExternalField(), 0.001, 3 * tau)
    assert tr.meta["tau"] == pytest.approx(tau)
    rate = np.polyfit(tr.t, np.log(np.linalg.norm(tr.A, axis=1)), 1)[0]
    assert rate * tau == pytest.approx(1.0, rel=0.01)
    np.testing.assert_allclose(np.linalg.norm(tr.A, axis=1),
                               1e-8 * np.exp(tr.t / tau), rtol=1e-3)
    assert tr.meta["status"] == "runaway"


def test_ald_inertial_is_exact():
    s0 = moving([0.3, 0.1, 0.0])
    tr = integrate_ald(s0, np.zeros(3), ExternalField(), 0.01, 100.0)
    assert len(tr.t) == 10001
    assert np.all(tr.A == 0)
    assert np.all(tr.P == tr.P[0])
    assert tr.meta["status"] == "ok"


def test_ald_relativistic_runaway_is_flagged():
    tr = integrate_ald(at_rest(), [1e-6, 0, 0], ExternalField(), 0.005, 20.0)
    assert tr.meta["status"] == "runaway"
    assert np.all(np.linalg.norm(tr.velocity(), axis=1) < 1)


def test_ald_hyperbolic_motion_is_exact_solution():
    E0 = 0.2
    f = ExternalField.uniform(E0=(E0, 0, 0))
    tr = integrate_ald(at_rest(), [-E0, 0, 0], f, 0.01, 3.0)
    ref = integrate_lorentz(at_rest(), f, 0.01, 3.0)
    np.testing.assert_allclose(tr.Q, ref.Q, atol=1e-10)


def test_stable_manifold_by_backward_shooting():
    f = ExternalField(E=lambda t, s: np.array([0.05 * np.exp(-t * t), 0.0, 0.0]))
    end = ParticleState(6.0, np.zeros(3), np.zeros(3))
    back = shoot_ald_backward(end, np.zeros(3), f, 0.005, 12.0)
    assert back.t[-1] == pytest.approx(-6.0)
    start = ParticleState(-6.0, back.Q[-1], back.P[-1])
    a0 = back.A[-1]
    good = integrate_ald(start, a0, f, 0.005, 12.0)
    assert good.meta["status"] == "ok"
    assert np.abs(good.A).max() < 0.1
    assert np.linalg.norm(good.A[-1]) < 1e-4
    bad = integrate_ald(start, a0 + [1e-6, 0, 0], f, 0.005, 12.0)
    assert bad.meta["status"] == "runaway"


def test_ll_zero_field():
    assert np.all(ll_reduce(ExternalField(), moving([0.3, 0.2, 0.1])) == 0)
    tr = integrate_ll(moving([0.3, 0, 0]), ExternalField(), 0.1, 5.0)
    assert np.all(tr.P == tr.P[0])


@pytest.mark.parametrize("numerical", [False, True])
def test_ll_synchrotron_force(numerical):
    B0, v = 0.5, 1e-3
    f = ExternalField.uniform(B0=(0, 0, B0))
    if numerical:
        f = f.numerical()
    F = ll_reduce(f, moving([v, 0, 0]))
    expected = -(2 * B0**2 / 3) * v
    assert F[0] == pytest.approx(expected, rel=1e-5)
    assert abs(F[1]) < 1e-9 * abs(expected) and F[2] == 0


def _laue_force(f, state, q=-1.0, c=1.0, m=1.0, delta=2e-3):
    """Radiation-reaction force from the four-vector recipe.

    The Minkowski force K = gamma (F.v/c, F) of the external field is
    differentiated in proper time along a finely resolved Lorentz trajectory,
    projected orthogonally to the four-velocity and divided by gamma.
    """
    h = delta / 40
    fwd = integrate_lorentz(state, f, h, 2 * delta, BORN_UNITS, q)
    bwd = integrate_lorentz(state, f, -h, 2 * delta, BORN_UNITS, q)
    samples = {}
    for k, tr in ((1, fwd), (-1, bwd)):
        for j in (1, 2):
            samples[k * j] = tr.state(40 * j)
    samples[0] = state

    def K(s):
        v = s.velocity(m, c)
        F = q * (f.E(s.t, s.Q) + np.cross(v, f.B(s.t, s.Q)) / c)
        g = float(gamma(v, c))
        return g * np.concatenate([[F @ v / c], F])

    dK_dt = (-K(samples[2]) + 8 * K(samples[1]) - 8 * K(samples[-1])
             + K(samples[-2])) / (12 * delta)
    v = state.velocity(m, c)
    g = float(gamma(v, c))
    U = g * np.concatenate([[c], v])
    X = g * dK_dt / m
    eta = np.diag([-1.0, 1, 1, 1])
    proj = X + U * (U @ eta @ X) / c**2
    return reaction_coefficient(q, c) * proj[1:] / g


@pytest.mark.parametrize("v", [[0.0, 0.0, 0.0], [0.3, -0.2, 0.1], [0.1, 0.7, -0.4]])
def test_ll_matches_laue_recipe(v):
    f = wavy_field()
    state = moving(v, Q=(0.4, -0.3, 0.2), t=0.3)
    F = ll_reduce(f, state)
    ref = _laue_force(f, state)
    assert np.linalg.norm(F - ref) <= 1e-6 * np.linalg.norm(ref)
    Fn = ll_reduce(f.numerical(), state)
    assert np.linalg.norm(Fn - ref) <= 1e-6 * np.linalg.norm(ref)


def test_ll_synchrotron_decay_rate():
    B0, v0, T = 0.1, 0.01, 75.0
    tr = integrate_ll(moving([v0, 0, 0]), ExternalField.uniform(B0=(0, 0, B0)), 0.05, T)
    kinetic = np.sqrt(1 + np.sum(tr.P**2, axis=1)) - 1
    assert np.all(np.diff(kinetic) < 0)
    rate = -np.polyfit(tr.t, np.log(kinetic), 1)[0]
    damping = 2 * B0**2 / 3  # 2 e^4 B^2 / (3 m^3 c^5) in born units
    assert rate == pytest.approx(2 * damping, rel=0.02)


def test_ll_small_coupling_scaling():
    f = ExternalField.uniform(E0=(0.0, 0.1, 0.0), B0=(0, 0, 0.8))
    s0 = moving([0.5, 0.0, 0.2])
    e2 = np.array([0.01, 0.02, 0.04, 0.08])
    dev = []
    for val in e2:
        consts = BORN_UNITS.with_(e=np.sqrt(val))
        a = integrate_ll(s0, f, 0.02, 20.0, consts)
        b = integrate_lorentz(s0, f, 0.02, 20.0, consts)
        dev.append(np.abs(a.Q - b.Q).max())
    slope = np.polyfit(np.log(e2), np.log(dev), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


@given(st.floats(0.05, 2.0), st.floats(0.05, 0.9))
def test_ll_energy_nonincreasing_in_static_B(B0, v0):
    tr = integrate_ll(moving([v0, 0, 0.1 * v0]), ExternalField.uniform(B0=(0, B0, B0)),
                      0.05, 5.0)
    energy = np.sqrt(1 + np.sum(tr.P**2, axis=1))
    assert np.all(np.diff(energy) <= 1e-15)


def test_missing_derivatives_fall_back_to_differences():
    f = ExternalField(E=lambda t, s: np.array([0.0, 0.0, 0.1 * s[0]]))
    assert not f.analytic
    out = f.derivatives(0.0, np.zeros(3))
    np.testing.assert_allclose(out[1][2, 0], 0.1, rtol=1e-9)


def test_field_derivative_self_test():
    f = wavy_field()
    s = np.array([0.3, 0.2, -0.1])
    for exact, approx in zip(f.derivatives(0.4, s), f.numerical().derivatives(0.4, s)):
        np.testing.assert_allclose(approx, exact, atol=1e-9)


def test_trajectory_csv_and_header(tmp_path):
    tr = integrate_ald(at_rest(), [1e-3, 0, 0], ExternalField(), 0.1, 1.0)
    tr.to_csv(tmp_path / "t.csv")
    tr.write_header(tmp_path / "t.json", {"dt": 0.1})
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,qx,qy,qz,px,py,pz,ax,ay,az"
    assert len(lines) == 12
    meta = json.loads((tmp_path / "t.json").read_text())
    assert meta["params"]["dt"] == 0.1 and meta["meta"]["method"] == "ald-rk4"
