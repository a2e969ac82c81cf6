import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointdefects.core import (ATOMIC_UNITS, BORN_UNITS, ConfigError, Constants,
                               ParticleState, SuperluminalError, gamma,
                               momentum_of_velocity, preset, velocity_of_momentum)

speeds = st.floats(0.0, 0.999999)
unit = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda u: np.linalg.norm(u) > 1e-3)
lights = st.floats(0.1, 300.0)


def _vec(speed, u, c):
    u = np.asarray(u) / np.linalg.norm(u)
    return speed * c * u


def test_presets():
    assert (BORN_UNITS.c, BORN_UNITS.e, BORN_UNITS.m) == (1.0, 1.0, 1.0)
    assert ATOMIC_UNITS.hbar == ATOMIC_UNITS.m == ATOMIC_UNITS.e == 1.0
    assert ATOMIC_UNITS.b == np.inf
    assert preset("born-units", b=0.5).b == 0.5
    with pytest.raises(ConfigError):
        preset("planck")


@pytest.mark.parametrize("field", ["c", "e", "m", "b", "hbar"])
def test_constants_must_be_positive(field):
    with pytest.raises(ConfigError):
        Constants(**{field: 0.0})
    with pytest.raises(ConfigError):
        Constants(**{field: np.nan})


def test_gamma_examples():
    assert gamma(np.zeros(3)) == 1.0
    assert gamma([0.6, 0, 0]) == pytest.approx(1.25, rel=1e-15)
    with pytest.raises(SuperluminalError):
        gamma([1.0, 0, 0])
    with pytest.raises(SuperluminalError):
        gamma([0.8, 0.7, 0])


def test_momentum_examples():
    assert np.all(momentum_of_velocity(np.zeros(3), 1.0) == 0)
    assert np.linalg.norm(momentum_of_velocity([0.6, 0, 0], 1.0)) == pytest.approx(0.75)
    c = 3.0
    P = momentum_of_velocity([c / np.sqrt(2), 0, 0], 1.0, c)
    assert np.linalg.norm(P) == pytest.approx(c, rel=1e-14)
    v = velocity_of_momentum([0, 0, c], 1.0, c)
    assert np.linalg.norm(v) == pytest.approx(c / np.sqrt(2), rel=1e-14)
    with pytest.raises(SuperluminalError):
        momentum_of_velocity([0, c, 0], 1.0, c)


def test_particle_state_roundtrip():
    s = ParticleState.from_velocity(0.5, [1, 2, 3], [0.3, -0.2, 0.1], 2.0, 1.0)
    np.testing.assert_allclose(s.velocity(2.0, 1.0), [0.3, -0.2, 0.1], rtol=1e-14)


@given(speeds, unit, lights, st.floats(0.01, 100.0))
def test_roundtrip_identity(speed, u, c, m):
    v = _vec(speed, u, c)
    back = velocity_of_momentum(momentum_of_velocity(v, m, c), m, c)
    np.testing.assert_allclose(back, v, rtol=1e-12, atol=1e-12 * c)


@given(st.tuples(*[st.floats(-1, 1)] * 3), st.floats(0, 7), lights, st.floats(0.01, 100.0))
def test_velocity_always_subluminal(u, decades, c, m):
    # beyond |P| ~ 5e7 mc the speed rounds to c in double precision
    P = np.asarray(u) * m * c * 10.0**decades
    assert np.linalg.norm(velocity_of_momentum(P, m, c)) < c


@given(speeds, unit)
def test_gamma_at_least_one(speed, u):
    g = gamma(_vec(speed, u, 1.0))
    assert g >= 1.0
    assert (g == 1.0) == (speed == 0.0) or speed < 1e-8


@given(st.floats(0.0, 0.99), st.floats(0.0, 0.99), unit)
def test_momentum_monotone_in_speed(s1, s2, u):
    lo, hi = sorted((s1, s2))
    p_lo = np.linalg.norm(momentum_of_velocity(_vec(lo, u, 1.0), 1.0))
    p_hi = np.linalg.norm(momentum_of_velocity(_vec(hi, u, 1.0), 1.0))
    assert p_lo <= p_hi
