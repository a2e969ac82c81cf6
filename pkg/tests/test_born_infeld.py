import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from pointdefects.born_infeld import (BETA_QUARTER, FIELD_ENERGY_COEFF, Box, BoxGrid,
                                      HalfSpace, Sphere, aether_map, b_born,
                                      bi_conserved_integrals, bi_energy_density,
                                      born_displacement, born_field_energy, born_potential,
                                      point_charge_sampler, stress_tensor, superpose,
                                      surface_force, write_field_csv)
from pointdefects.core import AccuracyError, ConfigError, SingularityError

vec = st.tuples(*[st.floats(-10, 10)] * 3).map(np.array)
small_vec = st.tuples(*[st.floats(-1e-3, 1e-3)] * 3).map(np.array)


def test_beta_quarter_twenty_digits():
    mpmath.mp.dps = 30
    ref = mpmath.beta(mpmath.mpf(1) / 4, mpmath.mpf(1) / 4)
    assert mpmath.nstr(ref, 20) == "7.4162987092054876737"
    assert abs(BETA_QUARTER - float(ref)) <= 2e-16 * float(ref)


def test_energy_and_b_born_constants():
    assert FIELD_ENERGY_COEFF == pytest.approx(1.2361, abs=1e-4)
    assert b_born() == pytest.approx(0.65453, abs=1e-5)
    assert b_born(m=3.0) == pytest.approx(9 * b_born(), rel=1e-14)


def test_aether_examples():
    E, H = aether_map(np.zeros(3), np.zeros(3), 1.0)
    assert np.all(E == 0) and np.all(H == 0)
    E, _ = aether_map(np.zeros(3), [np.sqrt(3), 0, 0], 1.0)
    np.testing.assert_allclose(E, [np.sqrt(3) / 2, 0, 0], rtol=1e-15)
    E, H = aether_map([0, 0, 1.0], [1.0, 0, 0], 1.0)
    np.testing.assert_allclose(E, [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(H, [0, 0, 1], atol=1e-15)
    with pytest.raises(ConfigError):
        aether_map(np.zeros(3), np.zeros(3), 0.0)
    E, H = aether_map([1.0, 2, 3], [4.0, 5, 6], np.inf)
    np.testing.assert_array_equal(E, [4, 5, 6])


@given(vec, vec, st.floats(0.1, 10))
def test_aether_bounded(B, D, b):
    E, H = aether_map(B, D, b)
    assert np.linalg.norm(E) <= np.linalg.norm(D) + np.linalg.norm(B) + 1e-12
    assert np.linalg.norm(H) <= np.linalg.norm(D) + np.linalg.norm(B) + 1e-12


@given(small_vec, small_vec)
def test_weak_field_limit(B, D):
    if np.linalg.norm(D) < 1e-8:
        return
    E, H = aether_map(B, D, 1.0)
    assert np.linalg.norm(E - D) <= 1e-5 * np.linalg.norm(D)


@given(vec, vec, st.floats(0.1, 10))
def test_stress_tensor_symmetric(B, D, b):
    T = stress_tensor(B, D, b)
    assert np.linalg.norm(T - T.T) <= 1e-12 * max(1.0, np.linalg.norm(T))


def test_stress_tensor_born_field_on_axis():
    r, b, e = sp.symbols("r b e", positive=True)
    Dm = e / r**2
    root = sp.sqrt(1 + Dm**2 / b**2)
    pressure = b**2 * (1 - 1 / root)
    xx = (Dm**2 / root - pressure) / (4 * sp.pi)
    yy = -pressure / (4 * sp.pi)
    assert np.all(stress_tensor(np.zeros(3), np.zeros(3), 1.0) == 0)
    for rv in (0.3, 1.0, 4.0):
        T = stress_tensor(np.zeros(3), born_displacement([rv, 0, 0], 1.0), 0.7)
        sub = {r: rv, b: 0.7, e: 1.0}
        np.testing.assert_allclose(np.diag(T), [float(xx.subs(sub)), float(yy.subs(sub)),
                                                float(yy.subs(sub))], rtol=1e-13)
        assert np.abs(T - np.diag(np.diag(T))).max() <= 1e-15 * np.abs(T).max()


def test_born_displacement():
    assert np.linalg.norm(born_displacement([0, 1.0, 0], 1.0)) == pytest.approx(1.0)
    assert np.linalg.norm(born_displacement([0, 0, 2.0], 1.0)) == pytest.approx(0.25)
    np.testing.assert_allclose(born_displacement([1.0, 0, 0], 2.0), [-2, 0, 0])
    with pytest.raises(SingularityError):
        born_displacement([0.0, 0, 0], 1.0)


def test_born_displacement_divergence_second_order():
    def div(h):
        pts = np.array([[0.7, 0.4, -0.3], [1.1, -0.9, 0.2], [-0.6, 0.6, 0.8]])
        tot = 0.0
        for j in range(3):
            off = np.zeros(3)
            off[j] = h
            tot = tot + (born_displacement(pts + off)[:, j]
                         - born_displacement(pts - off)[:, j]) / (2 * h)
        return np.max(np.abs(tot))

    assert np.log2(div(0.02) / div(0.01)) == pytest.approx(2.0, abs=0.05)


def test_born_potential_origin_and_quadrature():
    for b in (0.3, 1.0, 5.0):
        assert born_potential(0.0, 1.0, b) == pytest.approx(-BETA_QUARTER / 4 * np.sqrt(b),
                                                            rel=1e-14)
    assert born_potential(0.0, 1.0, b_born()) == pytest.approx(-1.5, rel=1e-14)
    mpmath.mp.dps = 20
    for rv in (0.0, 0.2, 1.0, 3.0, 25.0):
        ref = -mpmath.quad(lambda x: 1 / mpmath.sqrt(1 + x**4), [rv, 1, mpmath.inf])
        assert born_potential(rv, 1.0, 1.0) == pytest.approx(float(ref), rel=1e-12)
    assert born_potential(10.0, 1.0, np.inf) == -0.1


def test_born_potential_far_field_and_monotone():
    e, b = 1.0, 2.0
    r = 10 * np.sqrt(e / b)
    assert born_potential(r, e, b) / (-e / r) == pytest.approx(1.0, abs=0.01)
    rs = np.linspace(0, 20, 400)
    phi = born_potential(rs, e, b)
    assert np.all(np.diff(phi) > 0) and np.all(phi < 0)
    with pytest.raises(ConfigError):
        born_potential(-1.0)


def test_field_energy_of_born_solution():
    for b in (0.5, 1.0, 3.0):
        ci = bi_conserved_integrals(b=b, e=1.0)
        closed = BETA_QUARTER / 6 * np.sqrt(b)
        assert ci.energy == pytest.approx(closed, rel=1e-6)
        assert np.all(ci.momentum == 0) and np.all(ci.angular_momentum == 0)
    assert bi_conserved_integrals(b=1.0, e=1.0).energy == pytest.approx(1.2361, abs=1e-4)
    assert bi_conserved_integrals(b=b_born(), e=1.0).energy == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(ConfigError):
        bi_conserved_integrals(b=np.inf, e=1.0)


def test_grid_energy_matches_radial():
    ci = bi_conserved_integrals(point_charge_sampler(), 1.0, grid=BoxGrid(-8, 8, 64),
                                exclude=[((0, 0, 0), 1.0)])
    assert ci.energy == pytest.approx(FIELD_ENERGY_COEFF, rel=1e-4)
    assert not ci.diverging
    np.testing.assert_allclose(ci.momentum, 0, atol=1e-14)


def test_grid_integrals_zero_field():
    zero = lambda s: (np.zeros_like(s), np.zeros_like(s))
    E, P, L = bi_conserved_integrals(zero, 1.0, grid=BoxGrid(-2, 2, 8))
    assert E == 0 and np.all(P == 0) and np.all(L == 0)
    with pytest.raises(ConfigError):
        bi_conserved_integrals(zero, 1.0, grid=BoxGrid(-2, 2, 7))


def test_grid_momentum_of_crossed_fields():
    B0, D0 = np.array([0, 0, 1e-3]), np.array([1e-3, 0, 0])
    uni = lambda s: (np.broadcast_to(B0, s.shape), np.broadcast_to(D0, s.shape))
    ci = bi_conserved_integrals(uni, 1.0, grid=BoxGrid(-1, 1, 8))
    density = np.cross(D0, B0) / (4 * np.pi)
    # a uniform field has no 1/L tail, so the extrapolated tail doubles the box value
    np.testing.assert_allclose(ci.momentum, density * 8, rtol=1e-12)


def test_surface_force_single_charge_zero():
    f = point_charge_sampler()
    assert np.linalg.norm(surface_force(f, 1.0, Sphere(radius=2.0))) < 1e-8
    # charge-free regions, including one deep inside the Born radius
    assert np.linalg.norm(surface_force(f, 1.0, Sphere((3.0, 0, 0), 1.0))) < 1e-8
    assert np.linalg.norm(surface_force(f, 1.0, Sphere((0.5, 0.2, 0), 0.4))) < 1e-8


def test_surface_force_empty_box_zero():
    f = superpose(point_charge_sampler([-1, 0, 0]), point_charge_sampler([1, 0, 0], 1.0))
    F = surface_force(f, np.inf, Box((2, -1, -1), (4, 1, 1)))
    assert np.linalg.norm(F) < 1e-8


@pytest.mark.parametrize("b", [np.inf, 1e6])
def test_surface_independence(b):
    d = 10.0
    f = superpose(point_charge_sampler([-d / 2, 0, 0]), point_charge_sampler([d / 2, 0, 0]))
    Fs = surface_force(f, b, Sphere((-d / 2, 0, 0), 3.0))
    Fb = surface_force(f, b, Box((-8, -2, -3), (-1, 4, 2)))
    np.testing.assert_allclose(Fs, Fb, atol=1e-10)
    np.testing.assert_allclose(Fs, [-1 / d**2, 0, 0], rtol=1e-8, atol=1e-12)


def test_halfspace_force_tends_to_coulomb():
    errs = []
    for d in (5.0, 10.0, 20.0, 40.0):
        f = superpose(point_charge_sampler([-d / 2, 0, 0]), point_charge_sampler([d / 2, 0, 0]))
        F = surface_force(f, 1.0, HalfSpace(normal=(1, 0, 0), radius=50 * d))
        assert F[0] < 0
        errs.append(abs(-F[0] * d * d - 1.0))
    assert errs[-1] < 1e-5
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_surface_errors():
    with pytest.raises(ConfigError):
        Sphere(radius=0.0)
    with pytest.raises(ConfigError):
        HalfSpace(radius=1.0, core=2.0)
    with pytest.raises(AccuracyError):
        surface_force(point_charge_sampler([0.0, 0, 1.0001]), 1.0,
                      Sphere(radius=1.0, order=4), rtol=1e-14, max_order=8)


def test_field_csv(tmp_path):
    path = tmp_path / "f.csv"
    write_field_csv(path, point_charge_sampler(), [[1.0, 0, 0], [0, 2.0, 0]])
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,z,Bx,By,Bz,Dx,Dy,Dz"
    assert float(lines[1].split(",")[6]) == -1.0


def test_energy_density_maxwell_limit():
    D = np.array([0.3, 0.4, 0.0])
    assert bi_energy_density(np.zeros(3), D, np.inf) == pytest.approx(0.25 / (8 * np.pi))
    assert bi_energy_density(np.zeros(3), D, 1e4) == pytest.approx(0.25 / (8 * np.pi),
                                                                  rel=1e-8)


def test_born_field_energy_partial():
    assert born_field_energy(1.0, 1.0, r_max=1e8) == pytest.approx(FIELD_ENERGY_COEFF,
                                                                   rel=1e-7)
