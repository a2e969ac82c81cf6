import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from pointdefects.core import ATOMIC_UNITS, BORN_UNITS, ConfigError, NodeError, velocity_of_momentum
from pointdefects.quantum import (Grid1D, StaticPotentials, VelocityHistory, _radial_levels,
                                  bohm_trajectory, bohm_velocity_dirac, bohm_velocity_kg,
                                  dirac_packet, dirac_plane_wave, equivariance_chi2,
                                  evolve_dirac, evolve_kg, hydrogen_spectrum, hydrogen_sweep,
                                  kg_density, kg_packet, kg_plane_wave, sample_density,
                                  write_sweep_csv)

FREE = StaticPotentials()


def E_of(p):
    return np.sqrt(1 + p * p)


def resolved_momenta(grid, count=4):
    return [2 * np.pi * j / grid.length for j in range(1, count + 1)]


@pytest.fixture(scope="module")
def grid():
    return Grid1D(-20.0, 40.0, 256)


def test_kg_plane_wave_velocity(grid):
    for p in resolved_momenta(grid) + [-0.7853981633974483]:
        psi, dpsi = kg_plane_wave(grid, p)
        v = bohm_velocity_kg(psi, dpsi, grid, FREE)
        np.testing.assert_allclose(v, p / E_of(p), rtol=1e-10, atol=0)
    # p = m c must be a grid momentum
    g = Grid1D(0.0, 2 * np.pi * 5, 64)
    psi, dpsi = kg_plane_wave(g, 1.0)
    v = bohm_velocity_kg(psi, dpsi, g, FREE)
    np.testing.assert_allclose(v, 1 / np.sqrt(2), rtol=1e-10)
    np.testing.assert_allclose(v, velocity_of_momentum(np.array([1.0, 0, 0]), 1.0)[0],
                               rtol=1e-12)


def test_dirac_plane_wave_velocity(grid):
    for p in (-1.3, 0.0, 0.4, 1.0, 25.0):
        v = bohm_velocity_dirac(dirac_plane_wave(grid, p))
        np.testing.assert_allclose(v, p / E_of(p), rtol=1e-10, atol=1e-15)


def test_rest_modes_have_zero_velocity(grid):
    psi, dpsi = kg_plane_wave(grid, 0.0)
    v = bohm_velocity_kg(psi, dpsi, grid, FREE)
    assert np.all(np.abs(v) < 1e-15)
    assert np.all(kg_density(psi, dpsi, np.zeros(grid.n)) > 0)
    spinor = np.zeros((2, grid.n), complex)
    spinor[0] = 1
    assert np.all(bohm_velocity_dirac(spinor) == 0)


def test_random_spinors_subluminal():
    rng = np.random.default_rng(11)
    n = 1_000_000
    for comps in (2, 4):
        psi = rng.normal(size=(comps, n)) + 1j * rng.normal(size=(comps, n))
        v = bohm_velocity_dirac(psi)
        speed = np.abs(v) if comps == 2 else np.linalg.norm(v, axis=-1)
        assert np.count_nonzero(speed > 1 + 1e-12) == 0
    # extreme spinor saturates the bound without exceeding it
    assert bohm_velocity_dirac(np.array([[1.0], [1.0]]))[0] == pytest.approx(1.0)


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4))
def test_spinor_velocity_property(components):
    psi = np.array(components, complex)[:, None]
    if np.sum(np.abs(psi) ** 2) < 1e-200:
        return
    v = bohm_velocity_dirac(psi, floor=0.0)
    assert np.linalg.norm(v) <= 1 + 1e-12


def test_node_errors(grid):
    psi = np.zeros(grid.n, complex)
    with pytest.raises(NodeError):
        bohm_velocity_kg(psi, psi, grid, FREE)
    v = bohm_velocity_kg(psi, psi, grid, FREE, strict=False)
    assert np.all(np.isnan(v))
    with pytest.raises(NodeError):
        bohm_velocity_dirac(np.zeros((2, 3)))
    with pytest.raises(ConfigError):
        bohm_velocity_dirac(np.ones((3, 2)))


def _phase_rate(psi_t, times, j=0):
    phase = np.unwrap(np.angle(psi_t[:, j]))
    return -np.polyfit(times, phase, 1)[0]


def test_kg_rest_mode_frequency():
    grid = Grid1D(0.0, 10.0, 16)
    psi, dpsi = kg_plane_wave(grid, 0.0)
    h = evolve_kg(psi, dpsi, grid, FREE, 0.002, 10.0, store_every=50)
    assert abs(_phase_rate(h.psi, h.times) - 1.0) < 1e-6
    # leapfrog mixes in a tiny backward mode of relative size O((omega dt)^2)
    np.testing.assert_allclose(np.abs(h.psi), 1.0, atol=1e-6)


def test_kg_dispersion(grid):
    for p in resolved_momenta(grid, 3):
        psi, dpsi = kg_plane_wave(grid, p)
        h = evolve_kg(psi, dpsi, grid, FREE, 0.01, 10.0, store_every=10)
        omega = _phase_rate(h.psi, h.times)
        assert abs(omega / p - E_of(p) / p) / (E_of(p) / p) < 1e-3


def test_kg_stability_limit(grid):
    psi, dpsi = kg_plane_wave(grid, 0.0)
    with pytest.raises(ConfigError):
        evolve_kg(psi, dpsi, grid, FREE, 1.0, 2.0)


@pytest.fixture(scope="module")
def kg_run(grid):
    psi, dpsi = kg_packet(grid, -5.0, 0.8, 2.0)
    return evolve_kg(psi, dpsi, grid, FREE, 0.02, 8.0, store_every=5)


def test_kg_charge_conservation(kg_run):
    assert kg_run.meta["charge_drift_per_time"] < 1e-8
    assert not kg_run.meta["charge_drift_flag"]
    # charge of a positive-frequency packet is <E>/(m c^2) for unit L2 norm
    psi0 = kg_run.psi[0]
    w = np.abs(np.fft.fft(psi0)) ** 2
    expected = np.sum(E_of(kg_run.grid.k) * w) / np.sum(w)
    assert kg_run.charge[0] == pytest.approx(expected, rel=1e-3)


def test_kg_charge_in_potential(grid):
    pots = StaticPotentials(lambda x: 0.2 * np.exp(-x * x / 8), lambda x: 0.1 * np.cos(x / 4))
    psi, dpsi = kg_packet(grid, -3.0, 0.5, 2.0)
    h = evolve_kg(psi, dpsi, grid, pots, 0.02, 5.0, store_every=50)
    assert h.meta["charge_drift_per_time"] < 1e-8


def _ensemble(grid, hist, n, seed):
    vs = np.array([bohm_velocity_kg(p, d, grid, FREE, floor=1e-10, strict=False)
                   for p, d in zip(hist.psi, hist.dpsi)])
    zero = np.zeros(grid.n)
    Q0 = sample_density(grid, np.clip(kg_density(hist.psi[0], hist.dpsi[0], zero), 0, None),
                        n, seed)
    return Q0, bohm_trajectory(VelocityHistory(grid, hist.times, vs), Q0, 0.05, hist.times[-1])


def test_kg_trajectories_do_not_cross(grid, kg_run):
    Q0, tr = _ensemble(grid, kg_run, 300, 3)
    Qs = tr.Q[:, np.argsort(Q0), 0]
    assert tr.meta["status"] == "ok"
    assert np.count_nonzero(np.diff(Qs, axis=1) < 0) == 0


def test_kg_ensemble_equivariance(grid, kg_run):
    Q0, tr = _ensemble(grid, kg_run, 4000, 5)
    rho_T = kg_density(kg_run.psi[-1], kg_run.dpsi[-1], np.zeros(grid.n))
    chi2, dof, pval = equivariance_chi2(grid, rho_T, tr.Q[-1, :, 0])
    assert pval > 1e-3
    # a stale density (the initial one) is rejected
    rho_0 = kg_density(kg_run.psi[0], kg_run.dpsi[0], np.zeros(grid.n))
    assert equivariance_chi2(grid, rho_0, tr.Q[-1, :, 0])[2] < 1e-6


def test_chi2_matches_scipy(grid):
    rho = np.exp(-grid.x**2 / 4)
    Q = sample_density(grid, rho, 2000, 1)
    chi2, dof, pval = equivariance_chi2(grid, rho, Q, bins=10)
    edges_x = grid.lo + grid.h * (np.arange(grid.n + 1) - 0.5)
    cdf = np.concatenate([[0.0], np.cumsum(rho)]) / rho.sum()
    cuts = np.interp(np.linspace(0, 1, 11), cdf, edges_x)
    obs = np.histogram(Q, cuts)[0]
    ref = stats.chisquare(obs, np.full(10, len(Q) / 10))
    assert chi2 == pytest.approx(ref.statistic, rel=1e-9)
    assert pval == pytest.approx(ref.pvalue, rel=1e-9)


def test_uniform_velocity_gives_straight_lines():
    tr = bohm_trajectory(lambda t, Q: np.full_like(Q, 0.3), [0.0, 1.0], 0.1, 2.0)
    np.testing.assert_allclose(tr.Q[-1, :, 0], [0.6, 1.6], rtol=1e-12)


def test_trajectory_steps_around_nodes():
    def vel(t, Q):
        return np.where(np.abs(Q - 0.5) < 1e-3, np.nan, 1.0)
    tr = bohm_trajectory(vel, [0.0, 0.44], 0.1, 1.0)
    assert tr.meta["truncated"] >= 0
    assert np.isfinite(tr.Q[-1, 0, 0]) or tr.meta["status"] == "truncated"


def test_sample_density_rejects_negative(grid):
    with pytest.raises(NodeError):
        sample_density(grid, -np.ones(grid.n), 10)


def test_dirac_rest_spinor():
    grid = Grid1D(0.0, 10.0, 16)
    psi = np.zeros((2, grid.n), complex)
    psi[0] = 1 / np.sqrt(grid.length)
    h = evolve_dirac(psi, grid, FREE, 0.01, 10.0, store_every=10)
    assert abs(_phase_rate(h.psi[:, 0], h.times) - 1.0) < 1e-10
    assert h.meta["norm_drift_per_step"] < 1e-10
    np.testing.assert_allclose(np.abs(h.psi[:, 1]), 0, atol=1e-14)


def test_dirac_group_velocity():
    # narrow momentum spread keeps the curvature bias of <v(p)> small
    grid = Grid1D(-80.0, 160.0, 1024)
    p0 = 0.8
    psi = dirac_packet(grid, -20.0, p0, 12.0)
    h = evolve_dirac(psi, grid, FREE, 0.02, 8.0, store_every=10)
    dens = np.sum(np.abs(h.psi) ** 2, axis=1)
    centroid = dens @ grid.x / dens.sum(axis=1)
    vg = np.polyfit(h.times, centroid, 1)[0]
    assert abs(vg - p0 / E_of(p0)) / (p0 / E_of(p0)) < 0.01
    assert h.meta["norm_drift_per_step"] < 1e-10


def test_dirac_norm_in_potential(grid):
    pots = StaticPotentials(lambda x: 0.3 * np.tanh(x), lambda x: 0.2 * np.sin(x / 3))
    h = evolve_dirac(dirac_packet(grid, 0.0, 0.3, 2.0), grid, pots, 0.02, 5.0)
    assert h.meta["norm_drift_per_step"] < 1e-10
    assert not h.meta["norm_drift_flag"]


def test_dirac_cfl(grid):
    with pytest.raises(ConfigError):
        evolve_dirac(dirac_packet(grid, 0.0, 0.3, 2.0), grid, FREE, 1.0, 2.0)


def test_snapshot_csv(tmp_path, kg_run):
    kg_run.to_csv(tmp_path / "kg.csv")
    data = np.loadtxt(tmp_path / "kg.csv", delimiter=",", skiprows=1)
    assert data.shape == (256, 3)
    assert open(tmp_path / "kg.csv").readline().strip() == "x,re,im"


# hydrogen


@pytest.fixture(scope="module")
def coulomb():
    return hydrogen_spectrum(np.inf)


def test_hydrogen_coulomb_levels(coulomb):
    assert len(coulomb.levels) == 6 and not coulomb.omitted
    for lv in coulomb.levels:
        assert abs(lv["energy"] + 0.5 / lv["n"] ** 2) < 1e-4


def test_levels_increase_within_l(coulomb):
    for l in range(3):
        E = [lv["energy"] for lv in coulomb.levels if lv["l"] == l]
        assert np.all(np.diff(E) > 0)


def test_finite_b_is_shallower(coulomb):
    for b in (0.5, 5.0, 50.0):
        assert hydrogen_spectrum(b, n_max=1, l_max=0).energy(1) > coulomb.energy(1)


def test_sweep_monotone_and_limit(coulomb, tmp_path):
    bs, E1, mono = hydrogen_sweep([0.1, 1.0, 10.0, 100.0, 1e4], threads=2)
    assert mono
    assert np.all(E1 > coulomb.energy(1))
    assert abs(E1[-1] + 0.5) < abs(E1[0] + 0.5)
    assert abs(E1[-1] + 0.5) < 1e-3
    write_sweep_csv(tmp_path / "s.csv", bs, E1, coulomb.energy(1))
    assert open(tmp_path / "s.csv").readline().strip() == "b,E1,E1_minus_coulomb"


def test_fd_order():
    V = lambda r: -1 / r
    errs = [abs(_radial_levels(V, 0, h, 40.0, 1)[0] + 0.5) for h in (0.04, 0.02, 0.01)]
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(orders - 2) < 0.15)


def test_spectrum_json(tmp_path, coulomb):
    coulomb.to_json(tmp_path / "s.json")
    data = json.loads((tmp_path / "s.json").read_text())
    assert data["b"] is None and data["b_is_infinite"]
    assert data["tolerances"]["richardson"] == "h, h/2"


def test_spectrum_rejects_bad_b():
    with pytest.raises(ConfigError):
        hydrogen_spectrum(0.0)


def test_unconverged_levels_are_omitted():
    rep = hydrogen_spectrum(np.inf, n_max=3, l_max=0, R=12.0)
    assert any(lv["n"] == 3 for lv in rep.omitted)
