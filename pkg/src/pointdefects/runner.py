"""Scenario configuration, dispatch and deterministic artifact emission.

A scenario is a JSON document validated against :data:`SCHEMA` before any
computation.  :func:`run_scenario` writes the data files of the scenario plus
a ``manifest.json`` with the echoed configuration, package versions,
per-file SHA-256 checksums (naming the producing operation) and the results
of embedded checks.  Wall-clock timings and the thread count go to a
``timings.json`` sidecar that the manifest names but does not checksum, so
``manifest.json`` and every data file are byte-identical across reruns
regardless of machine load or ``--threads``.
"""
from __future__ import annotations

import hashlib
import json
import os
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np
import scipy

from . import __version__
from .born_infeld import (BETA_QUARTER, FIELD_ENERGY_COEFF, b_born, bi_conserved_integrals,
                          born_potential)
from .classical import ExternalField, integrate_ald, integrate_ll, integrate_lorentz
from .core import ConfigError, ParticleState, preset
from .electrostatics import ChargeConfig, coulomb_asymptotics_check, solve_electrostatic
from .hamilton_jacobi import (PotentialPair, ScalarGridField, guide, hj_squared_residual,
                              solve_hj, static_selfconsistency_check)
from .quantum import (Grid1D, StaticPotentials, VelocityHistory, bohm_trajectory,
                      bohm_velocity_dirac, bohm_velocity_kg, dirac_packet, equivariance_chi2,
                      evolve_dirac, evolve_kg, hydrogen_spectrum, hydrogen_sweep, kg_density,
                      kg_packet, sample_density, write_sweep_csv)
from .worldlines import circular, load_worldline_csv, lw_fields, maxwell_residuals, rest, uniform

__all__ = ["SCHEMA", "KINDS", "RunArtifacts", "validate_config", "load_config",
           "run_scenario", "emit_report", "default_threads", "THREADS_ENV"]

THREADS_ENV = "POINTDEFECTS_THREADS"

_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_POS = {"type": "number", "exclusiveMinimum": 0}
_POS_INT = {"type": "integer", "minimum": 1}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_PARAMS = {
    "constants": _obj({}),
    "lw-fields": _obj({
        "worldline": _obj({
            "kind": {"enum": ["rest", "uniform", "circular", "csv"]},
            "Q0": _VEC3, "v": _VEC3, "radius": _POS, "omega": {"type": "number"},
            "center": _VEC3, "path": {"type": "string"}}, ["kind"]),
        "q": {"type": "number"},
        "t": {"type": "number"},
        "points": {"type": "array", "items": _VEC3, "minItems": 1},
        "residuals": _obj({"lo": _VEC3, "hi": _VEC3, "h": _POS,
                           "exclusion": {"type": "number", "minimum": 0}},
                          ["lo", "hi", "h"]),
    }, ["worldline", "points"]),
    "motion": _obj({
        "integrator": {"enum": ["lorentz", "ald", "ll"]},
        "E0": _VEC3, "B0": _VEC3, "Q0": _VEC3, "v0": _VEC3, "a0": _VEC3,
        "q": {"type": "number"}, "dt": _POS, "T": {"type": "number", "minimum": 0},
    }, ["integrator", "dt", "T"]),
    "electrostatic": _obj({
        "charges": {"type": "array", "minItems": 1, "items": _obj(
            {"position": _VEC3, "q": {"type": "number"}, "a": _POS}, ["position", "q", "a"])},
        "n": {"type": "integer", "minimum": 8, "maximum": 128},
        "h": _POS, "tol": _POS,
        "separations": {"type": "array", "items": _POS, "minItems": 2},
        "sweep_h": _POS,
    }, ["charges", "n", "h"]),
    "hamilton-jacobi": _obj({
        "mode": {"enum": ["static-check", "equivalence"]},
        "scenario": {"enum": ["uniform-E", "crossed"]},
        "E0": {"type": "number"}, "B0": {"type": "number"},
        "h": _POS, "T": _POS, "dt_guide": _POS,
        "p0": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 2},
        "eps": {"type": "number"},
    }, ["mode"]),
    "quantum": _obj({
        "equation": {"enum": ["kg", "dirac"]},
        "grid": _obj({"lo": {"type": "number"}, "length": _POS, "n": _POS_INT},
                     ["lo", "length", "n"]),
        "packet": _obj({"x0": {"type": "number"}, "p0": {"type": "number"}, "sigma": _POS},
                       ["x0", "p0", "sigma"]),
        "dt": _POS, "T": _POS, "store_every": _POS_INT, "ensemble": _POS_INT,
        "trajectory_dt": _POS,
    }, ["equation", "grid", "packet", "dt", "T"]),
    "hydrogen-sweep": _obj({
        "bs": {"type": "array", "items": _POS, "minItems": 2},
        "include_b_born": {"type": "boolean"},
        "n_max": {"type": "integer", "minimum": 1, "maximum": 6},
        "l_max": {"type": "integer", "minimum": 0, "maximum": 5},
        "h": _POS, "R": _POS,
    }, ["bs"]),
}

KINDS = tuple(_PARAMS)

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "pointdefects scenario",
    "type": "object",
    "properties": {
        "kind": {"enum": list(KINDS)},
        "constants": _obj({
            "preset": {"enum": ["born-units", "atomic-units"]},
            "overrides": _obj({k: _POS for k in ("c", "e", "m", "b", "hbar")}),
        }),
        "params": {"type": "object"},
        "output": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
    "allOf": [{"if": {"properties": {"kind": {"const": k}}, "required": ["kind"]},
               "then": {"properties": {"params": p}}} for k, p in _PARAMS.items()],
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def validate_config(cfg: dict) -> dict:
    """Validate a scenario; raise :class:`ConfigError` naming the JSON pointer."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: (len(e.absolute_path),
                                                               list(map(str, e.absolute_path))))
    if errors:
        depth = max(len(e.absolute_path) for e in errors)
        # unknown keys first: a misspelt key usually also leaves a required one missing
        worst = sorted((e for e in errors if len(e.absolute_path) == depth),
                       key=lambda e: e.validator != "additionalProperties")
        raise ConfigError(f"invalid scenario at {_pointer(worst[0].absolute_path)}: "
                          + "; ".join(e.message for e in worst))
    return cfg


def load_config(path) -> dict:
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return validate_config(cfg)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


@dataclass
class RunArtifacts:
    out_dir: Path
    kind: str
    manifest: dict
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0
    threads: int = 1

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def files(self) -> dict:
        return self.manifest["files"]


class _Run:
    """Collects files, checks and notes while a scenario executes."""

    def __init__(self, out_dir: Path):
        self.out = out_dir
        self.files = {}
        self.checks = []
        self.notes = []

    def path(self, name, producer):
        self.files[name] = producer
        return self.out / name

    def json(self, name, producer, obj):
        with open(self.path(name, producer), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")

    def check(self, name, value, tol, passed, producer):
        self.checks.append({"name": name, "value": _jsonable(value), "tol": tol,
                            "passed": bool(passed), "producer": producer})


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    return x


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# --------------------------------------------------------------------------
# scenario kinds


def _run_constants(run: _Run, consts, params, seed, threads):
    c, m, e = consts.c, consts.m, consts.e
    bb = b_born(m, c, e)
    energy_bb = bi_conserved_integrals(b=bb, c=c, e=e).energy
    rows = [("beta_quarter_quarter", BETA_QUARTER),
            ("born_energy_coefficient", FIELD_ENERGY_COEFF),
            ("born_field_energy_b1", bi_conserved_integrals(b=1.0, c=c, e=e).energy),
            ("b_born", bb),
            ("born_field_energy_b_born", energy_bb),
            ("phi_born_origin_b_born", float(born_potential(0.0, e, bb)))]
    with open(run.path("constants.csv", "born_infeld.constants"), "w") as fh:
        fh.write("name,value\n")
        for name, val in rows:
            fh.write(f"{name},{val:.17g}\n")
    run.check("born_energy_coefficient", FIELD_ENERGY_COEFF, "1.2361 +- 1e-4",
              abs(FIELD_ENERGY_COEFF - 1.2361) <= 1e-4, "bi_conserved_integrals")
    run.check("b_born", bb, "0.65453 +- 1e-5 (m=c=e=1)",
              abs(bb / (m * m * c**4 / e**3) - 0.65453) <= 1e-5, "b_born")
    run.check("born_energy_equals_mc2", energy_bb / (m * c * c), "1 +- 1e-4",
              abs(energy_bb / (m * c * c) - 1) <= 1e-4, "bi_conserved_integrals")


def _worldline(wl, c):
    kind = wl["kind"]
    if kind == "rest":
        return rest(wl.get("Q0", (0, 0, 0)), c)
    if kind == "uniform":
        return uniform(wl["v"], wl.get("Q0", (0, 0, 0)), c)
    if kind == "circular":
        return circular(wl["radius"], wl["omega"], wl.get("center", (0, 0, 0)), c)
    return load_worldline_csv(wl["path"], c)


def _run_lw(run: _Run, consts, params, seed, threads):
    c = consts.c
    w = _worldline(params["worldline"], c)
    q = params.get("q", -consts.e)
    t = params.get("t", 0.0)
    pts = np.asarray(params["points"], float)
    fs = lw_fields(w, q, t, pts)
    header = "x,y,z,Ex,Ey,Ez,Bx,By,Bz"
    np.savetxt(run.path("lw_fields.csv", "lw_fields"), np.hstack([pts, fs.E, fs.B]),
               fmt="%.17g", delimiter=",", header=header, comments="")
    E2 = np.sum(fs.E**2, -1)
    dot = float(np.max(np.abs(np.sum(fs.E * fs.B, -1)) / E2))
    run.check("B_perpendicular_E", dot, "<= 1e-12", dot <= 1e-12, "lw_fields")
    ratio = float(np.max(np.linalg.norm(fs.B, axis=-1) / np.sqrt(E2)))
    run.check("B_not_larger_than_E", ratio, "<= 1", ratio <= 1 + 1e-12, "lw_fields")
    if "residuals" in params:
        r = params["residuals"]
        centers = [w.Q(t)]

        def sampler(tt, s):
            f = lw_fields(w, q, tt, s)
            return f.E, f.B

        excl = r.get("exclusion", 0.0)
        coarse = maxwell_residuals(sampler, r["lo"], r["hi"], r["h"], t, c, centers, excl)
        fine = maxwell_residuals(sampler, r["lo"], r["hi"], r["h"] / 2, t, c, centers, excl)
        table = {}
        for key in ("faraday", "ampere", "div_B", "div_E"):
            a, b = coarse[key], fine[key]
            order = float(np.log2(a / b)) if b > 0 and a > 0 else float("inf")
            table[key] = {"h": a, "h/2": b, "order": order}
            run.check(f"residual_order_{key}", order, ">= 1.95 (or at rounding level)",
                      order >= 1.95 or b < 1e-10, "maxwell_residuals")
        run.json("lw_residuals.json", "maxwell_residuals", table)


def _run_motion(run: _Run, consts, params, seed, threads):
    c, m = consts.c, consts.m
    E0 = np.asarray(params.get("E0", (0, 0, 0)), float)
    B0 = np.asarray(params.get("B0", (0, 0, 0)), float)
    f = ExternalField.uniform(E0, B0)
    q = params.get("q", -consts.e)
    s0 = ParticleState.from_velocity(0.0, params.get("Q0", (0, 0, 0)),
                                     params.get("v0", (0, 0, 0)), m, c)
    dt, T = params["dt"], params["T"]
    kind = params["integrator"]
    if kind == "lorentz":
        tr = integrate_lorentz(s0, f, dt, T, consts, q, error_estimate=True)
    elif kind == "ll":
        tr = integrate_ll(s0, f, dt, T, consts, q)
    else:
        tr = integrate_ald(s0, params.get("a0", (0, 0, 0)), f, dt, T, consts, q)
    producer = {"lorentz": "integrate_lorentz", "ll": "integrate_ll",
                "ald": "integrate_ald"}[kind]
    tr.to_csv(run.path("trajectory.csv", producer))
    tr.write_header(run.path("trajectory.json", producer), params)
    Pn = np.linalg.norm(tr.P, axis=1)
    kin = c * np.sqrt((m * c) ** 2 + Pn**2)
    if kind == "ald":
        zero_field = not E0.any() and not B0.any()
        a0 = np.asarray(params.get("a0", (0, 0, 0)), float)
        if tr.meta["status"] == "runaway":
            expected = zero_field and a0.any()
            run.notes.append("ALD status: runaway (expected)" if expected
                             else "ALD status: runaway")
            run.check("ald_status", "runaway", "runaway expected for a0 != 0",
                      expected, producer)
        else:
            run.notes.append("ALD status: ok")
            run.check("ald_status", "ok", "bounded", True, producer)
    elif not E0.any():
        if kind == "lorentz":
            drift = float(np.max(np.abs(Pn - Pn[0])) / max(Pn[0], 1e-300))
            run.check("momentum_magnitude_conserved", drift, "<= 1e-9", drift <= 1e-9,
                      producer)
        else:
            ok = bool(np.all(np.diff(kin) <= 1e-14 * kin[0]))
            run.check("energy_nonincreasing", float(np.max(np.diff(kin), initial=0.0)),
                      "<= 0", ok, producer)
    else:
        run.check("status", tr.meta["status"], "ok", tr.meta["status"] == "ok", producer)


def _run_electrostatic(run: _Run, consts, params, seed, threads):
    b = consts.b
    cfg = ChargeConfig.of(*[(ch["position"], ch["q"], ch["a"]) for ch in params["charges"]])
    tol = params.get("tol", 1e-7)
    fld, rep = solve_electrostatic(cfg, params["n"], params["h"], b, tol=tol)
    fld.to_csv(run.path("grid_field.csv", "solve_electrostatic"))
    rep.to_json(run.path("solver_report.json", "solve_electrostatic"))
    scale = float(np.max(np.abs(4 * np.pi * fld.rho)))
    rel = rep.constraint_residual / scale
    run.check("constraint_residual", rel, "< 1e-12 (relative)", rel < 1e-12,
              "solve_electrostatic")
    run.check("converged", rep.gradient_norm, f"<= 10 * {tol}", rep.converged,
              "solve_electrostatic")
    hist = np.asarray(rep.energy_history)
    run.check("energy_monotone", float(np.max(np.diff(hist), initial=0.0)), "<= 0",
              bool(np.all(np.diff(hist) <= 0)), "solve_electrostatic")
    if "separations" in params:
        res = coulomb_asymptotics_check(params["separations"], b, consts.e,
                                        h=params.get("sweep_h"), threads=threads)
        with open(run.path("coulomb_asymptotics.csv", "coulomb_asymptotics_check"), "w") as fh:
            fh.write("d,force,coulomb,ratio\n")
            for r in res["rows"]:
                fh.write(f"{r['d']:.17g},{r['magnitude']:.17g},{r['coulomb']:.17g},"
                         f"{r['ratio']:.17g}\n")
        first = res["rows"][0]
        run.check("ratio_at_smallest_d", first["ratio"], "within 10% of 1",
                  abs(first["ratio"] - 1) <= 0.1, "coulomb_asymptotics_check")
        run.check("loglog_slope", res["slope"], "-2 +- 0.1", abs(res["slope"] + 2) <= 0.1,
                  "coulomb_asymptotics_check")
        run.check("repulsive", all(r["repulsive"] for r in res["rows"]), "all True",
                  all(r["repulsive"] for r in res["rows"]), "coulomb_asymptotics_check")


def _run_hj(run: _Run, consts, params, seed, threads):
    if params["mode"] == "static-check":
        rep = static_selfconsistency_check(consts)
        rep.to_json(run.path("static_check.json", "static_selfconsistency_check"))
        for name, c in rep.checks.items():
            run.check(name, c["value"], c["tol"], c["passed"], "static_selfconsistency_check")
        run.check("total_energy_2mc2", rep.energy / (consts.m * consts.c**2), "2 +- 1e-4",
                  abs(rep.energy / (consts.m * consts.c**2) - 2) <= 1e-4, "conserved_totals")
        run.notes.append(rep.summary())
        return
    scenario = params.get("scenario", "uniform-E")
    h = params.get("h", 0.1)
    T = params.get("T", 10.0)
    dtg = params.get("dt_guide", 0.01)
    E0 = params.get("E0", 0.5)
    q = -consts.e
    if scenario == "uniform-E":
        p0 = np.array(params.get("p0", [0.3])[:1], float)
        eps = params.get("eps", 0.02)
        axes = [np.arange(-14, 4 + h / 2, h)]
        pots = PotentialPair.uniform_electric([E0])
        S0 = ScalarGridField.from_function(axes, lambda X: X @ p0 + eps * np.sin(X[..., 0]))
        f = ExternalField.uniform(E0=(E0, 0, 0))
        P0 = np.array([p0[0] + eps, 0, 0])
    else:
        B0 = params.get("B0", 0.25)
        p0 = np.array((params.get("p0", [0.2, 0.1]) + [0.0])[:2], float)
        axes = [np.arange(-12, 8 + h / 2, h), np.arange(-14, 6 + h / 2, h)]
        pots = PotentialPair.crossed(E0, B0)
        S0 = ScalarGridField.from_function(axes, lambda X: X @ p0)
        f = ExternalField.uniform(E0=(0, E0, 0), B0=(0, 0, B0))
        P0 = np.array([p0[0], p0[1], 0])
    S = solve_hj(S0, pots, T, consts, q)
    d = S.dim
    g = guide(S, pots, np.zeros(d), dtg, T, consts, q)
    ref = integrate_lorentz(ParticleState(0.0, np.zeros(3), P0), f, dtg, T, consts, q)
    n = len(g.t)
    err = float(np.max(np.linalg.norm(g.Q - ref.Q[:n, :d], axis=1))
                / np.max(np.linalg.norm(ref.Q[:, :d], axis=1)))
    g.to_csv(run.path("guided.csv", "guide"))
    ref.to_csv(run.path("lorentz.csv", "integrate_lorentz"))
    S.to_csv(run.path("S_final.csv", "solve_hj"))
    res = hj_squared_residual(S, pots, consts, q)
    run.json("hj_report.json", "solve_hj", {"meta": S.meta, "relative_sup_error": err,
                                             "guide_status": g.meta["status"],
                                             "squared_residual_max": float(np.max(np.abs(res)))})
    run.check("guide_vs_lorentz", err, "<= 1e-3 (relative sup-norm)", err <= 1e-3, "guide")
    run.check("guide_inside_grid", g.meta["status"], "ok", g.meta["status"] == "ok", "guide")


def _run_quantum(run: _Run, consts, params, seed, threads):
    gp = params["grid"]
    grid = Grid1D(gp["lo"], gp["length"], gp["n"])
    pk = params["packet"]
    pots = StaticPotentials()
    dt, T = params["dt"], params["T"]
    every = params.get("store_every", 10)
    if params["equation"] == "dirac":
        psi0 = dirac_packet(grid, pk["x0"], pk["p0"], pk["sigma"], consts)
        hist = evolve_dirac(psi0, grid, pots, dt, T, consts, store_every=every)
        hist.to_csv(run.path("psi_final.csv", "evolve_dirac"))
        v = bohm_velocity_dirac(hist.psi[-1], consts.c, strict=False)
        speed = float(np.nanmax(np.abs(v)))
        run.check("subluminal", speed, "< c", speed <= consts.c, "bohm_velocity_dirac")
        drift = hist.meta["norm_drift_per_step"]
        run.check("norm_drift_per_step", drift, "<= 1e-10", drift <= 1e-10, "evolve_dirac")
        run.json("quantum_report.json", "evolve_dirac", hist.meta)
        return
    psi0, dpsi0 = kg_packet(grid, pk["x0"], pk["p0"], pk["sigma"], consts)
    hist = evolve_kg(psi0, dpsi0, grid, pots, dt, T, consts, store_every=every)
    hist.to_csv(run.path("psi_final.csv", "evolve_kg"))
    drift = hist.meta["charge_drift_per_time"]
    run.check("charge_drift_per_time", drift, "<= 1e-8", drift <= 1e-8, "evolve_kg")
    report = dict(hist.meta)
    if params.get("ensemble"):
        vs = np.array([bohm_velocity_kg(p, d, grid, pots, consts, floor=1e-10, strict=False)
                       for p, d in zip(hist.psi, hist.dpsi)])
        zero = np.zeros(grid.n)
        rho0 = kg_density(hist.psi[0], hist.dpsi[0], zero, consts)
        Q0 = sample_density(grid, np.clip(rho0, 0, None), params["ensemble"], seed)
        tdt = params.get("trajectory_dt", every * dt)
        tr = bohm_trajectory(VelocityHistory(grid, hist.times, vs), Q0, tdt, T)
        order = np.argsort(Q0)
        Qs = tr.Q[:, order, 0]
        ok = np.isfinite(Qs).all(axis=1)
        crossings = int(np.count_nonzero(np.diff(Qs[ok], axis=1) < 0))
        run.check("trajectory_crossings", crossings, "0", crossings == 0,
                  "bohm_trajectory")
        rho_T = kg_density(hist.psi[-1], hist.dpsi[-1], zero, consts)
        chi2, dof, pval = equivariance_chi2(grid, rho_T, tr.Q[-1, :, 0])
        run.check("ensemble_chi2_pvalue", pval, "> 1e-3", pval > 1e-3, "equivariance_chi2")
        report["chi2"] = {"statistic": chi2, "dof": dof, "p_value": pval}
        np.savetxt(run.path("ensemble_final.csv", "bohm_trajectory"), tr.Q[-1, :, 0],
                   fmt="%.17g", header="x", comments="")
        report["ensemble"] = {"size": int(params["ensemble"]), "truncated": tr.meta["truncated"]}
    run.json("quantum_report.json", "evolve_kg", report)


def _run_hydrogen(run: _Run, consts, params, seed, threads):
    kw = {k: params[k] for k in ("h", "R") if k in params}
    ref = hydrogen_spectrum(np.inf, consts, params.get("n_max", 3), params.get("l_max", 2), **kw)
    ref.to_json(run.path("spectrum_coulomb.json", "hydrogen_spectrum"))
    # an omitted (unconverged) level counts as a failure
    worst = max((abs(lv["energy"] + 0.5 * consts.e**4 * consts.m / consts.hbar**2 / lv["n"] ** 2)
                 for lv in ref.levels), default=np.inf)
    if ref.omitted:
        worst = np.inf
    run.check("coulomb_levels", worst, "<= 1e-4", worst <= 1e-4, "hydrogen_spectrum")
    bs = list(params["bs"])
    if params.get("include_b_born"):
        bs.append(b_born(consts.m, consts.c, consts.e))
    bs, E1, mono = hydrogen_sweep(bs, consts, threads=threads, **kw)
    E_ref = ref.energy(1, 0) if any(lv["n"] == 1 for lv in ref.levels) else np.nan
    write_sweep_csv(run.path("e1_sweep.csv", "hydrogen_sweep"), bs, E1, E_ref)
    run.check("e1_monotone_in_b", mono, "strictly decreasing in b", mono, "hydrogen_sweep")
    run.notes.append(f"E1(b) strictly monotone in b: {'yes' if mono else 'NO'}")
    run.notes.append(f"E1(b_max) - E1(inf) = {E1[-1] - E_ref:.3e} Hartree")


_DISPATCH = {
    "constants": _run_constants,
    "lw-fields": _run_lw,
    "motion": _run_motion,
    "electrostatic": _run_electrostatic,
    "hamilton-jacobi": _run_hj,
    "quantum": _run_quantum,
    "hydrogen-sweep": _run_hydrogen,
}


def run_scenario(cfg: dict, out_dir=None, threads: int | None = None) -> RunArtifacts:
    """Validate ``cfg``, run it and write artifacts plus ``manifest.json``.

    ``out_dir`` overrides ``cfg["output"]`` (default ``out/<kind>``).
    """
    validate_config(cfg)
    kind = cfg["kind"]
    cspec = cfg.get("constants", {})
    default = "atomic-units" if kind == "hydrogen-sweep" else "born-units"
    consts = preset(cspec.get("preset", default), **cspec.get("overrides", {}))
    out = Path(out_dir or cfg.get("output") or Path("out") / kind)
    out.mkdir(parents=True, exist_ok=True)
    threads = default_threads() if threads is None else max(1, int(threads))
    run = _Run(out)
    t0 = time.perf_counter()
    _DISPATCH[kind](run, consts, cfg.get("params", {}), cfg.get("seed", 0), threads)
    elapsed = time.perf_counter() - t0
    files = {name: {"sha256": _sha256(out / name), "bytes": (out / name).stat().st_size,
                    "producer": producer}
             for name, producer in sorted(run.files.items())}
    manifest = {
        "tool": "pointdefects",
        "version": __version__,
        "kind": kind,
        "config": cfg,
        "constants": {k: getattr(consts, k) if np.isfinite(getattr(consts, k)) else "inf"
                      for k in ("c", "e", "m", "b", "hbar")},
        "versions": {"python": platform.python_version(), "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "files": files,
        "timings": "timings.json",
        "checks": run.checks,
        "notes": run.notes,
        "passed": all(c["passed"] for c in run.checks),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    with open(out / "timings.json", "w") as fh:
        json.dump({"total_seconds": elapsed, "threads": threads}, fh, indent=2)
        fh.write("\n")
    return RunArtifacts(out, kind, manifest, run.checks, run.notes,
                        seconds=elapsed, threads=threads)


def emit_report(art: RunArtifacts) -> str:
    """One-page text summary of checks and their verdicts."""
    lines = [f"scenario: {art.kind}", f"output:   {art.out_dir}", ""]
    for c in art.checks:
        val = c["value"]
        val = f"{val:.6g}" if isinstance(val, float) else str(val)
        lines.append(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {val} "
                     f"(tol {c['tol']}; {c['producer']})")
    n_ok = sum(c["passed"] for c in art.checks)
    lines.append("")
    lines.extend(art.notes)
    lines.append(f"checks: {n_ok}/{len(art.checks)} passed")
    lines.append(f"time:   {art.seconds:.2f} s on {art.threads} thread(s)")
    lines.append("files:")
    for name, meta in art.files.items():
        lines.append(f"  {name}  sha256={meta['sha256'][:16]}...  ({meta['producer']})")
    return "\n".join(lines)
