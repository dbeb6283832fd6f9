"""Scenario execution and report writing."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import scipy

import blowup_reduction
from blowup_reduction.boundary_geometry import (
    LevelSetBoundary,
    ellipsoid_boundary,
    torus_cross_section,
    weight_from_config,
)
from blowup_reduction.cli_harness.config import ConfigError, ScenarioConfig, resolve_output_dir
from blowup_reduction.reduced_energy import (
    ExpansionQuery,
    integral_identities,
    coefficients,
    expansion_terms,
)
from blowup_reduction.reduction_driver import (
    EpsilonSide,
    FitRejected,
    Stability,
    boundary_critical_search,
    error_scaling_fit,
    reduced_gradient_d,
    remainder_bound_check,
    solve_d0,
    stability_degree_test,
)


@dataclass(frozen=True)
class CheckRecord:
    name: str
    value: object
    reference: object
    residual: Optional[float]
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "reference": self.reference,
            "residual": self.residual,
            "passed": self.passed,
        }


@dataclass
class RunReport:
    scenario: dict
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, reference=None, residual=None, passed=True):
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check name {name!r}")
        self.checks.append(CheckRecord(name, _plain(value), _plain(reference),
                                       None if residual is None else float(residual), bool(passed)))

    def attempt(self, name: str, fn: Callable):
        """Run one check body; an exception fails that check only."""
        try:
            fn()
        except Exception as exc:  # recorded, never aborts sibling checks
            self.add(name, f"{type(exc).__name__}: {exc}", passed=False)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "data": self.data,
            "versions": versions(),
        }


def versions() -> dict:
    return {
        "blowup_reduction": blowup_reduction.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _plain(v):
    """Convert numpy scalars and arrays into JSON-friendly values."""
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


# -- boundaries ----------------------------------------------------------------------


def boundary_from_config(block: dict) -> LevelSetBoundary:
    """{kind: ellipsoid, center, semi_axes}, {kind: sphere, center, radius} or
    {kind: level_set, expression, dim} for a domain {F < 0}."""
    kind = block.get("kind")
    if kind == "ellipsoid":
        return ellipsoid_boundary(block["center"], block["semi_axes"])
    if kind == "sphere":
        c = list(block["center"])
        return ellipsoid_boundary(c, [float(block.get("radius", 1.0))] * len(c))
    if kind == "level_set":
        import sympy as sp

        dim = int(block["dim"])
        syms = sp.symbols(f"x1:{dim + 1}")
        F = sp.sympify(block["expression"], locals={str(s): s for s in syms})
        f = sp.lambdify(syms, F, "numpy")
        g = sp.lambdify(syms, [sp.diff(F, s) for s in syms], "numpy")
        h = sp.lambdify(syms, sp.hessian(F, syms), "numpy")
        return LevelSetBoundary(
            F=lambda x: float(f(*x)),
            grad=lambda x: np.array(g(*x), dtype=float),
            hess=lambda x: np.array(h(*x), dtype=float),
            dim=dim,
            label=str(F),
        )
    raise ConfigError(f"unknown boundary kind {kind!r}")


# -- expansion surface ---------------------------------------------------------------


SURFACE_COLUMNS = ("d", "epsilon", "J", "grad_d", "d0_marker", "Ha_term")


def emit_expansion_surface(config: ScenarioConfig) -> list[dict]:
    """Rows (d, eps, J, grad_d, d0 marker, Ha term) over the (d, eps) grid.

    ``d0_marker`` is 1 on the grid row of each eps closest to the admissible
    root d0 and 0 elsewhere.  ``grad_d`` is a(xi) times the leading d-gradient.
    """
    n = config.n
    pt = config.params["point"]
    coeffs = coefficients(n).with_overrides(**config.params.get("coefficients", {}))
    c4 = coeffs.numeric("c4")
    c5 = coeffs.numeric("c5")
    rows = []
    for eps in config.params["epsilon_grid"]:
        ds = config.params["d_grid"]
        block = []
        for d in ds:
            q = ExpansionQuery(d, pt["a_value"], pt["normal_derivative"], pt["mean_curvature"], eps)
            terms = expansion_terms(coeffs, q)
            ha = q.weighted_curvature(n)
            block.append({
                "d": d,
                "epsilon": eps,
                "J": math.fsum(terms.values()),
                "grad_d": pt["a_value"] * reduced_gradient_d(c4, c5, ha, d, eps),
                "d0_marker": 0,
                "Ha_term": terms["c4"],
            })
        res = solve_d0(c4, c5, ha, eps)
        if res.admissible:
            nearest = int(np.argmin([abs(d - res.d0) for d in ds]))
            block[nearest]["d0_marker"] = 1
        rows.extend(block)
    return rows


def _write_csv(path: Path, rows: list[dict], columns) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(r[k])) if isinstance(r[k], float) else r[k] for k in columns})
    path.write_text(buf.getvalue())


# -- scenarios -----------------------------------------------------------------------


def _scenario_identities(cfg: ScenarioConfig, rep: RunReport):
    tol = cfg.tolerance("identity")
    rows = []
    for n in cfg.params["dimensions"]:
        def identities(n=n):
            for rec in integral_identities(n, tol):
                rep.add(f"n={n}:{rec.name}", rec.lhs, rec.rhs, rec.residual, rec.passed)
                rows.append({"n": n, **rec.as_dict()})

        rep.attempt(f"n={n}:identities", identities)

        def ratio(n=n):
            c = coefficients(n)
            value, ref = c.c7 / c.c6, 2.0 / (n - 1)
            res = abs(value - ref) / ref
            rep.add(f"n={n}:c7_over_c6", value, ref, res, res <= cfg.tolerance("ratio"))

        rep.attempt(f"n={n}:c7_over_c6", ratio)
    rep.tables["identities.csv"] = (rows, ("n", "name", "lhs", "rhs", "residual", "tolerance", "passed"))


def _scenario_critical_search(cfg: ScenarioConfig, rep: RunReport):
    p = cfg.params
    boundary = boundary_from_config(p["boundary"])
    a = weight_from_config(p["weight"], boundary.dim)
    co = p.get("coefficients", {})
    c4 = co.get("c4", coefficients(boundary.dim).c6 if boundary.dim >= 5 else 1.0)
    gtol = cfg.tolerance("gradient")
    found = boundary_critical_search(a, boundary, p["seeds"], gtol=gtol, c4=c4, c5=co.get("c5"))
    rep.data["candidates"] = [_plain(c.as_dict()) for c in found]
    rows = []
    for i, c in enumerate(found):
        tag = f"candidate[{i}]"
        rep.add(f"{tag}:converged", c.gradient_norm, gtol, c.gradient_norm, c.converged)
        if c.stability in (Stability.MIN, Stability.MAX, Stability.NONDEGENERATE):
            def degree(c=c, tag=tag):
                ev = stability_degree_test(a, boundary, c, box_radius=cfg.tolerance("box_radius"))
                rep.add(f"{tag}:stable", ev.degree, None, ev.min_gradient, ev.stable)

            rep.attempt(f"{tag}:stable", degree)
        rows.append({
            **{f"x{j + 1}": float(v) for j, v in enumerate(c.xi0)},
            "H_a": c.H_a,
            "side": c.epsilon_side.value,
            "d0": "" if c.d0 is None else c.d0,
            "stability": c.stability.value,
            "gradient_norm": c.gradient_norm,
        })
    cols = [f"x{j + 1}" for j in range(boundary.dim)] + ["H_a", "side", "d0", "stability", "gradient_norm"]
    rep.tables["candidates.csv"] = (rows, cols)
    for k, exp in enumerate(p.get("expected", [])):
        pos = np.asarray(exp["point"], dtype=float)
        dists = [float(np.linalg.norm(c.xi0 - pos)) for c in found]
        j = int(np.argmin(dists)) if dists else -1
        ok = j >= 0 and dists[j] <= cfg.tolerance("position")
        if ok and "stability" in exp:
            ok = found[j].stability.value == exp["stability"]
        rep.add(f"expected[{k}]", None if j < 0 else _plain(found[j].xi0), exp, min(dists) if dists else None, ok)


def _scenario_expansion_sweep(cfg: ScenarioConfig, rep: RunReport):
    rows = emit_expansion_surface(cfg)
    rep.tables["expansion_surface.csv"] = (rows, SURFACE_COLUMNS)
    eps_grid, d_grid = cfg.params["epsilon_grid"], cfg.params["d_grid"]
    rep.add("row_count", len(rows), len(eps_grid) * len(d_grid), None, len(rows) == len(eps_grid) * len(d_grid))
    pt = cfg.params["point"]
    coeffs = coefficients(cfg.n).with_overrides(**cfg.params.get("coefficients", {}))
    c4, c5 = coeffs.numeric("c4"), coeffs.numeric("c5")
    ha = ExpansionQuery(1.0, pt["a_value"], pt["normal_derivative"], pt["mean_curvature"], 1.0).weighted_curvature(cfg.n)
    rep.data["H_a"] = ha
    for eps in eps_grid:
        res = solve_d0(c4, c5, ha, eps)
        side = EpsilonSide.from_sign(eps).value
        col = [r["grad_d"] for r in rows if r["epsilon"] == eps]
        if not res.admissible:
            signs = set(np.sign(col).tolist())
            rep.add(f"eps={eps!r}:{side}:no_root_single_sign", sorted(signs), None, None, len(signs) == 1)
            continue
        g0 = reduced_gradient_d(c4, c5, ha, res.d0, eps)
        scale = abs(eps) * c5 / res.d0
        rep.add(f"eps={eps!r}:root", res.d0, 0.0, abs(g0), abs(g0) <= cfg.tolerance("root") * scale)
        bracketed = [d_grid[i] for i in range(len(col) - 1) if col[i] * col[i + 1] <= 0]
        if min(d_grid) < res.d0 < max(d_grid):
            ok = any(lo <= res.d0 <= hi for lo, hi in zip(d_grid, d_grid[1:]) if lo in bracketed)
            rep.add(f"eps={eps!r}:{side}:sign_change_brackets_d0", bracketed, res.d0, None, ok)
    ha_terms = np.array([r["Ha_term"] for r in rows])
    ok = bool(np.all(np.sign(ha_terms) == np.sign(ha)))
    rep.add("Ha_term_sign", float(np.sign(ha)), None, None, ok)


def _scenario_scaling_fits(cfg: ScenarioConfig, rep: RunReport):
    p = cfg.params
    kw = {k: p[k] for k in ("d", "radius", "curvature", "weight_slope", "resolution")}
    tol_e = cfg.tolerance("exponent")
    r2_min = cfg.tolerance("r_squared")
    rep.data["fits"] = {}
    for term in ("I1", "I2", "I3"):
        def one(term=term):
            fit = error_scaling_fit(cfg.n, term, p["epsilon_grid"], reject=False, **kw)
            rep.data["fits"][term] = _plain(fit.as_dict())
            if term == "I1":
                rep.add("I1:log_model_preferred", fit.log_coefficient_flag, True, fit.ss_log - fit.ss_power,
                        fit.log_coefficient_flag)
            else:
                rep.add(f"{term}:exponent", fit.exponent, 1.0, abs(fit.exponent - 1.0),
                        abs(fit.exponent - 1.0) <= tol_e)
            rep.add(f"{term}:r_squared", fit.r_squared, r2_min, None, fit.r_squared >= r2_min)

        rep.attempt(f"{term}:fit", one)

    def total():
        fit = remainder_bound_check(p["epsilon_grid"], n=cfg.n, reject=False, **kw)
        rep.data["fits"]["total"] = _plain(fit.as_dict())
        rep.add("total:r_squared", fit.r_squared, r2_min, None, fit.r_squared >= r2_min)

    rep.attempt("total:fit", total)
    rows = []
    for term, fit in rep.data["fits"].items():
        for e, v in zip(fit["epsilons"], fit["norms"]):
            rows.append({"term": term, "epsilon": e, "norm": v})
    rep.tables["scaling_norms.csv"] = (rows, ("term", "epsilon", "norm"))


def _scenario_torus_example(cfg: ScenarioConfig, rep: RunReport):
    p = cfg.params
    n, R = cfg.n, float(p["radius"])
    rows = []
    threshold = None
    for D in p["axis_distances"]:
        t = torus_cross_section(n, D, R)
        threshold = t["threshold"]
        rows.append({"axis_distance": D, "a_min": t["a_min"], "a_max": t["a_max"],
                     "H_a_min_point": t["H_a_min_point"], "H_a_max_point": t["H_a_max_point"]})
        expected_sign = float(np.sign(threshold - t["a_min"]))
        rep.add(f"D={D!r}:sign_H_a_min_point", float(np.sign(t["H_a_min_point"])), expected_sign, None,
                np.sign(t["H_a_min_point"]) == expected_sign)
        rep.add(f"D={D!r}:H_a_max_point_negative", t["H_a_max_point"], 0.0, None, t["H_a_max_point"] < 0)
        if p.get("search", True):
            rep.attempt(f"D={D!r}:search", lambda D=D, t=t: _torus_search(cfg, rep, D, R, t))
    rep.data["threshold"] = threshold
    ref = 2.0 * R / (n - 1)
    rep.add("threshold", threshold, ref, abs(threshold - ref), math.isclose(threshold, ref, rel_tol=1e-14))
    rep.tables["torus_table.csv"] = (rows, ("axis_distance", "a_min", "a_max", "H_a_min_point", "H_a_max_point"))


def _torus_search(cfg, rep, D, R, t):
    """Critical points of a = x_1 on the sphere of radius R around (D, 0, ..., 0)."""
    n = cfg.n
    center = np.zeros(n)
    center[0] = D
    boundary = ellipsoid_boundary(center, [R] * n)
    a = weight_from_config({"kind": "product_power", "exponents": [2]}, n)
    rng = np.random.default_rng(cfg.seed)
    seeds = center + R * rng.standard_normal((4, n))
    found = boundary_critical_search(a, boundary, seeds)
    tol_x, tol_h = cfg.tolerance("position"), cfg.tolerance("curvature")
    for label, x1, stab, ha in (("min", D - R, Stability.MIN, t["H_a_min_point"]),
                                ("max", D + R, Stability.MAX, t["H_a_max_point"])):
        target = center.copy()
        target[0] = x1
        dist = [float(np.linalg.norm(c.xi0 - target)) for c in found]
        j = int(np.argmin(dist))
        c = found[j]
        ok = dist[j] <= tol_x and c.stability is stab and abs(c.H_a - ha) <= tol_h * max(1.0, abs(ha))
        rep.add(f"D={D!r}:search_{label}", [c.stability.value, c.H_a], [stab.value, ha], dist[j], ok)


SCENARIOS = {
    "identities": _scenario_identities,
    "critical_search": _scenario_critical_search,
    "expansion_sweep": _scenario_expansion_sweep,
    "scaling_fits": _scenario_scaling_fits,
    "torus_example": _scenario_torus_example,
}


def run_scenario(config: ScenarioConfig) -> RunReport:
    """Run every check of the scenario; failures are recorded, not raised."""
    start = time.perf_counter()
    rep = RunReport(scenario=_plain(config.as_dict()))
    rep.attempt(f"{config.kind}:setup", lambda: SCENARIOS[config.kind](config, rep))
    rep.wall_time = time.perf_counter() - start
    return rep


def write_report(rep: RunReport, config: ScenarioConfig, out_dir: Optional[str] = None) -> Path:
    """report.json and the tables go to the output directory; wall time goes
    to a separate timing.json so that report.json is byte-stable."""
    path = resolve_output_dir(config, out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / "report.json").write_text(json.dumps(rep.as_dict(), indent=2, sort_keys=True) + "\n")
    for name, (rows, cols) in rep.tables.items():
        _write_csv(path / name, rows, cols)
    (path / "timing.json").write_text(json.dumps({"wall_time_s": rep.wall_time}, indent=2) + "\n")
    return path


__all__ = [
    "CheckRecord",
    "RunReport",
    "boundary_from_config",
    "emit_expansion_surface",
    "run_scenario",
    "write_report",
]
