"""Job configurations: validation, construction and execution.

A job is a JSON object

    {
      "name": "...", "provenance": "...",
      "geometry": {"kind": "warped" | "walker" | "extension" | "soliton-from-affine" | "raw-metric", ...},
      "potential": {"f": "...", "lambda": "..."},        # walker / extension / raw-metric only
      "ode": {"f0": 0, "df0": 0, "steps": 200},           # warped only
      "sampling": {"mode": "random", "count": 20, "seed": 1, "box": [[lo, hi], ...]}
                | {"mode": "grid", "axes": [[lo, hi, n], ...]},
      "checks": ["soliton-residual", ...],
      "tolerances": {"soliton-residual": 1e-8, ...},
      "tolerance_scale": 1.0,
      "kappa": 0.25, "mu": 0.0
    }

Every field is checked before any geometry is computed; failures raise
:class:`ConfigError` naming the offending field.
"""
from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field

import numpy as np

from . import affine, geom, ode, sampling, soliton
from . import expr as ex
from .tensor import Chart, GeometryError, MetricField, ScalarField

KINDS = ("warped", "walker", "extension", "soliton-from-affine", "raw-metric")

DEFAULT_CHECKS = {
    "warped": ["soliton-residual", "weyl-norm", "lemma21", "lemma22", "ode-verify"],
    "walker": ["curvature-symmetries", "weyl-split", "cotton-divweyl"],
    "extension": ["curvature-symmetries", "weyl-split", "cotton-divweyl"],
    "soliton-from-affine": [
        "soliton-residual",
        "kappa-einstein",
        "isotropy",
        "weyl-split",
        "lemma21",
        "lemma22",
    ],
    "raw-metric": ["curvature-symmetries"],
}

DIM4_CHECKS = {"weyl-split", "weyl-norm", "cotton-divweyl", "lemma22"}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class JobError(RuntimeError):
    """A valid job that failed while computing (e.g. an expression left its domain)."""


@dataclass
class SamplingConfig:
    mode: str = "random"
    count: int = 20
    seed: int | None = None
    box: list | None = None
    axes: list | None = None

    def to_dict(self) -> dict:
        d = {"mode": self.mode}
        if self.mode == "random":
            d.update(count=self.count, seed=self.seed, box=self.box)
        else:
            d.update(axes=self.axes)
        return d


@dataclass
class JobConfig:
    name: str
    geometry: dict
    sampling: SamplingConfig
    checks: list
    provenance: str = ""
    potential: dict | None = None
    ode: dict | None = None
    tolerances: dict = field(default_factory=dict)
    tolerance_scale: float = 1.0
    kappa: float = 0.25
    mu: float = 0.0

    @property
    def kind(self) -> str:
        return self.geometry["kind"]

    def resolved_tolerances(self) -> dict:
        tol = dict(soliton.DEFAULT_TOLERANCES)
        tol.update(self.tolerances)
        return {k: v * self.tolerance_scale for k, v in tol.items()}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sampling"] = self.sampling.to_dict()
        return {k: v for k, v in d.items() if v is not None}


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
    return d[key]


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
        raise ConfigError(where, f"expected a finite number, got {x!r}")
    return float(x)


def _integer(x, where: str, minimum: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(where, f"expected an integer, got {x!r}")
    if minimum is not None and x < minimum:
        raise ConfigError(where, f"must be >= {minimum}")
    return x


def _expr(src, chart: Chart, where: str) -> str:
    if isinstance(src, bool) or not isinstance(src, (str, int, float)):
        raise ConfigError(where, f"expected an expression string, got {src!r}")
    try:
        e = ex.parse(str(src), chart)
    except ex.ExprError as err:
        raise ConfigError(where, f"bad expression {src!r}: {err}") from None
    return ex.to_string(e)


def _matrix(rows, n: int, chart: Chart, where: str, symmetric: bool = False) -> list:
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ConfigError(where, f"expected a {n}x{n} array")
    out = [[_expr(x, chart, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    if symmetric:
        for i in range(n):
            for j in range(i):
                if out[i][j] != out[j][i]:
                    raise ConfigError(where, f"not symmetric: entry [{i}][{j}] = {out[i][j]!r} but [{j}][{i}] = {out[j][i]!r}")
    return out


def _gamma(d, where: str) -> dict:
    if d is None:
        d = {}
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object of Christoffel symbols")
    out = {}
    for k, v in d.items():
        if k not in affine.GAMMA_KEYS:
            raise ConfigError(f"{where}.{k}", f"unknown Christoffel symbol; use one of {list(affine.GAMMA_KEYS)}")
        out[k] = _expr(v, affine.SURFACE_CHART, f"{where}.{k}")
    return out


def _geometry(g) -> dict:
    if not isinstance(g, dict):
        raise ConfigError("geometry", "expected an object")
    kind = _require(g, "kind", "geometry")
    if kind not in KINDS:
        raise ConfigError("geometry.kind", f"unknown kind {kind!r}; use one of {list(KINDS)}")
    w = geom.walker_chart()
    out: dict = {"kind": kind}
    if kind == "warped":
        out["phi"] = _expr(_require(g, "phi", "geometry"), geom.T_CHART, "geometry.phi")
        eps = g.get("epsilon", 1)
        if eps not in (1, -1) or isinstance(eps, bool):
            raise ConfigError("geometry.epsilon", "must be +1 or -1")
        out["epsilon"] = int(eps)
        out["c_N"] = _number(g.get("c_N", 0.0), "geometry.c_N")
        iv = _require(g, "interval", "geometry")
        if not isinstance(iv, list) or len(iv) != 2:
            raise ConfigError("geometry.interval", "expected [t0, t1]")
        a, b = _number(iv[0], "geometry.interval[0]"), _number(iv[1], "geometry.interval[1]")
        if not a < b:
            raise ConfigError("geometry.interval", "need t0 < t1")
        out["interval"] = [a, b]
        spec = geom.WarpedProductSpec.create(out["phi"], out["epsilon"], out["c_N"], (a, b))
        try:
            spec.check_positive(np.linspace(a, b, 65))
        except (GeometryError, ex.ExprError) as err:
            raise ConfigError("geometry.phi", str(err)) from None
    elif kind == "walker":
        out["a"] = _matrix(_require(g, "a", "geometry"), 2, w, "geometry.a", symmetric=True)
    elif kind == "extension":
        out["gamma"] = _gamma(g.get("gamma"), "geometry.gamma")
        for key in ("Phi", "T", "S"):
            if g.get(key) is not None:
                out[key] = _matrix(g[key], 2, w, f"geometry.{key}", symmetric=(key == "Phi"))
        if g.get("X") is not None:
            X = g["X"]
            if not isinstance(X, list) or len(X) != 2:
                raise ConfigError("geometry.X", "expected two components")
            out["X"] = [_expr(x, w, f"geometry.X[{i}]") for i, x in enumerate(X)]
    elif kind == "soliton-from-affine":
        out["gamma"] = _gamma(g.get("gamma"), "geometry.gamma")
        out["fhat"] = _expr(g.get("fhat", "0"), affine.SURFACE_CHART, "geometry.fhat")
        C = _number(g.get("C", 1.0), "geometry.C")
        if C == 0:
            raise ConfigError("geometry.C", "must be nonzero")
        out["C"] = C
    else:
        names = _require(g, "coordinates", "geometry")
        if not isinstance(names, list) or len(names) < 2 or not all(isinstance(s, str) and s.isidentifier() for s in names):
            raise ConfigError("geometry.coordinates", "expected a list of at least two identifiers")
        if len(set(names)) != len(names):
            raise ConfigError("geometry.coordinates", "duplicate coordinate names")
        orient = g.get("orientation", 1)
        if orient not in (1, -1) or isinstance(orient, bool):
            raise ConfigError("geometry.orientation", "must be +1 or -1")
        out["coordinates"] = list(names)
        out["orientation"] = int(orient)
        out["metric"] = _matrix(_require(g, "metric", "geometry"), len(names), Chart(tuple(names)), "geometry.metric", symmetric=True)
    unknown = set(g) - set(out) - {"kind"}
    if unknown:
        raise ConfigError("geometry", f"unexpected field(s) {sorted(unknown)} for kind {kind!r}")
    return out


def _chart_for(geometry: dict) -> Chart:
    kind = geometry["kind"]
    if kind == "warped":
        return Chart(geom.WARPED_NAMES, kind="warped")
    if kind == "raw-metric":
        return Chart(tuple(geometry["coordinates"]), orientation=geometry["orientation"])
    return geom.walker_chart()


def _sampling(s, dim: int) -> SamplingConfig:
    if not isinstance(s, dict):
        raise ConfigError("sampling", "expected an object")
    mode = s.get("mode", "random")
    if mode == "random":
        count = _integer(s.get("count", 20), "sampling.count", 1)
        seed = s.get("seed")
        if seed is not None:
            seed = _integer(seed, "sampling.seed", 0)
        box = _require(s, "box", "sampling")
        if not isinstance(box, list) or len(box) != dim or any(not isinstance(r, list) or len(r) != 2 for r in box):
            raise ConfigError("sampling.box", f"expected {dim} [lo, hi] pairs")
        box = [[_number(a, f"sampling.box[{i}]"), _number(b, f"sampling.box[{i}]")] for i, (a, b) in enumerate(box)]
        if any(a > b for a, b in box):
            raise ConfigError("sampling.box", "need lo <= hi on every axis")
        return SamplingConfig("random", count, seed, box)
    if mode == "grid":
        axes = _require(s, "axes", "sampling")
        if not isinstance(axes, list) or len(axes) != dim or any(not isinstance(r, list) or len(r) != 3 for r in axes):
            raise ConfigError("sampling.axes", f"expected {dim} [lo, hi, n] triples")
        axes = [
            [_number(a, f"sampling.axes[{i}]"), _number(b, f"sampling.axes[{i}]"), _integer(n, f"sampling.axes[{i}]", 1)]
            for i, (a, b, n) in enumerate(axes)
        ]
        return SamplingConfig("grid", axes=axes)
    raise ConfigError("sampling.mode", f"unknown mode {mode!r}; use 'random' or 'grid'")


def parse_job(d, samples: int | None = None, seed: int | None = None, tolerance_scale: float | None = None) -> JobConfig:
    """Validate a raw job object, applying command-line overrides."""
    if not isinstance(d, dict):
        raise ConfigError("job", "expected an object")
    d = copy.deepcopy(d)
    known = {"name", "provenance", "geometry", "potential", "ode", "sampling", "checks", "tolerances", "tolerance_scale", "kappa", "mu"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError("job", f"unexpected field(s) {sorted(unknown)}")
    name = d.get("name", "job")
    if not isinstance(name, str):
        raise ConfigError("name", "expected a string")
    geometry = _geometry(_require(d, "geometry", ""))
    kind = geometry["kind"]
    chart = _chart_for(geometry)

    potential = d.get("potential")
    if potential is not None:
        if kind in ("warped", "soliton-from-affine"):
            raise ConfigError("potential", f"the potential is derived for kind {kind!r}; remove this field")
        if not isinstance(potential, dict) or set(potential) != {"f", "lambda"}:
            raise ConfigError("potential", "expected {\"f\": ..., \"lambda\": ...}")
        potential = {k: _expr(potential[k], chart, f"potential.{k}") for k in ("f", "lambda")}

    ode_cfg = None
    if kind == "warped":
        o = d.get("ode") or {}
        if not isinstance(o, dict):
            raise ConfigError("ode", "expected an object")
        ode_cfg = {
            "f0": _number(o.get("f0", 0.0), "ode.f0"),
            "df0": _number(o.get("df0", 0.0), "ode.df0"),
            "steps": _integer(o.get("steps", 200), "ode.steps", ode.MIN_STEPS),
        }
    elif d.get("ode") is not None:
        raise ConfigError("ode", "only used by kind 'warped'")

    checks = d.get("checks", DEFAULT_CHECKS[kind])
    if not isinstance(checks, list) or not checks:
        raise ConfigError("checks", "expected a non-empty list")
    for c in checks:
        if c not in soliton.CHECKS:
            raise ConfigError("checks", f"unknown check {c!r}; use any of {list(soliton.CHECKS)}")
    if "ode-verify" in checks and kind != "warped":
        raise ConfigError("checks", "'ode-verify' needs kind 'warped'")
    has_potential = kind in ("warped", "soliton-from-affine") or potential is not None
    needs = sorted(soliton.POTENTIAL_CHECKS & set(checks))
    if needs and not has_potential:
        raise ConfigError("potential", f"checks {needs} need a potential and soliton function")
    if chart.dim != 4 and DIM4_CHECKS & set(checks):
        raise ConfigError("checks", f"{sorted(DIM4_CHECKS & set(checks))} need a four-dimensional chart")

    tol = d.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances", "expected an object")
    for k, v in tol.items():
        if k not in soliton.DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerances.{k}", f"unknown check record; use any of {sorted(soliton.DEFAULT_TOLERANCES)}")
        if _number(v, f"tolerances.{k}") <= 0:
            raise ConfigError(f"tolerances.{k}", "must be positive")
    tol = {k: float(v) for k, v in tol.items()}

    scale = _number(d.get("tolerance_scale", 1.0), "tolerance_scale")
    if tolerance_scale is not None:
        scale = _number(tolerance_scale, "--tolerance-scale")
    if scale <= 0:
        raise ConfigError("tolerance_scale", "must be positive")

    sampling_cfg = _sampling(_require(d, "sampling", ""), chart.dim)
    if samples is not None:
        if sampling_cfg.mode != "random":
            raise ConfigError("--samples", "only applies to random sampling")
        sampling_cfg.count = _integer(samples, "--samples", 1)
    if seed is not None:
        if sampling_cfg.mode != "random":
            raise ConfigError("--seed", "only applies to random sampling")
        sampling_cfg.seed = _integer(seed, "--seed", 0)
    if sampling_cfg.mode == "random" and sampling_cfg.seed is None:
        raise ConfigError("sampling.seed", "random sampling needs a seed (or pass --seed)")
    if kind == "warped":
        t0, t1 = geometry["interval"]
        lo, hi = (sampling_cfg.box[0] if sampling_cfg.mode == "random" else sampling_cfg.axes[0][:2])
        if lo < t0 or hi > t1:
            raise ConfigError("sampling", f"t-range [{lo}, {hi}] leaves the interval [{t0}, {t1}]")

    provenance = d.get("provenance", "")
    if not isinstance(provenance, str):
        raise ConfigError("provenance", "expected a string")
    return JobConfig(
        name=name,
        geometry=geometry,
        sampling=sampling_cfg,
        checks=list(checks),
        provenance=provenance,
        potential=potential,
        ode=ode_cfg,
        tolerances=tol,
        tolerance_scale=scale,
        kappa=_number(d.get("kappa", 0.25), "kappa"),
        mu=_number(d.get("mu", 0.0), "mu"),
    )


# ---------------------------------------------------------------------------
# Construction and execution
# ---------------------------------------------------------------------------


@dataclass
class BuiltJob:
    config: JobConfig
    metric: MetricField
    f: object = None
    lam: object = None
    solution: ode.PotentialSolution | None = None
    surface: affine.AffineSurface | None = None
    accept: object = None


def build(job: JobConfig) -> BuiltJob:
    g = job.geometry
    kind = job.kind
    if kind == "warped":
        spec = geom.WarpedProductSpec.create(g["phi"], g["epsilon"], g["c_N"], tuple(g["interval"]))
        metric = geom.warped_metric(spec)
        sol = ode.solve_potential(spec, job.ode["f0"], job.ode["df0"], steps=job.ode["steps"])
        return BuiltJob(
            job,
            metric,
            sol.potential_field(metric.chart),
            sol.lambda_field(metric.chart),
            solution=sol,
            accept=lambda p: geom.fiber_admissible(spec, p[1:]),
        )
    if kind == "soliton-from-affine":
        D = affine.AffineSurface.from_symbols(g["gamma"], g["fhat"], g["C"])
        s = geom.soliton_from_affine(D)
        return BuiltJob(job, s.metric, s.potential, s.soliton_function, surface=s.spec.D)
    if kind == "walker":
        metric = geom.walker_metric(g["a"])
    elif kind == "extension":
        D = affine.AffineSurface.from_symbols(g["gamma"])
        metric = geom.modified_extension(geom.ExtensionSpec(D, g.get("Phi"), g.get("T"), g.get("S"), g.get("X")))
    else:
        chart = Chart(tuple(g["coordinates"]), orientation=g["orientation"])
        metric = MetricField.from_strings(chart, g["metric"])
    f = lam = None
    if job.potential is not None:
        f = ScalarField.parse(job.potential["f"], metric.chart)
        lam = ScalarField.parse(job.potential["lambda"], metric.chart)
    return BuiltJob(job, metric, f, lam)


def sample(built: BuiltJob) -> np.ndarray:
    s = built.config.sampling
    if s.mode == "random":
        return sampling.random_points(s.box, s.count, s.seed, built.metric, built.accept)
    pts = sampling.grid_points(s.axes, built.metric, built.accept)
    if len(pts) == 0:
        raise ConfigError("sampling.axes", "every grid point is degenerate")
    return pts


def _ode_records(report: soliton.SolitonReport, sol: ode.PotentialSolution, tol: dict, seed) -> None:
    nodes = float(sol.node_residuals().max())
    defect = np.abs(sol.defect())
    n = len(sol.t)
    report.checks.append(soliton.CheckRecord("ode-node-residual", nodes, nodes, tol["ode-node-residual"], n, seed))
    report.checks.append(
        soliton.CheckRecord("ode-defect", float(defect.max()), float(defect.mean()), tol["ode-defect"], len(defect), seed)
    )
    report.reported.append({"name": "ode-error-estimate", "max": sol.error_estimate, "mean": sol.error_estimate})
    spread = float(sol.lam.max() - sol.lam.min())
    report.witnesses["lambda-range"] = [float(sol.lam.min()), float(sol.lam.max())]
    report.witnesses["lambda-nonconstant"] = bool(spread > 1e-8)
    report.witnesses["integrator"] = sol.summary()


def _affine_records(report: soliton.SolitonReport, D: affine.AffineSurface, points) -> None:
    res = [float(np.abs(affine.affine_soliton_residual(D, None, p[:2])).max()) for p in points]
    phi = [float(np.abs(affine.phi_from_fhat(D, None, None, p[:2])).max()) for p in points]
    report.reported.append({"name": "affine-soliton-residual", "max": max(res), "mean": float(np.mean(res))})
    report.reported.append({"name": "phi-norm", "max": max(phi), "mean": float(np.mean(phi))})


def run_job(job: JobConfig) -> tuple:
    """Build, sample and verify one job; returns ``(json_record, report)``."""
    try:
        built = build(job)
        points = sample(built)
        tol = job.resolved_tolerances()
        checks = [c for c in job.checks if c != "ode-verify"]
        seed = job.sampling.seed if job.sampling.mode == "random" else None
        report = soliton.verify(
            built.metric,
            built.f,
            built.lam,
            points,
            checks=checks,
            tolerances=tol,
            kappa=job.kappa,
            mu=job.mu,
            seed=seed,
            provenance=job.provenance,
            samples=dict(job.sampling.to_dict(), count=len(points)),
        )
        if "ode-verify" in job.checks:
            _ode_records(report, built.solution, tol, seed)
        if built.surface is not None:
            _affine_records(report, built.surface, points)
    except ConfigError:
        raise
    except (ex.ExprError, GeometryError, ode.IntegrationError, ValueError) as err:
        raise JobError(f"job {job.name!r}: {err}") from err
    out = report.to_dict()
    out["name"] = job.name
    out["config"] = job.to_dict()
    return out, report
