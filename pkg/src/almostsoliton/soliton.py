"""Verification of the almost soliton equation ``Hes_f + rho = lambda g`` and
of the identities it implies, pointwise and aggregated over sample sets."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import duality
from .tensor import CurvaturePoint, MetricField, as_field, curvature_at, curvature_symmetry_residuals

# third-derivative identities get the looser default
DEFAULT_TOLERANCES = {
    "curvature-symmetries": 1e-9,
    "weyl-minus": 1e-8,
    "weyl-norm": 1e-7,
    "cotton-divweyl": 1e-6,
    "soliton-residual": 1e-7,
    "lemma21-1": 1e-7,
    "lemma21-2": 1e-7,
    "lemma21-4": 1e-7,
    "lemma21-5": 1e-6,
    "lemma22": 1e-6,
    "kappa-einstein": 1e-7,
    "isotropy": 1e-12,
    "ode-node-residual": 1e-9,
    "ode-defect": 1e-6,
}

CHECKS = (
    "curvature-symmetries",
    "weyl-split",
    "weyl-norm",
    "cotton-divweyl",
    "soliton-residual",
    "lemma21",
    "lemma22",
    "kappa-einstein",
    "isotropy",
    "ode-verify",
)

POTENTIAL_CHECKS = {"soliton-residual", "lemma21", "lemma22", "kappa-einstein", "isotropy"}


def _setup(g: MetricField, f, p):
    cp = g if isinstance(g, CurvaturePoint) else curvature_at(g, p)
    fc = as_field(f, cp.chart).coeffs(cp.point, 3)
    return cp, fc


def _lam(cp: CurvaturePoint, lam):
    c = as_field(lam, cp.chart).coeffs(cp.point, 3)
    return float(c[0]), cp.basis.gradient(c)[..., 0]


def residual(g: MetricField, f, lam, p=None) -> np.ndarray:
    """``Hes_f + rho - lambda g`` at ``p``."""
    cp, fc = _setup(g, f, p)
    lval, _ = _lam(cp, lam)
    return cp.hessian(fc) + cp.ricci - lval * cp.g


def infer_lambda(g: MetricField, f, p=None) -> float:
    """The trace part ``(Lap f + tau) / n``."""
    cp, fc = _setup(g, f, p)
    return (cp.laplacian(fc) + cp.scalar) / cp.chart.dim


def isotropy(g: MetricField, f, p=None) -> float:
    """``g(grad f, grad f)``."""
    cp, fc = _setup(g, f, p)
    df = cp.df(fc)
    return float(df @ cp.ginv @ df)


def kappa_einstein_check(g: MetricField, f, kappa: float, mu: float, p=None) -> np.ndarray:
    """``Hes_f + rho - (kappa tau + mu) g``."""
    cp, fc = _setup(g, f, p)
    return cp.hessian(fc) + cp.ricci - (kappa * cp.scalar + mu) * cp.g


def check_lemma21(g: MetricField, f, lam, p=None) -> dict:
    """Max-abs residuals of the five trace/divergence identities.

    Keys ``1``..``5``; vector identities are compared as one-forms and the
    curvature identity over all coordinate triples.
    """
    cp, fc = _setup(g, f, p)
    n = cp.chart.dim
    b = cp.basis
    lval, dlam = _lam(cp, lam)
    lap = cp.laplacian_jet(fc)
    dlap = b.gradient(lap)[..., 0]
    tau, dtau = cp.scalar, cp.dscalar
    df = cp.df(fc)
    grad = cp.ginv @ df
    ric_grad = cp.ricci @ grad
    g0 = cp.g
    r1 = lap[0] + tau - n * lval
    r2 = dlap + dtau - n * dlam
    r3 = dlap + ric_grad + 0.5 * dtau - dlam
    r4 = dtau - 2 * ric_grad - 2 * (n - 1) * dlam
    nr = cp.nabla_ricci
    lhs = np.einsum("xyzw,w->xyz", cp.riemann, grad)
    rhs = (
        np.einsum("x,yz->xyz", dlam, g0)
        - np.einsum("y,xz->xyz", dlam, g0)
        - nr
        + nr.transpose(1, 0, 2)
    )
    r5 = lhs - rhs
    return {k: float(np.abs(v).max()) for k, v in zip((1, 2, 3, 4, 5), (r1, r2, r3, r4, r5))}


def lemma22_sides(g: MetricField, f, p=None) -> tuple:
    """``(W(X,Y,Z,grad f), right-hand side)`` over coordinate triples."""
    cp, fc = _setup(g, f, p)
    cp.require_dim4()
    n = cp.chart.dim
    df = cp.df(fc)
    grad = cp.ginv @ df
    rho_f = cp.ricci @ grad
    g0, rho, tau = cp.g, cp.ricci, cp.scalar
    lhs = np.einsum("xyzw,w->xyz", cp.weyl, grad)
    rhs = (
        -cp.cotton
        + tau / ((n - 1) * (n - 2)) * (np.einsum("xz,y->xyz", g0, df) - np.einsum("x,yz->xyz", df, g0))
        + 1.0 / (n - 2) * (np.einsum("yz,x->xyz", rho, df) - np.einsum("xz,y->xyz", rho, df))
        + 1.0 / ((n - 1) * (n - 2)) * (np.einsum("x,yz->xyz", rho_f, g0) - np.einsum("y,xz->xyz", rho_f, g0))
    )
    return lhs, rhs


def check_lemma22(g: MetricField, f, p=None) -> float:
    lhs, rhs = lemma22_sides(g, f, p)
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class CheckRecord:
    name: str
    max: float
    mean: float
    tolerance: float
    n_samples: int
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return bool(self.max <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max": self.max,
            "mean": self.mean,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


@dataclass
class SolitonReport:
    checks: list = field(default_factory=list)
    reported: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    provenance: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "samples": self.samples,
            "checks": [c.to_dict() for c in self.checks],
            "reported": self.reported,
            "witnesses": self.witnesses,
            "pass": self.passed,
        }

    def lines(self) -> list:
        out = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            out.append(f"{flag}  {c.name:<22} max={c.max:.3e}  tol={c.tolerance:.1e}  n={c.n_samples}")
        for r in self.reported:
            out.append(f"INFO  {r['name']:<22} max={r['max']:.3e}  (reported only)")
        for k, v in self.witnesses.items():
            out.append(f"INFO  {k:<22} {v}")
        return out


def _pointwise(cp: CurvaturePoint, f, lam, checks, kappa: float, mu: float) -> dict:
    out = {}
    if "curvature-symmetries" in checks:
        out["curvature-symmetries"] = max(curvature_symmetry_residuals(cp).values())
    if "weyl-split" in checks:
        wp, wm = duality.weyl_split_norms(cp)
        out["weyl-minus"] = wm
        out["~weyl-plus"] = wp
    if "weyl-norm" in checks:
        cp.require_dim4()
        out["weyl-norm"] = float(np.abs(cp.weyl).max())
    if "cotton-divweyl" in checks:
        cp.require_dim4()
        out["cotton-divweyl"] = float(np.abs(cp.cotton + 2 * cp.div_weyl).max())
    if "soliton-residual" in checks:
        out["soliton-residual"] = float(np.abs(residual(cp, f, lam)).max())
        out["~lambda-inferred-gap"] = abs(infer_lambda(cp, f) - _lam(cp, lam)[0])
    if "lemma21" in checks:
        r = check_lemma21(cp, f, lam)
        for k in (1, 2, 4, 5):
            out[f"lemma21-{k}"] = r[k]
        out["~lemma21-3"] = r[3]
    if "lemma22" in checks:
        out["lemma22"] = check_lemma22(cp, f)
    if "kappa-einstein" in checks:
        out["kappa-einstein"] = float(np.abs(kappa_einstein_check(cp, f, kappa, mu)).max())
    if "isotropy" in checks:
        out["isotropy"] = abs(isotropy(cp, f))
    return out


def verify(
    metric: MetricField,
    f,
    lam,
    points,
    checks=("soliton-residual",),
    tolerances=None,
    kappa: float = 0.25,
    mu: float = 0.0,
    seed: int | None = None,
    provenance: str = "",
    samples: dict | None = None,
) -> SolitonReport:
    """Evaluate the requested checks at every point and aggregate.

    Quantities whose key starts with ``~`` are reported, never gated.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown check(s): {sorted(unknown)}")
    if (f is None or lam is None) and POTENTIAL_CHECKS & set(checks):
        raise ValueError("potential checks need both a potential and a soliton function")
    if f is not None:
        f = as_field(f, metric.chart)
        lam = as_field(lam, metric.chart)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values: dict = {}
    for p in points:
        cp = curvature_at(metric, p)
        for k, v in _pointwise(cp, f, lam, checks, kappa, mu).items():
            values.setdefault(k, []).append(v)

    report = SolitonReport(provenance=provenance)
    report.samples = dict(samples or {"count": len(points), "seed": seed})
    n = len(points)
    for k, vs in values.items():
        vs = np.asarray(vs, dtype=float)
        if k.startswith("~"):
            report.reported.append({"name": k[1:], "max": float(vs.max()), "mean": float(vs.mean())})
        else:
            report.checks.append(CheckRecord(k, float(vs.max()), float(vs.mean()), float(tol[k]), n, seed))
    if "weyl-split" in checks:
        wp = next(r["max"] for r in report.reported if r["name"] == "weyl-plus")
        report.witnesses["weyl-plus-nonzero"] = bool(wp > 1e-3)
    return report
