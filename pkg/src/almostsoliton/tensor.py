"""Pointwise coordinate tensor calculus.

Curvature follows the sign convention R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y],
which is minus the usual one; with Ricci defined as
rho(X,Y) = tr{Z -> R(X,Z)Y} the round sphere still has positive Ricci
curvature, and rho, tau, W and C keep their standard values.

Index layouts of the arrays on :class:`CurvaturePoint`:

============  =====================================
christoffel   ``[k, i, j]`` = Gamma^k_ij
riemann       ``[i, j, k, l]`` = R(d_i, d_j, d_k, d_l) = g(R(d_i,d_j)d_k, d_l)
ricci         ``[i, j]``
weyl          ``[i, j, k, l]``
cotton        ``[i, j, k]`` = C(d_i, d_j, d_k)
nabla_ricci   ``[k, i, j]`` = (nabla_k rho)_ij
nabla_weyl    ``[m, i, j, k, l]``
div_weyl      ``[i, j, k]``
============  =====================================

Everything is obtained from the order-3 Taylor jet of the metric; each
derived quantity is carried as a jet as long as its derivatives are needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expr as ex
from .jets import Jet3, JetBasis, basis

DET_TOL = 1e-12


class GeometryError(ValueError):
    pass


class SingularMetricError(GeometryError):
    pass


class DimensionError(GeometryError):
    pass


@dataclass(frozen=True)
class Chart:
    names: tuple
    orientation: int = 1
    kind: str = "generic"

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate coordinate names in {self.names}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def dim(self) -> int:
        return len(self.names)


# ---------------------------------------------------------------------------
# Scalar fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarField:
    """A parsed expression bound to a chart."""

    expr: ex.Expr
    chart: Chart

    @classmethod
    def parse(cls, src: str, chart: Chart) -> "ScalarField":
        return cls(ex.parse(src, chart), chart)

    def coeffs(self, point, order: int = 3) -> np.ndarray:
        return ex.eval_coeffs(self.expr, self.chart.names, point, order)

    def jet(self, point, order: int = 3) -> Jet3:
        return Jet3(basis(self.chart.dim, order), self.coeffs(point, order))

    def __call__(self, point) -> float:
        return float(self.coeffs(point, 0)[0])

    def __str__(self) -> str:
        return ex.to_string(self.expr)


class JetField:
    """A scalar field given directly by a jet-producing function."""

    def __init__(self, chart: Chart, fn: Callable, label: str = "<numeric>"):
        self.chart = chart
        self._fn = fn
        self.label = label

    def coeffs(self, point, order: int = 3) -> np.ndarray:
        return self._fn(np.asarray(point, dtype=float), order)

    def jet(self, point, order: int = 3) -> Jet3:
        return Jet3(basis(self.chart.dim, order), self.coeffs(point, order))

    def __call__(self, point) -> float:
        return float(self.coeffs(point, 0)[0])

    def __str__(self) -> str:
        return self.label


def as_field(f, chart: Chart):
    if isinstance(f, (ScalarField, JetField)):
        return f
    if isinstance(f, str):
        return ScalarField.parse(f, chart)
    if isinstance(f, ex.Expr):
        return ScalarField(f, chart)
    if isinstance(f, (int, float)):
        return ScalarField(ex.num(f), chart)
    raise TypeError(f"cannot use {type(f).__name__} as a scalar field")


# ---------------------------------------------------------------------------
# Metric fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricField:
    chart: Chart
    g: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.chart.dim
        rows = tuple(tuple(ex.as_expr(x) for x in row) for row in self.g)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionError(f"metric must be {n}x{n}")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise GeometryError(f"metric component ({i},{j}) differs from ({j},{i})")
        object.__setattr__(self, "g", rows)

    @classmethod
    def from_strings(cls, chart: Chart, rows: Sequence[Sequence[str]]) -> "MetricField":
        return cls(chart, tuple(tuple(ex.parse(str(s), chart) for s in row) for row in rows))

    @property
    def dim(self) -> int:
        return self.chart.dim

    def coeffs(self, point, order: int = 3) -> np.ndarray:
        n = self.dim
        b = basis(n, order)
        out = np.empty((n, n, b.size))
        for i in range(n):
            for j in range(i, n):
                c = ex.eval_coeffs(self.g[i][j], self.chart.names, point, order)
                out[i, j] = c
                out[j, i] = c
        return out

    def value(self, point) -> np.ndarray:
        return self.coeffs(point, 0)[..., 0]

    def strings(self) -> list:
        return [[ex.to_string(x) for x in row] for row in self.g]


def curvature_at(metric: MetricField, point) -> "CurvaturePoint":
    key = tuple(float(x) for x in point)
    cache = metric._cache
    cp = cache.get(key)
    if cp is None:
        if len(cache) > 512:
            cache.clear()
        cp = CurvaturePoint.compute(metric, key)
        cache[key] = cp
    return cp


def _values(a: np.ndarray) -> np.ndarray:
    return a[..., 0]


class CurvaturePoint:
    """All pointwise curvature data of a metric at one point."""

    def __init__(self, metric: MetricField, point):
        self.metric = metric
        self.chart = metric.chart
        self.point = np.asarray(point, dtype=float)

    @classmethod
    def compute(cls, metric: MetricField, point) -> "CurvaturePoint":
        self = cls(metric, point)
        n = metric.dim
        b = basis(n, 3)
        self.basis = b
        G = metric.coeffs(self.point, 3)
        g0 = G[..., 0]
        det = float(np.linalg.det(g0))
        if not np.isfinite(det) or abs(det) < DET_TOL:
            raise SingularMetricError(f"|det g| = {abs(det):.3e} below {DET_TOL} at {tuple(self.point)}")
        self.det = det
        Ginv = b.matinv(G)
        dG = b.gradient(G)  # [k, i, j] = d_k g_ij
        low = 0.5 * (
            np.einsum("ijlP->lijP", dG) + np.einsum("jilP->lijP", dG) - dG
        )  # [l, i, j] = Gamma_{l, ij}
        Gamma = b.contract("kl,lij->kij", Ginv, low)
        dGamma = b.gradient(Gamma)  # [m, k, i, j]
        # standard-sign Riemann R^l_{kij}
        Rstd = (
            np.einsum("iljkP->lkijP", dGamma)
            - np.einsum("jlikP->lkijP", dGamma)
            + b.contract("lim,mjk->lkij", Gamma, Gamma)
            - b.contract("ljm,mik->lkij", Gamma, Gamma)
        )
        Rm = -b.contract("lm,mkij->ijkl", G, Rstd)
        ricci = np.einsum("jkjiP->ikP", Rstd)
        scal = b.contract("ik,ik->", Ginv, ricci)

        self._G, self._Ginv, self._Gamma, self._ricci, self._scalar = G, Ginv, Gamma, ricci, scal
        self.g = g0
        self.ginv = _values(Ginv)
        self.dg = b.partials_tensor(G, 1)
        self.d2g = b.partials_tensor(G, 2)
        self.d3g = b.partials_tensor(G, 3)
        self.christoffel = _values(Gamma)
        self.riemann = _values(Rm)
        self.ricci = _values(ricci)
        self.scalar = float(scal[0])
        self.dscalar = _values(b.gradient(scal))

        Gam = self.christoffel
        drho = _values(b.gradient(ricci))  # [k, i, j]
        rho = self.ricci
        self.nabla_ricci = (
            drho - np.einsum("lki,lj->kij", Gam, rho) - np.einsum("lkj,il->kij", Gam, rho)
        )
        nr = self.nabla_ricci
        dtau = self.dscalar
        self.cotton = (
            nr
            - nr.transpose(1, 0, 2)
            - (np.einsum("x,yz->xyz", dtau, g0) - np.einsum("y,xz->xyz", dtau, g0)) / (2 * n - 2)
        )

        self.weyl = None
        self.nabla_weyl = None
        self.div_weyl = None
        if n >= 3:
            gg = b.contract("xz,yt->xyzt", G, G) - b.contract("xt,yz->xyzt", G, G)
            rg = (
                b.contract("xt,yz->xyzt", ricci, G)
                - b.contract("xz,yt->xyzt", ricci, G)
                + b.contract("yz,xt->xyzt", ricci, G)
                - b.contract("yt,xz->xyzt", ricci, G)
            )
            W = Rm + b.contract(",xyzt->xyzt", scal, gg) / ((n - 1) * (n - 2)) + rg / (n - 2)
            self._weyl = W
            self.weyl = _values(W)
            Wv = self.weyl
            dW = _values(b.gradient(W))
            self.nabla_weyl = (
                dW
                - np.einsum("ema,ebcd->mabcd", Gam, Wv)
                - np.einsum("emb,aecd->mabcd", Gam, Wv)
                - np.einsum("emc,abed->mabcd", Gam, Wv)
                - np.einsum("emd,abce->mabcd", Gam, Wv)
            )
            # (div W)(X,Y,Z) = sum_a (nabla_{e_a} W)(X,Y,Z,e_a); contracting the
            # first slot instead flips the sign of C = -2 div W
            self.div_weyl = np.einsum("md,mabcd->abc", self.ginv, self.nabla_weyl)
        return self

    # -- potential-dependent quantities ------------------------------------
    def _fcoeffs(self, f) -> np.ndarray:
        if isinstance(f, Jet3):
            return f.coeffs
        if isinstance(f, np.ndarray):
            return f
        return as_field(f, self.chart).coeffs(self.point, 3)

    def hessian_jet(self, f) -> np.ndarray:
        """Hes_f as a jet (valid to order 1)."""
        b = self.basis
        fc = self._fcoeffs(f)
        df = b.gradient(fc)
        ddf = b.gradient(df)
        return ddf - b.contract("kij,k->ij", self._Gamma, df)

    def hessian(self, f) -> np.ndarray:
        return _values(self.hessian_jet(f))

    def df(self, f) -> np.ndarray:
        return _values(self.basis.gradient(self._fcoeffs(f)))

    def gradient(self, f) -> np.ndarray:
        return self.ginv @ self.df(f)

    def laplacian_jet(self, f) -> np.ndarray:
        return self.basis.contract("ij,ij->", self._Ginv, self.hessian_jet(f))

    def laplacian(self, f) -> float:
        return float(self.laplacian_jet(f)[0])

    def require_dim4(self):
        if self.chart.dim != 4 or self.weyl is None:
            raise DimensionError(f"Weyl operations need dimension 4, chart has {self.chart.dim}")


# ---------------------------------------------------------------------------
# Functional API
# ---------------------------------------------------------------------------


def christoffel(g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).christoffel


def riemann(g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).riemann


def ricci(g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).ricci


def scalar(g: MetricField, p) -> float:
    return curvature_at(g, p).scalar


def hessian(f, g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).hessian(f)


def gradient(f, g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).gradient(f)


def laplacian(f, g: MetricField, p) -> float:
    return curvature_at(g, p).laplacian(f)


def weyl(g: MetricField, p) -> np.ndarray:
    cp = curvature_at(g, p)
    cp.require_dim4()
    return cp.weyl


def cotton(g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).cotton


def div_weyl(g: MetricField, p) -> np.ndarray:
    cp = curvature_at(g, p)
    cp.require_dim4()
    return cp.div_weyl


def cov_deriv_ricci(g: MetricField, p) -> np.ndarray:
    return curvature_at(g, p).nabla_ricci


def curvature_symmetry_residuals(cp: CurvaturePoint) -> dict:
    """Max-abs defects of the algebraic identities at one point."""
    R = cp.riemann
    out = {
        "riemann-antisym-12": np.abs(R + R.transpose(1, 0, 2, 3)).max(),
        "riemann-antisym-34": np.abs(R + R.transpose(0, 1, 3, 2)).max(),
        "riemann-pair": np.abs(R - R.transpose(2, 3, 0, 1)).max(),
        "bianchi-1": np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max(),
        "ricci-sym": np.abs(cp.ricci - cp.ricci.T).max(),
        "cotton-antisym": np.abs(cp.cotton + cp.cotton.transpose(1, 0, 2)).max(),
    }
    if cp.weyl is not None:
        out["weyl-trace"] = np.abs(np.einsum("ik,ijkl->jl", cp.ginv, cp.weyl)).max()
    return {k: float(v) for k, v in out.items()}
