"""Metric constructors: space forms, warped products, Walker metrics,
(modified) Riemannian extensions, and isotropic almost solitons built from
an affine surface."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import affine
from . import expr as ex
from .affine import AffineSurface
from .tensor import Chart, GeometryError, MetricField, ScalarField

WALKER_NAMES = ("x1", "x2", "x1p", "x2p")
WARPED_NAMES = ("t", "y1", "y2", "y3")
T_CHART = Chart(("t",))


def walker_chart(names: Sequence[str] = WALKER_NAMES) -> Chart:
    # in the ordering (x1, x2, x1', x2') the form dual to d/dx1' ^ d/dx2'
    # is dx1 ^ dx2, self-dual for the chart orientation +1
    return Chart(tuple(names), orientation=1, kind="walker")


def _expr(x, chart) -> ex.Expr:
    if isinstance(x, ex.Expr):
        return x
    if isinstance(x, (int, float)):
        return ex.num(x)
    return ex.parse(str(x), chart)


def _square(rows, chart, n=2) -> list:
    if rows is None:
        return [[ex.ZERO] * n for _ in range(n)]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise GeometryError(f"expected a {n}x{n} array")
    return [[_expr(x, chart) for x in row] for row in rows]


# ---------------------------------------------------------------------------
# Space forms and warped products
# ---------------------------------------------------------------------------


def conformal_factor(c: float, names: Sequence[str]) -> ex.Expr:
    """``(1 + c r^2/4)^-2`` over the given coordinate names."""
    r2 = ex.sum_exprs(ex.power(ex.var(n), 2) for n in names)
    return ex.power(ex.add(ex.ONE, ex.mul(ex.num(c / 4.0), r2)), -2)


def space_form_metric(c: float, names: Sequence[str] = ("x1", "x2", "x3", "x4")) -> MetricField:
    """Constant curvature ``c`` in the conformally flat chart ``(1 + c r^2/4)^-2 delta``."""
    chart = Chart(tuple(names))
    n = len(names)
    factor = conformal_factor(c, names)
    rows = [[factor if i == j else ex.ZERO for j in range(n)] for i in range(n)]
    return MetricField(chart, rows)


@dataclass(frozen=True)
class WarpedProductSpec:
    """``eps dt^2 + phi(t)^2 g_N`` with ``g_N`` of constant curvature ``c_N``."""

    phi: ex.Expr
    epsilon: int = 1
    c_N: float = 0.0
    interval: tuple = (0.0, 1.0)

    @classmethod
    def create(cls, phi, epsilon: int = 1, c_N: float = 0.0, interval=(0.0, 1.0)) -> "WarpedProductSpec":
        if epsilon not in (1, -1):
            raise GeometryError("epsilon must be +1 or -1")
        phi = phi if isinstance(phi, ex.Expr) else ex.parse(str(phi), T_CHART)
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise GeometryError(f"empty interval {interval}")
        return cls(phi, int(epsilon), float(c_N), (a, b))

    def phi_field(self) -> ScalarField:
        return ScalarField(self.phi, T_CHART)

    def check_positive(self, ts) -> None:
        f = self.phi_field()
        for t in np.atleast_1d(ts):
            if not f([float(t)]) > 0:
                raise GeometryError(f"warping function phi <= 0 at t = {float(t)!r}")


def warped_metric(spec: WarpedProductSpec, names: Sequence[str] = WARPED_NAMES) -> MetricField:
    chart = Chart(tuple(names), kind="warped")
    phi = ex.pullback(spec.phi, Chart((names[0],))) if names[0] != "t" else spec.phi
    fiber = ex.mul(ex.power(phi, 2), conformal_factor(spec.c_N, names[1:]))
    rows = [[ex.ZERO] * 4 for _ in range(4)]
    rows[0][0] = ex.num(spec.epsilon)
    for a in range(1, 4):
        rows[a][a] = fiber
    return MetricField(chart, rows)


def fiber_admissible(spec: WarpedProductSpec, y) -> bool:
    return 1.0 + spec.c_N * float(np.dot(y, y)) / 4.0 > 0


# ---------------------------------------------------------------------------
# Walker metrics and Riemannian extensions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkerSpec:
    a: tuple  # symmetric 2x2 of Expr


def walker_metric(spec: WalkerSpec | Sequence, chart: Chart | None = None) -> MetricField:
    """``2 dx^i o dx_i' + a_ij dx^i o dx^j`` on ``(x1, x2, x1', x2')``."""
    chart = chart or walker_chart()
    a = spec.a if isinstance(spec, WalkerSpec) else spec
    a = _square(a, chart)
    if a[0][1] != a[1][0]:
        raise GeometryError("a_ij must be symmetric")
    rows = [[ex.ZERO] * 4 for _ in range(4)]
    for i in range(2):
        rows[i][2 + i] = rows[2 + i][i] = ex.ONE
        for j in range(2):
            rows[i][j] = a[i][j]
    return MetricField(chart, rows)


@dataclass(frozen=True, eq=False)
class ExtensionSpec:
    """Data of ``iX(iId o iId) + iT o iS + g_D + pi*Phi``.

    ``T[r][i]`` is ``T^r_i`` (so ``T(d_i) = T^r_i d_r``), likewise ``S``.
    Unset ``Phi``, ``T``, ``S`` and ``X`` are zero.
    """

    D: AffineSurface
    Phi: tuple | None = None
    T: tuple | None = None
    S: tuple | None = None
    X: tuple | None = None


def modified_extension(spec: ExtensionSpec, chart: Chart | None = None) -> MetricField:
    chart = chart or walker_chart()
    xp = [ex.var(n) for n in chart.names[2:]]
    Phi = _square(spec.Phi, chart)
    if Phi[0][1] != Phi[1][0]:
        raise GeometryError("Phi must be symmetric")
    T = _square(spec.T, chart)
    S = _square(spec.S, chart)
    X = [ex.ZERO, ex.ZERO] if spec.X is None else [_expr(x, chart) for x in spec.X]
    if len(X) != 2:
        raise GeometryError("X must have two components")
    Gam = [[[ex.pullback(spec.D.gamma[k][i][j], chart) for j in range(2)] for i in range(2)] for k in range(2)]
    iX = ex.sum_exprs(ex.mul(X[l], xp[l]) for l in range(2))

    rows = [[ex.ZERO] * 4 for _ in range(4)]
    for i in range(2):
        rows[i][2 + i] = rows[2 + i][i] = ex.ONE
    for i in range(2):
        for j in range(i, 2):
            terms = []
            for r in range(2):
                for s in range(2):
                    ts = ex.add(ex.mul(T[r][i], S[s][j]), ex.mul(T[r][j], S[s][i]))
                    if ts != ex.ZERO:
                        terms.append(ex.mul(ex.mul(ex.num(0.5), ex.mul(xp[r], xp[s])), ts))
            for k in range(2):
                terms.append(ex.mul(ex.num(-2), ex.mul(xp[k], Gam[k][i][j])))
            terms.append(ex.pullback(Phi[i][j], chart))
            if iX != ex.ZERO:
                terms.append(ex.mul(iX, ex.mul(xp[i], xp[j])))
            rows[i][j] = rows[j][i] = ex.sum_exprs(terms)
    return MetricField(chart, rows)


def riemannian_extension(D: AffineSurface, Phi=None) -> MetricField:
    return modified_extension(ExtensionSpec(D, Phi=Phi))


@dataclass(frozen=True, eq=False)
class AffineSoliton:
    metric: MetricField
    potential: ScalarField
    soliton_function: ScalarField
    spec: ExtensionSpec


def soliton_from_affine(D: AffineSurface, fhat=None, C: float | None = None) -> AffineSoliton:
    """Isotropic almost soliton on the cotangent bundle of ``D``.

    ``T = C e^-f Id``, ``Phi = (2/C) e^f (Hess^D_f + 2 rho^D_sym)``, ``S = Id``;
    the potential is ``f`` pulled back and ``lambda = (3/2) C e^-f``.
    """
    C = D.C if C is None else float(C)
    if C == 0:
        raise GeometryError("constant C must be nonzero")
    if fhat is None:
        fhat = D.fhat if D.fhat is not None else ex.ZERO
    D = D.with_potential(fhat, C)
    f = D.fhat
    Phi = affine.phi_exprs(D, f, C)
    t = ex.mul(ex.num(C), ex.call("exp", ex.neg(f)))
    T = [[t, ex.ZERO], [ex.ZERO, t]]
    S = [[ex.ONE, ex.ZERO], [ex.ZERO, ex.ONE]]
    spec = ExtensionSpec(D, Phi=Phi, T=T, S=S)
    chart = walker_chart()
    metric = modified_extension(spec, chart)
    f4 = ex.pullback(f, chart)
    lam = ex.mul(ex.num(1.5 * C), ex.call("exp", ex.neg(f4)))
    return AffineSoliton(metric, ScalarField(f4, chart), ScalarField(lam, chart), spec)
