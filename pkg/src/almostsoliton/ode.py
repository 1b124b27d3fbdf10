"""Potential functions on warped products ``eps dt^2 + phi(t)^2 g_N``.

With ``f`` and ``lambda`` depending on ``t`` only, the almost soliton
equation reduces to

    f'' - eps*lambda - 3 phi''/phi = 0
    phi (f' phi' - phi'') - eps*lambda*phi^2 - 2 phi'^2 + 2 c_N eps = 0

and eliminating ``lambda`` leaves the linear equation

    -phi^2 f'' + phi phi' f' + 2 phi phi'' - 2 phi'^2 + 2 c_N eps = 0,

which is what :func:`solve_potential` integrates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import expr as ex
from .geom import T_CHART, WarpedProductSpec, warped_metric
from .jets import basis
from .tensor import Chart, GeometryError, JetField

MIN_STEPS = 16


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_t: float):
        super().__init__(f"{message} (last valid t = {last_t!r})")
        self.last_t = last_t


def _phi_derivs(spec: WarpedProductSpec, t: float) -> tuple:
    c = ex.eval_coeffs(spec.phi, T_CHART.names, [t], 2)
    phi, dphi, ddphi = c[0], c[1], 2.0 * c[2]
    if not phi > 0:
        raise GeometryError(f"warping function phi <= 0 at t = {t!r}")
    return phi, dphi, ddphi


def second_derivative(spec: WarpedProductSpec, t: float, df: float) -> float:
    """``f''`` from the linear equation."""
    phi, dphi, ddphi = _phi_derivs(spec, t)
    eps, c = spec.epsilon, spec.c_N
    return (phi * dphi * df + 2 * phi * ddphi - 2 * dphi**2 + 2 * c * eps) / phi**2


def linear_residual(spec: WarpedProductSpec, t: float, df: float, d2f: float) -> float:
    phi, dphi, ddphi = _phi_derivs(spec, t)
    return -(phi**2) * d2f + phi * dphi * df + 2 * phi * ddphi - 2 * dphi**2 + 2 * spec.c_N * spec.epsilon


def soliton_function(spec: WarpedProductSpec, t: float, d2f: float) -> float:
    phi, _, ddphi = _phi_derivs(spec, t)
    eps = spec.epsilon
    return eps * d2f - 3 * eps * ddphi / phi


def reduced_residuals(spec: WarpedProductSpec, t: float, df: float, d2f: float, lam: float) -> tuple:
    """Residuals of the two reduced scalar equations."""
    phi, dphi, ddphi = _phi_derivs(spec, t)
    eps, c = spec.epsilon, spec.c_N
    r1 = d2f - eps * lam - 3 * ddphi / phi
    r2 = phi * (df * dphi - ddphi) - eps * lam * phi**2 - 2 * dphi**2 + 2 * c * eps
    return r1, r2


def _rk4(spec: WarpedProductSpec, t0: float, t1: float, f0: float, df0: float, steps: int):
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    ts[-1] = t1
    f = np.empty(steps + 1)
    y = np.empty(steps + 1)
    f[0], y[0] = f0, df0

    def rhs(t, state):
        return np.array([state[1], second_derivative(spec, t, state[1])])

    state = np.array([f0, df0], dtype=float)
    for n in range(steps):
        t = ts[n]
        k1 = rhs(t, state)
        k2 = rhs(t + h / 2, state + h / 2 * k1)
        k3 = rhs(t + h / 2, state + h / 2 * k2)
        k4 = rhs(t + h, state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise IntegrationError("non-finite state", float(t))
        f[n + 1], y[n + 1] = state
    return ts, f, y


@dataclass
class PotentialSolution:
    spec: WarpedProductSpec
    t: np.ndarray
    f: np.ndarray
    df: np.ndarray
    d2f: np.ndarray
    lam: np.ndarray
    steps: int
    step: float
    method: str = "rk4"
    method_order: int = 4
    error_estimate: float = float("nan")
    _splines: tuple = field(default=None, repr=False)

    def _spl(self):
        if self._splines is None:
            self._splines = (
                CubicHermiteSpline(self.t, self.f, self.df),
                CubicHermiteSpline(self.t, self.df, self.d2f),
            )
        return self._splines

    def covers(self, t: float) -> bool:
        return self.t[0] - 1e-12 <= t <= self.t[-1] + 1e-12

    def interpolate(self, t: float) -> tuple:
        """``(f, f')`` at ``t`` by cubic Hermite interpolation."""
        if not self.covers(t):
            raise ValueError(f"t = {t!r} outside the solution range [{self.t[0]}, {self.t[-1]}]")
        sf, sdf = self._spl()
        return float(sf(t)), float(sdf(t))

    def taylor(self, t: float, order: int = 3) -> tuple:
        """Taylor coefficients at ``t`` of ``f`` and of ``lambda`` up to ``order``.

        ``f`` and ``f'`` come from the interpolant; higher coefficients follow
        from the linear equation, so the jet is that of the exact solution
        through the interpolated data.
        """
        spec = self.spec
        K = order + 2
        b = basis(1, K)
        phi = ex.eval_coeffs(spec.phi, T_CHART.names, [t], K)
        if not phi[0] > 0:
            raise GeometryError(f"warping function phi <= 0 at t = {t!r}")
        dphi = b.deriv(phi, 0)
        ddphi = b.deriv(dphi, 0)
        inv = b.reciprocal(phi)
        a = b.mul(dphi, inv)
        rhs = 2 * b.mul(phi, ddphi) - 2 * b.mul(dphi, dphi)
        rhs[0] += 2 * spec.c_N * spec.epsilon
        bb = b.mul(rhs, b.mul(inv, inv))
        f0, y0 = self.interpolate(t)
        y = np.zeros(K + 1)
        y[0] = y0
        for k in range(K - 1):
            y[k + 1] = (np.dot(a[: k + 1], y[k::-1]) + bb[k]) / (k + 1)
        fc = np.zeros(K + 1)
        fc[0] = f0
        fc[1:] = y[:K] / np.arange(1, K + 1)
        d2 = b.deriv(y, 0)
        lam = spec.epsilon * d2 - 3 * spec.epsilon * b.mul(ddphi, inv)
        return fc[: order + 1], lam[: order + 1]

    def _field(self, chart: Chart, which: int, label: str) -> JetField:
        def fn(point, order):
            b4 = basis(chart.dim, order)
            out = np.zeros(b4.size)
            coeffs = self.taylor(float(point[0]), order)[which]
            for k in range(order + 1):
                alpha = (k,) + (0,) * (chart.dim - 1)
                out[b4.index[alpha]] = coeffs[k]
            return out

        return JetField(chart, fn, label)

    def potential_field(self, chart: Chart) -> JetField:
        return self._field(chart, 0, f"f(t) [rk4, {self.steps} steps]")

    def lambda_field(self, chart: Chart, shift: float = 0.0) -> JetField:
        field_ = self._field(chart, 1, "eps f'' - 3 eps phi''/phi")
        if shift == 0.0:
            return field_

        def fn(point, order):
            c = field_.coeffs(point, order).copy()
            c[0] += shift
            return c

        return JetField(chart, fn, f"({field_.label}) + {shift!r}")

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.t[1:] + self.t[:-1])

    def defect(self, ts=None) -> np.ndarray:
        """Linear-equation residual of the interpolant (default: at interval midpoints)."""
        ts = self.midpoints() if ts is None else np.atleast_1d(ts)
        _, sdf = self._spl()
        y = sdf(ts)
        dy = sdf.derivative()(ts)
        return np.array([linear_residual(self.spec, float(t), float(a), float(b)) for t, a, b in zip(ts, y, dy)])

    def node_residuals(self) -> np.ndarray:
        """``max |.|`` over grid nodes of the linear equation and both reduced equations."""
        out = np.zeros((len(self.t), 3))
        for n, t in enumerate(self.t):
            t = float(t)
            out[n, 0] = linear_residual(self.spec, t, self.df[n], self.d2f[n])
            out[n, 1:] = reduced_residuals(self.spec, t, self.df[n], self.d2f[n], self.lam[n])
        return np.abs(out).max(axis=0)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "method_order": self.method_order,
            "steps": self.steps,
            "step": self.step,
            "error_estimate": self.error_estimate,
        }


def solve_potential(
    spec: WarpedProductSpec,
    f0: float = 0.0,
    df0: float = 0.0,
    interval=None,
    steps: int = 400,
    estimate_error: bool = True,
) -> PotentialSolution:
    """Integrate the linear potential equation with classical RK4.

    Initial data ``(f0, df0)`` is imposed at the left end of ``interval``
    (default: the warping interval).  ``error_estimate`` is the step-doubling
    estimate ``max |f'_h - f'_{h/2}| / 15``.
    """
    if steps < MIN_STEPS:
        raise ValueError(f"steps must be >= {MIN_STEPS}")
    t0, t1 = spec.interval if interval is None else (float(interval[0]), float(interval[1]))
    ts, f, y = _rk4(spec, t0, t1, float(f0), float(df0), steps)
    d2f = np.array([second_derivative(spec, float(t), float(v)) for t, v in zip(ts, y)])
    lam = np.array([soliton_function(spec, float(t), float(a)) for t, a in zip(ts, d2f)])
    err = float("nan")
    if estimate_error:
        _, _, y2 = _rk4(spec, t0, t1, float(f0), float(df0), 2 * steps)
        err = float(np.abs(y - y2[::2]).max() / 15.0)
    return PotentialSolution(spec, ts, f, y, d2f, lam, steps, (t1 - t0) / steps, error_estimate=err)


def verify_warped_soliton(spec: WarpedProductSpec, sol: PotentialSolution, points, checks=None, tolerances=None, lambda_shift: float = 0.0, **kwargs):
    """Full four-dimensional check of the reconstructed warped soliton."""
    from . import soliton

    points = np.atleast_2d(np.asarray(points, dtype=float))
    for p in points:
        if not sol.covers(p[0]):
            raise ValueError(f"sample t = {p[0]!r} outside the solution range [{sol.t[0]}, {sol.t[-1]}]")
    metric = warped_metric(spec)
    f = sol.potential_field(metric.chart)
    lam = sol.lambda_field(metric.chart, lambda_shift)
    checks = checks or ("soliton-residual", "weyl-norm", "lemma21", "lemma22")
    return soliton.verify(metric, f, lam, points, checks=checks, tolerances=tolerances, **kwargs)
