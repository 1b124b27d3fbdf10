"""Calculus on affine surfaces (torsion-free connections in two variables).

Curvature uses the same sign convention as :mod:`almostsoliton.tensor`, and
the affine Ricci tensor is ``rho(X,Y) = tr{Z -> R(X,Z)Y}``, which need not be
symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .jets import basis
from .tensor import Chart, GeometryError

SURFACE_CHART = Chart(("x1", "x2"))

# storage order of the six independent symbols Gamma^k_ij, i <= j
GAMMA_KEYS = ("G1_11", "G1_12", "G1_22", "G2_11", "G2_12", "G2_22")


@dataclass(frozen=True, eq=False)
class AffineSurface:
    """Torsion-free connection D on a chart ``(x1, x2)``.

    ``gamma[k][i][j]`` is ``Gamma^k_ij``; symmetry in ``(i, j)`` is enforced
    by construction.
    """

    gamma: tuple
    fhat: ex.Expr | None = None
    C: float = 1.0
    chart: Chart = SURFACE_CHART
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_symbols(cls, symbols: dict | None = None, fhat=None, C: float = 1.0, chart: Chart = SURFACE_CHART):
        """Build from ``{"G1_11": "x2", ...}``; missing symbols are zero."""
        symbols = dict(symbols or {})
        unknown = set(symbols) - set(GAMMA_KEYS)
        if unknown:
            raise GeometryError(f"unknown Christoffel symbol key(s): {sorted(unknown)}")
        g = [[[None, None], [None, None]] for _ in range(2)]
        for key in GAMMA_KEYS:
            k, i, j = int(key[1]) - 1, int(key[3]) - 1, int(key[4]) - 1
            src = symbols.get(key, "0")
            e = src if isinstance(src, ex.Expr) else ex.parse(str(src), chart)
            g[k][i][j] = g[k][j][i] = e
        if isinstance(fhat, str):
            fhat = ex.parse(fhat, chart)
        elif isinstance(fhat, (int, float)):
            fhat = ex.num(fhat)
        return cls(tuple(tuple(tuple(r) for r in m) for m in g), fhat, float(C), chart)

    def symbols(self) -> dict:
        return {key: ex.to_string(self.gamma[int(key[1]) - 1][int(key[3]) - 1][int(key[4]) - 1]) for key in GAMMA_KEYS}

    def gamma_coeffs(self, p, order: int = 3) -> np.ndarray:
        """Jets of the symbols, shape ``(2, 2, 2, N)`` indexed ``[k, i, j]``."""
        b = basis(2, order)
        out = np.empty((2, 2, 2, b.size))
        for k in range(2):
            for i in range(2):
                for j in range(i, 2):
                    c = ex.eval_coeffs(self.gamma[k][i][j], self.chart.names, p, order)
                    out[k, i, j] = out[k, j, i] = c
        return out

    def with_potential(self, fhat, C: float | None = None) -> "AffineSurface":
        if isinstance(fhat, str):
            fhat = ex.parse(fhat, self.chart)
        return AffineSurface(self.gamma, fhat, self.C if C is None else float(C), self.chart)


@dataclass
class AffinePointData:
    point: np.ndarray
    gamma: np.ndarray
    curvature: np.ndarray  # [l, k, i, j] of R(d_i, d_j) d_k = curvature[:, k, i, j]
    ricci: np.ndarray
    ricci_sym: np.ndarray
    hessian: np.ndarray | None = None


def _ricci_jet(D: AffineSurface, p, order: int = 3):
    b = basis(2, order)
    Gam = D.gamma_coeffs(p, order)
    dGam = b.gradient(Gam)  # [m, k, i, j]
    # standard-sign R^l_{kij}; the surface convention is its negative
    Rstd = (
        np.einsum("iljkP->lkijP", dGam)
        - np.einsum("jlikP->lkijP", dGam)
        + b.contract("lim,mjk->lkij", Gam, Gam)
        - b.contract("ljm,mik->lkij", Gam, Gam)
    )
    ricci = np.einsum("jkjiP->ikP", Rstd)
    return b, Gam, Rstd, ricci


def affine_ricci(D: AffineSurface, p):
    """``(rho^D, rho^D_sym)`` at ``p``."""
    _, _, _, ricci = _ricci_jet(D, p)
    r = ricci[..., 0]
    return r, 0.5 * (r + r.T)


def affine_point(D: AffineSurface, p, fhat=None) -> AffinePointData:
    b, Gam, Rstd, ricci = _ricci_jet(D, p)
    r = ricci[..., 0]
    data = AffinePointData(np.asarray(p, float), Gam[..., 0], -Rstd[..., 0], r, 0.5 * (r + r.T))
    fhat = D.fhat if fhat is None else fhat
    if fhat is not None:
        data.hessian = affine_hessian(D, fhat, p)
    return data


def _fhat_expr(D: AffineSurface, fhat) -> ex.Expr:
    if fhat is None:
        if D.fhat is None:
            raise GeometryError("affine surface carries no potential")
        return D.fhat
    if isinstance(fhat, str):
        return ex.parse(fhat, D.chart)
    return ex.as_expr(fhat)


def affine_hessian(D: AffineSurface, fhat=None, p=None) -> np.ndarray:
    """``Hess^D_f = D df`` at ``p``: ``d_i d_j f - Gamma^k_ij d_k f``."""
    f = _fhat_expr(D, fhat)
    b = basis(2, 3)
    fc = ex.eval_coeffs(f, D.chart.names, p, 3)
    df = b.gradient(fc)[..., 0]
    ddf = b.partials_tensor(fc, 2)
    Gam = D.gamma_coeffs(p, 0)[..., 0]
    return ddf - np.einsum("kij,k->ij", Gam, df)


def affine_soliton_residual(D: AffineSurface, fhat=None, p=None) -> np.ndarray:
    """``Hess^D_f + 2 rho^D_sym`` at ``p``."""
    _, rsym = affine_ricci(D, p)
    return affine_hessian(D, fhat, p) + 2.0 * rsym


def phi_from_fhat(D: AffineSurface, fhat=None, C: float | None = None, p=None) -> np.ndarray:
    """Deformation tensor ``(2/C) e^f (Hess^D_f + 2 rho^D_sym)`` at ``p``."""
    C = D.C if C is None else float(C)
    if C == 0:
        raise GeometryError("constant C must be nonzero")
    f = _fhat_expr(D, fhat)
    fval = ex.evaluate(f, D.chart, p)
    return (2.0 / C) * np.exp(fval) * affine_soliton_residual(D, f, p)


# --- the same objects as expression fields --------------------------------


def ricci_exprs(D: AffineSurface) -> list:
    """Symbolic ``rho^D_ik`` (2x2 nested list of Expr)."""
    names = D.chart.names
    G = D.gamma

    def d(e, m):
        return ex.diff(e, names[m])

    out = [[None, None], [None, None]]
    for i in range(2):
        for k in range(2):
            terms = []
            for j in range(2):
                terms.append(d(G[j][i][k], j))
                terms.append(ex.neg(d(G[j][j][k], i)))
                for m in range(2):
                    terms.append(ex.mul(G[j][j][m], G[m][i][k]))
                    terms.append(ex.neg(ex.mul(G[j][i][m], G[m][j][k])))
            out[i][k] = ex.sum_exprs(terms)
    return out


def hessian_exprs(D: AffineSurface, fhat=None) -> list:
    f = _fhat_expr(D, fhat)
    names = D.chart.names
    df = [ex.diff(f, n) for n in names]
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(i, 2):
            e = ex.diff(df[j], names[i])
            for k in range(2):
                e = ex.sub(e, ex.mul(D.gamma[k][i][j], df[k]))
            out[i][j] = out[j][i] = e
    return out


def soliton_operator_exprs(D: AffineSurface, fhat=None) -> list:
    """Symbolic ``Hess^D_f + 2 rho^D_sym``."""
    H = hessian_exprs(D, fhat)
    R = ricci_exprs(D)
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(i, 2):
            rsym = R[i][j] if i == j else ex.mul(ex.num(0.5), ex.add(R[i][j], R[j][i]))
            out[i][j] = out[j][i] = ex.add(H[i][j], ex.mul(ex.num(2), rsym))
    return out


def phi_exprs(D: AffineSurface, fhat=None, C: float | None = None) -> list:
    """Deformation tensor as a symmetric 2x2 nested list of Expr."""
    C = D.C if C is None else float(C)
    if C == 0:
        raise GeometryError("constant C must be nonzero")
    f = _fhat_expr(D, fhat)
    pref = ex.mul(ex.num(2.0 / C), ex.call("exp", f))
    S = soliton_operator_exprs(D, f)
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(i, 2):
            out[i][j] = out[j][i] = ex.mul(pref, S[i][j])
    return out
