"""Truncated multivariate Taylor arithmetic.

A jet is stored as an array whose trailing axis holds Taylor coefficients
``c[alpha]`` of the monomials ``x**alpha`` with ``|alpha| <= order``, so a
jet of shape ``(..., N)`` is a tensor-valued jet.  Partial derivatives are
recovered as ``alpha! * c[alpha]``.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


class JetBasis:
    """Monomial basis in ``nvars`` variables up to total degree ``order``."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        multi = []
        for deg in range(order + 1):
            # lexicographically descending within a degree: x1^2 before x1 x2
            block = [a for a in itertools.product(range(deg + 1), repeat=nvars) if sum(a) == deg]
            block.sort(reverse=True)
            multi.extend(block)
        self.multi = tuple(multi)
        self.size = len(multi)
        self.index = {a: k for k, a in enumerate(multi)}
        self.degree = np.array([sum(a) for a in multi])
        self.factorial = np.array([math.prod(math.factorial(i) for i in a) for a in multi], dtype=float)

        pi, pj, pk = [], [], []
        for i, a in enumerate(multi):
            for j, b in enumerate(multi):
                if sum(a) + sum(b) <= order:
                    pi.append(i)
                    pj.append(j)
                    pk.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self._pi = np.array(pi)
        self._pj = np.array(pj)
        scatter = np.zeros((len(pk), self.size))
        scatter[np.arange(len(pk)), pk] = 1.0
        self._scatter = scatter

        self._dsrc, self._ddst, self._dfac = [], [], []
        for v in range(nvars):
            src, dst, fac = [], [], []
            for k, a in enumerate(multi):
                if sum(a) < order:
                    up = list(a)
                    up[v] += 1
                    src.append(self.index[tuple(up)])
                    dst.append(k)
                    fac.append(up[v])
            self._dsrc.append(np.array(src, dtype=int))
            self._ddst.append(np.array(dst, dtype=int))
            self._dfac.append(np.array(fac, dtype=float))

    # construction -----------------------------------------------------
    def constant(self, value) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        out = np.zeros(value.shape + (self.size,))
        out[..., 0] = value
        return out

    def variable(self, i: int, value: float) -> np.ndarray:
        out = np.zeros(self.size)
        out[0] = value
        if self.order >= 1:
            e = [0] * self.nvars
            e[i] = 1
            out[self.index[tuple(e)]] = 1.0
        return out

    # algebra ------------------------------------------------------------
    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Truncated product, broadcasting over leading axes."""
        return (a[..., self._pi] * b[..., self._pj]) @ self._scatter

    def contract(self, subscripts: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Tensor contraction with jet products: ``contract('ij,jk->ik', a, b)``.

        Subscripts refer to the tensor axes only; ``P`` and the trailing
        coefficient axis are reserved.
        """
        lhs, out = subscripts.replace(" ", "").split("->")
        sa, sb = lhs.split(",")
        pair = np.einsum(f"{sa}P,{sb}P->{out}P", a[..., self._pi], b[..., self._pj])
        return pair @ self._scatter

    def deriv(self, a: np.ndarray, i: int) -> np.ndarray:
        """Partial derivative in variable ``i``; valid order drops by one."""
        out = np.zeros_like(a)
        out[..., self._ddst[i]] = a[..., self._dsrc[i]] * self._dfac[i]
        return out

    def gradient(self, a: np.ndarray) -> np.ndarray:
        """Stack of partials with the new axis first: shape ``(n, ...)``."""
        return np.stack([self.deriv(a, i) for i in range(self.nvars)])

    def compose(self, a: np.ndarray, derivs) -> np.ndarray:
        """``h(a)`` from the derivatives ``h^(m)(a0)``, ``m = 0..order``."""
        da = a.copy()
        da[..., 0] = 0.0
        out = self.constant(derivs[0])
        power = self.constant(np.ones(a.shape[:-1]))
        for m in range(1, self.order + 1):
            power = self.mul(power, da)
            out = out + (np.asarray(derivs[m])[..., None] / math.factorial(m)) * power
        return out

    def reciprocal(self, a: np.ndarray) -> np.ndarray:
        a0 = a[..., 0]
        derivs = [(-1.0) ** m * math.factorial(m) / a0 ** (m + 1) for m in range(self.order + 1)]
        return self.compose(a, derivs)

    def matinv(self, a: np.ndarray) -> np.ndarray:
        """Inverse of a matrix-valued jet of shape ``(n, n, N)``."""
        inv0 = np.linalg.inv(a[..., 0])
        delta = a.copy()
        delta[..., 0] = 0.0
        step = -np.einsum("ij,jkP->ikP", inv0, delta)
        term = self.constant(inv0)
        total = term.copy()
        for _ in range(self.order):
            term = self.contract("ij,jk->ik", step, term)
            total = total + term
        return total

    # read-out -----------------------------------------------------------
    def partial(self, a: np.ndarray, *indices: int) -> np.ndarray:
        alpha = [0] * self.nvars
        for i in indices:
            alpha[i] += 1
        k = self.index[tuple(alpha)]
        return a[..., k] * self.factorial[k]

    def partials_tensor(self, a: np.ndarray, degree: int) -> np.ndarray:
        """All partials of one degree as a symmetric array, derivative axes first."""
        n = self.nvars
        out = np.empty((n,) * degree + a.shape[:-1])
        for idx in itertools.product(range(n), repeat=degree):
            out[idx] = self.partial(a, *idx)
        return out


@lru_cache(maxsize=None)
def basis(nvars: int, order: int = 3) -> JetBasis:
    return JetBasis(nvars, order)


class Jet3:
    """Scalar jet: a value and all partial derivatives up to total order 3
    (or the order of its basis)."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis_: JetBasis, coeffs: np.ndarray):
        self.basis = basis_
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value: float, nvars: int, order: int = 3) -> "Jet3":
        b = basis(nvars, order)
        return cls(b, b.constant(value))

    @classmethod
    def variable(cls, i: int, point, order: int = 3) -> "Jet3":
        b = basis(len(point), order)
        return cls(b, b.variable(i, float(point[i])))

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    @property
    def nvars(self) -> int:
        return self.basis.nvars

    def partial(self, *indices: int) -> float:
        return float(self.basis.partial(self.coeffs, *indices))

    @property
    def partials(self) -> dict:
        """Map from sorted variable-index tuples to partial derivatives."""
        out = {}
        for k, alpha in enumerate(self.basis.multi):
            key = tuple(i for i, m in enumerate(alpha) for _ in range(m))
            out[key] = float(self.coeffs[k] * self.basis.factorial[k])
        return out

    def gradient(self) -> np.ndarray:
        return self.basis.partials_tensor(self.coeffs, 1)

    def hessian(self) -> np.ndarray:
        return self.basis.partials_tensor(self.coeffs, 2)

    def third(self) -> np.ndarray:
        return self.basis.partials_tensor(self.coeffs, 3)

    def _lift(self, other):
        if isinstance(other, Jet3):
            return other.coeffs
        return self.basis.constant(float(other))

    def __add__(self, other):
        return Jet3(self.basis, self.coeffs + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Jet3(self.basis, self.coeffs - self._lift(other))

    def __rsub__(self, other):
        return Jet3(self.basis, self._lift(other) - self.coeffs)

    def __neg__(self):
        return Jet3(self.basis, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet3):
            return Jet3(self.basis, self.basis.mul(self.coeffs, other.coeffs))
        return Jet3(self.basis, self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return self * Jet3(self.basis, self.basis.reciprocal(other.coeffs))
        return Jet3(self.basis, self.coeffs / float(other))

    def __rtruediv__(self, other):
        return Jet3(self.basis, self.basis.reciprocal(self.coeffs)) * float(other)

    def __repr__(self) -> str:
        return f"Jet3(value={self.value!r}, nvars={self.nvars}, order={self.basis.order})"
