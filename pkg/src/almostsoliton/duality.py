"""Two-forms in dimension four: induced inner product, Hodge star, and the
self-dual / anti-self-dual split of the Weyl operator.

Two-forms are expanded in the coordinate frame ``dx^a ^ dx^b`` with
``a < b`` in lexicographic order (:data:`PAIRS`); every 6x6 matrix in this
module acts on coefficient vectors in that frame.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .tensor import CurvaturePoint, DimensionError, GeometryError, MetricField, curvature_at

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
FRAME_TOL = 1e-9


class FrameError(GeometryError):
    pass


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4,) * 4)
    for perm in itertools.permutations(range(4)):
        inversions = sum(perm[i] > perm[j] for i in range(4) for j in range(i + 1, 4))
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPSILON = _levi_civita()
# wedge pairing of the frame: (dx^A ^ dx^B) = WEDGE[A, B] dx^0123
WEDGE = np.array([[EPSILON[a + b] for b in PAIRS] for a in PAIRS])


@dataclass(frozen=True)
class Lambda2Operator:
    matrix: np.ndarray
    role: str

    def __matmul__(self, other):
        m = other.matrix if isinstance(other, Lambda2Operator) else other
        return self.matrix @ m

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def _pair_matrix(T: np.ndarray) -> np.ndarray:
    """Restrict a 4-index array to the pair frame: ``M[A, B] = T[a, b, c, d]``."""
    return np.array([[T[a + b] for b in PAIRS] for a in PAIRS])


def _check_dim(g) -> None:
    if g.shape != (4, 4):
        raise DimensionError(f"two-form operations need dimension 4, got {g.shape[0]}")


def _cp(g, p) -> CurvaturePoint:
    if isinstance(g, CurvaturePoint):
        return g
    return curvature_at(g, p)


def inner_matrix(ginv: np.ndarray) -> np.ndarray:
    """``<<dx^a^dx^b, dx^c^dx^d>> = g^ac g^bd - g^ad g^bc``."""
    return np.array([[ginv[a, c] * ginv[b, d] - ginv[a, d] * ginv[b, c] for (c, d) in PAIRS] for (a, b) in PAIRS])


def star_matrix(g: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Hodge star defined by ``alpha ^ *beta = <<alpha, beta>> vol`` with
    ``vol = orientation * sqrt|det g| dx^0123``."""
    _check_dim(g)
    ginv = np.linalg.inv(g)
    vol = orientation * np.sqrt(abs(np.linalg.det(g)))
    # WEDGE is symmetric and squares to the identity
    return vol * WEDGE @ inner_matrix(ginv)


def lambda2_inner(g: MetricField | CurvaturePoint, p=None) -> Lambda2Operator:
    cp = _cp(g, p)
    _check_dim(cp.g)
    return Lambda2Operator(inner_matrix(cp.ginv), "inner")


def _orientation(cp: CurvaturePoint, orientation) -> int:
    return cp.chart.orientation if orientation is None else int(orientation)


def hodge_star(g: MetricField | CurvaturePoint, p=None, orientation: int | None = None) -> Lambda2Operator:
    cp = _cp(g, p)
    return Lambda2Operator(star_matrix(cp.g, _orientation(cp, orientation)), "star")


def projectors(g: MetricField | CurvaturePoint, p=None, orientation: int | None = None):
    star = hodge_star(g, p, orientation).matrix
    eye = np.eye(6)
    return Lambda2Operator(0.5 * (eye + star), "P+"), Lambda2Operator(0.5 * (eye - star), "P-")


def weyl_operator_matrix(weyl: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """Weyl tensor acting on two-forms, ``(W w)_ab = sum_{c<d} W_ab^cd w_cd``."""
    return _pair_matrix(weyl) @ inner_matrix(ginv)


def weyl_operator(g: MetricField | CurvaturePoint, p=None) -> Lambda2Operator:
    cp = _cp(g, p)
    cp.require_dim4()
    return Lambda2Operator(weyl_operator_matrix(cp.weyl, cp.ginv), "weyl")


def weyl_split(g: MetricField | CurvaturePoint, p=None, orientation: int | None = None):
    """``(W+, W-)`` with ``W+- = (W +- *W)/2``."""
    cp = _cp(g, p)
    W = weyl_operator(cp).matrix
    star = hodge_star(cp, orientation=orientation).matrix
    sw = star @ W
    return Lambda2Operator(0.5 * (W + sw), "W+"), Lambda2Operator(0.5 * (W - sw), "W-")


def weyl_split_norms(g, p=None, orientation=None) -> tuple:
    wp, wm = weyl_split(g, p, orientation)
    return wp.norm(), wm.norm()


# ---------------------------------------------------------------------------
# Frames and the two self-duality criteria
# ---------------------------------------------------------------------------


def _inner(g, u, v) -> float:
    return float(u @ g @ v)


def frame_orientation(frame: np.ndarray, orientation: int = 1) -> int:
    """Sign of ``vol(frame)``; the frame vectors are the rows of ``frame``."""
    return int(np.sign(orientation * np.linalg.det(np.asarray(frame))))


def orthonormal_frame(g: np.ndarray, vectors=None, orientation: int = 1, rng=None):
    """Gram-Schmidt against ``g`` with pivoting on ``|g(v, v)|``.

    Returns ``(frame, eps)``: rows of ``frame`` are positively oriented and
    ``g(e_i, e_j) = eps_i delta_ij``.
    """
    n = g.shape[0]
    if vectors is None:
        rng = np.random.default_rng(0) if rng is None else rng
        vectors = rng.normal(size=(n, n))
    pool = [np.asarray(v, dtype=float) for v in vectors]
    frame, eps = [], []
    while pool:
        projected = []
        for v in pool:
            w = v.copy()
            for e, s in zip(frame, eps):
                w = w - s * _inner(g, v, e) * e
            projected.append(w)
        k = int(np.argmax([abs(_inner(g, w, w)) for w in projected]))
        w = projected[k]
        q = _inner(g, w, w)
        if abs(q) < 1e-12:
            raise FrameError("cannot complete an orthonormal frame (null pivot)")
        frame.append(w / np.sqrt(abs(q)))
        eps.append(1.0 if q > 0 else -1.0)
        pool.pop(k)
    frame = np.array(frame)
    eps = np.array(eps)
    if frame_orientation(frame, orientation) < 0:
        frame[-1] = -frame[-1]
    return frame, eps


def check_orthonormal(g: np.ndarray, frame: np.ndarray, eps, tol: float = FRAME_TOL) -> None:
    gram = frame @ g @ frame.T
    err = np.abs(gram - np.diag(eps)).max()
    if err > tol:
        raise FrameError(f"frame is not orthonormal (defect {err:.3e})")


def check_pseudo_orthonormal(g: np.ndarray, frame: np.ndarray, tol: float = FRAME_TOL) -> None:
    t, u, v, w = frame
    target = np.zeros((4, 4))
    target[0, 2] = target[2, 0] = target[1, 3] = target[3, 1] = 1.0
    gram = frame @ g @ frame.T
    err = np.abs(gram - target).max()
    if err > tol:
        raise FrameError(f"frame is not pseudo-orthonormal (defect {err:.3e})")


def pseudo_from_orthonormal(frame: np.ndarray, eps) -> np.ndarray:
    """``(t, u, v, w)`` from an orthonormal frame with ``eps = (-1, 1, -1, 1)``.

    Inverse of ``e1 = (t-v)/r2, e2 = (t+v)/r2, e3 = (w-u)/r2, e4 = (w+u)/r2``.
    """
    if not np.allclose(eps, [-1, 1, -1, 1]):
        raise FrameError(f"need signs (-1, 1, -1, 1), got {tuple(eps)}")
    e1, e2, e3, e4 = frame
    r = np.sqrt(0.5)
    return np.array([(e1 + e2) * r, (e4 - e3) * r, (e2 - e1) * r, (e3 + e4) * r])


def orthonormal_from_pseudo(frame: np.ndarray) -> tuple:
    t, u, v, w = frame
    r = np.sqrt(0.5)
    return np.array([(t - v) * r, (t + v) * r, (w - u) * r, (w + u) * r]), np.array([-1.0, 1.0, -1.0, 1.0])


def neutral_orthonormal_frame(g: np.ndarray, orientation: int = 1, rng=None):
    """Orthonormal frame reordered to signs ``(-1, 1, -1, 1)``, positively oriented."""
    frame, eps = orthonormal_frame(g, orientation=orientation, rng=rng)
    neg = [i for i in range(4) if eps[i] < 0]
    pos = [i for i in range(4) if eps[i] > 0]
    if len(neg) != 2:
        raise FrameError("metric is not of neutral signature")
    order = [neg[0], pos[0], neg[1], pos[1]]
    frame, eps = frame[order], eps[order]
    if frame_orientation(frame, orientation) < 0:
        frame[3] = -frame[3]
    return frame, eps


def pseudo_frame(g: np.ndarray, orientation: int = 1, rng=None) -> np.ndarray:
    frame, eps = neutral_orthonormal_frame(g, orientation, rng)
    return pseudo_from_orthonormal(frame, eps)


def pseudo_frame_from_null(g: np.ndarray, t: np.ndarray, orientation: int = 1, rng=None) -> np.ndarray:
    """Positively oriented pseudo-orthonormal frame whose first vector is the
    null vector ``t``."""
    rng = np.random.default_rng(0) if rng is None else rng
    t = np.asarray(t, dtype=float)
    if abs(_inner(g, t, t)) > 1e-9 * max(1.0, float(t @ t)):
        raise FrameError("first vector is not null")
    for _ in range(32):
        v0 = rng.normal(size=4)
        if abs(_inner(g, t, v0)) > 1e-3:
            break
    else:
        raise FrameError("could not find a vector pairing with t")
    v1 = v0 / _inner(g, t, v0)
    v = v1 - 0.5 * _inner(g, v1, v1) * t
    # the orthogonal complement of span{t, v} has signature (-, +)
    y1, y2 = (x - _inner(g, x, v) * t - _inner(g, x, t) * v for x in rng.normal(size=(2, 4)))
    if abs(_inner(g, y1, y1)) < abs(_inner(g, y2, y2)):
        y1, y2 = y2, y1
    q1 = _inner(g, y1, y1)
    if abs(q1) < 1e-12:
        raise FrameError("degenerate complement plane")
    e1 = y1 / np.sqrt(abs(q1))
    y2 = y2 - np.sign(q1) * _inner(g, y2, e1) * e1
    q2 = _inner(g, y2, y2)
    if abs(q2) < 1e-12 or np.sign(q1) == np.sign(q2):
        raise FrameError("metric is not of neutral signature")
    e2 = y2 / np.sqrt(abs(q2))
    e_a, e_b = (e1, e2) if q1 < 0 else (e2, e1)
    r = np.sqrt(0.5)
    u = (e_b - e_a) * r
    w = (e_b + e_a) * r
    frame = np.array([t, u, v, w])
    if frame_orientation(frame, orientation) < 0:
        frame = np.array([t, w, v, u])
    return frame


def _eval4(W: np.ndarray, a, b, c, d) -> np.ndarray:
    return np.einsum("ijkl,i,j,k,l->", W, a, b, c, d)


def _xy_pairs(x, y):
    if x is None or y is None:
        eye = np.eye(4)
        return [(eye[i], eye[j]) for i in range(4) for j in range(4)]
    return [(np.asarray(x, float), np.asarray(y, float))]


def _sigma(i: int, j: int, k: int) -> int:
    return int(EPSILON[0, i, j, k]) if len({i, j, k}) == 3 else 0


def selfdual_criterion_orthonormal(W: np.ndarray, frame, eps, x=None, y=None, g=None) -> np.ndarray:
    """Residuals ``W(e1,ei,x,y) - sigma_ijk eps_j eps_k W(ej,ek,x,y)``, i = 2,3,4.

    Shape ``(m, 3)`` for ``m`` pairs ``(x, y)`` (all coordinate pairs when
    omitted).  ``g`` enables the orthonormality check.
    """
    frame = np.asarray(frame, float)
    eps = np.asarray(eps, float)
    if g is not None:
        check_orthonormal(g, frame, eps)
    rows = []
    for xv, yv in _xy_pairs(x, y):
        row = []
        for i in (1, 2, 3):
            j, k = [m for m in (1, 2, 3) if m != i]
            lhs = _eval4(W, frame[0], frame[i], xv, yv)
            rhs = _sigma(i, j, k) * eps[j] * eps[k] * _eval4(W, frame[j], frame[k], xv, yv)
            row.append(lhs - rhs)
        rows.append(row)
    return np.array(rows)


def selfdual_criterion_pseudo(W: np.ndarray, frame, x=None, y=None, g=None) -> np.ndarray:
    """Residuals ``W(t,v,x,y) - W(u,w,x,y)``, ``W(t,w,x,y)``, ``W(u,v,x,y)``."""
    frame = np.asarray(frame, float)
    if g is not None:
        check_pseudo_orthonormal(g, frame)
    t, u, v, w = frame
    rows = []
    for xv, yv in _xy_pairs(x, y):
        rows.append([
            _eval4(W, t, v, xv, yv) - _eval4(W, u, w, xv, yv),
            _eval4(W, t, w, xv, yv),
            _eval4(W, u, v, xv, yv),
        ])
    return np.array(rows)
