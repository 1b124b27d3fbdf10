"""Reproducible sample points.

Random samples come from numpy's Philox-4x64 counter-based generator keyed
by the user seed, so a (seed, box, count) triple gives the same points on
every platform.
"""
from __future__ import annotations

import itertools

import numpy as np

from .tensor import DET_TOL

MAX_REJECTIONS = 1000


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def random_points(box, count: int, seed: int, metric=None, accept=None) -> np.ndarray:
    """``count`` uniform points in ``box = [[lo, hi], ...]``.

    Points where ``|det g| < 1e-12`` (when ``metric`` is given) or where
    ``accept(point)`` is false are redrawn.
    """
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 0] > box[:, 1]):
        raise ValueError(f"bad sampling box {box.tolist()}")
    rng = generator(seed)
    out = []
    rejected = 0
    while len(out) < count:
        p = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random(len(box))
        if _admissible(p, metric, accept):
            out.append(p)
        else:
            rejected += 1
            if rejected > MAX_REJECTIONS:
                raise ValueError("too many degenerate sample points; shrink the box")
    return np.array(out)


def grid_points(axes, metric=None, accept=None) -> np.ndarray:
    """Cartesian grid from ``axes = [[lo, hi, n], ...]``, degenerate points dropped."""
    lines = [np.linspace(float(lo), float(hi), int(n)) for lo, hi, n in axes]
    pts = [np.array(p) for p in itertools.product(*lines)]
    return np.array([p for p in pts if _admissible(p, metric, accept)])


def _admissible(p, metric, accept) -> bool:
    if accept is not None and not accept(p):
        return False
    if metric is not None:
        d = np.linalg.det(metric.value(p))
        if not np.isfinite(d) or abs(d) < DET_TOL:
            return False
    return True
