"""Built-in example jobs.

Each entry is a complete job configuration (see :mod:`almostsoliton.config`);
``list-corpus`` prints the names with their provenance line.
"""
from __future__ import annotations

import copy

EXTENSION_CHECKS = [
    "curvature-symmetries",
    "soliton-residual",
    "kappa-einstein",
    "isotropy",
    "weyl-split",
    "cotton-divweyl",
    "lemma21",
    "lemma22",
]
EXTENSION_TOL = {"soliton-residual": 1e-8, "kappa-einstein": 1e-8}
WALKER_BOX = [[-0.8, 0.8], [-0.8, 0.8], [-0.8, 0.8], [-0.8, 0.8]]
WARPED_CHECKS = ["soliton-residual", "weyl-norm", "lemma21", "lemma22", "ode-verify"]


def _affine(name, provenance, gamma, fhat, C, seed):
    return {
        "name": name,
        "provenance": provenance,
        "geometry": {"kind": "soliton-from-affine", "gamma": gamma, "fhat": fhat, "C": C},
        "sampling": {"mode": "random", "count": 12, "seed": seed, "box": WALKER_BOX},
        "checks": EXTENSION_CHECKS,
        "tolerances": EXTENSION_TOL,
    }


def _warped(name, provenance, phi, epsilon, c_N, interval, df0, box, seed, steps=200):
    return {
        "name": name,
        "provenance": provenance,
        "geometry": {"kind": "warped", "phi": phi, "epsilon": epsilon, "c_N": c_N, "interval": interval},
        "ode": {"f0": 0.0, "df0": df0, "steps": steps},
        "sampling": {"mode": "random", "count": 8, "seed": seed, "box": box},
        "checks": WARPED_CHECKS,
        "tolerances": {"soliton-residual": 1e-6},
    }


_FIBER = [[-0.5, 0.5]] * 3

CORPUS = {
    "remark36-einstein": _affine(
        "remark36-einstein",
        "Modified Riemannian extension of the flat plane with T = Id, Phi = 0: Einstein with rho = (3/2) g",
        {},
        "0",
        1.0,
        101,
    ),
    "einstein-nonflat": _affine(
        "einstein-nonflat",
        "Constant potential over a non-flat affine surface: the construction stays Einstein, Phi = 4 rho^D_sym",
        {"G1_11": "x2", "G2_12": "x1"},
        "0",
        1.0,
        102,
    ),
    "proper-extension-fx1": _affine(
        "proper-extension-fx1",
        "Flat affine plane, potential x1, C = 1: proper isotropic steady traceless kappa-Einstein soliton",
        {},
        "x1",
        1.0,
        103,
    ),
    "proper-extension-quadratic": _affine(
        "proper-extension-quadratic",
        "Flat affine plane with quadratic potential, C = 1/2: Phi from the affine Hessian",
        {},
        "x1^2 - x1*x2 + 0.5*x2",
        0.5,
        104,
    ),
    "proper-extension-nonflat": _affine(
        "proper-extension-nonflat",
        "Non-flat affine surface Gamma^1_11 = x2, potential x1*x2, C = 2: strictly half conformally flat soliton",
        {"G1_11": "x2"},
        "x1*x2",
        2.0,
        105,
    ),
    "affine-soliton-steady": _affine(
        "affine-soliton-steady",
        "Affine gradient Ricci soliton Gamma^1_22 = e^x1 (1 + x2^2), potential 2 x1: Phi vanishes identically",
        {"G1_22": "exp(x1)*(1 + x2^2)"},
        "2*x1",
        1.0,
        106,
    ),
    "selfdual-walker-general": {
        "name": "selfdual-walker-general",
        "provenance": "Modified Riemannian extension with all deformation data and X != 0: self-dual Walker metric",
        "geometry": {
            "kind": "extension",
            "gamma": {"G1_11": "x2", "G2_12": "sin(x1)", "G1_22": "x1*x2"},
            "Phi": [["x1^2", "x2"], ["x2", "cos(x1)"]],
            "T": [["1", "x1"], ["0", "x2"]],
            "S": [["1", "0"], ["0", "1"]],
            "X": ["x1", "1 - x2"],
        },
        "sampling": {"mode": "random", "count": 12, "seed": 107, "box": WALKER_BOX},
        "checks": ["curvature-symmetries", "weyl-split", "cotton-divweyl"],
    },
    "gaussian-soliton": {
        "name": "gaussian-soliton",
        "provenance": "Flat Euclidean 4-space with f = |x|^2 / 2 and lambda = 1: the Gaussian shrinking soliton",
        "geometry": {
            "kind": "raw-metric",
            "coordinates": ["x1", "x2", "x3", "x4"],
            "metric": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
        },
        "potential": {"f": "(x1^2 + x2^2 + x3^2 + x4^2)/2", "lambda": "1"},
        "sampling": {"mode": "grid", "axes": [[-1, 1, 2], [-1, 1, 2], [-1, 1, 2], [-1, 1, 2]]},
        "checks": ["curvature-symmetries", "weyl-norm", "cotton-divweyl", "soliton-residual", "lemma21", "lemma22"],
    },
    "warped-cylinder": _warped(
        "warped-cylinder",
        "Warped product with phi = 1 over the unit 3-sphere: f = t^2, constant lambda = 2",
        "1",
        1,
        1.0,
        [0.0, 1.0],
        0.0,
        [[0.0, 1.0]] + _FIBER,
        201,
        steps=64,
    ),
    "warped-cone": _warped(
        "warped-cone",
        "Flat cone phi = t over the unit 3-sphere: f' = A t, constant lambda = A",
        "t",
        1,
        1.0,
        [1.0, 2.0],
        0.7,
        [[1.0, 2.0]] + _FIBER,
        202,
        steps=64,
    ),
    "warped-cosh": _warped(
        "warped-cosh",
        "Warped product with phi = cosh t over the unit 3-sphere: proper, locally conformally flat",
        "cosh(t)",
        1,
        1.0,
        [0.0, 2.0],
        0.3,
        [[0.0, 2.0]] + _FIBER,
        203,
    ),
    "warped-hyperbolic": _warped(
        "warped-hyperbolic",
        "Hyperbolic 4-space as phi = cosh t over hyperbolic 3-space: Einstein, solved potential is proper",
        "cosh(t)",
        1,
        -1.0,
        [-1.0, 1.0],
        0.5,
        [[-1.0, 1.0]] + _FIBER,
        204,
    ),
    "warped-lorentzian": _warped(
        "warped-lorentzian",
        "Lorentzian warped product -dt^2 + e^(2t) (flat 3-space)",
        "exp(t)",
        -1,
        0.0,
        [0.0, 1.0],
        -0.4,
        [[0.0, 1.0]] + _FIBER,
        205,
    ),
}


def names() -> list:
    return sorted(CORPUS)


def get(name: str) -> dict:
    if name not in CORPUS:
        raise KeyError(f"no corpus entry {name!r}; try one of {names()}")
    return copy.deepcopy(CORPUS[name])
