"""Survey of the Weyl halves across metric families.

Samples random members of each family and reports the largest |W+| and |W-|
seen, which separates the self-dual families from generic metrics.

    python3 scripts/weyl_survey.py [--members N] [--points N] [--seed N]
"""
import argparse
import sys

import numpy as np

from almostsoliton import duality, sampling
from almostsoliton.affine import GAMMA_KEYS, AffineSurface
from almostsoliton.geom import ExtensionSpec, modified_extension, soliton_from_affine, walker_metric
from almostsoliton.tensor import curvature_at


def _poly(rng):
    c = [float(v) for v in rng.uniform(-0.5, 0.5, size=3)]
    return f"{c[0]!r} + {c[1]!r}*x1*x2 + {c[2]!r}*sin(x2)"


def _walker_poly(rng):
    c = [float(v) for v in rng.uniform(-0.5, 0.5, size=3)]
    return f"{c[0]!r}*x1p^2 + {c[1]!r}*x2*x2p + {c[2]!r}*sin(x1)"


def extension(rng, general_s=False):
    D = AffineSurface.from_symbols({k: _poly(rng) for k in GAMMA_KEYS})
    phi12 = _poly(rng)
    S = [[_poly(rng), _poly(rng)], [_poly(rng), _poly(rng)]] if general_s else [["1", "0"], ["0", "1"]]
    return modified_extension(
        ExtensionSpec(
            D,
            Phi=[[_poly(rng), phi12], [phi12, _poly(rng)]],
            T=[[_poly(rng), _poly(rng)], [_poly(rng), _poly(rng)]],
            S=S,
            X=[_poly(rng), _poly(rng)],
        )
    )


def walker(rng):
    a12 = _walker_poly(rng)
    return walker_metric([[_walker_poly(rng), a12], [a12, _walker_poly(rng)]])


def affine_soliton(rng):
    D = AffineSurface.from_symbols({k: _poly(rng) for k in GAMMA_KEYS})
    return soliton_from_affine(D, _poly(rng), float(rng.uniform(0.5, 2.0))).metric


FAMILIES = {
    "extension S = Id": extension,
    "extension general S": lambda rng: extension(rng, general_s=True),
    "generic Walker": walker,
    "soliton from affine data": affine_soliton,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Weyl half norms by family")
    parser.add_argument("--members", type=int, default=5)
    parser.add_argument("--points", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    rng = sampling.generator(args.seed)

    print(f"{'family':<26} {'max |W+|':>10} {'max |W-|':>10}")
    for label, make in FAMILIES.items():
        wp = wm = 0.0
        for _ in range(args.members):
            g = make(rng)
            for p in rng.uniform(-0.5, 0.5, size=(args.points, 4)):
                a, b = duality.weyl_split_norms(curvature_at(g, p))
                wp, wm = max(wp, a), max(wm, b)
        print(f"{label:<26} {wp:>10.3e} {wm:>10.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
