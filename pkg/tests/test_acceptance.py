"""Acceptance gate: one test per criterion, each logging a PASS/FAIL line.

The lines are echoed in the pytest terminal summary under "acceptance
criteria".  Thresholds are the contract values; nothing here is loosened
relative to them.
"""
import itertools
import json
import math

import numpy as np
import pytest

from almostsoliton import affine, cli, corpus, duality, ode, soliton
from almostsoliton import expr as ex
from almostsoliton.affine import AffineSurface
from almostsoliton.geom import (
    WarpedProductSpec,
    modified_extension,
    soliton_from_affine,
    space_form_metric,
    walker_metric,
    warped_metric,
)
from almostsoliton.tensor import Chart, MetricField, curvature_at
from oracles import partial, random_extension_spec, random_metric, random_point, random_walker

NAMES = ("x1", "x2", "x3")
PAIR_INDEX = {p: k for k, p in enumerate(duality.PAIRS)}
FLAT = AffineSurface.from_symbols({})
AFFINE_CONFIGS = {
    "flat/linear": (FLAT, "x1", 1.0),
    "flat/quadratic": (FLAT, "x1^2 + x1*x2 - 0.5*x2^2", 0.5),
    "non-flat": (AffineSurface.from_symbols({"G1_11": "x2"}), "x1*x2", 2.0),
}


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def _fmt(x):
    return f"{x:.2e}"


# ---------------------------------------------------------------------------
# 1. kernel exactness
# ---------------------------------------------------------------------------


def _random_polynomial(rng, nvars=3, degree=4, nterms=8):
    terms = {}
    while len(terms) < nterms:
        e = tuple(int(k) for k in rng.integers(0, degree + 1, size=nvars))
        if sum(e) <= degree:
            terms[e] = float(rng.uniform(-2, 2))
    return terms


def _poly_source(terms):
    parts = []
    for e, c in terms.items():
        mono = "*".join(f"{NAMES[i]}^{k}" for i, k in enumerate(e) if k)
        parts.append(f"({c!r})" + (f"*{mono}" if mono else ""))
    return " + ".join(parts)


def _poly_partial(terms, idx, p):
    """Closed-form mixed partial of a polynomial given as {exponents: coeff}."""
    total = 0.0
    for e, c in terms.items():
        e = list(e)
        coef = c
        for i in idx:
            coef *= e[i]
            e[i] -= 1
            if coef == 0:
                break
        if coef:
            total += coef * math.prod(p[i] ** e[i] for i in range(len(p)))
    return total


def _multi_indices(nvars, order=3):
    return [idx for k in range(order + 1) for idx in itertools.combinations_with_replacement(range(nvars), k)]


def _fd_partial(fn, p, idx, h=1e-2):
    """Nested Richardson differences, one level per index."""
    if not idx:
        return fn(p)
    return partial(lambda q: _fd_partial(fn, q, idx[1:], h), p, idx[0], h)


TRANSCENDENTALS = (
    "exp(x1*x2) + sin(x3)",
    "log(2 + x1^2)*cosh(x2 - x3)",
    "sqrt(1 + x1^2 + x2^2)/(1 + x3^2)",
    "tanh(x1 - x2)*sinh(x3) + cos(x1*x3)",
)


def test_criterion_01_kernel_exactness(record_criterion):
    rng = _rng(101)
    poly_err = 0.0
    for _ in range(200):
        terms = _random_polynomial(rng)
        p = rng.uniform(-1, 1, size=3)
        jet = ex.eval_jet(ex.parse(_poly_source(terms), NAMES), NAMES, p)
        for idx in _multi_indices(3):
            exact = _poly_partial(terms, idx, p)
            poly_err = max(poly_err, abs(jet.partial(*idx) - exact))
    fd_err = 0.0
    p = np.array([0.3, -0.4, 0.6])
    for src in TRANSCENDENTALS:
        e = ex.parse(src, NAMES)
        jet = ex.eval_jet(e, NAMES, p)

        def fn(q, e=e):
            return ex.evaluate(e, NAMES, q)

        for idx in _multi_indices(3)[1:]:
            fd_err = max(fd_err, abs(jet.partial(*idx) - _fd_partial(fn, p, idx)))
    ok = poly_err <= 1e-12 and fd_err <= 1e-6
    record_criterion(1, "kernel exactness", ok, f"poly {_fmt(poly_err)} <= 1e-12, transcendental {_fmt(fd_err)} <= 1e-6")
    assert ok


# ---------------------------------------------------------------------------
# 2. curvature oracles
# ---------------------------------------------------------------------------


def _flat_metrics(rng):
    A = rng.normal(size=(4, 4))
    const = A @ np.diag([1.0, 1.0, -1.0, -1.0]) @ A.T
    rows = [[repr(float(const[i, j])) for j in range(4)] for i in range(4)]
    chart = Chart(("x1", "x2", "x3", "x4"))
    polar = MetricField.from_strings(
        Chart(("r", "th", "z", "w")),
        [["1", "0", "0", "0"], ["0", "r^2", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
    )
    cone = warped_metric(WarpedProductSpec.create("t", 1, 1.0, (0.5, 2.0)))
    return [
        (MetricField.from_strings(chart, rows), [0.1, 0.2, 0.3, 0.4]),
        (polar, [0.8, 0.3, 0.1, -0.2]),
        (walker_metric([["0", "0"], ["0", "0"]]), [0.3, 0.1, 0.2, 0.4]),
        (cone, [1.2, 0.3, 0.2, -0.1]),
    ]


def test_criterion_02_curvature_oracles(record_criterion):
    rng = _rng(102)
    flat = 0.0
    for g, p in _flat_metrics(rng):
        cp = curvature_at(g, p)
        flat = max(flat, *(float(np.abs(a).max()) for a in (cp.riemann, cp.ricci, cp.weyl, cp.cotton)))

    sphere = 0.0
    for p in rng.uniform(-0.5, 0.5, size=(5, 4)):
        cp = curvature_at(space_form_metric(1.0), p)
        sphere = max(sphere, np.abs(cp.ricci - 3 * cp.g).max(), abs(cp.scalar - 12), np.abs(cp.weyl).max())

    # Hyperbolic 4-space is cosh(t) over a fiber of sectional curvature -1.
    hyper = 0.0
    hyp = warped_metric(WarpedProductSpec.create("cosh(t)", 1, -1.0, (-1.0, 1.0)))
    for t in (-0.7, 0.0, 0.4, 0.9):
        cp = curvature_at(hyp, [t, 0.2, -0.3, 0.1])
        hyper = max(hyper, np.abs(cp.ricci + 3 * cp.g).max())

    # With the sphere as fiber the same warping is not Einstein: the fiber
    # block is (4 - 3 cosh^2 t) / cosh^2 t times g, and rho_tt = -3.
    literal = 0.0
    lit = warped_metric(WarpedProductSpec.create("cosh(t)", 1, 1.0, (-1.0, 1.0)))
    for t in (-0.7, 0.0, 0.4, 0.9):
        cp = curvature_at(lit, [t, 0.2, -0.3, 0.1])
        fiber = (4 - 3 * math.cosh(t) ** 2) / math.cosh(t) ** 2
        literal = max(literal, abs(cp.ricci[0, 0] + 3), np.abs(cp.ricci[1:, 1:] - fiber * cp.g[1:, 1:]).max())
        assert np.abs(cp.ricci[1:, 1:] + 3 * cp.g[1:, 1:]).max() > 0.5

    ok = flat <= 1e-10 and sphere <= 1e-8 and hyper <= 1e-8 and literal <= 1e-8
    record_criterion(
        2,
        "curvature oracles",
        ok,
        f"flat {_fmt(flat)}, sphere {_fmt(sphere)}, hyperbolic (c_N=-1) {_fmt(hyper)}, "
        f"cosh over unit sphere matches its closed form {_fmt(literal)}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 3. duality
# ---------------------------------------------------------------------------


def _form(a, b):
    v = np.zeros(6)
    v[PAIR_INDEX[(a, b)]] = 1.0
    return v


def _verdicts(cp, rng):
    tol = 1e-8 * max(1.0, float(np.abs(cp.weyl).max()))
    _, wm = duality.weyl_split_norms(cp)
    frame, eps = duality.neutral_orthonormal_frame(cp.g, rng=rng)
    r1 = np.abs(duality.selfdual_criterion_orthonormal(cp.weyl, frame, eps, g=cp.g)).max()
    pseudo = duality.pseudo_from_orthonormal(frame, eps)
    r2 = np.abs(duality.selfdual_criterion_pseudo(cp.weyl, pseudo, g=cp.g)).max()
    return wm < tol, r1 < tol, r2 < tol


def test_criterion_03_duality(record_criterion):
    rng = _rng(103)
    star_sq = 0.0
    for kind in ("riemannian", "neutral"):
        for _ in range(10):
            star = duality.star_matrix(random_metric(rng, kind).value(random_point(rng)))
            star_sq = max(star_sq, np.abs(star @ star - np.eye(6)).max())

    walker_dev = 0.0
    for _ in range(20):
        star = duality.hodge_star(random_walker(rng), random_point(rng)).matrix
        walker_dev = max(walker_dev, np.abs(star @ _form(0, 1) - _form(0, 1)).max())

    disagreements, verdicts, flip = 0, set(), 0.0
    for k in range(50):
        if k % 2 == 0:
            g = modified_extension(random_extension_spec(rng, with_x=k % 4 == 0))
        else:
            g = random_walker(rng) if k % 4 == 1 else random_metric(rng, "neutral", amp=0.3)
        cp = curvature_at(g, random_point(rng))
        v = _verdicts(cp, rng)
        disagreements += len(set(v)) != 1
        verdicts.add(v[0])
        wp, wm = duality.weyl_split_norms(cp, orientation=1)
        wp2, wm2 = duality.weyl_split_norms(cp, orientation=-1)
        flip = max(flip, abs(wp - wm2), abs(wm - wp2))

    ok = star_sq <= 1e-10 and walker_dev == 0.0 and disagreements == 0 and verdicts == {True, False} and flip == 0.0
    record_criterion(
        3,
        "duality",
        ok,
        f"star^2 {_fmt(star_sq)}, Walker null form {walker_dev}, {disagreements}/50 verdict disagreements, flip {flip}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 4. Cotton identity
# ---------------------------------------------------------------------------


def test_criterion_04_cotton_identity(record_criterion):
    rng = _rng(104)
    worst = 0.0
    kinds = ("riemannian", "neutral", "lorentzian")
    for m in range(10):
        g = random_metric(rng, kinds[m % 3], amp=0.3)
        for _ in range(5):
            cp = curvature_at(g, random_point(rng))
            worst = max(worst, np.abs(cp.cotton + 2 * cp.div_weyl).max())
    ok = worst <= 1e-6
    record_criterion(4, "Cotton identity C = -2 div W", ok, f"max {_fmt(worst)} <= 1e-6 over 50 points")
    assert ok


# ---------------------------------------------------------------------------
# 5. self-dual Walker family
# ---------------------------------------------------------------------------


def test_criterion_05_extension_family_self_dual(record_criterion):
    rng = _rng(105)
    worst, plus = 0.0, 0.0
    for m in range(10):
        g = modified_extension(random_extension_spec(rng, with_x=m < 7))
        for _ in range(10):
            wp, wm = duality.weyl_split_norms(curvature_at(g, random_point(rng)))
            worst, plus = max(worst, wm), max(plus, wp)
    ok = worst <= 1e-8
    record_criterion(5, "extension metrics have W- = 0", ok, f"max |W-| {_fmt(worst)} <= 1e-8 at 100 points (max |W+| {_fmt(plus)})")
    assert ok


# ---------------------------------------------------------------------------
# 6, 7. solitons from affine data
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def affine_samples():
    out = {}
    for k, (label, (D, fhat, C)) in enumerate(AFFINE_CONFIGS.items()):
        s = soliton_from_affine(D, fhat, C)
        pts = _rng(600 + k).uniform(-0.8, 0.8, size=(100, 4))
        out[label] = (s, C, [curvature_at(s.metric, p) for p in pts])
    return out


def test_criterion_06_affine_solitons(record_criterion, affine_samples):
    res = formula = iso = 0.0
    plus = {}
    for label, (s, C, cps) in affine_samples.items():
        plus[label] = 0.0
        for cp in cps:
            f = s.potential(cp.point)
            lam = 1.5 * C * math.exp(-f)
            res = max(res, np.abs(soliton.residual(cp, s.potential, lam)).max())
            formula = max(
                formula,
                abs(soliton.infer_lambda(cp, s.potential) - lam),
                abs(cp.scalar - 6 * C * math.exp(-f)),
                abs(lam - cp.scalar / 4),
            )
            iso = max(iso, abs(soliton.isotropy(cp, s.potential)))
            plus[label] = max(plus[label], duality.weyl_split_norms(cp)[0])
    strict = [k for k, v in plus.items() if v > 1e-3]
    ok = res <= 1e-8 and formula <= 1e-9 and iso <= 1e-12 and bool(strict)
    record_criterion(
        6,
        "solitons from affine data",
        ok,
        f"residual {_fmt(res)}, lambda/tau formulas {_fmt(formula)}, isotropy {_fmt(iso)}, W+ > 1e-3 for {strict}",
    )
    assert ok


def test_criterion_07_kappa_einstein(record_criterion, affine_samples):
    good, missed = 0.0, 0
    for s, _, cps in affine_samples.values():
        for cp in cps:
            good = max(good, np.abs(soliton.kappa_einstein_check(cp, s.potential, 0.25, 0.0)).max())
            if abs(cp.scalar) > 1e-9:
                missed += np.abs(soliton.kappa_einstein_check(cp, s.potential, 0.0, 0.0)).max() <= 1e-8
    ok = good <= 1e-8 and missed == 0
    record_criterion(7, "kappa-Einstein structure", ok, f"kappa=1/4: {_fmt(good)}; kappa=0 passed at {missed} points with tau != 0")
    assert ok


# ---------------------------------------------------------------------------
# 8. trace and Weyl identities on every constructed soliton
# ---------------------------------------------------------------------------


def _constructed_solitons():
    out = []
    for label, (D, fhat, C) in AFFINE_CONFIGS.items():
        s = soliton_from_affine(D, fhat, C)
        out.append((label, s.metric, s.potential, s.soliton_function, [[-0.8, 0.8]] * 4))
    s = soliton_from_affine(FLAT, "0", 1.0)
    out.append(("einstein", s.metric, s.potential, s.soliton_function, [[-0.8, 0.8]] * 4))
    euclid = MetricField.from_strings(Chart(("x1", "x2", "x3", "x4")), np.eye(4, dtype=int).astype(str).tolist())
    out.append(("gaussian", euclid, "(x1^2 + x2^2 + x3^2 + x4^2)/2", "1", [[-1, 1]] * 4))
    for label, phi, cN, iv, df0 in (
        ("warped-cosh", "cosh(t)", 1.0, (0.0, 2.0), 0.3),
        ("warped-hyperbolic", "cosh(t)", -1.0, (0.0, 2.0), 0.3),
        ("warped-cylinder", "1", 1.0, (0.0, 1.0), 0.0),
    ):
        spec = WarpedProductSpec.create(phi, 1, cN, iv)
        sol = ode.solve_potential(spec, 0.0, df0, steps=200)
        g = warped_metric(spec)
        out.append((label, g, sol.potential_field(g.chart), sol.lambda_field(g.chart), [list(iv), [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]]))
    return out


def test_criterion_08_identities(record_criterion):
    rng = _rng(108)
    worst = {1: 0.0, 2: 0.0, 3: 0.0, 4: 0.0, 5: 0.0, "weyl": 0.0}
    for _, g, f, lam, box in _constructed_solitons():
        box = np.array(box, dtype=float)
        for _ in range(8):
            p = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random(4)
            cp = curvature_at(g, p)
            r = soliton.check_lemma21(cp, f, lam)
            for k in r:
                worst[k] = max(worst[k], r[k])
            worst["weyl"] = max(worst["weyl"], soliton.check_lemma22(cp, f))
    ok = max(worst[1], worst[2], worst[4]) <= 1e-7 and worst[5] <= 1e-6 and worst["weyl"] <= 1e-6
    record_criterion(
        8,
        "trace, divergence and Weyl identities",
        ok,
        f"(1) {_fmt(worst[1])} (2) {_fmt(worst[2])} (4) {_fmt(worst[4])} (5) {_fmt(worst[5])} "
        f"Weyl {_fmt(worst['weyl'])}; (3) reported {_fmt(worst[3])}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 9. warped pipeline
# ---------------------------------------------------------------------------


def test_criterion_09_warped_pipeline(record_criterion):
    spec = WarpedProductSpec.create("cosh(t)", 1, 1.0, (0.0, 2.0))
    defects = [np.abs(ode.solve_potential(spec, 0.0, 0.3, steps=n).defect()).max() for n in (32, 64, 128)]
    ratios = [defects[i] / defects[i + 1] for i in range(2)]

    sol = ode.solve_potential(spec, 0.0, 0.3, steps=200)
    pts = _rng(109).uniform([0.0, -0.5, -0.5, -0.5], [2.0, 0.5, 0.5, 0.5], size=(20, 4))
    rep = ode.verify_warped_soliton(spec, sol, pts, checks=("soliton-residual", "weyl-norm"))
    res, wnorm = rep.check("soliton-residual").max, rep.check("weyl-norm").max
    spread = float(sol.lam.max() - sol.lam.min())
    ok = min(ratios) >= 8 and res <= 1e-6 and wnorm <= 1e-7 and spread > 1e-3
    record_criterion(
        9,
        "warped ODE pipeline",
        ok,
        f"defect ratios {ratios[0]:.1f}, {ratios[1]:.1f}; residual {_fmt(res)}, |W| {_fmt(wnorm)}, lambda spread {spread:.3f}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 10, 11. Einstein example and affine tie-in
# ---------------------------------------------------------------------------


def test_criterion_10_einstein_example(record_criterion):
    s = soliton_from_affine(FLAT, "0", 1.0)
    worst = 0.0
    for p in _rng(110).uniform(-1, 1, size=(20, 4)):
        cp = curvature_at(s.metric, p)
        worst = max(worst, np.abs(cp.ricci - 1.5 * cp.g).max())
    ok = worst <= 1e-9
    record_criterion(10, "flat D, fhat = 0, C = 1 is Einstein", ok, f"|rho - 3/2 g| {_fmt(worst)} <= 1e-9")
    assert ok


def test_criterion_11_affine_tie_in(record_criterion):
    cases = [(AffineSurface.from_symbols({"G1_22": f"exp({s!r}*x1)*(1 + x2^2)"}), "2*x1", 1.3) for s in (0.5, 1.0, 1.5)]
    cases += [
        (FLAT, "0.3*x1 - 0.7*x2 + 2", 1.0),
        (FLAT, "x1^2", 1.0),
        (AffineSurface.from_symbols({"G1_11": "x2"}), "x1*x2", 2.0),
    ]
    pts = _rng(111).uniform(-1, 1, size=(30, 2))
    solitons, violations = 0, 0
    for D, fhat, C in cases:
        res = max(np.abs(affine.affine_soliton_residual(D, fhat, p)).max() for p in pts)
        if res <= 1e-12:
            solitons += 1
            phi = max(np.abs(affine.phi_from_fhat(D, fhat, C, p)).max() for p in pts)
            violations += phi > 1e-12
    ok = solitons >= 2 and violations == 0
    record_criterion(11, "affine solitons give Phi = 0", ok, f"{solitons} affine solitons among {len(cases)} cases, {violations} with Phi != 0")
    assert ok


# ---------------------------------------------------------------------------
# 12. CLI determinism
# ---------------------------------------------------------------------------


def test_criterion_12_cli_determinism(record_criterion, tmp_path, capsys):
    identical = True
    for name in ("warped-cosh", "proper-extension-nonflat"):
        outs = []
        for k in range(2):
            path = tmp_path / f"{name}-{k}.json"
            assert cli.main(["corpus", "run", name, "--out", str(path), "--seed", "7"]) == 0
            outs.append(path.read_bytes())
        identical &= outs[0] == outs[1]
    codes = {
        "pass": cli.main(["corpus", "run", "gaussian-soliton"]),
        "fail": cli.main(["corpus", "run", "warped-cosh", "--tolerance-scale", "1e-12"]),
    }
    mixed = tmp_path / "mixed.json"
    gauss = corpus.get("gaussian-soliton")
    mixed.write_text(json.dumps({"jobs": [gauss, dict(gauss, name="wrong-potential", potential={"f": "0", "lambda": "1"})]}))
    codes["mixed"] = cli.main(["run", str(mixed)])
    capsys.readouterr()
    ok = identical and codes == {"pass": 0, "fail": 1, "mixed": 1}
    record_criterion(12, "CLI determinism and exit status", ok, f"byte-identical {identical}, exit codes {codes}")
    assert ok
