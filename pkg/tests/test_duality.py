import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from almostsoliton import duality
from almostsoliton.geom import modified_extension, space_form_metric, walker_chart, walker_metric
from almostsoliton.tensor import Chart, DimensionError, MetricField, curvature_at
from oracles import random_extension_spec, random_metric, random_point, random_walker

PAIR_INDEX = {p: k for k, p in enumerate(duality.PAIRS)}


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def _form(a, b):
    v = np.zeros(6)
    v[PAIR_INDEX[(a, b)]] = 1.0
    return v


def test_euclidean_star():
    star = duality.star_matrix(np.eye(4))
    assert np.allclose(star @ _form(0, 1), _form(2, 3))
    assert np.allclose(star @ _form(0, 2), -_form(1, 3))
    assert np.allclose(star @ _form(0, 3), _form(1, 2))
    assert np.allclose(duality.inner_matrix(np.eye(4)), np.eye(6))


def test_orientation_reverses_star():
    g = np.diag([1.0, 2.0, 3.0, 0.5])
    assert np.allclose(duality.star_matrix(g, -1), -duality.star_matrix(g, 1))


@pytest.mark.parametrize("kind, sign", [("riemannian", 1), ("neutral", 1), ("lorentzian", -1)])
def test_star_squared(kind, sign):
    rng = _rng(21)
    for _ in range(5):
        g = random_metric(rng, kind)
        gp = g.value(random_point(rng))
        star = duality.star_matrix(gp)
        assert np.abs(star @ star - sign * np.eye(6)).max() < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_star_is_an_isometry(seed):
    rng = _rng(seed)
    gp = random_metric(rng, "neutral").value(random_point(rng))
    star = duality.star_matrix(gp)
    inner = duality.inner_matrix(np.linalg.inv(gp))
    assert np.abs(star.T @ inner @ star - inner).max() < 1e-10


def test_walker_null_two_form_is_self_dual():
    # the form metrically dual to d/dx1' ^ d/dx2' is dx1 ^ dx2
    for seed in range(10):
        rng = _rng(seed)
        g = random_walker(rng)
        p = random_point(rng)
        star = duality.hodge_star(g, p).matrix
        assert np.abs(star @ _form(0, 1) - _form(0, 1)).max() < 1e-12


def test_coordinate_fiber_form_self_dual_in_flat_walker():
    g = walker_metric([["0", "0"], ["0", "0"]])
    star = duality.hodge_star(g, [0.1, 0.2, 0.3, 0.4]).matrix
    assert np.allclose(star @ _form(2, 3), _form(2, 3))


def test_projectors():
    rng = _rng(4)
    g = random_metric(rng, "riemannian")
    pp, pm = duality.projectors(g, random_point(rng))
    P, M = pp.matrix, pm.matrix
    assert np.allclose(P @ P, P) and np.allclose(M @ M, M)
    assert np.allclose(P @ M, 0) and np.allclose(P + M, np.eye(6))


def test_orientation_flip_swaps_weyl_halves():
    rng = _rng(8)
    g = random_metric(rng, "riemannian", amp=0.3)
    cp = curvature_at(g, random_point(rng))
    wp, wm = duality.weyl_split_norms(cp, orientation=1)
    wp2, wm2 = duality.weyl_split_norms(cp, orientation=-1)
    assert wp == wm2 and wm == wp2


def test_conformally_flat_has_no_weyl_halves():
    cp = curvature_at(space_form_metric(1.0), [0.2, 0.1, -0.3, 0.4])
    wp, wm = duality.weyl_split_norms(cp)
    assert wp < 1e-12 and wm < 1e-12


def test_orthonormal_frames():
    rng = _rng(9)
    for kind, signs in (("riemannian", 4), ("neutral", 2)):
        gp = random_metric(rng, kind).value(random_point(rng))
        frame, eps = duality.orthonormal_frame(gp)
        duality.check_orthonormal(gp, frame, eps)
        assert duality.frame_orientation(frame) == 1
        assert int((eps > 0).sum()) == signs


def test_pseudo_frame_round_trip():
    rng = _rng(10)
    gp = random_metric(rng, "neutral").value(random_point(rng))
    frame, eps = duality.neutral_orthonormal_frame(gp)
    pseudo = duality.pseudo_from_orthonormal(frame, eps)
    duality.check_pseudo_orthonormal(gp, pseudo)
    back, eps2 = duality.orthonormal_from_pseudo(pseudo)
    assert np.allclose(back, frame) and np.allclose(eps2, eps)
    assert duality.frame_orientation(pseudo) == 1


def test_pseudo_frame_from_null_vector():
    g = walker_metric([["x1p^2", "x2"], ["x2", "x1*x2p"]])
    gp = g.value([0.3, 0.2, -0.4, 0.5])
    t = np.array([0.0, 0.0, 1.0, 0.0])  # d/dx1' is null
    frame = duality.pseudo_frame_from_null(gp, t)
    duality.check_pseudo_orthonormal(gp, frame)
    assert np.allclose(frame[0], t)
    assert duality.frame_orientation(frame) == 1


def test_frame_checks_reject_bad_frames():
    with pytest.raises(duality.FrameError):
        duality.check_orthonormal(np.eye(4), 2 * np.eye(4), np.ones(4))
    with pytest.raises(duality.FrameError):
        duality.check_pseudo_orthonormal(np.eye(4), np.eye(4))
    with pytest.raises(duality.FrameError):
        duality.pseudo_frame_from_null(np.eye(4), np.array([1.0, 0, 0, 0]))


def _verdicts(cp, rng):
    """Self-duality verdicts from the projector and the two frame criteria."""
    scale = max(1.0, float(np.abs(cp.weyl).max()))
    tol = 1e-8 * scale
    _, wm = duality.weyl_split_norms(cp)
    frame, eps = duality.neutral_orthonormal_frame(cp.g, rng=rng)
    r1 = np.abs(duality.selfdual_criterion_orthonormal(cp.weyl, frame, eps, g=cp.g)).max()
    pseudo = duality.pseudo_from_orthonormal(frame, eps)
    r2 = np.abs(duality.selfdual_criterion_pseudo(cp.weyl, pseudo, g=cp.g)).max()
    return wm < tol, r1 < tol, r2 < tol


def test_criteria_agree_with_projector():
    rng = _rng(31)
    seen = set()
    for k in range(10):
        g = modified_extension(random_extension_spec(rng)) if k % 2 == 0 else random_walker(rng)
        cp = curvature_at(g, random_point(rng))
        v = _verdicts(cp, rng)
        assert len(set(v)) == 1, v
        seen.add(v[0])
    assert seen == {True, False}


def test_riemannian_criterion():
    # self-dual Riemannian examples: conformally flat; generic metrics are not
    rng = _rng(5)
    for g, expect in ((space_form_metric(1.0), True), (random_metric(rng, "riemannian", amp=0.3), False)):
        cp = curvature_at(g, random_point(rng))
        frame, eps = duality.orthonormal_frame(cp.g)
        r = np.abs(duality.selfdual_criterion_orthonormal(cp.weyl, frame, eps, g=cp.g)).max()
        _, wm = duality.weyl_split_norms(cp)
        assert (r < 1e-9) == expect == (wm < 1e-9)


def test_dimension_checked():
    g = MetricField.from_strings(Chart(("x", "y", "z")), [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
    with pytest.raises(DimensionError):
        duality.hodge_star(g, [0, 0, 0])


def test_walker_chart_orientation():
    assert walker_chart().orientation == 1
