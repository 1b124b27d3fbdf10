import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from almostsoliton import expr as ex
from oracles import richardson

NAMES = ("x", "y", "t")


def ev(src, point=(0.3, -0.4, 0.7)):
    return ex.evaluate(ex.parse(src, NAMES), NAMES, point)


@pytest.mark.parametrize(
    "src, value",
    [
        ("1 + 2*3", 7.0),
        ("2^3^2", 512.0),
        ("-2^2", -4.0),
        ("(-2)^2", 4.0),
        ("2*-3", -6.0),
        ("8/4/2", 1.0),
        ("10 - 4 - 3", 3.0),
        ("x^-2", 1 / 0.09),
        ("pi", math.pi),
        ("2.5e-1", 0.25),
        ("exp(0)", 1.0),
        ("sqrt(4) + log(1)", 2.0),
    ],
)
def test_precedence_and_values(src, value):
    assert ev(src) == pytest.approx(value)


def test_variables():
    assert ev("x*y + t") == pytest.approx(0.3 * -0.4 + 0.7)
    assert ex.variables(ex.parse("x*sin(t)+2", NAMES)) == {"x", "t"}


def test_parse_error_offset():
    with pytest.raises(ex.ParseError) as err:
        ex.parse("x + * y", NAMES)
    assert err.value.offset == 4
    with pytest.raises(ex.ParseError):
        ex.parse("sin(x", NAMES)
    with pytest.raises(ex.ParseError):
        ex.parse("", NAMES)


def test_non_integer_exponent_rejected():
    with pytest.raises(ex.ParseError):
        ex.parse("x^0.5", NAMES)
    with pytest.raises(ex.ParseError):
        ex.parse("x^y", NAMES)


def test_unknown_identifier():
    with pytest.raises(ex.UnknownIdentifierError) as err:
        ex.parse("x + z", NAMES)
    assert err.value.name == "z"
    with pytest.raises(ex.UnknownIdentifierError):
        ex.parse("foo(x)", NAMES)


@pytest.mark.parametrize("src", ["log(x - 1)", "sqrt(-1 - x)", "1/(x - x)", "(y - y)^-1"])
def test_domain_errors(src):
    with pytest.raises(ex.DomainError):
        ev(src)


def test_cosh_derivative_against_richardson():
    e = ex.parse("cosh(t)", ("t",))
    jet = ex.eval_jet(e, ("t",), [0.5])
    fd = richardson(lambda s: math.cosh(s), 0.5, 1e-5)
    assert jet.partial(0) == pytest.approx(fd, abs=1e-8)
    assert jet.partial(0, 0, 0) == pytest.approx(math.sinh(0.5), abs=1e-14)


@pytest.mark.parametrize("func", ["exp", "log", "sin", "cos", "sinh", "cosh", "tanh", "sqrt"])
def test_transcendental_derivatives(func):
    names = ("x", "y")
    e = ex.parse(f"{func}(1.3 + 0.4*x - 0.2*y)", names)
    p = np.array([0.2, 0.1])
    jet = ex.eval_jet(e, names, p)
    f = lambda q: ex.evaluate(e, names, q)  # noqa: E731
    for i in range(2):
        fd = richardson(lambda s: f(p + s * np.eye(2)[i]), 0.0)
        assert jet.partial(i) == pytest.approx(fd, abs=1e-9)
    # second derivative by differencing the analytic first derivative
    d1 = ex.diff(e, "x")
    fd2 = richardson(lambda s: ex.evaluate(d1, names, p + [s, 0]), 0.0)
    assert jet.partial(0, 0) == pytest.approx(fd2, abs=1e-8)


def test_symbolic_diff_agrees_with_jets():
    names = ("x", "y")
    e = ex.parse("x^3*sin(y) + exp(x*y)/(1 + y^2) - tanh(x)", names)
    p = [0.4, -0.3]
    jet = ex.eval_jet(e, names, p)
    for i, n in enumerate(names):
        assert ex.evaluate(ex.diff(e, n), names, p) == pytest.approx(jet.partial(i), rel=1e-12)
    dxy = ex.diff(ex.diff(e, "x"), "y")
    assert ex.evaluate(dxy, names, p) == pytest.approx(jet.partial(0, 1), rel=1e-12)


def test_pullback_reads_on_larger_chart():
    e = ex.parse("x1^2*exp(x2)", ("x1", "x2"))
    big = ("x1", "x2", "x1p", "x2p")
    f = ex.pullback(e, big)
    jet = ex.eval_jet(f, big, [0.5, 0.2, 3.0, -1.0])
    assert jet.partial(2) == 0.0 and jet.partial(3, 0) == 0.0
    assert jet.value == pytest.approx(0.25 * math.exp(0.2))
    with pytest.raises(ex.UnknownIdentifierError):
        ex.pullback(e, ("t",))


# random expression trees for round-trip properties
_leaf = st.one_of(
    st.sampled_from(["x", "y", "t", "pi"]),
    st.integers(0, 9).map(str),
    st.floats(0.1, 5.0).map(lambda v: repr(round(v, 3))),
)


def _extend(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*", "/"]), children).map(lambda a: f"({a[0]}){a[1]}({a[2]})")
    unary = children.map(lambda a: f"-({a})")
    powr = st.tuples(children, st.integers(-2, 3)).map(lambda a: f"({a[0]})^{a[1]}")
    call = st.tuples(st.sampled_from(["sin", "cos", "exp", "tanh"]), children).map(lambda a: f"{a[0]}({a[1]})")
    return st.one_of(binary, unary, powr, call)


exprs = st.recursive(_leaf, _extend, max_leaves=8)


@given(exprs)
def test_round_trip_is_stable(src):
    e = ex.parse(src, NAMES)
    s = ex.to_string(e)
    e2 = ex.parse(s, NAMES)
    assert ex.to_string(e2) == s
    try:
        a = ex.evaluate(e, NAMES, (0.3, -0.4, 0.7))
    except ex.DomainError:
        return
    b = ex.evaluate(e2, NAMES, (0.3, -0.4, 0.7))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12) or (np.isnan(a) and np.isnan(b))
