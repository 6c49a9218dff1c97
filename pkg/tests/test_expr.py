import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensor_bundle.errors import DomainError, ExprSyntaxError, UnknownIdentifier
from tensor_bundle.expr import BinOp, Call, Num, Pow, Var, eval_tower, parse
from tensor_bundle.jets import jet_space


def test_ast_shapes():
    assert parse("x1^2 + 1").ast == BinOp("+", Pow(Var(0), 2), Num(1.0))
    assert parse("sin(x2)*x1").ast == BinOp("*", Call("sin", Var(1)), Var(0))


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x1 +")
    assert err.value.offset == 4


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        parse("y + 1")
    with pytest.raises(UnknownIdentifier):
        parse("x3", 2)


def test_polynomial_tower():
    tw = eval_tower(parse("x1^2"), [3.0], 2)
    assert tw.value == 9.0
    assert tw.partial(0) == 6.0
    assert tw.partial(0, 0) == 2.0


def test_exp_tower_at_zero():
    tw = eval_tower(parse("exp(x1)"), [0.0], 3)
    assert all(v == pytest.approx(1.0, abs=1e-14) for v in tw.partials.values())


def test_mixed_partial_symmetry():
    tw = eval_tower(parse("x1*x2"), [2.0, 5.0], 2)
    assert tw.partial(0, 1) == tw.partial(1, 0) == 1.0


def test_domain_error():
    with pytest.raises(DomainError):
        parse("log(x1)").evaluate([-1.0])
    with pytest.raises(DomainError):
        parse("1/x1").evaluate([0.0])


def test_round_trip_source():
    e = parse("1 + x1^2/10 - sin(x2)*exp(-x1)")
    again = parse(str(e))
    x = [0.3, -0.7]
    assert again.evaluate(x) == pytest.approx(e.evaluate(x), rel=1e-15)


def _fd(e, x, i, h=1e-4):
    xp, xm = np.array(x, float), np.array(x, float)
    xp[i] += h
    xm[i] -= h
    return (e.evaluate(xp) - e.evaluate(xm)) / (2 * h)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_gradient_matches_finite_differences(a, b):
    e = parse("exp(x1/3)*cos(x2) + x1^3*x2 + sqrt(2 + sin(x1*x2))")
    tw = eval_tower(e, [a, b], 1)
    for i in range(2):
        assert tw.partial(i) == pytest.approx(_fd(e, [a, b], i), abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 2), st.floats(-1, 1))
def test_fourth_order_partials_match_closed_form(a, b):
    tw = eval_tower(parse("log(x1)*exp(x2)"), [a, b], 4)
    # ∂1^k ∂2^m [log(x1) e^{x2}] = (-1)^{k-1} (k-1)! / x1^k e^{x2} for k ≥ 1
    for k in range(1, 5):
        expect = (-1) ** (k - 1) * math.factorial(k - 1) / a ** k * math.exp(b)
        assert tw.partial(*([0] * k)) == pytest.approx(expect, rel=1e-10)
        if k < 4:
            assert tw.partial(*([0] * k + [1])) == pytest.approx(expect, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_jet_pythagorean_identity(a, b):
    x, y = jet_space(2, 3).variables([a, b])
    ident = (x * y).sin() ** 2 + (x * y).cos() ** 2
    assert ident.value == pytest.approx(1.0, abs=1e-14)
    for multi in ([1, 0], [0, 2], [2, 1], [0, 3]):
        assert ident.derivative(multi) == pytest.approx(0.0, abs=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 2), st.floats(-1, 1))
def test_jet_quotient_matches_closed_form(a, b):
    x, y = jet_space(2, 2).variables([a, b])
    q = y / x
    assert q.derivative([1, 0]) == pytest.approx(-b / a ** 2, rel=1e-12, abs=1e-14)
    assert q.derivative([2, 0]) == pytest.approx(2 * b / a ** 3, rel=1e-12, abs=1e-14)
    assert q.derivative([1, 1]) == pytest.approx(-1 / a ** 2, rel=1e-12)
