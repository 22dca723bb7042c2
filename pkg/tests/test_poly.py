import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvetree import (
    Polynomial,
    UniPolyOverPoly,
    evaluate,
    format_polynomial,
    hessian_at,
    parse_polynomial,
    partial_derivative,
    sylvester_resultant,
)
from curvetree.errors import DegenerateInput, ExponentOverflow, PolySyntaxError, UnknownIdentifier

from oracles import sympy_poly, sympy_terms

COSTE = "x^2 + (y^2 - x)^2"


def test_parse_circle():
    assert parse_polynomial("x^2 + y^2").terms == {(2, 0): 1, (0, 2): 1}


def test_parse_coste_expands():
    assert parse_polynomial(COSTE).terms == {(2, 0): 2, (1, 2): -2, (0, 4): 1}


def test_syntax_error_offset():
    with pytest.raises(PolySyntaxError) as info:
        parse_polynomial("x^2 +")
    assert info.value.offset == 5


@pytest.mark.parametrize("text", ["x^2 + z", "sin(x)", "xy2 + w"])
def test_unknown_identifier(text):
    with pytest.raises(UnknownIdentifier):
        parse_polynomial(text)


def test_exponent_cap():
    parse_polynomial("x^64")
    with pytest.raises(ExponentOverflow):
        parse_polynomial("x^65")
    with pytest.raises(ExponentOverflow):
        parse_polynomial("(x^33)^2")


def test_zero_polynomial_degree():
    assert parse_polynomial("x - x").degree == -1
    assert parse_polynomial("x - x").terms == {}


@pytest.mark.parametrize("text", [
    COSTE,
    "x^16 + (y^2 + x)^2 (y^2 - x)^2",
    "x^6 + (y^4 + y^2 - x)^2 (y^2 - x)^2",
    "x^2 + (x - y^3 - y^2)^2 (x - y^2)^2",
    "3x^2 + 5y^2 + x^3 y",
    "1/2 x^2 - 3/7 x y + y^2",
])
def test_expansion_matches_sympy(text):
    mine = parse_polynomial(text).terms
    ref = sympy_terms(sympy_poly(text))
    assert {k: Fraction(int(v.p), int(v.q)) for k, v in ref.items()} == mine


def test_evaluate_examples():
    f = parse_polynomial(COSTE)
    assert evaluate(parse_polynomial("x^2 + y^2"), (0, 0)) == 0
    eps = 0.1
    assert evaluate(f, (math.sqrt(eps / 2), 0)) == pytest.approx(eps, rel=1e-14)
    assert evaluate(f, (math.sqrt(eps), eps**0.25)) == pytest.approx(eps, rel=1e-14)
    # exact arithmetic at rational points
    assert f.evaluate_exact((Fraction(1, 2), Fraction(1, 3))) == Fraction(1, 4) + (Fraction(1, 9) - Fraction(1, 2)) ** 2


def test_partial_derivative_examples():
    assert partial_derivative(parse_polynomial("x^2 + y^2"), "y").terms == {(0, 1): 2}
    assert partial_derivative(parse_polynomial(COSTE), "y").terms == {(0, 3): 4, (1, 1): -4}


def test_hessian_examples():
    h = hessian_at(parse_polynomial("x^2 + y^2"), (0, 0))
    assert (h.a11, h.a12, h.a22) == (2, 0, 2) and h.classify() == "positive_definite"
    h = hessian_at(parse_polynomial("3x^2 + 5y^2"), (0, 0))
    assert (h.a11, h.a12, h.a22) == (6, 0, 10) and h.classify() == "positive_definite"
    h = hessian_at(parse_polynomial(COSTE), (0, 0))
    assert (h.a11, h.a12, h.a22) == (4, 0, 0) and h.classify() == "positive_semidefinite"
    assert hessian_at(parse_polynomial("x^2 - y^2"), (0, 0)).classify() == "indefinite"


def test_resultant_examples():
    def res(g, h):
        return sylvester_resultant(UniPolyOverPoly.parse(g), UniPolyOverPoly.parse(h))

    assert res("x - (t^2 + t^3)", "y - t") == parse_polynomial("x - y^3 - y^2")
    assert res("x - t", "y - t") == parse_polynomial("x - y")
    assert res("x - t^2", "y - t") == parse_polynomial("x - y^2")


def test_resultant_needs_positive_degree():
    with pytest.raises(DegenerateInput):
        sylvester_resultant(UniPolyOverPoly.parse("x"), UniPolyOverPoly.parse("y - t"))


def random_elimination_case(rng: random.Random):
    """p(t) with small integer coefficients and a random rational s."""
    deg = rng.randint(1, 5)
    coeffs = [rng.randint(-4, 4) for _ in range(deg + 1)]
    coeffs[-1] = coeffs[-1] or 1
    text = "x - (" + " + ".join(f"({c}) t^{k}" for k, c in enumerate(coeffs)) + ")"
    s = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
    p_s = sum(Fraction(c) * s**k for k, c in enumerate(coeffs))
    return text, s, p_s


def test_random_elimination_identities():
    rng = random.Random(20261018)
    h = UniPolyOverPoly.parse("y - t")
    for _ in range(100):
        text, s, p_s = random_elimination_case(rng)
        r = sylvester_resultant(UniPolyOverPoly.parse(text), h)
        assert r.evaluate_exact((p_s, s)) == 0


# -- properties ----------------------------------------------------------------

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)
terms = st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)), small, max_size=8)
polys = terms.map(Polynomial)
points = st.tuples(st.floats(-2, 2), st.floats(-2, 2))


@settings(max_examples=200, deadline=None)
@given(polys, polys, points)
def test_evaluate_is_additive(p, q, pt):
    lhs = evaluate(p + q, pt)
    rhs = evaluate(p, pt) + evaluate(q, pt)
    scale = p.abs_scale(pt) + q.abs_scale(pt)
    assert abs(lhs - rhs) <= 4 * 2.0**-52 * scale


@settings(max_examples=200, deadline=None)
@given(polys)
def test_mixed_partials_commute(p):
    assert p.derivative("x").derivative("y") == p.derivative("y").derivative("x")


@settings(max_examples=200, deadline=None)
@given(polys)
def test_parse_print_parse(p):
    once = parse_polynomial(format_polynomial(p))
    assert once == p
    assert parse_polynomial(format_polynomial(once)) == once


def test_no_stored_zeros():
    p = Polynomial({(1, 0): 0, (0, 1): Fraction(3, 2)})
    assert p.terms == {(0, 1): Fraction(3, 2)}
    assert (p - p).terms == {}


def test_y_symmetry_and_divisibility():
    f = parse_polynomial(COSTE)
    assert f.is_y_symmetric()
    assert not parse_polynomial("x^2 + y^2 + y^3").is_y_symmetric()
    assert not partial_derivative(f, "y").is_divisible_by_x()
    assert parse_polynomial("x y + x^2").is_divisible_by_x()
