from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from repzeta.algebra import BivarPoly, EvaluationError, LaurentQ

qs = sympy.Symbol("q")
X, Y = sympy.symbols("X Y")

laurent_terms = st.dictionaries(
    st.integers(-4, 6), st.fractions(min_value=-20, max_value=20, max_denominator=7), max_size=5
)
bivar_terms = st.dictionaries(
    st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(-30, 30), max_size=5
)


def to_sympy(p: LaurentQ):
    return sum((sympy.Rational(c.numerator, c.denominator) * qs**e for e, c in p.items()), sympy.Integer(0))


def bivar_to_sympy(p: BivarPoly):
    return sum((c * X**n * Y**m for (n, m), c in p.terms.items()), sympy.Integer(0))


@given(laurent_terms, laurent_terms)
@settings(max_examples=60, deadline=None)
def test_laurent_ring_operations_match_sympy(a, b):
    A, B = LaurentQ(a), LaurentQ(b)
    assert sympy.expand(to_sympy(A * B) - to_sympy(A) * to_sympy(B)) == 0
    assert sympy.expand(to_sympy(A + B) - to_sympy(A) - to_sympy(B)) == 0
    assert sympy.expand(to_sympy(A - B) - to_sympy(A) + to_sympy(B)) == 0


@given(laurent_terms, st.integers(2, 40))
@settings(max_examples=60, deadline=None)
def test_laurent_evaluation_is_exact(a, q0):
    A = LaurentQ(a)
    assert A(q0) == sympy.Rational(to_sympy(A).subs(qs, q0))
    assert isinstance(A(q0), Fraction)


@given(laurent_terms, st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_laurent_power_matches_repeated_product(a, k):
    A = LaurentQ(a)
    prod = LaurentQ.const(1)
    for _ in range(k):
        prod = prod * A
    assert A**k == prod


def test_laurent_monomial_inverse_and_division():
    q = LaurentQ.q()
    assert (3 * q**2) ** -1 == LaurentQ({-2: Fraction(1, 3)})
    assert ((q**2 + q) / 2)(5) == 15
    with pytest.raises(EvaluationError):
        (q + 1) ** -1
    with pytest.raises(EvaluationError):
        q / (q + 1)
    with pytest.raises(ZeroDivisionError):
        q / 0


def test_laurent_zero_coefficients_are_dropped_and_hash_is_structural():
    a = LaurentQ({1: 2, 3: 0})
    assert a.terms == {1: Fraction(2)}
    assert hash(a) == hash(LaurentQ({1: 2}))
    assert LaurentQ().is_zero()


@given(bivar_terms, bivar_terms)
@settings(max_examples=60, deadline=None)
def test_bivar_product_matches_sympy(a, b):
    A, B = BivarPoly(a), BivarPoly(b)
    assert sympy.expand(bivar_to_sympy(A * B) - bivar_to_sympy(A) * bivar_to_sympy(B)) == 0


@given(bivar_terms, bivar_terms, st.integers(0, 8))
@settings(max_examples=60, deadline=None)
def test_truncated_product_equals_truncated_full_product(a, b, y_max):
    A, B = BivarPoly(a), BivarPoly(b)
    assert A.mul_truncated(B, y_max) == (A * B).truncate(y_max)


def test_bivar_order_is_y_major():
    p = BivarPoly({(5, 1): 1, (0, 2): 2, (1, 1): 3})
    assert p.sorted_terms() == [(1, 1, 3), (1, 5, 1), (2, 0, 2)]
    assert p.top_term() == (2, 0, 2)


def test_bivar_rejects_negative_exponents():
    with pytest.raises(ValueError):
        BivarPoly({(-1, 0): 1})
