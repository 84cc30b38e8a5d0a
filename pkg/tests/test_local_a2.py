import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from repzeta.algebra import LaurentQ
from repzeta.local_a2 import (
    BadPlaceError,
    E_derivative,
    E_value,
    PlaceData,
    f_error,
    f_star_error,
    finite_group_summands,
    finite_group_zeta,
    leading_trinomial,
    local_coefficients,
    local_zeta_a2,
    normalized_E,
    specialized_E,
)

qs, ss = sympy.symbols("q s")
BRANCHES = [(1, 1), (1, 3), (-1, 1), (-1, 3)]
GOOD_PRIMES = [p for p in sympy.primerange(5, 400)]


def sympy_finite_group_terms(e: int, i: int):
    """Independent transcription of the character-degree list of SL3/SU3 over F_q,
    as (multiplicity, degree) pairs in sympy."""
    R = sympy.Rational
    b7 = (qs + e) * (qs - e) ** 2
    b8 = (qs**2 + e * qs + 1) * (qs + e)
    return [
        (1, 1),
        (1, qs**2 + e * qs),
        (qs - 1 - e, qs**2 + e * qs + 1),
        ((qs**2 - qs - 1 + e) / 2, qs**3 - e),
        (1, qs**3),
        (qs - 1 - e, qs**3 + e * qs**2 + qs),
        ((qs**2 + e * qs - 2) / 3, b7),
        (R(2, 3) * i**2, b7 / i),
        ((qs - e) * (qs - 3 - e) / 6, b8),
        (R(1, 3) * i**2, b8 / i),
    ]


def group_order(q: int, e: int) -> int:
    return q**3 * (q**3 - e) * (q**2 - 1)


def laurent_to_sympy(p: LaurentQ):
    return sum((sympy.Rational(c.numerator, c.denominator) * qs**k for k, c in p.items()), sympy.Integer(0))


@pytest.mark.parametrize("eps,iota", BRANCHES)
def test_sum_of_squared_degrees_is_the_group_order(eps, iota):
    val = finite_group_zeta(eps, iota).at_integer_s(-2)
    assert sympy.expand(laurent_to_sympy(val) - qs**3 * (qs**3 - eps) * (qs**2 - 1)) == 0


@pytest.mark.parametrize("eps,iota", BRANCHES)
def test_class_number_matches_independent_summation(eps, iota):
    ours = laurent_to_sympy(finite_group_zeta(eps, iota).at_integer_s(0))
    oracle = sympy.expand(sum(mult for mult, _ in sympy_finite_group_terms(eps, iota)))
    assert sympy.expand(ours - oracle) == 0
    if eps == 1:
        assert sympy.expand(ours - (qs**2 + qs + (8 if iota == 3 else 0))) == 0


@pytest.mark.parametrize("eps,iota", BRANCHES)
@pytest.mark.parametrize("k", [1, 3])
def test_summands_match_independent_transcription(eps, iota, k):
    ours = sum((laurent_to_sympy(t.at_integer_s(-k)) for t in finite_group_summands(eps, iota)), 0)
    oracle = sum(mult * deg**k for mult, deg in sympy_finite_group_terms(eps, iota))
    assert sympy.expand(ours - oracle) == 0


def test_group_order_spot_check_q5():
    place = PlaceData.from_q(5, 1)
    assert place.iota == 1
    degs = finite_group_zeta(1, 1).specialize(5)
    assert sum(c * d * d for d, c in degs.items()) == 372000 == group_order(5, 1)


@pytest.mark.parametrize("q", [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43])
@pytest.mark.parametrize("eps", [1, -1])
def test_finite_group_degrees_are_integral_and_square_sum(q, eps):
    place = PlaceData.from_q(q, eps)
    degs = finite_group_zeta(place.epsilon, place.iota).specialize(q)
    for d, c in degs.items():
        assert c.denominator == 1 and c > 0
    assert sum(c * d * d for d, c in degs.items()) == group_order(q, eps)


def test_place_data_invariants():
    p = PlaceData.from_q(7)
    assert (p.psi, p.iota, p.sign) == (1, 3, 1)
    p = PlaceData.from_q(11, -1)
    assert (p.psi, p.iota, p.sign) == (-1, 3, 1)
    p = PlaceData.from_q(11, 1)
    assert (p.iota, p.sign) == (1, -1)
    for bad in (2, 3, 9, 4):
        with pytest.raises(BadPlaceError):
            PlaceData.from_q(bad)
    with pytest.raises(ValueError):
        PlaceData(7, 1, 1, 1)


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_local_coefficients_low_degrees(q):
    place = PlaceData.from_q(q, 1)
    co = local_coefficients(place, q * q + q + 1)
    assert co[1] == 1
    assert co[q * q + q] == 1
    assert co[q * q + q + 1] == q - 2
    assert all(isinstance(c, int) and c > 0 for c in co.values())


@given(st.sampled_from(GOOD_PRIMES[:12]), st.sampled_from([1, -1]))
@settings(max_examples=20, deadline=None)
def test_local_series_equals_rational_form(q, eps):
    """The Dirichlet series of the expanded coefficients equals E over the
    geometric denominators (truncation error is negligible at s = 3)."""
    place = PlaceData.from_q(q, eps)
    cutoff = q**7
    co = local_coefficients(place, cutoff)
    s = mpmath.mpf(3)
    with mpmath.workdps(30):
        series = mpmath.fsum(c * mpmath.mpf(n) ** (-s) for n, c in co.items())
        qq = mpmath.mpf(q)
        closed = E_value(place, s) / ((1 - qq ** (1 - 2 * s)) * (1 - qq ** (2 - 3 * s)))
        assert abs(series - closed) < mpmath.mpf(q) ** (-7 * 3 + 8)


@pytest.mark.parametrize("eps,iota", BRANCHES)
def test_normalized_E_has_constant_term_one_and_integer_bases(eps, iota):
    q = {(1, 1): 11, (1, 3): 7, (-1, 1): 7, (-1, 3): 11}[(eps, iota)]
    place = PlaceData.from_q(q, eps)
    assert place.iota == iota
    terms = normalized_E(place).specialize(q)
    assert terms[1] == 1
    # E(0) = value of the cleared factor at s = 0 as an exact polynomial identity
    val = normalized_E(place).at_integer_s(0)(q)
    assert val == sum(terms.values())


@pytest.mark.parametrize("q", [101, 1009, 10007])
def test_leading_trinomial_and_error_decay(q):
    place = PlaceData.from_q(q, 1 if q % 3 == 1 else -1)
    assert place.sign == 1 and place.iota == 3
    for sigma in (0.65, 0.7, 0.75):
        err = abs(f_error(place, sigma))
        bound = q ** max(4 - 8 * sigma, -2 * sigma) * 50
        assert err < bound
    # zeta of the finite group: 1 + q^(2-3s) + q^(1-2s) + O(q^(-2s))
    assert abs(f_star_error(place, 2)) < 10 * q ** (-4.0)


def test_E_derivative_matches_finite_difference():
    place = PlaceData.from_q(1009, 1)
    s = mpmath.mpc(0.66, 0.3)
    h = mpmath.mpf("1e-12")
    with mpmath.workdps(40):
        fd = (E_value(place, s + h) - E_value(place, s - h)) / (2 * h)
        assert abs(fd - E_derivative(place, s)) < 1e-8 * abs(fd)


def test_specialized_E_bases_are_integers_with_iota_scaling():
    place = PlaceData.from_q(7, 1)
    terms = dict(specialized_E(place))
    assert terms[1] == 1
    assert all(isinstance(n, int) and n >= 1 for n in terms)
    # 9 q^(3-5s) is q^3 * 9 * (q^5)^(-s) after collection with lower-order terms
    assert abs(leading_trinomial(place, 2) - 1) < 1e-3


def test_local_zeta_carries_place():
    lf = local_zeta_a2(PlaceData.from_q(13))
    assert lf.q == 13
    assert len(lf.denominators) == 2
