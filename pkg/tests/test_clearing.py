import sympy
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repzeta.algebra import BivarPoly
from repzeta.clearing import (
    ClearingStep,
    CyclotomicProduct,
    ParityError,
    convergence_abscissa,
    initial_pair,
    lattice_coordinates,
    ledger_to_global_factors,
    local_clearing_product,
    p_minus,
    p_plus,
    run_clearing,
    step_global_factors,
)

x = sympy.Symbol("x")


def cyclo_sympy(P: CyclotomicProduct):
    out = sympy.Integer(1)
    for sign, e in P.factors:
        out *= (1 - sign * x) ** e
    return out


def local_euler(kind: str, a: int, sign: int):
    """Local Euler factor at a place with character value ``sign`` as a function
    of ``x = q^(-w)``; ``a = 2`` means the factor of ``zeta(2w)``."""
    if kind == "zeta":
        return 1 / (1 - x**a)
    return 1 / (1 - sign * x**a)


same_parity = st.tuples(st.integers(-40, 40), st.integers(-40, 40)).filter(lambda t: (t[0] - t[1]) % 2 == 0)


@given(same_parity)
@settings(max_examples=150, deadline=None)
def test_global_factors_invert_the_local_cyclotomic_products(ab):
    """Oracle: the product of the step's global factors, localised at a place
    with epsilon*psi = +1 or -1, is exactly the inverse of P_+ or P_-."""
    alpha, beta = ab
    if alpha == 0 and beta == 0:
        return
    step = ClearingStep(5, 3, alpha, beta)
    for sign, P in ((1, p_plus(alpha, beta)), (-1, p_minus(alpha, beta))):
        prod = sympy.Integer(1)
        for g in step_global_factors(step):
            power = 2 if g.a == 2 * step.m else 1
            prod *= local_euler(g.kind, power, sign) ** g.exponent
        assert sympy.simplify(prod * cyclo_sympy(P) - 1) == 0


@given(same_parity)
@settings(max_examples=150, deadline=None)
def test_cyclotomic_products_remove_the_linear_term(ab):
    alpha, beta = ab
    Pp, Pm = p_plus(alpha, beta), p_minus(alpha, beta)
    # P_+(x) = 1 - alpha x + ..., P_-(x) = 1 - beta x + ...
    assert sympy.series(cyclo_sympy(Pp), x, 0, 2).removeO() == 1 - alpha * x
    assert sympy.series(cyclo_sympy(Pm), x, 0, 2).removeO() == 1 - beta * x


def test_parity_is_enforced():
    with pytest.raises(ParityError):
        p_plus(2, 1)
    with pytest.raises(ParityError):
        p_minus(3, 0)


def test_p_minus_first_case_uses_absolute_value_bound():
    # |beta| <= alpha: P_- = (1 - x)^((a + b)/2) (1 + x)^((a - b)/2)
    P = p_minus(9, 1)
    assert sympy.expand(cyclo_sympy(P) - (1 - x) ** 5 * (1 + x) ** 4) == 0
    P = p_minus(9, -1)
    assert sympy.expand(cyclo_sympy(P) - (1 - x) ** 4 * (1 + x) ** 5) == 0


def test_step_one_matches_hand_computation():
    ledger, pair = run_clearing(1)
    assert [s.as_dict() for s in ledger] == [{"m": 5, "n": 3, "alpha": 9, "beta": 1}]
    wp = pair.w_plus.sorted_terms()
    wm = pair.w_minus.sorted_terms()
    assert wp[:3] == [(0, 0, 1), (8, 5, -9), (10, 6, -45)]
    assert wp[-1] == (53, 32, 9)
    assert wm[:3] == [(0, 0, 1), (8, 5, -1), (10, 6, -5)]
    factors = [g.as_dict() for g in ledger_to_global_factors(ledger)]
    assert factors == [
        {"kind": "zeta", "a": 5, "b": 3, "exponent": 5},
        {"kind": "L", "a": 5, "b": 3, "exponent": 4},
    ]


def test_step_two():
    ledger, pair = run_clearing(2)
    assert [(s.m, s.n, s.alpha, s.beta) for s in ledger] == [(5, 3, 9, 1), (8, 5, -9, -1)]
    wp = pair.w_plus.sorted_terms()
    assert wp[1] == (10, 6, -45)
    assert wp[-1] == (125, 77, 9)


def test_lattice_invariant_through_depth_8():
    ledger, pair = run_clearing(8, y_max=120)
    for w in (pair.w_plus, pair.w_minus):
        for (n, m) in w.terms:
            assert lattice_coordinates(n, m) is not None
    for s in ledger:
        assert lattice_coordinates(s.n, s.m) is not None


@given(st.integers(0, 30), st.integers(0, 30))
def test_lattice_coordinates_roundtrip(u, v):
    n, m = 3 * u + 5 * v, 5 * u + 8 * v
    assert lattice_coordinates(n, m) == (u, v)


def test_lattice_rejects_off_lattice_points():
    assert lattice_coordinates(1, 1) is None
    assert lattice_coordinates(4, 5) is None


def test_truncated_clearing_agrees_with_full_clearing_below_cutoff():
    full_ledger, full = run_clearing(3)
    tr_ledger, tr = run_clearing(3, y_max=40)
    assert full_ledger == tr_ledger
    assert full.w_plus.truncate(40) == tr.w_plus
    assert full.w_minus.truncate(40) == tr.w_minus


def test_convergence_abscissa_decreases_with_depth():
    prev = 1.0
    for d in range(1, 8):
        _, pair = run_clearing(d, y_max=200)
        a = convergence_abscissa(pair)
        assert a <= prev + 1e-12
        assert a >= 5 / 8
        prev = a
    assert prev < 0.7


def test_local_clearing_product_reproduces_w_plus_one():
    """W_(+,0) times the step-1 local product is W_(+,1) at X = q, Y = q^(-s);
    the q^(3-5s) term is gone."""
    ledger, pair = run_clearing(1)
    q, s = 1.0e6, 0.7
    y = q ** (-s)
    w0 = initial_pair().w_plus.evaluate(q, y)
    val = w0 * local_clearing_product(ledger, 1, q, s)
    assert abs(val - pair.w_plus.evaluate(q, y)) < 1e-12
    assert abs(val - (1 - 9 * q ** (5 - 8 * s))) < 50 * q ** (6 - 10 * s)


def test_initial_pair_parity_check():
    initial_pair().check()
    bad = type(initial_pair())(BivarPoly({(0, 0): 1, (3, 5): 2}), BivarPoly({(0, 0): 1, (3, 5): 1}))
    with pytest.raises(ParityError):
        bad.check()
