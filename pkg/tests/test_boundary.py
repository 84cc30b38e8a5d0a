import csv
import io
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repzeta.boundary import (
    PUISEUX,
    InadmissiblePlace,
    Rectangle,
    ZeroRecord,
    admissible_place,
    default_spacing,
    ff_kronecker_scan,
    kronecker_values,
    min_pairwise_distance,
    newton_zero,
    normalized_derivative,
    rectangle_scan,
    s_initial,
    trinomial_residual,
    zeros_to_csv,
)
from repzeta.local_a2 import E_value

ADMISSIBLE = [10009, 10039, 100003, 1000003]


def trinomial_root(n, q):
    """Oracle: root of the leading trinomial by mpmath.findroot from the
    uncorrected starting point."""
    with mpmath.workdps(40):
        qq = mpmath.mpf(q)
        f = lambda s: 1 + 9 * qq ** (3 - 5 * s) - 9 * qq ** (5 - 8 * s)  # noqa: E731
        L = mpmath.log(qq)
        df = lambda s: -45 * L * qq ** (3 - 5 * s) + 72 * L * qq ** (5 - 8 * s)  # noqa: E731
        return mpmath.findroot(f, s_initial(n, q, corrections=0), solver="newton", df=df)


def test_puiseux_constants_first_value():
    with mpmath.workdps(40):
        assert abs(PUISEUX.c1 - mpmath.mpf(3) ** mpmath.mpf(0.75) / 8) < 1e-35
        assert PUISEUX.c4 == mpmath.mpf(27) / 512


@pytest.mark.parametrize("q", [10009, 100003, 1000003, 10000019])
def test_corrections_approach_the_trinomial_root(q):
    root = trinomial_root(0, q)
    errs = [abs(s_initial(0, q, corrections=k) - root) for k in range(8)]
    assert errs[7] < errs[0] / 100
    assert errs[7] < 1.0 / q
    assert trinomial_residual(s_initial(0, q), q) < trinomial_residual(s_initial(0, q, 0), q)


@given(st.sampled_from(ADMISSIBLE), st.integers(-2, 2))
@settings(max_examples=12, deadline=None)
def test_newton_zero_is_a_zero_right_of_the_line(q, n):
    rec = newton_zero(n, q, 1e-10)
    assert rec.converged
    assert rec.e_abs < 1e-10
    with mpmath.workdps(40):
        assert abs(E_value(admissible_place(q), mpmath.mpc(rec.s_star))) < 1e-9
    assert 5 / 8 < rec.s_star.real < 5 / 8 + 2 * math.log(9) / (8 * math.log(q))
    assert abs(rec.s_star.imag - (1 + 2 * n) * math.pi / math.log(q)) < 0.05


def test_newton_zero_rejects_bad_input():
    with pytest.raises(InadmissiblePlace):
        newton_zero(0, 10007, 1e-10)  # 10007 = 2 mod 3 with eps = 1
    with pytest.raises(ValueError):
        newton_zero(0, 10009, 1e-16)
    with pytest.raises(ValueError):
        s_initial(20, 10009)


def test_normalized_derivative_tends_upward():
    # E'(s)/log q -> 8 - 5 * 9 q^(3-5s), which increases with q
    vals = [abs(normalized_derivative(newton_zero(0, q, 1e-10))) for q in (10009, 1000003, 100000039)]
    assert vals[0] < vals[1] < vals[2] < 8


def test_rectangle_geometry():
    R = Rectangle(0.0, 0.01)
    assert R.contains(complex(0.625 + 0.01, 0))
    assert not R.contains(complex(0.625, 0))
    assert R.c0 == pytest.approx(9 * math.pi / math.log(9))
    assert math.log(9) / (8 * math.log(R.dyadic_q0())) <= 0.01
    with pytest.raises(ValueError):
        Rectangle(0, 0)


def test_rectangle_scan_small_window_and_csv():
    R = Rectangle(0.0, 0.03)
    q0 = R.dyadic_q0()
    recs, diag = rectangle_scan(R, q0, 2 * q0, default_spacing(q0), limit=5)
    assert len(recs) == 5 and "5 zeros" in diag
    assert all(R.contains(r.s_star) for r in recs)
    assert min_pairwise_distance(recs) > 0
    rows = list(csv.reader(io.StringIO(zeros_to_csv(recs))))
    assert rows[0] == ["q", "n", "re", "im", "residual", "iterations"]
    assert [int(r[0]) for r in rows[1:]] == [r.q for r in recs]
    with pytest.raises(ValueError):
        rectangle_scan(R, 100, 1000)


def test_min_distance_of_fewer_than_two_points():
    assert min_pairwise_distance([]) == math.inf
    r = ZeroRecord(7, 0, 0.7 + 0j, 0.0, 1)
    assert min_pairwise_distance([r]) == math.inf
    assert min_pairwise_distance([r, ZeroRecord(7, 1, 0.7 + 0.5j, 0.0, 1)]) == pytest.approx(0.5)


def test_kronecker_scan_against_exact_evaluation():
    """Oracle: evaluate the four linear forms at 40 digits and apply the
    window test directly."""
    hits = ff_kronecker_scan(7, 3000)
    for m in range(1, 3001):
        vals = kronecker_values(7, m)
        d = [min(v - mpmath.floor(v), mpmath.ceil(v) - v) for v in vals]
        assert (m in hits) == all(x < 0.25 for x in d)


def test_kronecker_fractional_window_is_empty():
    # frac(l_1) in (1/4, 3/4) and frac(l_2) in (1/4, 3/4) are incompatible
    # with the linear relation between the forms
    assert ff_kronecker_scan(7, 10**5, window="fractional") == []
    with pytest.raises(ValueError):
        ff_kronecker_scan(9, 10)
    with pytest.raises(ValueError):
        ff_kronecker_scan(7, 10, window="nope")
