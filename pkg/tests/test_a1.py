import math

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from repzeta.a1 import (
    BranchError,
    a1_branch_probe,
    a1_continuation_eval,
    a1_factor_probe,
    a1_ff_ratios,
    a1_graded_local,
    a1_level_zero,
    a1_local_coefficients,
    branch_constant,
    branch_model,
    local_zeta_a1,
)
from repzeta.global_assembly import GroupConfig, dirichlet_coefficients, dirichlet_sum, growth_law
from repzeta.lfunctions import PoleError
from repzeta.local_a2 import BadPlaceError

SL2 = GroupConfig.sl2_number_field()
A1_PRIMES = [int(p) for p in sympy.primerange(5, 200)]


def sl2_character_degrees(q):
    """Oracle: the classical character table of SL2(F_q), q odd."""
    return (
        [1, q]
        + [q + 1] * ((q - 3) // 2)
        + [q - 1] * ((q - 1) // 2)
        + [(q + 1) // 2] * 2
        + [(q - 1) // 2] * 2
    )


@pytest.mark.parametrize("q", [5, 7, 11, 13, 17, 19, 23])
def test_level_zero_matches_character_table(q):
    degs = sl2_character_degrees(q)
    assert sum(d * d for d in degs) == q * (q * q - 1)
    assert len(degs) == q + 4
    ours = a1_level_zero(1).specialize(q)
    ref: dict = {}
    for d in degs:
        ref[d] = ref.get(d, 0) + 1
    assert ours == ref


@given(st.sampled_from(A1_PRIMES[:10]), st.sampled_from([1, -1]))
@settings(max_examples=20, deadline=None)
def test_local_coefficients_match_rational_form(q, eps):
    """The expanded coefficients reproduce the closed form at s = 4."""
    X = q**6
    co = a1_local_coefficients(q, eps, X)
    assert all(c > 0 for c in co.values())
    lf = local_zeta_a1(q, eps)
    with mpmath.workdps(30):
        s = mpmath.mpf(4)
        series = mpmath.fsum(c * mpmath.mpf(n) ** (-s) for n, c in co.items())
        qq = mpmath.mpf(q)
        num = mpmath.fsum(
            mpmath.mpf(c.numerator) / c.denominator * mpmath.mpf(n) ** (-s)
            for n, c in lf.numerator.specialize(q).items()
        )
        closed = num / (1 - qq ** (1 - s))
        # omitted shadow terms have n > q^6 and coefficient < q^(k+2), k >= 4
        assert abs(series - closed) < 10 * qq ** (-18)


def test_bad_places():
    with pytest.raises(BadPlaceError):
        local_zeta_a1(3)
    with pytest.raises(BadPlaceError):
        a1_local_coefficients(9, 1, 100)


def test_graded_local_series():
    ser = a1_graded_local(7, 1, 1, 5)
    c = 4 * 7 + 6 * 6
    assert ser == [1, 10, c, 7 * c, 49 * c, 343 * c]


def test_continuation_matches_dirichlet_sum_at_three():
    table = dirichlet_coefficients(SL2, 20000)
    head, tail = dirichlet_sum(table, 3, growth_law(SL2))
    val, err = a1_continuation_eval(SL2, 3, with_error=True)
    assert head - err <= mpmath.re(val) <= head + tail + err


def test_simple_pole_at_two():
    with pytest.raises(PoleError):
        a1_continuation_eval(SL2, 2)
    vals = [float(mpmath.re((s - 2) * a1_continuation_eval(SL2, s))) for s in (2.01, 2.001, 2.0001)]
    assert abs(vals[2] - vals[1]) < abs(vals[1] - vals[0])
    assert 1 < vals[2] < 3
    with pytest.raises(BranchError):
        a1_continuation_eval(SL2, 1.0)


def test_branch_probe_and_model():
    c = branch_constant(None)
    assert c == 1.0
    path = [1.01, 1.001, 1.0001]
    probe = a1_branch_probe(path)
    model = [branch_model(s) for s in path]
    errs = [abs(p - m) / m for p, m in zip(probe, model)]
    assert errs[2] < errs[1] < errs[0] < 0.15
    assert errs[1] < 0.02
    assert abs(probe[-1] - 1 / 128) < abs(probe[0] - 1 / 128)
    with pytest.raises(ValueError):
        a1_branch_probe([0.9])


def test_factor_probe_tends_to_one():
    vals = a1_factor_probe([1.01, 1.001, 1.0001, 1.00001])
    errs = [abs(v - 1) for v in vals]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 0.01


def test_ff_ratios_stabilize():
    r = a1_ff_ratios(GroupConfig.sl2_ff(7), 20)
    tail = r[10:]
    assert (max(tail) - min(tail)) / tail[-1] < 1e-6
    assert math.isfinite(tail[-1]) and tail[-1] > 0
