import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repzeta.lfunctions import (
    EtaShift,
    PoleError,
    UnsupportedConfiguration,
    chi_mod3,
    dirichlet_L_mod3,
    ff_L_shifted,
    ff_zeta,
    hurwitz_zeta,
    partial_L_mod3,
    partial_zeta,
    riemann_zeta,
    witten_dimension_zeta,
    witten_residue_at_two_thirds,
    witten_sl3,
)
from repzeta.primes import ff_place_count


@given(
    st.floats(min_value=-6, max_value=8, allow_nan=False).filter(lambda x: abs(x - 1) > 1e-3),
    st.floats(min_value=-30, max_value=30, allow_nan=False),
)
@settings(max_examples=40, deadline=None)
def test_riemann_zeta_matches_mpmath(sigma, t):
    s = mpmath.mpc(sigma, t)
    with mpmath.workdps(30):
        ref = mpmath.zeta(s)
        assert abs(riemann_zeta(s) - ref) <= 1e-20 * max(1, abs(ref))


@given(st.floats(min_value=-3, max_value=6), st.floats(min_value=0.1, max_value=50))
@settings(max_examples=30, deadline=None)
def test_hurwitz_matches_mpmath(sigma, a):
    if abs(sigma - 1) < 1e-3:
        return
    with mpmath.workdps(30):
        ref = mpmath.zeta(sigma, a)
        assert abs(hurwitz_zeta(sigma, a) - ref) <= 1e-18 * max(1, abs(ref))


def test_zeta_pole():
    with pytest.raises(PoleError):
        riemann_zeta(1)


@pytest.mark.parametrize("s", [0.5, 1, 2, 3.5, mpmath.mpc(0.5, 14), -2.5])
def test_dirichlet_L_matches_mpmath(s):
    with mpmath.workdps(30):
        ref = mpmath.dirichlet(s, [0, 1, -1])
        assert abs(dirichlet_L_mod3(s) - ref) < 1e-20 * max(1, abs(ref))


def test_L_at_one_closed_form():
    with mpmath.workdps(30):
        assert abs(dirichlet_L_mod3(1) - mpmath.pi / (3 * mpmath.sqrt(3))) < 1e-14


def test_chi_and_partial_euler_factors():
    assert [chi_mod3(n) for n in range(7)] == [0, 1, -1, 0, 1, -1, 0]
    s = mpmath.mpf(3)
    assert abs(partial_zeta(s) - mpmath.zeta(s) * (1 - 2**-3) * (1 - 3**-3)) < 1e-25
    assert abs(partial_L_mod3(s) - dirichlet_L_mod3(s) * (1 + 2**-3)) < 1e-25


@pytest.mark.parametrize("Q", [5, 7, 11, 13])
def test_ff_zeta_counts_effective_divisors(Q):
    """Coefficients of 1/((1-t)(1-Qt)) equal the Euler product over places
    counted by monic irreducibles plus infinity."""
    N = 6
    ser = [mpmath.mpf(1)] + [mpmath.mpf(0)] * N
    for d in range(1, N + 1):
        for _ in range(ff_place_count(Q, d)):
            # multiply by 1/(1 - t^d)
            for k in range(d, N + 1):
                ser[k] += ser[k - d]
    for n in range(N + 1):
        assert ser[n] == (Q ** (n + 1) - 1) // (Q - 1)
    z = ff_zeta(Q)
    t = mpmath.mpf("0.001")
    assert abs(z.at_t(t) - sum(c * t**n for n, c in enumerate(ser))) < 2 * (Q * t) ** (N + 1) + 1e-14


def test_ff_zeta_poles_and_shift():
    z = ff_zeta(7)
    with pytest.raises(PoleError):
        z(1)
    with pytest.raises(PoleError):
        z(0)
    assert EtaShift.for_field(7).eta == 0 and EtaShift.for_field(5).eta == 1
    L = ff_L_shifted(5, EtaShift.for_field(5))
    s = mpmath.mpf(2)
    shifted = ff_zeta(5)(s + mpmath.j * mpmath.pi / mpmath.log(5))
    assert abs(L(s) - shifted) < 1e-14
    with pytest.raises(UnsupportedConfiguration):
        ff_L_shifted(5, EtaShift(1), chi_trivial=False)
    with pytest.raises(ValueError):
        ff_zeta(9)


def brute_witten(s, M=400):
    """Double sum up to M plus an integral tail in one variable."""
    total = mpmath.mpf(0)
    for m in range(1, M + 1):
        for n in range(1, M + 1):
            total += (m * n * (m + n)) ** (-s)
    return total


def test_witten_special_values():
    assert abs(witten_sl3(1) - 2 * mpmath.zeta(3)) < 1e-8
    assert abs(witten_sl3(2) - mpmath.zeta(6) / 3) < 1e-12


def test_witten_brute_force_at_three():
    ref = brute_witten(3, 200)
    # the neglected region contributes < 2 * sum_{m > 200} m^-3 * W-like factor
    assert abs(witten_sl3(3) - ref) < 1e-6
    assert witten_sl3(3) > ref


def test_witten_modes_agree():
    a = witten_sl3(0.8, "direct")
    b = witten_sl3(0.8, "contour")
    assert abs(a - b) < 1e-6 * abs(a)
    c = witten_sl3(mpmath.mpc(0.85, 1.5), "direct")
    d = witten_sl3(mpmath.mpc(0.85, 1.5), "contour")
    assert abs(c - d) < 1e-6 * abs(c)


def test_witten_pole_at_two_thirds():
    with pytest.raises(PoleError):
        witten_sl3(mpmath.mpf(2) / 3, "contour")
    res = witten_residue_at_two_thirds()
    h = mpmath.mpf("1e-4")
    v = witten_sl3(mpmath.mpf(2) / 3 + h, "contour") * h
    assert abs(v - res) < 1e-2 * abs(res)


def test_witten_domains():
    with pytest.raises(ValueError):
        witten_sl3(0.7, "direct")
    with pytest.raises(ValueError):
        witten_sl3(1.2, "contour")
    with pytest.raises(ValueError):
        witten_sl3(2, "nope")


def test_dimension_normalization():
    s = mpmath.mpf("1.5")
    assert abs(witten_dimension_zeta(s) - 2**s * witten_sl3(s)) < 1e-20
