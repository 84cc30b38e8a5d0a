"""Zeta and L-function evaluators used by the continuation.

Riemann and Hurwitz zeta are evaluated by Euler-Maclaurin summation in mpmath
arithmetic.  The Witten zeta of SL3(C) has a direct mode (finite double sum
plus an asymptotic tail) and a contour mode (shifted Mellin-Barnes integral
plus the residue at ``t = 1 - s``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

WORKING_DPS = 30


class PoleError(ZeroDivisionError):
    """Evaluation requested at a pole."""


class UnsupportedConfiguration(ValueError):
    pass


@lru_cache(maxsize=None)
def _bernoulli_over_factorial(j: int):
    with mpmath.workdps(WORKING_DPS + 10):
        return mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j)


def _em_terms(s, a=1) -> tuple[int, int]:
    """Head length and Bernoulli count; the expansion point ``N + a`` must exceed
    ``30 + |Im s| + max(0, -Re s)``."""
    n = 30 + int(abs(mpmath.im(s))) + int(max(0, -mpmath.re(s)))
    return max(0, n - int(a)), 30


def hurwitz_zeta(s, a):
    """``sum_{k >= 0} (k + a)^(-s)`` by Euler-Maclaurin (``a > 0``)."""
    with mpmath.workdps(WORKING_DPS):
        s = mpmath.mpmathify(s)
        a = mpmath.mpf(a)
        if s == 1:
            raise PoleError("Hurwitz zeta has a pole at s = 1")
        N, J = _em_terms(s, a)
        total = mpmath.fsum((k + a) ** (-s) for k in range(N))
        x = N + a
        total += x ** (1 - s) / (s - 1) + x ** (-s) / 2
        rising = s  # s (s+1) ... (s + 2j - 2)
        xp = x ** (-s - 1)
        for j in range(1, J + 1):
            total += _bernoulli_over_factorial(j) * rising * xp
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            xp /= x * x
        return +total


def riemann_zeta(s):
    """Riemann zeta; ``PoleError`` at ``s = 1``."""
    s = mpmath.mpmathify(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    return hurwitz_zeta(s, 1)


def chi_mod3(n: int) -> int:
    """The quadratic character ``(-3/n)``."""
    r = n % 3
    return 0 if r == 0 else (1 if r == 1 else -1)


def dirichlet_L_mod3(s):
    """``L(s, (-3/.)) = 3^(-s) (zeta(s, 1/3) - zeta(s, 2/3))`` (entire)."""
    with mpmath.workdps(WORKING_DPS):
        s = mpmath.mpmathify(s)
        a1, a2 = mpmath.mpf(1) / 3, mpmath.mpf(2) / 3
        N, J = _em_terms(s)
        total = mpmath.fsum((k + a1) ** (-s) - (k + a2) ** (-s) for k in range(N))
        x1, x2 = N + a1, N + a2
        if s == 1:
            total += mpmath.log(x2 / x1)
        else:
            total += (x1 ** (1 - s) - x2 ** (1 - s)) / (s - 1)
        total += (x1 ** (-s) - x2 ** (-s)) / 2
        rising = s
        p1, p2 = x1 ** (-s - 1), x2 ** (-s - 1)
        for j in range(1, J + 1):
            total += _bernoulli_over_factorial(j) * rising * (p1 - p2)
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            p1 /= x1 * x1
            p2 /= x2 * x2
        return 3 ** (-s) * total


def partial_zeta(s, excluded=(2, 3)):
    """``zeta^S(s)``: zeta with the Euler factors at ``excluded`` removed."""
    val = riemann_zeta(s)
    for p in excluded:
        val *= 1 - mpmath.mpf(p) ** (-mpmath.mpmathify(s))
    return val


def partial_L_mod3(s, excluded=(2, 3)):
    val = dirichlet_L_mod3(s)
    for p in excluded:
        val *= 1 - chi_mod3(p) * mpmath.mpf(p) ** (-mpmath.mpmathify(s))
    return val


# --- function fields ----------------------------------------------------------------


@dataclass(frozen=True)
class EtaShift:
    eta: int

    def __post_init__(self):
        if self.eta not in (0, 1):
            raise ValueError("eta must be 0 or 1")

    @classmethod
    def for_field(cls, qconst: int) -> "EtaShift":
        if qconst % 3 == 0:
            raise ValueError("constant field size must be coprime to 3")
        return cls(0 if qconst % 3 == 1 else 1)


@dataclass(frozen=True)
class FFZeta:
    """``zeta_k(s) = 1/((1 - t)(1 - Q t))`` with ``t = Q^(-s)`` for ``k = F_Q(T)``.

    ``twist = -1`` gives the half-period shifted function (``t -> -t``).
    """

    q_const: int
    twist: int = 1

    def poles_t(self) -> tuple:
        return (mpmath.mpf(self.twist), mpmath.mpf(self.twist) / self.q_const)

    def at_t(self, t):
        t = self.twist * mpmath.mpmathify(t)
        den = (1 - t) * (1 - self.q_const * t)
        if den == 0:
            raise PoleError("function-field zeta evaluated at a pole")
        return 1 / den

    def t_of(self, s):
        return mpmath.mpf(self.q_const) ** (-mpmath.mpmathify(s))

    def __call__(self, s):
        return self.at_t(self.t_of(s))

    def at_affine(self, a: int, b: int, s):
        """``zeta_k(a s - b)``: ``t -> Q^b t^a``."""
        return self.at_t(mpmath.mpf(self.q_const) ** b * self.t_of(s) ** a)

    def local_factor_t(self, degree: int, t):
        """Euler factor ``(1 - (twist t)^degree)^(-1)`` at a place of the given degree."""
        return 1 / (1 - (self.twist * mpmath.mpmathify(t)) ** degree)


def ff_zeta(qconst: int) -> FFZeta:
    if math.gcd(qconst, 6) != 1:
        raise ValueError("constant field size must be coprime to 6")
    return FFZeta(qconst)


def ff_L_shifted(qconst: int, eta: EtaShift, chi_trivial: bool = True) -> FFZeta:
    """``L(s, chi psi) = L(s + i pi eta / log Q, chi)``; for trivial ``chi`` this is
    the zeta function with ``t -> (-1)^eta t``."""
    if not chi_trivial:
        raise UnsupportedConfiguration("outer forms over function fields are not supported")
    base = ff_zeta(qconst)
    return FFZeta(base.q_const, -1 if eta.eta else 1)


# --- Witten zeta of SL3(C) ------------------------------------------------------------

DIRECT_M = 12
TAIL_TERMS = 30


def _witten_beta(s):
    return mpmath.gamma(1 - s) * mpmath.gamma(2 * s - 1) / mpmath.gamma(s)


def _inner_sum(m: int, s):
    """``sum_{n >= 1} n^(-s) (n + m)^(-s)``."""
    K = 2 * m + 20
    head = mpmath.fsum(mpmath.mpf(n) ** (-s) * mpmath.mpf(n + m) ** (-s) for n in range(1, K + 1))
    tail = mpmath.mpf(0)
    coef = mpmath.mpf(1)  # binom(-s, j) m^j
    for j in range(80):
        term = coef * hurwitz_zeta(2 * s + j, K + 1)
        tail += term
        if j > 5 and abs(term) < mpmath.mpf(10) ** (-WORKING_DPS + 2):
            break
        coef *= (-s - j) / (j + 1) * m
    return head + tail


def _witten_direct_generic(s):
    M = DIRECT_M
    head = mpmath.fsum(mpmath.mpf(m) ** (-s) * _inner_sum(m, s) for m in range(1, M + 1))
    # for large m: inner sum ~ B m^(1-2s) + sum_k (-1)^k (s)_k / k! zeta(s - k) m^(-s-k)
    tail = _witten_beta(s) * hurwitz_zeta(3 * s - 1, M + 1)
    coef = mpmath.mpf(1)
    for k in range(TAIL_TERMS):
        tail += coef * riemann_zeta(s - k) * hurwitz_zeta(2 * s + k, M + 1)
        coef *= -(s + k) / (k + 1)
    return head + tail


def _near_positive_integer(s, radius: float) -> bool:
    r = mpmath.re(s)
    k = round(float(r))
    return k >= 1 and abs(s - k) < radius


def witten_sl3(s, mode: str = "direct"):
    """``sum_{m,n >= 1} m^(-s) n^(-s) (m + n)^(-s)``.

    ``direct``: ``Re s > 2/3 + 0.05``.  ``contour``: ``1/2 < Re s < 1``,
    ``s != 2/3``.
    """
    with mpmath.workdps(WORKING_DPS):
        s = mpmath.mpmathify(s)
        sigma = mpmath.re(s)
        if abs(s - mpmath.mpf(2) / 3) < mpmath.mpf(10) ** -12:
            raise PoleError("Witten zeta has a pole at s = 2/3")
        if mode == "direct":
            if sigma <= mpmath.mpf(2) / 3 + 0.05:
                raise ValueError("direct mode needs Re s > 2/3 + 0.05")
            radius = mpmath.mpf("1e-3")
            if _near_positive_integer(s, radius):
                # the tail expansion has cancelling poles at positive integers;
                # the mean over a small circle recovers the analytic value
                k = round(float(sigma))
                pts = 6
                mean = mpmath.fsum(
                    _witten_direct_generic(k + radius * mpmath.expjpi(2 * mpmath.mpf(j) / pts))
                    for j in range(pts)
                ) / pts
                return mpmath.re(mean) if mpmath.im(s) == 0 else mean
            return _witten_direct_generic(s)
        if mode == "contour":
            if not (0.5 < sigma < 1):
                raise ValueError("contour mode needs 1/2 < Re s < 1")
            return _witten_contour(s)
        raise ValueError(f"unknown mode {mode!r}")


def _witten_contour(s):
    sigma = mpmath.re(s)
    c = min(mpmath.mpf("0.05"), (1 - sigma) / 2, (2 * sigma - 1) / 2)
    gs = mpmath.gamma(s)

    def integrand(y):
        t = mpmath.mpc(c, y)
        return mpmath.gamma(s - t) * mpmath.gamma(t) * riemann_zeta(s + t) * riemann_zeta(2 * s - t)

    with mpmath.workdps(20):
        nodes = [-80, -40, -20, -10, -5, -2, 0, 2, 5, 10, 20, 40, 80]
        integral = mpmath.quad(integrand, nodes) / (2 * mpmath.pi * gs)
    residue = _witten_beta(s) * riemann_zeta(3 * s - 1)
    return integral + residue


def witten_residue_at_two_thirds():
    """Residue of the Witten zeta at ``s = 2/3``."""
    with mpmath.workdps(WORKING_DPS):
        s = mpmath.mpf(2) / 3
        return _witten_beta(s) / 3


def witten_dimension_zeta(s, mode: str = "direct"):
    """``sum (m n (m+n)/2)^(-s)``: the count by true dimension, ``2^s`` times
    :func:`witten_sl3`."""
    s = mpmath.mpmathify(s)
    return mpmath.mpf(2) ** s * witten_sl3(s, mode)
