"""Zeros of the normalized local factor near the line Re s = 5/8.

Approximate zeros ``s_{n,q}`` of the leading trinomial are refined by Newton's
method on the full ``E(s, q)``; rectangle scans collect such zeros from many
places, and the function-field Kronecker scan selects exponents ``m`` for
which cancellation by zeta/L zeros is impossible.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import mpmath
import numpy as np
import sympy

from .local_a2 import E_derivative, E_value, PlaceData

ZERO_DPS = 40


class InadmissiblePlace(ValueError):
    pass


@dataclass(frozen=True)
class PuiseuxConstants:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float

    @classmethod
    def exact(cls) -> "PuiseuxConstants":
        with mpmath.workdps(ZERO_DPS):
            r4 = mpmath.mpf(3) ** (mpmath.mpf(1) / 4)
            r2 = mpmath.sqrt(3)
            r34 = r4**3
            return cls(
                r34 / 8,
                -3 * r2 / 64,
                -21 * r4 / 1024,
                mpmath.mpf(27) / 512,
                -9639 * r34 / 1310720,
                -2079 * r2 / 131072,
                5942079 * r4 / 234881024,
            )

    def as_tuple(self) -> tuple:
        return (self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7)


PUISEUX = PuiseuxConstants.exact()


@dataclass(frozen=True)
class ZeroRecord:
    q: int
    n: int
    s_star: complex
    e_abs: float
    iterations: int
    converged: bool = True
    derivative: complex | None = None

    def as_row(self, digits: int = 15) -> list[str]:
        s = complex(self.s_star)
        return [
            str(self.q),
            str(self.n),
            f"{s.real:.{digits}g}",
            f"{s.imag:.{digits}g}",
            f"{self.e_abs:.3e}",
            str(self.iterations),
        ]


def admissible_place(q: int, classify: Callable[[int], PlaceData] | None = None) -> PlaceData:
    """Place data at ``q`` with ``epsilon * psi = 1`` (so ``iota = 3``)."""
    place = classify(q) if classify else PlaceData.from_q(q)
    if place.sign != 1:
        raise InadmissiblePlace(f"q = {q} has epsilon*psi = {place.sign}")
    return place


def s_initial(n: int, q: int, corrections: int = 7, check_range: bool = True):
    """Approximate zero of ``1 + 9 q^(3-5s) - 9 q^(5-8s)`` near ``5/8``.

    ``corrections`` selects how many of the Puiseux terms ``c_j q^(-j/8)`` enter.
    """
    if check_range and abs(n) > math.log(q):
        raise ValueError(f"|n| = {abs(n)} exceeds log q")
    if not 0 <= corrections <= 7:
        raise ValueError("corrections must be in 0..7")
    with mpmath.workdps(ZERO_DPS):
        lq = mpmath.log(q)
        corr = mpmath.fsum(
            c * mpmath.mpf(q) ** (-mpmath.mpf(j) / 8)
            for j, c in enumerate(PUISEUX.as_tuple()[:corrections], start=1)
        )
        return mpmath.mpf(5) / 8 + (mpmath.mpc(0, (1 + 2 * n) * mpmath.pi) + mpmath.log(9) / 8 + corr) / lq


def trinomial_residual(s, q: int):
    with mpmath.workdps(ZERO_DPS):
        q = mpmath.mpf(q)
        return abs(1 + 9 * q ** (3 - 5 * s) - 9 * q ** (5 - 8 * s))


def newton_zero(
    n: int,
    q: int,
    tol: float = 1e-12,
    classify: Callable[[int], PlaceData] | None = None,
    max_iter: int = 50,
) -> ZeroRecord:
    """Refine ``s_initial(n, q)`` to a zero of ``E(s, q)``.

    Falls back to damped steps when a full Newton step increases ``|E|``; a
    record with ``converged=False`` is returned rather than raising.
    """
    if tol < 1e-14:
        raise ValueError("tol must be >= 1e-14")
    place = admissible_place(q, classify)
    with mpmath.workdps(ZERO_DPS):
        s = s_initial(n, q)
        val = E_value(place, s)
        it = 0
        while abs(val) >= tol / 100 and it < max_iter:
            d = E_derivative(place, s)
            step = val / d
            lam = mpmath.mpf(1)
            while True:
                cand = s - lam * step
                cval = E_value(place, cand)
                if abs(cval) < abs(val) or lam < 1e-6:
                    break
                lam /= 2
            s, val = cand, cval
            it += 1
        with mpmath.workdps(2 * ZERO_DPS):
            # re-certify at doubled precision
            e_abs = abs(E_value(place, s))
        deriv = E_derivative(place, s)
        ok = e_abs < tol and mpmath.re(s) > mpmath.mpf(5) / 8
        return ZeroRecord(q, n, complex(s), float(e_abs), it, bool(ok), complex(deriv))


def normalized_derivative(record: ZeroRecord) -> complex:
    """``E'(s*) / log q``: the derivative in the variable ``s log q``."""
    return record.derivative / math.log(record.q)


@dataclass(frozen=True)
class Rectangle:
    t: float
    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def c0(self) -> float:
        return 9 * (math.pi + abs(self.t) * math.log(2)) / math.log(9)

    @property
    def s0(self) -> complex:
        return complex(5 / 8, self.t)

    def contains(self, s: complex) -> bool:
        d = complex(s) - self.s0
        return abs(d.real - self.delta) <= self.delta / 2 and abs(d.imag) <= self.c0 * self.delta

    def dyadic_q0(self) -> int:
        """Smallest ``q`` whose leading offset ``log 9 / (8 log q)`` is at most ``delta``."""
        return math.ceil(math.exp(math.log(9) / (8 * self.delta)))


def default_spacing(q_min: int) -> int:
    return math.ceil(math.log(q_min) ** 3)


def _admissible_primes(
    q_min: int,
    q_max: int,
    spacing: int,
    classify: Callable[[int], PlaceData] | None,
    limit: int | None = None,
) -> list[int]:
    """Greedy increasing selection of admissible primes with gaps ``>= spacing``."""
    out: list[int] = []
    q = q_min - 1
    while limit is None or len(out) < limit:
        q = sympy.nextprime(q)
        if q > q_max:
            break
        try:
            admissible_place(q, classify)
        except (InadmissiblePlace, ValueError):
            continue
        out.append(int(q))
        q = q + spacing - 1
    return out


def rectangle_scan(
    target: Rectangle,
    q_min: int,
    q_max: int,
    spacing: int = 1,
    tol: float = 1e-12,
    classify: Callable[[int], PlaceData] | None = None,
    limit: int | None = None,
) -> tuple[list[ZeroRecord], str]:
    """Newton zeros from admissible primes in ``[q_min, q_max]`` that land in ``target``.

    Returns ``(records, diagnostic)``; records are sorted by ``q``.
    """
    if q_max > 2 * q_min:
        raise ValueError("window must be dyadic: q_max <= 2 q_min")
    if spacing < 1:
        raise ValueError("spacing must be >= 1")
    primes = _admissible_primes(q_min, q_max, spacing, classify, limit)
    if not primes:
        return [], "no admissible primes in window"
    n = math.floor(target.t * math.log(q_min) / (2 * math.pi))
    records = []
    outside = 0
    for q in primes:
        if abs(n) > math.log(q):
            continue
        rec = newton_zero(n, q, tol, classify)
        if rec.converged and target.contains(rec.s_star):
            records.append(rec)
        else:
            outside += 1
    diag = f"{len(primes)} admissible primes, {len(records)} zeros in rectangle, {outside} rejected"
    return records, diag


def min_pairwise_distance(records: Iterable[ZeroRecord]) -> float:
    pts = sorted((r.s_star for r in records), key=lambda z: (z.real, z.imag))
    if len(pts) < 2:
        return math.inf
    arr = np.array(pts)
    diff = np.abs(arr[:, None] - arr[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def zeros_to_csv(records: Iterable[ZeroRecord], digits: int = 15) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "n", "re", "im", "residual", "iterations"])
    for r in records:
        w.writerow(r.as_row(digits))
    return buf.getvalue()


# --- function-field Kronecker scan ---------------------------------------------------

LINEAR_FORMS = ((2.0, 0.5), (1.5, -0.125), (1.0, -0.75), (0.5, -1.375))


def kronecker_alpha(qconst: int):
    with mpmath.workdps(ZERO_DPS):
        return mpmath.log(qconst) / (2 * mpmath.log(9))


def ff_kronecker_scan(qconst: int, m_max: int, window: str = "distance") -> list[int]:
    """Exponents ``m <= m_max`` for which all four forms ``l_j(m) = a_j alpha m + b_j``
    satisfy the window condition.

    ``window="distance"``: ``||l_j(m)|| < 1/4`` (distance to the nearest integer),
    i.e. the candidate ``v = l_j(m) - 1/2`` has fractional part in ``(1/4, 3/4)``.
    ``window="fractional"``: ``frac(l_j(m)) in (1/4, 3/4)``.
    """
    if math.gcd(qconst, 3) != 1:
        raise ValueError("constant field size must be coprime to 3")
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if window not in ("distance", "fractional"):
        raise ValueError("window must be 'distance' or 'fractional'")
    alpha = kronecker_alpha(qconst)
    m = np.arange(1, m_max + 1, dtype=np.float64)
    a_hi = float(alpha)
    a_lo = float(alpha - mpmath.mpf(a_hi))  # double-double for alpha
    keep = np.ones(m_max, dtype=bool)
    for a, b in LINEAR_FORMS:
        x = a * a_hi * m
        x = (x - np.floor(x)) + a * a_lo * m + b
        frac = x - np.floor(x)
        if window == "distance":
            keep &= np.minimum(frac, 1 - frac) < 0.25
        else:
            keep &= (frac > 0.25) & (frac < 0.75)
    return [int(v) for v in np.nonzero(keep)[0] + 1]


def kronecker_values(qconst: int, m: int) -> list:
    """Exact-precision ``l_j(m)`` for inspection."""
    alpha = kronecker_alpha(qconst)
    with mpmath.workdps(ZERO_DPS):
        return [mpmath.mpf(a) * alpha * m + mpmath.mpf(b) for a, b in LINEAR_FORMS]
