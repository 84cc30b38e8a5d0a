"""Non-Archimedean local factors of type A2.

A local factor is a finite sum of terms ``c(q) * N(q)^(-s)`` (a
:class:`DirichletPolynomialQ`) over geometric denominators
``(1 - q^a (q^b)^(-s))``.  Everything is symbolic in ``q``; specialising at a
residue cardinality produces an exact ``{N: coefficient}`` map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .algebra import LaurentQ

Q = LaurentQ.q()
ONE = LaurentQ.const(1)


class BadPlaceError(ValueError):
    """Raised for places excluded from the generic local formulae."""


class ConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class PlaceData:
    q: int
    epsilon: int
    psi: int
    iota: int

    def __post_init__(self):
        if self.q <= 4 or math.gcd(self.q, 6) != 1:
            raise BadPlaceError(f"q = {self.q} is a bad place (needs q >= 5, gcd(q, 6) = 1)")
        if self.epsilon not in (1, -1) or self.psi not in (1, -1):
            raise ValueError("epsilon and psi must be +1 or -1")
        if self.psi != (1 if self.q % 3 == 1 else -1):
            raise ValueError(f"psi = {self.psi} inconsistent with q = {self.q} mod 3")
        if self.iota != 2 + self.epsilon * self.psi:
            raise ValueError("iota must equal 2 + epsilon*psi")
        if self.iota != math.gcd(self.q - self.epsilon, 3):
            raise ValueError("iota must equal gcd(q - epsilon, 3)")

    @classmethod
    def from_q(cls, q: int, epsilon: int = 1) -> "PlaceData":
        psi = 1 if q % 3 == 1 else -1
        return cls(q, epsilon, psi, 2 + epsilon * psi)

    @property
    def sign(self) -> int:
        """``epsilon * psi``: selects ``W_+`` (iota = 3) or ``W_-`` (iota = 1)."""
        return self.epsilon * self.psi


@dataclass(frozen=True)
class DirichletTerm:
    coeff: LaurentQ
    base: LaurentQ


class DirichletPolynomialQ:
    """Finite sum of ``coeff(q) * base(q)^(-s)``."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        self.terms: tuple[DirichletTerm, ...] = tuple(t for t in terms if not t.coeff.is_zero())

    @classmethod
    def term(cls, coeff, base=ONE) -> "DirichletPolynomialQ":
        return cls([DirichletTerm(LaurentQ.coerce(coeff), LaurentQ.coerce(base))])

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "DirichletPolynomialQ") -> "DirichletPolynomialQ":
        return DirichletPolynomialQ(self.terms + other.terms)

    def __neg__(self) -> "DirichletPolynomialQ":
        return DirichletPolynomialQ(DirichletTerm(-t.coeff, t.base) for t in self.terms)

    def __sub__(self, other: "DirichletPolynomialQ") -> "DirichletPolynomialQ":
        return self + (-other)

    def __mul__(self, other) -> "DirichletPolynomialQ":
        if not isinstance(other, DirichletPolynomialQ):
            c = LaurentQ.coerce(other)
            return DirichletPolynomialQ(DirichletTerm(t.coeff * c, t.base) for t in self.terms)
        return DirichletPolynomialQ(
            DirichletTerm(a.coeff * b.coeff, a.base * b.base) for a in self.terms for b in other.terms
        )

    __rmul__ = __mul__

    def collect(self) -> "DirichletPolynomialQ":
        """Merge terms with symbolically identical bases."""
        acc: dict[LaurentQ, LaurentQ] = {}
        for t in self.terms:
            acc[t.base] = acc.get(t.base, LaurentQ()) + t.coeff
        return DirichletPolynomialQ(DirichletTerm(c, b) for b, c in acc.items())

    def at_integer_s(self, k: int) -> LaurentQ:
        """Exact value at the integer point ``s = k`` as a Laurent polynomial in q."""
        out = LaurentQ()
        for t in self.terms:
            out = out + t.coeff * t.base ** (-k)
        return out

    def specialize(self, q: int) -> dict[int, Fraction]:
        """Collected ``{N: coeff}`` at the residue cardinality ``q``."""
        out: dict[int, Fraction] = {}
        for t in self.terms:
            b = t.base(q)
            if b.denominator != 1 or b <= 0:
                raise ConsistencyError(f"base {t.base} is not a positive integer at q = {q}")
            n = int(b)
            out[n] = out.get(n, 0) + t.coeff(q)
        return {n: c for n, c in out.items() if c}

    def __repr__(self) -> str:
        return f"DirichletPolynomialQ({len(self.terms)} terms)"


def dterm(coeff, base=ONE) -> DirichletPolynomialQ:
    return DirichletPolynomialQ.term(coeff, base)


@dataclass(frozen=True)
class GeometricFactor:
    """``(1 - q^a (q^b)^(-s))``."""

    a: int
    b: int

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("GeometricFactor needs b > 0")

    def as_polynomial(self) -> DirichletPolynomialQ:
        return dterm(1) - dterm(Q ** self.a, Q ** self.b)


A2_DENOMINATORS = (GeometricFactor(1, 2), GeometricFactor(2, 3))


@dataclass(frozen=True)
class LocalFactorRational:
    numerator: DirichletPolynomialQ
    denominators: tuple[GeometricFactor, ...]
    q: int | None = field(default=None, compare=False)


def _check_branch(eps: int, iota: int) -> None:
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if iota not in (1, 3):
        raise ValueError("iota must be 1 or 3")


def finite_group_summands(eps: int, iota: int) -> list[DirichletPolynomialQ]:
    """The eight summands of the representation zeta function of H(F_q).

    ``iota^(2+s) * N^(-s)`` is stored as ``iota^2 * (N/iota)^(-s)``.
    """
    _check_branch(eps, iota)
    e, i2 = eps, iota * iota
    b7 = (Q + e) * (Q - e) ** 2
    b8 = (Q**2 + e * Q + 1) * (Q + e)
    return [
        dterm(1),
        dterm(1, Q**2 + e * Q),
        dterm(Q - 1 - e, Q**2 + e * Q + 1),
        dterm((Q**2 - Q - 1 + e) / 2, Q**3 - e),
        dterm(1, Q**3),
        dterm(Q - 1 - e, Q**3 + e * Q**2 + Q),
        dterm((Q**2 + e * Q - 2) / 3, b7) + dterm(Fraction(2 * i2, 3), b7 / iota),
        dterm((Q - e) * (Q - 3 - e) / 6, b8) + dterm(Fraction(2 * i2, 6), b8 / iota),
    ]


@lru_cache(maxsize=None)
def finite_group_zeta(eps: int, iota: int) -> DirichletPolynomialQ:
    out = DirichletPolynomialQ()
    for s in finite_group_summands(eps, iota):
        out = out + s
    return out


def shadow_groups(eps: int, iota: int) -> list[DirichletPolynomialQ]:
    """Numerators of the eight shadow groups, each over the full denominator
    ``(1 - q^(1-2s))(1 - q^(2-3s))``; factors matching a denominator are kept
    multiplied out."""
    _check_branch(eps, iota)
    e, i2 = eps, iota * iota
    d23 = GeometricFactor(2, 3).as_polynomial()
    d12 = GeometricFactor(1, 2).as_polynomial()
    one_minus_q2s = dterm(1) - dterm(1, Q**2)

    g1 = (
        d23
        * dterm((Q - 1) * (Q - e) / 2, Q**2 * (Q**2 + e * Q + 1))
        * (dterm(2) + dterm(2, Q) + dterm(Q - 2, Q + 1) + dterm(Q, Q - 1))
    )
    g2 = (
        d23
        * dterm(1, (Q**3 - e) * (Q + e))
        * (dterm(Q - e) + dterm(i2 * (Q + e), (Q - e) / iota) + dterm(i2 * (Q - 1) * (Q**2 - 1), Q))
    )
    g3 = dterm((Q - 1) * (Q - e) ** 2 / 6, Q**3 * (Q**2 + e * Q + 1) * (Q + e)) * (
        dterm(Q - 2) + dterm(2 * Q**2, Q**2) - dterm(Q, Q**2)
    )
    g4 = dterm((Q - 1) * (Q**2 - 1) * Q / 2, Q**3 * (Q**3 - e)) * one_minus_q2s
    g5 = d12 * dterm((Q**2 - 1) * (Q**2 + e * Q + 1) / 3, Q**3 * (Q**2 - 1) * (Q - e))
    g6 = dterm((Q - 1) * (Q - e) * Q, Q**2 * (Q**3 - e) * (Q + e)) * (dterm(1) + dterm(Q, Q**2))
    g7 = one_minus_q2s * dterm(i2 * Q**2, Q * (Q**3 - e) * (Q**2 - 1) / iota)
    g8 = dterm((e + 1) * i2 * Q**2, Q**2 * (Q**3 - 1) * (Q**2 - 1) * Q / iota)
    return [g1, g2, g3, g4, g5, g6, g7, g8]


@lru_cache(maxsize=None)
def shadow_sum(eps: int, iota: int) -> LocalFactorRational:
    num = DirichletPolynomialQ()
    for g in shadow_groups(eps, iota):
        num = num + g
    return LocalFactorRational(num, A2_DENOMINATORS)


def _denominator_product(factors) -> DirichletPolynomialQ:
    out = dterm(1)
    for f in factors:
        out = out * f.as_polynomial()
    return out


@lru_cache(maxsize=None)
def _symbolic_local(eps: int, iota: int) -> LocalFactorRational:
    shadow = shadow_sum(eps, iota)
    num = finite_group_zeta(eps, iota) * _denominator_product(shadow.denominators) + shadow.numerator
    return LocalFactorRational(num, shadow.denominators)


def local_zeta_a2(place: PlaceData) -> LocalFactorRational:
    """``zeta_{H(F_q)} + shadow sum`` over the common geometric denominators."""
    sym = _symbolic_local(place.epsilon, place.iota)
    return LocalFactorRational(sym.numerator, sym.denominators, q=place.q)


def clear_denominators(
    factor: LocalFactorRational, clearing: tuple[GeometricFactor, ...] = A2_DENOMINATORS
) -> DirichletPolynomialQ:
    """``prod(clearing) * factor`` as a finite Dirichlet polynomial.

    Every denominator of ``factor`` must be matched by a clearing factor;
    anything left over would leave an infinite series, which is an error.
    """
    remaining = list(clearing)
    for d in factor.denominators:
        if d not in remaining:
            raise ConsistencyError(f"denominator {d} is not cancelled by the clearing factors")
        remaining.remove(d)
    return factor.numerator * _denominator_product(remaining)


@lru_cache(maxsize=None)
def _symbolic_E(eps: int, iota: int) -> DirichletPolynomialQ:
    return clear_denominators(_symbolic_local(eps, iota)).collect()


def normalized_E(place: PlaceData) -> DirichletPolynomialQ:
    """``(1 - q^(1-2s))(1 - q^(2-3s)) * local factor`` (a finite Dirichlet polynomial)."""
    return _symbolic_E(place.epsilon, place.iota)


def finite_normalized_Estar(place: PlaceData) -> DirichletPolynomialQ:
    return finite_group_zeta(place.epsilon, place.iota)


# --- specialised (numeric q) helpers -------------------------------------------------


@lru_cache(maxsize=4096)
def specialized_E(place: PlaceData) -> tuple[tuple[int, Fraction], ...]:
    d = normalized_E(place).specialize(place.q)
    return tuple(sorted(d.items()))


def dirichlet_value(terms, s, *, derivative: bool = False):
    """Evaluate ``sum c * N^(-s)`` (or its s-derivative) with mpmath."""
    s = mpmath.mpmathify(s)
    total = mpmath.mpf(0)
    for n, c in terms:
        if n == 1:
            if not derivative:
                total += mpmath.mpf(c.numerator) / c.denominator
            continue
        logn = mpmath.log(n)
        t = mpmath.mpf(c.numerator) / c.denominator * mpmath.exp(-s * logn)
        total += -logn * t if derivative else t
    return total


def E_value(place: PlaceData, s):
    return dirichlet_value(specialized_E(place), s)


def E_derivative(place: PlaceData, s):
    return dirichlet_value(specialized_E(place), s, derivative=True)


def leading_trinomial(place: PlaceData, s):
    """``1 + iota^2 (q^(3-5s) - q^(5-8s))``."""
    s = mpmath.mpmathify(s)
    q = mpmath.mpf(place.q)
    return 1 + place.iota**2 * (q ** (3 - 5 * s) - q ** (5 - 8 * s))


def f_error(place: PlaceData, s):
    """``E(s, q) - 1 - iota^2 (q^(3-5s) - q^(5-8s))``."""
    with mpmath.workdps(max(mpmath.mp.dps, 40)):
        val = E_value(place, s) - leading_trinomial(place, s)
    return val


def f_star_error(place: PlaceData, s):
    """``zeta_{H(F_q)}(s) - 1 - q^(2-3s) - q^(1-2s)``."""
    with mpmath.workdps(max(mpmath.mp.dps, 40)):
        s = mpmath.mpmathify(s)
        q = mpmath.mpf(place.q)
        terms = sorted(finite_normalized_Estar(place).specialize(place.q).items())
        val = dirichlet_value(terms, s) - 1 - q ** (2 - 3 * s) - q ** (1 - 2 * s)
    return val


def expand_geometric(
    numerator: dict[int, Fraction], denominators, q: int, cutoff: int
) -> dict[int, Fraction]:
    """Multiply a specialised numerator by the geometric series of each
    ``1/(1 - q^a (q^b)^(-s))``, keeping degrees ``<= cutoff``."""
    cur = {n: c for n, c in numerator.items() if n <= cutoff}
    for g in denominators:
        ratio, base = q**g.a, q**g.b
        out: dict[int, Fraction] = {}
        for n, c in cur.items():
            k_coef, k_base = 1, n
            while k_base <= cutoff:
                out[k_base] = out.get(k_base, 0) + c * k_coef
                k_coef *= ratio
                k_base *= base
        cur = {n: c for n, c in out.items() if c}
    return cur


def local_coefficients(place: PlaceData, cutoff: int) -> dict[int, int]:
    """Exact Dirichlet coefficients of the local factor for degrees ``<= cutoff``."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    lf = local_zeta_a2(place)
    num = lf.numerator.specialize(place.q)
    expanded = expand_geometric(num, lf.denominators, place.q, cutoff)
    out = {}
    for n, c in sorted(expanded.items()):
        if c.denominator != 1:
            raise ConsistencyError(f"non-integral coefficient {c} at degree {n} (q = {place.q})")
        out[n] = int(c)
    return out
