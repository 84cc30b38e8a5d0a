"""Exact arithmetic substrate: Laurent polynomials in ``q`` and sparse
bivariate integer polynomials in ``(X, Y)``.

Both types are immutable sparse maps with no stored zero coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rational = Union[int, Fraction]


class EvaluationError(ArithmeticError):
    pass


def _clean(items: Iterable[tuple], zero=0) -> dict:
    return {k: v for k, v in items if v != zero}


class LaurentQ:
    """Laurent polynomial in the symbol ``q`` with rational coefficients.

    >>> q = LaurentQ.q()
    >>> (q**2 + q)(7)
    Fraction(56, 1)
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Rational] | None = None):
        self._terms = _clean((int(e), Fraction(c)) for e, c in (terms or {}).items())
        self._hash = None

    @classmethod
    def const(cls, c: Rational) -> "LaurentQ":
        return cls({0: c})

    @classmethod
    def q(cls, power: int = 1) -> "LaurentQ":
        return cls({power: 1})

    @classmethod
    def coerce(cls, x) -> "LaurentQ":
        if isinstance(x, LaurentQ):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentQ")

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero polynomial")
        return max(self._terms)

    def low_degree(self) -> int:
        if not self._terms:
            raise ValueError("low degree of the zero polynomial")
        return min(self._terms)

    def leading_coefficient(self) -> Fraction:
        return self._terms[self.degree()]

    def __add__(self, other) -> "LaurentQ":
        try:
            other = LaurentQ.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentQ(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentQ":
        return LaurentQ({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentQ":
        try:
            return self + (-LaurentQ.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other) -> "LaurentQ":
        return LaurentQ.coerce(other) - self

    def __mul__(self, other) -> "LaurentQ":
        try:
            other = LaurentQ.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentQ(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LaurentQ":
        # only division by a nonzero rational constant
        if isinstance(other, LaurentQ):
            if set(other._terms) != {0}:
                raise EvaluationError("division by a non-constant Laurent polynomial")
            other = other._terms[0]
        other = Fraction(other)
        if other == 0:
            raise ZeroDivisionError("division of LaurentQ by zero")
        return LaurentQ({e: c / other for e, c in self._terms.items()})

    def __pow__(self, k: int) -> "LaurentQ":
        if k < 0:
            if len(self._terms) != 1:
                raise EvaluationError("negative power of a non-monomial")
            (e, c), = self._terms.items()
            return LaurentQ({e * k: Fraction(c) ** k})
        out = LaurentQ.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, q0: Rational) -> Fraction:
        return laurent_eval(self, q0)

    def __eq__(self, other) -> bool:
        try:
            other = LaurentQ.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "LaurentQ(0)"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            mono = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
            parts.append(f"{c}{'*' if mono else ''}{mono}")
        return "LaurentQ(" + " + ".join(parts) + ")"


def laurent_eval(p: LaurentQ, q0: Rational) -> Fraction:
    """Exact value of ``p`` at ``q = q0``."""
    q0 = Fraction(q0)
    if q0 == 0:
        if any(e < 0 for e in p.terms):
            raise EvaluationError("negative power of q evaluated at q = 0")
        return Fraction(p.terms.get(0, 0))
    return sum((c * q0**e for e, c in p.items()), Fraction(0))


class BivarPoly:
    """Sparse polynomial in ``Z[X, Y]``.

    Keys are ``(n, m)`` = (X-degree, Y-degree).  Monomials are ordered with the
    Y-exponent major, i.e. by ``(m, n)``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        cleaned = {}
        for (n, m), c in (terms or {}).items():
            if n < 0 or m < 0:
                raise ValueError("BivarPoly exponents must be nonnegative")
            if c:
                cleaned[(int(n), int(m))] = int(c)
        self._terms = cleaned

    @classmethod
    def one(cls) -> "BivarPoly":
        return cls({(0, 0): 1})

    @classmethod
    def monomial(cls, n: int, m: int, c: int = 1) -> "BivarPoly":
        return cls({(n, m): c})

    @property
    def terms(self) -> dict[tuple[int, int], int]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coeff(self, n: int, m: int) -> int:
        return self._terms.get((n, m), 0)

    def constant(self) -> int:
        return self._terms.get((0, 0), 0)

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def sorted_terms(self) -> list[tuple[int, int, int]]:
        """Terms as ``(m, n, coeff)`` in increasing ``(m, n)`` order."""
        return sorted((m, n, c) for (n, m), c in self._terms.items())

    def top_term(self) -> tuple[int, int, int]:
        return self.sorted_terms()[-1]

    def __add__(self, other: "BivarPoly") -> "BivarPoly":
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return BivarPoly(out)

    def __neg__(self) -> "BivarPoly":
        return BivarPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "BivarPoly") -> "BivarPoly":
        return self + (-other)

    def __mul__(self, other) -> "BivarPoly":
        if isinstance(other, int):
            return BivarPoly({k: c * other for k, c in self._terms.items()})
        return self.mul_truncated(other, None)

    __rmul__ = __mul__

    def mul_truncated(self, other: "BivarPoly", y_max: int | None) -> "BivarPoly":
        """Product, dropping monomials with Y-degree above ``y_max``."""
        out: dict[tuple[int, int], int] = {}
        for (n1, m1), c1 in self._terms.items():
            for (n2, m2), c2 in other._terms.items():
                m = m1 + m2
                if y_max is not None and m > y_max:
                    continue
                k = (n1 + n2, m)
                out[k] = out.get(k, 0) + c1 * c2
        return BivarPoly(out)

    def __pow__(self, k: int) -> "BivarPoly":
        if k < 0:
            raise ValueError("negative power of a BivarPoly")
        out = BivarPoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def truncate(self, y_max: int | None) -> "BivarPoly":
        if y_max is None:
            return self
        return BivarPoly({k: c for k, c in self._terms.items() if k[1] <= y_max})

    def evaluate(self, x, y):
        return sum(c * x**n * y**m for (n, m), c in self._terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        terms = self.sorted_terms()
        if len(terms) > 8:
            shown = " + ".join(_fmt_mono(*t) for t in terms[:4])
            return f"BivarPoly({shown} + ... [{len(terms)} terms] + {_fmt_mono(*terms[-1])})"
        return "BivarPoly(" + " + ".join(_fmt_mono(*t) for t in terms) + ")"


def _fmt_mono(m: int, n: int, c: int) -> str:
    if (m, n) == (0, 0):
        return str(c)
    return f"{c}*X^{n}*Y^{m}"


def bivar_lex_min(w: BivarPoly) -> tuple[int, int, int] | None:
    """Smallest ``(m, n) > (0, 0)`` with a nonzero coefficient, as ``(m, n, coeff)``.

    Returns ``None`` for a constant polynomial.
    """
    best = None
    for (n, m), c in w.terms.items():
        if (m, n) == (0, 0):
            continue
        if best is None or (m, n) < best[:2]:
            best = (m, n, c)
    return best
