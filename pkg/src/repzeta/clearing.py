"""Cyclotomic clearing of the leading trinomials ``W_(+/-),0``.

Each step multiplies both polynomials by a product of powers of ``(1 - x)``
and ``(1 + x)`` at the smallest surviving monomial ``x = X^n Y^m``; the
accumulated products translate into global zeta and L factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .algebra import BivarPoly, bivar_lex_min


class ParityError(ValueError):
    pass


class ClearingFinished(StopIteration):
    """Raised by :func:`clearing_step` when the pair is already constant."""


@dataclass(frozen=True)
class CyclotomicProduct:
    """``prod (1 - sign*x)^exponent`` over ``factors = ((sign, exponent), ...)``.

    ``sign = +1`` stands for ``(1 - x)`` and ``sign = -1`` for ``(1 + x)``.
    """

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for sign, e in self.factors:
            if sign not in (1, -1) or e == 0:
                raise ValueError("factors need sign in {+1, -1} and a nonzero exponent")

    @classmethod
    def build(cls, *pairs: tuple[int, int]) -> "CyclotomicProduct":
        return cls(tuple((s, e) for s, e in pairs if e != 0))

    def exponent(self, sign: int) -> int:
        return sum(e for s, e in self.factors if s == sign)

    def coefficients(self, max_degree: int | None = None) -> list[int]:
        """Coefficients of the polynomial in ``x`` (all exponents must be >= 0),
        optionally truncated at ``x^max_degree``."""
        poly = [1]
        for sign, e in self.factors:
            if e < 0:
                raise ValueError("negative exponent: not a polynomial")
            top = e if max_degree is None else min(e, max_degree)
            f = [comb(e, k) * (-sign) ** k for k in range(top + 1)]
            size = len(poly) + len(f) - 1
            if max_degree is not None:
                size = min(size, max_degree + 1)
            out = [0] * size
            for i, a in enumerate(poly):
                if a:
                    for j, b in enumerate(f):
                        if i + j >= size:
                            break
                        out[i + j] += a * b
            poly = out
        return poly

    def evaluate(self, x):
        val = 1
        for sign, e in self.factors:
            val = val * (1 - sign * x) ** e
        return val

    def to_bivar(self, n: int, m: int, y_max: int | None = None) -> BivarPoly:
        """Substitute ``x = X^n Y^m``, dropping Y-degrees above ``y_max``."""
        max_k = None if y_max is None else y_max // m
        return BivarPoly({(n * k, m * k): c for k, c in enumerate(self.coefficients(max_k))})


def _check_parity(n: int, m: int) -> None:
    if (n - m) % 2:
        raise ParityError(f"P(x; {n}, {m}) needs n = m (mod 2)")


def p_plus(n: int, m: int) -> CyclotomicProduct:
    """Product with linear term ``1 - n x``, used at places with epsilon*psi = +1."""
    _check_parity(n, m)
    if abs(m) <= n:
        return CyclotomicProduct.build((1, n))
    if abs(n) <= -m:
        return CyclotomicProduct.build((-1, -(n + m) // 2), (1, (n - m) // 2))
    if abs(m) <= -n:
        return CyclotomicProduct.build((-1, -n))
    return CyclotomicProduct.build((1, (n + m) // 2), (-1, -(n - m) // 2))


def p_minus(n: int, m: int) -> CyclotomicProduct:
    """Product with linear term ``1 - m x``, used at places with epsilon*psi = -1.

    The first case is ``|m| <= n``; with that condition the local products of
    both signs assemble into ``zeta^(-(n+m)/2) L^(-(n-m)/2)``.
    """
    _check_parity(n, m)
    if abs(m) <= n:
        return CyclotomicProduct.build((1, (n + m) // 2), (-1, (n - m) // 2))
    if abs(n) <= -m:
        return CyclotomicProduct.build((-1, -m))
    if abs(m) <= -n:
        return CyclotomicProduct.build((-1, -(n + m) // 2), (1, -(n - m) // 2))
    return CyclotomicProduct.build((1, m))


@dataclass(frozen=True)
class ClearingStep:
    m: int
    n: int
    alpha: int
    beta: int

    def __post_init__(self):
        if (self.alpha - self.beta) % 2:
            raise ParityError("alpha and beta must agree mod 2")
        if (self.m, self.n) <= (0, 0):
            raise ValueError("clearing index must exceed (0, 0)")

    def as_dict(self) -> dict[str, int]:
        return {"m": self.m, "n": self.n, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class SignedPolyPair:
    w_plus: BivarPoly
    w_minus: BivarPoly

    def check(self) -> None:
        if self.w_plus.constant() != 1 or self.w_minus.constant() != 1:
            raise ValueError("both polynomials need constant term 1")
        keys = set(self.w_plus.terms) | set(self.w_minus.terms)
        for n, m in keys:
            if (self.w_plus.coeff(n, m) - self.w_minus.coeff(n, m)) % 2:
                raise ParityError(f"coefficients at X^{n} Y^{m} differ mod 2")

    def is_constant(self) -> bool:
        return self.w_plus.is_constant() and self.w_minus.is_constant()

    def get(self, sign: int) -> BivarPoly:
        return self.w_plus if sign > 0 else self.w_minus


def initial_pair() -> SignedPolyPair:
    """``W_(+,0) = 1 + 9 X^3 Y^5 - 9 X^5 Y^8`` and ``W_(-,0) = 1 + X^3 Y^5 - X^5 Y^8``."""

    def w0(i2: int) -> BivarPoly:
        return BivarPoly({(0, 0): 1, (3, 5): i2, (5, 8): -i2})

    return SignedPolyPair(w0(9), w0(1))


def _pair_lex_min(pair: SignedPolyPair) -> tuple[int, int] | None:
    cands = [c for c in (bivar_lex_min(pair.w_plus), bivar_lex_min(pair.w_minus)) if c]
    if not cands:
        return None
    m, n, _ = min(cands)
    return m, n


def clearing_step(pair: SignedPolyPair, y_max: int | None = None) -> tuple[SignedPolyPair, ClearingStep]:
    """Clear the smallest nontrivial monomial of the pair.

    With ``y_max`` set, monomials of Y-degree above it are discarded; lower
    monomials are unaffected because every factor has nonnegative Y-degree.
    """
    idx = _pair_lex_min(pair)
    if idx is None:
        raise ClearingFinished("pair is constant")
    m, n = idx
    alpha, beta = pair.w_plus.coeff(n, m), pair.w_minus.coeff(n, m)
    step = ClearingStep(m, n, alpha, beta)
    wp = pair.w_plus.mul_truncated(p_plus(alpha, beta).to_bivar(n, m, y_max), y_max)
    wm = pair.w_minus.mul_truncated(p_minus(alpha, beta).to_bivar(n, m, y_max), y_max)
    return SignedPolyPair(wp, wm), step


def run_clearing(
    depth: int, y_max: int | None = None, start: SignedPolyPair | None = None
) -> tuple[list[ClearingStep], SignedPolyPair]:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    pair = start or initial_pair()
    pair = SignedPolyPair(pair.w_plus.truncate(y_max), pair.w_minus.truncate(y_max))
    ledger: list[ClearingStep] = []
    for _ in range(depth):
        try:
            pair, step = clearing_step(pair, y_max)
        except ClearingFinished:
            break
        ledger.append(step)
    return ledger, pair


def lattice_coordinates(n: int, m: int) -> tuple[int, int] | None:
    """``(u, v) >= 0`` with ``(n, m) = (3u + 5v, 5u + 8v)``, or ``None``."""
    # the lattice matrix [[3, 5], [5, 8]] has determinant -1
    u = 5 * m - 8 * n
    v = 5 * n - 3 * m
    if u < 0 or v < 0:
        return None
    return u, v


@dataclass(frozen=True)
class GlobalFactor:
    """``zeta^S(a s - b)^exponent`` (kind ``"zeta"``) or ``L^S(a s - b, chi psi)^exponent``."""

    kind: str
    a: int
    b: int
    exponent: int

    def __post_init__(self):
        if self.kind not in ("zeta", "L"):
            raise ValueError("kind must be 'zeta' or 'L'")
        if self.a <= 0:
            raise ValueError("GlobalFactor needs a > 0")

    def as_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b, "exponent": self.exponent}


def step_global_factors(step: ClearingStep) -> list[GlobalFactor]:
    """Inverse of the global product of the step's cyclotomic factors.

    The product over places of ``P_(+/-)(q^(-w); alpha, beta)`` with
    ``w = m s - n`` is ``zeta(w)^(-(alpha+beta)/2) L(w)^(-(alpha-beta)/2)``
    times a power of ``zeta(2w)``; this returns that product's inverse.
    """
    a, b = step.m, step.n
    n, m = step.alpha, step.beta
    if abs(m) <= n:
        corr = 0
    elif abs(n) <= -m:
        corr = (n + m) // 2
    elif abs(m) <= -n:
        corr = n
    else:
        corr = (n - m) // 2
    out = []
    if n + m:
        out.append(GlobalFactor("zeta", a, b, (n + m) // 2))
    if n - m:
        out.append(GlobalFactor("L", a, b, (n - m) // 2))
    if corr:
        out.append(GlobalFactor("zeta", 2 * a, 2 * b, -corr))
    return out


def ledger_to_global_factors(ledger: list[ClearingStep]) -> list[GlobalFactor]:
    out: list[GlobalFactor] = []
    for step in ledger:
        out.extend(step_global_factors(step))
    return out


def local_clearing_product(ledger: list[ClearingStep], sign: int, q, s):
    """``prod_j P_sign(q^(n_j - m_j s); alpha_j, beta_j)`` at one place."""
    val = 1
    for st in ledger:
        P = p_plus(st.alpha, st.beta) if sign > 0 else p_minus(st.alpha, st.beta)
        x = q ** (st.n - st.m * s)
        val = val * P.evaluate(x)
    return val


def convergence_abscissa(pair: SignedPolyPair) -> float:
    """Abscissa beyond which the residual Euler product converges absolutely.

    A monomial ``X^n Y^m`` contributes ``q^(n - m s)``; the product over places
    converges for ``m Re s - n > 1``.  The error terms never allow going below 5/8.
    """
    sigma = 5 / 8
    for w in (pair.w_plus, pair.w_minus):
        for (n, m) in w.terms:
            if m:
                sigma = max(sigma, (1 + n) / m)
    return sigma
