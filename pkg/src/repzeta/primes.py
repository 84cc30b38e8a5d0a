"""Prime enumeration and place counts of the rational function field."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy


def primes_up_to(n: int) -> np.ndarray:
    """All primes ``<= n`` (Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def next_prime(n: int) -> int:
    return int(sympy.nextprime(n))


@lru_cache(maxsize=None)
def monic_irreducible_count(qconst: int, d: int) -> int:
    """Number of monic irreducible polynomials of degree ``d`` over ``F_qconst``."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    total = sum(int(sympy.mobius(e)) * qconst ** (d // e) for e in sympy.divisors(d))
    return total // d


def ff_place_count(qconst: int, d: int, include_infinity: bool = True) -> int:
    """Places of degree ``d`` of ``F_qconst(T)``; the place at infinity has degree 1."""
    n = monic_irreducible_count(qconst, d)
    if d == 1 and include_infinity:
        n += 1
    return n
