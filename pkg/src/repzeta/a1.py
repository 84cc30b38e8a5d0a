"""Type A1: local factors of SL2 / SU2 and the continued global zeta function.

Expanding the local factor to second order gives

    zeta_v(s) (1 - q^(1-s)) = 1 + (2^(2+s) - 1) q^(-s) - eps q^(1-2s) + ...

so the global function factors as

    zeta(s)^r  zeta^S(s-1)  zeta^S(s)^(2^(2+s)-1)  L^S(2s-1, chi)^(-1)  H(s)

with ``H`` an Euler product converging absolutely for ``Re s > 3/4``.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .algebra import LaurentQ
from .lfunctions import PoleError, ff_zeta, riemann_zeta
from .local_a2 import BadPlaceError, GeometricFactor, LocalFactorRational, dterm
from .primes import primes_up_to

Q = LaurentQ.q()
A1_DENOMINATOR = (GeometricFactor(1, 1),)


class BranchError(ValueError):
    pass


def _check_q(q: int) -> None:
    if q < 5 or math.gcd(q, 6) != 1:
        raise BadPlaceError(f"q = {q} is a bad place for A1 (needs q >= 5, gcd(q, 6) = 1)")


def a1_level_zero(eps: int):
    """The part of the local factor without the geometric denominator."""
    half = Fraction(1, 2)
    return (
        dterm(1)
        + dterm(1, Q)
        + dterm((Q - 3) * half, Q + 1)
        + dterm((Q - 1) * half, Q - 1)
        + dterm(2, (Q + 1) * half)
        + dterm(2, (Q - 1) * half)
    )


def a1_shadow_numerator(eps: int):
    half = Fraction(1, 2)
    w = (Q - 1) * (Q - eps) * half
    return dterm(4 * Q, (Q**2 - 1) * half) + dterm(w, Q**2 - eps * Q) + dterm(w, Q**2 + eps * Q)


def local_zeta_a1(q: int, eps: int = 1) -> LocalFactorRational:
    """Local factor over the denominator ``1 - q^(1-s)``.

    ``2^(2+s) q (q^2-1)^(-s)`` is stored as ``4 q ((q^2-1)/2)^(-s)``.
    """
    _check_q(q)
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    num = a1_level_zero(eps) * A1_DENOMINATOR[0].as_polynomial() + a1_shadow_numerator(eps)
    return LocalFactorRational(num.collect(), A1_DENOMINATOR, q=q)


def a1_local_coefficients(q: int, eps: int, X: int) -> dict[int, int]:
    """Exact local Dirichlet coefficients for degrees ``<= X``."""
    _check_q(q)
    out: dict[int, int] = {}

    def add(n: int, c: int) -> None:
        if n <= X and c:
            out[n] = out.get(n, 0) + c

    add(1, 1)
    add(q, 1)
    add(q + 1, (q - 3) // 2)
    add(q - 1, (q - 1) // 2)
    add((q + 1) // 2, 2)
    add((q - 1) // 2, 2)
    w = (q - 1) * (q - eps) // 2
    for base, c in (((q * q - 1) // 2, 4 * q), (q * q - eps * q, w), (q * q + eps * q, w)):
        k_base, k_coef = base, c
        while k_base <= X:
            add(k_base, k_coef)
            k_base *= q
            k_coef *= q
    return {n: c for n, c in sorted(out.items()) if c}


def a1_graded_local(q: int, eps: int, d: int, N: int) -> list:
    """``1 + (q+3) T + (4q + (q-1)(q-eps)) T^2 / (1 - q T)`` with ``T = t^d``, through ``t^N``."""
    out = [0] * (N + 1)
    out[0] = 1
    if d <= N:
        out[d] += q + 3
    c = 4 * q + (q - 1) * (q - eps)
    k = 2
    while k * d <= N:
        out[k * d] += c
        c *= q
        k += 1
    return out


# --- continuation ---------------------------------------------------------------------


def a1_exponent(s):
    return mpmath.mpf(2) ** (2 + s) - 1


def _partial_zeta(w, excluded):
    v = riemann_zeta(w)
    for p in excluded:
        v *= 1 - mpmath.mpf(p) ** (-w)
    return v


def log_partial_zeta(s, excluded=(2, 3), steps: int = 48):
    """Branch of ``log zeta^S(s)`` for ``Re s > 1`` continuous from large real part."""
    s = mpmath.mpmathify(s)
    if mpmath.re(s) <= 1:
        raise BranchError("log zeta is only continued for Re s > 1 here")
    start = s + 12
    prev = _partial_zeta(start, excluded)
    acc = mpmath.log(prev)
    for j in range(1, steps + 1):
        z = start - 12 * mpmath.mpf(j) / steps
        cur = _partial_zeta(z, excluded)
        if cur == 0:
            raise BranchError("path meets a zero of zeta")
        acc += mpmath.log(cur / prev)
        prev = cur
    return acc


def _h_log_terms(primes: np.ndarray, s: complex, eps: int = 1) -> np.ndarray:
    s = complex(s)
    q = primes.astype(np.float64)
    x = np.exp(-s * np.log(q))
    lvl0 = (
        1
        + x
        + (q - 3) / 2 * np.exp(-s * np.log(q + 1))
        + (q - 1) / 2 * np.exp(-s * np.log(q - 1))
        + 2 * np.exp(-s * np.log((q + 1) / 2))
        + 2 * np.exp(-s * np.log((q - 1) / 2))
    )
    w = (q - 1) * (q - eps) / 2
    shadow = (
        4 * q * np.exp(-s * np.log((q * q - 1) / 2))
        + w * np.exp(-s * np.log(q * q - eps * q))
        + w * np.exp(-s * np.log(q * q + eps * q))
    )
    cleared = lvl0 * (1 - q * x) + shadow
    e = 2.0 ** (2 + s) - 1
    return np.log(cleared) + e * np.log1p(-x) - np.log1p(-eps * q * x * x)


def a1_continuation_eval(config, s, P_cut: int = 20000, with_error: bool = False):
    """Continued A1 zeta function at ``s`` (``Re s > 1``)."""
    s = mpmath.mpmathify(s)
    sigma = float(mpmath.re(s))
    if config.field_kind == "function":
        return _a1_ff_eval(config, s, with_error)
    if sigma <= 1:
        raise BranchError("A1 continuation is defined for Re s > 1")
    exc = tuple(sorted(config.excluded_places))
    val = mpmath.mpf(1)
    if config.archimedean_copies:
        val *= riemann_zeta(s) ** config.archimedean_copies
    if s == 2:
        raise PoleError("simple pole at s = 2")
    val *= _partial_zeta(s - 1, exc)
    val *= mpmath.exp(a1_exponent(s) * log_partial_zeta(s, exc))
    val /= _partial_zeta(2 * s - 1, exc)
    ps = primes_up_to(P_cut)
    ps = ps[(ps >= 5)]
    for b in exc:
        ps = ps[ps != b]
    logs = _h_log_terms(ps, complex(s))
    val *= mpmath.exp(mpmath.mpc(math.fsum(logs.real), math.fsum(logs.imag)))
    plugins = config.plugins()
    for p in sorted(plugins):
        val *= mpmath.fsum(mpmath.mpf(c) * mpmath.mpf(n) ** (-s) for n, c in sorted(plugins[p].items()))
    if not with_error:
        return val
    a = min(2 * sigma, 4 * sigma - 2, 1 + sigma)
    tail_c = float(np.max(np.abs(logs[-50:]) * ps[-50:].astype(float) ** a))
    err = max(tail_c * P_cut ** (1 - a) / ((a - 1) * math.log(P_cut)), 8 * sys.float_info.epsilon)
    return val, abs(val) * err


def _a1_ff_eval(config, s, with_error: bool):
    """Graded function-field model: ``zeta_k(s-1) zeta_k(s)^3 / zeta_k(2s-1) * H``."""
    from .primes import ff_place_count

    Qc = config.q_const
    z = ff_zeta(Qc)
    t = z.t_of(s)
    val = z.at_affine(1, 1, s) * z(s) ** 3 / z.at_affine(2, 1, s)
    sigma = float(mpmath.re(s))
    a = min(2 * sigma, 4 * sigma - 2)
    D = max(4, int(math.ceil(40 / max(a - 1, 0.05) / math.log(Qc))))
    logsum = mpmath.mpf(0)
    for d in range(1, D + 1):
        q = Qc**d
        T = t**d
        loc = 1 + (q + 3) * T + (4 * q + (q - 1) * (q - 1)) * T**2 / (1 - q * T)
        H = loc * (1 - q * T) * (1 - T) ** 3 / (1 - q * T**2)
        logsum += ff_place_count(Qc, d, config.include_infinity) * mpmath.log(H)
    val *= mpmath.exp(logsum)
    if with_error:
        return val, abs(val) * float(mpmath.mpf(Qc) ** (D * (1 - a)))
    return val


# --- branch probe ---------------------------------------------------------------------


def branch_constant(config) -> float:
    """Residue ``c`` of ``zeta_k`` at ``s = 1``."""
    if config is None or config.field_kind == "number":
        return 1.0
    Qc = config.q_const
    return 1.0 / ((1 - 1 / Qc) * math.log(Qc))


def _zeta_k(config, w):
    if config is None or config.field_kind == "number":
        return riemann_zeta(w)
    return ff_zeta(config.q_const)(w)


def a1_branch_probe(s_path: Sequence[float], config=None) -> list[float]:
    """``(s-1)^7 zeta_k(2s-1)^(2^(2+s)-1)`` along real points ``s > 1``."""
    out = []
    for s in s_path:
        if s <= 1:
            raise ValueError("branch probe needs s > 1")
        with mpmath.workdps(30):
            s_ = mpmath.mpf(s)
            base = _zeta_k(config, 2 * s_ - 1)
            if base <= 0:
                raise BranchError("zeta(2s-1) is not positive on the path")
            out.append(float((s_ - 1) ** 7 * mpmath.exp(a1_exponent(s_) * mpmath.log(base))))
    return out


def branch_model(s: float, config=None) -> float:
    """Two-term expansion ``c^7/128 + (s-1) (c^7 log 2 / 16) log(c / (2 (s-1)))``."""
    c = branch_constant(config)
    u = s - 1
    return c**7 / 128 + u * (c**7 * math.log(2) / 16) * math.log(0.5 * c / u)


def a1_factor_probe(s_path: Sequence[float]) -> list[float]:
    """``(s-1)^7 zeta(s)^(2^(2+s)-1)``: the factor that actually occurs in the
    continuation; tends to 1."""
    out = []
    for s in s_path:
        with mpmath.workdps(30):
            s_ = mpmath.mpf(s)
            out.append(float((s_ - 1) ** 7 * mpmath.exp(a1_exponent(s_) * mpmath.log(riemann_zeta(s_)))))
    return out


# --- asymptotics ----------------------------------------------------------------------


def a1_smoothed_asymptotics(config, x_grid: Sequence[float], table=None):
    """Fit ``sum r_n exp(-n/x) ~ c x^2``; returns ``(c, residual_slope, ratios)``."""
    from .global_assembly import dirichlet_coefficients, residual_slope, smoothed_sum

    x = np.asarray(x_grid, dtype=np.float64)
    if table is None:
        table = dirichlet_coefficients(config, int(math.ceil(10 * x.max())))
    y = np.array([smoothed_sum(table, float(v)) for v in x])
    c = float(np.dot(y, x**2) / np.dot(x**2, x**2))
    resid = y - c * x**2
    return c, residual_slope(x, resid), y / x**2


def a1_ff_ratios(config, N: int) -> list[float]:
    """``r_(Q^n) / Q^(2n)`` for the graded function-field series."""
    from .global_assembly import ff_power_series

    ser = ff_power_series(config, N)
    Qc = config.q_const
    return [c / Qc ** (2 * n) for n, c in enumerate(ser.coeffs)]
