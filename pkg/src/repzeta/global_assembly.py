"""Global zeta functions of type A2: coefficients, continuation, poles, fits.

Number-field configurations are ``SL3`` over ``Q`` (Case B) and the outer
form ``SU3`` split by ``Q(zeta_3)`` (Case A).  Function-field configurations
are inner forms over ``F_Q(T)``; their zeta function is modelled as a power
series in ``t = Q^(-s)`` by grading each ``N(q)^(-s)`` by the degree of ``N``
in ``q`` (so ``iota^s`` and ``2^s`` carry weight zero).
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np

from .clearing import (
    GlobalFactor,
    ClearingStep,
    convergence_abscissa,
    ledger_to_global_factors,
    p_minus,
    p_plus,
    run_clearing,
)
from .lfunctions import (
    EtaShift,
    PoleError,
    UnsupportedConfiguration,
    chi_mod3,
    dirichlet_L_mod3,
    ff_L_shifted,
    ff_zeta,
    riemann_zeta,
    witten_sl3,
)
from .local_a2 import BadPlaceError, PlaceData, local_coefficients, normalized_E
from .primes import ff_place_count, next_prime, primes_up_to

DEFAULT_DEPTH = 4
DEFAULT_Y_MAX = 200


class DomainError(ValueError):
    pass


class CertificationError(ValueError):
    def __init__(self, msg: str, max_valid: int):
        super().__init__(msg)
        self.max_valid = max_valid


# --- configurations --------------------------------------------------------------------


@dataclass(frozen=True)
class GroupConfig:
    """Arithmetic group setting.

    ``field_kind`` is ``"number"`` (``k = Q``) or ``"function"`` (``k = F_q_const(T)``);
    ``form`` is ``"inner"`` or ``"outer"`` (outer over ``Q`` means ``K = Q(zeta_3)``).
    ``bad_place_factors`` maps a prime to a finite Dirichlet polynomial ``{n: c}``.
    """

    field_kind: str = "number"
    form: str = "inner"
    q_const: int | None = None
    group_type: str = "A2"
    excluded_places: frozenset = frozenset({2, 3})
    bad_place_factors: tuple = ()
    include_infinity: bool = True

    def __post_init__(self):
        if self.field_kind not in ("number", "function"):
            raise ValueError("field_kind must be 'number' or 'function'")
        if self.form not in ("inner", "outer"):
            raise ValueError("form must be 'inner' or 'outer'")
        if self.group_type not in ("A1", "A2"):
            raise ValueError("group_type must be 'A1' or 'A2'")
        if self.field_kind == "function":
            if self.form == "outer":
                raise UnsupportedConfiguration("outer forms over function fields are not supported")
            if self.q_const is None or math.gcd(self.q_const, 6) != 1 or self.q_const < 5:
                raise ValueError("function fields need a constant field size coprime to 6")
        elif self.q_const is not None:
            raise ValueError("q_const only applies to function fields")
        if self.group_type == "A1" and self.form == "outer":
            raise UnsupportedConfiguration("only split A1 forms are supported")

    @classmethod
    def sl3_z(cls) -> "GroupConfig":
        return cls("number", "inner")

    @classmethod
    def su3_q_zeta3(cls) -> "GroupConfig":
        return cls("number", "outer")

    @classmethod
    def ff_inner(cls, qconst: int) -> "GroupConfig":
        return cls("function", "inner", qconst, excluded_places=frozenset())

    @classmethod
    def sl2_number_field(cls) -> "GroupConfig":
        return cls("number", "inner", group_type="A1")

    @classmethod
    def sl2_ff(cls, qconst: int) -> "GroupConfig":
        return cls("function", "inner", qconst, group_type="A1", excluded_places=frozenset())

    @property
    def archimedean_copies(self) -> int:
        return 1 if self.field_kind == "number" else 0

    @property
    def case_label(self) -> str:
        """``A`` when ``chi psi`` is trivial, else ``B``."""
        if self.field_kind == "number":
            return "A" if self.form == "outer" else "B"
        return "A" if self.q_const % 3 == 1 else "B"

    @property
    def eta(self) -> EtaShift:
        if self.field_kind != "function":
            raise ValueError("eta is defined for function fields")
        return EtaShift.for_field(self.q_const)

    def plugins(self) -> dict[int, dict[int, int]]:
        return {p: dict(f) for p, f in self.bad_place_factors}

    def with_plugins(self, factors: Mapping[int, Mapping[int, int]]) -> "GroupConfig":
        items = tuple(sorted((int(p), tuple(sorted(f.items()))) for p, f in factors.items()))
        for p, _ in items:
            if p not in self.excluded_places:
                raise ValueError(f"plug-in at {p}, which is not an excluded place")
        return GroupConfig(
            self.field_kind, self.form, self.q_const, self.group_type,
            self.excluded_places, items, self.include_infinity,
        )

    @property
    def label(self) -> str:
        if self.field_kind == "number":
            base = {"A2": {"inner": "sl3_z", "outer": "su3_q_zeta3"}, "A1": {"inner": "sl2_number_field"}}
            return base[self.group_type][self.form]
        return f"{'ff_inner' if self.group_type == 'A2' else 'sl2_ff'}({self.q_const})"


BAD_PLACE_DISCLAIMER = (
    "Euler factors at excluded places are set to 1 unless plug-ins are supplied; "
    "the result differs from the group's zeta function by finitely many Euler factors."
)


def classify_place(config: GroupConfig, p: int) -> PlaceData:
    """Place data at the prime ``p`` (number field) or at a place of degree ``p``
    (function field, ``q = q_const^p``)."""
    if config.field_kind == "function":
        if p < 1:
            raise BadPlaceError("place degree must be >= 1")
        q = config.q_const**p
        psi = 1 if q % 3 == 1 else -1
        return PlaceData(q, 1, psi, 2 + psi)
    if p in config.excluded_places:
        raise BadPlaceError(f"p = {p} is an excluded place")
    if p < 5 or not _is_prime(p):
        raise BadPlaceError(f"p = {p} is not a good prime")
    psi = 1 if p % 3 == 1 else -1
    eps = psi if config.form == "outer" else 1
    return PlaceData(p, eps, psi, 2 + eps * psi)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _good_primes(config: GroupConfig, P: int) -> np.ndarray:
    ps = primes_up_to(P)
    mask = ps >= 5
    for b in config.excluded_places:
        mask &= ps != b
    return ps[mask]


# --- coefficient tables ----------------------------------------------------------------


@dataclass
class CoefficientTable:
    """Exact ``r_n`` for ``1 <= n <= valid_up_to`` (dense, index ``n``)."""

    values: np.ndarray
    valid_up_to: int
    prime_cutoff: int | None = None
    disclaimer: str = ""

    def __post_init__(self):
        if len(self.values) != self.valid_up_to + 1:
            raise ValueError("values must have length valid_up_to + 1")

    @property
    def entries(self) -> dict[int, int]:
        nz = np.nonzero(self.values)[0]
        return {int(n): int(self.values[n]) for n in nz if n >= 1}

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.valid_up_to:
            raise IndexError(n)
        return int(self.values[n])

    @classmethod
    def from_entries(cls, entries: Mapping[int, int], valid_up_to: int) -> "CoefficientTable":
        arr = np.zeros(valid_up_to + 1, dtype=np.int64)
        for n, c in entries.items():
            if 1 <= n <= valid_up_to:
                arr[n] = c
        return cls(arr, valid_up_to)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "r_n"])
        for n, c in sorted(self.entries.items()):
            w.writerow([n, c])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, valid_up_to: int | None = None) -> "CoefficientTable":
        rows = list(csv.reader(io.StringIO(text)))
        entries = {int(n): int(c) for n, c in rows[1:] if n}
        top = valid_up_to if valid_up_to is not None else max(entries, default=1)
        return cls.from_entries(entries, top)


def witten_dimension_counts(X: int, copies: int = 1) -> np.ndarray:
    """Number of irreducible ``SL3(C)`` representations of each dimension ``n <= X``,
    convolved ``copies`` times; dimensions are ``a b (a + b) / 2``."""
    base = np.zeros(X + 1, dtype=np.int64)
    a = 1
    while a * (a + 1) // 2 <= X:
        # largest b with a b (a + b) <= 2 X
        b_max = int((-a * a + math.sqrt(a**4 + 8 * a * X)) / (2 * a)) + 1
        b = np.arange(1, b_max + 1, dtype=np.int64)
        dims = a * b * (a + b) // 2
        dims = dims[dims <= X]
        np.add.at(base, dims, 1)
        a += 1
    out = np.zeros(X + 1, dtype=np.int64)
    out[1] = 1
    for _ in range(copies):
        out = _dirichlet_convolve_full(out, base)
    return out


def _dirichlet_convolve_full(arr: np.ndarray, factor: np.ndarray) -> np.ndarray:
    X = len(arr) - 1
    out = np.zeros_like(arr)
    for d in np.nonzero(factor)[0]:
        d = int(d)
        out[d::d] += factor[d] * arr[1 : X // d + 1]
    return out


def _convolve_local(arr: np.ndarray, local: Mapping[int, int]) -> None:
    """In-place Dirichlet product with a local factor with ``local[1] == 1``."""
    X = len(arr) - 1
    degs = sorted(d for d in local if d > 1 and d <= X)
    if local.get(1, 0) != 1:
        raise ValueError("local factor needs constant term 1")
    if not degs:
        return
    old = arr[: X // degs[0] + 1].copy()
    for d in degs:
        arr[d::d] += local[d] * old[1 : X // d + 1]


def _local_table(config: GroupConfig, p: int, X: int) -> dict[int, int]:
    if config.group_type == "A1":
        from .a1 import a1_local_coefficients

        return a1_local_coefficients(p, 1, X)
    return local_coefficients(classify_place(config, p), X)


def smallest_local_degree(config: GroupConfig, p: int) -> int:
    """Smallest ``n > 1`` with a nonzero local coefficient at ``p``."""
    if config.group_type == "A1":
        return (p - 1) // 2
    cut = p * p + 2 * p
    return min(d for d in _local_table(config, p, cut) if d > 1)


def certified_limit(config: GroupConfig, P: int) -> int:
    """Largest ``X`` for which primes ``<= P`` determine ``r_n`` for all ``n <= X``."""
    best = None
    p = P
    for _ in range(3):
        p = next_prime(p)
        while p in config.excluded_places or p < 5:
            p = next_prime(p)
        d = smallest_local_degree(config, p)
        best = d if best is None else min(best, d)
    return best - 1


def cutoff_for(config: GroupConfig, X: int) -> int:
    """Smallest prime cutoff certifying ``r_n`` for ``n <= X``."""
    P = max(5, math.isqrt(max(X, 1)) // 2 if config.group_type == "A2" else 2 * X)
    while certified_limit(config, P) < X:
        P = next_prime(P)
    return P


def dirichlet_coefficients(
    config: GroupConfig, X: int, prime_cutoff: int | None = None, primes_order: Sequence[int] | None = None
) -> CoefficientTable:
    """Exact ``r_n`` for ``n <= X`` over a number field."""
    if config.field_kind != "number":
        raise UnsupportedConfiguration("use ff_power_series for function fields")
    if X < 1:
        raise ValueError("X must be >= 1")
    if prime_cutoff is None:
        prime_cutoff = cutoff_for(config, X)
    limit = certified_limit(config, prime_cutoff)
    if X > limit:
        raise CertificationError(
            f"X = {X} exceeds the certified range {limit} for prime cutoff {prime_cutoff}", limit
        )
    if config.group_type == "A2":
        arr = witten_dimension_counts(X, config.archimedean_copies)
    else:
        arr = np.zeros(X + 1, dtype=np.int64)
        arr[1:] = 1  # SL2(C): one irreducible representation of each dimension
        for _ in range(config.archimedean_copies - 1):
            ones = np.zeros(X + 1, dtype=np.int64)
            ones[1:] = 1
            arr = _dirichlet_convolve_full(arr, ones)
    primes = list(primes_order) if primes_order is not None else [int(p) for p in _good_primes(config, prime_cutoff)]
    for p in primes:
        _convolve_local(arr, _local_table(config, p, X))
    plugins = config.plugins()
    for p in sorted(plugins):
        _convolve_local(arr, plugins[p])
    if not plugins and arr[1:].min() < 0:
        raise ArithmeticError("negative coefficient: integer overflow")
    disclaimer = "" if plugins or not config.excluded_places else BAD_PLACE_DISCLAIMER
    return CoefficientTable(arr, X, prime_cutoff, disclaimer)


def growth_law(config: GroupConfig) -> tuple[float, int]:
    """``(alpha, beta)`` with ``sum_{n <= x} r_n << x^alpha (log x)^beta``."""
    return (2.0, 0) if config.group_type == "A1" else (1.0, 1)


def dirichlet_sum(table: CoefficientTable, s, growth: tuple[float, int] = (1.0, 1)) -> tuple:
    """``sum_{n <= valid} r_n n^(-s)`` for real ``s > alpha`` plus a tail bound.

    The tail is bounded by partial summation with ``R(x) <= kappa x^alpha (log x)^beta``
    (``beta`` in ``{0, 1}``), ``kappa`` taken from the top half of the table (times 1.25).
    """
    s = float(s)
    alpha, beta = growth
    if s <= alpha:
        raise DomainError(f"s = {s} is not beyond the abscissa {alpha}")
    V = table.valid_up_to
    n = np.arange(1, V + 1, dtype=np.float64)
    vals = table.values[1:].astype(np.float64)
    head = float(np.sum(vals * n ** (-s)))
    R = np.cumsum(vals)
    xs = n[V // 2 :]
    kappa = 1.25 * float(np.max(R[V // 2 :] / (xs**alpha * np.log(np.maximum(xs, 2)) ** beta)))
    L = math.log(V)
    g = s - alpha
    integral = V ** (-g) * (L / g + 1 / g**2 if beta else 1 / g)
    tail = s * kappa * integral - R[-1] * V ** (-s)
    return head, max(tail, 0.0)


def smoothed_sum(table: CoefficientTable, x: float) -> float:
    """``sum r_n exp(-n/x)``; needs ``valid_up_to >= 10 x`` (truncation ``< 11 e^(-10)`` relative)."""
    return smoothed_sum_with_error(table, x)[0]


def smoothed_sum_with_error(table: CoefficientTable, x: float) -> tuple[float, float]:
    if x < 1:
        raise ValueError("x must be >= 1")
    V = table.valid_up_to
    if V < 10 * x:
        raise DomainError(f"table valid to {V} < 10 x = {10 * x}")
    n = np.arange(1, V + 1, dtype=np.float64)
    w = np.exp(-n / x)
    total = float(np.dot(table.values[1:].astype(np.float64), w))
    # tail beyond V: local density times the geometric tail of the weight
    top = table.values[V // 2 + 1 :].astype(np.float64)
    density = 2.0 * float(top.mean()) if top.size else 0.0
    tail = density * x * math.exp(-V / x) * (1 + V / x)
    return total, tail


# --- explicit factors and the continuation -----------------------------------------


def explicit_factor_list(ledger: Sequence[ClearingStep]) -> list[GlobalFactor]:
    """``zeta(2s-1) zeta(3s-2)`` (from the geometric denominators) and the ledger factors."""
    return [GlobalFactor("zeta", 2, 1, 1), GlobalFactor("zeta", 3, 2, 1)] + ledger_to_global_factors(
        list(ledger)
    )


@dataclass
class ContinuationModel:
    config: GroupConfig
    residual_depth: int = DEFAULT_DEPTH
    prime_cutoff: int = 2000
    witten_mode: str = "dimension"
    y_max: int = DEFAULT_Y_MAX
    ledger: list = field(default_factory=list, init=False)
    explicit_factors: list = field(default_factory=list, init=False)
    abscissa: float = field(default=1.0, init=False)
    _residual_monomials: list = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        if self.config.group_type != "A2":
            raise UnsupportedConfiguration("ContinuationModel covers type A2; see a1 for A1")
        if self.witten_mode not in ("dimension", "tornheim"):
            raise ValueError("witten_mode must be 'dimension' or 'tornheim'")
        ledger, pair = run_clearing(self.residual_depth, y_max=self.y_max)
        self.ledger = ledger
        self.explicit_factors = explicit_factor_list(ledger)
        self.abscissa = max(convergence_abscissa(pair), 5 / 8 + 1 / self.y_max)
        mons = set()
        for w in (pair.w_plus, pair.w_minus):
            mons.update(k for k in w.terms if k[1] > 0)
        self._residual_monomials = sorted(mons)

    def describe(self) -> str:
        lines = [
            f"config: {self.config.label}",
            f"case: {self.config.case_label}",
            f"depth: {self.residual_depth}",
            f"prime_cutoff: {self.prime_cutoff}",
            f"abscissa: {self.abscissa:.6f}",
            "factors:",
        ]
        for f in self.explicit_factors:
            lines.append(f"  {f.kind}({f.a}s-{f.b})^{f.exponent}")
        return "\n".join(lines) + "\n"

    def decay_exponent(self, sigma: float) -> float:
        """Exponent ``a`` with residual local factors ``1 + O(q^(-a))`` at ``Re s = sigma``."""
        a = min(8 * sigma - 4, 2 * sigma)
        for n, m in self._residual_monomials:
            a = min(a, m * sigma - n)
        a = min(a, self.y_max * (sigma - 5 / 8) - 1)
        return a


def _partial_euler(value, w, excluded: Iterable[int], chi=None):
    for p in excluded:
        c = 1 if chi is None else chi(p)
        if c:
            value *= 1 - c * mpmath.mpf(p) ** (-w)
    return value


def _factor_value(config: GroupConfig, f: GlobalFactor, s):
    w = f.a * s - f.b
    if config.field_kind == "function":
        is_l = f.kind == "L" and config.case_label == "B"
        z = ff_L_shifted(config.q_const, config.eta) if is_l else ff_zeta(config.q_const)
        return z.at_affine(f.a, f.b, s)
    if f.kind == "L" and config.case_label == "B":
        return _partial_euler(dirichlet_L_mod3(w), w, config.excluded_places, chi_mod3)
    return _partial_euler(riemann_zeta(w), w, config.excluded_places)


@lru_cache(maxsize=64)
def _symbolic_class_arrays(eps: int, iota: int):
    """Coefficient and base polynomials of the terms of ``E`` for one (eps, iota) class."""
    E = normalized_E(_class_place(eps, iota))
    return tuple((t.coeff, t.base) for t in E.terms)


def _class_place(eps: int, iota: int) -> PlaceData:
    # any valid place with this (eps, iota) gives the same symbolic E
    for q in (5, 7, 11, 13):
        psi = 1 if q % 3 == 1 else -1
        if 2 + eps * psi == iota:
            return PlaceData(q, eps, psi, iota)
    raise ValueError("no place for class")


def _laurent_np(poly, q: np.ndarray) -> np.ndarray:
    out = np.zeros_like(q, dtype=np.float64)
    for e, c in poly.items():
        out = out + float(c) * q**e
    return out


def _log_residual_factors(model: ContinuationModel, s: complex, primes: np.ndarray, places) -> np.ndarray:
    """``log(E(s, q) P_{i,v}(s))`` for each place, vectorised per (eps, iota) class."""
    s = complex(s)
    out = np.zeros(len(primes), dtype=np.complex128)
    qf = primes.astype(np.float64)
    signs = np.array([pl.sign for pl in places])
    epss = np.array([pl.epsilon for pl in places])
    iotas = np.array([pl.iota for pl in places])
    for eps in (1, -1):
        for iota in (1, 3):
            idx = np.nonzero((epss == eps) & (iotas == iota))[0]
            if idx.size == 0:
                continue
            q = qf[idx]
            E = np.zeros(idx.size, dtype=np.complex128)
            for coeff, base in _symbolic_class_arrays(eps, iota):
                c = _laurent_np(coeff, q)
                b = _laurent_np(base, q)
                E += c * np.exp(-s * np.log(b))
            out[idx] = np.log(E)
    logq = np.log(qf)
    for st in model.ledger:
        x = np.exp((st.n - st.m * s) * logq)
        for sign in (1, -1):
            P = p_plus(st.alpha, st.beta) if sign > 0 else p_minus(st.alpha, st.beta)
            sel = signs == sign
            if not sel.any():
                continue
            for fsign, e in P.factors:
                out[sel] += e * np.log1p(-fsign * x[sel])
    return out


def _graded_E(eps: int, iota: int, q: int) -> dict[int, Fraction]:
    """``E`` at ``q`` with ``N^(-s)`` replaced by ``T^(deg N)``: ``{k: coeff of T^k}``."""
    out: dict[int, Fraction] = {}
    for coeff, base in _symbolic_class_arrays(eps, iota):
        k = base.degree()
        out[k] = out.get(k, 0) + coeff(q)
    return {k: c for k, c in out.items() if c}


def _ff_places(config: GroupConfig, D: int) -> list[tuple[int, int, PlaceData]]:
    return [(d, ff_place_count(config.q_const, d, config.include_infinity), classify_place(config, d))
            for d in range(1, D + 1)]


def continuation_eval(model: ContinuationModel, s, with_error: bool = False):
    """Continued zeta function at ``s`` (``Re s > model.abscissa``).

    Returns the value, or ``(value, error_estimate)`` with ``with_error``.
    """
    config = model.config
    s = mpmath.mpmathify(s)
    sigma = float(mpmath.re(s))
    if sigma <= model.abscissa:
        raise DomainError(
            f"Re s = {sigma} is not beyond the abscissa {model.abscissa:.4f} of depth {model.residual_depth}"
        )
    val = mpmath.mpf(1)
    for f in model.explicit_factors:
        try:
            fv = _factor_value(config, f, s)
        except PoleError as exc:
            raise PoleError(f"pole of {f.kind}({f.a}s-{f.b}) at s = {s}") from exc
        if fv == 0 and f.exponent < 0:
            raise PoleError(f"zero of {f.kind}({f.a}s-{f.b}) in a denominator")
        val *= fv**f.exponent
    a = model.decay_exponent(sigma)
    if config.field_kind == "function":
        logres, err = _ff_residual(model, s)
    else:
        primes = _good_primes(config, model.prime_cutoff)
        places = [classify_place(config, int(p)) for p in primes]
        logs = _log_residual_factors(model, complex(s), primes, places)
        # fixed-order reduction for reproducibility
        logres = complex(math.fsum(logs.real), math.fsum(logs.imag))
        tail_c = float(np.max(np.abs(logs[-50:]) * primes[-50:].astype(float) ** a)) if len(primes) else 0.0
        P = float(model.prime_cutoff)
        err = tail_c * P ** (1 - a) / ((a - 1) * math.log(P)) if a > 1 else math.inf
        # the residual log-sum is accumulated in doubles
        err = max(err, 8 * sys.float_info.epsilon)
        if config.archimedean_copies:
            mode = "direct" if sigma > 2 / 3 + 0.05 else "contour"
            w = witten_sl3(s, mode)
            if model.witten_mode == "dimension":
                w *= mpmath.mpf(2) ** s
            val *= w**config.archimedean_copies
        plugins = config.plugins()
        for p in sorted(plugins):
            val *= mpmath.fsum(mpmath.mpf(c) * mpmath.mpf(n) ** (-s) for n, c in sorted(plugins[p].items()))
    val *= mpmath.exp(mpmath.mpc(logres))
    if with_error:
        return val, abs(val) * err
    return val


def _ff_residual(model: ContinuationModel, s) -> tuple[complex, float]:
    """Graded residual product over places of degree ``d`` with ``q^d``-adic decay."""
    config = model.config
    Q = config.q_const
    sigma = float(mpmath.re(s))
    a = model.decay_exponent(sigma)
    t = mpmath.mpf(Q) ** (-s)
    # places of degree d contribute 1 + O(Q^(-a d)) with multiplicity ~ Q^d / d
    D = max(4, int(math.ceil(40 / max(a - 1, 0.05) / math.log(Q))))
    D = min(D, 400)
    total = mpmath.mpf(0)
    for d, count, place in _ff_places(config, D):
        q = Q**d
        T = t**d
        gE = _graded_E(place.epsilon, place.iota, q)
        E = mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * T**k for k, c in gE.items())
        Pv = mpmath.mpf(1)
        x_of = lambda st: mpmath.mpf(q) ** st.n * T**st.m  # noqa: E731
        for st in model.ledger:
            P = p_plus(st.alpha, st.beta) if place.sign > 0 else p_minus(st.alpha, st.beta)
            Pv *= P.evaluate(x_of(st))
        total += count * mpmath.log(E * Pv)
    err = float(mpmath.mpf(Q) ** (D * (1 - a))) if a > 1 else math.inf
    return complex(total), err


# --- poles ----------------------------------------------------------------------------


def factor_pole_order(config: GroupConfig, f: GlobalFactor, s0: Fraction) -> int:
    """Pole order (negative for zeros) contributed by ``f`` at the rational point ``s0``
    on the real axis, where ``a s0 - b = 1``."""
    if f.a * s0 - f.b != 1:
        return 0
    if f.kind == "zeta" or config.case_label == "A":
        return f.exponent
    return 0


def explicit_pole_order(model: ContinuationModel, s0) -> int:
    s0 = Fraction(s0).limit_denominator(10**6) if not isinstance(s0, Fraction) else s0
    return sum(factor_pole_order(model.config, f, s0) for f in model.explicit_factors)


def explicit_singularities(model: ContinuationModel, sigma_min: float) -> dict[Fraction, int]:
    """Real points ``> sigma_min`` where the explicit factors have a pole (net order)."""
    pts = {Fraction(1 + f.b, f.a) for f in model.explicit_factors}
    out = {}
    for p in sorted(pts):
        if p > sigma_min:
            o = explicit_pole_order(model, p)
            if o:
                out[p] = o
    return out


def pole_order_and_residue(model: ContinuationModel, s0, radius: float = 0.02, points: int = 24):
    """Pole order from the factor list and the leading Laurent coefficient by a
    trapezoidal contour integral of the full model."""
    s0f = Fraction(s0).limit_denominator(10**6)
    order = explicit_pole_order(model, s0f)
    if float(s0f) - radius <= model.abscissa:
        raise DomainError("circle leaves the continued region; lower the radius or raise the depth")
    others = [p for p in explicit_singularities(model, model.abscissa) if p != s0f]
    if any(abs(float(p - s0f)) <= 1.5 * radius for p in others):
        raise DomainError("radius too large: circle encloses or touches another singularity")
    if model.config.field_kind == "number" and abs(float(s0f) - 2 / 3) <= 1.5 * radius:
        raise DomainError("radius too large: Witten pole at 2/3")
    acc = mpmath.mpc(0)
    for j in range(points):
        u = radius * mpmath.expjpi(2 * mpmath.mpf(j) / points)
        acc += continuation_eval(model, float(s0f) + u) * u**order
    return order, complex(acc / points)


# --- fits -----------------------------------------------------------------------------


@dataclass
class MainTermFit:
    P: np.ndarray  # coefficients in log x, ascending
    P_tilde: np.ndarray
    residual_slope: float
    residuals: np.ndarray
    condition: float


def _main_term_design(x: np.ndarray, deg_p: int, deg_pt: int, second_exp: float = 0.8) -> np.ndarray:
    L = np.log(x)
    cols = [x * L**k for k in range(deg_p + 1)] + [x**second_exp * L**k for k in range(deg_pt + 1)]
    return np.column_stack(cols)


def residual_slope(x: np.ndarray, resid: np.ndarray) -> float:
    """Log-log slope of the running maximum of ``|resid|`` (robust to sign changes)."""
    env = np.maximum.accumulate(np.abs(resid))
    keep = env > 0
    if keep.sum() < 2:
        return -math.inf
    return float(np.polyfit(np.log(x[keep]), np.log(env[keep]), 1)[0])


def fit_main_terms(x: Sequence[float], y: Sequence[float], deg_pt: int) -> MainTermFit:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    A = _main_term_design(x, 1, deg_pt)
    scale = np.max(np.abs(A), axis=0)
    As = A / scale
    cond = float(np.linalg.cond(As))
    if len(x) <= A.shape[1] or not math.isfinite(cond) or cond > 1e15:
        raise ValueError(f"ill-conditioned grid (condition number {cond:.3g})")
    coef, *_ = np.linalg.lstsq(As, y, rcond=None)
    coef = coef / scale
    resid = y - A @ coef
    return MainTermFit(coef[:2], coef[2:], residual_slope(x, resid), resid, cond)


def default_grid(lo: float = 1e3, hi: float = 1e6, count: int = 31) -> np.ndarray:
    return np.geomspace(lo, hi, count)


def main_term_fit(config: GroupConfig, x_grid: Sequence[float], table: CoefficientTable | None = None) -> MainTermFit:
    deg_pt = 8 if config.case_label == "A" else 4
    x = np.asarray(x_grid, dtype=np.float64)
    if table is None:
        table = dirichlet_coefficients(config, int(math.ceil(10 * x.max())))
    y = np.array([smoothed_sum(table, float(v)) for v in x])
    return fit_main_terms(x, y, deg_pt)


# --- function-field power series ------------------------------------------------------


@dataclass
class FFPowerSeries:
    q_const: int
    coeffs: list

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("series must start with 1")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "coefficient"])
        for n, c in enumerate(self.coeffs):
            w.writerow([n, c])
        return buf.getvalue()

    def evaluate(self, t):
        return mpmath.fsum(mpmath.mpf(c) * mpmath.mpmathify(t) ** n for n, c in enumerate(self.coeffs))


def series_mul(a: Sequence, b: Sequence, N: int) -> list:
    out = [0] * (N + 1)
    for i, x in enumerate(a[: N + 1]):
        if x:
            for j, y in enumerate(b[: N + 1 - i]):
                out[i + j] += x * y
    return out


def series_pow(f: Sequence, k: int, N: int) -> list:
    """``f^k`` through ``t^N`` for ``f[0] = 1`` and any integer ``k`` (Miller's recurrence)."""
    f = list(f[: N + 1]) + [0] * max(0, N + 1 - len(f))
    if f[0] != 1:
        raise ValueError("series_pow needs f[0] = 1")
    g = [Fraction(0)] * (N + 1)
    g[0] = Fraction(1)
    for n in range(1, N + 1):
        acc = Fraction(0)
        for j in range(1, n + 1):
            if f[j]:
                acc += ((k + 1) * j - n) * f[j] * g[n - j]
        g[n] = acc / n
    return g


def _geometric_inverse(coef, step: int, N: int) -> list:
    """``1/(1 - coef t^step)`` through ``t^N``."""
    out = [0] * (N + 1)
    c = 1
    for k in range(0, N // step + 1):
        out[k * step] = c
        c *= coef
    return out


def ff_local_series(config: GroupConfig, d: int, N: int, residual_only: bool = False) -> list:
    """Graded local factor at a degree-``d`` place as a power series in ``t`` through ``t^N``."""
    place = classify_place(config, d)
    q = place.q
    if config.group_type == "A1":
        from .a1 import a1_graded_local

        return a1_graded_local(q, place.epsilon, d, N)
    gE = _graded_E(place.epsilon, place.iota, q)
    ser = [Fraction(0)] * (N + 1)
    for k, c in gE.items():
        if k * d <= N:
            ser[k * d] += c
    if residual_only:
        return ser
    ser = series_mul(ser, _geometric_inverse(q, 2 * d, N), N)
    ser = series_mul(ser, _geometric_inverse(q**2, 3 * d, N), N)
    return ser


def ff_power_series(config: GroupConfig, N: int) -> FFPowerSeries:
    """Exact ``sum_n r_(q^n) t^n`` through ``t^N``."""
    if config.field_kind != "function":
        raise UnsupportedConfiguration("ff_power_series needs a function-field configuration")
    if N > 40:
        raise MemoryError("N > 40 is outside the supported range")
    if N < 0:
        raise ValueError("N must be >= 0")
    total: list = [Fraction(1)] + [Fraction(0)] * N
    for d in range(1, N + 1):
        loc = ff_local_series(config, d, N)
        if all(c == 0 for c in loc[1:]):
            continue
        count = ff_place_count(config.q_const, d, config.include_infinity)
        total = series_mul(total, series_pow(loc, count, N), N)
    coeffs = []
    for c in total:
        c = Fraction(c)
        if c.denominator != 1:
            raise ArithmeticError(f"non-integral series coefficient {c}")
        coeffs.append(int(c))
    return FFPowerSeries(config.q_const, coeffs)


def ff_zeta_factor_series(config: GroupConfig, N: int) -> list:
    """``zeta_k(2s-1) zeta_k(3s-2)`` as a power series in ``t``."""
    Q = config.q_const
    out = [Fraction(1)] + [Fraction(0)] * N
    for coef in (Q, Q**2):  # zeta_k(2s-1) = 1/((1 - Q t^2)(1 - Q^2 t^2))
        out = series_mul(out, _geometric_inverse(coef, 2, N), N)
    for coef in (Q**2, Q**3):
        out = series_mul(out, _geometric_inverse(coef, 3, N), N)
    return out


def ff_residual_series(config: GroupConfig, N: int) -> list:
    """``prod_v E_graded(v)`` through ``t^N``."""
    total: list = [Fraction(1)] + [Fraction(0)] * N
    for d in range(1, N + 1):
        loc = ff_local_series(config, d, N, residual_only=True)
        if all(c == 0 for c in loc[1:]):
            continue
        count = ff_place_count(config.q_const, d, config.include_infinity)
        total = series_mul(total, series_pow(loc, count, N), N)
    return total


def ff_explicit_polynomials(config: GroupConfig, depth: int) -> list[tuple[int, int, int]]:
    """Explicit factors as ``(coef, a, e)``: ``G(t) = prod (1 - coef t^a)^(-e)``."""
    Q = config.q_const
    model = ContinuationModel(config, residual_depth=depth)
    out = []
    for f in model.explicit_factors:
        sign = -1 if (f.kind == "L" and config.case_label == "B") else 1
        for b in (f.b, f.b + 1):
            out.append((sign * Fraction(Q) ** b, f.a, f.exponent))
    return out


def _explicit_eval(polys, t: np.ndarray) -> np.ndarray:
    out = np.ones_like(t, dtype=np.complex128)
    for coef, a, e in polys:
        out *= (1 - float(coef) * t**a) ** (-e)
    return out


def _explicit_inverse_series(polys, N: int) -> list:
    out: list = [Fraction(1)] + [Fraction(0)] * N
    for coef, a, e in polys:
        base = [Fraction(0)] * (N + 1)
        base[0] = Fraction(1)
        if a <= N:
            base[a] = -coef
        out = series_mul(out, series_pow(base, e, N), N)
    return out


LOG_SERIES_DEGREE = 60


@lru_cache(maxsize=512)
def _log_local_residual_series(config: GroupConfig, depth: int, d: int, K: int) -> tuple:
    """Exact ``log(E_v prod P_(+/-))`` at a degree-``d`` place as ``((k, coeff), ...)``
    in ``T = t^d`` through ``T^K``; the cleared monomials cancel exactly here."""
    place = classify_place(config, d)
    q = place.q
    ledger, _ = run_clearing(depth, y_max=DEFAULT_Y_MAX)
    gE = _graded_E(place.epsilon, place.iota, q)
    u = [Fraction(0)] * (K + 1)
    for k, c in gE.items():
        if k <= K:
            u[k] += c
    u[0] -= 1
    if u[0] != 0:
        raise ArithmeticError("graded E must have constant term 1")
    out = [Fraction(0)] * (K + 1)
    power = [Fraction(1)] + [Fraction(0)] * K
    j = 0
    while True:
        j += 1
        power = series_mul(power, u, K)
        if all(c == 0 for c in power):
            break
        for k, c in enumerate(power):
            if c:
                out[k] += Fraction((-1) ** (j + 1), j) * c
    for st in ledger:
        P = p_plus(st.alpha, st.beta) if place.sign > 0 else p_minus(st.alpha, st.beta)
        xq = Fraction(q) ** st.n
        for sign, e in P.factors:
            # e log(1 - sign x) = -e sum sign^j x^j / j
            j = 1
            while st.m * j <= K:
                out[st.m * j] -= Fraction(e * sign**j, j) * xq**j
                j += 1
    return tuple((k, c) for k, c in enumerate(out) if c)


def _signed_exp_sum(terms, logt_scaled: np.ndarray, log_scale: float) -> np.ndarray:
    """``sum_k c_k exp(log_scale + k logt_scaled)`` without forming huge ``c_k`` as floats."""
    acc = np.zeros_like(logt_scaled)
    for k, c in terms:
        lc = math.log(abs(c.numerator)) - math.log(c.denominator)
        acc += (1.0 if c > 0 else -1.0) * np.exp(lc + log_scale + k * logt_scaled)
    return acc


def ff_log_residual(
    model: ContinuationModel, t: np.ndarray, tol: float = 1e-18, direct_degrees: int = 4
) -> np.ndarray:
    """``log R(t)`` for the graded residual product ``R = prod_v E_v prod P_(+/-)``.

    Degrees ``<= direct_degrees`` are evaluated directly in complex doubles;
    higher degrees use the exact log series, because the cancellation between
    ``E`` and the ``P`` factors would otherwise be amplified by the place
    count.  Stops once a whole degree contributes less than ``tol``.
    """
    config = model.config
    Q = config.q_const
    t = np.asarray(t, dtype=np.complex128)
    logt = np.log(t)
    total = np.zeros_like(t)
    for d in range(1, direct_degrees + 1):
        place = classify_place(config, d)
        count = ff_place_count(Q, d, config.include_infinity)
        T = t**d
        E = np.zeros_like(t)
        for k, c in _graded_E(place.epsilon, place.iota, place.q).items():
            E += float(c) * T**k
        Pv = np.ones_like(t)
        for st in model.ledger:
            P = p_plus(st.alpha, st.beta) if place.sign > 0 else p_minus(st.alpha, st.beta)
            Pv *= P.evaluate(float(place.q) ** st.n * T**st.m)
        # count is an integer, so the branch of the log is irrelevant after exp
        total += count * np.log(E * Pv)
    d = direct_degrees
    while True:
        d += 1
        if d > 400:
            raise DomainError("residual product does not converge on this set")
        count = ff_place_count(Q, d, config.include_infinity)
        terms = _log_local_residual_series(config, model.residual_depth, d, LOG_SERIES_DEGREE)
        contrib = _signed_exp_sum(terms, d * logt, math.log(count))
        total += contrib
        if np.max(np.abs(contrib)) < tol:
            return total


@dataclass
class FFFit:
    P: np.ndarray  # coefficients in log Q^n, ascending
    P_tilde: np.ndarray
    residual_slope: float
    residuals: np.ndarray
    main_terms: np.ndarray
    periodic: dict
    theta: float


def _circle_coefficients(func, center: complex, radius: float, n: np.ndarray, M: int) -> np.ndarray:
    """``(1/2 pi i) \\oint func(t) t^(-n-1) dt`` over ``|t - center| = radius``."""
    phi = 2 * np.pi * (np.arange(M) + 0.5) / M
    u = radius * np.exp(1j * phi)
    t = center + u
    vals = func(t)
    # dt = i u dphi
    return np.array([np.mean(vals * t ** (-k - 1) * u) for k in n])


def ff_coefficient_asymptotics(
    series: FFPowerSeries,
    config: GroupConfig | None = None,
    theta: float = 0.77,
    depth: int = 11,
    M: int = 4096,
) -> FFFit:
    """Split ``r_(Q^n)`` into pole contributions and a residual by Cauchy's formula.

    ``Z(t) = G(t) R(t)`` with ``G`` the explicit zeta/L factors (rational in
    ``t``) and ``R`` the residual Euler product, analytic for
    ``|t| < Q^(-abscissa)``.  The residual is the integral of ``Z t^(-n-1)``
    over ``|t| = Q^(-theta)``; the main terms are the remainder, i.e. minus the
    residues at the poles of modulus ``<= Q^(-4/5)``.  ``P`` (from the double
    pole at ``1/Q``) and ``P~`` (from the pole at ``Q^(-4/5)``) are read off
    small circles around those points.  The poles at ``-1/Q`` and
    ``omega/Q`` give the ``periodic`` amplitudes of ``Q^n (-1)^n`` and
    ``Q^n e^(2 pi i n/3)``.  ``residual_slope`` is the growth exponent of the
    residual in units of ``log Q^n``.
    """
    Q = series.q_const
    if config is None:
        config = GroupConfig.ff_inner(Q)
    N = len(series.coeffs) - 1
    if N < 20:
        raise ValueError("series too short: need at least 21 coefficients")
    # no singularity of Z lies in Q^(-4/5) < |t| < Q^(-3/4)
    if not 0.75 < theta < 0.8:
        raise ValueError("theta must lie in (3/4, 4/5)")
    if list(ff_power_series(config, N).coeffs) != list(series.coeffs):
        raise ValueError("series does not match the configuration")
    polys = ff_explicit_polynomials(config, depth)
    model = ContinuationModel(config, residual_depth=depth)

    def Z(t):
        return _explicit_eval(polys, t) * np.exp(ff_log_residual(model, t))

    n = np.arange(N + 1)
    rho = float(Q) ** (-theta)
    resid = _circle_coefficients(Z, 0.0, rho, n, M).real
    y = np.array([float(c) for c in series.coeffs])
    main = y - resid

    L = n * math.log(Q)
    r1 = 0.3 / Q
    c1 = -_circle_coefficients(Z, 1.0 / Q, r1, n, 512).real
    P = np.linalg.lstsq(np.column_stack([float(Q) ** n, float(Q) ** n * L]), c1, rcond=None)[0]
    alt = -_circle_coefficients(Z, -1.0 / Q, r1, n, 512).real
    w = np.exp(2j * np.pi / 3) / Q
    cw = -2 * _circle_coefficients(Z, w, r1, n, 512).real
    t2 = float(Q) ** (-0.8)
    case_a = config.case_label == "A"
    deg_pt = 8 if case_a else 4
    r2 = 0.3 * min(t2 - 1.0 / Q, 2 * math.sin(math.pi / 5) * t2)
    c2 = -_circle_coefficients(Z, t2, r2, n, 1024).real
    Vt = np.column_stack([float(Q) ** (0.8 * n) * L**k for k in range(deg_pt + 1)])
    sc = np.max(np.abs(Vt), axis=0)
    Pt = np.linalg.lstsq(Vt / sc, c2, rcond=None)[0] / sc
    periodic = {
        "alt": float(np.mean(alt[1:] / (float(Q) ** n[1:] * (-1.0) ** n[1:]))),
        "omega": float(np.max(np.abs(cw[1:]) / float(Q) ** n[1:])),
    }
    lo = max(1, N // 2)
    x = float(Q) ** n[lo:]
    slope = residual_slope(x, resid[lo:])
    return FFFit(P, Pt, slope, resid, main, periodic, theta)
