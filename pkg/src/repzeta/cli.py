"""Command-line front end.

Every subcommand prints one result document (JSON) or table (CSV) on standard
output; diagnostics go to standard error.  Exit status: 0 success, 1
computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from typing import Any, Sequence

import mpmath
import numpy as np

from . import __version__
from .a1 import (
    BranchError,
    a1_branch_probe,
    a1_continuation_eval,
    a1_factor_probe,
    a1_ff_ratios,
    a1_smoothed_asymptotics,
    branch_model,
)
from .boundary import (
    InadmissiblePlace,
    Rectangle,
    default_spacing,
    ff_kronecker_scan,
    newton_zero,
    rectangle_scan,
    zeros_to_csv,
)
from .clearing import ParityError, ledger_to_global_factors, run_clearing
from .global_assembly import (
    CertificationError,
    ContinuationModel,
    DomainError,
    GroupConfig,
    continuation_eval,
    default_grid,
    dirichlet_coefficients,
    ff_coefficient_asymptotics,
    ff_power_series,
    main_term_fit,
    pole_order_and_residue,
    smoothed_sum_with_error,
)
from .lfunctions import PoleError, UnsupportedConfiguration, witten_dimension_zeta, witten_sl3
from .local_a2 import BadPlaceError, ConsistencyError, PlaceData, local_coefficients, specialized_E

GROUP_NAMES = ("sl3_z", "su3_q_zeta3", "ff_inner", "sl2_number_field", "sl2_ff")


class UsageError(ValueError):
    """Invalid parameter combination; exit status 2."""


# --- configuration ---------------------------------------------------------------------


def parse_group(text: str) -> GroupConfig:
    """``sl3_z``, ``su3_q_zeta3``, ``sl2_number_field``, ``ff_inner(7)`` / ``ff_inner:7``,
    ``sl2_ff(7)`` / ``sl2_ff:7``."""
    m = re.fullmatch(r"\s*([a-z0-9_]+)\s*(?:[:(]\s*(\d+)\s*\)?)?\s*", text)
    if not m:
        raise UsageError(f"cannot parse group {text!r}")
    name, q = m.group(1), m.group(2)
    try:
        if name == "sl3_z" and q is None:
            return GroupConfig.sl3_z()
        if name == "su3_q_zeta3" and q is None:
            return GroupConfig.su3_q_zeta3()
        if name == "sl2_number_field" and q is None:
            return GroupConfig.sl2_number_field()
        if name == "ff_inner" and q is not None:
            return GroupConfig.ff_inner(int(q))
        if name == "sl2_ff" and q is not None:
            return GroupConfig.sl2_ff(int(q))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if name in ("ff_outer", "su3_ff"):
        raise UsageError("outer forms over function fields are not supported")
    raise UsageError(f"unknown group {text!r}; choose from {', '.join(GROUP_NAMES)}")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse rational number {text!r}") from exc


def load_config_file(path: str) -> dict[str, Any]:
    """Flat JSON object whose keys are long option names (``prime_cutoff`` etc.)."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


# --- output ---------------------------------------------------------------------------


class Formatter:
    def __init__(self, digits: int):
        if not 1 <= digits <= 30:
            raise UsageError("--digits must be in 1..30")
        self.digits = digits

    def real(self, x) -> float:
        x = float(x)
        if not math.isfinite(x):
            return x
        return float(f"{x:.{self.digits}g}")

    def value(self, x):
        """Normalise for JSON: floats rounded to the digit setting, exact
        rationals as strings, complex numbers as ``[re, im]``."""
        if isinstance(x, bool) or x is None or isinstance(x, str):
            return x
        if isinstance(x, (int, np.integer)):
            return int(x)
        if isinstance(x, Fraction):
            return str(x) if x.denominator != 1 else int(x)
        if isinstance(x, (complex, mpmath.mpc, np.complexfloating)):
            z = complex(x)
            return [self.real(z.real), self.real(z.imag)]
        if isinstance(x, (float, mpmath.mpf, np.floating)):
            return self.real(x)
        if isinstance(x, dict):
            return {str(k): self.value(v) for k, v in x.items()}
        if isinstance(x, (list, tuple, np.ndarray)):
            return [self.value(v) for v in x]
        return str(x)

    def cell(self, x) -> str:
        if isinstance(x, (complex, mpmath.mpc)):
            z = complex(x)
            return f"{z.real:.{self.digits}g}{z.imag:+.{self.digits}g}j"
        if isinstance(x, (float, mpmath.mpf, np.floating)):
            return f"{float(x):.{self.digits}g}"
        return str(self.value(x))


def emit(doc: dict, rows: tuple[list[str], list[list]] | None, fmt: str, f: Formatter, out) -> None:
    if fmt == "csv":
        if rows is None:
            rows = (["key", "value"], [[k, json.dumps(f.value(v))] for k, v in doc.items()])
        header, body = rows
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in body:
            w.writerow([f.cell(c) for c in r])
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(f.value(doc)) + "\n")


# --- subcommands ----------------------------------------------------------------------


def cmd_local(args, f: Formatter):
    try:
        place = PlaceData.from_q(args.q, args.epsilon)
    except (BadPlaceError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    coeffs = local_coefficients(place, args.cutoff)
    E = specialized_E(place)
    doc = {
        "q": place.q,
        "epsilon": place.epsilon,
        "psi": place.psi,
        "iota": place.iota,
        "coefficients": [[n, c] for n, c in coeffs.items()],
        "E_terms": [[n, c] for n, c in E],
    }
    return doc, (["n", "coefficient"], [[n, c] for n, c in coeffs.items()])


def cmd_clear(args, f: Formatter):
    ledger, pair = run_clearing(args.depth, y_max=args.y_max)
    doc = {
        "ledger": [[s.m, s.n, s.alpha, s.beta] for s in ledger],
        "factors": [[g.kind, g.a, g.b, g.exponent] for g in ledger_to_global_factors(ledger)],
        "w_plus": [list(t) for t in pair.w_plus.sorted_terms()],
        "w_minus": [list(t) for t in pair.w_minus.sorted_terms()],
    }
    rows = [[s.m, s.n, s.alpha, s.beta] for s in ledger]
    return doc, (["m", "n", "alpha", "beta"], rows)


def cmd_eval(args, f: Formatter):
    cfg = parse_group(args.group)
    s = parse_complex(args.s)
    with mpmath.workdps(max(20, args.digits + 5)):
        if cfg.group_type == "A1":
            val, err = a1_continuation_eval(cfg, s, P_cut=args.prime_cutoff or 20000, with_error=True)
        else:
            model = ContinuationModel(cfg, residual_depth=args.depth, prime_cutoff=args.prime_cutoff or 2000)
            val, err = continuation_eval(model, s, with_error=True)
    doc = {"group": cfg.label, "s": complex(s), "value": complex(val), "error": float(err)}
    return doc, (["s", "value", "error"], [[complex(s), complex(val), float(err)]])


def cmd_coeffs(args, f: Formatter):
    cfg = parse_group(args.group)
    if cfg.field_kind == "function":
        raise UsageError("coefficient tables are for number fields; use ffseries")
    table = dirichlet_coefficients(cfg, args.X, prime_cutoff=args.prime_cutoff)
    items = sorted(table.entries.items())
    if table.disclaimer:
        print(table.disclaimer, file=sys.stderr)
    doc = {
        "group": cfg.label,
        "valid_up_to": table.valid_up_to,
        "prime_cutoff": table.prime_cutoff,
        "coefficients": [[n, c] for n, c in items],
    }
    return doc, (["n", "r_n"], [[n, c] for n, c in items])


def cmd_smooth(args, f: Formatter):
    cfg = parse_group(args.group)
    if cfg.field_kind == "function":
        raise UsageError("smoothed sums are for number fields; use ffseries")
    x = default_grid(args.x_min, args.x_max, args.count)
    table = dirichlet_coefficients(cfg, int(math.ceil(10 * x.max())), prime_cutoff=args.prime_cutoff)
    sums = [smoothed_sum_with_error(table, float(v)) for v in x]
    doc: dict[str, Any] = {"group": cfg.label, "x": list(x), "smoothed": [s for s, _ in sums],
                           "error": [e for _, e in sums]}
    if cfg.group_type == "A1":
        c, slope, _ = a1_smoothed_asymptotics(cfg, x, table)
        doc["fit"] = {"c": c, "residual_slope": slope}
    else:
        fit = main_term_fit(cfg, x, table)
        doc["fit"] = {"P": list(fit.P), "P_tilde": list(fit.P_tilde), "residual_slope": fit.residual_slope}
    rows = [[v, s, e] for v, (s, e) in zip(x, sums)]
    return doc, (["x", "smoothed", "error"], rows)


def cmd_poles(args, f: Formatter):
    cfg = parse_group(args.group)
    if cfg.group_type != "A2":
        raise UsageError("pole analysis covers type A2")
    s0 = parse_fraction(args.at)
    model = ContinuationModel(cfg, residual_depth=args.depth, prime_cutoff=args.prime_cutoff or 2000)
    doc: dict[str, Any] = {"order": None}
    if args.residue:
        order, coef = pole_order_and_residue(model, s0, radius=args.radius, points=args.points)
        doc = {"order": order, "leading_coefficient": coef}
    else:
        from .global_assembly import explicit_pole_order

        doc = {"order": explicit_pole_order(model, s0)}
    return doc, (list(doc), [list(doc.values())])


def cmd_zeros(args, f: Formatter):
    try:
        if args.q is not None:
            rec = newton_zero(args.n, args.q, args.tol)
            records, diag = [rec], f"single place q = {args.q}"
        else:
            if args.q_min is None:
                raise UsageError("give --q or --q-min")
            q_max = args.q_max or 2 * args.q_min
            spacing = args.spacing or default_spacing(args.q_min)
            records, diag = rectangle_scan(
                Rectangle(args.t, args.delta), args.q_min, q_max, spacing, args.tol, limit=args.limit
            )
    except InadmissiblePlace as exc:
        raise UsageError(str(exc)) from exc
    print(diag, file=sys.stderr)
    if args.format == "csv":
        return None, ("raw", zeros_to_csv(records, f.digits))
    doc = {"diagnostic": diag, "zeros": [
        {"q": r.q, "n": r.n, "s": r.s_star, "residual": r.e_abs, "iterations": r.iterations} for r in records
    ]}
    return doc, None


def cmd_ffseries(args, f: Formatter):
    cfg = parse_group(args.group) if args.group else GroupConfig.ff_inner(args.q_const)
    if cfg.field_kind != "function":
        raise UsageError("ffseries needs a function-field group")
    ser = ff_power_series(cfg, args.N)
    doc: dict[str, Any] = {"group": cfg.label, "coefficients": list(ser.coeffs)}
    if args.fit:
        if cfg.group_type != "A2":
            raise UsageError("--fit covers type A2")
        fit = ff_coefficient_asymptotics(ser, cfg)
        doc["fit"] = {"P": list(fit.P), "P_tilde": list(fit.P_tilde), "residual_slope": fit.residual_slope,
                      "periodic": fit.periodic}
    return doc, (["n", "coefficient"], [[n, c] for n, c in enumerate(ser.coeffs)])


def cmd_kronecker(args, f: Formatter):
    try:
        ms = ff_kronecker_scan(args.q_const, args.m_max, args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = {"q_const": args.q_const, "m_max": args.m_max, "window": args.window, "count": len(ms), "m": ms}
    return doc, (["m"], [[m] for m in ms])


def cmd_a1(args, f: Formatter):
    cfg = parse_group(args.group)
    if cfg.group_type != "A1":
        raise UsageError("a1 needs sl2_number_field or sl2_ff(Q)")
    path = [float(v) for v in args.s_path.split(",")]
    if args.probe == "branch":
        vals = a1_branch_probe(path, cfg)
        model = [branch_model(s, cfg) for s in path]
        doc = {"s": path, "probe": vals, "model": model}
        return doc, (["s", "probe", "model"], [list(r) for r in zip(path, vals, model)])
    if args.probe == "factor":
        vals = a1_factor_probe(path)
        return {"s": path, "probe": vals}, (["s", "probe"], [list(r) for r in zip(path, vals)])
    if args.probe == "ratios":
        if cfg.field_kind != "function":
            raise UsageError("ratios need sl2_ff(Q)")
        r = a1_ff_ratios(cfg, args.N)
        return {"ratios": r}, (["n", "ratio"], [[n, v] for n, v in enumerate(r)])
    # pole: (s - 2) Z(s) along s -> 2
    vals = []
    for s in path:
        vals.append(complex((s - 2) * a1_continuation_eval(cfg, s)))
    return {"s": path, "scaled": vals}, (["s", "scaled"], [list(r) for r in zip(path, vals)])


def cmd_witten(args, f: Formatter):
    s = parse_complex(args.s)
    fn = witten_dimension_zeta if args.normalization == "dimension" else witten_sl3
    try:
        v = fn(s, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = {"s": s, "mode": args.mode, "normalization": args.normalization, "value": complex(v)}
    return doc, (["s", "value"], [[s, complex(v)]])


# --- parser ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--digits", type=int, default=15, help="significant digits of printed floats")
    common.add_argument("--config", help="JSON file of option defaults")

    p = _Parser(prog="repzeta", description="Representation zeta functions of type A2 and A1.")
    p.add_argument("--version", action="version", version=f"repzeta {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("local", parents=[common], help="local factor and coefficients")
    a.add_argument("--q", type=int, required=True)
    a.add_argument("--epsilon", type=int, default=1, choices=(1, -1))
    a.add_argument("--cutoff", type=int, default=1000)
    a.set_defaults(func=cmd_local)

    a = sub.add_parser("clear", parents=[common], help="clearing ledger and W polynomials")
    a.add_argument("--depth", type=int, default=2)
    a.add_argument("--y-max", type=int, default=None)
    a.set_defaults(func=cmd_clear)

    a = sub.add_parser("eval", parents=[common], help="continued zeta function")
    a.add_argument("--group", default="sl3_z")
    a.add_argument("--s", required=True)
    a.add_argument("--depth", type=int, default=4)
    a.add_argument("--prime-cutoff", type=int, default=None)
    a.set_defaults(func=cmd_eval)

    a = sub.add_parser("coeffs", parents=[common], help="Dirichlet coefficient table")
    a.add_argument("--group", default="sl3_z")
    a.add_argument("--X", type=int, required=True)
    a.add_argument("--prime-cutoff", type=int, default=None)
    a.set_defaults(func=cmd_coeffs)

    a = sub.add_parser("smooth", parents=[common], help="smoothed sums and main-term fit")
    a.add_argument("--group", default="sl3_z")
    a.add_argument("--x-min", type=float, default=1e3)
    a.add_argument("--x-max", type=float, default=1e5)
    a.add_argument("--count", type=int, default=31)
    a.add_argument("--prime-cutoff", type=int, default=None)
    a.set_defaults(func=cmd_smooth)

    a = sub.add_parser("poles", parents=[common], help="pole order and leading coefficient")
    a.add_argument("--group", default="sl3_z")
    a.add_argument("--at", required=True, help="rational point, e.g. 4/5 or 0.8")
    a.add_argument("--residue", action="store_true", help="also compute the leading Laurent coefficient")
    a.add_argument("--radius", type=float, default=0.02)
    a.add_argument("--points", type=int, default=24)
    a.add_argument("--depth", type=int, default=4)
    a.add_argument("--prime-cutoff", type=int, default=None)
    a.set_defaults(func=cmd_poles)

    a = sub.add_parser("zeros", parents=[common], help="zeros of E near Re s = 5/8")
    a.add_argument("--q", type=int, default=None, help="single place")
    a.add_argument("--n", type=int, default=0)
    a.add_argument("--q-min", type=int, default=None)
    a.add_argument("--q-max", type=int, default=None)
    a.add_argument("--t", type=float, default=0.0)
    a.add_argument("--delta", type=float, default=0.01)
    a.add_argument("--spacing", type=int, default=None)
    a.add_argument("--limit", type=int, default=None)
    a.add_argument("--tol", type=float, default=1e-12)
    a.set_defaults(func=cmd_zeros)

    a = sub.add_parser("ffseries", parents=[common], help="function-field power series")
    a.add_argument("--group", default=None, help="ff_inner(Q) or sl2_ff(Q)")
    a.add_argument("--q-const", type=int, default=7)
    a.add_argument("--N", type=int, default=25)
    a.add_argument("--fit", action="store_true")
    a.set_defaults(func=cmd_ffseries)

    a = sub.add_parser("kronecker", parents=[common], help="function-field Kronecker scan")
    a.add_argument("--q-const", type=int, default=7)
    a.add_argument("--m-max", type=int, default=100000)
    a.add_argument("--window", choices=("distance", "fractional"), default="distance")
    a.set_defaults(func=cmd_kronecker)

    a = sub.add_parser("a1", parents=[common], help="type A1 probes")
    a.add_argument("--group", default="sl2_number_field")
    a.add_argument("--probe", choices=("pole", "branch", "factor", "ratios"), default="branch")
    a.add_argument("--s-path", default="1.1,1.01,1.001")
    a.add_argument("--N", type=int, default=20)
    a.set_defaults(func=cmd_a1)

    a = sub.add_parser("witten", parents=[common], help="Witten zeta of SL3(C)")
    a.add_argument("--s", required=True)
    a.add_argument("--mode", choices=("direct", "contour"), default="direct")
    a.add_argument("--normalization", choices=("tornheim", "dimension"), default="tornheim")
    a.set_defaults(func=cmd_witten)
    return p


COMPUTATIONAL_ERRORS = (
    PoleError,
    DomainError,
    CertificationError,
    BranchError,
    ArithmeticError,
    ConsistencyError,
    ParityError,
    MemoryError,
)


def dispatch(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            overrides = load_config_file(args.config)
            given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in (argv or sys.argv[1:]) if a.startswith("--")}
            for k, v in overrides.items():
                if not hasattr(args, k):
                    raise UsageError(f"unknown config key {k!r}")
                if k not in given:
                    setattr(args, k, v)
        f = Formatter(args.digits)
        doc, rows = args.func(args, f)
        if rows is not None and rows[0] == "raw":
            out.write(rows[1])
        elif doc is None:
            emit({}, rows, args.format, f, out)
        else:
            emit(doc, rows, args.format, f, out)
        return 0
    except UsageError as exc:
        print(f"repzeta: usage error: {exc}", file=sys.stderr)
        return 2
    except (UnsupportedConfiguration, BadPlaceError) as exc:
        print(f"repzeta: usage error: {exc}", file=sys.stderr)
        return 2
    except COMPUTATIONAL_ERRORS as exc:
        print(f"repzeta: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
