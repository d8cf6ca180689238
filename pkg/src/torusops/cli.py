"""Command-line entry point: ``torusops <command> ...``.

Exit status: 0 success, 2 malformed input, 3 violated precondition,
4 inconclusive by design (for example the factorization degree cap).
"""

from __future__ import annotations

import csv
import decimal
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .growth import classify_growth, shell_maxima
from .hypo import Verdict, classify, empirical_exponent, sobolev_gain
from .linsolve import InconsistentSystem
from .mizohata import TraceData, reconstruct_general, solve_odd
from .operators import TorusOperator, apply, mizohata_operator
from .sections import (
    EnvelopeSyntaxError,
    Section,
    operator_image,
    parse_envelope,
    principal,
    section_inf,
    section_sup,
    solution_section,
)
from .series import Box, SeriesParseError, TrigSeries, sobolev_norm_sq
from .symbols import parse_term_list

EXIT_INPUT = 2
EXIT_CONTRACT = 3
EXIT_INCONCLUSIVE = 4

FORMATS = click.Choice(["json", "text", "csv"])


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


class ContractError(click.ClickException):
    exit_code = EXIT_CONTRACT


# -- input helpers --------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def load_series(path: str) -> TrigSeries:
    text = _read(path)
    try:
        if text.lstrip().startswith("{"):
            return TrigSeries.from_obj(json.loads(text))
        return TrigSeries.from_text(text)
    except SeriesParseError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_operator(path: str | None) -> TorusOperator:
    if path is None:
        return mizohata_operator()
    try:
        return TorusOperator.from_json(_read(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_poly(text: str):
    try:
        return parse_term_list(text)
    except ValueError as exc:
        raise InputError(f"polynomial: {exc}") from exc


def load_envelope(text: str):
    try:
        return parse_envelope(text)
    except EnvelopeSyntaxError as exc:
        raise InputError(f"envelope: {exc}") from exc


def parse_box(values: tuple[int, ...]) -> Box:
    if len(values) == 2:
        return Box.symmetric(values[0], values[1])
    if len(values) == 4:
        try:
            return Box(*values)
        except ValueError as exc:
            raise InputError(f"box: {exc}") from exc
    raise InputError("box takes R1 R2 (symmetric) or n1_min n1_max n2_min n2_max")


# -- output helpers --------------------------------------------------------------------


def decimal_string(q: Fraction, digits: int) -> tuple[str, bool]:
    """``q`` to ``digits`` significant digits and whether that is exact."""
    ctx = decimal.Context(prec=digits)
    ctx.clear_flags()
    d = ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator))
    return format(d, "f") if abs(d.adjusted()) < 30 else str(d), not ctx.flags[decimal.Inexact]


def _text_lines(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _text_lines(obj[k], f"{prefix}{k}.")
        return out
    return [f"{prefix[:-1]}: {json.dumps(obj) if not isinstance(obj, str) else obj}"]


def emit(obj: dict, fmt: str, rows: list[dict] | None = None) -> None:
    if fmt == "json":
        click.echo(json.dumps(obj, sort_keys=True, indent=2))
    elif fmt == "text":
        click.echo("\n".join(_text_lines(obj)))
    else:
        if rows is None:
            raise InputError("this command has no CSV form")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["empty"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        click.echo(buf.getvalue(), nl=False)


def series_rows(u: TrigSeries, digits: int) -> list[dict]:
    rows = []
    for k, c in u.items():
        s, exact = decimal_string(c.abs2(), digits)
        rows.append({"k1": k[0], "k2": k[1], "abs2": s, "exact": int(exact)})
    return rows


def write_series(u: TrigSeries, out: str | None) -> None:
    if out:
        Path(out).write_text(u.to_text())


# -- commands ------------------------------------------------------------------------


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact spectral calculus on the 2-torus."""


output_opt = click.option("--output", "fmt", type=FORMATS, default="json", show_default=True)
digits_opt = click.option("--digits", type=int, default=17, show_default=True, help="CSV decimal precision")


@main.command("solve-mizohata")
@click.option("--f", "f_path", required=True, help="right-hand side, even in x1")
@click.option("--box", "box", type=int, nargs=2, default=None, help="half-widths R1 R2")
@click.option("--out", default=None, help="write the solution series here")
@output_opt
@digits_opt
def solve_mizohata_cmd(f_path, box, out, fmt, digits):
    """Odd-in-x1 solution of du/dx1 + i sin(x1) du/dx2 = f."""
    f = load_series(f_path)
    b = parse_box(box) if box else None
    try:
        sol = solve_odd(f, b)
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
    write_series(sol.u, out)
    report = sol.to_obj()
    if out is None and fmt != "csv":
        report["solution"] = sol.u.to_obj()
    emit(report, fmt, series_rows(sol.u, digits))


@main.command("reconstruct")
@click.option("--op", "op_path", default=None, help="operator JSON (default: Mizohata)")
@click.option("--col-trace", "cols", multiple=True, help="<u, e^{ipx1}>_x1 for p = 0, 1, ... in order")
@click.option("--row-trace", "rows", multiple=True, help="<u, e^{iqx2}>_x2 for q = 0, 1, ... in order")
@click.option("--rhs", default=None, help="right-hand side series (default zero)")
@click.option("--box", "box", type=int, nargs=4, required=True, help="n1_min n1_max n2_min n2_max")
@click.option("--out", default=None)
@output_opt
@digits_opt
def reconstruct_cmd(op_path, cols, rows, rhs, box, out, fmt, digits):
    """Rebuild a solution from its traces."""
    L = load_operator(op_path)
    traces = TraceData([load_series(p) for p in rows], [load_series(p) for p in cols])
    f = load_series(rhs) if rhs else None
    try:
        rec = reconstruct_general(L, traces, parse_box(box), rhs=f)
    except (ValueError, InconsistentSystem) as exc:
        raise ContractError(str(exc)) from exc
    write_series(rec.u, out)
    report = {"unique": rec.unique, "free": [list(v) for v in rec.free]}
    if out is None and fmt != "csv":
        report["solution"] = rec.u.to_obj()
    emit(report, fmt, series_rows(rec.u, digits))


@main.command("apply-op")
@click.option("--op", "op_path", required=True)
@click.option("--series", "series_path", required=True)
@click.option("--out", default=None)
@output_opt
@digits_opt
def apply_op_cmd(op_path, series_path, out, fmt, digits):
    """Apply an operator to a series, exactly."""
    L = load_operator(op_path)
    u = load_series(series_path)
    try:
        v = apply(L, u)
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
    write_series(v, out)
    if fmt == "text" and out is None:
        click.echo(v.to_text(), nl=False)
        return
    emit(v.to_obj(), fmt, series_rows(v, digits))


@main.group("hypo")
def hypo_group():
    """Hypoellipticity of homogeneous constant-coefficient operators."""


@hypo_group.command("classify")
@click.option("--poly", required=True, help='term list "c a1 a2, ..."')
@click.option("--scan", "scan_radius", type=int, default=None, help="add a shell scan to this radius")
@click.option("--degree-cap", type=int, default=8, show_default=True)
@output_opt
def hypo_classify_cmd(poly, scan_radius, degree_cap, fmt):
    P = load_poly(poly)
    try:
        rep = classify(P, scan_radius=scan_radius, degree_cap=degree_cap)
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
    obj = rep.to_obj()
    if rep.certified and rep.scan is not None:
        obj["sobolev_gain"] = sobolev_gain(P, rep).to_obj()
    rows = None
    if rep.scan is not None:
        rows = [{"shell": s.j, "min_abs2": s.min_abs2, "n1": s.argmin[0], "n2": s.argmin[1]} for s in rep.scan.shells]
    emit(obj, fmt, rows)
    if rep.verdict is Verdict.INCONCLUSIVE:
        sys.exit(EXIT_INCONCLUSIVE)


@hypo_group.command("scan")
@click.option("--poly", required=True)
@click.option("--radius", type=int, required=True)
@click.option("--output", "fmt", type=FORMATS, default="csv", show_default=True)
def hypo_scan_cmd(poly, radius, fmt):
    """Dyadic shell minima of |P(n)|^2."""
    P = load_poly(poly)
    try:
        scan = empirical_exponent(P, radius)
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
    rows = [{"shell": s.j, "min_abs2": s.min_abs2, "n1": s.argmin[0], "n2": s.argmin[1]} for s in scan.shells]
    emit(scan.to_obj(), fmt, rows)


@main.group("growth")
def growth_group():
    """Growth-class heuristics for truncated series."""


@growth_group.command("classify")
@click.option("--series", "series_path", required=True)
@output_opt
def growth_classify_cmd(series_path, fmt):
    u = load_series(series_path)
    try:
        rep = classify_growth(u)
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
    rows = [{"shell": j, "log_max": repr(v)} for j, v in sorted(shell_maxima(u).items())]
    emit(rep.to_obj(), fmt, rows)


@main.group("section")
def section_group():
    """Envelope arithmetic for linear sections."""


def _emit_section(s: Section, fmt: str) -> None:
    obj = {"kind": s.kind, "provenance": s.provenance}
    if s.kind == "principal":
        obj["envelope"] = None if s.atom_form is None else s.atom_form.to_text()
    if s.claimed is not None:
        obj["claimed"] = str(s.claimed)
    if s.notes:
        obj["notes"] = list(s.notes)
    if fmt == "text":
        click.echo(s.to_text() if s.kind != "principal" or s.atom_form is not None else "EMPIRICAL")
        return
    emit(obj, fmt)


@section_group.command("sup")
@click.argument("e1")
@click.argument("e2")
@click.option("--no-simplify", is_flag=True)
@output_opt
def section_sup_cmd(e1, e2, no_simplify, fmt):
    s = section_sup(principal(load_envelope(e1)), principal(load_envelope(e2)), not no_simplify)
    _emit_section(s, fmt)


@section_group.command("inf")
@click.argument("e1")
@click.argument("e2")
@click.option("--no-simplify", is_flag=True)
@output_opt
def section_inf_cmd(e1, e2, no_simplify, fmt):
    s = section_inf(principal(load_envelope(e1)), principal(load_envelope(e2)), not no_simplify)
    _emit_section(s, fmt)


def _section_arg(text: str) -> Section:
    if text in ("Hinf", "HminusInf"):
        return Section(kind=text)
    return principal(load_envelope(text))


@section_group.command("image")
@click.argument("envelope")
@click.option("--op", "op_path", default=None, help="operator JSON (default: Mizohata)")
@output_opt
def section_image_cmd(envelope, op_path, fmt):
    _emit_section(operator_image(load_operator(op_path), _section_arg(envelope)), fmt)


@section_group.command("solve")
@click.argument("envelope")
@click.option("--op", "op_path", default=None, help="operator JSON (default: Mizohata)")
@output_opt
def section_solve_cmd(envelope, op_path, fmt):
    try:
        s = solution_section(load_operator(op_path), _section_arg(envelope))
    except ValueError as exc:
        raise ContractError(str(exc)) from exc
    _emit_section(s, fmt)


@main.command("norm")
@click.option("--series", "series_path", required=True)
@click.option("--m", "m", required=True, help="Sobolev index, a rational p/q")
@click.option("--bits", type=int, default=64, show_default=True)
@output_opt
def norm_cmd(series_path, m, bits, fmt):
    """Squared Sobolev norm sum (1 + k.k)^m |u_k|^2."""
    u = load_series(series_path)
    try:
        mq = Fraction(m)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--m: {exc}") from exc
    val = sobolev_norm_sq(u, mq, bits)
    if isinstance(val, Fraction):
        obj = {"m": str(mq), "norm_sq": str(val), "exact": True}
    else:
        obj = {"m": str(mq), "lower": str(val.lo), "upper": str(val.hi), "exact": False}
    if fmt == "text":
        click.echo(obj["norm_sq"] if val.__class__ is Fraction else f"[{obj['lower']}, {obj['upper']}]")
        return
    emit(obj, fmt)


if __name__ == "__main__":
    main()
