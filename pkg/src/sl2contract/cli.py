"""Command line driver and deterministic report emission.

Subcommands
-----------
* ``family``     print a family's coefficient table over a window, optionally
                 specialized at --t
* ``verify``     bracket / Casimir / intertwiner suites over a parameter grid
* ``contract``   the t = 0 module: support, quotient and Mackey datum
* ``intertwine`` the alpha table, limits and composition check
* ``bijection``  the correspondence table for a preset or explicit specs
* ``schmid``     the odd singular splitting check

Reports are emitted as aligned text or JSON (``--format``).  All exact
quantities are serialized as exact rational strings; identical argv always
produces byte-identical output.  Exit status: 0 on success, 1 with the
failing invariant named when a verification fails, 2 on usage errors.

Independent grid cells of ``verify`` can be fanned out to worker processes
by setting SL2CONTRACT_WORKERS; results are merged in sorted order, so the
report does not depend on the worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .contraction import (
    InconsistencyError,
    UnclassifiedSupportError,
    bijection_table,
    contract,
    irreducible_quotient,
    mackey_collisions,
    schmid_check,
    split_rees_odd,
    support,
    tempered_sample_specs,
)
from .dsl import DslError, parse_module_doc
from .exactnum import PoleError, Scalar, eval_at, gauss, limit_at_zero
from .families import FamilySpec, build_family, specialize
from .intertwine import (
    alpha,
    composition_defect,
    equivariance_defect,
    finite_rank_image,
)
from .ladder import DomainError, bracket_defect, casimir_defect, generated_submodule

WORKERS_ENV = "SL2CONTRACT_WORKERS"

_DEFAULT_L_GRID = ("3", "-3", "2i", "1+i", "5/2")


class _EngineFailure(Exception):
    """Engine-level error carried into the report with exit code 1."""


# --- report plumbing ---------------------------------------------------------


def _report(command: str, argv: list[str], params: dict, result, invariants) -> dict:
    return {
        "engine": {"name": "sl2contract", "version": __version__},
        "command": command,
        "argv": list(argv),
        "params": params,
        "result": result,
        "invariants": invariants,
    }


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _render_rows(rows: list[dict], order: list[str]) -> list[str]:
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in order}
    header = "  ".join(c.ljust(widths[c]) for c in order)
    sep = "  ".join("-" * widths[c] for c in order)
    lines = [header, sep]
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in order))
    return lines


def render_text(report: dict) -> str:
    lines = [
        f"sl2contract {__version__} :: {report['command']}",
        f"argv: {' '.join(report['argv'])}",
    ]
    for key in sorted(report["params"]):
        lines.append(f"  {key} = {report['params'][key]}")
    result = report["result"]
    if isinstance(result, dict) and "rows" in result:
        lines.append("")
        lines.extend(_render_rows(result["rows"], result["columns"]))
        extra = {k: v for k, v in result.items() if k not in ("rows", "columns")}
        if extra:
            lines.append("")
            lines.append(json.dumps(extra, sort_keys=True, indent=2))
    elif result is not None:
        lines.append("")
        lines.append(json.dumps(result, sort_keys=True, indent=2))
    if report["invariants"]:
        lines.append("")
        lines.append("invariants:")
        for inv in report["invariants"]:
            status = "PASS" if inv["pass"] else "FAIL"
            detail = f"  ({inv['detail']})" if inv.get("detail") else ""
            lines.append(f"  {status} {inv['name']}{detail}")
    return "\n".join(lines) + "\n"


def _exit_code(invariants: list[dict]) -> int:
    return 0 if all(inv["pass"] for inv in invariants) else 1


# --- family selection --------------------------------------------------------


def _add_selection(sub: argparse.ArgumentParser, repeatable: bool = False):
    action = "append" if repeatable else "store"
    sub.add_argument("--family", choices=FamilySpec.KINDS, help="built-in family kind")
    sub.add_argument("--l", action=action, help="spectral parameter, e.g. 2i or 5/2")
    sub.add_argument("--k", action=action, type=int, choices=(0, 1), help="parity")
    sub.add_argument("--n", action=action, type=int, help="discrete parameter n >= 0")
    sub.add_argument("--sign", action=action, choices=("+", "-"))
    sub.add_argument("--doc", help="module DSL document path, or - for stdin")


def _read_doc(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _spec_from_flags(args) -> FamilySpec:
    if args.family is None:
        raise _EngineFailure("either --family or --doc is required")
    kwargs = {"kind": args.family}
    if args.l is not None:
        kwargs["l"] = gauss(args.l)
    if args.k is not None:
        kwargs["k"] = args.k
    if args.n is not None:
        kwargs["n"] = args.n
    if args.sign is not None:
        kwargs["sign"] = args.sign
    return FamilySpec(**kwargs)


def serialize_params(spec: FamilySpec) -> dict:
    out = {"family": spec.kind}
    if spec.kind != "discrete":
        out["k"] = spec.k
    if spec.l is not None:
        out["l"] = str(spec.l)
    if spec.n is not None:
        out["n"] = spec.n
    if spec.sign is not None:
        out["sign"] = spec.sign
    return out


# --- verify cells -------------------------------------------------------------


def _verify_cell(cell: dict) -> list[dict]:
    """Run every applicable suite for one grid cell; returns invariant rows."""
    window = (cell["lo"], cell["hi"])
    if "doc" in cell:
        fam, _ = parse_module_doc(cell["doc"]).build()
        l = None
    else:
        spec = FamilySpec(
            kind=cell["kind"],
            l=gauss(cell["l"]) if cell.get("l") else None,
            k=cell.get("k", 0),
            n=cell.get("n"),
            sign=cell.get("sign"),
        )
        fam, _ = build_family(spec)
        l = spec.l if spec.kind != "rees_lambda0" else gauss(0)
    out = []
    defects = bracket_defect(fam, window)
    out.append(
        {
            "name": f"bracket[{fam.label}]",
            "pass": not defects,
            "detail": "" if not defects else _defect_text(defects),
        }
    )
    if l is not None:
        cdef = casimir_defect(fam, l, window)
        out.append(
            {
                "name": f"casimir[{fam.label}]",
                "pass": not cdef,
                "detail": "" if not cdef else f"first residual at p={cdef[0][0]}: {cdef[0][1]}",
            }
        )
        if cell.get("kind") in ("principal", "minimal_ktype", "finite_dim"):
            ilo, ihi = max(window[0], -25), min(window[1], 25)
            eq = equivariance_defect(l, fam.k, (ilo, ihi))
            out.append(
                {
                    "name": f"equivariance[{fam.label}]",
                    "pass": not eq,
                    "detail": "" if not eq else f"{eq[0][0]} defect at p={eq[0][1]}",
                }
            )
            alpha_issues = alpha(l, fam.k, (ilo, ihi)).recursion_defects()
            out.append(
                {
                    "name": f"alpha-recursion[{fam.label}]",
                    "pass": not alpha_issues,
                    "detail": "" if not alpha_issues else f"seam at p={alpha_issues[0][0]}",
                }
            )
    return out


def _defect_text(defects) -> str:
    d = defects[0]
    return f"{len(defects)} defects; first: {d.relation} at p={d.index}: {d.defect}"


def _run_cells(cells: list[dict]) -> list[dict]:
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_verify_cell, cells))
    else:
        chunks = [_verify_cell(cell) for cell in cells]
    merged = [inv for chunk in chunks for inv in chunk]
    return sorted(merged, key=lambda inv: inv["name"])


# --- subcommand implementations -----------------------------------------------


def _cmd_family(args, argv) -> tuple[int, dict]:
    if args.doc is not None:
        doc = parse_module_doc(_read_doc(args.doc))
        fam, seeds = doc.build()
        params = {"doc": doc.pretty().strip()}
    else:
        spec = _spec_from_flags(args)
        fam, seeds = build_family(spec)
        params = serialize_params(spec)
    window = _window_for(fam, args.window)
    params["window"] = list(window)
    if args.t is not None:
        tau = gauss(args.t)
        fam = specialize(fam, tau)
        params["t"] = str(tau)
    rows = []
    for p in range(window[0], window[1] + 1):
        rows.append(
            {
                "p": p,
                "raise": str(fam.raise_at(p)),
                "lower": str(fam.lower_at(p)),
                "weight": str(fam.weight_at(p)),
            }
        )
    result = {
        "columns": ["p", "raise", "lower", "weight"],
        "rows": rows,
        "family": fam.to_json(),
    }
    if seeds is not None:
        result["seeds"] = sorted(seeds)
    report = _report("family", argv, params, result, [])
    return 0, report


def _window_for(fam, size: int):
    lo = -size if fam.indices.lo is None else fam.indices.lo
    hi = size if fam.indices.hi is None else fam.indices.hi
    return (max(lo, -size), min(hi, size))


def _cmd_verify(args, argv) -> tuple[int, dict]:
    size = args.window
    cells: list[dict] = []
    if args.doc is not None:
        text = _read_doc(args.doc)
        doc = parse_module_doc(text)
        fam, _ = doc.build()
        lo, hi = _window_for(fam, size)
        cells.append({"doc": text, "lo": lo, "hi": hi})
        params = {"doc": doc.pretty().strip(), "window": [lo, hi]}
    else:
        if args.family is None:
            raise _EngineFailure("either --family or --doc is required")
        kind = args.family
        ks = args.k or [0, 1]
        if kind in ("principal", "minimal_ktype", "finite_dim"):
            ls = args.l or list(_DEFAULT_L_GRID)
            for l_text in ls:
                for k in ks:
                    if kind == "finite_dim" and (gauss(l_text).re + k) % 2 == 0:
                        continue
                    cells.append(
                        {"kind": kind, "l": l_text, "k": k, "lo": -size, "hi": size}
                    )
        elif kind == "discrete":
            ns = args.n or list(range(5))
            signs = args.sign or ["+", "-"]
            for n in ns:
                for sign in signs:
                    cells.append(
                        {"kind": kind, "n": n, "sign": sign, "lo": 0, "hi": size}
                    )
        else:
            for k in ks:
                cells.append({"kind": kind, "k": k, "lo": -size, "hi": size})
        params = {"family": kind, "cells": len(cells), "window_size": size}
    invariants = _run_cells(cells)
    report = _report("verify", argv, params, None, invariants)
    return _exit_code(invariants), report


def _cmd_contract(args, argv) -> tuple[int, dict]:
    if args.doc is not None:
        doc = parse_module_doc(_read_doc(args.doc))
        fam, _ = doc.build()
        params = {"doc": doc.pretty().strip()}
        spec = None
    else:
        spec = _spec_from_flags(args)
        fam, _ = build_family(spec)
        params = serialize_params(spec)
    size = args.window
    params["window"] = size
    pieces = []
    if spec is not None and spec.kind == "rees_lambda0" and spec.k == 1:
        lower_half, upper_half = split_rees_odd(fam)
        pieces = [lower_half, upper_half]
    else:
        pieces = [fam]
    data = []
    invariants = []
    for piece in pieces:
        frozen = contract(piece)
        win = _window_for(frozen, size)
        supp = support(frozen, win)
        datum = irreducible_quotient(frozen, supp, win)
        data.append(
            {
                "family": piece.label,
                "contracted": frozen.to_json(),
                "support": supp.to_json(),
                "mackey_datum": datum.to_json(),
            }
        )
        invariants.append(
            {
                "name": f"support-classified[{piece.label}]",
                "pass": True,
                "detail": supp.describe(),
            }
        )
    result = {"modules": data}
    report = _report("contract", argv, params, result, invariants)
    return _exit_code(invariants), report


def _cmd_intertwine(args, argv) -> tuple[int, dict]:
    l = gauss(args.l)
    k = args.k if args.k is not None else 0
    window = (-args.window, args.window)
    at_t = gauss(args.at_t)
    params = {"l": str(l), "k": k, "window": list(window), "at_t": str(at_t)}
    seq = alpha(l, k, window)
    rows = []
    for p in range(window[0], window[1] + 1):
        a = seq[p]
        try:
            at_one = str(eval_at(a, 1))
        except PoleError:
            at_one = "pole"
        try:
            at_zero = str(limit_at_zero(a))
        except PoleError:
            at_zero = "pole"
        rows.append({"p": p, "alpha(t=1)": at_one, "alpha(l/t)": str(a), "alpha0": at_zero})
    issues = composition_defect(l, k, window, at_t)
    result = {
        "columns": ["p", "alpha(t=1)", "alpha(l/t)", "alpha0"],
        "rows": rows,
        "composition_issues": [
            {
                "p": issue.index,
                "defect": None if issue.defect is None else str(issue.defect),
                "reason": issue.reason,
            }
            for issue in issues
        ],
    }
    if l.is_integer() and l.re > 0 and (l.as_int() + k) % 2 == 1:
        image = sorted(finite_rank_image(l, k, window))
        result["finite_rank_image"] = image
        result["finite_rank"] = len(image)
    recursion = seq.recursion_defects()
    eq = equivariance_defect(l, k, window) if l else []
    symbolic_bad = [i for i in issues if i.reason == "nonzero symbolic residual"]
    invariants = [
        {
            "name": "alpha-recursion",
            "pass": not recursion,
            "detail": "" if not recursion else f"seam at p={recursion[0][0]}",
        },
        {
            "name": "equivariance",
            "pass": not eq,
            "detail": "" if not eq else f"{eq[0][0]} defect at p={eq[0][1]}",
        },
        {
            "name": "composition-symbolic",
            "pass": not symbolic_bad,
            "detail": "" if not symbolic_bad else f"residual at p={symbolic_bad[0].index}",
        },
    ]
    report = _report("intertwine", argv, params, result, invariants)
    return _exit_code(invariants), report


def _cmd_bijection(args, argv) -> tuple[int, dict]:
    specs: list[FamilySpec] = []
    params: dict = {}
    if args.preset is not None:
        if args.preset != "tempered-sample":
            raise _EngineFailure(f"unknown preset {args.preset!r}")
        specs.extend(tempered_sample_specs())
        params["preset"] = args.preset
    for text in args.spec or []:
        doc = parse_module_doc(text)
        if doc.is_custom():
            raise _EngineFailure("--spec takes built-in family headers only")
        specs.append(doc.header)
    if not specs:
        raise _EngineFailure("nothing to tabulate: give --preset or --spec")
    params["specs"] = len(specs)
    size = args.window
    rows_data = bijection_table(specs, (-size, size))
    collisions = mackey_collisions(rows_data)
    rows = []
    for row in rows_data:
        datum = row.datum
        rows.append(
            {
                "module": row.t1_label,
                "support": datum.support.describe(),
                "quotient": datum.label,
                "weights": "" if datum.weights is None else str(list(datum.weights)),
                "parity": "" if datum.parity is None else str(datum.parity),
            }
        )
    result = {
        "columns": ["module", "support", "quotient", "weights", "parity"],
        "rows": rows,
        "table": [row.to_json() for row in rows_data],
    }
    invariants = [
        {
            "name": "mackey-datum-injective",
            "pass": not collisions,
            "detail": "" if not collisions else f"{collisions[0][0]} vs {collisions[0][1]}",
        }
    ]
    report = _report("bijection", argv, params, result, invariants)
    return _exit_code(invariants), report


def _cmd_schmid(args, argv) -> tuple[int, dict]:
    window = (0, args.window)
    ok = schmid_check(window)
    invariants = [
        {
            "name": "schmid-splitting",
            "pass": ok,
            "detail": "both halves match the limit ladders" if ok else "mismatch",
        }
    ]
    report = _report(
        "schmid", argv, {"window": list(window)}, {"splits": ok}, invariants
    )
    return _exit_code(invariants), report


# --- argument parsing ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sl2contract",
        description="Exact contraction families of sl2 ladder modules",
    )
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_family = subs.add_parser("family", help="coefficient table of a family")
    _add_selection(p_family)
    p_family.add_argument("--window", type=int, default=10)
    p_family.add_argument("--t", help="specialize at this t")

    p_verify = subs.add_parser("verify", help="identity suites over a grid")
    _add_selection(p_verify, repeatable=True)
    p_verify.add_argument("--window", type=int, default=40)

    p_contract = subs.add_parser("contract", help="t = 0 module and Mackey datum")
    _add_selection(p_contract)
    p_contract.add_argument("--window", type=int, default=40)

    p_inter = subs.add_parser("intertwine", help="alpha table and checks")
    p_inter.add_argument("--l", required=True)
    p_inter.add_argument("--k", type=int, choices=(0, 1))
    p_inter.add_argument("--window", type=int, default=25)
    p_inter.add_argument("--at-t", dest="at_t", default="1")

    p_bij = subs.add_parser("bijection", help="correspondence table")
    p_bij.add_argument("--preset", choices=("tempered-sample",))
    p_bij.add_argument("--spec", action="append", help="extra 'family ...' headers")
    p_bij.add_argument("--window", type=int, default=40)

    p_schmid = subs.add_parser("schmid", help="odd singular splitting check")
    p_schmid.add_argument("--window", type=int, default=40)

    return parser


_DISPATCH = {
    "family": _cmd_family,
    "verify": _cmd_verify,
    "contract": _cmd_contract,
    "intertwine": _cmd_intertwine,
    "bijection": _cmd_bijection,
    "schmid": _cmd_schmid,
}


def run(argv: list[str]) -> tuple[int, dict | None]:
    """Execute one CLI invocation; returns (exit code, report)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), None
    try:
        return _DISPATCH[args.command](args, argv)
    except DslError as exc:
        report = _report(
            args.command, argv, {}, {"error": str(exc), "kind": "diagnostic"}, []
        )
        return 2, report
    except (
        _EngineFailure,
        DomainError,
        PoleError,
        UnclassifiedSupportError,
        InconsistencyError,
        ValueError,
        OSError,
    ) as exc:
        report = _report(
            args.command, argv, {}, {"error": str(exc), "kind": type(exc).__name__}, []
        )
        return 1, report


def main() -> None:
    argv = sys.argv[1:]
    code, report = run(argv)
    if report is not None:
        text = render_json(report) if _wants_json(argv) else render_text(report)
        sys.stdout.write(text)
    sys.exit(code)


def _wants_json(argv: list[str]) -> bool:
    for i, arg in enumerate(argv):
        if arg == "--format" and i + 1 < len(argv):
            return argv[i + 1] == "json"
        if arg.startswith("--format="):
            return arg.split("=", 1)[1] == "json"
    return False
