"""Bit-stable export of result objects to CSV and JSON.

Fixed column order per type, floats printed with 17 significant digits,
LF line endings: exporting the same result twice yields byte-identical
files, which the determinism acceptance test relies on.
"""

from __future__ import annotations

import json
import math
import os
from typing import Any

from .convolve import BracketGrid
from .errors import ParameterError
from .functionals import ClassReport, DiagSeries
from .montecarlo import ComparisonTable, McEstimate

__all__ = ["export_grid", "fmt_float", "result_to_obj"]


def fmt_float(v: float) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return f"{v:.17g}"


def _diag_rows(s: DiagSeries):
    header = [s.param_name, "value", "log_value"]
    if s.windows is not None:
        header.append("window")
    rows = []
    for i in range(len(s.grid)):
        row = [fmt_float(float(s.grid[i])), fmt_float(float(s.values[i])), fmt_float(float(s.log_values[i]))]
        if s.windows is not None:
            row.append(s.windows[i])
        rows.append(row)
    return header, rows


def _bracket_rows(b: BracketGrid):
    header = ["x", "log_lower", "log_upper"]
    rows = [
        [fmt_float(float(b.grid[i])), fmt_float(float(b.log_lower[i])), fmt_float(float(b.log_upper[i]))]
        for i in range(len(b.grid))
    ]
    return header, rows


def _mc_rows(m: McEstimate):
    header = ["estimate", "std_error", "accepted", "total", "seed"]
    rows = [[fmt_float(m.estimate), fmt_float(m.std_error), str(m.accepted), str(m.total), str(m.seed)]]
    return header, rows


def _table_rows(t: ComparisonTable):
    header = ["n", "x", "K", "estimate", "std_error", "bracket_lower", "bracket_upper", "z", "flagged", "error"]
    rows = []
    for r in t.rows:
        rows.append(
            [
                str(r.n),
                fmt_float(r.x),
                fmt_float(r.K),
                fmt_float(r.estimate) if r.estimate is not None else "",
                fmt_float(r.std_error) if r.std_error is not None else "",
                fmt_float(r.bracket_lower) if r.bracket_lower is not None else "",
                fmt_float(r.bracket_upper) if r.bracket_upper is not None else "",
                fmt_float(r.z) if r.z is not None else "",
                "1" if r.flagged else "0",
                r.error or "",
            ]
        )
    return header, rows


def _report_rows(rep: ClassReport):
    header = ["class", "verdict", "detail"]
    rows = [[e.cls, e.verdict, e.detail] for e in rep.entries]
    return header, rows


def result_to_obj(result: Any) -> dict:
    """JSON-able representation with a type tag (used by `export`)."""
    if isinstance(result, DiagSeries):
        obj = {
            "type": "DiagSeries",
            "kind": result.kind,
            "param": result.param_name,
            "grid": [float(v) for v in result.grid],
            "values": [float(v) for v in result.values],
            "log_values": [float(v) for v in result.log_values],
            "trend": result.trend,
            "limit": result.limit,
        }
        if result.windows is not None:
            obj["windows"] = list(result.windows)
        return obj
    if isinstance(result, BracketGrid):
        return {
            "type": "BracketGrid",
            "n": result.n,
            "h": result.h,
            "cap": result.cap if math.isfinite(result.cap) else None,
            "x": [float(v) for v in result.grid],
            "log_lower": [float(v) for v in result.log_lower],
            "log_upper": [float(v) for v in result.log_upper],
        }
    if isinstance(result, McEstimate):
        return {
            "type": "McEstimate",
            "estimate": result.estimate,
            "std_error": result.std_error,
            "accepted": result.accepted,
            "total": result.total,
            "seed": result.seed,
        }
    if isinstance(result, ComparisonTable):
        return {
            "type": "ComparisonTable",
            "z_flag": float(result.z_flag),
            "rows": [
                {
                    "n": r.n,
                    "x": r.x,
                    "K": r.K,
                    "estimate": r.estimate,
                    "std_error": r.std_error,
                    "bracket_lower": r.bracket_lower,
                    "bracket_upper": r.bracket_upper,
                    "z": r.z,
                    "flagged": r.flagged,
                    "error": r.error,
                }
                for r in result.rows
            ],
        }
    if isinstance(result, ClassReport):
        return {
            "type": "ClassReport",
            "label": result.label,
            "disclaimer": result.disclaimer,
            "entries": [
                {"class": e.cls, "verdict": e.verdict, "detail": e.detail} for e in result.entries
            ],
        }
    raise ParameterError(f"don't know how to export {type(result).__name__}")


def export_grid(result: Any, fmt: str, path: str | os.PathLike) -> None:
    """Write a result object to ``path`` as csv or json (bit-stable)."""
    if fmt == "json":
        obj = result_to_obj(result)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
        return
    if fmt != "csv":
        raise ParameterError(f"unknown export format {fmt!r}; use csv or json")
    if isinstance(result, DiagSeries):
        header, rows = _diag_rows(result)
    elif isinstance(result, BracketGrid):
        header, rows = _bracket_rows(result)
    elif isinstance(result, McEstimate):
        header, rows = _mc_rows(result)
    elif isinstance(result, ComparisonTable):
        header, rows = _table_rows(result)
    elif isinstance(result, ClassReport):
        header, rows = _report_rows(result)
    else:
        raise ParameterError(f"don't know how to export {type(result).__name__}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
