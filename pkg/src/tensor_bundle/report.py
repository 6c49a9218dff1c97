"""JSON-lines verification reports.

One header line per scenario, one line per check, one summary line.  Field
order is fixed and no timestamps are written, so equal seeds give
byte-identical reports.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

from .checks import CheckResult
from .config import Scenario

__all__ = ["scenario_header", "result_record", "summary_record", "write_records", "format_line"]


def _num(v: float):
    v = float(v)
    if v != v or v in (float("inf"), float("-inf")):
        return repr(v)  # JSON has no NaN or infinity literal
    return v


def scenario_header(sc: Scenario) -> dict:
    return {
        "scenario": sc.name,
        "base": sc.chart.name,
        "n": sc.n,
        "f": str(sc.f.expr),
        "bundle": [sc.p, sc.q],
        "seed": sc.seed,
        "samples": sc.samples,
    }


def result_record(sc: Scenario, r: CheckResult) -> dict:
    return {
        "scenario": sc.name,
        "check": r.check,
        "status": r.status,
        "max_residual": _num(r.max_residual),
        "tolerance": _num(r.tolerance),
        "worst_point": [_num(v) for v in r.worst_point],
        "samples": r.samples,
        "note": r.note,
    }


def summary_record(results: Iterable[CheckResult]) -> dict:
    results = list(results)
    count = {s: sum(r.status == s for r in results) for s in ("pass", "fail", "skip")}
    return {"summary": True, "passed": count["pass"], "failed": count["fail"], "skipped": count["skip"]}


def write_records(records: Iterable[dict], out: IO) -> None:
    for rec in records:
        out.write(json.dumps(rec, ensure_ascii=False) + "\n")


def format_line(sc: Scenario, r: CheckResult) -> str:
    """Human-readable status line for the terminal."""
    return (f"{r.status.upper():4s}  {sc.name:<18s} {r.check:<34s} "
            f"{r.max_residual:10.3e}  tol {r.tolerance:.0e}  {r.note}").rstrip()
