"""Serialisation of intervals, diagnostics, study tables and coverage results.

CSV and markdown print numbers with a fixed number of decimals (3 by
default); JSON keeps full precision. Every format
starts with the master seed so a report can be regenerated.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence

from .errors import UsageError
from .estimators import DiagnosticsReport
from .inference import ConfidenceInterval
from .montecarlo import CoverageResult, StudyResult, StudyRow

FORMATS = ("csv", "json", "markdown")

CI_COLUMNS = ("Level", "Estimate", "CI-low", "CI-high", "Width")
ONE_SAMPLE_COLUMNS = (
    "replication", "level", "mean", "mean_ci_low", "mean_ci_high", "mean_width",
    "variance", "variance_ci_low", "variance_ci_high", "variance_width", "error",
)  # fmt: skip
TWO_SAMPLE_COLUMNS = (
    "replication", "level", "ratio", "ratio_ci_low", "ratio_ci_high", "ratio_width",
    "mean_diff", "mean_diff_ci_low", "mean_diff_ci_high", "mean_diff_width", "error",
)  # fmt: skip
COVERAGE_COLUMNS = (
    "target", "tau", "nominal", "empirical_coverage", "mean_width",
    "replications", "failures", "true_value",
)  # fmt: skip


def _num(x, precision: int) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{precision}f}"


def _header(kind: str, meta: dict) -> str:
    seed = meta.get("master_seed")
    return f"tfep {kind} master_seed={'' if seed is None else seed}"


def _kind(result) -> str:
    if isinstance(result, ConfidenceInterval):
        return "interval"
    if isinstance(result, DiagnosticsReport):
        return "diagnostics"
    if isinstance(result, StudyResult):
        return result.kind
    if isinstance(result, Sequence) and result and all(isinstance(r, CoverageResult) for r in result):
        return "coverage"
    raise UsageError(f"cannot serialise object of type {type(result).__name__}")


def emit_report(result, fmt: str = "markdown", *, precision: int = 3, meta: dict | None = None) -> str:
    """Render ``result`` as ``csv``, ``json`` or ``markdown`` text.

    Args:
        result: a ConfidenceInterval, DiagnosticsReport, StudyResult or a
            list of CoverageResult.
        fmt: output format tag.
        precision: decimals for csv and markdown numbers.
        meta: extra metadata (master seed, config echo); a StudyResult
            carries its own.

    Raises:
        UsageError: unknown format or unsupported result type.
    """
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    kind = _kind(result)
    meta = {**(getattr(result, "meta", None) or {}), **(meta or {})}
    if fmt == "json":
        return _json(kind, result, meta)
    header, rows = _table(kind, result, precision, markdown=fmt == "markdown")
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# {_header(kind, meta)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    lines = [f"<!-- {_header(kind, meta)} -->", "", "| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join("---" for _ in header) + "|")
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    notes = [f"- {row.level}: {row.error}" for row in getattr(result, "rows", ()) if row.error]
    if notes:
        lines += ["", "Rows with missing intervals:", *notes]
    return "\n".join(lines) + "\n"


# -- tabular formats ---------------------------------------------------------------


def _ci_cells(ci: ConfidenceInterval | None, p: int, markdown: bool) -> list[str]:
    if ci is None:
        return ["", ""] if markdown else ["", "", "", ""]
    if markdown:
        return [_num(ci.estimate, p), f"[{_num(ci.lower, p)}, {_num(ci.upper, p)}]"]
    return [_num(ci.estimate, p), _num(ci.lower, p), _num(ci.upper, p), _num(ci.width, p)]


def _table(kind: str, result, p: int, *, markdown: bool) -> tuple[list[str], list[list[str]]]:
    if kind == "interval":
        ci = result
        level = "" if ci.tau is None else f"{ci.tau:.2f}"
        if markdown:
            return ["Level", "Estimate", "CI", "Width"], [[level, *_ci_cells(ci, p, True), _num(ci.width, p)]]
        return list(CI_COLUMNS), [[level, *_ci_cells(ci, p, False)]]
    if kind == "diagnostics":
        d = result
        values = [str(d.n), *(_num(getattr(d, c), p) for c in DiagnosticsReport.CSV_COLUMNS[1:])]
        if markdown:
            return ["n", "Mean", "Median", "Std. Dev.", "Skewness", "Kurtosis", "JB p-value"], [values]
        return list(DiagnosticsReport.CSV_COLUMNS), [values]
    if kind in ("one-sample", "two-sample"):
        multi = len({row.replication for row in result.rows}) > 1
        if markdown:
            names = ["Mean", "CI", "Variance", "CI"] if kind == "one-sample" else ["R", "CI", "Δμ", "CI"]
            header = (["Rep"] if multi else []) + ["Level", *names]
            body = []
            for row in result.rows:
                cells = [row.level, *_ci_cells(row.first, p, True), *_ci_cells(row.second, p, True)]
                body.append(([str(row.replication)] if multi else []) + cells)
            return header, body
        header = list(ONE_SAMPLE_COLUMNS if kind == "one-sample" else TWO_SAMPLE_COLUMNS)
        body = [
            [str(row.replication), row.level, *_ci_cells(row.first, p, False),
             *_ci_cells(row.second, p, False), row.error or ""]  # fmt: skip
            for row in result.rows
        ]
        return header, body
    # coverage
    body = [
        [c.target, f"{c.tau:.2f}", _num(c.nominal, p), _num(c.empirical_coverage, p), _num(c.mean_width, p),
         str(c.replications), str(c.failures), _num(c.true_value, p)]  # fmt: skip
        for c in result
    ]
    if markdown:
        header = ["Target", "Level", "Nominal", "Coverage", "Mean width", "Replications", "Failures", "True value"]
        return header, body
    return list(COVERAGE_COLUMNS), body


# -- json ------------------------------------------------------------------------------


def _row_dict(row) -> dict:
    return {
        "replication": row.replication,
        "level": row.level,
        "tau": row.tau,
        "first": None if row.first is None else row.first.to_dict(),
        "second": None if row.second is None else row.second.to_dict(),
        "error": row.error,
    }


def _json(kind: str, result, meta: dict) -> str:
    doc: dict = {"report": kind, "master_seed": meta.get("master_seed")}
    extra = {k: v for k, v in meta.items() if k != "master_seed"}
    if extra:
        doc["meta"] = extra
    if kind == "interval":
        doc["interval"] = result.to_dict()
    elif kind == "diagnostics":
        d = result
        doc["diagnostics"] = {
            "n": d.n, "mean": d.mean, "median": d.median, "sd": d.sd, "skewness": d.skewness,
            "kurtosis": d.kurtosis, "jb_statistic": d.jb_statistic, "jb_p_value": d.jb_p_value,
        }  # fmt: skip
    elif kind in ("one-sample", "two-sample"):
        doc["labels"] = list(result.labels)
        doc["rows"] = [_row_dict(r) for r in result.rows]
    else:
        doc["results"] = [
            {
                "target": c.target, "tau": c.tau, "nominal": c.nominal,
                "empirical_coverage": c.empirical_coverage, "mean_width": c.mean_width,
                "replications": c.replications, "failures": c.failures, "covered": c.covered,
                "true_value": c.true_value,
            }  # fmt: skip
            for c in result
        ]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def study_from_json(text: str) -> StudyResult:
    """Rebuild a StudyResult from :func:`emit_report` JSON output."""
    doc = json.loads(text)
    rows = tuple(
        StudyRow(
            replication=r["replication"],
            level=r["level"],
            tau=r["tau"],
            first=None if r["first"] is None else ConfidenceInterval.from_dict(r["first"]),
            second=None if r["second"] is None else ConfidenceInterval.from_dict(r["second"]),
            error=r["error"],
        )
        for r in doc["rows"]
    )
    meta = {"master_seed": doc.get("master_seed"), **doc.get("meta", {})}
    return StudyResult(doc["report"], rows, meta)
