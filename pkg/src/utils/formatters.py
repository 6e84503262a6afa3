"""Report formatting utilities"""

import math
from typing import List

from ..reports.models import RunReport


def format_value(value: float, decimals: int = 10) -> str:
    """Fixed-width-free float formatting; integers print without a fraction"""
    if math.isfinite(value) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return f"{value:.{decimals}g}"


def format_status(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


def format_duration(seconds: float) -> str:
    if seconds < 1.0:
        return f"{seconds * 1000:.0f}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, rest = divmod(int(seconds), 60)
    return f"{minutes}m {rest}s"


def format_table_row(columns: List[str], widths: List[int]) -> str:
    """Format a table row with fixed widths"""
    row = []
    for col, width in zip(columns, widths):
        row.append(col[:width].ljust(width))
    return " | ".join(row)


def format_kv(report: RunReport) -> str:
    """
    Line-oriented key=value document

    Numeric results print as ``name=value`` followed by ``name.tol=...``;
    checks print as ``check.<name>=PASS|FAIL``.
    """
    lines = [f"command={report.command}"]
    if report.digest:
        lines.append(f"digest={report.digest}")
    for key, value in report.notes.items():
        lines.append(f"{key}={value}")
    for r in report.results:
        lines.append(f"{r.name}={format_value(r.value)}")
        lines.append(f"{r.name}.tol={r.tolerance:g}")
    for c in report.checks:
        lines.append(f"check.{c.name}={format_status(c.passed)}")
    lines.append(f"status={format_status(report.passed)}")
    return "\n".join(lines)


def format_report(report: RunReport) -> str:
    """Human-readable report"""
    lines = [f"{report.command}"]
    if report.digest:
        lines.append(f"  inputs  {report.digest}")
    for key, value in report.notes.items():
        lines.append(f"  {key}: {value}")
    if report.results:
        width = max(len(r.name) for r in report.results)
        lines.append("")
        for r in report.results:
            lines.append(f"  {r.name.ljust(width)}  {format_value(r.value)}  (tol {r.tolerance:g})")
    if report.checks:
        lines.append("")
        widths = [max(len(c.name) for c in report.checks), 22, 2, 22, 4]
        for c in report.checks:
            lines.append("  " + format_table_row(
                [c.name, format_value(c.lhs), c.relation, format_value(c.rhs), format_status(c.passed)],
                widths,
            ))
    return "\n".join(lines)
