"""Compression benchmarking: per-file size reductions and corpus average.

Reduction is (1 - binary/xml) * 100 rounded to two decimals; the corpus
average is the arithmetic mean of the rounded row values, again to two
decimals.  Rendering mirrors the usual report layout: label column,
.x3d / .s3db byte counts with thousands separators, a % Reduction column,
and an Average Reduction footer row.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CompressionRow:
    label: str
    xml_bytes: int
    binary_bytes: int
    reduction_pct: float


@dataclass(frozen=True)
class CompressionReport:
    rows: tuple
    average_reduction_pct: float


def _round2(x: float) -> float:
    return round(x, 2)


def compression_report(pairs) -> CompressionReport:
    """Build a report from (label, xml_bytes, binary_bytes) triples."""
    rows = []
    for label, xml_bytes, binary_bytes in pairs:
        if xml_bytes <= 0:
            raise ValueError(f"{label!r}: xml size must be positive, got {xml_bytes}")
        if binary_bytes < 0:
            raise ValueError(f"{label!r}: negative binary size {binary_bytes}")
        reduction = _round2((1.0 - binary_bytes / xml_bytes) * 100.0)
        rows.append(CompressionRow(label, int(xml_bytes), int(binary_bytes), reduction))
    average = _round2(sum(r.reduction_pct for r in rows) / len(rows)) if rows else 0.0
    return CompressionReport(rows=tuple(rows), average_reduction_pct=average)


def render_table(report: CompressionReport) -> str:
    """Aligned text table with an Average Reduction footer row."""
    headers = ("File Size (in bytes)", ".x3d", ".s3db", "% Reduction")
    body = [
        (r.label, f"{r.xml_bytes:,}", f"{r.binary_bytes:,}", f"{r.reduction_pct:.2f}")
        for r in report.rows
    ]
    footer = ("Average Reduction", "", "", f"{report.average_reduction_pct:.2f}")
    widths = [
        max(len(row[i]) for row in [headers, *body, footer]) for i in range(4)
    ]
    lines = []

    def fmt(row):
        cells = [row[0].ljust(widths[0])]
        cells += [row[i].rjust(widths[i]) for i in range(1, 4)]
        return "  ".join(cells).rstrip()

    lines.append(fmt(headers))
    lines.append("-" * (sum(widths) + 6))
    for row in body:
        lines.append(fmt(row))
    lines.append(fmt(footer))
    return "\n".join(lines)


def report_as_dict(report: CompressionReport) -> dict:
    return {
        "rows": [
            {
                "label": r.label,
                "xml_bytes": r.xml_bytes,
                "binary_bytes": r.binary_bytes,
                "reduction_pct": r.reduction_pct,
            }
            for r in report.rows
        ],
        "average_reduction_pct": report.average_reduction_pct,
    }
