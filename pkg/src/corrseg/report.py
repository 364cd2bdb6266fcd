"""Serialization and text rendering of detection reports.

JSON output keeps full double precision and contains nothing run-specific
(no timestamps), so re-running the same detection writes byte-identical
files.  Undefined correlations serialize as null.
"""

from __future__ import annotations

import json

from .segmentation import AlphaLevel, ChangePointReport, IterationRecord


def report_to_dict(report: ChangePointReport) -> dict:
    return {
        "T": report.T,
        "changepoints": list(report.changepoints),
        "fractions": list(report.fractions),
        "changepoint_labels": list(report.changepoint_labels)
        if report.changepoint_labels is not None
        else None,
        "segment_correlations": [
            None if c is None else float(c) for c in report.segment_correlations
        ],
        "iterations": [
            {
                "step": it.step,
                "start": it.start,
                "end": it.end,
                "statistic": it.statistic,
                "critical_value": it.critical_value,
                "significant": it.significant,
                "candidate_index": it.candidate_index,
                "candidate_fraction": it.candidate_fraction,
                "candidate_label": it.candidate_label,
            }
            for it in report.iterations
        ],
        "alpha_schedule_used": [
            {"k": lvl.k, "alpha": lvl.alpha, "critical_value": lvl.critical_value}
            for lvl in report.alpha_schedule_used
        ],
    }


def report_from_dict(data: dict) -> ChangePointReport:
    return ChangePointReport(
        T=data["T"],
        changepoints=tuple(data["changepoints"]),
        fractions=tuple(data["fractions"]),
        changepoint_labels=tuple(data["changepoint_labels"])
        if data.get("changepoint_labels") is not None
        else None,
        segment_correlations=tuple(data["segment_correlations"]),
        iterations=tuple(IterationRecord(**it) for it in data["iterations"]),
        alpha_schedule_used=tuple(AlphaLevel(**lvl) for lvl in data["alpha_schedule_used"]),
    )


def report_to_json(report: ChangePointReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> ChangePointReport:
    return report_from_dict(json.loads(text))


def iterations_to_csv(report: ChangePointReport) -> str:
    lines = ["step,start,end,statistic,critical_value,significant,candidate_index,candidate_fraction,candidate_label"]
    for it in report.iterations:
        lines.append(
            f"{it.step},{it.start},{it.end},{it.statistic!r},{it.critical_value!r},"
            f"{int(it.significant)},{it.candidate_index},{it.candidate_fraction!r},"
            f"{it.candidate_label or ''}"
        )
    return "\n".join(lines) + "\n"


def segments_to_csv(report: ChangePointReport) -> str:
    lines = ["start,end,correlation"]
    edges = [0, *report.changepoints, report.T]
    for (left, right), corr in zip(zip(edges[:-1], edges[1:]), report.segment_correlations):
        val = "" if corr is None else repr(float(corr))
        lines.append(f"{left + 1},{right},{val}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render_text(report: ChangePointReport) -> str:
    """Human-readable iteration table; (*) marks significant statistics."""
    out = []
    out.append(f"Correlation change-point detection  (T = {report.T})")
    out.append("")

    headers = ("interval", "statistic", "critical", "change point", "fraction", "date")
    step_names = {"detect": None, "refine": "Refinement"}
    rows_by_phase: list[tuple[str, list[tuple[str, ...]]]] = []
    phase = None
    detect_seen = 0
    for it in report.iterations:
        if it.step == "detect":
            name = "Full sample" if detect_seen == 0 else "Segment search"
            detect_seen += 1
        else:
            name = step_names["refine"]
        if not rows_by_phase or rows_by_phase[-1][0] != name:
            rows_by_phase.append((name, []))
        star = " (*)" if it.significant else ""
        rows_by_phase[-1][1].append((
            f"[{it.start}, {it.end}]",
            _fmt(it.statistic) + star,
            _fmt(it.critical_value),
            str(it.candidate_index),
            _fmt(it.candidate_fraction),
            it.candidate_label or "",
        ))

    widths = [len(h) for h in headers]
    for _, rows in rows_by_phase:
        for row in rows:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]

    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    for name, rows in rows_by_phase:
        out.append(name)
        out.append(line(headers))
        for row in rows:
            out.append(line(row))
        out.append("")

    if report.changepoints:
        pts = ", ".join(
            f"{c} ({_fmt(f)})" for c, f in zip(report.changepoints, report.fractions)
        )
        out.append(f"Detected change points: {pts}")
    else:
        out.append("No change points detected.")
    edges = [0, *report.changepoints, report.T]
    seg_bits = []
    for (left, right), corr in zip(zip(edges[:-1], edges[1:]), report.segment_correlations):
        cs = "undefined" if corr is None else _fmt(corr)
        seg_bits.append(f"[{left + 1}, {right}] {cs}")
    out.append("Segment correlations: " + " | ".join(seg_bits))
    out.append("")
    return "\n".join(out)
