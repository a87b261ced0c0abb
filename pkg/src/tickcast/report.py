"""Writing run outputs: report.csv, trace.csv, summary.json and an optional SVG chart."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

from .engine import EventRecord, RunResult

REPORT_COLUMNS = ("fold", "method", "mse_train", "mse_test", "rmse_train", "rmse_test", "rrmse_test")
TRACE_COLUMNS = tuple(f.name for f in dataclasses.fields(EventRecord))
_INT = {"t", "fold", "k_mdi", "k_gd"}
_BOOL = {"failed_mdi", "failed_gd"}


def fmt_metric(v: float) -> str:
    return f"{v:.6g}"


def _metric_dict(m) -> dict:
    return {
        "n_events": m.n_events,
        **{c: float(fmt_metric(getattr(m, c))) for c in REPORT_COLUMNS[2:]},
    }


def _trace_cell(name, v) -> str:
    if name in _BOOL:
        return "1" if v else "0"
    if name in _INT or name == "active_method":
        return str(v)
    return repr(float(v))


def emit(result: RunResult, out_dir, config: dict | None = None, extra: dict | None = None) -> dict:
    """Write the three output files; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": out / "report.csv", "trace": out / "trace.csv", "summary": out / "summary.json"}

    with paths["report"].open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for m in result.report.rows:
            w.writerow([m.fold, m.method, *(fmt_metric(getattr(m, c)) for c in REPORT_COLUMNS[2:])])

    with paths["trace"].open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in result.trace:
            w.writerow([_trace_cell(c, getattr(r, c)) for c in TRACE_COLUMNS])

    rep = result.report
    summary = {
        "config": config or {},
        "n_predicted": rep.n_predicted,
        "overall": {m: _metric_dict(v) for m, v in rep.overall.items()},
        "regime": {
            "changes": rep.regime_changes,
            "mean_events_between_changes": float(fmt_metric(rep.mean_events_between_changes)),
        },
        "k_histogram": {m: {str(k): c for k, c in h.items()} for m, h in rep.k_histogram.items()},
        "n_failed": rep.n_failed,
        **(extra or {}),
    }
    paths["summary"].write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return paths


def read_trace(path) -> list[EventRecord]:
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        for row in reader:
            kw = {}
            for c in TRACE_COLUMNS:
                v = row[c]
                if c in _BOOL:
                    kw[c] = v == "1"
                elif c in _INT:
                    kw[c] = int(v)
                elif c == "active_method":
                    kw[c] = v
                else:
                    kw[c] = float(v)
            out.append(EventRecord(**kw))
    return out


def plot_svg(trace, path, width: int = 900, height: int = 320) -> None:
    """Line chart of actual mid-price against the active pipeline's forecast."""
    if not trace:
        raise ValueError("empty trace")
    xs = [r.t for r in trace]
    actual = [r.actual for r in trace]
    chosen = [r.prediction(r.active_method) for r in trace]
    lo = min(min(actual), min(chosen))
    hi = max(max(actual), max(chosen))
    span = hi - lo or 1.0
    x0, x1 = xs[0], xs[-1] if xs[-1] > xs[0] else xs[0] + 1
    pad = 30

    def pts(vals):
        return " ".join(
            f"{pad + (x - x0) / (x1 - x0) * (width - 2 * pad):.2f},"
            f"{height - pad - (v - lo) / span * (height - 2 * pad):.2f}"
            for x, v in zip(xs, vals) if math.isfinite(v))

    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<polyline fill="none" stroke="black" stroke-width="1" points="{pts(actual)}"/>\n'
        f'<polyline fill="none" stroke="tomato" stroke-width="1" points="{pts(chosen)}"/>\n'
        f'<text x="{pad}" y="18" font-size="12">actual (black) vs active forecast (red); '
        f'range {lo:.6g} .. {hi:.6g}</text>\n'
        "</svg>\n"
    )
    Path(path).write_text(svg)
