"""Report files: JSON, an aligned ASCII table and, for similarity sweeps, CSV."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .serialize import format_float, dumps, to_jsonable

__all__ = ["SWEEP_COLUMNS", "render_table", "render_csv", "emit_report"]

SWEEP_COLUMNS = ("N", "beta", "betaPrime", "normX", "normXinv", "residual")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return format(v + 0.0, ".6g")
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v):
        re, im = v
        return f"{re:.6g}{im:+.6g}j"
    return str(v)


def _columns(rows) -> list:
    cols: list = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def render_table(rows, columns=None) -> str:
    """Left-aligned text, numeric columns right-aligned; ASCII only."""
    rows = [to_jsonable(r) for r in rows]
    if not rows:
        return "(no results)\n"
    cols = list(columns) if columns else _columns(rows)
    cells = [[_cell(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    numeric = [all(isinstance(r.get(c), (int, float)) and not isinstance(r.get(c), bool) for r in rows) for c in cols]

    def line(values):
        parts = [v.rjust(w) if num else v.ljust(w) for v, w, num in zip(values, widths, numeric)]
        return "  ".join(parts).rstrip()

    out = [line(cols), "  ".join("-" * w for w in widths)]
    out.extend(line(row) for row in cells)
    text = "\n".join(out) + "\n"
    return text.encode("ascii", "replace").decode("ascii")


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r[c] if isinstance(r[c], int) else format_float(float(r[c])) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def emit_report(results, prefix, sweep=None, meta=None) -> list:
    """Write ``prefix.json`` and ``prefix.txt`` (plus ``prefix.csv`` when
    `sweep` rows are given) and return the paths written.

    `results` is a list of flat dicts; ``sweep`` rows need the keys in
    :data:`SWEEP_COLUMNS`.  Output depends only on the arguments.
    """
    prefix = Path(prefix)
    results = list(results)
    doc = {"meta": meta or {}, "count": len(results), "results": results}
    if sweep is not None:
        doc["sweep"] = list(sweep)
    files = {prefix.with_suffix(".json"): dumps(doc) + "\n", prefix.with_suffix(".txt"): render_table(results)}
    if sweep is not None:
        files[prefix.with_suffix(".csv")] = render_csv(sweep)
    written = []
    for path, text in files.items():
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report file {path}: {exc.strerror}") from exc
        written.append(path)
    return written
