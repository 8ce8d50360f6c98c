"""Result files: CSV tables, SVG line plots and the JSON run manifest.

Floats are written with 17 significant digits so a CSV round-trips to the
same doubles and identical runs give byte-identical files.  The manifest is
written last through a temporary file and an atomic rename; its presence
marks a completed run.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape

MANIFEST_NAME = "manifest.json"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    if v is None:
        return ""
    return str(v)


def csv_text(header, rows) -> str:
    """RFC 4180 text: CRLF line ends, fields quoted only when needed."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(h) for h in header]
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def svg_line_plot(
    series,
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = False,
    logy: bool = False,
    width: int = 640,
    height: int = 420,
) -> str:
    """Self-contained SVG 1.1 plot of one or more ``(label, xs, ys)`` series.

    Non-finite points, and non-positive ones on a log axis, are skipped.
    """
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    left, right, top, bottom = 78, 20, 40, 56

    def fx(v):
        return math.log10(v) if logx else v

    def fy(v):
        return math.log10(v) if logy else v

    def usable(x, y):
        ok = math.isfinite(x) and math.isfinite(y)
        return ok and (x > 0 or not logx) and (y > 0 or not logy)

    pts = [[(fx(x), fy(y)) for x, y in zip(xs, ys) if usable(x, y)] for _, xs, ys in series]
    allp = [p for ps in pts for p in ps]
    if allp:
        x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
        y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    def label(v, log):
        return f"1e{v:g}" if log else f"{v:g}"

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" text-anchor="middle">{escape(label(t, logx))}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end">{escape(label(t, logy))}</text>')
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(
            f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
        )
    for i, ((name, _, _), ps) in enumerate(zip(series, pts)):
        col = colors[i % len(colors)]
        if len(ps) > 1:
            path = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in ps)
            out.append(f'<polyline points="{path}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        for a, b in ps:
            out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{col}"/>')
        if name:
            ly = top + 16 + 16 * i
            out.append(f'<line x1="{left + 10}" y1="{ly - 4}" x2="{left + 30}" y2="{ly - 4}" stroke="{col}" stroke-width="2"/>')
            out.append(f'<text x="{left + 36}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


class OutputDir:
    """Collects the files of one run and writes the manifest at the end.

    Files are written immediately (each atomically) and recorded with their
    SHA-256 digest; ``finalize`` writes the manifest only after every data
    file is on disk.
    """

    def __init__(self, path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        stale = self.path / MANIFEST_NAME
        if stale.exists():
            stale.unlink()
        self.files: list[dict] = []

    def _record(self, name: str, text: str, kind: str):
        target = self.path / name
        _write_atomic(target, text)
        digest = hashlib.sha256(text.encode()).hexdigest()
        self.files = [f for f in self.files if f["name"] != name]
        self.files.append({"name": name, "kind": kind, "sha256": digest, "bytes": len(text.encode())})
        return target

    def write_csv(self, name: str, header, rows) -> Path:
        return self._record(name, csv_text(header, rows), "csv")

    def write_svg(self, name: str, svg: str) -> Path:
        return self._record(name, svg, "svg")

    def write_text(self, name: str, text: str) -> Path:
        return self._record(name, text, "text")

    def finalize(self, manifest: dict) -> Path:
        for f in self.files:
            if not (self.path / f["name"]).exists():
                raise FileNotFoundError(f"listed output {f['name']} is missing")
        body = _finite(dict(manifest))
        body["files"] = list(self.files)
        text = json.dumps(body, indent=2, sort_keys=True, default=_json_default, allow_nan=False) + "\n"
        target = self.path / MANIFEST_NAME
        _write_atomic(target, text)
        return target


def _finite(o):
    """Replace non-finite floats by strings so the manifest stays strict JSON."""
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
