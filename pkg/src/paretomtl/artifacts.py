"""Writers and readers for run artifacts (CSV, JSON, SVG)."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .solvers import Trajectory

INCOMPLETE_MARKER = "RUN_INCOMPLETE"


def fmt(x) -> str:
    """17 significant digits: float -> text -> float is exact."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    path.write_text(buf.getvalue())


def front_rows(trajs: list[tuple[int, Trajectory]]):
    for run_id, t in trajs:
        yield [t.algorithm, run_id, t.index if t.algorithm == "pareto-mtl" else t.seed,
               *t.losses, t.status]


def write_front(path: Path, trajs, m: int) -> None:
    header = ["algorithm", "run_id", "k_or_seed", *[f"loss_{i + 1}" for i in range(m)], "terminal_status"]
    _write_csv(path, header, front_rows(trajs))


def write_trajectory(path: Path, trajs, m: int) -> None:
    header = ["algorithm", "run_id", "k_or_seed", "phase", "iteration",
              *[f"loss_{i + 1}" for i in range(m)], "n_active", "d_norm", "feasible", "max_constraint"]

    def rows():
        for run_id, t in trajs:
            key = t.index if t.algorithm == "pareto-mtl" else t.seed
            for r in t.records:
                gmax = None if r.constraints is None else float(np.max(r.constraints))
                yield [t.algorithm, run_id, key, r.phase, r.iteration, *r.losses,
                       r.n_active, r.d_norm, r.feasible, gmax]

    _write_csv(path, header, rows())


def write_weights(path: Path, trajs, m: int) -> None:
    header = ["algorithm", "run_id", "k_or_seed", "iteration", *[f"weight_{i + 1}" for i in range(m)]]

    def rows():
        for run_id, t in trajs:
            key = t.index if t.algorithm == "pareto-mtl" else t.seed
            for r in t.main_records:
                yield [t.algorithm, run_id, key, r.iteration, *r.weights]

    _write_csv(path, header, rows())


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def read_front(path) -> tuple[list[dict], int]:
    """Rows of a front CSV as dicts with a ``losses`` array, plus ``m``.

    An empty file (or header only) returns ``([], m)`` with ``m = 0`` when the
    header is missing too.
    """
    text = Path(path).read_text()
    if not text.strip():
        return [], 0
    reader = csv.DictReader(io.StringIO(text))
    loss_cols = [c for c in reader.fieldnames or [] if c.startswith("loss_")]
    rows = []
    for row in reader:
        rows.append({
            "algorithm": row["algorithm"],
            "run_id": int(row["run_id"]),
            "k_or_seed": int(row["k_or_seed"]),
            "losses": np.array([float(row[c]) for c in loss_cols]),
            "terminal_status": row.get("terminal_status", ""),
        })
    return rows, len(loss_cols)


_PALETTE = {"pareto-mtl": "#d62728", "mgda": "#1f77b4", "linear": "#2ca02c"}
_EXTRA = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def front_svg(series: dict[str, np.ndarray], prefs=None, width: int = 480, height: int = 480,
              title: str = "final losses") -> str:
    """Scatter plot of 2-D loss vectors, one colour per series.

    ``prefs`` (a ``(K, 2)`` array) adds the preference rays from the origin.
    """
    pts = [np.asarray(v, dtype=float).reshape(-1, 2) for v in series.values() if len(v)]
    allp = np.vstack(pts) if pts else np.zeros((0, 2))
    hi = float(np.max(allp)) * 1.05 if allp.size else 1.0
    hi = hi if hi > 0 else 1.0
    pad = 50
    W, H = width - 2 * pad, height - 2 * pad

    def X(v):
        return pad + W * v / hi

    def Y(v):
        return height - pad - H * v / hi

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">loss 1</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 14 {height / 2:.1f})">loss 2</text>',
    ]
    for i in range(5):
        v = hi * i / 4
        out.append(f'<text x="{X(v):.1f}" y="{height - pad + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">{v:.2g}</text>')
        out.append(f'<text x="{pad - 6}" y="{Y(v) + 3:.1f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{v:.2g}</text>')
    if prefs is not None:
        for u in np.asarray(prefs, dtype=float):
            out.append(f'<line x1="{X(0):.1f}" y1="{Y(0):.1f}" x2="{X(u[0] * hi):.1f}" '
                       f'y2="{Y(u[1] * hi):.1f}" stroke="#cccccc" stroke-dasharray="4 3"/>')
    extra = iter(_EXTRA)
    for j, (name, v) in enumerate(series.items()):
        color = _PALETTE.get(name) or next(extra, "#000000")
        for x, y in np.asarray(v, dtype=float).reshape(-1, 2):
            out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" r="3" fill="{color}" '
                       f'fill-opacity="0.8"><title>{name}: ({x:.4g}, {y:.4g})</title></circle>')
        ly = pad + 14 * j
        out.append(f'<circle cx="{width - pad - 90}" cy="{ly}" r="4" fill="{color}"/>')
        out.append(f'<text x="{width - pad - 80}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="11">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
