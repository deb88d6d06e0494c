"""Report assembly and deterministic CSV/JSON emission.

CSV files start with a provenance header block of '# key: value' comment
lines (config hash, grid, eos, tolerances), then a standard header row.
Floats are written with repr (shortest round-trip form), so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import grid as gr

ROUNDOFF_FLOOR = 1e-12


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


@dataclass
class EquationResidual:
    equation: str
    n: int
    dt: float
    sup_norm: float
    l2_norm: float
    order_vs_prev: float | None = None
    exact: bool = False
    passed: bool | None = None


@dataclass
class ResidualReport:
    """Per-equation residual norms across resolutions, with observed orders."""

    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_resolution(self, n: int, dt: float, residuals: dict):
        for equation, res in residuals.items():
            self.rows.append(EquationResidual(
                equation=equation, n=n, dt=dt,
                sup_norm=gr.sup_norm(res), l2_norm=gr.l2_norm(res)))

    def finalize(self, order_threshold: float | None = None):
        """Fill observed orders (consecutive resolutions per equation) and
        verdicts.  Orders are only reported once >= 3 resolutions are present;
        identically-small residuals are marked exact and pass regardless."""
        by_eq = {}
        for row in self.rows:
            by_eq.setdefault(row.equation, []).append(row)
        for rows in by_eq.values():
            rows.sort(key=lambda r: r.n)
            report_orders = len(rows) >= 3
            for prev, cur in zip(rows, rows[1:]):
                cur.exact = (cur.sup_norm <= ROUNDOFF_FLOOR
                             and prev.sup_norm <= ROUNDOFF_FLOOR)
                if report_orders and not cur.exact and cur.sup_norm > 0.0:
                    cur.order_vs_prev = math.log2(prev.sup_norm / cur.sup_norm)
            rows[0].exact = rows[0].sup_norm <= ROUNDOFF_FLOOR
            for cur in rows:
                if order_threshold is None:
                    cur.passed = bool(np.isfinite(cur.sup_norm))
                elif cur is rows[0] or cur.exact:
                    cur.passed = True
                elif cur.order_vs_prev is not None:
                    cur.passed = cur.order_vs_prev >= order_threshold
                else:
                    cur.passed = bool(np.isfinite(cur.sup_norm))
        return self

    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows if row.passed is not None)

    def final_orders(self) -> dict:
        """Observed order at the finest resolution pair, per equation
        ('exact' when the residual sits at the roundoff floor)."""
        by_eq = {}
        for row in sorted(self.rows, key=lambda r: r.n):
            by_eq[row.equation] = "exact" if row.exact else row.order_vs_prev
        return by_eq


RESIDUAL_COLUMNS = ("equation", "n", "dt", "sup_norm", "l2_norm",
                    "order_vs_prev", "pass")


def header_lines(metadata: dict) -> list[str]:
    lines = [f"# config_hash: {metadata.get('config_hash', '')}"]
    for key in sorted(metadata):
        if key != "config_hash":
            lines.append(f"# {key}: {_fmt(metadata[key])}")
    return lines


def write_residual_csv(path, report: ResidualReport):
    lines = header_lines(report.metadata)
    lines.append(",".join(RESIDUAL_COLUMNS))
    for row in report.rows:
        order = "exact" if row.exact else _fmt(row.order_vs_prev)
        lines.append(",".join([
            row.equation, str(row.n), _fmt(row.dt), _fmt(row.sup_norm),
            _fmt(row.l2_norm), order, _fmt(row.passed),
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_residual_json(path, report: ResidualReport):
    payload = {
        "metadata": report.metadata,
        "rows": [{
            "equation": r.equation, "n": r.n, "dt": r.dt,
            "sup_norm": r.sup_norm, "l2_norm": r.l2_norm,
            "order_vs_prev": ("exact" if r.exact else r.order_vs_prev),
            "pass": r.passed,
        } for r in report.rows],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_table_csv(path, columns, rows, metadata: dict | None = None):
    lines = header_lines(metadata) if metadata else []
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_scalar_field_csv(path, values: np.ndarray):
    lines = ["i,j,k,value"]
    n = values.shape[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lines.append(f"{i},{j},{k},{_fmt(float(values[i, j, k]))}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_vector_field_csv(path, values: np.ndarray):
    lines = ["i,j,k,v1,v2,v3"]
    n = values.shape[1]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                comps = ",".join(_fmt(float(values[a, i, j, k])) for a in range(3))
                lines.append(f"{i},{j},{k},{comps}")
    Path(path).write_text("\n".join(lines) + "\n")


def field_dump_path(outdir, run: str, name: str, slice_index: int) -> Path:
    directory = Path(outdir) / run
    directory.mkdir(parents=True, exist_ok=True)
    return directory / f"{name}_{slice_index:04d}.csv"
