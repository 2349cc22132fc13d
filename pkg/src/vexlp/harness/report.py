"""Report bundles: one CSV row per record plus a JSON summary.

CSV layout (schema version 1): the experiment's config columns, then the
fixed metric columns ``lhs, rhs_m_term, rhs_decay_term, slack, ratio,
envelope, fitted_c``.  Cells that do not apply are empty.  Floats are written
with ``repr`` so a bundle reloads bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

__all__ = [
    "SCHEMA_VERSION",
    "METRIC_COLUMNS",
    "ReportBundle",
    "summarize",
    "write_bundle",
    "load_bundle",
    "BundleMismatchError",
]

SCHEMA_VERSION = 1
METRIC_COLUMNS = ("lhs", "rhs_m_term", "rhs_decay_term", "slack", "ratio", "envelope", "fitted_c")
CSV_NAME = "results.csv"
SUMMARY_NAME = "summary.json"


class BundleMismatchError(ValueError):
    """The stored summary does not match the one recomputed from rows."""


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_metric(text: str) -> float | None:
    return None if text == "" else float(text)


@dataclass
class ReportBundle:
    experiment: str
    config_columns: tuple[str, ...]
    rows: list[dict]
    summary: dict
    provenance: dict

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(self.config_columns) + METRIC_COLUMNS

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row.get(c)) for c in self.columns])
        return buf.getvalue()


def summarize(config_columns: Sequence[str], rows: Sequence[dict], config_hash: str) -> dict:
    """Summary recomputable from rows.

    ``fitted_constants`` maps the value of the first config column to the max
    ``fitted_c`` among its rows.
    """
    slacks = [r["slack"] for r in rows if r.get("slack") is not None]
    ratios = [r["ratio"] for r in rows if r.get("ratio") is not None]
    fitted: dict[str, float] = {}
    key = config_columns[0] if config_columns else None
    for r in rows:
        c = r.get("fitted_c")
        if c is None or key is None:
            continue
        group = _fmt(r.get(key))
        fitted[group] = max(fitted.get(group, -math.inf), c)
    return {
        "rows": len(rows),
        "min_slack": min(slacks) if slacks else None,
        "max_ratio": max(ratios) if ratios else None,
        "fitted_constants": dict(sorted(fitted.items())),
        "config_hash": config_hash,
    }


def write_bundle(bundle: ReportBundle, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / CSV_NAME).write_text(bundle.to_csv(), encoding="utf-8")
    payload = dict(bundle.summary)
    payload["provenance"] = bundle.provenance
    payload["experiment"] = bundle.experiment
    payload["schema_version"] = SCHEMA_VERSION
    (out / SUMMARY_NAME).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def load_bundle(out_dir: str | Path) -> ReportBundle:
    """Read a bundle back and check its summary against the rows."""
    out = Path(out_dir)
    payload = json.loads((out / SUMMARY_NAME).read_text(encoding="utf-8"))
    with open(out / CSV_NAME, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        records = list(reader)
    n_cfg = len(header) - len(METRIC_COLUMNS)
    if tuple(header[n_cfg:]) != METRIC_COLUMNS:
        raise BundleMismatchError(f"unexpected metric columns {header[n_cfg:]}")
    config_columns = tuple(header[:n_cfg])
    rows = []
    for rec in records:
        row: dict[str, Any] = dict(zip(config_columns, rec[:n_cfg]))
        row.update({c: _parse_metric(v) for c, v in zip(METRIC_COLUMNS, rec[n_cfg:])})
        rows.append(row)
    summary = {k: payload[k] for k in ("rows", "min_slack", "max_ratio", "fitted_constants", "config_hash")}
    recomputed = summarize(config_columns, rows, payload["config_hash"])
    if recomputed != summary:
        raise BundleMismatchError(f"summary {summary} does not match rows ({recomputed})")
    return ReportBundle(payload["experiment"], config_columns, rows, summary, payload["provenance"])
