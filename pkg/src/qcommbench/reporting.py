"""Report rows, delimited output, counts-document ingestion, fixture replay.

Every benchmark result flattens to the same row shape::

    x, metric, value, shots, accepted_fraction, seed, backend

which serialises to CSV deterministically (fixed float formats, row order as
given).  Counts documents are the JSON interchange format for raw
measurement outcomes, one counts table per experiment cell.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .fixtures import BB84_CELL_ORDER, SDC_INPUT_ORDER, JointFixture, QberFixture, load_fixture
from .metrics import CountsTable, JointDistribution, mutual_information, secret_key_length

CSV_COLUMNS = ("x", "metric", "value", "shots", "accepted_fraction", "seed", "backend")

F_EC_DEFAULT = 1.15


@dataclass(frozen=True)
class ReportRow:
    """One scored point of a sweep."""

    x: float
    metric: str
    value: float
    shots: int
    accepted_fraction: float = 1.0
    seed: int = 0
    backend: str = "fixture"

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"metric {self.metric!r} at x={self.x} is not finite")
        if not 0.0 <= self.accepted_fraction <= 1.0:
            raise ValueError(f"accepted fraction {self.accepted_fraction} outside [0, 1]")


def rows_to_csv_text(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                f"{row.x:.6f}",
                row.metric,
                f"{row.value:.9f}",
                row.shots,
                f"{row.accepted_fraction:.6f}",
                row.seed,
                row.backend,
            ]
        )
    return buf.getvalue()


def emit_csv(rows: list[ReportRow], dest: str | Path) -> Path:
    """Write rows as CSV; returns the path written."""
    path = Path(dest)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_csv_text(rows))
    return path


@dataclass(frozen=True)
class CountsDocument:
    """Parsed counts interchange document: experiment id plus per-cell tables."""

    experiment: str
    shots: int
    cells: dict[str, CountsTable]
    protocol: str = ""


def parse_counts(source: str | Path | dict) -> CountsDocument:
    """Parse and validate a counts JSON document (path or already-loaded dict).

    Schema::

        {"experiment": str, "protocol": str?, "shots": int,
         "cells": {label: {"counts": {bitstring: int}, "shots": int?}}}

    Cell labels are free-form (protocol scoring assigns meaning); counts must
    be non-negative integers over equal-length bitstrings summing to at most
    the cell's shots.
    """
    if isinstance(source, dict):
        doc = source
    else:
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(f"counts document {path} does not exist")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("counts document must be a JSON object")
    unknown = set(doc) - {"experiment", "protocol", "shots", "cells"}
    if unknown:
        raise ValueError(f"unknown counts document keys: {sorted(unknown)}")
    if "shots" not in doc or not isinstance(doc["shots"], int) or doc["shots"] <= 0:
        raise ValueError("counts document needs a positive integer 'shots'")
    cells_doc = doc.get("cells")
    if not isinstance(cells_doc, dict) or not cells_doc:
        raise ValueError("counts document needs a non-empty 'cells' object")
    cells: dict[str, CountsTable] = {}
    for label, cell in cells_doc.items():
        if not isinstance(cell, dict) or "counts" not in cell:
            raise ValueError(f"cells.{label}: expected an object with a 'counts' map")
        extra = set(cell) - {"counts", "shots"}
        if extra:
            raise ValueError(f"cells.{label}: unknown keys {sorted(extra)}")
        shots = cell.get("shots", doc["shots"])
        raw = cell["counts"]
        if not isinstance(raw, dict) or not raw:
            raise ValueError(f"cells.{label}.counts: expected a non-empty map")
        for key, value in raw.items():
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"cells.{label}.counts.{key}: counts must be non-negative integers")
        try:
            cells[label] = CountsTable(counts=dict(raw), shots=int(shots))
        except ValueError as exc:
            raise ValueError(f"cells.{label}: {exc}") from exc
    return CountsDocument(
        experiment=str(doc.get("experiment", "")),
        shots=int(doc["shots"]),
        cells=cells,
        protocol=str(doc.get("protocol", "")),
    )


def write_counts(document: CountsDocument, dest: str | Path) -> Path:
    """Serialise a counts document to JSON (sorted keys, stable bytes)."""
    path = Path(dest)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "experiment": document.experiment,
        "protocol": document.protocol,
        "shots": document.shots,
        "cells": {
            label: {"counts": dict(sorted(table.counts.items())), "shots": table.shots}
            for label, table in sorted(document.cells.items())
        },
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _cell_metric_name(basis: str, bit: int) -> str:
    return f"qber_{'plus' if basis == '+' else 'times'}_{bit}"


def _joint_replay_rows(fx: JointFixture) -> list[ReportRow]:
    rows: list[ReportRow] = []
    for x, block in zip(fx.axis, fx.blocks):
        joint = JointDistribution.from_conditional(
            {a: dict(zip(SDC_INPUT_ORDER, r)) for a, r in zip(SDC_INPUT_ORDER, block)}
        )
        rows.append(
            ReportRow(
                x=float(x),
                metric="mutual_information",
                value=mutual_information(joint),
                shots=fx.shots,
                backend="fixture",
            )
        )
    return rows


def _qber_replay_rows(fx: QberFixture, f_ec: float) -> list[ReportRow]:
    rows: list[ReportRow] = []
    for i, x in enumerate(fx.axis):
        fractions = []
        for basis, bit in BB84_CELL_ORDER:
            frac = fx.accepted[(basis, bit)][i] if fx.accepted is not None else 1.0
            fractions.append(frac)
            rows.append(
                ReportRow(
                    x=float(x),
                    metric=_cell_metric_name(basis, bit),
                    value=fx.rates[(basis, bit)][i],
                    shots=fx.shots,
                    accepted_fraction=frac,
                    backend="fixture",
                )
            )
        mean_fraction = sum(fractions) / len(fractions)
        q_mean = fx.mean_qber(i)
        n_sifted = fx.shots * sum(fractions)
        l_sec = secret_key_length(n_sifted, q_mean, f_ec)
        common = dict(x=float(x), shots=fx.shots, accepted_fraction=mean_fraction, backend="fixture")
        rows.append(ReportRow(metric="qber_mean", value=q_mean, **common))
        rows.append(ReportRow(metric="secret_key_bits", value=l_sec, **common))
        rows.append(
            ReportRow(metric="secret_key_per_bit", value=l_sec / n_sifted, **common)
        )
    return rows


def replay_fixture(table_id: str, f_ec: float = F_EC_DEFAULT) -> list[ReportRow]:
    """Score an embedded reference table into report rows.

    Joint tables yield one mutual-information row per axis point; QBER
    tables yield per-cell rates plus the aggregate QBER and secret-key
    numbers (sifted length = shots summed over the four cells, scaled by the
    per-cell acceptance where recorded).
    """
    fx = load_fixture(table_id)
    if isinstance(fx, JointFixture):
        return _joint_replay_rows(fx)
    return _qber_replay_rows(fx, f_ec)
