"""Frozen reference measurement tables from 2018-era 5- and 16-qubit devices.

Seven datasets recorded on IBMqx4 (5 qubits) and IBMqx5 (16 qubits) during
April-May 2018, at 8192 shots per experiment cell.  Tables 1-4 are
four-input/four-output outcome frequencies of the superdense-coding circuit
under a swept channel parameter; tables 5-7 are per-cell BB84 bit error
rates (table 7 additionally carries post-selection acceptance fractions of
the dual-rail encoding).

The numbers are data, not code: they exist so that reports and tests can be
replayed against a fixed ground truth.  `fingerprint()` hashes the whole
set; any edit to a single entry changes it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

SDC_INPUT_ORDER = ("00", "10", "01", "11")
BB84_CELL_ORDER = (("+", 0), ("x", 0), ("+", 1), ("x", 1))
FIXTURE_SHOTS = 8192


@dataclass(frozen=True)
class JointFixture:
    """Outcome-frequency blocks of a four-input protocol along one swept axis."""

    table_id: str
    device: str
    axis_name: str
    axis: tuple[float, ...]
    blocks: tuple[tuple[tuple[float, ...], ...], ...]
    shots: int
    recorded: str
    notes: str

    def block(self, x: float) -> tuple[tuple[float, ...], ...]:
        try:
            return self.blocks[self.axis.index(x)]
        except ValueError:
            raise KeyError(f"{self.table_id} has no axis point {x!r}") from None


@dataclass(frozen=True)
class QberFixture:
    """Per-cell bit error rates (and optional acceptance) along one swept axis."""

    table_id: str
    device: str
    axis_name: str
    axis: tuple[float, ...]
    rates: dict[tuple[str, int], tuple[float, ...]]
    accepted: dict[tuple[str, int], tuple[float, ...]] | None
    shots: int
    recorded: str
    notes: str

    def mean_qber(self, index: int) -> float:
        return sum(self.rates[cell][index] for cell in BB84_CELL_ORDER) / len(BB84_CELL_ORDER)


_T1_BLOCKS = {
    0: ((0.940, 0.022, 0.031, 0.008), (0.117, 0.815, 0.029, 0.039),
        (0.121, 0.015, 0.840, 0.024), (0.031, 0.114, 0.115, 0.739)),
    2: ((0.684, 0.078, 0.172, 0.067), (0.154, 0.551, 0.094, 0.201),
        (0.250, 0.063, 0.617, 0.069), (0.113, 0.265, 0.136, 0.486)),
    4: ((0.595, 0.127, 0.164, 0.114), (0.190, 0.454, 0.143, 0.213),
        (0.263, 0.117, 0.511, 0.109), (0.177, 0.256, 0.173, 0.393)),
    6: ((0.510, 0.145, 0.219, 0.126), (0.240, 0.430, 0.166, 0.164),
        (0.324, 0.151, 0.396, 0.129), (0.194, 0.227, 0.193, 0.386)),
    8: ((0.406, 0.172, 0.276, 0.147), (0.253, 0.370, 0.184, 0.193),
        (0.326, 0.166, 0.366, 0.142), (0.212, 0.249, 0.205, 0.334)),
    10: ((0.374, 0.188, 0.287, 0.151), (0.257, 0.314, 0.209, 0.220),
         (0.353, 0.176, 0.313, 0.157), (0.250, 0.264, 0.218, 0.268)),
    12: ((0.357, 0.197, 0.282, 0.163), (0.264, 0.293, 0.212, 0.231),
         (0.360, 0.179, 0.297, 0.164), (0.257, 0.268, 0.225, 0.250)),
    14: ((0.357, 0.197, 0.283, 0.164), (0.264, 0.293, 0.212, 0.231),
         (0.360, 0.180, 0.297, 0.164), (0.257, 0.268, 0.225, 0.250)),
}

_T2_BLOCKS = {
    0.0: ((0.950, 0.018, 0.024, 0.008), (0.083, 0.885, 0.010, 0.022),
          (0.083, 0.007, 0.893, 0.016), (0.014, 0.070, 0.083, 0.833)),
    1.3: ((0.889, 0.029, 0.061, 0.020), (0.093, 0.824, 0.024, 0.059),
          (0.128, 0.021, 0.822, 0.028), (0.032, 0.121, 0.091, 0.756)),
    2.5: ((0.792, 0.044, 0.137, 0.028), (0.094, 0.731, 0.044, 0.131),
          (0.195, 0.037, 0.729, 0.040), (0.054, 0.209, 0.089, 0.649)),
    3.8: ((0.679, 0.056, 0.226, 0.039), (0.102, 0.619, 0.059, 0.220),
          (0.286, 0.049, 0.616, 0.050), (0.076, 0.319, 0.092, 0.514)),
    5.1: ((0.565, 0.061, 0.324, 0.050), (0.101, 0.510, 0.074, 0.315),
          (0.386, 0.053, 0.501, 0.061), (0.089, 0.407, 0.094, 0.410)),
    6.0: ((0.496, 0.065, 0.386, 0.054), (0.105, 0.447, 0.078, 0.370),
          (0.459, 0.063, 0.417, 0.061), (0.094, 0.456, 0.093, 0.357)),
}

_T3_BLOCKS = {
    0.0: ((0.945, 0.011, 0.043, 0.001), (0.144, 0.775, 0.030, 0.051),
          (0.156, 0.026, 0.765, 0.053), (0.044, 0.135, 0.128, 0.694)),
    0.9: ((0.794, 0.090, 0.074, 0.042), (0.156, 0.728, 0.054, 0.061),
          (0.163, 0.057, 0.706, 0.074), (0.079, 0.147, 0.135, 0.638)),
    1.8: ((0.699, 0.117, 0.118, 0.066), (0.170, 0.641, 0.082, 0.107),
          (0.204, 0.084, 0.617, 0.095), (0.109, 0.183, 0.151, 0.556)),
    2.8: ((0.620, 0.118, 0.179, 0.082), (0.170, 0.574, 0.098, 0.159),
          (0.269, 0.101, 0.528, 0.102), (0.131, 0.234, 0.158, 0.477)),
    3.7: ((0.531, 0.129, 0.244, 0.096), (0.181, 0.485, 0.120, 0.215),
          (0.339, 0.112, 0.438, 0.110), (0.149, 0.287, 0.156, 0.408)),
    4.6: ((0.461, 0.133, 0.307, 0.099), (0.180, 0.421, 0.128, 0.272),
          (0.399, 0.122, 0.367, 0.112), (0.169, 0.348, 0.150, 0.333)),
}

_T4_BLOCKS = {
    0.0: ((0.907, 0.039, 0.040, 0.013), (0.139, 0.801, 0.023, 0.036),
          (0.156, 0.027, 0.771, 0.046), (0.033, 0.119, 0.117, 0.731)),
    0.9: ((0.862, 0.054, 0.056, 0.028), (0.150, 0.777, 0.033, 0.040),
          (0.147, 0.055, 0.722, 0.075), (0.051, 0.112, 0.130, 0.707)),
    1.8: ((0.817, 0.069, 0.076, 0.039), (0.163, 0.737, 0.050, 0.051),
          (0.159, 0.085, 0.657, 0.099), (0.068, 0.125, 0.137, 0.670)),
    2.8: ((0.760, 0.081, 0.102, 0.057), (0.169, 0.710, 0.063, 0.058),
          (0.181, 0.108, 0.602, 0.109), (0.084, 0.129, 0.144, 0.643)),
    3.7: ((0.709, 0.092, 0.131, 0.068), (0.180, 0.674, 0.078, 0.068),
          (0.205, 0.119, 0.564, 0.111), (0.093, 0.140, 0.159, 0.608)),
    4.6: ((0.656, 0.107, 0.160, 0.076), (0.181, 0.647, 0.088, 0.084),
          (0.215, 0.125, 0.541, 0.119), (0.110, 0.133, 0.156, 0.601)),
}

_TABLE1 = JointFixture(
    table_id="table1",
    device="ibmqx5",
    axis_name="swaps",
    axis=tuple(float(x) for x in sorted(_T1_BLOCKS)),
    blocks=tuple(_T1_BLOCKS[x] for x in sorted(_T1_BLOCKS)),
    shots=FIXTURE_SHOTS,
    recorded="2018-05",
    notes=(
        "Superdense coding with the travelling qubit swapped out and back "
        "along the upper row; axis is the total SWAP count of the round "
        "trip.  The 12- and 14-SWAP blocks are nearly identical in the "
        "source data (the channel is saturated); they are preserved as "
        "recorded."
    ),
)

_TABLE2 = JointFixture(
    table_id="table2",
    device="ibmqx4",
    axis_name="time_us",
    axis=tuple(sorted(_T2_BLOCKS)),
    blocks=tuple(_T2_BLOCKS[x] for x in sorted(_T2_BLOCKS)),
    shots=FIXTURE_SHOTS,
    recorded="2018-04",
    notes="Superdense coding with the pair stored in identity trains; axis is the storage time.",
)

_TABLE3 = JointFixture(
    table_id="table3",
    device="ibmqx4",
    axis_name="time_us",
    axis=tuple(sorted(_T3_BLOCKS)),
    blocks=tuple(_T3_BLOCKS[x] for x in sorted(_T3_BLOCKS)),
    shots=FIXTURE_SHOTS,
    recorded="2018-05",
    notes=(
        "Storage sweep from a session where one qubit carried a slow "
        "coherent phase drift; no correction applied."
    ),
)

_TABLE4 = JointFixture(
    table_id="table4",
    device="ibmqx4",
    axis_name="time_us",
    axis=tuple(sorted(_T4_BLOCKS)),
    blocks=tuple(_T4_BLOCKS[x] for x in sorted(_T4_BLOCKS)),
    shots=FIXTURE_SHOTS,
    recorded="2018-05",
    notes="Same drifted session as table3 but with the compensating phase gate applied.",
)

_TABLE5 = QberFixture(
    table_id="table5",
    device="ibmqx4",
    axis_name="time_us",
    axis=(0.0, 1.2, 2.4, 3.6, 4.8, 6.0),
    rates={
        ("+", 0): (0.008, 0.011, 0.009, 0.010, 0.008, 0.005),
        ("x", 0): (0.011, 0.027, 0.052, 0.081, 0.098, 0.120),
        ("+", 1): (0.051, 0.076, 0.095, 0.119, 0.177, 0.251),
        ("x", 1): (0.050, 0.071, 0.091, 0.122, 0.176, 0.260),
    },
    accepted=None,
    shots=FIXTURE_SHOTS,
    recorded="2018-05",
    notes="BB84 bit error rate per (basis, bit) cell with the carrier held in an identity train.",
)

_TABLE6 = QberFixture(
    table_id="table6",
    device="ibmqx4",
    axis_name="swaps",
    axis=(0.0, 2.0, 4.0, 6.0),
    rates={
        ("+", 0): (0.009, 0.036, 0.062, 0.078),
        ("x", 0): (0.009, 0.043, 0.077, 0.084),
        ("+", 1): (0.061, 0.092, 0.125, 0.184),
        ("x", 1): (0.053, 0.089, 0.133, 0.175),
    },
    accepted=None,
    shots=FIXTURE_SHOTS,
    recorded="2018-05",
    notes="BB84 bit error rate with the carrier bounced across one coupler; axis is the SWAP count.",
)

_TABLE7 = QberFixture(
    table_id="table7",
    device="ibmqx4",
    axis_name="swaps",
    axis=(0.0, 2.0, 4.0, 6.0),
    rates={
        ("+", 0): (0.003, 0.028, 0.048, 0.076),
        ("x", 0): (0.024, 0.053, 0.081, 0.111),
        ("+", 1): (0.002, 0.029, 0.059, 0.094),
        ("x", 1): (0.021, 0.050, 0.089, 0.139),
    },
    accepted={
        ("+", 0): (0.90, 0.85, 0.79, 0.75),
        ("x", 0): (0.86, 0.84, 0.81, 0.78),
        ("+", 1): (0.89, 0.82, 0.77, 0.71),
        ("x", 1): (0.83, 0.76, 0.70, 0.63),
    },
    shots=FIXTURE_SHOTS,
    recorded="2018-05",
    notes=(
        "Dual-rail BB84 over the same bounced coupler: errors are computed "
        "on the post-selected shots only; `accepted` is the kept fraction "
        "per cell."
    ),
)

_ALL = {t.table_id: t for t in (_TABLE1, _TABLE2, _TABLE3, _TABLE4, _TABLE5, _TABLE6, _TABLE7)}


def fixture_ids() -> tuple[str, ...]:
    return tuple(sorted(_ALL))


def load_fixture(table_id: str) -> JointFixture | QberFixture:
    try:
        return _ALL[table_id]
    except KeyError:
        raise KeyError(f"unknown fixture {table_id!r}; available: {', '.join(fixture_ids())}") from None


def _canonical() -> str:
    doc = {}
    for tid in fixture_ids():
        fx = _ALL[tid]
        entry = {
            "device": fx.device,
            "axis_name": fx.axis_name,
            "axis": list(fx.axis),
            "shots": fx.shots,
            "recorded": fx.recorded,
        }
        if isinstance(fx, JointFixture):
            entry["blocks"] = [[list(r) for r in b] for b in fx.blocks]
        else:
            entry["rates"] = {f"{b}{v}": list(fx.rates[(b, v)]) for b, v in BB84_CELL_ORDER}
            if fx.accepted is not None:
                entry["accepted"] = {f"{b}{v}": list(fx.accepted[(b, v)]) for b, v in BB84_CELL_ORDER}
        doc[tid] = entry
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fingerprint() -> str:
    """SHA-256 over a canonical serialisation of all seven tables."""
    return hashlib.sha256(_canonical().encode()).hexdigest()
