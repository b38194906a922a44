"""Benchmark sweeps: run a protocol across a grid of SWAP counts or delays.

A sweep fixes an :class:`~qcommbench.protocols.ExperimentPlan` and varies one
axis.  Each (point, cell) pair gets its own derived seed — spawned from the
plan's master seed via ``SeedSequence(master, spawn_key=(point, cell))`` — so
any single cell can be re-run in isolation and reproduced exactly.

The x column of emitted rows is the *realized* value: the actual SWAP count
of the constructed route, or the delay actually representable as whole
identity gates (delays snap to the gate grid).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .backends import exact_counts_distribution, run_trajectories
from .circuits import duration_of
from .metrics import JointDistribution, mutual_information, qber, secret_key_length
from .noise import NoiseModel
from .protocols import (
    BB84_SYMBOLS,
    SDC_INPUTS,
    ExperimentPlan,
    SdcInput,
    build_bb84_dualrail,
    build_bb84_single,
    build_sdc_circuit,
    postselect_weights,
)
from .reporting import F_EC_DEFAULT, ReportRow
from .topology import DeviceGraph, plan_route

BACKENDS = ("trajectory", "density")

SWEEP_AXES = ("swaps", "delay_us")


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis: 'swaps' (even counts) or 'delay_us' (storage times)."""

    axis: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        for v in self.values:
            if v < 0:
                raise ValueError(f"sweep value {v} is negative")
            if self.axis == "swaps" and (v != int(v) or int(v) % 2):
                raise ValueError(f"SWAP counts must be even integers, got {v}")


def derive_cell_seed(master: int, point: int, cell: int) -> int:
    """The per-cell trajectory seed: stable, collision-resistant, re-derivable."""
    ss = np.random.SeedSequence(master, spawn_key=(point, cell))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _noise_knobs(noise: NoiseModel | None):
    durations = noise.gate_durations_ns if noise is not None else None
    t_osc = noise.drift.t_osc_us if noise is not None and noise.drift is not None else 10.0
    drift_qubit = noise.drift.target if noise is not None and noise.drift is not None else None
    return durations, t_osc, drift_qubit


def _run_cell(circuit, noise, shots, seed, backend):
    """One cell -> (outcome weights, recorded total).

    Trajectory weights are integer counts; density weights are exact
    probabilities (recorded total 0 marks an exact result).
    """
    if backend == "trajectory":
        counts = run_trajectories(circuit, noise, shots=shots, seed=seed)
        return {k: float(v) for k, v in counts.counts.items()}, counts.total()
    if backend == "density":
        dist = exact_counts_distribution(circuit, noise)
        return dict(dist.probs), 0
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")


def _delay_points(values, durations) -> list[tuple[int, float]]:
    tau = duration_of("I", durations)
    points = []
    for v in values:
        n = int(round(v * 1000.0 / tau))
        points.append((n, n * tau / 1000.0))
    return points


def run_sdc_sweep(
    plan: ExperimentPlan,
    sweep: SweepSpec,
    graph: DeviceGraph,
    noise: NoiseModel | None = None,
    backend: str = "trajectory",
    base_path: tuple[str, ...] | None = None,
    return_mode: str = "same",
) -> list[ReportRow]:
    """Mutual information of superdense coding along the swept axis.

    For the 'swaps' axis, each point x routes the travelling qubit x/2 hops
    along `base_path` and back (per `return_mode`); for 'delay_us' the pair
    is stored in identity trains instead.  Every point runs all four inputs
    and scores I(A;B) from the pooled joint distribution.
    """
    if plan.protocol != "sdc":
        raise ValueError("run_sdc_sweep needs an sdc plan")
    durations, t_osc, drift_qubit = _noise_knobs(noise)
    stored, payload = plan.qubits
    rows: list[ReportRow] = []
    for point, x in enumerate(sweep.values):
        if sweep.axis == "swaps":
            route = plan_route(graph, payload, int(x) // 2, stored, return_mode, base_path)
            cell_plan = replace(plan, route=route, delay_gates=0)
            realized = float(route.num_swaps)
        else:
            n, realized = _delay_points([x], durations)[0]
            cell_plan = replace(plan, delay_gates=n)
        weights: dict[str, dict[str, float]] = {}
        total = 0
        for cell, label in enumerate(SDC_INPUTS):
            circuit = build_sdc_circuit(
                cell_plan, SdcInput.from_label(label), graph, durations, t_osc, drift_qubit
            )
            weights[label], recorded = _run_cell(
                circuit, noise, plan.shots, derive_cell_seed(plan.seed, point, cell), backend
            )
            total += recorded
        joint = JointDistribution.from_conditional(weights)
        rows.append(
            ReportRow(
                x=realized,
                metric="mutual_information",
                value=mutual_information(joint),
                shots=plan.shots if backend == "trajectory" else 0,
                accepted_fraction=1.0,
                seed=plan.seed,
                backend=backend,
            )
        )
    return rows


def run_bb84_sweep(
    plan: ExperimentPlan,
    sweep: SweepSpec,
    graph: DeviceGraph,
    noise: NoiseModel | None = None,
    backend: str = "trajectory",
    f_ec: float = F_EC_DEFAULT,
) -> list[ReportRow]:
    """QBER and secret-key metrics of BB84 along the swept axis.

    Runs the four (basis, bit) cells per point.  The dual-rail variant
    post-selects each cell and reports its acceptance in the per-cell rows;
    aggregate rows (qber_mean, secret_key_bits, secret_key_per_bit) carry the
    mean acceptance.  The sifted-key length is the recorded (post-selection)
    total for trajectory runs, or the plan's notional shots scaled by the
    acceptance for exact runs.
    """
    if plan.protocol != "bb84":
        raise ValueError("run_bb84_sweep needs a bb84 plan")
    durations, t_osc, drift_qubit = _noise_knobs(noise)
    dual = plan.mitigation.dual_rail
    build = build_bb84_dualrail if dual else build_bb84_single
    rows: list[ReportRow] = []
    for point, x in enumerate(sweep.values):
        if sweep.axis == "swaps":
            cell_plan = replace(plan, swap_count=int(x), delay_gates=0)
            realized = float(int(x))
        else:
            n, realized = _delay_points([x], durations)[0]
            cell_plan = replace(plan, delay_gates=n, swap_count=0)
        cell_rows: list[ReportRow] = []
        qbers: list[float] = []
        fractions: list[float] = []
        n_sifted = 0.0
        for cell, symbol in enumerate(BB84_SYMBOLS):
            circuit = build(cell_plan, symbol, graph, durations, t_osc, drift_qubit)
            weights, recorded = _run_cell(
                circuit, noise, plan.shots, derive_cell_seed(plan.seed, point, cell), backend
            )
            if dual:
                weights, fraction = postselect_weights(weights)
            else:
                fraction = 1.0
            q = qber(weights, symbol.bit)
            qbers.append(q)
            fractions.append(fraction)
            n_sifted += (recorded if backend == "trajectory" else plan.shots) * fraction
            cell_rows.append(
                ReportRow(
                    x=realized,
                    metric=f"qber_{'plus' if symbol.basis == '+' else 'times'}_{symbol.bit}",
                    value=q,
                    shots=plan.shots if backend == "trajectory" else 0,
                    accepted_fraction=fraction,
                    seed=plan.seed,
                    backend=backend,
                )
            )
        q_mean = sum(qbers) / len(qbers)
        mean_fraction = sum(fractions) / len(fractions)
        l_sec = secret_key_length(n_sifted, q_mean, f_ec)
        common = dict(
            x=realized,
            shots=plan.shots if backend == "trajectory" else 0,
            accepted_fraction=mean_fraction,
            seed=plan.seed,
            backend=backend,
        )
        rows.extend(cell_rows)
        rows.append(ReportRow(metric="qber_mean", value=q_mean, **common))
        rows.append(ReportRow(metric="secret_key_bits", value=l_sec, **common))
        rows.append(ReportRow(metric="secret_key_per_bit", value=l_sec / max(n_sifted, 1e-300), **common))
    return rows
