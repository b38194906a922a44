"""The two circuit-execution engines and their shared noise compiler.

`evolve_density` propagates the full density matrix (exact, exponential
memory — capped at 12 qubits).  `run_trajectories` samples pure-state
quantum trajectories shot by shot (capped at 20 qubits).  Both consume the
same compiled event stream, so for any circuit within both caps they agree
to sampling error.

Reproducibility contract: every stochastic event in a shot draws from a
counter-based Philox stream keyed by (seed, shot index).  Results are
therefore independent of block size, platform, and the number of other
shots; rerunning any single shot reproduces it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate, gate_matrix
from .metrics import CountsTable, Distribution
from .noise import NoiseModel, damping_channel, depolarizing_channel, drift_phase, drift_unitary
from .states import KrausChannel, MixedState, apply_matrix_to_axes

DENSITY_MAX_QUBITS = 12
TRAJECTORY_MAX_QUBITS = 20


class CapacityError(Exception):
    """Raised when a circuit exceeds a backend's qubit capacity."""


@dataclass(frozen=True)
class _UnitaryEvent:
    matrix: np.ndarray
    axes: tuple[int, ...]


@dataclass(frozen=True)
class _ChannelEvent:
    channel: KrausChannel
    axes: tuple[int, ...]


@dataclass(frozen=True)
class CompiledCircuit:
    """Event stream plus measurement bookkeeping for either backend."""

    num_qubits: int
    events: tuple
    measured_axes: tuple[int, ...]
    measured_qubits: tuple[str, ...]
    num_stochastic: int


def compile_circuit(circuit: Circuit, noise: NoiseModel | None = None) -> CompiledCircuit:
    """Lower a circuit to an ordered event stream with noise interleaved.

    Per gate the order is: ideal unitary, then gate depolarizing, then
    per-qubit damping over the gate duration, then the coherent drift phase
    if the drift clock advanced.  Measurements are deferred to the end of the
    stream (exact, because measurement is terminal per qubit).
    """
    axis = {q: i for i, q in enumerate(circuit.qubits)}
    noisy = noise is not None and not noise.is_ideal()
    events: list = []
    measured_axes: list[int] = []
    measured_qubits: list[str] = []
    stochastic = 0

    def add_channel(channel: KrausChannel, axes: tuple[int, ...]) -> None:
        nonlocal stochastic
        events.append(_ChannelEvent(channel, axes))
        stochastic += 1

    for gate in circuit.gates:
        if gate.kind == "BARRIER":
            continue
        if gate.kind == "MEASURE":
            measured_axes.append(axis[gate.targets[0]])
            measured_qubits.append(gate.targets[0])
            continue
        targets = tuple(axis[q] for q in gate.targets)
        if gate.kind != "I":
            events.append(_UnitaryEvent(gate_matrix(gate.kind, gate.phase), targets))
        if not noisy:
            continue
        if gate.kind == "CNOT":
            if noise.p_depol_2q > 0:
                add_channel(depolarizing_channel(noise.p_depol_2q, 2), targets)
        elif gate.kind != "I" or noise.depolarize_identity:
            if noise.p_depol_1q > 0:
                add_channel(depolarizing_channel(noise.p_depol_1q, 1), targets)
        if gate.duration_ns > 0:
            for q in gate.targets:
                t1, t2 = noise.t1_of(q), noise.t2_of(q)
                if math.isinf(t1) and math.isinf(t2):
                    continue
                add_channel(damping_channel(gate.duration_ns, t1, t2), (axis[q],))
        if (
            noise.drift is not None
            and noise.drift.target in axis
            and noise.drift.applies_to(gate)
            and gate.duration_ns > 0
        ):
            phi = drift_phase(gate.duration_ns, noise.drift.t_osc_us)
            events.append(_UnitaryEvent(drift_unitary(phi), (axis[noise.drift.target],)))
    return CompiledCircuit(
        num_qubits=circuit.num_qubits,
        events=tuple(events),
        measured_axes=tuple(measured_axes),
        measured_qubits=tuple(measured_qubits),
        num_stochastic=stochastic,
    )


def evolve_density(circuit: Circuit, noise: NoiseModel | None = None) -> MixedState:
    """Exact density-matrix evolution of the full circuit (without readout)."""
    n = circuit.num_qubits
    if n > DENSITY_MAX_QUBITS:
        raise CapacityError(f"density backend handles at most {DENSITY_MAX_QUBITS} qubits, got {n}")
    compiled = compile_circuit(circuit, noise)
    rho = np.zeros((2,) * (2 * n), dtype=complex)
    rho[(0,) * (2 * n)] = 1.0
    for event in compiled.events:
        if isinstance(event, _UnitaryEvent):
            rho = apply_matrix_to_axes(rho, event.matrix, list(event.axes))
            rho = apply_matrix_to_axes(rho, event.matrix.conj(), [a + n for a in event.axes])
        else:
            col_axes = [a + n for a in event.axes]
            total = np.zeros_like(rho)
            for k in event.channel.operators:
                term = apply_matrix_to_axes(rho, k, list(event.axes))
                total += apply_matrix_to_axes(term, k.conj(), col_axes)
            rho = total
    return MixedState(rho.reshape((2**n, 2**n)), circuit.qubits)


def measurement_distribution(
    state: MixedState,
    qubits: tuple[str, ...] | None = None,
    readout=None,
) -> Distribution:
    """Outcome distribution over `qubits` (in that bit order) from a state.

    Optional readout errors are pushed through as classical confusion
    matrices, one per measured qubit.
    """
    order = tuple(qubits) if qubits is not None else state.qubit_order
    axes = [state.qubit_order.index(q) for q in order]
    n = state.num_qubits
    probs = state.diagonal_probabilities().reshape((2,) * n)
    drop = tuple(a for a in range(n) if a not in axes)
    if drop:
        probs = probs.sum(axis=drop)
    remaining = [a for a in range(n) if a not in drop]
    probs = probs.transpose([remaining.index(a) for a in axes])
    if readout is not None and not readout.is_trivial():
        m = len(order)
        for pos, q in enumerate(order):
            conf = readout.confusion(q)
            probs = np.moveaxis(np.tensordot(conf, probs, axes=([1], [pos])), 0, pos)
    flat = probs.reshape(-1)
    flat = flat / flat.sum()
    m = len(order)
    return Distribution(
        {format(i, f"0{m}b"): float(p) for i, p in enumerate(flat) if p > 0}, bit_labels=order
    )


def _philox_block(seed: int, shot_start: int, count: int, rows: int) -> np.ndarray:
    """Uniform block R[r, j]: row r, shot (shot_start + j), from per-shot streams."""
    block = np.empty((max(rows, 1), count))
    key_hi = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    for j in range(count):
        gen = np.random.Generator(np.random.Philox(key=[key_hi, np.uint64(shot_start + j)]))
        block[:, j] = gen.random(max(rows, 1))
    return block


def run_trajectories(
    circuit: Circuit,
    noise: NoiseModel | None = None,
    shots: int = 8192,
    seed: int = 0,
    block_size: int | None = None,
) -> CountsTable:
    """Sample the circuit shot by shot with Kraus-trajectory noise.

    Mixed-unitary channels (depolarizing) sample their unitary index directly
    from the fixed mixture probabilities; general channels (damping) compute
    candidate branch norms per shot.  Outcome sampling and readout bit-flips
    draw from the same per-shot streams, after all channel events.
    """
    n = circuit.num_qubits
    if n > TRAJECTORY_MAX_QUBITS:
        raise CapacityError(
            f"trajectory backend handles at most {TRAJECTORY_MAX_QUBITS} qubits, got {n}"
        )
    if shots <= 0:
        raise ValueError("shots must be positive")
    compiled = compile_circuit(circuit, noise)
    m = len(compiled.measured_axes)
    if m == 0:
        raise ValueError("circuit has no measurements; nothing to sample")
    readout = noise.readout if noise is not None and not noise.readout.is_trivial() else None
    rows = compiled.num_stochastic + 1 + (m if readout is not None else 0)
    dim = 2**n
    if block_size is None:
        block_size = int(max(1, min(shots, 4_194_304 // dim)))
    totals = np.zeros(2**m, dtype=np.int64)
    for start in range(0, shots, block_size):
        count = min(block_size, shots - start)
        rand = _philox_block(seed, start, count, rows)
        psi = np.zeros((count,) + (2,) * n, dtype=complex)
        psi[(slice(None),) + (0,) * n] = 1.0
        row = 0
        for event in compiled.events:
            axes = [a + 1 for a in event.axes]
            if isinstance(event, _UnitaryEvent):
                psi = apply_matrix_to_axes(psi, event.matrix, axes)
                continue
            u = rand[row]
            row += 1
            channel = event.channel
            if channel.is_mixed_unitary():
                edges = np.cumsum(channel.mix_probs)
                choice = np.searchsorted(edges, u, side="right")
                choice = np.minimum(choice, len(edges) - 1)
                for i, unitary in enumerate(channel.mix_unitaries):
                    if i == 0 and np.allclose(unitary, np.eye(unitary.shape[0])):
                        continue
                    mask = choice == i
                    if mask.any():
                        psi[mask] = apply_matrix_to_axes(psi[mask], unitary, axes)
            else:
                branches = [apply_matrix_to_axes(psi, k, axes) for k in channel.operators]
                flat = [b.reshape(count, -1) for b in branches]
                norms = np.stack([np.einsum("ij,ij->i", f.conj(), f).real for f in flat])
                cum = np.cumsum(norms, axis=0)
                threshold = u * cum[-1]
                choice = (cum < threshold[None, :]).sum(axis=0)
                choice = np.minimum(choice, len(branches) - 1)
                out = np.empty_like(psi)
                safe = np.sqrt(np.maximum(norms, 1e-300))
                for i, branch in enumerate(branches):
                    mask = choice == i
                    if mask.any():
                        out[mask] = branch[mask] / safe[i, mask].reshape((-1,) + (1,) * n)
                psi = out
        probs = np.abs(psi.reshape(count, dim)) ** 2
        cum = np.cumsum(probs, axis=1)
        threshold = rand[row] * cum[:, -1]
        row += 1
        idx = (cum < threshold[:, None]).sum(axis=1)
        idx = np.minimum(idx, dim - 1)
        codes = np.zeros(count, dtype=np.int64)
        for pos, axis in enumerate(compiled.measured_axes):
            bits = (idx >> (n - 1 - axis)) & 1
            if readout is not None:
                e0, e1 = readout.pair(compiled.measured_qubits[pos])
                flip_prob = np.where(bits == 1, e1, e0)
                bits = bits ^ (rand[row] < flip_prob)
                row += 1
            codes |= bits.astype(np.int64) << (m - 1 - pos)
        totals += np.bincount(codes, minlength=2**m)
    counts = {format(i, f"0{m}b"): int(c) for i, c in enumerate(totals) if c}
    return CountsTable(counts=counts, shots=shots, bit_labels=compiled.measured_qubits)


def exact_counts_distribution(circuit: Circuit, noise: NoiseModel | None = None) -> Distribution:
    """Density-backend outcome distribution including readout, for one circuit."""
    state = evolve_density(circuit, noise)
    readout = noise.readout if noise is not None else None
    return measurement_distribution(state, circuit.measured_qubits(), readout)
