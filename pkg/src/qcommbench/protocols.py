"""Superdense coding and BB84 circuit construction, plus dual-rail handling.

The builders compose the circuit IR from :mod:`.circuits` against a device
graph, honouring native CNOT orientations (a missing direction costs four
Hadamards).  Conventions baked in here:

* Superdense coding sends two classical bits (a1, a2) by applying
  Z^a1 X^a2 to the travelling half of a Bell pair; the Bell measurement
  reads them back as the outcome bits (b1, b2), so a noiseless run returns
  b = a for every input.
* BB84 symbols are (basis, bit) with basis "+" (computational) or "x"
  (Hadamard); sender and receiver always use the same basis, so every shot
  lands in the sifted key.
* The dual-rail code stores logical |0> as |10> and logical |1> as |01>
  across two physical rails; outcomes 00 and 11 signal leakage and are
  discarded by post-selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, Gate, duration_of, emit_cnot, identity_train
from .metrics import CountsTable
from .noise import drift_phase
from .topology import DeviceGraph, RoutePlan, build_swap_chain

SDC_INPUTS = ("00", "10", "01", "11")
BB84_BASES = ("+", "x")


@dataclass(frozen=True)
class SdcInput:
    """The two classical bits Alice wants to send."""

    a1: int
    a2: int

    def __post_init__(self) -> None:
        if self.a1 not in (0, 1) or self.a2 not in (0, 1):
            raise ValueError(f"bits must be 0/1, got ({self.a1}, {self.a2})")

    @property
    def label(self) -> str:
        return f"{self.a1}{self.a2}"

    @classmethod
    def from_label(cls, label: str) -> "SdcInput":
        if label not in SDC_INPUTS:
            raise ValueError(f"bad input label {label!r}; expected one of {SDC_INPUTS}")
        return cls(int(label[0]), int(label[1]))


@dataclass(frozen=True)
class Bb84Symbol:
    """One prepared BB84 symbol: a basis choice and a key bit."""

    basis: str
    bit: int

    def __post_init__(self) -> None:
        if self.basis not in BB84_BASES:
            raise ValueError(f"basis must be '+' or 'x', got {self.basis!r}")
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0/1, got {self.bit!r}")

    @property
    def label(self) -> str:
        return f"{self.basis}{self.bit}"


BB84_SYMBOLS = tuple(Bb84Symbol(b, v) for b in BB84_BASES for v in (0, 1))


@dataclass(frozen=True)
class Mitigation:
    """Error-mitigation switches: drift phase correction, dual-rail encoding."""

    phase_correction: bool = False
    dual_rail: bool = False


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything fixed about one benchmark run except the swept value.

    `qubits` means (stored, travelling) for superdense coding, (carrier,) or
    (carrier, bounce partner) for single-qubit BB84, and (rail0, rail1) for
    dual-rail BB84.  `route` carries the round trip of the travelling qubit;
    `swap_count` is the BB84 bounce count across one coupler (must be even —
    the carrier has to come back).
    """

    protocol: str
    qubits: tuple[str, ...]
    delay_gates: int = 0
    route: RoutePlan | None = None
    swap_count: int = 0
    mitigation: Mitigation = field(default_factory=Mitigation)
    shots: int = 8192
    seed: int = 2718

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.protocol not in ("sdc", "bb84"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.delay_gates < 0:
            raise ValueError("delay_gates must be non-negative")
        if self.swap_count < 0 or self.swap_count % 2:
            raise ValueError(f"bounce SWAP count must be even and non-negative, got {self.swap_count}")
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("plan qubits must be distinct")
        if self.protocol == "sdc":
            if len(self.qubits) != 2:
                raise ValueError("superdense coding needs (stored, travelling) qubits")
            if self.mitigation.dual_rail:
                raise ValueError("dual-rail encoding applies to BB84 only")
        else:
            need = 2 if (self.mitigation.dual_rail or self.swap_count) else 1
            if len(self.qubits) < need:
                raise ValueError(f"this BB84 variant needs {need} qubit(s), got {len(self.qubits)}")


def sdc_encoding(data: SdcInput) -> list[str]:
    """Gate kinds Alice applies to the travelling qubit, padded to two slots.

    The product of the returned gates equals Z^a1 X^a2 up to global phase.
    """
    return {
        (0, 0): ["I", "I"],
        (1, 0): ["Z", "I"],
        (0, 1): ["X", "I"],
        (1, 1): ["X", "Z"],
    }[(data.a1, data.a2)]


def bb84_encode_single(symbol: Bb84Symbol) -> list[str]:
    """Gate kinds preparing the symbol state on one carrier, two slots always.

    (0,+) -> |0>, (1,+) -> |1>, (0,x) -> |+>, (1,x) -> |->.
    """
    first = "X" if symbol.bit else "I"
    second = "H" if symbol.basis == "x" else "I"
    return [first, second]


def bb84_decode_single(basis: str) -> list[str]:
    """Bob's rotation before measuring: nothing for '+', Hadamard for 'x'."""
    if basis not in BB84_BASES:
        raise ValueError(f"basis must be '+' or 'x', got {basis!r}")
    return ["H"] if basis == "x" else ["I"]


def _cnot_gates(graph: DeviceGraph, control: str, target: str, durations) -> list[Gate]:
    orient = graph.require_adjacent(control, target)
    allowed = {"both": "both", "a->b": "control->target", "b->a": "target->control"}[orient]
    return emit_cnot(control, target, allowed, durations)


def _bell_prep(graph: DeviceGraph, a: str, b: str, durations) -> list[Gate]:
    """H then CNOT making a phi+ pair, with H on whichever side is native control."""
    orient = graph.require_adjacent(a, b)
    h_ns = duration_of("H", durations)
    if orient in ("both", "a->b"):
        return [Gate("H", (a,), h_ns), *_cnot_gates(graph, a, b, durations)]
    return [Gate("H", (b,), h_ns), *_cnot_gates(graph, b, a, durations)]


def _bell_measure(graph: DeviceGraph, a: str, b: str, durations) -> list[Gate]:
    """CNOT + H + measurements decoding the Bell basis.

    The control side takes the Hadamard and is read out first, so the
    outcome bits are (b1, b2) regardless of which physical orientation the
    hardware offers.
    """
    orient = graph.require_adjacent(a, b)
    h_ns = duration_of("H", durations)
    if orient in ("both", "a->b"):
        control, target = a, b
        cx = _cnot_gates(graph, a, b, durations)
    else:
        control, target = b, a
        cx = _cnot_gates(graph, b, a, durations)
    return [
        *cx,
        Gate("H", (control,), h_ns),
        Gate("MEASURE", (control,)),
        Gate("MEASURE", (target,)),
    ]


def _delay_block(
    qubits: tuple[str, ...],
    count: int,
    durations,
    correction: tuple[str, float] | None,
) -> list[Gate]:
    """Identity trains on each idling qubit, then the optional phase fix-up."""
    tau = duration_of("I", durations)
    gates: list[Gate] = []
    for q in qubits:
        gates.extend(identity_train(q, count, tau))
    if correction is not None and count > 0:
        qubit, phase = correction
        gates.append(Gate("U_PHASE", (qubit,), duration_of("U_PHASE", durations), phase=phase))
    return gates


def _correction_for(delay_gates: int, tau_ns: float, t_osc_us: float) -> float:
    return -drift_phase(delay_gates * tau_ns, t_osc_us)


def build_sdc_circuit(
    plan: ExperimentPlan,
    data: SdcInput,
    graph: DeviceGraph,
    durations: dict[str, float] | None = None,
    t_osc_us: float = 10.0,
    drift_qubit: str | None = None,
) -> Circuit:
    """The full superdense-coding run for one input.

    Stages: Bell prep on (stored, travelling) -> identity storage on both
    (optional phase correction on the drifting qubit) -> encoding on the
    travelling qubit -> SWAP chain out and back -> Bell measurement between
    the stored qubit and wherever the payload landed.
    """
    if plan.protocol != "sdc":
        raise ValueError(f"plan is for {plan.protocol!r}, not sdc")
    stored, payload = plan.qubits
    route = plan.route or RoutePlan.stationary(payload)
    if route.start != payload:
        raise ValueError(f"route starts at {route.start!r} but the travelling qubit is {payload!r}")
    route.validate_against(graph)
    tau = duration_of("I", durations)
    correction = None
    if plan.mitigation.phase_correction:
        target = drift_qubit or stored
        correction = (target, _correction_for(plan.delay_gates, tau, t_osc_us))
    gates: list[Gate] = []
    gates += _bell_prep(graph, stored, payload, durations)
    gates += _delay_block((stored, payload), plan.delay_gates, durations, correction)
    for kind in sdc_encoding(data):
        gates.append(Gate(kind, (payload,), duration_of(kind, durations)))
    gates += build_swap_chain(graph, route.outbound, durations)
    gates += build_swap_chain(graph, route.return_path, durations)
    gates += _bell_measure(graph, stored, route.end, durations)
    touched = sorted({q for g in gates for q in g.targets}, key=graph.nodes.index)
    return Circuit(
        qubits=tuple(touched),
        gates=tuple(gates),
        name=f"sdc_{data.label}",
        metadata={
            "protocol": "sdc",
            "input": data.label,
            "delay_gates": plan.delay_gates,
            "swaps": route.num_swaps,
        },
    )


def build_bb84_single(
    plan: ExperimentPlan,
    symbol: Bb84Symbol,
    graph: DeviceGraph,
    durations: dict[str, float] | None = None,
    t_osc_us: float = 10.0,
    drift_qubit: str | None = None,
) -> Circuit:
    """One BB84 cell on a bare carrier qubit.

    Stages: state preparation (two slots) -> identity delay (optional phase
    correction) -> an even number of SWAP bounces across one coupler ->
    receiver basis rotation -> measurement.  Noiseless, the measured bit
    equals the sent bit for all four symbols.
    """
    if plan.protocol != "bb84" or plan.mitigation.dual_rail:
        raise ValueError("plan does not describe single-qubit BB84")
    carrier = plan.qubits[0]
    gates: list[Gate] = []
    for kind in bb84_encode_single(symbol):
        gates.append(Gate(kind, (carrier,), duration_of(kind, durations)))
    correction = None
    if plan.mitigation.phase_correction:
        target = drift_qubit or carrier
        correction = (target, _correction_for(plan.delay_gates, duration_of("I", durations), t_osc_us))
    gates += _delay_block((carrier,), plan.delay_gates, durations, correction)
    if plan.swap_count:
        partner = plan.qubits[1]
        graph.require_adjacent(carrier, partner)
        for _ in range(plan.swap_count):
            gates += build_swap_chain(graph, (carrier, partner), durations)
    for kind in bb84_decode_single(symbol.basis):
        gates.append(Gate(kind, (carrier,), duration_of(kind, durations)))
    gates.append(Gate("MEASURE", (carrier,)))
    touched = sorted({q for g in gates for q in g.targets}, key=graph.nodes.index)
    return Circuit(
        qubits=tuple(touched),
        gates=tuple(gates),
        name=f"bb84_{'p' if symbol.basis == '+' else 'x'}{symbol.bit}",
        metadata={
            "protocol": "bb84",
            "basis": symbol.basis,
            "bit": symbol.bit,
            "delay_gates": plan.delay_gates,
            "swaps": plan.swap_count,
        },
    )


def dual_rail_prep(symbol: Bb84Symbol, r0: str, r1: str, graph: DeviceGraph, durations) -> list[Gate]:
    """Prepare the dual-rail code state for a symbol on rails (r0, r1).

    '+'-basis bits are the code words |10> and |01> directly; 'x'-basis bits
    are their equal superpositions, built with H and a CNOT across the rails.
    """
    x_ns = duration_of("X", durations)
    h_ns = duration_of("H", durations)
    if symbol.basis == "+":
        return [Gate("X", (r0 if symbol.bit == 0 else r1,), x_ns)]
    gates: list[Gate] = []
    if symbol.bit == 1:
        gates.append(Gate("X", (r0,), x_ns))
    gates.append(Gate("H", (r0,), h_ns))
    gates += _cnot_gates(graph, r0, r1, durations)
    gates.append(Gate("X", (r1,), x_ns))
    return gates


def dual_rail_decode(basis: str, r0: str, r1: str, graph: DeviceGraph, durations) -> list[Gate]:
    """Rotate the code space back so the rails read out as code words."""
    if basis == "+":
        return []
    x_ns = duration_of("X", durations)
    h_ns = duration_of("H", durations)
    gates = _cnot_gates(graph, r0, r1, durations)
    gates.append(Gate("H", (r0,), h_ns))
    gates += _cnot_gates(graph, r0, r1, durations)
    gates.append(Gate("X", (r0,), x_ns))
    gates.append(Gate("X", (r1,), x_ns))
    return gates


def build_bb84_dualrail(
    plan: ExperimentPlan,
    symbol: Bb84Symbol,
    graph: DeviceGraph,
    durations: dict[str, float] | None = None,
    t_osc_us: float = 10.0,
    drift_qubit: str | None = None,
) -> Circuit:
    """One dual-rail BB84 cell across rails (r0, r1).

    The bounce channel swaps the two rails; an even count restores the code
    word.  Measurement reads both rails (r0 first); 00/11 outcomes are
    leakage for the post-selection stage.
    """
    if plan.protocol != "bb84" or not plan.mitigation.dual_rail:
        raise ValueError("plan does not describe dual-rail BB84")
    r0, r1 = plan.qubits[:2]
    gates = dual_rail_prep(symbol, r0, r1, graph, durations)
    correction = None
    if plan.mitigation.phase_correction and drift_qubit is not None:
        correction = (drift_qubit, _correction_for(plan.delay_gates, duration_of("I", durations), t_osc_us))
    gates += _delay_block((r0, r1), plan.delay_gates, durations, correction)
    for _ in range(plan.swap_count):
        gates += build_swap_chain(graph, (r0, r1), durations)
    gates += dual_rail_decode(symbol.basis, r0, r1, graph, durations)
    gates.append(Gate("MEASURE", (r0,)))
    gates.append(Gate("MEASURE", (r1,)))
    touched = sorted({q for g in gates for q in g.targets}, key=graph.nodes.index)
    return Circuit(
        qubits=tuple(touched),
        gates=tuple(gates),
        name=f"bb84dr_{'p' if symbol.basis == '+' else 'x'}{symbol.bit}",
        metadata={
            "protocol": "bb84-dualrail",
            "basis": symbol.basis,
            "bit": symbol.bit,
            "delay_gates": plan.delay_gates,
            "swaps": plan.swap_count,
        },
    )


@dataclass(frozen=True)
class PostSelectionResult:
    """Outcome of dual-rail post-selection on one cell's counts."""

    accepted: CountsTable
    accepted_fraction: float
    rejected: dict[str, int]


DUAL_RAIL_CODEWORDS = {"10": "0", "01": "1"}


def postselect_weights(weights: dict[str, float]) -> tuple[dict[str, float], float]:
    """Split two-rail outcome weights into kept single-bit weights and the kept fraction."""
    if any(len(k) != 2 for k in weights):
        raise ValueError("dual-rail outcomes must be two-bit strings")
    total = float(sum(weights.values()))
    if total <= 0:
        raise ValueError("no outcome weight to post-select")
    kept = {}
    for word, bit in DUAL_RAIL_CODEWORDS.items():
        if weights.get(word, 0):
            kept[bit] = kept.get(bit, 0) + weights[word]
    fraction = float(sum(kept.values())) / total
    return kept, fraction


def postselect_dualrail(counts: CountsTable) -> PostSelectionResult:
    """Discard leakage outcomes (00/11) and decode the code words to bits.

    The accepted table keeps the original `shots`, so its recorded total
    reflects the discard; `accepted_fraction` is kept/recorded.
    """
    kept, fraction = postselect_weights({k: float(v) for k, v in counts.counts.items()})
    accepted = CountsTable(
        counts={bit: int(round(v)) for bit, v in kept.items()},
        shots=counts.shots,
        bit_labels=counts.bit_labels[:1],
    )
    rejected = {k: v for k, v in counts.counts.items() if k not in DUAL_RAIL_CODEWORDS}
    return PostSelectionResult(accepted=accepted, accepted_fraction=fraction, rejected=rejected)
