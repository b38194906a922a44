"""Gate-level circuit IR, standard gate matrices, and OpenQASM 2.0 round-trip.

Circuits are flat, immutable gate lists over named qubits.  Every gate
carries its own wall-clock duration in nanoseconds; there is no global
clock, and the noise layer consumes exactly these per-gate durations.
Builders assemble plain ``list[Gate]`` and construct the `Circuit` once.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

GATE_KINDS = ("I", "X", "Y", "Z", "H", "U_PHASE", "CNOT", "MEASURE", "BARRIER")

# Default wall-clock durations (ns).  Single-qubit gates share the identity
# slot length; two-qubit gates are slower on the modelled hardware.
DEFAULT_DURATIONS_NS: dict[str, float] = {
    "I": 90.0,
    "X": 90.0,
    "Y": 90.0,
    "Z": 90.0,
    "H": 90.0,
    "U_PHASE": 90.0,
    "CNOT": 300.0,
    "MEASURE": 0.0,
    "BARRIER": 0.0,
}


def duration_of(kind: str, durations: dict[str, float] | None = None) -> float:
    table = DEFAULT_DURATIONS_NS if durations is None else durations
    if kind in table:
        return float(table[kind])
    if kind == "CNOT":
        return float(table.get("CNOT", DEFAULT_DURATIONS_NS["CNOT"]))
    return float(table.get("I", DEFAULT_DURATIONS_NS["I"]))


@dataclass(frozen=True)
class Gate:
    """One scheduled operation: kind, ordered targets, duration, optional phase.

    For CNOT the first target is the control.  `phase` is meaningful only for
    U_PHASE, where the matrix is diag(1, e^{i*phase}).
    """

    kind: str
    targets: tuple[str, ...]
    duration_ns: float = 0.0
    phase: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.kind} gate: {self.targets!r}")
        expected = 2 if self.kind == "CNOT" else 1
        if self.kind != "BARRIER" and len(self.targets) != expected:
            raise ValueError(f"{self.kind} takes {expected} target(s), got {len(self.targets)}")
        if self.kind == "BARRIER" and not self.targets:
            raise ValueError("BARRIER needs at least one target")
        if self.duration_ns < 0:
            raise ValueError("gate duration must be non-negative")
        if self.kind == "U_PHASE":
            if self.phase is None or not math.isfinite(self.phase):
                raise ValueError("U_PHASE requires a finite phase")
        elif self.phase is not None:
            raise ValueError(f"{self.kind} does not take a phase")


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def gate_matrix(kind: str, phase: float | None = None) -> np.ndarray:
    """Unitary matrix for a gate kind (big-endian; CNOT control = first qubit)."""
    if kind == "I":
        return np.eye(2, dtype=complex)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "Z":
        return np.diag([1.0 + 0j, -1.0])
    if kind == "H":
        return _H.copy()
    if kind == "U_PHASE":
        if phase is None:
            raise ValueError("U_PHASE requires a phase")
        return np.diag([1.0 + 0j, np.exp(1j * phase)])
    if kind == "CNOT":
        return _CNOT.copy()
    raise ValueError(f"gate kind {kind!r} has no matrix")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over a fixed qubit register.

    Invariants enforced here: all gate targets are registered qubits, and no
    unitary gate acts on a qubit after that qubit has been measured
    (measurement is terminal per qubit).  The measurement *order* defines the
    bit order of outcome strings: bit i of an outcome belongs to the i-th
    MEASURE gate.
    """

    qubits: tuple[str, ...]
    gates: tuple[Gate, ...]
    name: str = "circuit"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "gates", tuple(self.gates))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("duplicate qubit labels in circuit register")
        measured: list[str] = []
        for gate in self.gates:
            for q in gate.targets:
                if q not in self.qubits:
                    raise ValueError(f"gate {gate.kind} targets unknown qubit {q!r}")
            if gate.kind == "MEASURE":
                if gate.targets[0] in measured:
                    raise ValueError(f"qubit {gate.targets[0]!r} measured twice")
                measured.append(gate.targets[0])
            elif gate.kind != "BARRIER":
                for q in gate.targets:
                    if q in measured:
                        raise ValueError(f"gate {gate.kind} acts on {q!r} after its measurement")

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def measured_qubits(self) -> tuple[str, ...]:
        return tuple(g.targets[0] for g in self.gates if g.kind == "MEASURE")

    def total_duration_ns(self) -> float:
        """Sum of gate durations on the busiest qubit (serial schedule per qubit)."""
        clock = {q: 0.0 for q in self.qubits}
        for gate in self.gates:
            if gate.kind in ("MEASURE", "BARRIER"):
                continue
            for q in gate.targets:
                clock[q] += gate.duration_ns
        return max(clock.values()) if clock else 0.0

    def count_gates(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)


def identity_train(qubit: str, count: int, tau_ns: float = 90.0) -> list[Gate]:
    """A run of `count` identity gates of `tau_ns` each on one qubit."""
    if count < 0:
        raise ValueError("identity train length must be non-negative")
    return [Gate("I", (qubit,), tau_ns) for _ in range(count)]


def _wrapped_cnot(control: str, target: str, durations: dict[str, float] | None) -> list[Gate]:
    """CNOT(control->target) built from the reversed native CNOT and 4 Hadamards."""
    h_ns = duration_of("H", durations)
    cx_ns = duration_of("CNOT", durations)
    return [
        Gate("H", (control,), h_ns),
        Gate("H", (target,), h_ns),
        Gate("CNOT", (target, control), cx_ns),
        Gate("H", (control,), h_ns),
        Gate("H", (target,), h_ns),
    ]


def emit_cnot(
    control: str,
    target: str,
    allowed: str,
    durations: dict[str, float] | None = None,
) -> list[Gate]:
    """Emit CNOT(control->target) honouring which physical direction exists.

    `allowed` is one of "both", "control->target", "target->control": the
    native orientation(s) the hardware supports for this pair.  When only the
    reverse orientation is native, the gate is synthesised with four
    Hadamards around the reversed CNOT.
    """
    if allowed in ("both", "control->target"):
        return [Gate("CNOT", (control, target), duration_of("CNOT", durations))]
    if allowed == "target->control":
        return _wrapped_cnot(control, target, durations)
    raise ValueError(f"no CNOT orientation available between {control!r} and {target!r}")


def decompose_swap(
    a: str,
    b: str,
    allowed: str = "both",
    durations: dict[str, float] | None = None,
) -> list[Gate]:
    """SWAP(a,b) as three alternating CNOTs, honouring available directions.

    `allowed` is "both", "a->b", or "b->a" (the native CNOT orientation
    between the pair).  With a single native orientation, the middle CNOT is
    the wrapped one, so the cost is 3 CNOTs + 4 Hadamards.
    """
    cx_ns = duration_of("CNOT", durations)
    if allowed == "both":
        return [
            Gate("CNOT", (a, b), cx_ns),
            Gate("CNOT", (b, a), cx_ns),
            Gate("CNOT", (a, b), cx_ns),
        ]
    if allowed == "a->b":
        return (
            [Gate("CNOT", (a, b), cx_ns)]
            + _wrapped_cnot(b, a, durations)
            + [Gate("CNOT", (a, b), cx_ns)]
        )
    if allowed == "b->a":
        return (
            [Gate("CNOT", (b, a), cx_ns)]
            + _wrapped_cnot(a, b, durations)
            + [Gate("CNOT", (b, a), cx_ns)]
        )
    raise ValueError(f"bad SWAP direction spec {allowed!r}")


# --- OpenQASM 2.0 ---------------------------------------------------------

_QASM_NAMES = {"I": "id", "X": "x", "Y": "y", "Z": "z", "H": "h"}


def _format_phase(phase: float) -> str:
    """Render a phase for u1(...), folding exact multiples of pi into 'pi' syntax."""
    for num in range(-8, 9):
        for den in (1, 2, 3, 4, 6, 8):
            if num != 0 and math.gcd(abs(num), den) != 1:
                continue
            if num != 0 and abs(phase - num * math.pi / den) < 1e-12:
                sign = "-" if num < 0 else ""
                mag = abs(num)
                head = "pi" if mag == 1 else f"{mag}*pi"
                return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"
    if abs(phase) < 1e-15:
        return "0"
    return repr(phase)


def export_qasm(circuit: Circuit) -> str:
    """Serialise a circuit to OpenQASM 2.0 text.

    Physical qubit labels map to register offsets by their position in
    ``circuit.qubits``; classical bits are allocated in measurement order.
    The output is byte-deterministic for a given circuit.
    """
    idx = {q: i for i, q in enumerate(circuit.qubits)}
    measured = circuit.measured_qubits()
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.num_qubits}];",
    ]
    if measured:
        lines.append(f"creg c[{len(measured)}];")
    bit = 0
    for gate in circuit.gates:
        if gate.kind == "MEASURE":
            lines.append(f"measure q[{idx[gate.targets[0]]}] -> c[{bit}];")
            bit += 1
        elif gate.kind == "BARRIER":
            args = ",".join(f"q[{idx[q]}]" for q in gate.targets)
            lines.append(f"barrier {args};")
        elif gate.kind == "CNOT":
            lines.append(f"cx q[{idx[gate.targets[0]]}],q[{idx[gate.targets[1]]}];")
        elif gate.kind == "U_PHASE":
            lines.append(f"u1({_format_phase(gate.phase)}) q[{idx[gate.targets[0]]}];")
        else:
            lines.append(f"{_QASM_NAMES[gate.kind]} q[{idx[gate.targets[0]]}];")
    return "\n".join(lines) + "\n"


_TOKEN_RE = re.compile(
    r"""^\s*(?:
        (?P<gate>id|x|y|z|h)\s+q\[(?P<t>\d+)\]
      | u1\((?P<phase>[^)]*)\)\s+q\[(?P<ut>\d+)\]
      | cx\s+q\[(?P<c>\d+)\]\s*,\s*q\[(?P<x>\d+)\]
      | measure\s+q\[(?P<m>\d+)\]\s*->\s*c\[(?P<cb>\d+)\]
      | barrier\s+(?P<bargs>q\[\d+\](?:\s*,\s*q\[\d+\])*)
    )\s*;\s*$""",
    re.VERBOSE,
)

_INV_NAMES = {v: k for k, v in _QASM_NAMES.items()}


def _parse_phase(text: str) -> float:
    text = text.strip().replace(" ", "")
    m = re.fullmatch(r"(-?)(?:(\d+)\*)?pi(?:/(\d+))?", text)
    if m:
        sign = -1.0 if m.group(1) else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * num * math.pi / den
    return float(text)


def parse_qasm(text: str, durations: dict[str, float] | None = None) -> Circuit:
    """Parse the OpenQASM 2.0 subset produced by :func:`export_qasm`.

    Gate durations are not part of QASM; they are re-attached from the given
    duration table (defaults match :data:`DEFAULT_DURATIONS_NS`), so
    export -> parse -> export is byte-stable.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "OPENQASM 2.0;":
        raise ValueError("missing OPENQASM 2.0 header")
    body = [ln for ln in lines[1:] if not ln.startswith("include ")]
    if not body or not body[0].startswith("qreg "):
        raise ValueError("missing qreg declaration")
    m = re.fullmatch(r"qreg\s+q\[(\d+)\];", body[0])
    if not m:
        raise ValueError(f"bad qreg line: {body[0]!r}")
    n = int(m.group(1))
    qubits = tuple(f"q{i}" for i in range(n))
    gates: list[Gate] = []
    rest = body[1:]
    if rest and rest[0].startswith("creg "):
        rest = rest[1:]
    for ln in rest:
        tok = _TOKEN_RE.match(ln)
        if not tok:
            raise ValueError(f"unsupported QASM line: {ln!r}")
        if tok.group("gate"):
            kind = _INV_NAMES[tok.group("gate")]
            gates.append(Gate(kind, (qubits[int(tok.group("t"))],), duration_of(kind, durations)))
        elif tok.group("ut"):
            gates.append(
                Gate(
                    "U_PHASE",
                    (qubits[int(tok.group("ut"))],),
                    duration_of("U_PHASE", durations),
                    phase=_parse_phase(tok.group("phase")),
                )
            )
        elif tok.group("c"):
            gates.append(
                Gate(
                    "CNOT",
                    (qubits[int(tok.group("c"))], qubits[int(tok.group("x"))]),
                    duration_of("CNOT", durations),
                )
            )
        elif tok.group("m"):
            gates.append(Gate("MEASURE", (qubits[int(tok.group("m"))],)))
        else:
            args = tuple(
                qubits[int(i)] for i in re.findall(r"q\[(\d+)\]", tok.group("bargs"))
            )
            gates.append(Gate("BARRIER", args))
    return Circuit(qubits, tuple(gates), name="parsed")
