"""Noise primitives and the per-device noise model.

Channels and parameters are expressed in physical units: gate durations in
nanoseconds, T1/T2 and the drift oscillation period in microseconds.  The
composite relaxation channel combines amplitude damping (rate 1/T1) with the
extra pure dephasing needed so off-diagonals decay as exp(-t/T2); it requires
T2 <= 2*T1 and forms a semigroup in t.  Depolarizing noise is the uniform
mixture over non-identity Paulis with total probability p.  The coherent
drift is a slow deterministic phase rotation diag(1, e^{i*pi*t/t_osc}) on one
designated qubit, accrued (by default) only while that qubit sits in
identity gates.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .circuits import DEFAULT_DURATIONS_NS, Gate
from .states import KrausChannel

_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1.0]),
}


def _decay(t_us: float, rate_per_us: float) -> float:
    # exp(-t*rate) written to survive rate == 0 (infinite time constant).
    return math.exp(-t_us * rate_per_us) if rate_per_us > 0 else 1.0


@functools.lru_cache(maxsize=512)
def damping_channel(duration_ns: float, t1_us: float, t2_us: float) -> KrausChannel:
    """Amplitude + phase damping over one gate slot of `duration_ns`.

    gamma = 1 - exp(-t/T1) is the relaxation probability; an extra dephasing
    lam = 1 - exp(-t*(2/T2 - 1/T1)) tops up the off-diagonal decay to
    exp(-t/T2) exactly.  Composing two slots equals one slot of the summed
    duration (semigroup).
    """
    if duration_ns < 0:
        raise ValueError("duration must be non-negative")
    if t1_us <= 0 or t2_us <= 0:
        raise ValueError("T1 and T2 must be positive (use math.inf to disable)")
    r1 = 0.0 if math.isinf(t1_us) else 1.0 / t1_us
    r2 = 0.0 if math.isinf(t2_us) else 1.0 / t2_us
    dephase_rate = 2.0 * r2 - r1
    if dephase_rate < -1e-12:
        raise ValueError(f"T2={t2_us} exceeds 2*T1={2 * t1_us}; not a physical channel")
    t_us = duration_ns / 1000.0
    gamma = 1.0 - _decay(t_us, r1)
    lam = 1.0 - _decay(t_us, max(dephase_rate, 0.0))
    if gamma == 0.0 and lam == 0.0:
        return KrausChannel.identity(1)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt((1.0 - gamma) * (1.0 - lam))]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    k2 = np.array([[0.0, 0.0], [0.0, math.sqrt((1.0 - gamma) * lam)]], dtype=complex)
    ops = tuple(k for k in (k0, k1, k2) if np.any(np.abs(k) > 0))
    return KrausChannel(ops, arity=1)


@functools.lru_cache(maxsize=64)
def depolarizing_channel(p: float, arity: int = 1) -> KrausChannel:
    """Uniform Pauli noise: with probability p, one non-identity Pauli string.

    K_0 = sqrt(1-p) I and K_i = sqrt(p/(4^n - 1)) P_i over all 4^n - 1
    non-identity Pauli strings on `arity` qubits.  Being a mixture of
    unitaries, it carries its sampling decomposition for the trajectory
    backend.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    if arity not in (1, 2):
        raise ValueError("depolarizing noise is provided for 1 or 2 qubits")
    labels = ["".join(s) for s in itertools.product("IXYZ", repeat=arity)]
    unitaries = []
    for label in labels:
        op = np.array([[1.0 + 0j]])
        for ch in label:
            op = np.kron(op, _PAULIS[ch])
        unitaries.append(op)
    m = len(labels) - 1
    probs = np.array([1.0 - p] + [p / m] * m)
    return KrausChannel.from_unitary_mixture(probs, unitaries, arity)


def drift_phase(elapsed_ns: float, t_osc_us: float) -> float:
    """Accrued drift angle pi * t / t_osc for `elapsed_ns` of exposure."""
    if t_osc_us <= 0:
        raise ValueError("oscillation period must be positive")
    return math.pi * (elapsed_ns / 1000.0) / t_osc_us


def drift_unitary(phase: float) -> np.ndarray:
    return np.diag([1.0 + 0j, np.exp(1j * phase)])


def correction_gate(elapsed_ns: float, t_osc_us: float, qubit: str, duration_ns: float = 90.0) -> Gate:
    """The software fix-up for accrued drift: U_PHASE with the opposite angle."""
    return Gate("U_PHASE", (qubit,), duration_ns, phase=-drift_phase(elapsed_ns, t_osc_us))


@dataclass(frozen=True)
class CoherentDrift:
    """Deterministic slow phase rotation on one qubit.

    `accrue_on` selects which gate slots advance the drift clock on the
    target: "identity" (only I gates, the default — the qubit drifts while it
    idles) or "all" (every gate slot the target participates in).
    """

    target: str
    t_osc_us: float = 10.0
    accrue_on: str = "identity"

    def __post_init__(self) -> None:
        if self.t_osc_us <= 0:
            raise ValueError("oscillation period must be positive")
        if self.accrue_on not in ("identity", "all"):
            raise ValueError(f"accrue_on must be 'identity' or 'all', got {self.accrue_on!r}")

    def applies_to(self, gate: Gate) -> bool:
        if self.target not in gate.targets or gate.kind in ("MEASURE", "BARRIER"):
            return False
        return gate.kind == "I" if self.accrue_on == "identity" else True


@dataclass(frozen=True)
class ReadoutModel:
    """Classical measurement bit-flip probabilities per qubit.

    `pair(q)` returns (eps0, eps1) = (P(read 1 | true 0), P(read 0 | true 1)).
    Qubits without an explicit entry use `default`.
    """

    default: tuple[float, float] = (0.0, 0.0)
    per_qubit: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for pair in [self.default, *self.per_qubit.values()]:
            if len(pair) != 2 or not all(0.0 <= e <= 1.0 for e in pair):
                raise ValueError(f"readout error pair {pair!r} outside [0, 1]")

    def pair(self, qubit: str) -> tuple[float, float]:
        return tuple(self.per_qubit.get(qubit, self.default))

    def confusion(self, qubit: str) -> np.ndarray:
        """Column-stochastic 2x2 matrix mapping true to read probabilities."""
        e0, e1 = self.pair(qubit)
        return np.array([[1.0 - e0, e1], [e0, 1.0 - e1]])

    def is_trivial(self) -> bool:
        pairs = [self.default, *self.per_qubit.values()]
        return all(e == 0.0 for pair in pairs for e in pair)


@dataclass(frozen=True)
class NoiseModel:
    """Everything the backends need to noise a circuit.

    T1/T2 accept a single float (whole device) or a per-qubit map; readout is
    a :class:`ReadoutModel`; `drift` is optional.  `depolarize_identity`
    controls whether identity gates receive the single-qubit depolarizing
    kick on top of damping and drift (off by default: an idling qubit decays
    and drifts but is not actively driven).
    """

    name: str = "custom"
    t1_us: float | dict[str, float] = math.inf
    t2_us: float | dict[str, float] = math.inf
    p_depol_1q: float = 0.0
    p_depol_2q: float = 0.0
    readout: ReadoutModel = field(default_factory=ReadoutModel)
    drift: CoherentDrift | None = None
    gate_durations_ns: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_DURATIONS_NS))
    depolarize_identity: bool = False

    def __post_init__(self) -> None:
        for p, label in ((self.p_depol_1q, "p_depol_1q"), (self.p_depol_2q, "p_depol_2q")):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{label}={p} outside [0, 1]")
        for q in self._iter_qubit_times():
            t1, t2 = self.t1_of(q), self.t2_of(q)
            if t1 <= 0 or t2 <= 0:
                raise ValueError("T1 and T2 must be positive")
            if not math.isinf(t2) and t2 > 2 * t1 + 1e-12:
                raise ValueError(f"T2={t2} exceeds 2*T1={2 * t1} for qubit {q!r}")

    def _iter_qubit_times(self):
        keys = set()
        for table in (self.t1_us, self.t2_us):
            if isinstance(table, dict):
                keys.update(table)
        return keys or {None}

    def _lookup(self, table: float | dict[str, float], qubit: str | None) -> float:
        if isinstance(table, dict):
            if qubit in table:
                return float(table[qubit])
            if "default" in table:
                return float(table["default"])
            raise KeyError(f"no T1/T2 entry for qubit {qubit!r} and no 'default'")
        return float(table)

    def t1_of(self, qubit: str | None) -> float:
        return self._lookup(self.t1_us, qubit)

    def t2_of(self, qubit: str | None) -> float:
        return self._lookup(self.t2_us, qubit)

    def duration_of(self, kind: str) -> float:
        if kind in self.gate_durations_ns:
            return float(self.gate_durations_ns[kind])
        return float(DEFAULT_DURATIONS_NS[kind])

    def is_ideal(self) -> bool:
        damping_off = (
            not isinstance(self.t1_us, dict)
            and not isinstance(self.t2_us, dict)
            and math.isinf(self.t1_us)
            and math.isinf(self.t2_us)
        )
        return (
            damping_off
            and self.p_depol_1q == 0.0
            and self.p_depol_2q == 0.0
            and self.readout.is_trivial()
            and self.drift is None
        )

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls(name="ideal")


def _as_pair(value) -> tuple[float, float]:
    pair = tuple(float(v) for v in value)
    if len(pair) != 2:
        raise ValueError(f"expected [eps0, eps1], got {value!r}")
    return pair


def noise_model_from_dict(doc: dict) -> NoiseModel:
    """Build a NoiseModel from its JSON document form."""
    if not isinstance(doc, dict):
        raise ValueError("noise document must be a JSON object")
    known = {
        "name",
        "t1_us",
        "t2_us",
        "p_depol_1q",
        "p_depol_2q",
        "readout",
        "drift",
        "gate_durations_ns",
        "depolarize_identity",
    }
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown noise document keys: {sorted(unknown)}")

    def times(key):
        raw = doc.get(key, math.inf)
        if isinstance(raw, dict):
            return {q: float(v) for q, v in raw.items()}
        if raw is None:
            return math.inf
        return float(raw)

    readout_doc = doc.get("readout", {})
    readout = ReadoutModel(
        default=_as_pair(readout_doc.get("default", (0.0, 0.0))),
        per_qubit={q: _as_pair(v) for q, v in readout_doc.get("per_qubit", {}).items()},
    )
    drift_doc = doc.get("drift")
    drift = None
    if drift_doc:
        drift = CoherentDrift(
            target=str(drift_doc["target"]),
            t_osc_us=float(drift_doc.get("t_osc_us", 10.0)),
            accrue_on=str(drift_doc.get("accrue_on", "identity")),
        )
    durations = dict(DEFAULT_DURATIONS_NS)
    durations.update({k: float(v) for k, v in doc.get("gate_durations_ns", {}).items()})
    return NoiseModel(
        name=str(doc.get("name", "custom")),
        t1_us=times("t1_us"),
        t2_us=times("t2_us"),
        p_depol_1q=float(doc.get("p_depol_1q", 0.0)),
        p_depol_2q=float(doc.get("p_depol_2q", 0.0)),
        readout=readout,
        drift=drift,
        gate_durations_ns=durations,
        depolarize_identity=bool(doc.get("depolarize_identity", False)),
    )


def list_bundled_noise_models() -> list[str]:
    root = resources.files("qcommbench").joinpath("data/noise")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_noise_model(source: str | Path | dict) -> NoiseModel:
    """Load a noise model from a bundled name, a JSON file path, or a dict."""
    if isinstance(source, dict):
        return noise_model_from_dict(source)
    name = str(source)
    if not name.endswith(".json") and "/" not in name and "\\" not in name:
        ref = resources.files("qcommbench").joinpath(f"data/noise/{name}.json")
        if not ref.is_file():
            raise FileNotFoundError(
                f"no bundled noise model {name!r}; available: {list_bundled_noise_models()}"
            )
        return noise_model_from_dict(json.loads(ref.read_text()))
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"noise model file {path} does not exist")
    return noise_model_from_dict(json.loads(path.read_text()))
