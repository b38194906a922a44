"""Entropy-based scoring: mutual information, QBER, and secret-key length.

All entropies are in bits (log base 2) with the 0*log(0) = 0 convention.
The channel picture everywhere is a classical input A (what the sender
chose) against a classical output B (what the receiver read); joint
distributions assume uniform inputs unless told otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PROB_ATOL = 1e-9


def _plog2p(p: float) -> float:
    return 0.0 if p <= 0.0 else -p * math.log2(p)


@dataclass(frozen=True)
class Distribution:
    """A normalised probability distribution over bitstring outcomes."""

    probs: dict[str, float]
    bit_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", dict(self.probs))
        object.__setattr__(self, "bit_labels", tuple(self.bit_labels))
        if not self.probs:
            raise ValueError("distribution has no outcomes")
        total = 0.0
        for key, p in self.probs.items():
            if p < -PROB_ATOL:
                raise ValueError(f"negative probability {p} for {key!r}")
            total += p
        if abs(total - 1.0) > PROB_ATOL:
            raise ValueError(f"probabilities sum to {total}, not 1 within 1e-9")

    def p(self, key: str) -> float:
        return self.probs.get(key, 0.0)

    def entropy(self) -> float:
        return sum(_plog2p(p) for p in self.probs.values())


@dataclass(frozen=True)
class CountsTable:
    """Integer outcome counts from one experiment cell.

    `shots` is the number of attempted repetitions; the recorded counts may
    sum to fewer (post-selection, ingested hardware data).  Probabilities are
    always relative to the recorded total.
    """

    counts: dict[str, int]
    shots: int
    bit_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", dict(self.counts))
        object.__setattr__(self, "bit_labels", tuple(self.bit_labels))
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        lengths = {len(k) for k in self.counts}
        if len(lengths) > 1:
            raise ValueError(f"outcome strings of mixed lengths: {sorted(self.counts)}")
        for key, c in self.counts.items():
            if set(key) - {"0", "1"}:
                raise ValueError(f"outcome {key!r} is not a bitstring")
            if not isinstance(c, (int, np.integer)) or c < 0:
                raise ValueError(f"count for {key!r} must be a non-negative integer, got {c!r}")
        if self.total() > self.shots:
            raise ValueError(f"counts sum to {self.total()} > shots {self.shots}")

    def total(self) -> int:
        return int(sum(self.counts.values()))

    def to_distribution(self) -> Distribution:
        total = self.total()
        if total == 0:
            raise ValueError("cannot normalise an empty counts table")
        return Distribution(
            {k: c / total for k, c in self.counts.items() if c}, bit_labels=self.bit_labels
        )


@dataclass(frozen=True)
class JointDistribution:
    """p(a, b) over classical inputs `inputs` and outputs `outputs`."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        mat = np.asarray(self.matrix, dtype=float)
        if mat.shape != (len(self.inputs), len(self.outputs)):
            raise ValueError(f"matrix shape {mat.shape} does not match labels")
        if np.any(mat < -PROB_ATOL):
            raise ValueError("joint distribution has a negative entry")
        if abs(mat.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"joint distribution sums to {mat.sum()}, not 1")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_conditional(
        cls,
        rows: dict[str, dict[str, float]],
        input_probs: dict[str, float] | None = None,
    ) -> "JointDistribution":
        """Build p(a,b) = p(a) * p(b|a) from per-input outcome weights.

        Each row is renormalised (weights need not sum to one — raw counts
        work); inputs default to uniform.
        """
        inputs = tuple(rows)
        outputs = tuple(sorted({b for row in rows.values() for b in row}))
        mat = np.zeros((len(inputs), len(outputs)))
        for i, a in enumerate(inputs):
            row = rows[a]
            total = float(sum(row.values()))
            if total <= 0:
                raise ValueError(f"input {a!r} has no outcome weight")
            pa = 1.0 / len(inputs) if input_probs is None else float(input_probs[a])
            for j, b in enumerate(outputs):
                mat[i, j] = pa * row.get(b, 0.0) / total
        return cls(inputs, outputs, mat)

    def output_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    def input_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)


def shannon_entropy(dist: Distribution | dict[str, float] | np.ndarray) -> float:
    """H(p) in bits over any probability vector/map (must sum to 1)."""
    if isinstance(dist, Distribution):
        values = list(dist.probs.values())
    elif isinstance(dist, dict):
        values = list(dist.values())
    else:
        values = list(np.asarray(dist, dtype=float).reshape(-1))
    total = sum(values)
    if abs(total - 1.0) > PROB_ATOL or any(v < -PROB_ATOL for v in values):
        raise ValueError("entropy needs a normalised probability vector")
    return sum(_plog2p(v) for v in values)


def conditional_entropy(joint: JointDistribution) -> float:
    """H(B|A) = H(A,B) - H(A) in bits."""
    h_joint = sum(_plog2p(p) for p in joint.matrix.reshape(-1))
    h_a = sum(_plog2p(p) for p in joint.input_marginal())
    return h_joint - h_a


def mutual_information(joint: JointDistribution) -> float:
    """I(A;B) = H(B) - H(B|A) in bits."""
    h_b = sum(_plog2p(p) for p in joint.output_marginal())
    return h_b - conditional_entropy(joint)


def counts_to_joint(cells: dict[str, "CountsTable | dict[str, int]"]) -> JointDistribution:
    """Joint distribution from per-input counts cells, uniform over inputs."""
    rows: dict[str, dict[str, float]] = {}
    for a, cell in cells.items():
        counts = cell.counts if isinstance(cell, CountsTable) else dict(cell)
        rows[a] = {k: float(v) for k, v in counts.items()}
    return JointDistribution.from_conditional(rows)


def qber(counts: CountsTable | dict[str, int], expected_bit: int) -> float:
    """Fraction of recorded single-bit outcomes that differ from `expected_bit`."""
    if expected_bit not in (0, 1):
        raise ValueError(f"expected_bit must be 0 or 1, got {expected_bit!r}")
    table = counts.counts if isinstance(counts, CountsTable) else dict(counts)
    if any(len(k) != 1 for k in table):
        raise ValueError("QBER needs single-bit outcomes; decode multi-bit counts first")
    total = sum(table.values())
    if total <= 0:
        raise ValueError("no recorded outcomes to score")
    wrong = table.get(str(1 - expected_bit), 0)
    return wrong / total


def binary_entropy(q: float) -> float:
    """h(q) = -q log2 q - (1-q) log2 (1-q), with h(0) = h(1) = 0."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"binary entropy argument {q} outside [0, 1]")
    return _plog2p(q) + _plog2p(1.0 - q)


def secret_key_length(n_sifted: float, q: float, f_ec: float = 1.15) -> float:
    """Asymptotic one-way secret-key length N * (1 - (1 + f_ec) h(q)).

    Negative values are meaningful (no key can be distilled) and are
    returned as-is.
    """
    if n_sifted < 0:
        raise ValueError("sifted-key length must be non-negative")
    if f_ec < 1.0:
        raise ValueError("error-correction inefficiency f_ec must be >= 1")
    return n_sifted * (1.0 - (1.0 + f_ec) * binary_entropy(q))


def total_variation_distance(
    first: Distribution | CountsTable | dict[str, float],
    second: Distribution | CountsTable | dict[str, float],
) -> float:
    """0.5 * sum over the key union of |p - q|, normalising counts if given."""

    def as_probs(obj) -> dict[str, float]:
        if isinstance(obj, CountsTable):
            return obj.to_distribution().probs
        if isinstance(obj, Distribution):
            return obj.probs
        total = float(sum(obj.values()))
        return {k: v / total for k, v in obj.items()}

    p, q = as_probs(first), as_probs(second)
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
