"""Dense state containers and the operator algebra used by both backends.

States are stored over an explicit, ordered tuple of qubit labels.  The
convention is big-endian throughout: ``qubit_order[0]`` is the most
significant bit of every computational-basis index, and character ``i`` of a
bitstring refers to ``qubit_order[i]``.  So for ``qubit_order = ("Q0", "Q1")``
the basis label ``"10"`` means Q0=1, Q1=0 and lives at amplitude index 2.

Operators (unitaries and Kraus channels) are written as 2^k x 2^k matrices
over their own k targets and embedded into the full register on application;
nothing here ever materialises a 2^n x 2^n matrix for the whole register.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerances used by validation throughout the package.
NORM_ATOL = 1e-9
UNITARY_ATOL = 1e-9
TRACE_ATOL = 1e-9
HERMITICITY_ATOL = 1e-9
EIGENVALUE_FLOOR = -1e-9
KRAUS_COMPLETENESS_ATOL = 1e-8


def _require_labels(qubit_order: tuple[str, ...]) -> None:
    if len(set(qubit_order)) != len(qubit_order):
        raise ValueError(f"duplicate qubit labels in {qubit_order!r}")
    if not qubit_order:
        raise ValueError("state needs at least one qubit")


def _axes_of(qubit_order: tuple[str, ...], targets: tuple[str, ...]) -> list[int]:
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets!r}")
    try:
        return [qubit_order.index(q) for q in targets]
    except ValueError:
        missing = [q for q in targets if q not in qubit_order]
        raise ValueError(f"targets {missing!r} not in register {qubit_order!r}") from None


def apply_matrix_to_axes(tensor: np.ndarray, matrix: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract a 2^k x 2^k matrix into the given k axes of a rank-m tensor.

    The remaining axes are untouched and the axis order of the result matches
    the input.  This is the single embedding primitive behind every gate and
    Kraus application in the package.
    """
    k = len(axes)
    op = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    moved = np.tensordot(op, tensor, axes=(tuple(range(k, 2 * k)), tuple(axes)))
    # tensordot puts the contracted axes first; restore the original layout.
    order = list(axes) + [a for a in range(tensor.ndim) if a not in axes]
    return moved.transpose(np.argsort(order))


def _check_unitary(matrix: np.ndarray, arity: int) -> np.ndarray:
    mat = np.asarray(matrix, dtype=complex)
    dim = 2**arity
    if mat.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
    if not np.allclose(mat.conj().T @ mat, np.eye(dim), atol=UNITARY_ATOL):
        raise ValueError("matrix is not unitary within 1e-9")
    return mat


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map given by explicit Kraus operators over `arity` qubits.

    Channels that happen to be mixtures of unitaries may carry the
    decomposition (`mix_probs`, `mix_unitaries`); the trajectory backend then
    samples the unitary index directly from the fixed probabilities instead
    of computing candidate norms, which is both faster and exactly
    equivalent for such channels.
    """

    operators: tuple[np.ndarray, ...]
    arity: int
    mix_probs: np.ndarray | None = None
    mix_unitaries: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        if not self.operators:
            raise ValueError("channel needs at least one Kraus operator")
        dim = 2**self.arity
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        for k in ops:
            if k.shape != (dim, dim):
                raise ValueError(f"Kraus operator shape {k.shape} does not match arity {self.arity}")
        total = sum(k.conj().T @ k for k in ops)
        if not np.allclose(total, np.eye(dim), atol=KRAUS_COMPLETENESS_ATOL):
            raise ValueError("Kraus operators do not satisfy completeness within 1e-8")
        object.__setattr__(self, "operators", ops)
        if (self.mix_probs is None) != (self.mix_unitaries is None):
            raise ValueError("mix_probs and mix_unitaries must be given together")
        if self.mix_probs is not None:
            probs = np.asarray(self.mix_probs, dtype=float)
            if probs.ndim != 1 or len(probs) != len(self.mix_unitaries):
                raise ValueError("mixture sizes disagree")
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
                raise ValueError("mixture probabilities must be non-negative and sum to 1")
            unis = tuple(_check_unitary(u, self.arity) for u in self.mix_unitaries)
            object.__setattr__(self, "mix_probs", probs)
            object.__setattr__(self, "mix_unitaries", unis)

    @classmethod
    def from_unitary_mixture(
        cls, probs: np.ndarray, unitaries: list[np.ndarray], arity: int
    ) -> "KrausChannel":
        probs = np.asarray(probs, dtype=float)
        ops = tuple(np.sqrt(p) * np.asarray(u, dtype=complex) for p, u in zip(probs, unitaries))
        return cls(ops, arity, mix_probs=probs, mix_unitaries=tuple(unitaries))

    @classmethod
    def identity(cls, arity: int = 1) -> "KrausChannel":
        eye = np.eye(2**arity, dtype=complex)
        return cls.from_unitary_mixture(np.array([1.0]), [eye], arity)

    def is_mixed_unitary(self) -> bool:
        return self.mix_probs is not None


@dataclass(eq=False)
class PureState:
    """A normalised state vector over an ordered qubit register."""

    amplitudes: np.ndarray
    qubit_order: tuple[str, ...]

    def __post_init__(self) -> None:
        self.qubit_order = tuple(self.qubit_order)
        _require_labels(self.qubit_order)
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size != 2 ** len(self.qubit_order):
            raise ValueError(
                f"amplitude length {vec.size} does not match {len(self.qubit_order)} qubits"
            )
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 by more than 1e-9")
        self.amplitudes = vec

    @property
    def num_qubits(self) -> int:
        return len(self.qubit_order)

    @classmethod
    def zero(cls, qubit_order: tuple[str, ...]) -> "PureState":
        vec = np.zeros(2 ** len(tuple(qubit_order)), dtype=complex)
        vec[0] = 1.0
        return cls(vec, tuple(qubit_order))

    @classmethod
    def from_label(cls, bits: str, qubit_order: tuple[str, ...]) -> "PureState":
        order = tuple(qubit_order)
        if len(bits) != len(order) or set(bits) - {"0", "1"}:
            raise ValueError(f"bad basis label {bits!r} for {len(order)} qubits")
        vec = np.zeros(2 ** len(order), dtype=complex)
        vec[int(bits, 2)] = 1.0
        return cls(vec, order)

    @classmethod
    def bell(cls, kind: str, qubit_order: tuple[str, str]) -> "PureState":
        """One of the four Bell states over two qubits: phi+/phi-/psi+/psi-."""
        signs = {"phi+": (1, 1), "phi-": (1, -1), "psi+": (1, 1), "psi-": (1, -1)}
        if kind not in signs:
            raise ValueError(f"unknown Bell state {kind!r}")
        a, b = signs[kind]
        vec = np.zeros(4, dtype=complex)
        if kind.startswith("phi"):
            vec[0b00], vec[0b11] = a, b
        else:
            vec[0b01], vec[0b10] = a, b
        return cls(vec / np.sqrt(2), tuple(qubit_order))

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def overlap(self, other: "PureState") -> complex:
        if self.qubit_order != other.qubit_order:
            raise ValueError("states are over different registers")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_mixed(self) -> "MixedState":
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return MixedState(rho, self.qubit_order)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(eq=False)
class MixedState:
    """A density matrix over an ordered qubit register.

    Validation checks unit trace and Hermiticity at 1e-9 on construction;
    `validate()` additionally bounds the most negative eigenvalue (the
    tolerance is looser for states coming out of long evolutions, where
    floating-point dust accumulates).
    """

    rho: np.ndarray
    qubit_order: tuple[str, ...]

    def __post_init__(self) -> None:
        self.qubit_order = tuple(self.qubit_order)
        _require_labels(self.qubit_order)
        dim = 2 ** len(self.qubit_order)
        mat = np.asarray(self.rho, dtype=complex)
        if mat.shape != (dim, dim):
            raise ValueError(f"density matrix shape {mat.shape} does not match {dim}")
        if abs(np.trace(mat).real - 1.0) > TRACE_ATOL or abs(np.trace(mat).imag) > TRACE_ATOL:
            raise ValueError("density matrix trace deviates from 1 by more than 1e-9")
        if not np.allclose(mat, mat.conj().T, atol=HERMITICITY_ATOL):
            raise ValueError("density matrix is not Hermitian within 1e-9")
        self.rho = mat

    @property
    def num_qubits(self) -> int:
        return len(self.qubit_order)

    @classmethod
    def zero(cls, qubit_order: tuple[str, ...]) -> "MixedState":
        return PureState.zero(tuple(qubit_order)).to_mixed()

    def validate(self, eig_floor: float = EIGENVALUE_FLOOR) -> None:
        smallest = float(np.linalg.eigvalsh(self.rho)[0])
        if smallest < eig_floor:
            raise ValueError(f"density matrix has eigenvalue {smallest} below {eig_floor}")

    def tensor_view(self) -> np.ndarray:
        return self.rho.reshape((2,) * (2 * self.num_qubits))

    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def fidelity_with_pure(self, target: PureState) -> float:
        if self.qubit_order != target.qubit_order:
            raise ValueError("states are over different registers")
        return float(np.vdot(target.amplitudes, self.rho @ target.amplitudes).real)

    def diagonal_probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.rho).real, 0.0, None)


State = PureState | MixedState


def apply_unitary(state: State, matrix: np.ndarray, targets: tuple[str, ...]) -> State:
    """Apply a k-qubit unitary to the named target qubits of either state kind."""
    mat = _check_unitary(matrix, len(targets))
    axes = _axes_of(state.qubit_order, tuple(targets))
    n = state.num_qubits
    if isinstance(state, PureState):
        out = apply_matrix_to_axes(state.tensor_view(), mat, axes)
        return PureState(out.reshape(-1), state.qubit_order)
    rho = apply_matrix_to_axes(state.tensor_view(), mat, axes)
    rho = apply_matrix_to_axes(rho, mat.conj(), [a + n for a in axes])
    return MixedState(rho.reshape((2**n, 2**n)), state.qubit_order)


def apply_channel(state: MixedState, channel: KrausChannel, targets: tuple[str, ...]) -> MixedState:
    """Apply a Kraus channel to a density matrix: rho -> sum_i K_i rho K_i^dag."""
    if not isinstance(state, MixedState):
        raise TypeError("channels act on density matrices; promote with to_mixed() first")
    if channel.arity != len(targets):
        raise ValueError(f"channel arity {channel.arity} does not match {len(targets)} targets")
    axes = _axes_of(state.qubit_order, tuple(targets))
    n = state.num_qubits
    tensor = state.tensor_view()
    col_axes = [a + n for a in axes]
    total = np.zeros_like(tensor)
    for k in channel.operators:
        term = apply_matrix_to_axes(tensor, k, axes)
        term = apply_matrix_to_axes(term, k.conj(), col_axes)
        total += term
    return MixedState(total.reshape((2**n, 2**n)), state.qubit_order)


def partial_trace(state: MixedState, keep: tuple[str, ...]) -> MixedState:
    """Trace out every qubit not named in `keep`, preserving register order."""
    if isinstance(state, PureState):
        state = state.to_mixed()
    keep = tuple(keep)
    axes = _axes_of(state.qubit_order, keep)
    kept = sorted(axes)
    if not kept:
        raise ValueError("must keep at least one qubit")
    n = state.num_qubits
    row_labels = list(range(n))
    col_labels = [i + n if i in kept else i for i in range(n)]
    out_labels = [i for i in kept] + [i + n for i in kept]
    reduced = np.einsum(state.tensor_view(), row_labels + col_labels, out_labels)
    dim = 2 ** len(kept)
    order = tuple(state.qubit_order[i] for i in kept)
    return MixedState(reduced.reshape((dim, dim)), order)
