import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcommbench.states import (
    KrausChannel,
    MixedState,
    PureState,
    apply_channel,
    apply_matrix_to_axes,
    apply_unitary,
    partial_trace,
)

from oracles import (
    PAULI,
    apply_channel_brute,
    apply_unitary_brute,
    embed_operator,
    partial_trace_brute,
    random_density,
    random_unitary,
)


def test_zero_state_and_labels():
    s = PureState.zero(("a", "b", "c"))
    assert s.amplitudes[0] == 1.0
    assert np.count_nonzero(s.amplitudes) == 1
    assert s.num_qubits == 3


def test_from_label_big_endian():
    # first character of the label belongs to the first qubit in the register
    s = PureState.from_label("10", ("Q0", "Q1"))
    assert s.amplitudes[0b10] == 1.0


def test_bell_states():
    phi_p = PureState.bell("phi+", ("a", "b"))
    assert phi_p.amplitudes[0b00] == pytest.approx(1 / np.sqrt(2))
    assert phi_p.amplitudes[0b11] == pytest.approx(1 / np.sqrt(2))
    psi_m = PureState.bell("psi-", ("a", "b"))
    assert psi_m.amplitudes[0b01] == pytest.approx(1 / np.sqrt(2))
    assert psi_m.amplitudes[0b10] == pytest.approx(-1 / np.sqrt(2))
    assert abs(phi_p.overlap(PureState.bell("phi-", ("a", "b")))) < 1e-12
    with pytest.raises(ValueError):
        PureState.bell("sigma+", ("a", "b"))


def test_unnormalised_state_rejected():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]), ("a",))


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError):
        PureState.zero(("a", "a"))


def test_apply_matrix_to_axes_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, min(n, 2) + 1))
        axes = sorted(rng.choice(n, size=k, replace=False).tolist())
        rng.shuffle(axes)
        u = random_unitary(rng, 2**k)
        vec = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        vec /= np.linalg.norm(vec)
        got = apply_matrix_to_axes(vec.reshape((2,) * n), u, list(axes)).reshape(-1)
        want = embed_operator(u, list(axes), n) @ vec
        assert np.allclose(got, want, atol=1e-12)


def test_apply_unitary_density_matches_brute_force():
    rng = np.random.default_rng(11)
    labels = ("q0", "q1", "q2")
    for _ in range(10):
        rho = random_density(rng, 8)
        u = random_unitary(rng, 4)
        targets = ("q2", "q0")
        got = apply_unitary(MixedState(rho, labels), u, targets).rho
        want = apply_unitary_brute(rho, u, [2, 0], 3)
        assert np.allclose(got, want, atol=1e-12)


def test_apply_unitary_pure_and_density_agree():
    rng = np.random.default_rng(3)
    vec = rng.normal(size=8) + 1j * rng.normal(size=8)
    vec /= np.linalg.norm(vec)
    labels = ("a", "b", "c")
    u = random_unitary(rng, 2)
    pure = apply_unitary(PureState(vec, labels), u, ("b",))
    mixed = apply_unitary(PureState(vec, labels).to_mixed(), u, ("b",))
    assert np.allclose(pure.to_mixed().rho, mixed.rho, atol=1e-12)


def test_kraus_completeness_enforced():
    bad = [np.array([[1.0, 0.0], [0.0, 0.5]])]
    with pytest.raises(ValueError):
        KrausChannel(tuple(bad), 1)


def test_kraus_mixture_bookkeeping():
    probs = np.array([0.25, 0.25, 0.25, 0.25])
    unis = [PAULI[p] for p in "IXYZ"]
    ch = KrausChannel.from_unitary_mixture(probs, unis, 1)
    assert ch.is_mixed_unitary()
    assert not KrausChannel(
        (np.diag([1.0, np.sqrt(0.5)]), np.sqrt(0.5) * np.array([[0, 1], [0, 0]])), 1
    ).is_mixed_unitary()


def test_equal_pauli_mixture_depolarises_completely():
    # averaging over all four Paulis sends any state to I/2
    rng = np.random.default_rng(5)
    ch = KrausChannel.from_unitary_mixture(np.full(4, 0.25), [PAULI[p] for p in "IXYZ"], 1)
    rho = random_density(rng, 2)
    out = apply_channel(MixedState(rho, ("q",)), ch, ("q",))
    assert np.allclose(out.rho, np.eye(2) / 2, atol=1e-12)


def test_apply_channel_matches_brute_force():
    rng = np.random.default_rng(13)
    labels = ("x", "y", "z")
    rho = random_density(rng, 8)
    k0 = np.diag([1.0, np.sqrt(0.6)])
    k1 = np.array([[0.0, np.sqrt(0.4)], [0.0, 0.0]])
    ch = KrausChannel((k0, k1), 1)
    got = apply_channel(MixedState(rho, labels), ch, ("y",)).rho
    want = apply_channel_brute(rho, [k0, k1], [1], 3)
    assert np.allclose(got, want, atol=1e-12)


def test_partial_trace_matches_brute_force():
    rng = np.random.default_rng(17)
    labels = ("a", "b", "c")
    rho = random_density(rng, 8)
    state = MixedState(rho, labels)
    for keep, positions in ((("a",), [0]), (("c", "a"), [0, 2]), (("b", "c"), [1, 2])):
        got = partial_trace(state, keep)
        want = partial_trace_brute(rho, positions, 3)
        assert np.allclose(got.rho, want, atol=1e-12)
        assert got.qubit_order == tuple(labels[i] for i in sorted(positions))


def test_partial_trace_of_bell_pair_is_maximally_mixed():
    rho = PureState.bell("phi+", ("a", "b")).to_mixed()
    reduced = partial_trace(rho, ("a",))
    assert np.allclose(reduced.rho, np.eye(2) / 2, atol=1e-12)


def test_density_validation():
    with pytest.raises(ValueError):
        MixedState(np.diag([0.6, 0.6]), ("q",))
    with pytest.raises(ValueError):
        MixedState(np.array([[0.5, 0.5j], [0.5j, 0.5]]), ("q",))
    bad_eig = np.array([[1.1, 0.0], [0.0, -0.1]])
    state = MixedState(bad_eig, ("q",))
    with pytest.raises(ValueError):
        state.validate()


def test_fidelity_and_purity():
    rng = np.random.default_rng(23)
    target = PureState.bell("psi+", ("a", "b"))
    assert target.to_mixed().fidelity_with_pure(target) == pytest.approx(1.0)
    assert target.to_mixed().purity() == pytest.approx(1.0)
    rho = random_density(rng, 4)
    manual = float(np.vdot(target.amplitudes, rho @ target.amplitudes).real)
    assert MixedState(rho, ("a", "b")).fidelity_with_pure(target) == pytest.approx(manual)


@settings(deadline=None, max_examples=30)
@given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=0, max_value=2**32 - 1))
def test_channel_preserves_trace_and_positivity(gamma, seed):
    k0 = np.diag([1.0, np.sqrt(1.0 - gamma)])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    ch = KrausChannel((k0, k1), 1)
    rho = random_density(np.random.default_rng(seed), 4)
    out = apply_channel(MixedState(rho, ("a", "b")), ch, ("b",))
    assert abs(np.trace(out.rho).real - 1.0) < 1e-9
    out.validate()
