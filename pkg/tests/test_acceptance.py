"""Acceptance gate: one pass/fail line per shipped guarantee.

Each test covers one guarantee at its stated tolerance; the helper writes the
verdict straight to the terminal (bypassing capture, so the lines show up even
without ``-s``) and then asserts, so a red run shows exactly which guarantee
broke.

Tolerances: fixture replays match an independently coded oracle to 1e-9;
noiseless protocol runs are exact to 1e-9; trajectory sampling matches the
density backend within total-variation distance 0.01 at 1e5 shots; the
drift law holds to 1e-6 (1e-9 once corrected); shape guarantees on the
bundled noise pack carry explicit windows.  Wall-clock bounds are asserted
where a guarantee names one.
"""

import argparse
import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from oracles import joint_from_rows, key_length, mutual_information_bits
from qcommbench.backends import (
    evolve_density,
    exact_counts_distribution,
    run_trajectories,
)
from qcommbench.circuits import Circuit, Gate, export_qasm, gate_matrix, identity_train
from qcommbench.cli import build_parser, main
from qcommbench.fixtures import BB84_CELL_ORDER, load_fixture
from qcommbench.metrics import total_variation_distance
from qcommbench.noise import CoherentDrift, NoiseModel, ReadoutModel, correction_gate, load_noise_model
from qcommbench.protocols import (
    BB84_SYMBOLS,
    Bb84Symbol,
    ExperimentPlan,
    Mitigation,
    SdcInput,
    bb84_encode_single,
    build_bb84_dualrail,
    build_sdc_circuit,
    sdc_encoding,
)
from qcommbench.reporting import replay_fixture
from qcommbench.states import PureState
from qcommbench.sweeps import SweepSpec, run_bb84_sweep, run_sdc_sweep
from qcommbench.topology import find_path, load_device, plan_route

GOLDEN = Path(__file__).parent / "golden"


_CAPMAN = None


@pytest.fixture(autouse=True)
def _live_verdicts(request):
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def check(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)
    assert ok, f"{name}" + (f" — {detail}" if detail else "")


def crossing(xs, ys, level):
    """x where the piecewise-linear curve through (xs, ys) hits `level`."""
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if (y0 - level) * (y1 - level) <= 0 and y0 != y1:
            return x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    return None


def test_criterion_1_swap_ladder_replay():
    start = time.perf_counter()
    fx = load_fixture("table1")
    rows = replay_fixture("table1")
    oracle = [mutual_information_bits(joint_from_rows(list(b))) for b in fx.blocks]
    values = [row.value for row in rows]
    worst = max(abs(a - b) for a, b in zip(values, oracle))
    monotone = all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
    elapsed = time.perf_counter() - start
    ok = (
        worst <= 1e-9
        and abs(values[0] - 1.15) < 0.01
        and monotone
        and values[-1] < 0.05
        and elapsed < 1.0
    )
    check(
        "SWAP-ladder replay matches oracle to 1e-9; 1.15 start, monotone, <0.05 tail; <1s",
        ok,
        f"worst={worst:.2e} I0={values[0]:.6f} tail={values[-1]:.6f} t={elapsed:.2f}s",
    )


def test_criterion_2_bb84_key_rate_replay():
    start = time.perf_counter()
    worst = 0.0
    table = {}
    for tid in ("table5", "table6"):
        fx = load_fixture(tid)
        rows = replay_fixture(tid)
        per_bit = [r.value for r in rows if r.metric == "secret_key_per_bit"]
        q_mean = [r.value for r in rows if r.metric == "qber_mean"]
        for i, (q, pb) in enumerate(zip(q_mean, per_bit)):
            oracle_q = sum(fx.rates[cell][i] for cell in BB84_CELL_ORDER) / 4.0
            worst = max(worst, abs(q - oracle_q), abs(pb - key_length(1.0, oracle_q)))
        table[tid] = (q_mean, per_bit)
    q5, pb5 = table["table5"]
    q6, pb6 = table["table6"]
    elapsed = time.perf_counter() - start
    ok = (
        worst <= 1e-9
        and abs(q5[0] - 0.030) <= 1e-12
        and abs(pb5[0] - 0.58) < 0.005
        and abs(q6[-1] - 0.13025) <= 1e-12
        and pb6[-1] < 0.0
        and elapsed < 1.0
    )
    check(
        "BB84 key-rate replays match oracle to 1e-9; q=0.030 -> l/N~0.58, q~0.130 -> l/N<0; <1s",
        ok,
        f"worst={worst:.2e} pb5[0]={pb5[0]:.6f} pb6[-1]={pb6[-1]:.6f} t={elapsed:.2f}s",
    )


def test_criterion_3_noiseless_identity_all_routes():
    qx5 = load_device("ibmqx5")
    qx4 = load_device("ibmqx4")
    base = find_path(qx5, "Q1", "Q8")
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"), seed=2718)
    start = time.perf_counter()
    same = run_sdc_sweep(
        plan, SweepSpec("swaps", tuple(range(0, 15, 2))), qx5,
        backend="density", base_path=base, return_mode="same",
    )
    alt = run_sdc_sweep(
        plan, SweepSpec("swaps", tuple(range(0, 9, 2))), qx5,
        backend="density", base_path=base, return_mode="alternate",
    )
    bb_single = run_bb84_sweep(
        ExperimentPlan(protocol="bb84", qubits=("Q1",), seed=2718),
        SweepSpec("delay_us", (0.0,)), qx4, backend="density",
    )
    bb_dual = run_bb84_sweep(
        ExperimentPlan(
            protocol="bb84", qubits=("Q1", "Q0"), seed=2718,
            mitigation=Mitigation(dual_rail=True),
        ),
        SweepSpec("swaps", (0, 2)), qx4, backend="density",
    )
    density_elapsed = time.perf_counter() - start
    # wide alternate returns need more than the 12-qubit density cap; the
    # circuits are noiseless, so 8 trajectories already sample the exact
    # point-mass outcome
    alt_wide = run_sdc_sweep(
        replace(plan, shots=8), SweepSpec("swaps", (10, 12, 14)), qx5,
        backend="trajectory", base_path=base, return_mode="alternate",
    )
    sdc_rows = same + alt + alt_wide
    worst_i = max(abs(row.value - 2.0) for row in sdc_rows)
    qber_rows = [r for r in bb_single + bb_dual if r.metric.startswith("qber_")]
    worst_q = max(abs(row.value) for row in qber_rows)
    worst_f = max(abs(row.accepted_fraction - 1.0) for row in bb_single + bb_dual)
    ok = (
        worst_i <= 1e-9
        and worst_q <= 1e-9
        and worst_f <= 1e-9
        and density_elapsed < 10.0
    )
    check(
        "noiseless runs: I=2.000000000 on every bundled route; BB84 q=0, all shots kept; <10s",
        ok,
        f"worst dI={worst_i:.2e} dq={worst_q:.2e} df={worst_f:.2e} t={density_elapsed:.2f}s",
    )


def _suite_gate(kind, *targets, phase=None):
    dur = 300.0 if kind == "CNOT" else (0.0 if kind == "MEASURE" else 90.0)
    return Gate(kind, targets, dur, phase=phase)


def _suite_circuit(qubits, gates):
    gates = list(gates) + [_suite_gate("MEASURE", q) for q in qubits]
    return Circuit(qubits=tuple(qubits), gates=tuple(gates), name="suite")


def _equivalence_suite():
    g = _suite_gate
    circuits = [
        _suite_circuit(("q0", "q1"), [g("H", "q0"), g("CNOT", "q0", "q1")]),
        _suite_circuit(
            ("q0", "q1"),
            [g("X", "q0"), g("Y", "q1"), g("CNOT", "q0", "q1"), g("Z", "q0")],
        ),
        _suite_circuit(
            ("q0", "q1", "q2"),
            [g("H", "q0"), g("CNOT", "q0", "q1"), g("CNOT", "q1", "q2")],
        ),
        _suite_circuit(
            ("q0", "q1", "q2"),
            [g("H", "q0"), g("H", "q1"), g("H", "q2"),
             g("U_PHASE", "q1", phase=0.7), g("CNOT", "q2", "q1"), g("H", "q1")],
        ),
        _suite_circuit(
            ("q0", "q1", "q2", "q3"),
            [g("H", "q0"), g("CNOT", "q0", "q1"), g("X", "q2"), g("CNOT", "q2", "q3")]
            + identity_train("q0", 5),
        ),
        _suite_circuit(
            ("q0", "q1"),
            identity_train("q0", 10) + [g("H", "q1"), g("CNOT", "q1", "q0")],
        ),
        _suite_circuit(
            ("q0", "q1", "q2"),
            [g("X", "q0")] + identity_train("q0", 8)
            + [g("U_PHASE", "q0", phase=-1.1), g("H", "q2"), g("CNOT", "q2", "q0")],
        ),
        _suite_circuit(
            ("q0", "q1", "q2", "q3"),
            [g("H", "q0"), g("H", "q1"), g("H", "q2"), g("X", "q3")],
        ),
        _suite_circuit(
            ("q0", "q1"),
            [g("X", "q0"), g("X", "q1"), g("CNOT", "q0", "q1"), g("CNOT", "q1", "q0")]
            + identity_train("q0", 4) + identity_train("q1", 4),
        ),
        _suite_circuit(
            ("q0", "q1", "q2"),
            [g("Y", "q1"), g("U_PHASE", "q1", phase=0.7), g("CNOT", "q1", "q2"),
             g("H", "q0"), g("CNOT", "q0", "q1"), g("Z", "q2")],
        ),
    ]
    noisy = NoiseModel(
        name="suite-noisy",
        t1_us=20.0,
        t2_us=25.0,
        p_depol_1q=0.01,
        p_depol_2q=0.05,
        readout=ReadoutModel(default=(0.02, 0.05)),
        drift=CoherentDrift(target="q0", t_osc_us=5.0),
    )
    heavy = NoiseModel(
        name="suite-heavy",
        t1_us=5.0,
        t2_us=8.0,
        p_depol_1q=0.04,
        p_depol_2q=0.12,
        readout=ReadoutModel(default=(0.08, 0.03)),
    )
    return list(zip(circuits, [noisy] * 7 + [heavy] * 3))


def test_criterion_4_trajectory_matches_density():
    worst = 0.0
    for i, (circuit, model) in enumerate(_equivalence_suite()):
        exact = exact_counts_distribution(circuit, model)
        counts = run_trajectories(circuit, model, shots=100_000, seed=1234 + i)
        worst = max(worst, total_variation_distance(counts.to_distribution(), exact))
    check(
        "10 seeded noisy circuits: trajectory sampling within TVD 0.01 of the density backend",
        worst < 0.01,
        f"worst TVD={worst:.5f}",
    )


def test_criterion_5_drift_law_and_correction():
    order = ("a", "b")
    prep = [
        Gate("X", ("b",), 90.0),
        Gate("H", ("a",), 90.0),
        Gate("CNOT", ("a", "b"), 300.0),
    ]
    model = NoiseModel(
        name="drift-only",
        t1_us=math.inf,
        t2_us=math.inf,
        p_depol_1q=0.0,
        p_depol_2q=0.0,
        drift=CoherentDrift(target="a", t_osc_us=10.0),
    )
    psi_plus = PureState.bell("psi+", order)
    psi_minus = PureState.bell("psi-", order)
    worst_law = 0.0
    worst_fix = 0.0
    for n in range(0, 223, 10):
        t_us = n * 90.0 / 1000.0
        gates = prep + identity_train("a", n)
        circuit = Circuit(qubits=order, gates=tuple(gates), name="drift")
        rho = evolve_density(circuit, model)
        law = math.sin(math.pi * t_us / (2 * 10.0)) ** 2
        worst_law = max(worst_law, abs(rho.fidelity_with_pure(psi_minus) - law))
        fixed = Circuit(
            qubits=order,
            gates=tuple(gates + [correction_gate(n * 90.0, 10.0, "a")]),
            name="drift-fixed",
        )
        rho_fixed = evolve_density(fixed, model)
        worst_fix = max(worst_fix, abs(rho_fixed.fidelity_with_pure(psi_plus) - 1.0))
    ok = worst_law <= 1e-6 and worst_fix <= 1e-9
    check(
        "coherent drift follows sin^2(pi*t/2T) to 1e-6 over 0-20us; phase fix restores 1e-9",
        ok,
        f"law err={worst_law:.2e} fix err={worst_fix:.2e}",
    )


def test_criterion_6_bundled_pack_shapes():
    start = time.perf_counter()
    graph = load_device("ibmqx4")
    noise = load_noise_model("ibmqx5-2018")
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"), shots=8192, seed=2718)
    sweep = SweepSpec("delay_us", (0.0, 1.2, 2.4, 3.6, 4.8, 6.0))
    plain = run_sdc_sweep(plan, sweep, graph, noise)
    fixed = run_sdc_sweep(
        replace(plan, mitigation=Mitigation(phase_correction=True)), sweep, graph, noise
    )
    xs = [row.x for row in plain]
    i_plain = [row.value for row in plain]
    i_fixed = [row.value for row in fixed]
    x_cross = crossing(xs, i_plain, 1.0)
    decays = all(b <= a + 0.01 for a, b in zip(i_plain, i_plain[1:]))
    shape_i = (
        1.0 < i_plain[0] <= 2.0
        and decays
        and i_plain[-1] < i_plain[0]
        and x_cross is not None
        and 1.0 <= x_cross <= 6.0
    )
    shape_ii = all(c >= p - 0.02 for c, p in zip(i_fixed, i_plain))

    swaps = SweepSpec("swaps", (0, 2, 4, 6))
    single = run_bb84_sweep(
        ExperimentPlan(protocol="bb84", qubits=("Q0", "Q1"), shots=8192, seed=2718),
        swaps, graph, noise,
    )
    dual = run_bb84_sweep(
        ExperimentPlan(
            protocol="bb84", qubits=("Q1", "Q0"), shots=8192, seed=2718,
            mitigation=Mitigation(dual_rail=True),
        ),
        swaps, graph, noise,
    )
    q_single = [row.value for row in single if row.metric == "qber_mean"]
    q_dual = [row.value for row in dual if row.metric == "qber_mean"]
    shape_iii = all(d <= s + 0.01 for d, s in zip(q_dual, q_single))

    bb = run_bb84_sweep(
        ExperimentPlan(protocol="bb84", qubits=("Q1",), shots=8192, seed=2718),
        SweepSpec("delay_us", (0.0, 1.6, 3.2, 4.8, 6.4, 8.0)), graph, noise,
    )
    kx = [row.x for row in bb if row.metric == "secret_key_bits"]
    kv = [row.value for row in bb if row.metric == "secret_key_bits"]
    k_cross = crossing(kx, kv, 0.0)
    shape_iv = k_cross is not None and 2.0 <= k_cross <= 8.0

    elapsed = time.perf_counter() - start
    ok = shape_i and shape_ii and shape_iii and shape_iv and elapsed < 120.0
    check(
        "bundled 2018 pack: I decays past 1 in 1-6us; fix-up dominates; dual-rail wins; "
        "key dies in 2-8us; <2min",
        ok,
        f"i={shape_i}(I0={i_plain[0]:.4f},x={x_cross}) ii={shape_ii} iii={shape_iii} "
        f"iv={shape_iv}(x={k_cross}) t={elapsed:.1f}s",
    )


def test_criterion_7_encoding_maps():
    table_ok = (
        sdc_encoding(SdcInput(0, 0)) == ["I", "I"]
        and sdc_encoding(SdcInput(1, 0)) == ["Z", "I"]
        and sdc_encoding(SdcInput(0, 1)) == ["X", "I"]
        and sdc_encoding(SdcInput(1, 1)) == ["X", "Z"]
    )
    targets = {
        ("+", 0): np.array([1.0, 0.0]),
        ("+", 1): np.array([0.0, 1.0]),
        ("x", 0): np.array([1.0, 1.0]) / math.sqrt(2),
        ("x", 1): np.array([1.0, -1.0]) / math.sqrt(2),
    }
    worst = 1.0
    for symbol in BB84_SYMBOLS:
        vec = np.array([1.0, 0.0], dtype=complex)
        for kind in bb84_encode_single(symbol):
            vec = gate_matrix(kind) @ vec
        worst = min(worst, abs(np.vdot(targets[(symbol.basis, symbol.bit)], vec)) ** 2)
    ok = table_ok and worst >= 1.0 - 1e-9
    check(
        "encodings: I/Z/X/XZ classical map exact; BB84 states at fidelity 1-1e-9",
        ok,
        f"table={table_ok} min fidelity={worst:.12f}",
    )


def test_criterion_8_frozen_qasm_exports():
    qx4 = load_device("ibmqx4")
    qx5 = load_device("ibmqx5")

    plan0 = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"))
    text0 = export_qasm(build_sdc_circuit(plan0, SdcInput.from_label("11"), qx4))

    base = find_path(qx5, "Q1", "Q8")
    route = plan_route(qx5, "Q1", 1, "Q0", "same", base)
    plan2 = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"), route=route)
    text2 = export_qasm(build_sdc_circuit(plan2, SdcInput.from_label("10"), qx5))

    pland = ExperimentPlan(
        protocol="bb84", qubits=("Q1", "Q0"), swap_count=2,
        mitigation=Mitigation(dual_rail=True),
    )
    textd = export_qasm(build_bb84_dualrail(pland, Bb84Symbol("x", 1), qx4))

    matches = {
        "sdc_0swap.qasm": text0 == (GOLDEN / "sdc_0swap.qasm").read_text(),
        "sdc_2swap.qasm": text2 == (GOLDEN / "sdc_2swap.qasm").read_text(),
        "bb84_dualrail.qasm": textd == (GOLDEN / "bb84_dualrail.qasm").read_text(),
    }
    check(
        "three frozen OpenQASM exports reproduce byte-exactly",
        all(matches.values()),
        f"mismatches={[k for k, v in matches.items() if not v]}",
    )


def test_cli_contract(tmp_path, capsys):
    base_args = [
        "sdc-sweep", "--delay", "0..1:0.5", "--backend", "density", "--noise", "ideal",
    ]
    first, second = tmp_path / "a", tmp_path / "b"
    rc_ok = main(base_args + ["--out", str(first)]) == 0
    rc_ok = rc_ok and main(base_args + ["--out", str(second)]) == 0
    same_csv = (first / "sdc_delay.csv").read_bytes() == (second / "sdc_delay.csv").read_bytes()
    same_png = (first / "sdc_delay.png").read_bytes() == (second / "sdc_delay.png").read_bytes()

    parser = build_parser()
    sub_action = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    helps_ok = True
    for sub in sub_action.choices.values():
        text = sub.format_help()
        for action in sub._actions:
            for option in action.option_strings:
                helps_ok = helps_ok and option in text

    try:
        main(["sdc-sweep", "--delay", "0", "--no-such-flag"])
        unknown_rc = 0
    except SystemExit as exc:
        unknown_rc = exc.code
    usage_rc = main(["sdc-sweep", "--delay", "0..6uss", "--out", str(tmp_path)])
    domain_rc = main(["replay-fixture", "table99", "--out", str(tmp_path)])
    capsys.readouterr()

    ok = (
        rc_ok
        and same_csv
        and same_png
        and helps_ok
        and unknown_rc == 2
        and usage_rc == 2
        and domain_rc == 1
    )
    check(
        "CLI: reruns byte-identical, help covers all flags, exits 0/1/2 as documented",
        ok,
        f"rc={rc_ok} csv={same_csv} png={same_png} help={helps_ok} "
        f"codes=({unknown_rc},{usage_rc},{domain_rc})",
    )
