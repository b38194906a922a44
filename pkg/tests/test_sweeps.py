"""Sweep runners: seed derivation, axis handling, row layout."""

from dataclasses import replace

import pytest

from qcommbench.noise import NoiseModel, ReadoutModel
from qcommbench.protocols import ExperimentPlan, Mitigation
from qcommbench.sweeps import SweepSpec, derive_cell_seed, run_bb84_sweep, run_sdc_sweep
from qcommbench.topology import find_path, load_device


@pytest.fixture(scope="module")
def qx4():
    return load_device("ibmqx4")


@pytest.fixture(scope="module")
def qx5():
    return load_device("ibmqx5")


def light_noise():
    return NoiseModel(
        name="light",
        t1_us=20.0,
        t2_us=20.0,
        p_depol_1q=0.01,
        p_depol_2q=0.02,
        readout=ReadoutModel(default=(0.01, 0.02)),
    )


def test_derive_cell_seed_is_stable_and_distinct():
    seen = set()
    for point in range(6):
        for cell in range(4):
            seed = derive_cell_seed(2718, point, cell)
            assert seed == derive_cell_seed(2718, point, cell)
            seen.add(seed)
    assert len(seen) == 24
    assert derive_cell_seed(2718, 0, 0) != derive_cell_seed(2719, 0, 0)


def test_sweep_spec_validation():
    spec = SweepSpec(axis="swaps", values=(0, 2, 4))
    assert spec.values == (0.0, 2.0, 4.0)
    with pytest.raises(ValueError):
        SweepSpec(axis="time", values=(0.0,))
    with pytest.raises(ValueError):
        SweepSpec(axis="swaps", values=())
    with pytest.raises(ValueError):
        SweepSpec(axis="delay_us", values=(-1.0,))
    with pytest.raises(ValueError):
        SweepSpec(axis="swaps", values=(3,))
    with pytest.raises(ValueError):
        SweepSpec(axis="swaps", values=(2.5,))


def test_sdc_delay_sweep_noiseless_density(qx4):
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"))
    sweep = SweepSpec(axis="delay_us", values=(0.0, 1.0))
    rows = run_sdc_sweep(plan, sweep, qx4, noise=None, backend="density")
    assert len(rows) == 2
    for row in rows:
        assert row.metric == "mutual_information"
        assert row.value == pytest.approx(2.0, abs=1e-9)
        assert row.shots == 0
        assert row.backend == "density"
        assert row.accepted_fraction == 1.0
        assert row.seed == plan.seed
    # delays snap to whole identity gates (90 ns grid)
    assert rows[0].x == pytest.approx(0.0, abs=1e-12)
    assert rows[1].x == pytest.approx(0.99, abs=1e-12)


def test_sdc_swap_sweep_noiseless_density(qx5):
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"))
    base = find_path(qx5, "Q1", "Q8")
    sweep = SweepSpec(axis="swaps", values=(0, 2, 4))
    rows = run_sdc_sweep(plan, sweep, qx5, backend="density", base_path=base)
    assert [row.x for row in rows] == [0.0, 2.0, 4.0]
    for row in rows:
        assert row.value == pytest.approx(2.0, abs=1e-9)


def test_sdc_swap_sweep_requires_base_path(qx5):
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"))
    sweep = SweepSpec(axis="swaps", values=(2,))
    with pytest.raises(ValueError):
        run_sdc_sweep(plan, sweep, qx5, backend="density")


def test_sdc_sweep_rejects_wrong_plan(qx4):
    plan = ExperimentPlan(protocol="bb84", qubits=("Q1",))
    with pytest.raises(ValueError):
        run_sdc_sweep(plan, SweepSpec("delay_us", (0.0,)), qx4, backend="density")


def test_unknown_backend_rejected(qx4):
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"))
    with pytest.raises(ValueError):
        run_sdc_sweep(plan, SweepSpec("delay_us", (0.0,)), qx4, backend="statevector")


def test_bb84_noiseless_row_layout(qx4):
    plan = ExperimentPlan(protocol="bb84", qubits=("Q1",))
    rows = run_bb84_sweep(plan, SweepSpec("delay_us", (0.0, 2.0)), qx4, backend="density")
    assert len(rows) == 14
    per_point = rows[:7]
    metrics = [row.metric for row in per_point]
    assert metrics == [
        "qber_plus_0",
        "qber_plus_1",
        "qber_times_0",
        "qber_times_1",
        "qber_mean",
        "secret_key_bits",
        "secret_key_per_bit",
    ]
    for row in per_point[:5]:
        assert row.value == pytest.approx(0.0, abs=1e-9)
    assert per_point[5].value == pytest.approx(4 * plan.shots, abs=1e-6)
    assert per_point[6].value == pytest.approx(1.0, abs=1e-9)
    for row in rows:
        assert row.accepted_fraction == pytest.approx(1.0, abs=1e-12)


def test_bb84_dualrail_noiseless_acceptance(qx4):
    plan = ExperimentPlan(
        protocol="bb84",
        qubits=("Q1", "Q0"),
        mitigation=Mitigation(dual_rail=True),
    )
    rows = run_bb84_sweep(plan, SweepSpec("swaps", (0, 2)), qx4, backend="density")
    for row in rows:
        assert row.accepted_fraction == pytest.approx(1.0, abs=1e-9)
        if row.metric.startswith("qber"):
            assert row.value == pytest.approx(0.0, abs=1e-9)


def test_bb84_sweep_rejects_wrong_plan(qx4):
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"))
    with pytest.raises(ValueError):
        run_bb84_sweep(plan, SweepSpec("swaps", (0,)), qx4, backend="density")


def test_trajectory_sweep_reproducible(qx4):
    noise = light_noise()
    plan = ExperimentPlan(protocol="sdc", qubits=("Q0", "Q1"), shots=256, seed=99)
    sweep = SweepSpec(axis="delay_us", values=(0.0, 0.5))
    first = run_sdc_sweep(plan, sweep, qx4, noise=noise, backend="trajectory")
    second = run_sdc_sweep(plan, sweep, qx4, noise=noise, backend="trajectory")
    assert first == second
    shifted = run_sdc_sweep(
        replace(plan, seed=100), sweep, qx4, noise=noise, backend="trajectory"
    )
    assert [r.value for r in shifted] != [r.value for r in first]


def test_trajectory_bb84_reproducible(qx4):
    noise = light_noise()
    plan = ExperimentPlan(protocol="bb84", qubits=("Q1",), shots=256, seed=7)
    sweep = SweepSpec(axis="delay_us", values=(1.0,))
    first = run_bb84_sweep(plan, sweep, qx4, noise=noise, backend="trajectory")
    second = run_bb84_sweep(plan, sweep, qx4, noise=noise, backend="trajectory")
    assert first == second
    assert first[0].shots == 256
    assert first[0].backend == "trajectory"
