"""Bundled measurement tables: structure, integrity hash, frozen scores."""

import pytest

from qcommbench.fixtures import (
    BB84_CELL_ORDER,
    FIXTURE_SHOTS,
    JointFixture,
    QberFixture,
    fingerprint,
    fixture_ids,
    load_fixture,
)
from qcommbench.reporting import replay_fixture

# Integrity hash of all seven tables; any edit to a single number changes it.
FINGERPRINT = "12dced2b56f4819325f0a0fa6f92c9467ee4778f3f738ef2bb3e267bdc79299f"

# [DERIVED] mutual information per axis point, frozen from an independent
# entropy implementation run over the bundled frequency blocks.
TABLE2_I = (1.378721947641, 1.093814854469, 0.791083686115,
            0.550067186135, 0.422844203262, 0.385975747795)
TABLE3_I = (1.022289324791, 0.720375243542, 0.479913181877,
            0.325612377016, 0.209683985637, 0.160020910214)
TABLE4_I = (1.034639961278, 0.888629555870, 0.730918942315,
            0.609682506333, 0.508489827236, 0.440990267149)


def test_fixture_ids_complete():
    assert fixture_ids() == tuple(f"table{i}" for i in range(1, 8))


def test_unknown_fixture_rejected():
    with pytest.raises(KeyError):
        load_fixture("table99")


def test_fingerprint_frozen():
    assert fingerprint() == FINGERPRINT


def test_joint_fixture_shapes():
    for tid in ("table1", "table2", "table3", "table4"):
        fx = load_fixture(tid)
        assert isinstance(fx, JointFixture)
        assert fx.shots == FIXTURE_SHOTS
        assert len(fx.blocks) == len(fx.axis)
        for block in fx.blocks:
            assert len(block) == 4
            for row in block:
                assert len(row) == 4
                # measured frequencies, rounded upstream to three decimals
                assert sum(row) == pytest.approx(1.0, abs=0.01)


def test_qber_fixture_shapes():
    for tid in ("table5", "table6", "table7"):
        fx = load_fixture(tid)
        assert isinstance(fx, QberFixture)
        assert set(fx.rates) == set(BB84_CELL_ORDER)
        for series in fx.rates.values():
            assert len(series) == len(fx.axis)
            assert all(0.0 <= q <= 1.0 for q in series)


def test_block_lookup():
    fx = load_fixture("table1")
    assert fx.block(0.0) == fx.blocks[0]
    with pytest.raises(KeyError):
        fx.block(1.0)


def test_mean_qber_anchors():
    t5 = load_fixture("table5")
    assert t5.mean_qber(0) == pytest.approx(0.030, abs=1e-12)
    t6 = load_fixture("table6")
    assert t6.mean_qber(3) == pytest.approx(0.13025, abs=1e-12)


def test_acceptance_fractions_only_on_table7():
    assert load_fixture("table5").accepted is None
    assert load_fixture("table6").accepted is None
    t7 = load_fixture("table7")
    assert t7.accepted is not None
    assert set(t7.accepted) == set(BB84_CELL_ORDER)
    for series in t7.accepted.values():
        assert all(0.0 < f <= 1.0 for f in series)
        # acceptance decays as the bounce count grows
        assert list(series) == sorted(series, reverse=True)


@pytest.mark.parametrize(
    "tid,frozen",
    [("table2", TABLE2_I), ("table3", TABLE3_I), ("table4", TABLE4_I)],
)
def test_replayed_mutual_information_frozen(tid, frozen):
    rows = replay_fixture(tid)
    fx = load_fixture(tid)
    assert [row.x for row in rows] == list(fx.axis)
    for row, want in zip(rows, frozen):
        assert row.metric == "mutual_information"
        assert row.backend == "fixture"
        assert row.value == pytest.approx(want, abs=1e-9)


def test_phase_corrected_session_dominates_uncorrected():
    """The recorded corrected sweep beats the drifted one at every point."""
    for corrected, drifted in zip(TABLE4_I, TABLE3_I):
        assert corrected > drifted - 1e-9
