"""qcommbench: noisy gate-level simulation benchmarks for quantum communication.

The package simulates superdense coding and BB84 on small superconducting
device graphs under a configurable noise model (depolarizing gates, T1/T2
damping, coherent phase drift, readout confusion), scores the results with
entropy metrics, and ships the reference tables it is calibrated against.
"""

from .backends import (
    DENSITY_MAX_QUBITS,
    TRAJECTORY_MAX_QUBITS,
    CapacityError,
    compile_circuit,
    evolve_density,
    exact_counts_distribution,
    measurement_distribution,
    run_trajectories,
)
from .circuits import (
    DEFAULT_DURATIONS_NS,
    GATE_KINDS,
    Circuit,
    Gate,
    decompose_swap,
    duration_of,
    emit_cnot,
    export_qasm,
    identity_train,
    parse_qasm,
)
from .fixtures import JointFixture, QberFixture, fixture_ids, load_fixture
from .metrics import (
    CountsTable,
    Distribution,
    JointDistribution,
    binary_entropy,
    conditional_entropy,
    counts_to_joint,
    mutual_information,
    qber,
    secret_key_length,
    shannon_entropy,
    total_variation_distance,
)
from .noise import (
    CoherentDrift,
    NoiseModel,
    ReadoutModel,
    correction_gate,
    damping_channel,
    depolarizing_channel,
    drift_phase,
    drift_unitary,
    list_bundled_noise_models,
    load_noise_model,
)
from .protocols import (
    BB84_SYMBOLS,
    SDC_INPUTS,
    Bb84Symbol,
    ExperimentPlan,
    Mitigation,
    PostSelectionResult,
    SdcInput,
    bb84_decode_single,
    bb84_encode_single,
    build_bb84_dualrail,
    build_bb84_single,
    build_sdc_circuit,
    dual_rail_decode,
    dual_rail_prep,
    postselect_dualrail,
    postselect_weights,
    sdc_encoding,
)
from .reporting import (
    CSV_COLUMNS,
    F_EC_DEFAULT,
    CountsDocument,
    ReportRow,
    emit_csv,
    parse_counts,
    replay_fixture,
    rows_to_csv_text,
    write_counts,
)
from .states import KrausChannel, MixedState, PureState, apply_channel, apply_unitary, partial_trace
from .sweeps import SweepSpec, derive_cell_seed, run_bb84_sweep, run_sdc_sweep
from .topology import (
    DeviceGraph,
    RoutePlan,
    alternate_return_path,
    build_swap_chain,
    find_path,
    list_bundled_devices,
    load_device,
    plan_route,
)

__version__ = "0.1.0"

__all__ = [
    "BB84_SYMBOLS",
    "CSV_COLUMNS",
    "CapacityError",
    "Circuit",
    "CoherentDrift",
    "CountsDocument",
    "CountsTable",
    "DEFAULT_DURATIONS_NS",
    "DENSITY_MAX_QUBITS",
    "DeviceGraph",
    "Distribution",
    "ExperimentPlan",
    "F_EC_DEFAULT",
    "GATE_KINDS",
    "Gate",
    "JointDistribution",
    "JointFixture",
    "KrausChannel",
    "Mitigation",
    "MixedState",
    "NoiseModel",
    "PostSelectionResult",
    "PureState",
    "QberFixture",
    "ReadoutModel",
    "ReportRow",
    "RoutePlan",
    "SDC_INPUTS",
    "SdcInput",
    "Bb84Symbol",
    "SweepSpec",
    "TRAJECTORY_MAX_QUBITS",
    "alternate_return_path",
    "apply_channel",
    "apply_unitary",
    "bb84_decode_single",
    "bb84_encode_single",
    "binary_entropy",
    "build_bb84_dualrail",
    "build_bb84_single",
    "build_sdc_circuit",
    "build_swap_chain",
    "compile_circuit",
    "conditional_entropy",
    "correction_gate",
    "counts_to_joint",
    "damping_channel",
    "decompose_swap",
    "depolarizing_channel",
    "derive_cell_seed",
    "drift_phase",
    "drift_unitary",
    "dual_rail_decode",
    "dual_rail_prep",
    "duration_of",
    "emit_cnot",
    "emit_csv",
    "evolve_density",
    "exact_counts_distribution",
    "export_qasm",
    "find_path",
    "fixture_ids",
    "identity_train",
    "list_bundled_devices",
    "list_bundled_noise_models",
    "load_device",
    "load_fixture",
    "load_noise_model",
    "measurement_distribution",
    "mutual_information",
    "parse_counts",
    "parse_qasm",
    "partial_trace",
    "plan_route",
    "postselect_dualrail",
    "postselect_weights",
    "qber",
    "replay_fixture",
    "rows_to_csv_text",
    "run_bb84_sweep",
    "run_sdc_sweep",
    "run_trajectories",
    "sdc_encoding",
    "secret_key_length",
    "shannon_entropy",
    "total_variation_distance",
    "write_counts",
]
