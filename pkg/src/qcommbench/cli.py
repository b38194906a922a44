"""Command-line front end.

Subcommands::

    qcommbench sdc-sweep      superdense coding vs SWAP count or storage delay
    qcommbench bb84           BB84 (single-qubit or dual-rail) vs SWAPs or delay
    qcommbench replay-fixture score an embedded reference table
    qcommbench score          score an external counts JSON document
    qcommbench export-qasm    emit one benchmark circuit as OpenQASM 2.0

Sweep ranges use ``start..stop[:step]`` with optional ``us``/``ns`` suffixes
on delay values (``0..6us``, ``0..6us:1.2us``, ``500ns..2us:500ns``); SWAP
counts are plain even integers (``0..14:2``).  Outputs land in ``--out``,
the ``QCOMMBENCH_OUT`` environment variable, or ``./reports``; sweep and
replay commands write a PNG figure next to each CSV.  Exit codes: 0 success,
1 runtime failure, 2 usage or sweep-syntax error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from . import __version__
from .backends import CapacityError
from .circuits import export_qasm
from .fixtures import load_fixture
from .metrics import counts_to_joint, mutual_information, qber, secret_key_length
from .noise import load_noise_model
from .protocols import (
    Bb84Symbol,
    ExperimentPlan,
    Mitigation,
    SdcInput,
    build_bb84_dualrail,
    build_bb84_single,
    build_sdc_circuit,
    postselect_weights,
)
from .reporting import F_EC_DEFAULT, ReportRow, emit_csv, parse_counts, replay_fixture
from .sweeps import SweepSpec, run_bb84_sweep, run_sdc_sweep
from .topology import find_path, load_device

DEFAULT_OUT_ENV = "QCOMMBENCH_OUT"
DEFAULT_SEED = 2718
DEFAULT_SHOTS = 8192
BB84_CELL_LABELS = ("+0", "+1", "x0", "x1")


class SweepSyntaxError(ValueError):
    """Malformed sweep expression; carries the 1-based column of the problem."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


_NUM_RE = re.compile(r"\d+(?:\.\d+)?")


def _scan_number(text: str, pos: int) -> tuple[float, int]:
    m = _NUM_RE.match(text, pos)
    if not m:
        raise SweepSyntaxError("expected a number", pos + 1)
    return float(m.group()), m.end()


def _scan_unit(text: str, pos: int, axis: str) -> tuple[float | None, int]:
    for token, scale in (("us", 1.0), ("ns", 1e-3)):
        if text.startswith(token, pos):
            if axis == "swaps":
                raise SweepSyntaxError("SWAP counts take no time unit", pos + 1)
            return scale, pos + 2
    return None, pos


def parse_sweep_expr(text: str, axis: str) -> tuple[float, ...]:
    """Parse ``start..stop[:step]`` (or one bare value) into sweep values.

    Delay values are microseconds unless suffixed ``ns``; a missing delay
    step splits the range into six intervals.  SWAP values must be even
    integers and default to a step of 2.
    """
    text = text.strip()
    if not text:
        raise SweepSyntaxError("empty sweep expression", 1)

    def resolve(value: float, unit: float | None) -> float:
        return value * (unit if unit is not None else 1.0)

    start, pos = _scan_number(text, 0)
    start_col = 1
    unit, pos = _scan_unit(text, pos, axis)
    start = resolve(start, unit)
    if pos == len(text):
        values = (start,)
        _check_axis_values(values, (start_col,), axis)
        return values
    if not text.startswith("..", pos):
        raise SweepSyntaxError(f"expected '..' but found {text[pos]!r}", pos + 1)
    pos += 2
    stop_col = pos + 1
    stop, pos = _scan_number(text, pos)
    unit, pos = _scan_unit(text, pos, axis)
    stop = resolve(stop, unit)
    step = None
    step_col = None
    if pos < len(text) and text[pos] == ":":
        pos += 1
        step_col = pos + 1
        step, pos = _scan_number(text, pos)
        unit, pos = _scan_unit(text, pos, axis)
        step = resolve(step, unit)
    if pos != len(text):
        raise SweepSyntaxError(f"unexpected trailing text {text[pos:]!r}", pos + 1)
    if stop < start:
        raise SweepSyntaxError("stop is smaller than start", stop_col)
    if step is None:
        step = 2.0 if axis == "swaps" else (stop - start) / 6.0
        if step <= 0:
            return _checked_single(start, start_col, axis)
    if step <= 0:
        raise SweepSyntaxError("step must be positive", step_col)
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9:
            break
        values.append(round(v, 12))
        k += 1
    cols = tuple(start_col for _ in values)
    _check_axis_values(tuple(values), cols, axis)
    return tuple(values)


def _checked_single(value: float, col: int, axis: str) -> tuple[float, ...]:
    _check_axis_values((value,), (col,), axis)
    return (value,)


def _check_axis_values(values: tuple[float, ...], cols: tuple[int, ...], axis: str) -> None:
    if axis != "swaps":
        return
    for v, col in zip(values, cols):
        if v != int(v):
            raise SweepSyntaxError(f"SWAP count {v} is not an integer", col)
        if int(v) % 2:
            raise SweepSyntaxError(f"SWAP count {int(v)} is odd; round trips need even counts", col)


def _out_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(DEFAULT_OUT_ENV, "reports"))


def _qubit_pair(text: str) -> tuple[str, str]:
    parts = tuple(p.strip() for p in text.split(","))
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected two comma-separated qubit labels, got {text!r}")
    return parts


def _sweep_from_args(args, parser) -> SweepSpec:
    if (args.swaps is None) == (args.delay is None):
        parser.error("exactly one of --swaps or --delay is required")
    if args.swaps is not None:
        return SweepSpec("swaps", parse_sweep_expr(args.swaps, "swaps"))
    return SweepSpec("delay_us", parse_sweep_expr(args.delay, "delay_us"))


def _write_outputs(rows: list[ReportRow], stem: str, axis_name: str, args, title: str) -> None:
    out = _out_dir(args)
    csv_path = emit_csv(rows, out / f"{stem}.csv")
    print(csv_path)
    if not args.no_figure:
        from .plotting import render_rows

        png_path = render_rows(rows, out / f"{stem}.png", axis_name=axis_name, title=title)
        print(png_path)


def _cmd_sdc_sweep(args, parser) -> int:
    sweep = _sweep_from_args(args, parser)
    device_name = args.device or ("ibmqx5" if args.route != "none" else "ibmqx4")
    graph = load_device(device_name)
    noise = load_noise_model(args.noise)
    stored, payload = args.pair
    plan = ExperimentPlan(
        protocol="sdc",
        qubits=(stored, payload),
        mitigation=Mitigation(phase_correction=args.correct_phase),
        shots=args.shots,
        seed=args.seed,
    )
    base_path = None
    return_mode = "same"
    if sweep.axis == "swaps" and max(sweep.values) > 0:
        if args.route == "none":
            parser.error("a SWAP sweep needs --route upper-row or both-rows")
        base_path = find_path(graph, payload, args.route_to)
        return_mode = "alternate" if args.route == "both-rows" else "same"
    rows = run_sdc_sweep(
        plan, sweep, graph, noise, backend=args.backend, base_path=base_path, return_mode=return_mode
    )
    stem = f"sdc_{'swaps' if sweep.axis == 'swaps' else 'delay'}"
    _write_outputs(rows, stem, sweep.axis, args, title=f"superdense coding on {graph.name}")
    return 0


def _cmd_bb84(args, parser) -> int:
    sweep = _sweep_from_args(args, parser)
    graph = load_device(args.device)
    noise = load_noise_model(args.noise)
    if args.dual_rail:
        qubits = args.rails
    else:
        carrier = args.carrier or ("Q1" if sweep.axis == "delay_us" else "Q0")
        qubits = (carrier, args.partner) if sweep.axis == "swaps" else (carrier,)
        if sweep.axis == "swaps" and args.partner == carrier:
            parser.error("--partner must differ from the carrier")
    plan = ExperimentPlan(
        protocol="bb84",
        qubits=qubits,
        mitigation=Mitigation(phase_correction=args.correct_phase, dual_rail=args.dual_rail),
        shots=args.shots,
        seed=args.seed,
    )
    rows = run_bb84_sweep(plan, sweep, graph, noise, backend=args.backend, f_ec=args.f_ec)
    variant = "dualrail" if args.dual_rail else "single"
    stem = f"bb84_{variant}_{'swaps' if sweep.axis == 'swaps' else 'delay'}"
    _write_outputs(rows, stem, sweep.axis, args, title=f"BB84 ({variant}) on {graph.name}")
    return 0


def _cmd_replay_fixture(args, parser) -> int:
    rows = replay_fixture(args.table, f_ec=args.f_ec)
    fx = load_fixture(args.table)
    _write_outputs(rows, f"replay_{args.table}", fx.axis_name, args, title=f"{args.table} replay")
    return 0


def _score_rows(document, protocol: str, f_ec: float) -> list[ReportRow]:
    shots = document.shots
    if protocol == "sdc":
        missing = [c for c in ("00", "10", "01", "11") if c not in document.cells]
        if missing:
            raise ValueError(f"sdc counts document is missing cells {missing}")
        joint = counts_to_joint({c: document.cells[c] for c in ("00", "10", "01", "11")})
        return [
            ReportRow(
                x=0.0,
                metric="mutual_information",
                value=mutual_information(joint),
                shots=shots,
                backend="ingest",
            )
        ]
    missing = [c for c in BB84_CELL_LABELS if c not in document.cells]
    if missing:
        raise ValueError(f"bb84 counts document is missing cells {missing}")
    rows: list[ReportRow] = []
    qbers, fractions = [], []
    n_sifted = 0.0
    for label in BB84_CELL_LABELS:
        table = document.cells[label]
        weights = {k: float(v) for k, v in table.counts.items()}
        if protocol == "bb84-dualrail":
            weights, fraction = postselect_weights(weights)
        else:
            fraction = 1.0
        expected = int(label[1])
        q = qber(weights, expected)
        qbers.append(q)
        fractions.append(fraction)
        n_sifted += table.total() * fraction
        rows.append(
            ReportRow(
                x=0.0,
                metric=f"qber_{'plus' if label[0] == '+' else 'times'}_{expected}",
                value=q,
                shots=shots,
                accepted_fraction=fraction,
                backend="ingest",
            )
        )
    q_mean = sum(qbers) / len(qbers)
    mean_fraction = sum(fractions) / len(fractions)
    l_sec = secret_key_length(n_sifted, q_mean, f_ec)
    common = dict(x=0.0, shots=shots, accepted_fraction=mean_fraction, backend="ingest")
    rows.append(ReportRow(metric="qber_mean", value=q_mean, **common))
    rows.append(ReportRow(metric="secret_key_bits", value=l_sec, **common))
    rows.append(ReportRow(metric="secret_key_per_bit", value=l_sec / max(n_sifted, 1e-300), **common))
    return rows


def _cmd_score(args, parser) -> int:
    document = parse_counts(args.counts)
    protocol = args.protocol or document.protocol
    if protocol not in ("sdc", "bb84", "bb84-dualrail"):
        parser.error(
            "--protocol is required (sdc, bb84, bb84-dualrail) when the document does not name one"
        )
    rows = _score_rows(document, protocol, args.f_ec)
    out = _out_dir(args)
    stem = args.stem or f"score_{Path(args.counts).stem}"
    csv_path = emit_csv(rows, out / f"{stem}.csv")
    print(csv_path)
    for row in rows:
        print(f"{row.metric} = {row.value:.9f}")
    return 0


def _cmd_export_qasm(args, parser) -> int:
    graph = load_device(args.device)
    if args.swaps % 2:
        parser.error(f"--swaps must be even, got {args.swaps}")
    if args.protocol == "sdc":
        stored, payload = args.pair
        route = None
        if args.swaps:
            from .topology import plan_route

            base = find_path(graph, payload, args.route_to)
            mode = "alternate" if args.route == "both-rows" else "same"
            route = plan_route(graph, payload, args.swaps // 2, stored, mode, base)
        plan = ExperimentPlan(
            protocol="sdc", qubits=(stored, payload), route=route, delay_gates=args.delay_gates
        )
        circuit = build_sdc_circuit(plan, SdcInput.from_label(args.input), graph)
    else:
        dual = args.protocol == "bb84-dualrail"
        symbol = Bb84Symbol("+" if args.symbol[0] == "+" else "x", int(args.symbol[1]))
        if dual:
            qubits = args.rails
        else:
            qubits = (args.carrier or "Q0", args.partner)
        plan = ExperimentPlan(
            protocol="bb84",
            qubits=qubits,
            swap_count=args.swaps,
            delay_gates=args.delay_gates,
            mitigation=Mitigation(dual_rail=dual),
        )
        build = build_bb84_dualrail if dual else build_bb84_single
        circuit = build(plan, symbol, graph)
    text = export_qasm(circuit)
    if args.out_file == "-":
        sys.stdout.write(text)
    else:
        path = Path(args.out_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(path)
    return 0


def _add_common(p: argparse.ArgumentParser, device_default: str | None) -> None:
    p.add_argument("--device", default=device_default, help="bundled device name or JSON path")
    p.add_argument("--noise", default="ibmqx5-2018", help="bundled noise pack name or JSON path")
    p.add_argument("--backend", choices=("trajectory", "density"), default="trajectory")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None, help=f"output directory (default ${DEFAULT_OUT_ENV} or ./reports)")
    p.add_argument("--no-figure", action="store_true", help="skip the PNG figure")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcommbench",
        description="Noisy-simulator benchmarks for superdense coding and BB84 on device graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sdc-sweep", help="superdense coding sweep")
    p.add_argument("--swaps", help="even SWAP counts, e.g. 0..14:2")
    p.add_argument("--delay", help="storage delays, e.g. 0..6us:1.2us")
    p.add_argument("--route", choices=("none", "upper-row", "both-rows"), default="none")
    p.add_argument("--route-to", default="Q8", help="far end of the outbound walk")
    p.add_argument("--pair", type=_qubit_pair, default=("Q0", "Q1"), help="stored,travelling qubits")
    p.add_argument("--correct-phase", action="store_true", help="apply the drift phase fix-up")
    _add_common(p, device_default=None)
    p.set_defaults(func=_cmd_sdc_sweep)

    p = sub.add_parser("bb84", help="BB84 sweep (single-qubit or dual-rail)")
    p.add_argument("--swaps", help="even bounce counts, e.g. 0..6:2")
    p.add_argument("--delay", help="carrier delays, e.g. 0..6us:1.2us")
    p.add_argument("--dual-rail", action="store_true")
    p.add_argument("--carrier", default=None, help="carrier qubit (default Q0 for swaps, Q1 for delay)")
    p.add_argument("--partner", default="Q1", help="bounce partner qubit")
    p.add_argument("--rails", type=_qubit_pair, default=("Q1", "Q0"), help="dual-rail qubits r0,r1")
    p.add_argument("--correct-phase", action="store_true")
    p.add_argument("--f-ec", type=float, default=F_EC_DEFAULT, help="error-correction inefficiency")
    _add_common(p, device_default="ibmqx4")
    p.set_defaults(func=_cmd_bb84)

    p = sub.add_parser("replay-fixture", help="score an embedded reference table")
    p.add_argument("table", help="table1..table7")
    p.add_argument("--f-ec", type=float, default=F_EC_DEFAULT)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_replay_fixture)

    p = sub.add_parser("score", help="score an external counts JSON document")
    p.add_argument("--counts", required=True, help="counts document path")
    p.add_argument("--protocol", choices=("sdc", "bb84", "bb84-dualrail"), default=None)
    p.add_argument("--f-ec", type=float, default=F_EC_DEFAULT)
    p.add_argument("--stem", default=None, help="output file stem")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("export-qasm", help="emit one benchmark circuit as OpenQASM 2.0")
    p.add_argument("--protocol", choices=("sdc", "bb84", "bb84-dualrail"), required=True)
    p.add_argument("--input", default="00", help="sdc input bits")
    p.add_argument("--symbol", choices=BB84_CELL_LABELS, default="+0", help="bb84 (basis, bit) cell")
    p.add_argument("--swaps", type=int, default=0)
    p.add_argument("--delay-gates", type=int, default=0)
    p.add_argument("--route", choices=("upper-row", "both-rows"), default="upper-row")
    p.add_argument("--route-to", default="Q8")
    p.add_argument("--pair", type=_qubit_pair, default=("Q0", "Q1"))
    p.add_argument("--carrier", default=None)
    p.add_argument("--partner", default="Q1")
    p.add_argument("--rails", type=_qubit_pair, default=("Q1", "Q0"))
    p.add_argument("--device", default=None, help="bundled device name or JSON path")
    p.add_argument("--out-file", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_export_qasm)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "export-qasm" and args.device is None:
        args.device = "ibmqx5" if args.protocol == "sdc" and args.swaps else "ibmqx4"
    try:
        return args.func(args, parser)
    except SweepSyntaxError as exc:
        print(f"error: bad sweep expression: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError, CapacityError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
