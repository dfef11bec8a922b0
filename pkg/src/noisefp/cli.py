"""Command line for the whole pipeline, one subcommand per stage.

    circuit    print or export the testbed circuit and its step plan
    acquire    run a measurement campaign against a device file -> JSONL
    dataset    build a labeled CSV dataset from record files
    train      split a dataset, run model selection, write a report
    report     render a report JSON as a table (plain text or CSV)
    reproduce  run a named pinned-seed benchmark end to end

Every subcommand is a pure function of its flags and input files.  Exit
codes: 0 success, 2 usage, 3 malformed or insufficient data, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .acquisition import Campaign, export_records, import_records, run_campaign
from .circuit import build_testbed, step_plan
from .dataset import (build_machine_dataset, build_timeseries_dataset, load_csv,
                      save_csv, split, take)
from .errors import DataFormatError, InvalidArgumentError, NumericError
from .reproduce import (load_config, load_packaged_config, packaged_config_names,
                        run_benchmark, write_report)
from .simulator import load_device
from .svm import default_candidates, model_select, save_model

USAGE_EXIT = 2
DATA_EXIT = 3
NUMERIC_EXIT = 4


def _steps_type(text: str) -> tuple[int, ...]:
    """Parse "1..9" / "1,3,5" / mixes of both into a step tuple."""
    steps: list[int] = []
    try:
        for token in text.split(","):
            token = token.strip()
            if ".." in token:
                lo, hi = token.split("..", 1)
                steps.extend(range(int(lo), int(hi) + 1))
            else:
                steps.append(int(token))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse steps {text!r}") from None
    if not steps:
        raise argparse.ArgumentTypeError(f"no steps in {text!r}")
    if any(s < 1 for s in steps):
        raise argparse.ArgumentTypeError(f"steps must be >= 1, got {steps}")
    if len(set(steps)) != len(steps):
        raise argparse.ArgumentTypeError(f"duplicate steps in {text!r}")
    return tuple(steps)


def _fractions_type(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse fractions {text!r}") from None
    if len(parts) != 3 or any(f <= 0 for f in parts):
        raise argparse.ArgumentTypeError("need 3 positive train,val,test fractions")
    if abs(sum(parts) - 1.0) > 1e-9:
        raise argparse.ArgumentTypeError(f"fractions must sum to 1, got {sum(parts)}")
    return parts  # type: ignore[return-value]


def _floats_type(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse float list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty float list")
    return values


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_circuit(args) -> int:
    circuit = build_testbed(args.repetitions)
    plan = step_plan(args.repetitions)
    if args.json:
        text = json.dumps(circuit.to_json_dict(), indent=2) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        print(f"testbed: {circuit.n_qubits} qubits, {len(circuit.gates)} gates, "
              f"repetitions={args.repetitions}, "
              f"measured qubits {circuit.measured_qubits}")
        for index, gate in enumerate(circuit.gates, start=1):
            operands = " ".join(str(q) for q in gate.qubits)
            print(f"{index:3d}  {gate.kind.value:<8} {operands}")
        if args.diagram:
            print(circuit.diagram())
    if args.plan:
        print(f"cut points: {list(plan.cut_points)}")
    return 0


def cmd_acquire(args) -> int:
    device = load_device(args.device)
    campaign = Campaign(
        mode=args.mode,
        device=device,
        n_runs=args.runs,
        repetitions=args.repetitions,
        parallelism=args.parallelism,
        batch_shots=args.batch_shots,
        sub_batch=args.sub_batch,
        interval_minutes=args.interval_minutes,
        fast_spacing_minutes=args.fast_spacing_minutes,
    )
    records = run_campaign(campaign)
    export_records(records, args.out)
    print(f"wrote {len(records)} records for device {device.name!r} to {args.out}")
    return 0


def cmd_dataset_build(args) -> int:
    records = []
    for path in args.records:
        records.extend(import_records(path))
    if args.windows is not None:
        dataset, skipped = build_timeseries_dataset(records, args.steps, args.windows)
    else:
        by_device: dict[str, list] = {}
        for record in records:
            by_device.setdefault(record.device_name, []).append(record)
        dataset, skipped = build_machine_dataset(by_device, args.steps)
    provenance = {
        "source": "noisefp dataset build",
        "records": list(args.records),
        "steps": list(dataset.steps_used),
    }
    if args.windows is not None:
        provenance["windows"] = args.windows
    save_csv(dataset, args.out, provenance=provenance)
    print(f"wrote {dataset.n_examples} examples "
          f"({dataset.features.shape[1]} features, "
          f"classes {list(dataset.class_names)}) to {args.out}; "
          f"skipped {skipped} incomplete group(s)")
    return 0


def cmd_train(args) -> int:
    dataset = load_csv(args.dataset)
    parts = split(dataset, fractions=args.fractions, seed=args.seed)
    candidates = default_candidates(dataset.features.shape[1], args.c_grid,
                                    args.rbf_gammas)
    report = model_select(
        take(dataset, parts.train),
        take(dataset, parts.validation),
        take(dataset, parts.test),
        candidates=candidates,
        multiclass=args.multiclass,
        tol=args.tol,
        max_passes=args.max_passes,
    )
    obj = report.to_json_dict()
    obj["dataset"] = args.dataset
    obj["split"] = {
        "fractions": list(args.fractions),
        "seed": args.seed,
        "sizes": {"train": int(parts.train.size),
                  "validation": int(parts.validation.size),
                  "test": int(parts.test.size)},
    }
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    if args.model:
        save_model(report.chosen_model, args.model)
    print(f"chosen: {report.chosen.name}  "
          f"val={report.chosen.val_accuracy:.4f}  "
          f"test={report.test_accuracy:.4f}  ({report.class_strategy}, "
          f"{report.n_classes} classes)")
    return 0


def _candidate_table(candidates: list, chosen_name: str, test_accuracy) -> list[list[str]]:
    rows = [["candidate", "val_accuracy", "converged", "chosen", "test_accuracy"]]
    for entry in candidates:
        chosen = entry["name"] == chosen_name
        val = entry.get("val_accuracy")
        conv = entry.get("converged")
        rows.append([
            str(entry["name"]),
            "" if val is None else repr(float(val)),
            "" if conv is None else ("1" if conv else "0"),
            "1" if chosen else "0",
            repr(float(test_accuracy)) if chosen else "",
        ])
    return rows


def _report_rows(obj: dict, where: str) -> list[list[str]]:
    kind = obj.get("kind") or obj.get("type")
    if kind in ("selection", "machine"):
        chosen = obj["chosen_name"] if kind == "selection" else obj["chosen"]
        return _candidate_table(obj["candidates"], chosen, obj["test_accuracy"])
    if kind == "steps-curve":
        rows = [["T", "steps", "chosen", "val_accuracy", "test_accuracy"]]
        for entry in obj["rows"]:
            rows.append([
                str(entry["T"]),
                " ".join(str(s) for s in entry["steps"]),
                str(entry["chosen"]),
                repr(float(entry["val_accuracy"])),
                repr(float(entry["test_accuracy"])),
            ])
        return rows
    if kind == "timeseries":
        rows = [["case", "chosen", "val_accuracy", "test_accuracy", "test_size"]]
        for entry in obj["cases"]:
            rows.append([
                str(entry["case"]),
                str(entry["chosen"]),
                repr(float(entry["val_accuracy"])),
                repr(float(entry["test_accuracy"])),
                str(entry["test_size"]),
            ])
        return rows
    raise DataFormatError(f"{where}: unknown report kind {kind!r}")


def _render_text(rows: list[list[str]]) -> str:
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read report {args.report}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{args.report}: report JSON does not parse: {exc}") from exc
    if not isinstance(obj, dict):
        raise DataFormatError(f"{args.report}: expected a JSON object")
    try:
        rows = _report_rows(obj, args.report)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{args.report}: malformed report: {exc}") from exc
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    else:
        text = _render_text(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_reproduce(args) -> int:
    if (args.name is None) == (args.config is None):
        print("noisefp reproduce: give exactly one of a benchmark name or --config",
              file=sys.stderr)
        return USAGE_EXIT
    if args.name is not None:
        names = packaged_config_names()
        if args.name not in names:
            print(f"noisefp reproduce: unknown benchmark {args.name!r}; "
                  f"available: {', '.join(names)}", file=sys.stderr)
            return USAGE_EXIT
        config = load_packaged_config(args.name)
    else:
        config = load_config(args.config)
    report = run_benchmark(config)
    json_path, csv_path = write_report(report, args.out_dir)
    sys.stdout.write(_render_text(report.csv_rows))
    print(f"wrote {json_path} and {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisefp",
        description="Noise-fingerprint pipeline: simulate noisy devices, "
                    "sample measurement campaigns, train kernel SVMs.",
    )
    parser.add_argument("--version", action="version", version=f"noisefp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("circuit", help="print or export the testbed circuit")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--plan", action="store_true", help="also print the cut points")
    p.add_argument("--diagram", action="store_true", help="also print an ASCII diagram")
    p.add_argument("--json", action="store_true", help="emit circuit JSON instead of text")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("acquire", help="run a measurement campaign")
    p.add_argument("--device", required=True, help="device JSON file")
    p.add_argument("--mode", choices=["fast", "slow"], required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--parallelism", type=int, default=20)
    p.add_argument("--batch-shots", type=int, default=8000)
    p.add_argument("--sub-batch", type=int, default=1000)
    p.add_argument("--interval-minutes", type=float, default=2.0)
    p.add_argument("--fast-spacing-minutes", type=float, default=0.5)
    p.set_defaults(func=cmd_acquire)

    p = sub.add_parser("dataset", help="dataset operations")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    b = dsub.add_parser("build", help="build a labeled CSV dataset from records")
    b.add_argument("--records", action="append", required=True,
                   help="JSONL record file (repeatable)")
    b.add_argument("--steps", type=_steps_type, required=True,
                   help="steps to featurize, e.g. 1..9 or 1,3,5")
    b.add_argument("--out", required=True, help="output CSV path")
    b.add_argument("--windows", type=int,
                   help="label by time window instead of device (single device)")
    b.set_defaults(func=cmd_dataset_build)

    p = sub.add_parser("train", help="split a dataset and run model selection")
    p.add_argument("--dataset", required=True, help="dataset CSV path")
    p.add_argument("--report", required=True, help="selection report JSON to write")
    p.add_argument("--model", help="also save the chosen model JSON here")
    p.add_argument("--seed", type=int, default=0, help="split shuffle seed")
    p.add_argument("--fractions", type=_fractions_type, default=(0.5, 0.25, 0.25),
                   help="train,val,test fractions (default 0.5,0.25,0.25)")
    p.add_argument("--multiclass", choices=["ovo", "ova"], default="ovo")
    p.add_argument("--c-grid", type=_floats_type, default=(0.1, 1.0, 10.0, 100.0),
                   help="comma-separated C values")
    p.add_argument("--rbf-gammas", type=_floats_type, default=None,
                   help="comma-separated RBF gamma values")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-passes", type=int, default=100)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("report", help="render a report JSON as a table")
    p.add_argument("--report", required=True, help="report JSON path")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("reproduce", help="run a named pinned-seed benchmark")
    p.add_argument("name", nargs="?",
                   help="one of: two-device, multi-device, time-drift, steps-curve")
    p.add_argument("--config", help="run a custom pipeline config JSON instead")
    p.add_argument("--out-dir", default=".", help="where report.json/report.csv go")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, InvalidArgumentError) as exc:
        print(f"noisefp: data error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except NumericError as exc:
        print(f"noisefp: numeric error: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    except OSError as exc:
        print(f"noisefp: data error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
