"""Named end-to-end benchmark runs with pinned seeds and stable reports.

A benchmark is a PipelineConfig: virtual devices, one campaign shape, the
measurement steps to featurize, a split, and an SVM candidate grid.  Running
one produces a summary dict (written as report.json) and a CSV table
(report.csv).  Everything downstream of the config is deterministic, so
reruns emit byte-identical files; the shipped configs under
``noisefp/configs/`` are the ones the test suite pins its thresholds to.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from importlib import resources

from .acquisition import Campaign, run_campaign
from .dataset import build_machine_dataset, build_timeseries_dataset, split, take
from .errors import DataFormatError, InvalidArgumentError
from .simulator import VirtualDevice, load_device
from .svm import (DEFAULT_C_GRID, DEFAULT_MAX_PASSES, DEFAULT_TOL,
                  SelectionReport, default_candidates, model_select)

MACHINE = "machine"
TIMESERIES = "timeseries"
STEPS_CURVE = "steps-curve"
KINDS = (MACHINE, TIMESERIES, STEPS_CURVE)


def _take_keys(obj: dict, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise DataFormatError(f"{where}: expected a JSON object")
    missing = required - obj.keys()
    if missing:
        raise DataFormatError(f"{where}: missing keys {sorted(missing)}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise DataFormatError(f"{where}: unknown keys {sorted(unknown)}")


@dataclass(frozen=True)
class CampaignSpec:
    """Campaign shape shared by every device of a benchmark."""

    mode: str
    n_runs: int
    repetitions: int = 3
    parallelism: int = 20
    batch_shots: int = 8000
    sub_batch: int = 1000
    interval_minutes: float = 2.0
    fast_spacing_minutes: float = 0.5

    def build(self, device: VirtualDevice) -> Campaign:
        return Campaign(
            mode=self.mode,
            device=device,
            n_runs=self.n_runs,
            repetitions=self.repetitions,
            parallelism=self.parallelism,
            batch_shots=self.batch_shots,
            sub_batch=self.sub_batch,
            interval_minutes=self.interval_minutes,
            fast_spacing_minutes=self.fast_spacing_minutes,
        )

    @classmethod
    def from_json_dict(cls, obj: dict, where: str) -> "CampaignSpec":
        _take_keys(obj, {"mode", "n_runs"},
                   {"repetitions", "parallelism", "batch_shots", "sub_batch",
                    "interval_minutes", "fast_spacing_minutes"}, where)
        try:
            return cls(
                mode=str(obj["mode"]),
                n_runs=int(obj["n_runs"]),
                repetitions=int(obj.get("repetitions", 3)),
                parallelism=int(obj.get("parallelism", 20)),
                batch_shots=int(obj.get("batch_shots", 8000)),
                sub_batch=int(obj.get("sub_batch", 1000)),
                interval_minutes=float(obj.get("interval_minutes", 2.0)),
                fast_spacing_minutes=float(obj.get("fast_spacing_minutes", 0.5)),
            )
        except (TypeError, ValueError) as exc:
            raise DataFormatError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class SvmSpec:
    """Candidate-grid knobs for model selection."""

    multiclass: str = "ovo"
    c_grid: tuple[float, ...] = DEFAULT_C_GRID
    rbf_gammas: tuple[float, ...] | None = None
    tol: float = DEFAULT_TOL
    max_passes: int = DEFAULT_MAX_PASSES

    def candidates(self, n_features: int):
        return default_candidates(n_features, self.c_grid, self.rbf_gammas)

    @classmethod
    def from_json_dict(cls, obj: dict, where: str) -> "SvmSpec":
        _take_keys(obj, set(),
                   {"multiclass", "c_grid", "rbf_gammas", "tol", "max_passes"}, where)
        try:
            gammas = obj.get("rbf_gammas")
            return cls(
                multiclass=str(obj.get("multiclass", "ovo")),
                c_grid=tuple(float(c) for c in obj.get("c_grid", DEFAULT_C_GRID)),
                rbf_gammas=None if gammas is None else tuple(float(g) for g in gammas),
                tol=float(obj.get("tol", DEFAULT_TOL)),
                max_passes=int(obj.get("max_passes", DEFAULT_MAX_PASSES)),
            )
        except (TypeError, ValueError) as exc:
            raise DataFormatError(f"{where}: {exc}") from exc


def _device_from_entry(entry, base_dir: str, where: str) -> VirtualDevice:
    if isinstance(entry, str):
        path = entry if os.path.isabs(entry) else os.path.join(base_dir, entry)
        return load_device(path)
    if isinstance(entry, dict):
        try:
            return VirtualDevice.from_json_dict(entry)
        except InvalidArgumentError as exc:
            raise DataFormatError(f"{where}: {exc}") from exc
    raise DataFormatError(f"{where}: device entry must be an object or a file path")


@dataclass(frozen=True)
class PipelineConfig:
    """One named benchmark: devices + campaign + featurization + selection.

    ``machine`` and ``steps-curve`` label examples by device and need two or
    more of them; ``timeseries`` takes exactly one device (plus an optional
    zero-drift control) and labels by time window.  The split seed must be
    spelled out in the config so runs never depend on ambient state.
    """

    name: str
    kind: str
    devices: tuple[VirtualDevice, ...]
    campaign: CampaignSpec
    steps: tuple[int, ...]
    split_fractions: tuple[float, float, float]
    split_seed: int
    svm: SvmSpec = SvmSpec()
    windows: int | None = None
    control_device: VirtualDevice | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == TIMESERIES:
            if len(self.devices) != 1:
                raise InvalidArgumentError(
                    f"timeseries benchmarks take exactly 1 device, got {len(self.devices)}"
                )
            if self.windows is None or self.windows < 2:
                raise InvalidArgumentError("timeseries benchmarks need windows >= 2")
        else:
            if len(self.devices) < 2:
                raise InvalidArgumentError(
                    f"{self.kind} benchmarks need >= 2 devices, got {len(self.devices)}"
                )
            if self.windows is not None:
                raise InvalidArgumentError(f"windows only applies to {TIMESERIES!r}")
            if self.control_device is not None:
                raise InvalidArgumentError(f"control_device only applies to {TIMESERIES!r}")
        names = [d.name for d in self.devices]
        if len(set(names)) != len(names):
            raise InvalidArgumentError(f"duplicate device names: {names}")

    @classmethod
    def from_json_dict(cls, obj: dict, base_dir: str = ".") -> "PipelineConfig":
        _take_keys(obj, {"name", "kind", "devices", "campaign", "steps", "split"},
                   {"svm", "windows", "control_device"}, "config")
        devices_obj = obj["devices"]
        if not isinstance(devices_obj, list) or not devices_obj:
            raise DataFormatError("config: devices must be a non-empty list")
        devices = tuple(
            _device_from_entry(entry, base_dir, f"config devices[{i}]")
            for i, entry in enumerate(devices_obj)
        )
        split_obj = obj["split"]
        _take_keys(split_obj, {"seed"}, {"fractions"}, "config split")
        control = obj.get("control_device")
        try:
            fractions = tuple(
                float(f) for f in split_obj.get("fractions", (0.5, 0.25, 0.25))
            )
            config = cls(
                name=str(obj["name"]),
                kind=str(obj["kind"]),
                devices=devices,
                campaign=CampaignSpec.from_json_dict(obj["campaign"], "config campaign"),
                steps=tuple(int(s) for s in obj["steps"]),
                split_fractions=fractions,  # type: ignore[arg-type]
                split_seed=int(split_obj["seed"]),
                svm=SvmSpec.from_json_dict(obj.get("svm", {}), "config svm"),
                windows=None if obj.get("windows") is None else int(obj["windows"]),
                control_device=None if control is None else _device_from_entry(
                    control, base_dir, "config control_device"
                ),
            )
        except InvalidArgumentError as exc:
            raise DataFormatError(f"config: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise DataFormatError(f"config: {exc}") from exc
        return config


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: config JSON does not parse: {exc}") from exc
    return PipelineConfig.from_json_dict(obj, base_dir=os.path.dirname(path) or ".")


def packaged_config_names() -> tuple[str, ...]:
    root = resources.files("noisefp").joinpath("configs")
    return tuple(sorted(
        entry.name[:-len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    ))


def load_packaged_config(name: str) -> PipelineConfig:
    entry = resources.files("noisefp").joinpath("configs", f"{name}.json")
    try:
        text = entry.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise InvalidArgumentError(
            f"unknown benchmark {name!r}; available: {', '.join(packaged_config_names())}"
        ) from exc
    return PipelineConfig.from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Benchmark runners
# ---------------------------------------------------------------------------


@dataclass
class BenchmarkReport:
    """report.json content plus the rows of report.csv (header first)."""

    summary: dict
    csv_rows: list[list[str]]

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(self.csv_rows)
        return buf.getvalue()

    def json_text(self) -> str:
        return json.dumps(self.summary, indent=2) + "\n"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _candidate_rows(report: SelectionReport) -> list[list[str]]:
    rows = [["candidate", "val_accuracy", "converged", "chosen", "test_accuracy"]]
    for idx, result in enumerate(report.results):
        chosen = idx == report.chosen_index
        rows.append([
            result.name,
            _fmt(result.val_accuracy),
            _fmt(result.converged),
            _fmt(chosen),
            _fmt(report.test_accuracy if chosen else None),
        ])
    return rows


def _select_on(dataset, config: PipelineConfig) -> tuple[SelectionReport, dict]:
    parts = split(dataset, fractions=config.split_fractions, seed=config.split_seed)
    report = model_select(
        take(dataset, parts.train),
        take(dataset, parts.validation),
        take(dataset, parts.test),
        candidates=config.svm.candidates(dataset.features.shape[1]),
        multiclass=config.svm.multiclass,
        tol=config.svm.tol,
        max_passes=config.svm.max_passes,
    )
    sizes = {
        "train": int(parts.train.size),
        "validation": int(parts.validation.size),
        "test": int(parts.test.size),
    }
    return report, sizes


def _run_machine(config: PipelineConfig) -> BenchmarkReport:
    records = {
        device.name: run_campaign(config.campaign.build(device))
        for device in config.devices
    }
    dataset, skipped = build_machine_dataset(records, config.steps)
    report, sizes = _select_on(dataset, config)
    summary = {
        "benchmark": config.name,
        "kind": MACHINE,
        "devices": [d.to_json_dict() for d in config.devices],
        "steps": list(dataset.steps_used),
        "n_examples": dataset.n_examples,
        "class_counts": dataset.class_counts().tolist(),
        "skipped_groups": skipped,
        "split": {"fractions": list(config.split_fractions),
                  "seed": config.split_seed, "sizes": sizes},
        "class_strategy": report.class_strategy,
        "chosen": report.chosen.name,
        "val_accuracy": report.chosen.val_accuracy,
        "test_accuracy": report.test_accuracy,
        "candidates": [r.to_json_dict() for r in report.results],
    }
    return BenchmarkReport(summary=summary, csv_rows=_candidate_rows(report))


def _run_steps_curve(config: PipelineConfig) -> BenchmarkReport:
    records = {
        device.name: run_campaign(config.campaign.build(device))
        for device in config.devices
    }
    rows = [["T", "steps", "chosen", "val_accuracy", "test_accuracy"]]
    entries = []
    for t in range(1, len(config.steps) + 1):
        steps = config.steps[:t]
        dataset, _ = build_machine_dataset(records, steps)
        report, _ = _select_on(dataset, config)
        entries.append({
            "T": t,
            "steps": list(steps),
            "chosen": report.chosen.name,
            "val_accuracy": report.chosen.val_accuracy,
            "test_accuracy": report.test_accuracy,
        })
        rows.append([
            str(t),
            " ".join(str(s) for s in steps),
            report.chosen.name,
            _fmt(report.chosen.val_accuracy),
            _fmt(report.test_accuracy),
        ])
    summary = {
        "benchmark": config.name,
        "kind": STEPS_CURVE,
        "devices": [d.to_json_dict() for d in config.devices],
        "split": {"fractions": list(config.split_fractions), "seed": config.split_seed},
        "rows": entries,
    }
    return BenchmarkReport(summary=summary, csv_rows=rows)


def _run_timeseries(config: PipelineConfig) -> BenchmarkReport:
    cases = [("drift", config.devices[0])]
    if config.control_device is not None:
        cases.append(("control", config.control_device))
    rows = [["case", "chosen", "val_accuracy", "test_accuracy", "test_size"]]
    entries = []
    for tag, device in cases:
        records = run_campaign(config.campaign.build(device))
        dataset, skipped = build_timeseries_dataset(records, config.steps,
                                                    config.windows)
        report, sizes = _select_on(dataset, config)
        entries.append({
            "case": tag,
            "device": device.to_json_dict(),
            "n_examples": dataset.n_examples,
            "class_counts": dataset.class_counts().tolist(),
            "skipped_groups": skipped,
            "chosen": report.chosen.name,
            "val_accuracy": report.chosen.val_accuracy,
            "test_accuracy": report.test_accuracy,
            "test_size": sizes["test"],
        })
        rows.append([
            tag,
            report.chosen.name,
            _fmt(report.chosen.val_accuracy),
            _fmt(report.test_accuracy),
            str(sizes["test"]),
        ])
    summary = {
        "benchmark": config.name,
        "kind": TIMESERIES,
        "windows": config.windows,
        "steps": list(config.steps),
        "split": {"fractions": list(config.split_fractions), "seed": config.split_seed},
        "cases": entries,
    }
    return BenchmarkReport(summary=summary, csv_rows=rows)


_RUNNERS = {
    MACHINE: _run_machine,
    STEPS_CURVE: _run_steps_curve,
    TIMESERIES: _run_timeseries,
}


def run_benchmark(config: PipelineConfig) -> BenchmarkReport:
    return _RUNNERS[config.kind](config)


def write_report(report: BenchmarkReport, out_dir: str) -> tuple[str, str]:
    """Write report.json and report.csv under out_dir; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, "report.json")
    csv_path = os.path.join(out_dir, "report.csv")
    with open(json_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report.json_text())
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report.csv_text())
    return json_path, csv_path
