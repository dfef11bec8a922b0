"""Measurement campaigns against virtual devices, and their JSONL archive.

Two scheduling modes:

* FAST: runs are dispatched across ``parallelism`` logical lanes; every lane
  slot takes ``fast_spacing_minutes``, so run k starts at
  (k // parallelism) * spacing.  Each run samples ``batch_shots`` shots per
  measurement step and splits them into ``batch_shots / sub_batch`` records.
* SLOW: one run at a time, ``interval_minutes`` apart, one ``sub_batch``-shot
  record per step.

Lanes are deterministic bookkeeping, not OS concurrency: every record's
sample stream is seeded by (device seed, run index, step index), so the
record list is a pure function of the campaign and identical across reruns
regardless of how the work would be scheduled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import build_testbed, step_plan
from .errors import DataFormatError, InvalidArgumentError
from .simulator import VirtualDevice, outcome_labels, sample_counts, step_distributions

FAST = "fast"
SLOW = "slow"


@dataclass
class RunRecord:
    """Counts of one batch of shots at one measurement step.

    ``counts`` maps every outcome label to its shot count (zeros included);
    the values sum to ``shots``.  ``step_index`` is 1-based within the
    device's step plan.
    """

    device_name: str
    step_index: int
    t_hours: float
    shots: int
    counts: dict[str, int]


def validate_record(record: RunRecord, n_steps: int | None = None) -> None:
    if not record.device_name:
        raise InvalidArgumentError("record has empty device name")
    if record.step_index < 1:
        raise InvalidArgumentError(f"step_index must be >= 1, got {record.step_index}")
    if n_steps is not None and record.step_index > n_steps:
        raise InvalidArgumentError(
            f"step_index {record.step_index} exceeds plan length {n_steps}"
        )
    if record.t_hours < 0:
        raise InvalidArgumentError(f"t_hours must be >= 0, got {record.t_hours}")
    if record.shots < 1:
        raise InvalidArgumentError(f"shots must be >= 1, got {record.shots}")
    if not record.counts:
        raise InvalidArgumentError("record has no counts")
    widths = {len(k) for k in record.counts}
    if len(widths) != 1:
        raise InvalidArgumentError(f"outcome labels have mixed widths: {sorted(record.counts)}")
    width = widths.pop()
    valid = set(outcome_labels(width))
    for label, count in record.counts.items():
        if label not in valid:
            raise InvalidArgumentError(f"invalid outcome label {label!r}")
        if not isinstance(count, int) or isinstance(count, bool) or count < 0:
            raise InvalidArgumentError(f"count for {label!r} must be a non-negative int")
    total = sum(record.counts.values())
    if total != record.shots:
        raise InvalidArgumentError(f"counts sum to {total}, expected shots={record.shots}")


@dataclass
class Campaign:
    """A measurement campaign: which device, how often, how many shots."""

    mode: str
    device: VirtualDevice
    n_runs: int
    repetitions: int = 3
    parallelism: int = 20
    batch_shots: int = 8000
    sub_batch: int = 1000
    interval_minutes: float = 2.0
    fast_spacing_minutes: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in (FAST, SLOW):
            raise InvalidArgumentError(f"mode must be '{FAST}' or '{SLOW}', got {self.mode!r}")
        if self.n_runs < 1:
            raise InvalidArgumentError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.repetitions < 1:
            raise InvalidArgumentError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.parallelism < 1:
            raise InvalidArgumentError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.sub_batch < 1:
            raise InvalidArgumentError(f"sub_batch must be >= 1, got {self.sub_batch}")
        if self.batch_shots < 1:
            raise InvalidArgumentError(f"batch_shots must be >= 1, got {self.batch_shots}")
        if self.mode == FAST and self.batch_shots % self.sub_batch != 0:
            raise InvalidArgumentError(
                f"batch_shots={self.batch_shots} is not divisible by sub_batch={self.sub_batch}"
            )
        if self.interval_minutes < 0 or self.fast_spacing_minutes < 0:
            raise InvalidArgumentError("campaign time spacings must be >= 0")


def record_stream(device_seed: int, run_index: int, step_index: int) -> np.random.Generator:
    """The sampling stream owned by one (run, step) cell of a campaign."""
    return np.random.default_rng([device_seed, run_index, step_index])


class _StepDistributionCache:
    """Memoizes per-step distributions keyed by the drift-resolved parameters.

    Without drift every run shares one evolution; with drift each distinct
    timestamp pays for its own pass.
    """

    def __init__(self, campaign: Campaign):
        self.circuit = build_testbed(campaign.repetitions)
        self.plan = step_plan(campaign.repetitions)
        self.noise = campaign.device.noise
        self._cache: dict[tuple[float, ...], list[np.ndarray]] = {}

    def at(self, t_hours: float) -> list[np.ndarray]:
        key = self.noise.resolved_key(self.circuit.n_qubits, t_hours)
        if key not in self._cache:
            self._cache[key] = step_distributions(
                self.circuit, self.plan, self.noise, t_hours
            )
        return self._cache[key]


def _sample_step_records(campaign: Campaign, run: int, t_hours: float,
                         dists: list[np.ndarray], per_record_shots: int,
                         n_records: int) -> Iterable[RunRecord]:
    for step_ordinal, dist in enumerate(dists, start=1):
        rng = record_stream(campaign.device.seed, run, step_ordinal)
        for _ in range(n_records):
            counts = sample_counts(dist, per_record_shots, rng)
            yield RunRecord(
                device_name=campaign.device.name,
                step_index=step_ordinal,
                t_hours=t_hours,
                shots=per_record_shots,
                counts=counts,
            )


def run_fast(campaign: Campaign) -> list[RunRecord]:
    """All records of a FAST campaign in (run, step, sub-batch) order."""
    if campaign.mode != FAST:
        raise InvalidArgumentError(f"run_fast needs a '{FAST}' campaign, got {campaign.mode!r}")
    cache = _StepDistributionCache(campaign)
    n_sub = campaign.batch_shots // campaign.sub_batch
    records: list[RunRecord] = []
    for run in range(campaign.n_runs):
        t_hours = (run // campaign.parallelism) * campaign.fast_spacing_minutes / 60.0
        dists = cache.at(t_hours)
        records.extend(
            _sample_step_records(campaign, run, t_hours, dists, campaign.sub_batch, n_sub)
        )
    return records


def run_slow(campaign: Campaign) -> list[RunRecord]:
    """All records of a SLOW campaign in (run, step) order."""
    if campaign.mode != SLOW:
        raise InvalidArgumentError(f"run_slow needs a '{SLOW}' campaign, got {campaign.mode!r}")
    cache = _StepDistributionCache(campaign)
    records: list[RunRecord] = []
    for run in range(campaign.n_runs):
        t_hours = run * campaign.interval_minutes / 60.0
        dists = cache.at(t_hours)
        records.extend(
            _sample_step_records(campaign, run, t_hours, dists, campaign.sub_batch, 1)
        )
    return records


def run_campaign(campaign: Campaign) -> list[RunRecord]:
    return run_fast(campaign) if campaign.mode == FAST else run_slow(campaign)


# ---------------------------------------------------------------------------
# JSONL archive
# ---------------------------------------------------------------------------


def record_to_json_dict(record: RunRecord) -> dict:
    return {
        "device": record.device_name,
        "step": record.step_index,
        "t_hours": record.t_hours,
        "shots": record.shots,
        "counts": {k: record.counts[k] for k in sorted(record.counts)},
    }


def export_records(records: Iterable[RunRecord], path: str) -> None:
    """One JSON object per line, in list order."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_json_dict(record)))
            fh.write("\n")


def _record_from_json_dict(obj: dict, where: str) -> RunRecord:
    if not isinstance(obj, dict):
        raise DataFormatError(f"{where}: expected a JSON object, got {type(obj).__name__}")
    missing = {"device", "step", "t_hours", "shots", "counts"} - obj.keys()
    if missing:
        raise DataFormatError(f"{where}: missing keys {sorted(missing)}")
    counts = obj["counts"]
    if not isinstance(counts, dict):
        raise DataFormatError(f"{where}: counts must be an object")
    try:
        record = RunRecord(
            device_name=str(obj["device"]),
            step_index=int(obj["step"]),
            t_hours=float(obj["t_hours"]),
            shots=int(obj["shots"]),
            counts={str(k): v for k, v in counts.items()},
        )
        validate_record(record)
    except InvalidArgumentError as exc:
        raise DataFormatError(f"{where}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"{where}: {exc}") from exc
    return record


def import_records(path: str) -> list[RunRecord]:
    """Parse a JSONL record file, failing with the offending line number."""
    records = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                where = f"{path}:{lineno}"
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataFormatError(f"{where}: {exc}") from exc
                records.append(_record_from_json_dict(obj, where))
    except OSError as exc:
        raise DataFormatError(f"cannot read record file {path}: {exc}") from exc
    return records
