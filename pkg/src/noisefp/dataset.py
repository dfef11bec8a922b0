"""Turn raw count records into labeled outcome-probability datasets.

An example is one group of records, one record per requested measurement
step, with the step probability vectors concatenated in ascending step
order.  The default grouping key is the record's ordinal position within
its (device, step) stream, which pairs up the k-th batch of every step —
exactly the order campaigns emit and archives preserve.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .acquisition import RunRecord
from .errors import DataFormatError, InvalidArgumentError


def probabilities(counts: Mapping[str, int], shots: int) -> np.ndarray:
    """Empirical outcome probabilities in ascending label order.

    Entry o is counts[o]/shots, except that the last nonzero entry absorbs
    the one-ulp float residue so the vector sums to exactly 1.0 (the exact
    rational values do; this picks the float representation that keeps it).
    Missing labels count as zero.
    """
    if shots <= 0:
        raise InvalidArgumentError(f"shots must be positive, got {shots}")
    widths = {len(k) for k in counts}
    if len(widths) != 1:
        raise InvalidArgumentError(f"outcome labels have mixed widths: {sorted(counts)}")
    width = widths.pop()
    values = np.zeros(2**width, dtype=np.int64)
    for label, count in counts.items():
        index = int(label, 2) if set(label) <= {"0", "1"} else -1
        if index < 0:
            raise InvalidArgumentError(f"invalid outcome label {label!r}")
        if not isinstance(count, (int, np.integer)) or isinstance(count, bool) or count < 0:
            raise InvalidArgumentError(f"count for {label!r} must be a non-negative int")
        values[index] = count
    total = int(values.sum())
    if total != shots:
        raise InvalidArgumentError(f"counts sum to {total}, expected shots={shots}")
    p = values / shots
    last_nonzero = int(np.nonzero(values)[0][-1])
    head = 0.0
    for i in range(last_nonzero):
        head = head + p[i]
    p[last_nonzero] = 1.0 - head
    return p


@dataclass
class LabeledDataset:
    """Feature matrix plus integer class labels.

    ``features`` has one row per example and 4 columns per step in
    ``steps_used``; ``labels[i]`` indexes into ``class_names``.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    steps_used: tuple[int, ...]

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.class_names = tuple(self.class_names)
        self.steps_used = tuple(int(s) for s in self.steps_used)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise InvalidArgumentError(
                f"feature matrix {self.features.shape} does not match "
                f"{self.labels.shape[0]} labels"
            )
        if len(self.class_names) < 2:
            raise InvalidArgumentError("a labeled dataset needs at least 2 classes")
        if self.labels.size and (
            self.labels.min() < 0 or self.labels.max() >= len(self.class_names)
        ):
            raise InvalidArgumentError("labels out of range for class_names")

    @property
    def n_examples(self) -> int:
        return int(self.labels.shape[0])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.class_names))


def _check_steps(steps: Sequence[int]) -> tuple[int, ...]:
    steps = tuple(int(s) for s in steps)
    if not steps:
        raise InvalidArgumentError("at least one step is required")
    if any(s < 1 for s in steps):
        raise InvalidArgumentError(f"steps must be >= 1, got {steps}")
    if len(set(steps)) != len(steps):
        raise InvalidArgumentError(f"duplicate steps in {steps}")
    return tuple(sorted(steps))


GroupKey = Callable[[RunRecord, int], object]


def _group_features(records: Iterable[RunRecord], steps: tuple[int, ...],
                    group_key: GroupKey) -> tuple[list[np.ndarray], list[float], int]:
    """Group records by key, keep groups with every requested step complete.

    Returns (feature vectors, group timestamps, skipped group count).  Keys
    are sorted so output order is independent of record order in the input;
    a group's timestamp is that of its lowest-step record.
    """
    table: dict[object, dict[int, RunRecord]] = {}
    ordinals: dict[int, int] = {}
    for record in records:
        ordinal = ordinals.get(record.step_index, 0)
        ordinals[record.step_index] = ordinal + 1
        if record.step_index not in steps:
            continue
        key = group_key(record, ordinal)
        slot = table.setdefault(key, {})
        if record.step_index in slot:
            raise InvalidArgumentError(
                f"duplicate record for group {key!r}, step {record.step_index}"
            )
        slot[record.step_index] = record
    vectors, stamps, skipped = [], [], 0
    for key in sorted(table, key=repr):
        slot = table[key]
        if len(slot) != len(steps):
            skipped += 1
            continue
        vectors.append(
            np.concatenate([probabilities(slot[s].counts, slot[s].shots) for s in steps])
        )
        stamps.append(slot[steps[0]].t_hours)
    return vectors, stamps, skipped


def _ordinal_key(record: RunRecord, ordinal: int) -> object:
    return ordinal


def build_machine_dataset(
    records_by_device: Mapping[str, Sequence[RunRecord]],
    steps: Sequence[int],
    group_key: GroupKey = _ordinal_key,
) -> tuple[LabeledDataset, int]:
    """Label examples by which device produced them.

    Device order in the mapping fixes the label assignment (class i is the
    i-th device).  Groups missing any requested step are skipped; the count
    of skipped groups is returned alongside the dataset.
    """
    if len(records_by_device) < 2:
        raise InvalidArgumentError(
            f"need records from >= 2 devices, got {len(records_by_device)}"
        )
    steps = _check_steps(steps)
    features, labels, skipped_total = [], [], 0
    class_names = tuple(records_by_device)
    for label, device in enumerate(class_names):
        vectors, _, skipped = _group_features(records_by_device[device], steps, group_key)
        skipped_total += skipped
        features.extend(vectors)
        labels.extend([label] * len(vectors))
    present = sorted(set(labels))
    if len(present) < 2:
        raise InvalidArgumentError(
            "fewer than 2 classes have complete groups for the requested steps"
        )
    dataset = LabeledDataset(
        features=np.array(features, dtype=np.float64).reshape(len(labels), 4 * len(steps)),
        labels=np.array(labels, dtype=np.int64),
        class_names=class_names,
        steps_used=steps,
    )
    return dataset, skipped_total


def build_timeseries_dataset(
    records: Sequence[RunRecord],
    steps: Sequence[int],
    n_windows: int,
    group_key: GroupKey = _ordinal_key,
) -> tuple[LabeledDataset, int]:
    """Label one device's examples by the time window they fall in.

    The span [0, t_max] is divided into ``n_windows`` equal-width intervals;
    an example's timestamp is that of its lowest-step record.  Every window
    must end up non-empty.
    """
    if n_windows < 2:
        raise InvalidArgumentError(f"n_windows must be >= 2, got {n_windows}")
    steps = _check_steps(steps)
    devices = {r.device_name for r in records}
    if len(devices) > 1:
        raise InvalidArgumentError(
            f"time-window datasets take records of a single device, got {sorted(devices)}"
        )
    features, stamps, skipped = _group_features(records, steps, group_key)
    if not features:
        raise InvalidArgumentError("no complete groups for the requested steps")
    t_max = max(stamps)
    if t_max <= 0:
        raise InvalidArgumentError("records must span > 0 time for window labeling")
    width = t_max / n_windows
    labels = np.minimum((np.array(stamps) / width).astype(np.int64), n_windows - 1)
    counts = np.bincount(labels, minlength=n_windows)
    if (counts == 0).any():
        empty = int(np.argmin(counts))
        raise InvalidArgumentError(
            f"window {empty} is empty; choose fewer windows than {n_windows}"
        )
    dataset = LabeledDataset(
        features=np.array(features, dtype=np.float64),
        labels=labels,
        class_names=tuple(f"window{w}" for w in range(n_windows)),
        steps_used=steps,
    )
    return dataset, skipped


@dataclass(frozen=True)
class Split:
    """Disjoint covering index sets, stratified by class."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    fractions: tuple[float, float, float]
    seed: int


def _allocate(count: int, fractions: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of `count` items over `fractions`."""
    exact = [count * f for f in fractions]
    sizes = [int(np.floor(e)) for e in exact]
    remainders = [e - s for e, s in zip(exact, sizes)]
    shortfall = count - sum(sizes)
    for i in sorted(range(len(fractions)), key=lambda i: (-remainders[i], i))[:shortfall]:
        sizes[i] += 1
    return sizes


def split(dataset: LabeledDataset, fractions: Sequence[float] = (0.5, 0.25, 0.25),
          seed: int = 0) -> Split:
    """Stratified train/validation/test split, deterministic for a seed."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise InvalidArgumentError(f"need 3 positive fractions, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise InvalidArgumentError(f"fractions must sum to 1, got {sum(fractions)}")
    if dataset.n_examples == 0:
        raise InvalidArgumentError("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    parts: list[list[np.ndarray]] = [[], [], []]
    for label in range(len(dataset.class_names)):
        indices = np.flatnonzero(dataset.labels == label)
        if indices.size < 3:
            raise InvalidArgumentError(
                f"class {dataset.class_names[label]!r} has {indices.size} example(s); "
                "need >= 3 to cover all three sets"
            )
        shuffled = rng.permutation(indices)
        sizes = _allocate(indices.size, fractions)
        start = 0
        for part, size in zip(parts, sizes):
            part.append(shuffled[start:start + size])
            start += size
    train, val, test = (np.sort(np.concatenate(p)) for p in parts)
    return Split(train=train, validation=val, test=test, fractions=fractions, seed=int(seed))


def take(dataset: LabeledDataset, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(features, labels) of the selected examples."""
    return dataset.features[indices], dataset.labels[indices]


# ---------------------------------------------------------------------------
# CSV persistence (feature table) + JSON sidecar (names, steps, provenance)
# ---------------------------------------------------------------------------


def _sidecar_path(path: str) -> str:
    return path + ".meta.json"


def save_csv(dataset: LabeledDataset, path: str, provenance: dict | None = None) -> None:
    header = ["label"]
    labels4 = ("p00", "p01", "p10", "p11")
    for step in dataset.steps_used:
        header.extend(f"s{step}_{p}" for p in labels4)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row_label, row in zip(dataset.labels, dataset.features):
            writer.writerow([int(row_label)] + [repr(float(v)) for v in row])
    sidecar = {
        "class_names": list(dataset.class_names),
        "steps": list(dataset.steps_used),
        "provenance": provenance or {},
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def load_csv(path: str) -> LabeledDataset:
    try:
        with open(_sidecar_path(path), "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        class_names = tuple(str(c) for c in sidecar["class_names"])
        steps = tuple(int(s) for s in sidecar["steps"])
    except OSError as exc:
        raise DataFormatError(f"cannot read dataset sidecar for {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"malformed dataset sidecar for {path}: {exc}") from exc
    features, labels = [], []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataFormatError(f"{path}:1: empty dataset file") from None
            expected_cols = 1 + 4 * len(steps)
            if len(header) != expected_cols or header[0] != "label":
                raise DataFormatError(
                    f"{path}:1: expected {expected_cols} columns starting with 'label'"
                )
            for lineno, row in enumerate(reader, start=2):
                if len(row) != expected_cols:
                    raise DataFormatError(
                        f"{path}:{lineno}: expected {expected_cols} fields, got {len(row)}"
                    )
                try:
                    labels.append(int(row[0]))
                    features.append([float(v) for v in row[1:]])
                except ValueError as exc:
                    raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise DataFormatError(f"cannot read dataset file {path}: {exc}") from exc
    if not features:
        raise DataFormatError(f"{path}: dataset has no examples")
    return LabeledDataset(
        features=np.array(features, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64),
        class_names=class_names,
        steps_used=steps,
    )
