"""Labeled corpus loading, subsetting, and stratified fold assignment.

A corpus is a set of test source files, each labeled flaky or nonflaky,
described by a JSON Lines manifest. Entries are kept sorted by id so that
filesystem enumeration order can never change downstream results.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    BadLabelError,
    DuplicateIdError,
    EmptyClassError,
    EmptyFileError,
    EncodingError,
    MissingFileError,
    TooFewSamplesError,
)
from .seeding import STREAM_FOLDS, STREAM_SUBSET, rng_for


class Label(Enum):
    FLAKY = "flaky"
    NONFLAKY = "nonflaky"


# fixed class iteration order for all per-class loops
CLASS_ORDER = (Label.FLAKY, Label.NONFLAKY)


@dataclass(frozen=True)
class CorpusEntry:
    """One labeled source file."""

    id: str
    path: str
    label: Label
    repo: str
    text: str


@dataclass(frozen=True)
class Corpus:
    """Immutable, id-sorted sequence of labeled entries."""

    entries: tuple[CorpusEntry, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(sorted(self.entries, key=lambda e: e.id))
        )
        seen = set()
        for e in self.entries:
            if e.id in seen:
                raise DuplicateIdError(f"duplicate entry id: {e.id!r}")
            seen.add(e.id)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def class_counts(self) -> dict[Label, int]:
        counts = {label: 0 for label in CLASS_ORDER}
        for e in self.entries:
            counts[e.label] += 1
        return counts

    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def labels(self) -> np.ndarray:
        """Label vector aligned with entry order: 1 = flaky, 0 = nonflaky."""
        return np.array(
            [1 if e.label is Label.FLAKY else 0 for e in self.entries], dtype=np.int8
        )

    def subset(self, ids) -> "Corpus":
        wanted = set(ids)
        return Corpus(tuple(e for e in self.entries if e.id in wanted))

    def content_hash(self) -> str:
        """SHA-256 over (id, label, text hash) of every entry, in id order."""
        h = hashlib.sha256()
        for e in self.entries:
            th = hashlib.sha256(e.text.encode("utf-8")).hexdigest()
            h.update(f"{e.id}\t{e.label.value}\t{th}\n".encode("utf-8"))
        return h.hexdigest()


@dataclass(frozen=True)
class FoldAssignment:
    """Maps every entry id to a fold index in [0, n_folds)."""

    n_folds: int
    assignment: dict[str, int] = field(compare=True)

    def fold_ids(self, fold: int) -> list[str]:
        return sorted(i for i, f in self.assignment.items() if f == fold)


def _parse_label(raw: str) -> Label:
    try:
        return Label(raw)
    except ValueError:
        raise BadLabelError(
            f"label must be 'flaky' or 'nonflaky', got {raw!r}"
        ) from None


def _read_text(path: Path) -> str:
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path}: not valid UTF-8 ({exc})") from None
    if not text:
        raise EmptyFileError(f"{path}: file is empty")
    return text


def load_manifest(manifest_path) -> Corpus:
    """Load a JSON Lines manifest into a Corpus.

    Each record is ``{"id": ..., "path": ..., "label": "flaky"|"nonflaky",
    "repo": ...}`` with ``path`` relative to the manifest's directory.
    Missing files, bad labels, duplicate ids, empty files, and non-UTF-8
    files are all hard errors; silently skipping any of them would change
    class counts invisibly.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise MissingFileError(f"manifest not found: {manifest_path}")
    base = manifest_path.parent
    entries = []
    seen_ids = set()
    for lineno, line in enumerate(
        manifest_path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BadLabelError(
                f"{manifest_path}:{lineno}: invalid JSON ({exc})"
            ) from None
        entry_id = str(record["id"])
        if entry_id in seen_ids:
            raise DuplicateIdError(f"{manifest_path}:{lineno}: duplicate id {entry_id!r}")
        seen_ids.add(entry_id)
        label = _parse_label(record["label"])
        file_path = base / record["path"]
        if not file_path.exists():
            raise MissingFileError(f"{manifest_path}:{lineno}: no such file {file_path}")
        entries.append(
            CorpusEntry(
                id=entry_id,
                path=str(file_path),
                label=label,
                repo=str(record.get("repo", "unknown")),
                text=_read_text(file_path),
            )
        )
    return Corpus(tuple(entries))


def scan_tree(root) -> list[dict]:
    """Scan ``<root>/flaky/**`` and ``<root>/nonflaky/**`` into manifest records.

    The id is the file's posix path relative to root; the repo is the first
    directory level under the class directory when present.
    """
    root = Path(root)
    records = []
    for label in CLASS_ORDER:
        class_dir = root / label.value
        if not class_dir.is_dir():
            continue
        for path in sorted(p for p in class_dir.rglob("*") if p.is_file()):
            rel = path.relative_to(root)
            parts = rel.parts
            repo = parts[1] if len(parts) >= 3 else "unknown"
            records.append(
                {
                    "id": rel.as_posix(),
                    "path": rel.as_posix(),
                    "label": label.value,
                    "repo": repo,
                }
            )
    return records


def collect_manifest_issues(manifest_path) -> list[str]:
    """Lenient validation pass: one diagnostic per bad record instead of
    stopping at the first failure. Empty list means the manifest loads.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        return [f"manifest not found: {manifest_path}"]
    base = manifest_path.parent
    issues = []
    seen_ids = set()
    any_records = False
    for lineno, line in enumerate(
        manifest_path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        any_records = True
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            issues.append(f"line {lineno}: invalid JSON ({exc})")
            continue
        missing = [k for k in ("id", "path", "label") if k not in record]
        if missing:
            issues.append(f"line {lineno}: missing field(s) {missing}")
            continue
        entry_id = str(record["id"])
        if entry_id in seen_ids:
            issues.append(f"line {lineno}: duplicate id {entry_id!r}")
        seen_ids.add(entry_id)
        if record["label"] not in (l.value for l in CLASS_ORDER):
            issues.append(f"line {lineno}: bad label {record['label']!r}")
        file_path = base / record["path"]
        if not file_path.exists():
            issues.append(f"line {lineno}: no such file {file_path}")
            continue
        try:
            text = file_path.read_bytes().decode("utf-8")
        except UnicodeDecodeError:
            issues.append(f"line {lineno}: {file_path} is not valid UTF-8")
            continue
        if not text:
            issues.append(f"line {lineno}: {file_path} is empty")
    if not any_records:
        issues.append("no entries")
    return issues


def write_manifest(records, manifest_path) -> None:
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(r, sort_keys=True) for r in records]
    manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class SubsetMode(Enum):
    BALANCED = "balanced"
    IMBALANCED = "imbalanced"
    ALL = "all"


def select_subset(corpus: Corpus, mode: SubsetMode, seed: int) -> Corpus:
    """Select the balanced (1:1) subset or pass the corpus through unchanged.

    Balanced keeps every minority entry and draws a seeded uniform sample
    (without replacement) of equal size from the majority class. The seed
    fully determines the subset; identical inputs give identical output.
    """
    counts = corpus.class_counts
    for label in CLASS_ORDER:
        if counts[label] == 0:
            raise EmptyClassError(f"corpus has no {label.value} entries")
    if mode in (SubsetMode.IMBALANCED, SubsetMode.ALL):
        return corpus

    minority, majority = sorted(CLASS_ORDER, key=lambda c: (counts[c], c.value))
    if counts[minority] == counts[majority]:
        return corpus
    majority_ids = sorted(e.id for e in corpus if e.label is majority)
    rng = rng_for(seed, STREAM_SUBSET)
    keep = rng.choice(len(majority_ids), size=counts[minority], replace=False)
    kept_majority = {majority_ids[i] for i in keep}
    selected = [
        e.id for e in corpus if e.label is minority or e.id in kept_majority
    ]
    return corpus.subset(selected)


def stratified_folds(corpus: Corpus, n_folds: int, seed: int) -> FoldAssignment:
    """Assign entries to folds, shuffling within each class then dealing
    round-robin so per-class fold sizes differ by at most one.
    """
    if n_folds < 2:
        raise TooFewSamplesError("n_folds must be at least 2")
    counts = corpus.class_counts
    for label in CLASS_ORDER:
        if counts[label] < n_folds:
            raise TooFewSamplesError(
                f"class {label.value} has {counts[label]} entries, "
                f"fewer than n_folds={n_folds}"
            )
    assignment: dict[str, int] = {}
    for class_idx, label in enumerate(CLASS_ORDER):
        ids = sorted(e.id for e in corpus if e.label is label)
        rng = rng_for(seed, STREAM_FOLDS, class_idx)
        order = rng.permutation(len(ids))
        for position, idx in enumerate(order):
            assignment[ids[idx]] = position % n_folds
    return FoldAssignment(n_folds=n_folds, assignment=assignment)
