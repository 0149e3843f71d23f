"""Core study types and the study file format.

A study is a fixed list of labelled hypotheses with one p-value each.
Studies are immutable once constructed: analyses derive new objects
instead of mutating inputs, which keeps cached closure artifacts valid.

Study files are plain CSV with the exact header ``label,p``, one row per
hypothesis.  P-values are written with 17 significant digits so a
write/load round trip reproduces every float64 bit for bit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

# Hard ceiling for exact closure work; configs may lower it, never raise it.
CLOSURE_CAP_CEILING = 25


class ValidationError(ValueError):
    """Raised when an input violates a documented contract.

    ``field`` optionally names the offending input for machine-readable
    error reporting (CLI diagnostics, HTTP error bodies).
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


def _check_label(label: str, where: str) -> None:
    if not isinstance(label, str) or label == "":
        raise ValidationError(f"{where}: label must be a non-empty string", field="label")
    if label != label.strip():
        raise ValidationError(
            f"{where}: label {label!r} has leading or trailing whitespace", field="label"
        )
    if any(c in label for c in ",\n\r"):
        raise ValidationError(
            f"{where}: label {label!r} contains a comma or line break", field="label"
        )


@dataclass(frozen=True)
class HypothesisSet:
    """Immutable sorted tuple of hypothesis indices.

    Indices refer to positions within a study.  Use :meth:`of` to build
    one from any iterable (it sorts and deduplicates).
    """

    indices: tuple[int, ...]

    def __post_init__(self):
        for i in self.indices:
            if not isinstance(i, int) or isinstance(i, bool) or i < 0:
                raise ValidationError(f"hypothesis index {i!r} is not a non-negative int")
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValidationError("indices must be strictly increasing; use HypothesisSet.of")

    @classmethod
    def of(cls, indices) -> "HypothesisSet":
        return cls(tuple(sorted({int(i) for i in indices})))

    @classmethod
    def empty(cls) -> "HypothesisSet":
        return cls(())

    @property
    def mask(self) -> int:
        """Bitmask encoding (bit i set iff hypothesis i is a member)."""
        out = 0
        for i in self.indices:
            out |= 1 << i
        return out

    @classmethod
    def from_mask(cls, mask: int) -> "HypothesisSet":
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices

    def issubset(self, other: "HypothesisSet") -> bool:
        o = set(other.indices)
        return all(i in o for i in self.indices)


@dataclass(frozen=True)
class PValueStudy:
    """A fixed collection of labelled hypotheses with one p-value each.

    Parameters
    ----------
    labels : tuple of str
        Unique names, no commas or line breaks (they appear verbatim in
        CSV and set-family files).
    pvalues : ndarray
        Float64 vector in [0, 1], same length as ``labels``.  Stored as
        a read-only copy.
    """

    labels: tuple[str, ...]
    pvalues: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        p = np.array(self.pvalues, dtype=np.float64, copy=True)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("a study needs at least one hypothesis", field="pvalues")
        if len(labels) != p.size:
            raise ValidationError(
                f"{len(labels)} labels for {p.size} p-values", field="labels"
            )
        seen: dict[str, int] = {}
        for pos, lab in enumerate(labels):
            _check_label(lab, f"hypothesis {pos}")
            if lab in seen:
                raise ValidationError(f"duplicate label {lab!r}", field="label")
            seen[lab] = pos
        bad = np.where(~((p >= 0.0) & (p <= 1.0)))[0]  # catches NaN too
        if bad.size:
            raise ValidationError(
                f"p-value for {labels[bad[0]]!r} is {float(p[bad[0]])!r}, outside [0, 1]",
                field="p",
            )
        p.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "pvalues", p)
        object.__setattr__(self, "_label_index", seen)

    @property
    def m(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise ValidationError(f"unknown hypothesis label {label!r}", field="label") from None

    def subset(self, labels) -> HypothesisSet:
        """Hypothesis set from an iterable of labels."""
        return HypothesisSet.of(self.index(lab) for lab in labels)

    def full_set(self) -> HypothesisSet:
        return HypothesisSet(tuple(range(self.m)))

    def pvalues_of(self, selection: HypothesisSet) -> np.ndarray:
        if selection.indices and selection.indices[-1] >= self.m:
            raise ValidationError(
                f"index {selection.indices[-1]} out of range for m={self.m}"
            )
        return self.pvalues[list(selection.indices)]

    def __eq__(self, other):
        if not isinstance(other, PValueStudy):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.pvalues, other.pvalues)

    def __hash__(self):
        return hash((self.labels, self.pvalues.tobytes()))


LOCAL_TESTS = ("simes", "fisher")


@dataclass(frozen=True)
class AnalysisConfig:
    """Shared analysis settings.

    ``alpha`` is the simultaneous error level for every bound derived
    from one closure; ``local_test`` picks the intersection test that
    closure-based paths use by default; ``closure_cap`` bounds the study
    size for which exact closure artifacts (2**m subsets) may be built.
    """

    alpha: float = 0.05
    local_test: str = "simes"
    closure_cap: int = 20

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a < 1.0) or a != a:
            raise ValidationError(f"alpha must lie strictly in (0, 1), got {self.alpha!r}",
                                  field="alpha")
        object.__setattr__(self, "alpha", a)
        if self.local_test not in LOCAL_TESTS:
            raise ValidationError(
                f"local_test must be one of {LOCAL_TESTS}, got {self.local_test!r}",
                field="local_test",
            )
        cap = self.closure_cap
        if not isinstance(cap, int) or not (1 <= cap <= CLOSURE_CAP_CEILING):
            raise ValidationError(
                f"closure_cap must be an int in [1, {CLOSURE_CAP_CEILING}], got {cap!r}",
                field="closure_cap",
            )


def load_study(path) -> PValueStudy:
    """Read a study from a ``label,p`` CSV file.

    Raises :class:`ValidationError` with the 1-based line number for any
    malformed row, and names the offending label for range errors.
    """
    labels: list[str] = []
    pvals: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["label", "p"]:
            raise ValidationError(
                f"line 1: expected header 'label,p', got {header!r}", field="header"
            )
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 2:
                raise ValidationError(
                    f"line {line}: expected 2 fields, got {len(row)}", field="row"
                )
            label, ptext = row[0], row[1]
            try:
                p = float(ptext)
            except ValueError:
                raise ValidationError(
                    f"line {line}: p-value {ptext!r} is not a number", field="p"
                ) from None
            labels.append(label)
            pvals.append(p)
    if not labels:
        raise ValidationError("study file contains no hypotheses", field="row")
    return PValueStudy(tuple(labels), np.array(pvals))


def write_study(study: PValueStudy, path) -> None:
    """Write a study as ``label,p`` CSV; exact float64 round trip."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "p"])
        for label, p in zip(study.labels, study.pvalues):
            writer.writerow([label, f"{p:.17g}"])
