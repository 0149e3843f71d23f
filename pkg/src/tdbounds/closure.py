"""Exact closed testing over all subsets of a study.

``full_closure`` evaluates a local test on every nonempty subset of the
study and then applies the closure rule: a subset is rejected after
closure iff the local test rejects it *and every superset of it*.  The
resulting rejection map supports, for any selection R, a lower bound

    d(R) = |R| - max{ |I| : I subseteq R nonempty, I not rejected }

on the number of false hypotheses inside R, and all these bounds hold
simultaneously at the one level alpha.

Everything here is exponential in m by nature (2**m subsets are
visited), so studies are capped at ``AnalysisConfig.closure_cap``.  The
sweep is a plain Python loop over bitmasks in descending numeric order;
``mask | bit > mask`` guarantees every superset is finished before its
subsets, and the sweep exits early on the first non-rejected superset,
which is what makes sparse-rejection instances cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .localtests import LOG_FLOOR, chisq_even_df_survival
from .study import (
    LOCAL_TESTS,
    AnalysisConfig,
    HypothesisSet,
    PValueStudy,
    ValidationError,
)


@dataclass(frozen=True)
class BoundResult:
    """A true-discovery lower bound for one selection."""

    selection: HypothesisSet
    d: int
    alpha: float


@dataclass(frozen=True)
class SetFamily:
    """An antichain of hypothesis sets over a study of size m.

    Members are kept in canonical order: ascending cardinality, then
    lexicographic on the index tuples.  No member may contain another;
    the empty set is admissible only as the sole member (the vacuous
    family produced by dualizing an empty family).

    ``truncated`` marks a family cut off at an emit cap; it is ignored
    by equality so a truncated family still compares by content.
    """

    sets: tuple[HypothesisSet, ...]
    m: int
    truncated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ValidationError(f"m must be an int >= 1, got {self.m!r}", field="m")
        prev = None
        for s in self.sets:
            if not isinstance(s, HypothesisSet):
                raise ValidationError("family members must be HypothesisSet instances")
            if s.indices and s.indices[-1] >= self.m:
                raise ValidationError(
                    f"member index {s.indices[-1]} out of range for m={self.m}"
                )
            key = (len(s), s.indices)
            if prev is not None and key <= prev:
                raise ValidationError(
                    "family members must be unique and in canonical order; "
                    "use SetFamily.from_sets"
                )
            prev = key
        _check_antichain([s.indices for s in self.sets], self.m)

    @classmethod
    def from_sets(cls, sets, m: int, truncated: bool = False) -> "SetFamily":
        """Canonicalize an iterable of index collections into a family."""
        uniq = {tuple(HypothesisSet.of(s).indices) for s in sets}
        ordered = tuple(
            HypothesisSet(t) for t in sorted(uniq, key=lambda t: (len(t), t))
        )
        return cls(ordered, m, truncated)

    def member_masks(self) -> list[int]:
        return [s.mask for s in self.sets]

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


def _check_antichain(index_tuples: list[tuple[int, ...]], m: int) -> None:
    n = len(index_tuples)
    if n < 2:
        return
    if m <= 64:
        masks = np.zeros(n, dtype=np.uint64)
        for row, t in enumerate(index_tuples):
            acc = 0
            for i in t:
                acc |= 1 << i
            masks[row] = acc
        # chunked pairwise subset test: a subset of b iff a & b == a
        chunk = max(1, int(4e7) // max(n, 1))
        for start in range(0, n, chunk):
            block = masks[start : start + chunk, None]
            sub = (block & masks[None, :]) == block
            sub |= (masks[None, :] & block) == masks[None, :]
            np.fill_diagonal(sub[:, start : start + block.shape[0]], False)
            if bool(sub.any()):
                raise ValidationError("family is not an antichain: one member contains another")
    else:
        sets = [frozenset(t) for t in index_tuples]
        for i in range(n):
            for j in range(i + 1, n):
                if sets[i] <= sets[j] or sets[j] <= sets[i]:
                    raise ValidationError(
                        "family is not an antichain: one member contains another"
                    )


@dataclass(frozen=True)
class ClosureMap:
    """Closure-adjusted rejection indicator for every nonempty subset.

    ``rejection_bits[mask]`` is 1 iff the subset encoded by ``mask`` is
    rejected after closure.  Index 0 (the empty set) is always 0.
    """

    m: int
    alpha: float
    local_test: str
    rejection_bits: bytes

    def is_rejected(self, selection: HypothesisSet) -> bool:
        if len(selection) == 0:
            return False
        mask = selection.mask
        if mask >= len(self.rejection_bits):
            raise ValidationError(
                f"selection index out of range for m={self.m}", field="selection"
            )
        return bool(self.rejection_bits[mask])

    @cached_property
    def _bound_table(self) -> np.ndarray:
        # d[mask] = |mask| - g[mask] where g is the size of the largest
        # non-rejected nonempty subset, via a max-over-subsets zeta transform.
        size = 1 << self.m
        rej = np.frombuffer(self.rejection_bits, dtype=np.uint8)
        masks = np.arange(size, dtype=np.uint32)
        pop = np.zeros(size, dtype=np.int8)
        for b in range(self.m):
            pop += ((masks >> np.uint32(b)) & np.uint32(1)).astype(np.int8)
        g = np.where(rej == 0, pop, 0).astype(np.int8)
        g[0] = 0
        for b in range(self.m):
            step = 1 << b
            view = g.reshape(-1, 2, step)
            np.maximum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
        return pop - g  # d for every mask


def full_closure(
    study: PValueStudy,
    config: AnalysisConfig | None = None,
    local_test: str | None = None,
) -> ClosureMap:
    """Run the local test on all 2**m - 1 subsets and close upward.

    Parameters
    ----------
    study : PValueStudy
    config : AnalysisConfig, optional
        Supplies alpha, the closure cap, and the default local test.
    local_test : {"simes", "fisher"}, optional
        Overrides ``config.local_test`` when given.

    Returns
    -------
    ClosureMap

    Raises
    ------
    ValidationError
        If ``study.m`` exceeds ``config.closure_cap``.
    """
    config = config if config is not None else AnalysisConfig()
    if local_test is None:
        local_test = config.local_test
    elif local_test not in LOCAL_TESTS:
        raise ValidationError(
            f"local_test must be one of {LOCAL_TESTS}, got {local_test!r}",
            field="local_test",
        )
    m = study.m
    if m > config.closure_cap:
        raise ValidationError(
            f"m={m} exceeds closure_cap={config.closure_cap}; "
            "exact closure is exponential in m",
            field="closure_cap",
        )
    alpha = config.alpha
    size = 1 << m
    full = size - 1
    rejected = bytearray(size)

    if local_test == "simes":
        order = np.argsort(study.pvalues, kind="stable")
        sp = [float(study.pvalues[i]) for i in order]  # ascending
        spbit = [1 << int(i) for i in order]
        for mask in range(full, 0, -1):
            rest = full ^ mask
            ok = True
            while rest:
                low = rest & -rest
                if not rejected[mask | low]:
                    ok = False
                    break
                rest ^= low
            if not ok:
                continue
            k = mask.bit_count()
            j = 0
            for r in range(m):
                if mask & spbit[r]:
                    j += 1
                    if sp[r] <= (j * alpha) / k:
                        rejected[mask] = 1
                        break
                    if j == k:
                        break
    else:
        # subset sums of -2*log(p) via the lowest-bit recurrence
        weights = [-2.0 * math.log(max(float(p), LOG_FLOOR)) for p in study.pvalues]
        stats_list = [0.0] * size
        for mask in range(1, size):
            low = mask & -mask
            stats_list[mask] = stats_list[mask ^ low] + weights[low.bit_length() - 1]
        for mask in range(full, 0, -1):
            rest = full ^ mask
            ok = True
            while rest:
                low = rest & -rest
                if not rejected[mask | low]:
                    ok = False
                    break
                rest ^= low
            if not ok:
                continue
            if chisq_even_df_survival(stats_list[mask], mask.bit_count()) <= alpha:
                rejected[mask] = 1

    return ClosureMap(m, alpha, local_test, bytes(rejected))


def discovery_bound(closure: ClosureMap, selection: HypothesisSet) -> BoundResult:
    """Lower bound on the number of false hypotheses inside a selection.

    ``d = |R| - max{|I| : I subseteq R nonempty, not rejected}`` where a
    maximum over no sets counts as 0; in particular d of the empty
    selection is 0, and d = |R| when every nonempty subset is rejected.
    """
    if len(selection) and selection.indices[-1] >= closure.m:
        raise ValidationError(
            f"selection index {selection.indices[-1]} out of range for m={closure.m}",
            field="selection",
        )
    if len(selection) == 0:
        return BoundResult(selection, 0, closure.alpha)
    d = int(closure._bound_table[selection.mask])
    return BoundResult(selection, d, closure.alpha)


def discovery_bound_table(closure: ClosureMap) -> np.ndarray:
    """d for every subset at once; entry ``mask`` is d of that subset."""
    return closure._bound_table.copy()


def defining_family(closure: ClosureMap) -> SetFamily:
    """Inclusion-minimal closure-rejected sets, in canonical order.

    This family determines every rejection: a set is rejected iff it
    contains a member.  Read conjunctively: each member is a set of
    hypotheses of which at least one must be false.
    """
    rej = closure.rejection_bits
    size = 1 << closure.m
    found = []
    for mask in range(1, size):
        if not rej[mask]:
            continue
        rest = mask
        minimal = True
        while rest:
            low = rest & -rest
            if rej[mask ^ low]:
                minimal = False
                break
            rest ^= low
        if minimal:
            found.append(HypothesisSet.from_mask(mask))
    ordered = tuple(sorted(found, key=lambda s: (len(s), s.indices)))
    return SetFamily(ordered, closure.m)


def bound_from_defining(family: SetFamily, selection: HypothesisSet) -> int:
    """Recompute d(R) from the defining family alone.

    A subset I of R is non-rejected iff it contains no family member, so
    the largest non-rejected subset is R minus a minimum hitting set of
    the members lying inside R; d(R) equals that minimum hitting size.
    Exact branch and bound; family sizes from closures stay small.
    """
    for s in family.sets:
        if len(s) == 0:
            raise ValidationError("defining families cannot contain the empty set")
    sel_mask = selection.mask
    inside = [msk for msk in family.member_masks() if msk & sel_mask == msk]
    if not inside:
        return 0
    inside.sort(key=lambda msk: msk.bit_count())

    best = len(selection)  # hitting all of R always works

    def descend(idx: int, chosen: int, used: int) -> None:
        nonlocal best
        if used >= best:
            return
        while idx < len(inside) and inside[idx] & chosen:
            idx += 1
        if idx == len(inside):
            best = used
            return
        rest = inside[idx]
        while rest:
            low = rest & -rest
            descend(idx + 1, chosen | low, used + 1)
            rest ^= low

    descend(0, 0, 0)
    return best


def write_family(family: SetFamily, study: PValueStudy, path) -> None:
    """Write a set family as one comma-joined label line per member.

    The empty set (vacuous family) serializes as an empty line.
    """
    if family.m != study.m:
        raise ValidationError("family and study sizes differ", field="family")
    with open(path, "w", encoding="utf-8") as fh:
        for s in family.sets:
            fh.write(",".join(study.labels[i] for i in s.indices))
            fh.write("\n")


def load_family_lines(path) -> list[tuple[str, ...]]:
    """Read a family file as raw label tuples, one member per line."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline of the last record
    sets = []
    for line in lines:
        line = line.rstrip("\r")
        sets.append(() if line == "" else tuple(line.split(",")))
    return sets


def load_family(path, study: PValueStudy) -> SetFamily:
    """Read a set family written by :func:`write_family`."""
    sets = [
        tuple(study.index(lab) for lab in labels) for labels in load_family_lines(path)
    ]
    return SetFamily.from_sets(sets, study.m)
