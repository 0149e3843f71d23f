"""Dual reading of a defining family: minimal transversals.

A defining family says "in each member, at least one hypothesis is
false" (and-of-ors).  Its minimal transversals say the same thing as an
or-of-ands: "at least one of these sets consists entirely of false
hypotheses".  Each transversal is a candidate explanation of the data;
ruling hypotheses out (known true nulls) kills every explanation that
uses them, and whatever hypotheses remain in some surviving explanation
are the ones still implicated.

Transversal families can blow up combinatorially, so construction stops
at an emit cap and flags the result as truncated.
"""

from __future__ import annotations

import numpy as np

from .closure import SetFamily
from .study import HypothesisSet, ValidationError

DEFAULT_MAX_SETS = 10_000


def minimal_transversals(family: SetFamily, max_sets: int | None = DEFAULT_MAX_SETS) -> SetFamily:
    """All inclusion-minimal sets intersecting every member of ``family``.

    Berge's incremental construction: fold members in one at a time,
    keeping the working antichain minimal.  The empty family dualizes to
    the vacuous family {{}} (an empty intersection requirement is met by
    the empty set), and {{}} dualizes back to the empty family (nothing
    can intersect the empty set).

    When the working antichain outgrows ``max_sets`` the construction
    stops and returns the minimal transversals of the members folded in
    so far, trimmed to ``max_sets`` in canonical order and flagged
    ``truncated``; such a result still hits every processed member but
    carries no joint guarantee for the whole family.  ``max_sets=None``
    removes the cap.
    """
    if max_sets is not None and max_sets < 1:
        raise ValidationError("max_sets must be >= 1 or None", field="max_sets")
    members = family.member_masks()
    if any(msk == 0 for msk in members):
        # {{}} (only legal with the empty set as sole member): no transversals
        return SetFamily((), family.m)
    # generous interim allowance: stages may swell past max_sets and
    # minimalize back down, but unbounded swell means real blowup
    work_cap = None if max_sets is None else max(20 * max_sets, 100_000)
    working = [0]  # minimal transversals of the empty prefix
    for member in members:
        hit = []
        missed = []
        for t in working:
            (hit if t & member else missed).append(t)
        candidates = set(hit)
        for t in missed:
            rest = member
            while rest:
                low = rest & -rest
                rest ^= low
                candidates.add(t | low)
        if work_cap is not None and len(candidates) > work_cap:
            return _truncated(working, family.m, max_sets)
        working = _minimalize(candidates)
        if max_sets is not None and len(working) > max_sets:
            return _truncated(working, family.m, max_sets)
    sets = sorted(
        (HypothesisSet.from_mask(t) for t in working),
        key=lambda s: (len(s), s.indices),
    )
    return SetFamily(tuple(sets), family.m)


def _truncated(working: list[int], m: int, max_sets: int) -> SetFamily:
    sets = sorted(
        (HypothesisSet.from_mask(t) for t in working),
        key=lambda s: (len(s), s.indices),
    )[:max_sets]
    return SetFamily(tuple(sets), m, truncated=True)


def _minimalize(masks: set[int]) -> list[int]:
    """Drop every mask that strictly contains another (one pass suffices:
    absorption is transitive, so anything absorbed is absorbed by a
    minimal element)."""
    uniq = sorted(masks, key=lambda t: t.bit_count())
    n = len(uniq)
    if n > 512 and uniq[-1] < (1 << 63):
        arr = np.array(uniq, dtype=np.uint64)
        keep = np.ones(n, dtype=bool)
        chunk = max(1, int(4e7) // n)
        for start in range(0, n, chunk):
            block = arr[start : start + chunk, None]
            absorbed = (block & arr[None, :]) == arr[None, :]
            np.fill_diagonal(absorbed[:, start : start + block.shape[0]], False)
            keep[start : start + chunk] = ~absorbed.any(axis=1)
        return [int(t) for t in arr[keep]]
    kept: list[int] = []
    for t in uniq:
        if not any(k & t == k for k in kept):
            kept.append(t)
    return kept


def verify_duality(defining: SetFamily, transversals: SetFamily) -> bool:
    """Check that dualizing ``transversals`` recovers ``defining`` exactly.

    Minimal-transversal duality is an involution on antichains of
    nonempty sets, so this is the natural self-check after a dual run.
    Truncated inputs cannot be verified.
    """
    if defining.truncated or transversals.truncated:
        raise ValidationError("cannot verify a truncated family", field="truncated")
    back = minimal_transversals(transversals, max_sets=None)
    return back.sets == defining.sets and back.m == defining.m


def condition_on_nulls(
    transversals: SetFamily, known_true_nulls: HypothesisSet
) -> tuple[SetFamily, HypothesisSet]:
    """Drop explanations touching hypotheses known to be true nulls.

    Returns the surviving transversals and the union of their members
    (the hypotheses still implicated in some surviving explanation).
    A truncated input yields a truncated survivor family.
    """
    if len(known_true_nulls) and known_true_nulls.indices[-1] >= transversals.m:
        raise ValidationError(
            f"known-null index {known_true_nulls.indices[-1]} out of range "
            f"for m={transversals.m}",
            field="known_true_nulls",
        )
    null_mask = known_true_nulls.mask
    survivors = tuple(s for s in transversals.sets if not (s.mask & null_mask))
    implicated: set[int] = set()
    for s in survivors:
        implicated.update(s.indices)
    return (
        SetFamily(survivors, transversals.m, truncated=transversals.truncated),
        HypothesisSet.of(implicated),
    )
