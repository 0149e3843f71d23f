"""Closure-equivalent Simes bounds without enumerating subsets.

For Simes local tests the full closure collapses to one number h: the
size of the largest subset of the study whose p-values are jointly
Simes-non-rejected, always attained by the h largest p-values.  Given h,
the bound for any selection R is

    d(R) = max(0, max_{1 <= u <= |R|} (1 - u + #{i in R : p_i <= (u * alpha) / h}))

with d(R) = |R| when h = 0.  Results agree exactly, set for set, with
``discovery_bound`` over ``full_closure``; the point of this module is
reaching m in the millions, where the lattice is unthinkable.

Threshold comparisons reuse the one canonical float expression
``p <= (j * alpha) / k`` shared with the closure sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closure import BoundResult
from .study import AnalysisConfig, HypothesisSet, PValueStudy, ValidationError


@dataclass(frozen=True)
class SimesShortcutState:
    """Preprocessed study: sorted p-values plus the Simes closure number h.

    ``order`` maps sorted position to original hypothesis index and
    ``rank`` is its inverse, so ``sorted_p[rank[i]]`` is the p-value of
    hypothesis i.
    """

    m: int
    alpha: float
    h: int
    sorted_p: np.ndarray
    order: np.ndarray
    rank: np.ndarray

    def pvalue_of(self, index: int) -> float:
        return float(self.sorted_p[self.rank[index]])


def _window_feasible(sorted_p: np.ndarray, i: int, alpha: float) -> bool:
    # the i largest p-values survive iff p_(m-i+j) > (j*alpha)/i for all j
    if i == 0:
        return True
    m = sorted_p.size
    window = sorted_p[m - i :]
    j = np.arange(1.0, i + 1.0)
    return bool(np.all(window > (j * alpha) / i))


def preprocess(study: PValueStudy, config: AnalysisConfig | None = None) -> SimesShortcutState:
    """Sort once and locate h by bisection, O(m log m) total.

    Feasibility of a window size is downward-closed (if the i largest
    p-values survive, so do the i-1 largest: (j+1)*(i-1) >= j*i for all
    j <= i-1, so each retained p-value faces a no-larger threshold),
    which is what makes bisection over i valid.
    """
    config = config if config is not None else AnalysisConfig()
    alpha = config.alpha
    order = np.argsort(study.pvalues, kind="stable")
    sorted_p = study.pvalues[order]
    rank = np.empty(study.m, dtype=np.int64)
    rank[order] = np.arange(study.m)
    for arr in (sorted_p, order, rank):
        arr.setflags(write=False)
    lo, hi = 0, study.m
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _window_feasible(sorted_p, mid, alpha):
            lo = mid
        else:
            hi = mid - 1
    return SimesShortcutState(study.m, alpha, lo, sorted_p, order, rank)


def shortcut_bound(state: SimesShortcutState, selection: HypothesisSet) -> BoundResult:
    """True-discovery lower bound for one selection in O(|R| log |R|)."""
    s = len(selection)
    if s and selection.indices[-1] >= state.m:
        raise ValidationError(
            f"selection index {selection.indices[-1]} out of range for m={state.m}",
            field="selection",
        )
    if s == 0:
        return BoundResult(selection, 0, state.alpha)
    if state.h == 0:
        return BoundResult(selection, s, state.alpha)
    alpha, h = state.alpha, state.h
    if s <= 64:
        # small selections: plain Python beats array round trips
        q = sorted(float(state.sorted_p[state.rank[i]]) for i in selection.indices)
        best = 0
        count = 0
        for u in range(1, s + 1):
            t = (u * alpha) / h
            while count < s and q[count] <= t:
                count += 1
            if count - u + 1 > best:
                best = count - u + 1
        return BoundResult(selection, best, state.alpha)
    q = np.sort(state.sorted_p[state.rank[list(selection.indices)]])
    thresholds = (np.arange(1.0, s + 1.0) * alpha) / h
    counts = np.searchsorted(q, thresholds, side="right")
    best = int(np.max(counts - np.arange(1, s + 1) + 1))
    return BoundResult(selection, max(0, best), state.alpha)


def bound_curve(state: SimesShortcutState, ranking) -> np.ndarray:
    """Bounds along the prefixes of a ranking of hypothesis indices.

    Entry k-1 is the bound for the first k hypotheses; the curve is
    non-decreasing ("walking down the list can only add discoveries").
    Each prefix is re-evaluated against the sorted prefix p-values, so
    cost grows quadratically; intended for rankings a user would
    actually read (up to a few tens of thousands), not for full studies
    in the millions -- query :func:`shortcut_bound` at chosen cutoffs
    instead.
    """
    ranking = [int(i) for i in ranking]
    if len(set(ranking)) != len(ranking):
        raise ValidationError("ranking contains duplicate indices", field="ranking")
    if ranking and not all(0 <= i < state.m for i in ranking):
        raise ValidationError("ranking index out of range", field="ranking")
    n = len(ranking)
    out = np.zeros(n, dtype=np.int64)
    if n == 0:
        return out
    if state.h == 0:
        return np.arange(1, n + 1, dtype=np.int64)
    alpha, h = state.alpha, state.h
    pvals = state.sorted_p[state.rank[ranking]]
    q = np.empty(n)
    for k in range(1, n + 1):
        newp = pvals[k - 1]
        pos = int(np.searchsorted(q[: k - 1], newp))
        q[pos + 1 : k] = q[pos : k - 1]
        q[pos] = newp
        thresholds = (np.arange(1.0, k + 1.0) * alpha) / h
        counts = np.searchsorted(q[:k], thresholds, side="right")
        best = int(np.max(counts - np.arange(1, k + 1) + 1))
        out[k - 1] = max(0, best)
    return out
