"""Local tests for intersection hypotheses.

A local test looks at the p-values of one intersection (a subset of the
study) and decides whether that intersection can be rejected at level
alpha.  Two classical combination tests are provided: Simes, valid under
nonnegative dependence, and Fisher, valid under independence.

The Simes comparison ``p <= (j * alpha) / k`` is written in exactly this
operand order everywhere in the package (here, in the closure sweep, and
in the sorted-p shortcut), so the shortcut/closure equivalence holds at
the level of float comparisons, not just in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .study import ValidationError

# p-values are clamped to this floor inside logarithms only; a p of
# exactly 0 is legal input everywhere else.
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class LocalTestDecision:
    """Outcome of one local test.

    ``rejected`` always equals ``test_pvalue <= alpha`` for the alpha the
    test was run at; the p-value is kept so callers can re-threshold.
    """

    rejected: bool
    test_pvalue: float


def _as_pvector(pvalues) -> np.ndarray:
    p = np.asarray(pvalues, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("need a non-empty 1-d vector of p-values", field="pvalues")
    if not bool(np.all((p >= 0.0) & (p <= 1.0))):
        raise ValidationError("p-values must lie in [0, 1]", field="pvalues")
    return p


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0) or alpha != alpha:
        raise ValidationError("alpha must lie strictly in (0, 1)", field="alpha")
    return alpha


def simes_local(pvalues, alpha: float) -> LocalTestDecision:
    """Simes test of the intersection of the given hypotheses.

    Rejects iff any sorted p-value satisfies ``p_(j) <= (j * alpha) / k``
    where k is the number of hypotheses.  The reported test p-value is
    ``min_j p_(j) * k / j``, which never exceeds 1.

    Parameters
    ----------
    pvalues : array_like
        P-values of the intersection being tested.
    alpha : float
        Level in (0, 1).

    Returns
    -------
    LocalTestDecision
    """
    alpha = _check_alpha(alpha)
    p = np.sort(_as_pvector(pvalues))
    k = p.size
    ranks = np.arange(1.0, k + 1.0)
    rejected = bool(np.any(p <= (ranks * alpha) / k))
    test_pvalue = float(np.min(p * k / ranks))
    return LocalTestDecision(rejected, test_pvalue)


def fisher_local(pvalues, alpha: float) -> LocalTestDecision:
    """Fisher combination test of the intersection of the given hypotheses.

    The statistic is ``-2 * sum(log(p_i))`` with p-values floored at
    1e-300 inside the logarithm; the reference distribution is chi-square
    with 2k degrees of freedom, evaluated exactly by
    :func:`chisq_even_df_survival`.
    """
    alpha = _check_alpha(alpha)
    p = _as_pvector(pvalues)
    stat = -2.0 * float(np.sum(np.log(np.maximum(p, LOG_FLOOR))))
    test_pvalue = chisq_even_df_survival(stat, p.size)
    return LocalTestDecision(test_pvalue <= alpha, test_pvalue)


def chisq_even_df_survival(x: float, k: int) -> float:
    """Survival function of a chi-square with 2k degrees of freedom.

    For even degrees of freedom the survival function is the closed form
    ``exp(-x/2) * sum_{j<k} (x/2)^j / j!``; no incomplete-gamma machinery
    is needed.  Evaluation switches to log space when ``exp(-x/2)``
    would underflow or the partial sums would overflow, and saturates at
    0 for very large x.

    Parameters
    ----------
    x : float
        Nonnegative test statistic.
    k : int
        Half the degrees of freedom, at least 1.

    Returns
    -------
    float
        P(chi2_{2k} >= x), in [0, 1].
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValidationError(f"k must be an int >= 1, got {k!r}", field="k")
    x = float(x)
    if not (x >= 0.0):
        raise ValidationError(f"x must be >= 0, got {x!r}", field="x")
    h = x / 2.0
    if h == 0.0:
        return 1.0
    if h <= 500.0:
        # direct recurrence: term_j = h^j / j!
        term = 1.0
        total = 1.0
        for j in range(1, k):
            term *= h / j
            total += term
        return min(1.0, math.exp(-h) * total)
    # log space; terms log(h^j / j!) peak near j = h
    logs = [-h + j * math.log(h) - math.lgamma(j + 1) for j in range(k)]
    top = max(logs)
    if top < -745.0:
        return 0.0
    acc = sum(math.exp(v - top) for v in logs)
    out = top + math.log(acc)
    if out < -745.0:
        return 0.0
    return min(1.0, math.exp(out))
