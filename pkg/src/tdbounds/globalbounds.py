"""Global lower bounds on the number of false hypotheses.

Two complementary tools for the "is there anything here at all, and how
much" question, both operating on the full p-value vector rather than on
subsets:

* an envelope bound: the empirical CDF of the p-values is compared
  against the uniform CDF plus a standardized allowance, and every point
  where the excess survives the allowance converts into a lower bound on
  the number of false hypotheses.  The allowance multiplier is
  calibrated by Monte Carlo so that under the global null the bound is
  positive with probability at most alpha.
* the higher-criticism statistic, a scan over the lower half of the
  order statistics that is sensitive to sparse signals, with a Monte
  Carlo critical value.

Both calibrations draw from the package's own deterministic generator,
so results are reproducible across platforms for a given seed.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .rng import derive_stream
from .study import PValueStudy, ValidationError

_MIN_REPS = 1000
# keeps standardization finite at degenerate order statistics; the
# numerator is never clamped
_VAR_FLOOR = 1e-300
_P_CEIL = 1.0 - 1e-16


@dataclass(frozen=True)
class BoundingFunctionConfig:
    """A calibrated envelope: allowance lam * sqrt(t(1-t)/m) at level alpha.

    Produced by :func:`calibrate_lambda`; ``m`` records the study size
    the calibration is valid for.
    """

    lam: float
    alpha: float
    m: int
    calibration_reps: int
    seed: int

    def __post_init__(self) -> None:
        if not (isinstance(self.lam, float) and math.isfinite(self.lam) and self.lam > 0.0):
            raise ValidationError("lam must be a positive finite float", field="lam")
        if not (isinstance(self.alpha, float) and 0.0 < self.alpha < 1.0):
            raise ValidationError("alpha must be a float in (0, 1)", field="alpha")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ValidationError("m must be a positive integer", field="m")
        if not (isinstance(self.calibration_reps, int) and self.calibration_reps >= _MIN_REPS):
            raise ValidationError(
                f"calibration_reps must be an integer >= {_MIN_REPS}",
                field="calibration_reps",
            )
        if not isinstance(self.seed, int):
            raise ValidationError("seed must be an integer", field="seed")


def _sup_standardized_excess(u: np.ndarray) -> float:
    """max over order statistics t < 1 of (Fhat(t) - t) / sqrt(t(1-t)/m).

    Fhat uses right-continuous tie handling so the exceedance event
    {stat > lam} coincides exactly with {mr_lower_bound > 0 at lam}.
    """
    m = u.size
    s = np.sort(u)
    t = s[s < 1.0]
    if t.size == 0:
        return 0.0
    fhat = np.searchsorted(s, t, side="right") / m
    denom = np.sqrt(np.maximum(t * (1.0 - t), _VAR_FLOOR) / m)
    return float(np.max((fhat - t) / denom))


def calibrate_lambda(
    m: int,
    alpha: float = 0.05,
    reps: int = 10_000,
    seed: int = 1,
    cache_path: str | os.PathLike | None = None,
) -> BoundingFunctionConfig:
    """Calibrate the envelope multiplier for studies of size ``m``.

    Simulates ``reps`` independent uniform studies, records each study's
    sup standardized excess, then walks the geometric grid 0.5 * 1.05**j
    upward to the smallest multiplier whose exceedance fraction is at
    most ``alpha``.  The walk always terminates: once the candidate
    clears the largest simulated statistic the exceedance is zero.

    ``cache_path`` names a small text sidecar; when it exists and its
    (m, alpha, reps, seed) key matches, the stored multiplier is reused
    without resimulating.
    """
    if not (isinstance(m, int) and m >= 1):
        raise ValidationError("m must be a positive integer", field="m")
    if not (isinstance(alpha, float) and 0.0 < alpha < 1.0):
        raise ValidationError("alpha must be a float in (0, 1)", field="alpha")
    if not (isinstance(reps, int) and reps >= _MIN_REPS):
        raise ValidationError(f"reps must be an integer >= {_MIN_REPS}", field="reps")
    if not isinstance(seed, int):
        raise ValidationError("seed must be an integer", field="seed")
    if cache_path is not None:
        lam = _read_lambda_cache(cache_path, m, alpha, reps, seed)
        if lam is not None:
            return BoundingFunctionConfig(lam, alpha, m, reps, seed)
    sup = np.empty(reps)
    for r in range(reps):
        sup[r] = _sup_standardized_excess(derive_stream(seed, stream_id=r).uniforms(m))
    sup.sort()
    lam = 0.5
    while (reps - np.searchsorted(sup, lam, side="right")) / reps > alpha:
        lam *= 1.05
    if cache_path is not None:
        _write_lambda_cache(cache_path, m, alpha, reps, seed, lam)
    return BoundingFunctionConfig(lam, alpha, m, reps, seed)


def _read_lambda_cache(path, m: int, alpha: float, reps: int, seed: int) -> float | None:
    try:
        with open(path, encoding="utf-8") as fh:
            parts = fh.read().split()
    except OSError:
        return None
    if len(parts) != 5:
        return None
    try:
        key = (int(parts[0]), float(parts[1]), int(parts[2]), int(parts[3]))
        value = float(parts[4])
    except ValueError:
        return None
    if key == (m, alpha, reps, seed):
        return value
    return None


def _write_lambda_cache(path, m: int, alpha: float, reps: int, seed: int, lam: float) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m} {alpha:.17g} {reps} {seed} {lam:.17g}\n")


def mr_lower_bound(study: PValueStudy, config: BoundingFunctionConfig) -> int:
    """Envelope lower bound on the number of false hypotheses overall.

    For each order statistic t < 1 the empirical CDF excess over
    uniform, after subtracting the allowance lam * sqrt(t(1-t)/m), is
    divided by (1 - t) and scaled by m; the bound is the ceiling of the
    best such value, floored at zero.  Positive under the global null
    with probability at most the calibration alpha.
    """
    if config.m != study.m:
        raise ValidationError(
            f"calibration is for m={config.m}, study has m={study.m}", field="m"
        )
    m = study.m
    s = np.sort(study.pvalues)
    t = s[s < 1.0]
    if t.size == 0:
        return 0
    fhat = np.searchsorted(s, t, side="right") / m
    margin = fhat - t - config.lam * np.sqrt(t * (1.0 - t) / m)
    best = float(np.max(margin / (1.0 - t)))
    return max(0, math.ceil(m * best))


def _hc_statistic(p: np.ndarray) -> float:
    m = p.size
    s = np.sort(p)[: m // 2]
    i = np.arange(1.0, s.size + 1.0)
    clamped = np.clip(s, _VAR_FLOOR, _P_CEIL)
    return float(np.max(math.sqrt(m) * (i / m - s) / np.sqrt(clamped * (1.0 - clamped))))


def higher_criticism(study: PValueStudy) -> float:
    """Scan statistic max over i <= m // 2 of
    sqrt(m) * (i/m - p_(i)) / sqrt(p_(i) (1 - p_(i))).

    The denominator clamps p_(i) into [1e-300, 1 - 1e-16] so extreme
    order statistics cannot produce zero variance; the numerator is left
    exact.  Requires at least two p-values.
    """
    if study.m < 2:
        raise ValidationError("higher criticism needs at least 2 p-values", field="pvalues")
    return _hc_statistic(study.pvalues)


def hc_critical_value(m: int, alpha: float = 0.05, reps: int = 10_000, seed: int = 1) -> float:
    """Monte Carlo critical value for :func:`higher_criticism` under the
    global null: the ceil((1 - alpha) * reps)-th smallest of ``reps``
    simulated statistics on uniform studies of size ``m``."""
    if not (isinstance(m, int) and m >= 2):
        raise ValidationError("m must be an integer >= 2", field="m")
    if not (isinstance(alpha, float) and 0.0 < alpha < 1.0):
        raise ValidationError("alpha must be a float in (0, 1)", field="alpha")
    if not (isinstance(reps, int) and reps >= _MIN_REPS):
        raise ValidationError(f"reps must be an integer >= {_MIN_REPS}", field="reps")
    stats = np.empty(reps)
    for r in range(reps):
        stats[r] = _hc_statistic(derive_stream(seed, stream_id=r).uniforms(m))
    stats.sort()
    rank = math.ceil((1.0 - alpha) * reps)
    return float(stats[min(rank, reps) - 1])
