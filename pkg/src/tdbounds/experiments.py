"""Benchmark harness: power and timing curves at desk scale.

The power experiment plants a block of false hypotheses with scaled-down
p-values, then tracks the mean lower bound on true discoveries in the
full set as m grows, for the closed-testing shortcut and the envelope
bound side by side.  The timing experiment measures full closure on
small studies (where its exponential cost is visible) and the shortcut
path on large ones.

Everything is deterministic given the scenario seed; reruns produce
byte-identical power CSVs.  Timing seconds naturally vary, but row
structure does not.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .closure import LOCAL_TESTS, defining_family, full_closure
from .globalbounds import calibrate_lambda, mr_lower_bound
from .rng import RngStream, derive_stream
from .shortcut import preprocess, shortcut_bound
from .study import CLOSURE_CAP_CEILING, AnalysisConfig, PValueStudy, ValidationError

_CALIBRATION_REPS = 10_000

POWER_METHODS = ("closed_testing", "mr_envelope")


def simulate_study(m: int, n_false: int, signal_scale: float, stream: RngStream) -> PValueStudy:
    """Draw a study with ``n_false`` planted signals.

    p_i = c_i * u_i with u_i uniform(0,1); the first ``n_false``
    hypotheses get c_i = signal_scale / m, the rest c_i = 1.  Labels are
    h1..hm.  The same stream state always yields the same study.
    """
    if not (isinstance(m, int) and m >= 1):
        raise ValidationError("m must be a positive integer", field="m")
    if not (isinstance(n_false, int) and 0 <= n_false <= m):
        raise ValidationError("n_false must be an integer in [0, m]", field="n_false")
    if not (isinstance(signal_scale, float) and 0.0 < signal_scale <= 1.0):
        raise ValidationError("signal_scale must be a float in (0, 1]", field="signal_scale")
    p = stream.uniforms(m)
    p[:n_false] *= signal_scale / m
    labels = tuple(f"h{i}" for i in range(1, m + 1))
    return PValueStudy(labels, p)


@dataclass(frozen=True)
class PowerScenario:
    """Grid and model settings for the power experiment."""

    m_grid: tuple[int, ...] = (20, 50, 100, 200, 500, 1000)
    n_false: int = 10
    signal_scale: float = 0.1
    reps: int = 500
    alpha: float = 0.05
    seed: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "m_grid", tuple(self.m_grid))
        for m in self.m_grid:
            if not (isinstance(m, int) and m >= 1):
                raise ValidationError("m_grid entries must be positive integers", field="m_grid")
        if not (isinstance(self.n_false, int) and self.n_false >= 0):
            raise ValidationError("n_false must be a nonnegative integer", field="n_false")
        if self.m_grid and self.n_false > min(self.m_grid):
            raise ValidationError(
                f"n_false={self.n_false} exceeds smallest grid size {min(self.m_grid)}",
                field="n_false",
            )
        if not (isinstance(self.signal_scale, float) and 0.0 < self.signal_scale <= 1.0):
            raise ValidationError("signal_scale must be a float in (0, 1]", field="signal_scale")
        if not (isinstance(self.reps, int) and self.reps >= 1):
            raise ValidationError("reps must be a positive integer", field="reps")
        if not (isinstance(self.alpha, float) and 0.0 < self.alpha < 1.0):
            raise ValidationError("alpha must be a float in (0, 1)", field="alpha")
        if not isinstance(self.seed, int):
            raise ValidationError("seed must be an integer", field="seed")


@dataclass(frozen=True)
class TimingScenario:
    """Grids for the closure and shortcut timing arms."""

    closure_m_grid: tuple[int, ...] = tuple(range(2, 13))
    shortcut_m_grid: tuple[int, ...] = (
        200_000,
        400_000,
        600_000,
        800_000,
        1_000_000,
        1_200_000,
    )
    local_tests: tuple[str, ...] = LOCAL_TESTS
    alpha: float = 0.05
    seed: int = 1
    runs: int = 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "closure_m_grid", tuple(self.closure_m_grid))
        object.__setattr__(self, "shortcut_m_grid", tuple(self.shortcut_m_grid))
        object.__setattr__(self, "local_tests", tuple(self.local_tests))
        for m in self.closure_m_grid:
            if not (isinstance(m, int) and 1 <= m <= CLOSURE_CAP_CEILING):
                raise ValidationError(
                    f"closure_m_grid entries must be integers in [1, {CLOSURE_CAP_CEILING}]",
                    field="closure_m_grid",
                )
        for m in self.shortcut_m_grid:
            if not (isinstance(m, int) and m >= 1):
                raise ValidationError(
                    "shortcut_m_grid entries must be positive integers",
                    field="shortcut_m_grid",
                )
        if not self.local_tests or len(set(self.local_tests)) != len(self.local_tests):
            raise ValidationError("local_tests must be a nonempty set", field="local_tests")
        for name in self.local_tests:
            if name not in LOCAL_TESTS:
                raise ValidationError(f"unknown local test {name!r}", field="local_tests")
        if not (isinstance(self.alpha, float) and 0.0 < self.alpha < 1.0):
            raise ValidationError("alpha must be a float in (0, 1)", field="alpha")
        if not isinstance(self.seed, int):
            raise ValidationError("seed must be an integer", field="seed")
        if not (isinstance(self.runs, int) and self.runs >= 3):
            raise ValidationError("runs must be an integer >= 3", field="runs")


@dataclass(frozen=True)
class PowerRow:
    m: int
    method: str
    mean_bound: float
    se: float


@dataclass(frozen=True)
class TimingRow:
    method: str
    local_test: str
    m: int
    seconds: float


def run_power_experiment(scenario: PowerScenario, cache_dir=None) -> list[PowerRow]:
    """Mean and Monte Carlo standard error of the full-set lower bound,
    per grid size, for both methods.

    Replicate r at grid position g draws from stream (g << 32) | r, so
    every cell is reproducible in isolation and the two methods are
    paired on identical studies.  ``cache_dir`` optionally holds the
    envelope calibration sidecars.
    """
    rows: list[PowerRow] = []
    config = AnalysisConfig(alpha=scenario.alpha)
    for gi, m in enumerate(scenario.m_grid):
        cache_path = None if cache_dir is None else f"{cache_dir}/lambda_m{m}.txt"
        envelope = calibrate_lambda(
            m, scenario.alpha, _CALIBRATION_REPS, scenario.seed, cache_path=cache_path
        )
        ct = np.empty(scenario.reps)
        mr = np.empty(scenario.reps)
        full = None
        for r in range(scenario.reps):
            stream = derive_stream(scenario.seed, (gi << 32) | r)
            study = simulate_study(m, scenario.n_false, scenario.signal_scale, stream)
            if full is None:
                full = study.full_set()
            state = preprocess(study, config)
            ct[r] = shortcut_bound(state, full).d
            mr[r] = mr_lower_bound(study, envelope)
        for method, bounds in (("closed_testing", ct), ("mr_envelope", mr)):
            se = 0.0 if scenario.reps == 1 else float(np.std(bounds, ddof=1)) / np.sqrt(
                scenario.reps
            )
            rows.append(PowerRow(m, method, float(np.mean(bounds)), se))
    return rows


def _timing_study(m: int) -> PValueStudy:
    # every subset rejects under both local tests, so the closure sweep
    # does uniform work across all 2^m - 1 sets
    p = (np.arange(m) + 1.0) * 1e-9
    return PValueStudy(tuple(f"h{i}" for i in range(1, m + 1)), p)


def run_timing_experiment(scenario: TimingScenario) -> list[TimingRow]:
    """Median wall-clock times for full closure (plus defining family)
    on the small grid and preprocess-plus-query on the large grid.

    Each cell gets one untimed warmup and ``scenario.runs`` timed
    samples (batched for very fast cells, see ``_median_time``), all
    strictly serial; the timer wraps the algorithm only, never study
    construction or I/O.
    """
    rows: list[TimingRow] = []
    config = AnalysisConfig(alpha=scenario.alpha, closure_cap=CLOSURE_CAP_CEILING)
    for local_test in scenario.local_tests:
        for m in scenario.closure_m_grid:
            study = _timing_study(m)

            def closure_pass() -> None:
                defining_family(full_closure(study, config, local_test))

            rows.append(TimingRow("closure", local_test, m, _median_time(closure_pass, scenario.runs)))
    for m in scenario.shortcut_m_grid:
        stream = derive_stream(scenario.seed, m)
        study = PValueStudy(tuple(f"h{i}" for i in range(1, m + 1)), stream.uniforms(m))
        full = study.full_set()

        def shortcut_pass() -> None:
            shortcut_bound(preprocess(study, config), full)

        rows.append(TimingRow("shortcut", "simes", m, _median_time(shortcut_pass, scenario.runs)))
    return rows


def _median_time(fn, runs: int) -> float:
    """Median per-call seconds over ``runs`` samples.

    Sub-millisecond callables are batched (several calls per timed
    sample, dividing by the batch size) so a sample reflects work rather
    than timer granularity; slow callables keep one call per sample.
    """
    fn()
    loops = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(loops):
            fn()
        if time.perf_counter() - t0 >= 0.002 or loops >= 10_000:
            break
        loops *= 4
    samples = []
    for _ in range(runs):
        t0 = time.perf_counter()
        for _ in range(loops):
            fn()
        samples.append((time.perf_counter() - t0) / loops)
    return statistics.median(samples)


def write_power_csv(rows: list[PowerRow], scenario: PowerScenario, path) -> None:
    grid = ",".join(str(m) for m in scenario.m_grid)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# power m_grid={grid} n_false={scenario.n_false}"
            f" signal_scale={scenario.signal_scale:.17g} reps={scenario.reps}"
            f" alpha={scenario.alpha:.17g} seed={scenario.seed}\n"
        )
        fh.write("m,method,mean_bound,se,reps,alpha,seed\n")
        for row in rows:
            fh.write(
                f"{row.m},{row.method},{row.mean_bound:.17g},{row.se:.17g},"
                f"{scenario.reps},{scenario.alpha:.17g},{scenario.seed}\n"
            )


def write_timing_csv(rows: list[TimingRow], scenario: TimingScenario, path) -> None:
    closure_grid = ",".join(str(m) for m in scenario.closure_m_grid)
    shortcut_grid = ",".join(str(m) for m in scenario.shortcut_m_grid)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# timing closure_m_grid={closure_grid} shortcut_m_grid={shortcut_grid}"
            f" local_tests={','.join(scenario.local_tests)} runs={scenario.runs}"
            f" alpha={scenario.alpha:.17g} seed={scenario.seed}\n"
        )
        fh.write("method,local_test,m,seconds\n")
        for row in rows:
            fh.write(f"{row.method},{row.local_test},{row.m},{row.seconds:.6g}\n")


def _parse_kv(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"line {number}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def _to_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"{key} must be an integer, got {value!r}", field=key) from None


def _to_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValidationError(f"{key} must be a number, got {value!r}", field=key) from None


def _to_int_list(key: str, value: str) -> tuple[int, ...]:
    return tuple(_to_int(key, part) for part in value.split(",") if part.strip() != "")


def parse_power_config(text: str) -> PowerScenario:
    """Build a PowerScenario from key=value lines; unknown keys are errors."""
    kwargs = {}
    for key, value in _parse_kv(text).items():
        if key == "m_grid":
            kwargs[key] = _to_int_list(key, value)
        elif key in ("n_false", "reps", "seed"):
            kwargs[key] = _to_int(key, value)
        elif key in ("signal_scale", "alpha"):
            kwargs[key] = _to_float(key, value)
        else:
            raise ValidationError(f"unknown power config key {key!r}", field=key)
    return PowerScenario(**kwargs)


def parse_timing_config(text: str) -> TimingScenario:
    """Build a TimingScenario from key=value lines; unknown keys are errors."""
    kwargs = {}
    for key, value in _parse_kv(text).items():
        if key in ("closure_m_grid", "shortcut_m_grid"):
            kwargs[key] = _to_int_list(key, value)
        elif key == "local_tests":
            kwargs[key] = tuple(part.strip() for part in value.split(",") if part.strip())
        elif key in ("seed", "runs"):
            kwargs[key] = _to_int(key, value)
        elif key == "alpha":
            kwargs[key] = _to_float(key, value)
        else:
            raise ValidationError(f"unknown timing config key {key!r}", field=key)
    return TimingScenario(**kwargs)
