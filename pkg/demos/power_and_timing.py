"""
Reproducible power and timing tables
====================================

The experiments module turns scenario descriptions into deterministic
CSV artifacts.  Same scenario, same bytes, any machine.
"""

import tempfile
from pathlib import Path

from tdbounds import (
    PowerScenario,
    TimingScenario,
    run_power_experiment,
    run_timing_experiment,
    write_power_csv,
    write_timing_csv,
)

# small grid so the demo finishes in seconds; defaults reproduce the
# full study
power = PowerScenario(m_grid=(20, 50, 100), n_false=10, reps=100, seed=1)
rows = run_power_experiment(power)

print("mean certified discoveries (10 false nulls planted):")
print(f"{'m':>6s}  {'method':>16s}  {'mean d':>7s}  {'se':>6s}")
for r in rows:
    print(f"{r.m:>6d}  {r.method:>16s}  {r.mean_bound:>7.3f}  {r.se:>6.3f}")

timing = TimingScenario(
    closure_m_grid=(4, 6, 8, 10),
    shortcut_m_grid=(200_000, 1_200_000),
    local_tests=("simes",),
    runs=3,
)
trows = run_timing_experiment(timing)

print("\nmedian seconds per pass:")
for r in trows:
    print(f"  {r.method:>8s}  {r.local_test:>6s}  m={r.m:>8d}  {r.seconds:.6f}")

# closure time doubles and doubles again; the shortcut barely notices m
closure_secs = [r.seconds for r in trows if r.method == "closure"]
print(f"closure growth factors: "
      + ", ".join(f"{b / a:.1f}x" for a, b in zip(closure_secs, closure_secs[1:])))

# artifacts are byte-stable: writing the same scenario twice gives
# identical files, so results can be diffed across machines
with tempfile.TemporaryDirectory() as tmp:
    a, b = Path(tmp, "a.csv"), Path(tmp, "b.csv")
    write_power_csv(rows, power, a)
    write_power_csv(run_power_experiment(power), power, b)
    print(f"\npower csv reruns identical: {a.read_bytes() == b.read_bytes()}")
    t = Path(tmp, "timing.csv")
    write_timing_csv(trows, timing, t)
    print("timing csv header: " + t.read_text().splitlines()[0])
