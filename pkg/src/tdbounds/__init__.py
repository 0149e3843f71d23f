"""Simultaneous lower bounds on true discoveries for exploratory testing.

Reject any set of hypotheses you find interesting, as often as you like:
every reported bound on the number of true discoveries in a selected set
holds simultaneously at the chosen level.  Exact closed testing powers
small studies; a sorted-p-value shortcut scales the Simes variant to
millions of hypotheses; dual set representations support follow-up
planning; envelope and higher-criticism bounds answer the global
"how much signal is there" question.
"""

from .closure import (
    BoundResult,
    ClosureMap,
    SetFamily,
    bound_from_defining,
    defining_family,
    discovery_bound,
    discovery_bound_table,
    full_closure,
    load_family,
    write_family,
)
from .dualization import condition_on_nulls, minimal_transversals, verify_duality
from .experiments import (
    PowerScenario,
    TimingScenario,
    parse_power_config,
    parse_timing_config,
    run_power_experiment,
    run_timing_experiment,
    simulate_study,
    write_power_csv,
    write_timing_csv,
)
from .globalbounds import (
    BoundingFunctionConfig,
    calibrate_lambda,
    hc_critical_value,
    higher_criticism,
    mr_lower_bound,
)
from .localtests import (
    LocalTestDecision,
    chisq_even_df_survival,
    fisher_local,
    simes_local,
)
from .rng import RngStream, derive_stream
from .service import make_server
from .shortcut import SimesShortcutState, bound_curve, preprocess, shortcut_bound
from .study import (
    AnalysisConfig,
    HypothesisSet,
    PValueStudy,
    ValidationError,
    load_study,
    write_study,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BoundResult",
    "BoundingFunctionConfig",
    "ClosureMap",
    "HypothesisSet",
    "LocalTestDecision",
    "PValueStudy",
    "PowerScenario",
    "RngStream",
    "SetFamily",
    "SimesShortcutState",
    "TimingScenario",
    "ValidationError",
    "bound_curve",
    "bound_from_defining",
    "calibrate_lambda",
    "chisq_even_df_survival",
    "condition_on_nulls",
    "defining_family",
    "derive_stream",
    "discovery_bound",
    "discovery_bound_table",
    "fisher_local",
    "full_closure",
    "hc_critical_value",
    "higher_criticism",
    "load_family",
    "load_study",
    "make_server",
    "minimal_transversals",
    "mr_lower_bound",
    "parse_power_config",
    "parse_timing_config",
    "preprocess",
    "run_power_experiment",
    "run_timing_experiment",
    "shortcut_bound",
    "simes_local",
    "simulate_study",
    "verify_duality",
    "write_family",
    "write_power_csv",
    "write_study",
    "write_timing_csv",
]
