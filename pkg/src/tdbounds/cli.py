"""Command-line entry point.

One subcommand per capability, all speaking the package's CSV and text
formats.  Query commands print line-oriented `key: value` pairs by
default and machine-readable rows with `--format csv`.  Validation or
configuration problems exit with status 2 and a one-line diagnostic on
stderr; success exits 0.
"""

from __future__ import annotations

import argparse
import sys

from .closure import (
    LOCAL_TESTS,
    SetFamily,
    defining_family,
    discovery_bound,
    full_closure,
    load_family_lines,
    write_family,
)
from .dualization import condition_on_nulls, minimal_transversals
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
    calibrate_lambda,
    hc_critical_value,
    higher_criticism,
    mr_lower_bound,
)
from .rng import derive_stream
from .service import make_server
from .shortcut import preprocess, shortcut_bound
from .study import (
    AnalysisConfig,
    HypothesisSet,
    ValidationError,
    _check_label,
    load_study,
    write_study,
)


def _split_labels(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip() != ""]


def _cmd_bound(args) -> int:
    study = load_study(args.study)
    config = AnalysisConfig(alpha=args.alpha)
    selection = study.subset(_split_labels(args.set))
    if args.method == "simes":
        # shortcut is exact-equivalent to closure at every m
        d = shortcut_bound(preprocess(study, config), selection).d
    else:
        if study.m > config.closure_cap:
            raise ValidationError(
                f"fisher bounds need exact closure (m <= {config.closure_cap}); "
                f"this study has m = {study.m}",
                field="method",
            )
        d = discovery_bound(full_closure(study, config, "fisher"), selection).d
    if args.format == "csv":
        print("selected,d,alpha")
        print(f"{len(selection)},{d},{args.alpha!r}")
    else:
        print(f"selected: {len(selection)}")
        print(f"d: {d}")
        print(f"alpha: {args.alpha!r}")
    return 0


def _cmd_closure(args) -> int:
    study = load_study(args.study)
    config = AnalysisConfig(alpha=args.alpha)
    family = defining_family(full_closure(study, config, args.method))
    write_family(family, study, args.out_defining)
    print(f"defining sets: {len(family.sets)}")
    print(f"wrote: {args.out_defining}")
    return 0


def _cmd_dual(args) -> int:
    label_sets = load_family_lines(args.family)
    for labels in label_sets:
        for lab in labels:
            _check_label(lab, f"family file {args.family}")
    universe = sorted({lab for labels in label_sets for lab in labels})
    index = {lab: i for i, lab in enumerate(universe)}
    family = SetFamily.from_sets(
        [tuple(index[lab] for lab in labels) for labels in label_sets], len(universe)
    )
    dual = minimal_transversals(family)

    def fmt(s: HypothesisSet) -> str:
        return ",".join(universe[i] for i in s.indices)

    conditioned = None
    if args.known_null is not None:
        known = _split_labels(args.known_null)
        for lab in known:
            if lab not in index:
                raise ValidationError(
                    f"unknown label {lab!r} (not in family)", field="known_null"
                )
        nulls = HypothesisSet.of(index[lab] for lab in known)
        conditioned = condition_on_nulls(dual, nulls)

    if args.format == "csv":
        print("kind,labels")
        for s in dual.sets:
            print(f"transversal,{fmt(s).replace(',', ';')}")
        if conditioned is not None:
            surviving, implicated = conditioned
            for s in surviving.sets:
                print(f"surviving,{fmt(s).replace(',', ';')}")
            print(f"implicated,{fmt(implicated).replace(',', ';')}")
    else:
        print(f"transversals: {len(dual.sets)}")
        if dual.truncated:
            print("truncated: true")
        for s in dual.sets:
            print(fmt(s) or "(empty)")
        if conditioned is not None:
            surviving, implicated = conditioned
            print(f"surviving: {len(surviving.sets)}")
            for s in surviving.sets:
                print(fmt(s) or "(empty)")
            print(f"implicated: {fmt(implicated) or '(none)'}")
    return 0


def _cmd_mr_bound(args) -> int:
    study = load_study(args.study)
    envelope = calibrate_lambda(study.m, args.alpha, args.calib_reps, args.seed)
    bound = mr_lower_bound(study, envelope)
    if args.format == "csv":
        print("lambda,bound")
        print(f"{envelope.lam!r},{bound}")
    else:
        print(f"lambda: {envelope.lam!r}")
        print(f"bound: {bound}")
    return 0


def _cmd_hc(args) -> int:
    study = load_study(args.study)
    stat = higher_criticism(study)
    critical = None
    if args.alpha is not None:
        critical = hc_critical_value(study.m, args.alpha, args.reps, args.seed)
    if args.format == "csv":
        print("statistic,critical_value")
        print(f"{stat!r},{'' if critical is None else repr(critical)}")
    else:
        print(f"statistic: {stat!r}")
        if critical is not None:
            print(f"critical_value: {critical!r}")
    return 0


def _cmd_simulate(args) -> int:
    n_false = min(10, args.m) if args.n_false is None else args.n_false
    study = simulate_study(args.m, n_false, args.signal_scale, derive_stream(args.seed, 0))
    write_study(study, args.out)
    print(f"wrote: {args.out}")
    return 0


def _cmd_power(args) -> int:
    if args.config is None:
        scenario = PowerScenario()
    else:
        with open(args.config, encoding="utf-8") as fh:
            scenario = parse_power_config(fh.read())
    rows = run_power_experiment(scenario)
    write_power_csv(rows, scenario, args.out)
    print(f"wrote: {args.out}")
    return 0


def _cmd_bench(args) -> int:
    if args.config is None:
        scenario = TimingScenario()
    else:
        with open(args.config, encoding="utf-8") as fh:
            scenario = parse_timing_config(fh.read())
    rows = run_timing_experiment(scenario)
    write_timing_csv(rows, scenario, args.out)
    print(f"wrote: {args.out}")
    return 0


def _cmd_serve(args) -> int:
    server = make_server(
        port=args.port,
        host=args.host,
        study_dir=args.study_dir,
        ui_dir=args.ui_dir,
    )
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("plain", "csv"), default="plain")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdbounds",
        description="Simultaneous lower bounds on true discoveries in any set of hypotheses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="lower bound on true discoveries in a set")
    p.add_argument("--study", required=True, help="study CSV (label,p)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--method", choices=LOCAL_TESTS, default="simes")
    p.add_argument("--set", required=True, help="comma-separated labels (empty for the empty set)")
    _add_format(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("closure", help="run exact closure and write the defining family")
    p.add_argument("--study", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--method", choices=LOCAL_TESTS, default="simes")
    p.add_argument("--out-defining", required=True, help="output family file")
    p.set_defaults(func=_cmd_closure)

    p = sub.add_parser("dual", help="minimal transversals of a family file")
    p.add_argument("--family", required=True, help="family file (one comma-joined set per line)")
    p.add_argument(
        "--known-null",
        default=None,
        help="comma-separated labels to treat as known true nulls",
    )
    _add_format(p)
    p.set_defaults(func=_cmd_dual)

    p = sub.add_parser("mr-bound", help="envelope lower bound on false hypotheses overall")
    p.add_argument("--study", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--calib-reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    _add_format(p)
    p.set_defaults(func=_cmd_mr_bound)

    p = sub.add_parser("hc", help="higher-criticism statistic")
    p.add_argument("--study", required=True)
    p.add_argument(
        "--alpha",
        type=float,
        default=None,
        help="when given, also print the Monte Carlo critical value",
    )
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    _add_format(p)
    p.set_defaults(func=_cmd_hc)

    p = sub.add_parser("simulate", help="draw a study from the planted-signal model")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--n-false", type=int, default=None, help="default min(10, m)")
    p.add_argument("--signal-scale", type=float, default=0.1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("power", help="run the power experiment and write power.csv")
    p.add_argument("--config", default=None, help="key=value scenario file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("bench", help="run the timing experiment and write timing.csv")
    p.add_argument("--config", default=None, help="key=value scenario file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--study-dir", default=None, help="directory for session persistence")
    p.add_argument("--ui-dir", default=None, help="built UI bundle to serve statically")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
