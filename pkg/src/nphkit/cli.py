import argparse
import json
import sys
import warnings
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from .aftmod import aft_fit
from .config import BIAS_MODELS, TEST_METHODS, AnalysisOptions, RunConfig, resolve_workers
from .coxmod import cox_fit, grambsch_therneau_test, schoenfeld_global_test
from .exceptions import (
    ConvergenceError,
    DataError,
    DegenerateStatisticError,
    NotPositiveSemidefiniteError,
    NphkitError,
)
from .helper import format_table, to_jsonable, write_json
from .metrics import ScenarioReport, build_report
from .nptests import LOGRANK, maxcombo, weighted_logrank
from .rmst import rmst_difference_test
from .simeng import ReplicationPlan, builtin_scenarios, load_scenario, run_plan
from .survcore import SurvivalDataset, read_ipd_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3

ANALYSIS_COLUMNS = ("section", "name", "metric", "value")


def _recorded(report: Dict, section: str, name: str, run: Callable[[], Dict]) -> Optional[Dict]:
    try:
        value = run()
    except NphkitError as e:
        report["errors"][f"{section}.{name}"] = f"{type(e).__name__}: {e}"
        return None
    report[section][name] = value
    return value


def analyze_dataset(data: SurvivalDataset, options: AnalysisOptions = AnalysisOptions()) -> Dict:
    """Every test, both PH diagnostics and the Cox/GG/GF coefficient summaries for one dataset.

    A failing method is reported under "errors" and the remaining results are kept.
    """
    data.require_two_arms()
    n0, n1 = data.arm_sizes()
    if min(n0, n1) < 2:
        raise DataError(f"each arm needs at least 2 records (arm 0: {n0}, arm 1: {n1})")

    report = {
        "n": len(data), "n_events": data.n_events, "arm_sizes": [n0, n1],
        "tests": {}, "models": {}, "ph_diagnostics": {}, "errors": {},
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)

        _recorded(report, "tests", "logrank",
                  lambda: weighted_logrank(data, LOGRANK, left_limit=options.weight_left_limit).to_dict())
        _recorded(report, "tests", "maxcombo",
                  lambda: maxcombo(data, correlation=options.maxcombo_correlation,
                                   left_limit=options.weight_left_limit, method=options.mvn_method,
                                   seed=options.mvn_seed).to_dict())
        _recorded(report, "tests", "rmst_diff", lambda: rmst_difference_test(data, rule=options.t_star_rule).to_dict())

        fits = {}

        def run_cox():
            fits["cox"] = cox_fit(data)
            fits["cox"].require_converged()
            return fits["cox"].to_dict()

        _recorded(report, "models", "cox", run_cox)
        for family in ("gg", "gf"):
            def run_aft(family=family):
                fit = aft_fit(data, family)
                fit.require_converged()
                return fit.to_dict()

            if _recorded(report, "models", family, run_aft) is not None:
                model = report["models"][family]
                _recorded(report, "tests", family,
                          lambda model=model: {"W": model["wald_statistic"], "p_value": model["wald_p"]})

        if "cox" in report["models"]:
            fit = fits["cox"]
            _recorded(report, "ph_diagnostics", "grambsch_therneau",
                      lambda: grambsch_therneau_test(fit, data, options.gt_transform).to_dict())
            _recorded(report, "ph_diagnostics", "schoenfeld_global",
                      lambda: schoenfeld_global_test(fit, data).to_dict())
    return report


def analysis_frame(report: Dict) -> pd.DataFrame:
    rows = []
    for section in ("tests", "models", "ph_diagnostics"):
        for name, values in report[section].items():
            for metric, value in values.items():
                if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
                    rows.append((section, name, metric, float(value)))
    return pd.DataFrame(rows, columns=list(ANALYSIS_COLUMNS))


def _print_analysis(report: Dict) -> None:
    tests = report["tests"]
    rows = []
    for name in TEST_METHODS:
        if name in tests:
            t = tests[name]
            statistic = t.get("Z", t.get("Z_max", t.get("W")))
            rows.append((name, statistic, t["p_value"]))
    print(format_table(("test", "statistic", "p-value"), rows, title="Treatment-effect tests"))
    print()

    rows = []
    models = report["models"]
    if "cox" in models:
        m = models["cox"]
        rows.append(("Cox", m["beta"], m["se"], None, m["HR"], m["p_value"]))
    for family in ("gg", "gf"):
        if family in models:
            m = models[family]
            rows.append((family.upper(), m["estimates"]["beta1"], m["standard_errors"]["beta1"], m["AF"], None,
                         m["wald_p"]))
    print(format_table(("model", "beta", "se", "AF", "HR", "p-value"), rows,
                       title="Coefficients (AF = exp(-beta), HR = exp(beta))"))
    print()

    rows = [(d["kind"], d["transform"], d["statistic"], d["df"], d["p_value"])
            for d in report["ph_diagnostics"].values()]
    if rows:
        print(format_table(("diagnostic", "transform", "chi2", "df", "p-value"), rows,
                           title="Proportional-hazards diagnostics"))
        print()
    for name, message in report["errors"].items():
        print(f"Warning: {name} not available: {message}", file=sys.stderr)


def cmd_analyze(config: RunConfig) -> Dict:
    results = {}
    for path in config.inputs:
        data = read_ipd_csv(path)
        if not config.quiet:
            print(f"Analyzing {path} ({len(data)} records)")
            print()
        report = analyze_dataset(data, config.options)
        report["input"] = str(path)
        if not config.quiet:
            _print_analysis(report)
        results[str(path)] = report

    if config.output:
        if config.output_format == "csv":
            frames = [analysis_frame(r).assign(input=p) for p, r in results.items()]
            frame = pd.concat(frames, ignore_index=True)[["input", *ANALYSIS_COLUMNS]]
            try:
                frame.to_csv(config.output, index=False)
            except OSError as e:
                raise DataError(f"cannot write '{config.output}': {e.strerror}")
        else:
            payload = next(iter(results.values())) if len(results) == 1 else results
            write_json(payload, config.output)
        if not config.quiet:
            print(f"Report written to {config.output}")
    return results


def _print_power(report: ScenarioReport) -> None:
    rows = [(m, p.rejection, p.se, p.n_used, p.n_failed) for m, p in report.power.items()]
    title = f"Scenario {report.scenario}: rejection rate at alpha={report.alpha:g} over {report.n_reps} replications"
    print(format_table(("method", "rejection", "se", "used", "failed"), rows, title=title))
    print()
    if report.bias:
        rows = []
        for model, b in report.bias.items():
            rows.append((model, b.n_used, b.n_failed,
                         float(np.nanmax(np.abs(b.median_bias["rmst_diff"]))),
                         float(np.nanmax(np.abs(b.median_bias["surv_diff"]))),
                         b.mst_median_bias[0], b.mst_median_bias[1]))
        print(format_table(("model", "used", "failed", "max|bias dRMST|", "max|bias dS|", "MST bias 0", "MST bias 1"),
                           rows, title="Median time-dependent bias"))
        print()
    for model in report.absent_models:
        print(f"Warning: no successful {model} fit in any replication", file=sys.stderr)


def cmd_simulate(config: RunConfig) -> ScenarioReport:
    scenario = load_scenario(config.scenario)
    plan = ReplicationPlan(scenario=scenario, n_reps=config.n_reps, base_seed=config.base_seed,
                           methods=config.methods, bias_models=config.bias_models, alpha=config.alpha,
                           options=config.options)
    output = config.output or f"{scenario.name}_report.{config.output_format}"
    if not config.quiet:
        print(f"Simulating {scenario.name}: {plan.n_reps} replications, seed {plan.base_seed}, "
              f"{config.workers} worker(s)")
        print()

    results = list(run_plan(plan, workers=config.workers, progress=not config.quiet))
    report = build_report(plan, results)
    report.write(output, config.output_format)
    if not config.quiet:
        _print_power(report)
        print(f"Report written to {output}")
    return report


def _interval_rows(scenario) -> List[tuple]:
    arm0, arm1 = scenario.arm0, scenario.arm1
    ends = list(arm0.knots[1:])
    if len(arm0.knots) == len(arm0.rates):
        ends.append(np.inf)
    hrs = arm0.hazard_ratios(arm1)
    return [(f"[{start:g}, {end:g})", r0, r1, hr)
            for start, end, r0, r1, hr in zip(arm0.starts, ends, arm0.rates, arm1.rates, hrs)]


def cmd_scenarios(as_json: bool = False) -> List[Dict]:
    scenarios = builtin_scenarios()
    payload = [s.to_dict() for s in scenarios]
    if as_json:
        print(json.dumps(to_jsonable(payload), indent=2))
        return payload
    for s in scenarios:
        header = (f"{s.name}: {s.description} (n={s.n0}/{s.n1}, follow-up {s.followup:g}, "
                  f"censoring rate {s.random_censor_rate:g})")
        print(format_table(("interval", "lambda0", "lambda1", "HR"), _interval_rows(s), digits=3, title=header))
        print()
    return payload


def cmd_report(config: RunConfig) -> ScenarioReport:
    report = ScenarioReport.from_json(config.inputs[0])
    _print_power(report)
    if config.output:
        report.write(config.output, config.output_format)
        print(f"Report written to {config.output}")
    return report


def _add_analysis_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('analysis options')
    group.add_argument(
        '--maxcombo-correlation',
        choices=['estimated', 'identity'],
        default='estimated',
        help='Correlation of the MaxCombo components (default: estimated)'
    )
    group.add_argument(
        '--mvn-method',
        choices=['quadrature', 'qmc'],
        default='quadrature',
        help='Multivariate normal integration for the MaxCombo p-value (default: quadrature)'
    )
    group.add_argument(
        '--t-star-rule',
        choices=['event', 'followup'],
        default='event',
        help='RMST truncation time: min over arms of the last event or last follow-up (default: event)'
    )
    group.add_argument(
        '--gt-transform',
        choices=['km', 'rank', 'identity', 'log'],
        default='km',
        help='Time transform of the Grambsch-Therneau test (default: km)'
    )
    group.add_argument(
        '--literal-weights',
        action='store_true',
        help='Evaluate FH weights at S(t) instead of the left limit S(t-)'
    )


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('-o', '--output', default=None, help='Output file')
    parser.add_argument('--csv', action='store_true', help='Write the tidy CSV layout instead of JSON')
    parser.add_argument('-q', '--quiet', action='store_true', help='No progress or summary output')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='nphkit',
        description='nphkit - treatment-effect testing under non-proportional hazards',
        epilog='''
Commands:
  analyze    Run all tests, PH diagnostics and model fits on IPD CSV files
  simulate   Estimate power/type I error and bias for a trial scenario
  scenarios  Print the builtin scenario parameters
  report     Re-render a saved scenario report

Examples:
  %(prog)s analyze trial.csv                          # Tests and coefficient table
  %(prog)s analyze trial.csv -o trial.json            # Also write the JSON report
  %(prog)s simulate --scenario null --reps 2000 --methods logrank
  %(prog)s simulate --scenario first --no-bias --csv  # Power only, tidy CSV
  %(prog)s simulate --scenario my_trial.json -w 8     # Scenario from a JSON config
  %(prog)s scenarios --json
  %(prog)s report first_report.json --csv -o first.csv

Exit codes: 0 success, 2 input error, 3 computation failure.
Worker count: --workers, else $NPHKIT_WORKERS, else the CPU count.
        ''',
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    sub = parser.add_subparsers(dest='command', required=True)

    analyze = sub.add_parser('analyze', help='Analyze individual patient data')
    analyze.add_argument('inputs', nargs='+', help='IPD CSV file(s) with columns time,event,arm')
    _add_output_options(analyze)
    _add_analysis_options(analyze)

    simulate = sub.add_parser('simulate', help='Simulate a scenario')
    simulate.add_argument('-s', '--scenario', required=True, help='Builtin scenario name or scenario JSON file')
    simulate.add_argument('-n', '--reps', type=int, default=2000, help='Replications (default: 2000)')
    simulate.add_argument('--seed', type=int, default=7, help='Base seed (default: 7)')
    simulate.add_argument('--alpha', type=float, default=None,
                          help='Two-sided significance level (default: the scenario level, 0.05)')
    simulate.add_argument(
        '-m', '--methods',
        nargs='+',
        choices=list(TEST_METHODS),
        default=list(TEST_METHODS),
        help='Tests to run (default: all)'
    )
    simulate.add_argument(
        '-b', '--bias-models',
        nargs='+',
        choices=list(BIAS_MODELS),
        default=list(BIAS_MODELS),
        help='Models whose time-dependent bias is estimated (default: all)'
    )
    simulate.add_argument('--no-bias', action='store_true', help='Skip the bias fits')
    simulate.add_argument('-w', '--workers', type=int, default=None, help='Worker processes')
    _add_output_options(simulate)
    _add_analysis_options(simulate)

    scenarios = sub.add_parser('scenarios', help='List builtin scenarios')
    scenarios.add_argument('--json', action='store_true', help='Print the scenarios as JSON')

    report = sub.add_parser('report', help='Show a saved scenario report')
    report.add_argument('input', help='Scenario report JSON')
    report.add_argument('-o', '--output', default=None, help='Write the report again (JSON or --csv)')
    report.add_argument('--csv', action='store_true', help='Convert to the tidy CSV layout')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    options = AnalysisOptions()
    if args.command in ('analyze', 'simulate'):
        options = AnalysisOptions(
            weight_left_limit=not args.literal_weights,
            maxcombo_correlation=args.maxcombo_correlation,
            mvn_method=args.mvn_method,
            t_star_rule=args.t_star_rule,
            gt_transform=args.gt_transform,
        )
    output_format = 'csv' if getattr(args, 'csv', False) else 'json'
    if args.command == 'analyze':
        return RunConfig(command='analyze', inputs=tuple(args.inputs), output=args.output,
                         output_format=output_format, quiet=args.quiet, options=options)
    if args.command == 'simulate':
        return RunConfig(
            command='simulate',
            scenario=args.scenario,
            n_reps=args.reps,
            base_seed=args.seed,
            alpha=args.alpha,
            methods=tuple(args.methods),
            bias_models=() if args.no_bias else tuple(args.bias_models),
            output=args.output,
            output_format=output_format,
            workers=resolve_workers(args.workers),
            quiet=args.quiet,
            options=options,
        )
    if args.command == 'report':
        return RunConfig(command='report', inputs=(args.input,), output=args.output, output_format=output_format)
    return RunConfig(command='scenarios')


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = config_from_args(args)
        if config.command == 'analyze':
            cmd_analyze(config)
        elif config.command == 'simulate':
            cmd_simulate(config)
        elif config.command == 'report':
            cmd_report(config)
        else:
            cmd_scenarios(as_json=args.json)
    except (DegenerateStatisticError, ConvergenceError, NotPositiveSemidefiniteError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    except DataError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NphkitError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
