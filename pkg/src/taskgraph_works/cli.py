"""Command-line interface: ``taskgraph-works <subcommand> [flags]``.

Exit status is 0 on success, 2 when a well-formed input yields a negative
verdict (infeasible assignment, missed deadline), and 1 on usage, parse or
validation errors.  Logs go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

from . import __version__
from .analysis.report import ReportConfig, run_report
from .analysis.synthetic import SyntheticConfig, write_synthetic
from .capacity import capacity_report
from .errors import TaskGraphError
from .execution import check_feasible, load_assignment
from .lpp import EcosystemConfig, lpp_accessible, report_dot, report_json
from .model import load_graph, load_pool
from .occupations import RecruitmentScenario, WageModel, load_occupations, scenario_table

log = logging.getLogger("taskgraph_works")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be a positive finite number: {raw!r}")
    return value


def _epsilon(raw: str) -> float:
    value = _positive(raw)
    if value >= 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1): {raw!r}")
    return value


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")
    log.info("wrote %s", out / name)


def cmd_simulate(args) -> int:
    g = load_graph(args.graph)
    a = load_assignment(args.assignment)
    pool = load_pool(args.pool)
    report, trace = check_feasible(g, a, pool, context_reuse=args.context_reuse)
    for v in g.order:
        ex = trace.executions[v]
        print(f"{v}: {'complete' if ex.feasible else 'INCOMPLETE'} ({ex.completed_work:.6g} / {g.sizes[v]:.6g})")
        for k, st in enumerate(ex.steps, start=1):
            state = "" if st.active else "  (inactive)"
            print(f"  {k:>3} {st.worker:<12} context={st.context_time:<12.6g} work={st.contribution:<12.6g} "
                  f"cumulative={st.cumulative:.6g}{state}")
    print("FEASIBLE" if report.feasible else f"INFEASIBLE: {report.first_violation}")
    if args.out is not None:
        _emit(trace.to_csv(), args.out, "trace.csv")
        _emit(_dump(report.to_dict()), args.out, "feasibility.json")
    return EXIT_OK if report.feasible else EXIT_NEGATIVE


def cmd_capacity(args) -> int:
    g = load_graph(args.graph)
    report = capacity_report(g, args.e, args.t, args.epsilon or ())
    _emit(_dump(report), args.out, "capacity.json")
    return EXIT_OK


def cmd_lpp(args) -> int:
    g = load_graph(args.graph)
    cfg = EcosystemConfig(args.e_normal, args.M, args.tau)
    report = lpp_accessible(g, cfg)
    _emit(report_json(report, cfg), args.out, "lpp.json")
    if args.out is not None:
        _emit(report_dot(g, report), args.out, "lpp.dot")
    return EXIT_OK


_COORD_COLUMNS = (
    "occupation", "is_top", "size", "coordination", "status", "required_expertise", "ln_expertise",
    "harmonic_form", "wage", "coordination_share", "ln_expertise_lower", "ln_expertise_upper", "ln_wage_lower", "ln_wage_upper", "preconditions", "notes",
)


def cmd_coord(args) -> int:
    g = load_graph(args.graph)
    occs, file_deadline, _ = load_occupations(args.occupations)
    deadline = args.tau if args.tau is not None else file_deadline
    if deadline is None:
        raise TaskGraphError("no deadline: pass --tau or put 'deadline' in the occupations file")
    scenario = RecruitmentScenario(g, occs, deadline, exclude_internal=args.exclude_internal)
    rows = scenario_table(scenario, WageModel(args.wage_exponent))

    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(_COORD_COLUMNS)
    for row in rows:
        out.writerow(["" if row[k] is None else repr(row[k]) if isinstance(row[k], float) else row[k]
                      for k in _COORD_COLUMNS])
    sys.stdout.write(buf.getvalue())
    if args.out is not None:
        _emit(buf.getvalue(), args.out, "coord.csv")
        _emit(_dump({"deadline": deadline, "wage_exponent": args.wage_exponent, "rows": rows}), args.out, "coord.json")
    return EXIT_NEGATIVE if any(r["status"] != "ok" for r in rows) else EXIT_OK


def cmd_analyze(args) -> int:
    if args.synthetic:
        fixture = SyntheticConfig(seed=args.seed, null=args.null)
        activities, occupations = write_synthetic(args.out, fixture)
    else:
        if args.activities is None or args.occupations is None:
            raise TaskGraphError("analyze needs ACTIVITIES and OCCUPATIONS, or --synthetic")
        activities, occupations = args.activities, args.occupations
    config = ReportConfig(standardize_components=args.standardize_components)
    bundle = run_report(activities, occupations, args.out, config)
    print(f"occupations: {len(bundle.codes)}")
    for row in bundle.correlations:
        print(f"{row['x']} ~ {row['y']}: weighted r = {row['weighted_r']:.4f}, slope = {row['slope']:.4f}")
    print(f"one standard deviation of coordination index ~ {bundle.effect_pct:+.1f}% hourly wage")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="taskgraph-works", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="execute an assignment and check feasibility")
    p.add_argument("graph", type=Path, help="task graph JSON")
    p.add_argument("assignment", type=Path, help="assignment JSON: {node: {workers, times}}")
    p.add_argument("pool", type=Path, help="worker pool JSON: {workers: [{id, time, expertise}]}")
    p.add_argument("--context-reuse", action="store_true",
                   help="charge each shared prerequisite once per worker")
    p.add_argument("--out", type=Path, help="directory for trace.csv and feasibility.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("capacity", help="capacity limit, granularity and worker-count thresholds")
    p.add_argument("graph", type=Path, help="task graph JSON")
    p.add_argument("--t", type=_positive, required=True, help="time budget per worker")
    p.add_argument("--e", type=_positive, default=1.0, help="uniform expertise (default 1)")
    p.add_argument("--epsilon", type=_epsilon, action="append",
                   help="residual fraction for the worker-count table; repeatable")
    p.add_argument("--out", type=Path, help="directory for capacity.json (default: stdout)")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("lpp", help="which subtasks novices can reach by upskilling")
    p.add_argument("graph", type=Path, help="task graph JSON")
    p.add_argument("--M", type=_positive, required=True, help="novice slowdown factor (> 1)")
    p.add_argument("--tau", type=_positive, required=True, help="deadline for a single subtask")
    p.add_argument("--e-normal", type=_positive, default=1.0, help="trained expertise (default 1)")
    p.add_argument("--out", type=Path, help="directory for lpp.json and lpp.dot (default: JSON to stdout)")
    p.set_defaults(func=cmd_lpp)

    p = sub.add_parser("coord", help="coordination intensity, required expertise and wage bounds")
    p.add_argument("graph", type=Path, help="task graph JSON")
    p.add_argument("occupations", type=Path, help="occupations JSON: {occupations: [{id, subtasks}], deadline}")
    p.add_argument("--tau", type=_positive, help="deadline; overrides the file's 'deadline'")
    p.add_argument("--wage-exponent", type=_positive, default=1.5, help="wage power-law exponent (> 1, default 1.5)")
    p.add_argument("--exclude-internal", action="store_true",
                   help="ignore prerequisites that lie inside the same occupation")
    p.add_argument("--out", type=Path, help="directory for coord.csv and coord.json")
    p.set_defaults(func=cmd_coord)

    p = sub.add_parser("analyze", help="coordination index versus wages and employment")
    p.add_argument("activities", type=Path, nargs="?", help="activities CSV")
    p.add_argument("occupations", type=Path, nargs="?", help="occupations CSV")
    p.add_argument("--out", type=Path, required=True, help="output directory (created if absent)")
    p.add_argument("--standardize-components", action="store_true",
                   help="z-score each activity across occupations before averaging")
    p.add_argument("--synthetic", action="store_true",
                   help="generate a synthetic fixture into --out and analyze it")
    p.add_argument("--null", action="store_true", help="with --synthetic, wages ignore the index")
    p.add_argument("--seed", type=int, default=SyntheticConfig.seed, help="seed for --synthetic")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (TaskGraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
