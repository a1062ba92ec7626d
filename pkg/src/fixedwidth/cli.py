"""Command-line entry point: ``fixedwidth {simulate,reproduce,case-study,plan,advise}``."""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import experiments
from .advisor import ADVISOR_PROCEDURES, DEFAULT_PROCEDURE, AdvisorSession, SessionError, SessionHeader
from .allocation import min_obs_two_stage_plan, two_stage_plan
from .lookahead import DEFAULT_BUDGET
from .metrics import FORMATS, render_table, summarize
from .procedures import PROCEDURES
from .reference import REFERENCE
from .sim import SCENARIOS, RngPolicy, load_scenario, records_csv, run_experiment
from .stats import CostModel, TargetSpec, planning_estimate

OUTPUT_ENV = "FIXEDWIDTH_OUTPUT_DIR"
_EXT = {"csv": "csv", "json": "json", "markdown": "md"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _out_dir(args) -> Path:
    path = Path(args.out or os.environ.get(OUTPUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _formats(text: str) -> list[str]:
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        raise UsageError(f"--format: unknown format(s) {', '.join(bad)}; choose from {', '.join(FORMATS)}")
    return fmts


def _write_reports(summaries, stem: str, args) -> list[Path]:
    out = _out_dir(args)
    written = []
    for fmt in _formats(args.format):
        path = out / f"{stem}.{_EXT[fmt]}"
        path.write_text(render_table(summaries, fmt, timing=args.timing))
        written.append(path)
    return written


def _positive_int(name):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v
    return parse


# -- simulate -----------------------------------------------------------------

def _scenario_from_args(args):
    if args.scenario in SCENARIOS:
        scenario = SCENARIOS[args.scenario]
    elif Path(args.scenario).is_file():
        try:
            scenario = load_scenario(args.scenario)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"scenario file {args.scenario}: {exc}") from None
    else:
        raise UsageError(f"--scenario: {args.scenario!r} is neither a built-in id "
                         f"({', '.join(SCENARIOS)}) nor a readable file")
    overrides = {k: v for k, v in (("reps", args.reps), ("batch", args.batch),
                                   ("epsilon", args.eps), ("alpha", args.alpha),
                                   ("m_init", args.m_init)) if v is not None}
    try:
        return scenario.replace(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> int:
    scenario = _scenario_from_args(args)
    names = [n.strip() for n in args.procedures.split(",") if n.strip()]
    unknown = [n for n in names if n not in PROCEDURES]
    if not names or unknown:
        raise UsageError(f"--procedures: unknown {', '.join(unknown) or '(empty)'}; "
                         f"choose from {', '.join(PROCEDURES)}")
    if len(set(names)) != len(names):
        raise UsageError("--procedures: duplicate names")
    baseline = args.baseline or names[0]
    if baseline not in names:
        raise UsageError(f"--baseline {baseline!r} is not in --procedures")
    prior = None
    if scenario.m_init == 0:
        if args.prior is None:
            raise UsageError("m_init = 0 needs --prior PX PY")
        prior = tuple(args.prior)
    records = run_experiment(scenario, names, RngPolicy(args.seed), workers=args.workers,
                             prior=prior)
    summary = summarize(records, scenario, baseline)
    stem = f"simulate-{scenario.id}"
    _write_reports([summary], stem, args)
    if args.records:
        (_out_dir(args) / f"{stem}-records.csv").write_text(records_csv(records))
    print(render_table([summary], "markdown", timing=args.timing))
    return 0


# -- reproduce ----------------------------------------------------------------

def _z(measure, ours, published, ref, reps):
    if measure in ("coverage", "achieved"):
        q = published / 100.0
        se = 100.0 * math.sqrt(q * (1.0 - q) / reps)
    elif measure == "gap" and ref.get("gap_std"):
        se = ref["gap_std"] / math.sqrt(reps)
    else:
        return None
    return (ours - published) / se if se > 0 else None


def comparison_rows(table: int, summaries, reps: int) -> list[tuple]:
    """(scenario, column, measure, computed, published, diff, z) for every published value."""
    rows = []
    for s in summaries:
        ref = REFERENCE[table].get(s.scenario, {})
        for r in s.rows:
            for measure, published in ref.get(r.procedure, {}).items():
                ours = getattr(r, measure)
                if ours is None:
                    continue
                rows.append((s.scenario, r.procedure, measure, ours, published, ours - published,
                             _z(measure, ours, published, ref[r.procedure], reps)))
    return rows


def _fmt_cmp(rows) -> str:
    lines = ["| scenario | column | measure | computed | published | diff | z |",
             "|---|---|---|---|---|---|---|"]
    for sc, col, m, ours, published, diff, z in rows:
        zs = "" if z is None else f"{z:+.2f}"
        lines.append(f"| {sc} | {col} | {m} | {ours:.2f} | {published:g} | {diff:+.2f} | {zs} |")
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    table = args.table
    if table in experiments.TABLES:
        reps = args.reps or 1000
        summaries = experiments.run_table(table, args.seed, reps, workers=args.workers)
    else:
        reps = args.reps or 10000
        summaries = experiments.run_case_table(table, args.seed, reps, workers=args.workers)
    stem = f"reproduce-table{table}"
    _write_reports(summaries, stem, args)
    rows = comparison_rows(table, summaries, reps)
    text = _fmt_cmp(rows)
    (_out_dir(args) / f"{stem}-vs-published.md").write_text(text)
    print(render_table(summaries, "markdown", timing=args.timing))
    print(text)
    return 0


# -- case study ---------------------------------------------------------------

def cmd_case_study(args) -> int:
    cfg = experiments.CaseStudyConfig(args.cd, args.cv, args.eps, reps=args.reps,
                                      seed=args.seed, batch=args.batch, workers=args.workers)
    summary = experiments.run_case_study(cfg)
    _write_reports([summary], f"case-study-{cfg.label}-eps{args.eps:g}", args)
    print(render_table([summary], "markdown", timing=args.timing))
    return 0


# -- plan ---------------------------------------------------------------------

def _estimate(p, w, m, name):
    if w is not None:
        if m is None or not 0 <= w <= m or m < 1:
            raise UsageError(f"--w{name} needs --m{name} >= 1 with 0 <= w <= m")
        return planning_estimate(w, m)
    if p is None:
        raise UsageError(f"give --p{name} or success counts --w{name} with --m{name}")
    if not 0.0 < p < 1.0:
        raise UsageError(f"--p{name}={p} is degenerate; supply counts --w{name}/--m{name} "
                         "so a minimax estimate can be used")
    return p


def cmd_plan(args) -> int:
    try:
        target = TargetSpec(args.alpha, args.eps)
        costs = CostModel(args.cx, args.cy)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mx, my = args.mx or 0, args.my or 0
    if mx < 0 or my < 0:
        raise UsageError("--mx/--my must be non-negative")
    px = _estimate(args.px, args.wx, args.mx, "x")
    py = _estimate(args.py, args.wy, args.my, "y")
    if args.objective == "cost":
        plan = two_stage_plan(mx, my, px, py, costs, target)
    else:
        plan = min_obs_two_stage_plan(px, py, mx, my, target, costs)
    print(f"estimates: p_x={px:.6g} p_y={py:.6g}")
    print(f"target sizes (m_x/m_y): {plan.target_m_x}/{plan.target_m_y}")
    if plan.is_zero:
        print("no additional samples required")
    else:
        print(f"additional draws (b_x/b_y): {plan.add_x}/{plan.add_y}")
    print(f"planned cost: {plan.planned_cost:g}")
    return 0


# -- advise -------------------------------------------------------------------

def _print_advice(session: AdvisorSession) -> None:
    verdict, rec = session.advice()
    h = session.current_half_width
    wx, mx, wy, my = session.state
    print(f"state: x {wx}/{mx}, y {wy}/{my}; half-width {'inf' if math.isinf(h) else f'{h:.6f}'}"
          f" (target {session.header.epsilon:g})")
    if verdict == "STOP":
        ci = session.ci()
        print(f"STOP: {ci.center:.6f} +/- {ci.half_width:.6f} "
              f"[{ci.lower:.6f}, {ci.upper:.6f}]")
    elif verdict == "CONTINUE":
        print(f"NEXT: sample b_x={rec[0]} from X and b_y={rec[1]} from Y")
    else:
        print("NEED-DATA: enter pilot observations from both populations "
              "(or start the session with --prior)")


def _parse_turn(text: str) -> tuple[int, int, int, int]:
    parts = text.replace(",", " ").split()
    if len(parts) != 4:
        raise SessionError("a turn is four integers: successes_x tried_x successes_y tried_y")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise SessionError(f"non-integer count in {text.strip()!r}") from None


def cmd_advise(args) -> int:
    try:
        if args.action == "init":
            prior = tuple(args.prior) if args.prior else (None, None)
            header = SessionHeader(args.alpha, args.eps, args.batch, args.cx, args.cy,
                                   args.procedure, prior[0], prior[1], args.depth, args.budget)
            session = AdvisorSession.create(args.session, header)
        else:
            session = AdvisorSession.load(args.session)
        if args.action == "turn":
            session.enter(*args.counts)
        elif args.action == "run":
            _print_advice(session)
            for line in sys.stdin:
                if not line.strip():
                    continue
                if line.strip().lower() in ("q", "quit", "exit"):
                    break
                try:
                    session.enter(*_parse_turn(line))
                except SessionError as exc:
                    print(f"rejected: {exc}", file=sys.stderr)
                    continue
                _print_advice(session)
                if session.done:
                    break
            return 0
    except (SessionError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    _print_advice(session)
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fixedwidth",
                description="Cost-aware fixed-width intervals for a difference of two proportions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def outputs(sp, default_fmt="csv,json"):
        sp.add_argument("--format", default=default_fmt,
                        help=f"comma-separated subset of {','.join(FORMATS)}")
        sp.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")
        sp.add_argument("--timing", action="store_true",
                        help="include mean wall-clock seconds (not byte-reproducible)")
        sp.add_argument("--workers", type=_positive_int("--workers"), default=1)

    s = sub.add_parser("simulate", help="run one scenario")
    s.add_argument("--scenario", required=True, help="built-in id (s1..s9) or YAML/JSON file")
    s.add_argument("--procedures", default=",".join(PROCEDURES))
    s.add_argument("--baseline", help="gap baseline (default: first procedure)")
    s.add_argument("--reps", type=_positive_int("--reps"))
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--batch", type=_positive_int("--batch"))
    s.add_argument("--eps", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--m-init", type=int)
    s.add_argument("--prior", type=float, nargs=2, metavar=("PX", "PY"))
    s.add_argument("--records", action="store_true", help="also write per-replication CSV")
    outputs(s)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="rerun a published table")
    r.add_argument("--table", type=int, required=True,
                   choices=sorted([*experiments.TABLES, *experiments.CASE_EPSILON]))
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--reps", type=_positive_int("--reps"))
    outputs(r)
    r.set_defaults(func=cmd_reproduce)

    c = sub.add_parser("case-study", help="brand vs generic drug comparison")
    c.add_argument("--cd", type=float, default=259.0)
    c.add_argument("--cv", type=float, default=14.0)
    c.add_argument("--eps", type=float, default=0.02)
    c.add_argument("--batch", type=_positive_int("--batch"), default=500)
    c.add_argument("--reps", type=_positive_int("--reps"), default=10000)
    c.add_argument("--seed", type=int, required=True)
    outputs(c)
    c.set_defaults(func=cmd_case_study)

    pl = sub.add_parser("plan", help="one-shot two-stage allocation")
    for name in ("px", "py"):
        pl.add_argument(f"--{name}", type=float)
    for name in ("wx", "wy", "mx", "my"):
        pl.add_argument(f"--{name}", type=int)
    pl.add_argument("--cx", type=float, default=1.0)
    pl.add_argument("--cy", type=float, default=1.0)
    pl.add_argument("--eps", type=float, default=0.05)
    pl.add_argument("--alpha", type=float, default=0.05)
    pl.add_argument("--objective", choices=("cost", "observations"), default="cost")
    pl.set_defaults(func=cmd_plan)

    a = sub.add_parser("advise", help="turn-based advisor over a session transcript")
    asub = a.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ai = asub.add_parser("init", help="start a session")
    ai.add_argument("session")
    ai.add_argument("--eps", type=float, required=True)
    ai.add_argument("--alpha", type=float, default=0.05)
    ai.add_argument("--batch", type=_positive_int("--batch"), required=True)
    ai.add_argument("--cx", type=float, default=1.0)
    ai.add_argument("--cy", type=float, default=1.0)
    ai.add_argument("--procedure", choices=ADVISOR_PROCEDURES, default=DEFAULT_PROCEDURE)
    ai.add_argument("--prior", type=float, nargs=2, metavar=("PX", "PY"))
    ai.add_argument("--depth", type=_positive_int("--depth"), default=1)
    ai.add_argument("--budget", type=_positive_int("--budget"), default=DEFAULT_BUDGET,
                    help="look-ahead enumeration cap (B+1)^(2*depth)")
    at = asub.add_parser("turn", help="enter one observed batch")
    at.add_argument("session")
    at.add_argument("counts", type=int, nargs=4, metavar=("WX", "NX", "WY", "NY"))
    ast = asub.add_parser("status", help="show the current recommendation")
    ast.add_argument("session")
    ar = asub.add_parser("run", help="read turns from stdin until STOP")
    ar.add_argument("session")
    a.set_defaults(func=cmd_advise)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"fixedwidth: error: {exc}".replace("\n", " "), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
