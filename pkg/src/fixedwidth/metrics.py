"""Performance measures over replication records and table rendering.

Per procedure the summary holds coverage (with its binomial standard error),
the share of runs that met the width, the geometric-mean cost gap against a
baseline procedure, and observation / stage / timing averages.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .sim import ReplicationRecord, ScenarioSpec

FORMATS = ("csv", "json", "markdown")


@dataclass(frozen=True)
class GapStats:
    geo: float
    std: float | None
    max: float
    min: float
    mean: float


@dataclass(frozen=True)
class ProcedureSummary:
    procedure: str
    reps: int
    coverage: float
    coverage_se: float
    achieved: float
    gap: float | None
    gap_std: float | None
    gap_max: float | None
    gap_min: float | None
    mean_observations: float
    mean_cost: float
    mean_stages: float
    min_stages: int
    max_stages: int
    mean_seconds: float | None = None


@dataclass(frozen=True)
class ExperimentSummary:
    scenario: str
    baseline: str | None
    rows: tuple[ProcedureSummary, ...]

    def row(self, procedure: str) -> ProcedureSummary:
        for r in self.rows:
            if r.procedure == procedure:
                return r
        raise KeyError(procedure)


def _require(records: Sequence[ReplicationRecord]) -> None:
    if not records:
        raise ValueError("no replication records to summarize")


def coverage(records: Sequence[ReplicationRecord], key: str,
             true_diff: float) -> tuple[float, float]:
    """Percent of intervals containing ``true_diff`` and the SE sqrt(c(1-c)/R)."""
    _require(records)
    hits = sum(r.outcomes[key].ci.covers(true_diff) for r in records)
    c = hits / len(records)
    return 100.0 * c, math.sqrt(c * (1.0 - c) / len(records))


def halfwidth_achieved(records: Sequence[ReplicationRecord], key: str) -> float:
    _require(records)
    return 100.0 * sum(r.outcomes[key].achieved for r in records) / len(records)


def cost_gap(costs: Sequence[float], baseline: Sequence[float]) -> GapStats:
    """Paired cost ratios against ``baseline``, in percent.

    The geometric mean is taken in log space; ``std`` is the sample standard
    deviation (R - 1 denominator) of the percentage gaps and is None for R = 1.
    """
    a = np.asarray(costs, dtype=float)
    b = np.asarray(baseline, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("cost vectors must be one-dimensional and of equal length")
    if a.size == 0:
        raise ValueError("no costs to compare")
    if np.any(b <= 0.0):
        raise ValueError("baseline cost must be positive to form a ratio")
    if np.any(a < 0.0):
        raise ValueError("costs must be non-negative")
    with np.errstate(divide="ignore"):
        ratio = a / b
        geo = 100.0 * float(np.exp(np.mean(np.log(ratio))))
    pct = 100.0 * ratio
    std = float(np.std(pct, ddof=1)) if a.size > 1 else None
    stats = GapStats(geo, std, float(pct.max()), float(pct.min()), float(pct.mean()))
    _check_gap(stats)
    return stats


def _check_gap(g: GapStats) -> None:
    # AM-GM and the ordering min <= geo <= max, with float slack
    slack = 1e-9 * max(1.0, g.mean)
    if g.geo > g.mean + slack:
        raise AssertionError(f"geometric gap {g.geo} exceeds arithmetic mean {g.mean}")
    if not (g.min - slack <= g.geo <= g.max + slack):
        raise AssertionError(f"geometric gap {g.geo} outside [{g.min}, {g.max}]")


def summarize(records: Sequence[ReplicationRecord], scenario: ScenarioSpec,
              baseline: str | None = None) -> ExperimentSummary:
    """Aggregate records (sorted by replication index first) into one summary."""
    _require(records)
    records = sorted(records, key=lambda r: r.index)
    keys = list(records[0].outcomes)
    if baseline is not None and baseline not in keys:
        raise ValueError(f"baseline {baseline!r} is not among {keys}")
    base = [r.outcomes[baseline].total_cost for r in records] if baseline else None
    rows = []
    for key in keys:
        outs = [r.outcomes[key] for r in records]
        cov, se = coverage(records, key, scenario.true_diff)
        costs = [o.total_cost for o in outs]
        gap = cost_gap(costs, base) if base is not None else None
        stages = [o.stage_count for o in outs]
        rows.append(ProcedureSummary(
            procedure=key,
            reps=len(records),
            coverage=cov,
            coverage_se=se,
            achieved=halfwidth_achieved(records, key),
            gap=gap.geo if gap else None,
            gap_std=gap.std if gap else None,
            gap_max=gap.max if gap else None,
            gap_min=gap.min if gap else None,
            mean_observations=float(np.mean([o.observations for o in outs])),
            mean_cost=float(np.mean(costs)),
            mean_stages=float(np.mean(stages)),
            min_stages=int(min(stages)),
            max_stages=int(max(stages)),
            mean_seconds=float(np.mean([r.seconds[key] for r in records])),
        ))
    return ExperimentSummary(scenario.id, baseline, tuple(rows))


# -- rendering ----------------------------------------------------------------

_ROW_FIELDS = [f.name for f in fields(ProcedureSummary)]
CSV_COLUMNS = ["scenario", "baseline"] + [n for n in _ROW_FIELDS if n != "mean_seconds"]


def _flat(summaries: Iterable[ExperimentSummary], timing: bool) -> list[dict]:
    out = []
    for s in summaries:
        for r in s.rows:
            d = {"scenario": s.scenario, "baseline": s.baseline, **asdict(r)}
            if not timing:
                del d["mean_seconds"]
            out.append(d)
    return out


def _render_csv(summaries, timing) -> str:
    cols = CSV_COLUMNS + (["mean_seconds"] if timing else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for d in _flat(summaries, timing):
        w.writerow({k: "" if v is None else repr(v) if isinstance(v, float) else v
                    for k, v in d.items()})
    return buf.getvalue()


def _render_json(summaries, timing) -> str:
    doc = [{"scenario": s.scenario, "baseline": s.baseline,
            "rows": [{k: v for k, v in asdict(r).items() if timing or k != "mean_seconds"}
                     for r in s.rows]}
           for s in summaries]
    return json.dumps(doc, indent=2) + "\n"


def _fmt(v, nd=1):
    return "--" if v is None else f"{v:.{nd}f}"


def _render_markdown(summaries, timing) -> str:
    lines = []
    for s in summaries:
        names = [r.procedure for r in s.rows]
        lines.append(f"### {s.scenario}" + (f" (baseline: {s.baseline})" if s.baseline else ""))
        lines.append("")
        lines.append("| Measure | " + " | ".join(names) + " |")
        lines.append("|---|" + "---|" * len(names))
        cells = {
            "Coverage Probability (%)": [_fmt(r.coverage) for r in s.rows],
            "Half-width Achieved (%)": [_fmt(r.achieved) for r in s.rows],
            "Cost Gap % (std.)": [f"{_fmt(r.gap)} ({_fmt(r.gap_std)})" for r in s.rows],
            "Max Gap % (Min)": [f"{_fmt(r.gap_max)} ({_fmt(r.gap_min)})" for r in s.rows],
            "Observations taken": [_fmt(r.mean_observations) for r in s.rows],
            "Average cost": [_fmt(r.mean_cost) for r in s.rows],
            "Stages [min, max] (mean)": [f"[{r.min_stages}, {r.max_stages}] ({_fmt(r.mean_stages)})"
                                         for r in s.rows],
        }
        if timing:
            cells["Running Time (s)"] = [_fmt(r.mean_seconds, 2) for r in s.rows]
        for label, vals in cells.items():
            lines.append(f"| {label} | " + " | ".join(vals) + " |")
        lines.append("")
    if not lines:
        lines = ["| Measure |", "|---|", ""]
    return "\n".join(lines)


def render_table(summaries: Sequence[ExperimentSummary], fmt: str,
                 timing: bool = False) -> str:
    """Serialize summaries deterministically.

    Wall-clock means are left out unless ``timing`` is set, so repeated runs
    with one seed render byte-identical documents.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    return {"csv": _render_csv, "json": _render_json,
            "markdown": _render_markdown}[fmt](summaries, timing)


def parse_json(text: str) -> list[ExperimentSummary]:
    """Inverse of ``render_table(..., "json")``."""
    out = []
    for s in json.loads(text):
        rows = tuple(ProcedureSummary(**r) for r in s["rows"])
        out.append(ExperimentSummary(s["scenario"], s["baseline"], rows))
    return out
