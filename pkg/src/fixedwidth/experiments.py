"""Named experiment batteries: the comparison tables and the drug-pricing case study."""

from __future__ import annotations

from dataclasses import dataclass

from .metrics import ExperimentSummary, summarize
from .sim import SCENARIOS, ProcedureSpec, RngPolicy, ScenarioSpec, run_experiment


@dataclass(frozen=True)
class TableSpec:
    table: int
    title: str
    procedures: tuple[ProcedureSpec, ...]
    baseline: str
    scenarios: tuple[str, ...] = tuple(SCENARIOS)


TABLES = {
    2: TableSpec(2, "Two-stage sampling", (
        ProcedureSpec("conservative", "conservative"),
        ProcedureSpec("two-stage-min-obs", "min-obs"),
        ProcedureSpec("two-stage-min-cost", "min-cost"),
    ), "conservative"),
    3: TableSpec(3, "Fully sequential sampling", (
        ProcedureSpec("naive-seq", "naive", batch=2),
        ProcedureSpec("fully-seq-min-obs", "min-obs", batch=1),
        ProcedureSpec("seq-batch-min-cost", "min-cost", batch=1),
    ), "naive"),
    4: TableSpec(4, "Batched sampling (B = 10)", (
        ProcedureSpec("naive-seq", "naive", batch=10),
        ProcedureSpec("batch-seq-min-obs", "min-obs", batch=10),
        ProcedureSpec("seq-batch-min-cost", "min-cost", batch=10),
    ), "naive"),
    5: TableSpec(5, "Cost-minimizing procedures", (
        ProcedureSpec("two-stage-min-cost", "two-stage"),
        ProcedureSpec("seq-batch-min-cost", "fully-seq", batch=1),
        ProcedureSpec("seq-batch-min-cost", "batch", batch=10),
        ProcedureSpec("one-step-lookahead", "lookahead", batch=10),
    ), "two-stage"),
}


def run_table(table: int, seed: int, reps: int = 1000, workers: int = 1,
              scenarios: tuple[str, ...] | None = None) -> list[ExperimentSummary]:
    """Run one comparison table; the stream group is the table number."""
    spec = TABLES[table]
    out = []
    for sid in scenarios or spec.scenarios:
        scenario = SCENARIOS[sid].replace(reps=reps)
        records = run_experiment(scenario, spec.procedures, RngPolicy(seed, group=table),
                                 workers=workers)
        out.append(summarize(records, scenario, spec.baseline))
    return out


# -- case study ---------------------------------------------------------------

CASE_PRICES = ((259.0, 14.0), (259.0, 38.0), (280.0, 38.0))
CASE_EPSILON = {7: 0.02, 8: 0.015}


@dataclass(frozen=True)
class CaseStudyConfig:
    """Brand (D, population X) vs generic (V, population Y) comparison.

    With no pilot sample, planning starts from the prior estimates; a stage
    is one month of ``batch`` enrolments.
    """

    c_d: float
    c_v: float
    epsilon: float
    reps: int = 10000
    seed: int = 0
    p_d: float = 0.1
    p_v: float = 0.217
    alpha: float = 0.05
    batch: int = 500
    m_init: int = 0
    prior: tuple[float, float] = (0.5, 0.5)
    group: int = 7
    workers: int = 1

    @property
    def label(self) -> str:
        return f"{self.c_d:g}-{self.c_v:g}"

    def scenario(self) -> ScenarioSpec:
        return ScenarioSpec(self.label, self.c_d, self.c_v, self.p_d, self.p_v,
                            epsilon=self.epsilon, alpha=self.alpha, m_init=self.m_init,
                            batch=self.batch, reps=self.reps)


CASE_PROCEDURES = (
    ProcedureSpec("naive-seq", "baseline"),
    ProcedureSpec("seq-batch-min-cost", "min-obs", plan_costs=(1.0, 1.0)),
    ProcedureSpec("seq-batch-min-cost", "min-cost"),
)


def run_case_study(config: CaseStudyConfig) -> ExperimentSummary:
    scenario = config.scenario()
    records = run_experiment(scenario, CASE_PROCEDURES, RngPolicy(config.seed, config.group),
                             workers=config.workers,
                             prior=config.prior if config.m_init == 0 else None)
    return summarize(records, scenario, "baseline")


def run_case_table(table: int, seed: int, reps: int = 10000,
                   workers: int = 1) -> list[ExperimentSummary]:
    eps = CASE_EPSILON[table]
    return [run_case_study(CaseStudyConfig(c_d, c_v, eps, reps=reps, seed=seed, group=table,
                                           workers=workers))
            for c_d, c_v in CASE_PRICES]
