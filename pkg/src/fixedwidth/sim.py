"""Seeded Bernoulli sources, scenario definitions and the replication engine.

Every replication owns one Philox stream per population, keyed by
(master seed, group, replication, population).  All procedures compared in
one experiment read the same two streams from the same starting offset, so
their per-replication costs are paired (common random numbers).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml

from .procedures import PROCEDURES, X, Y, InitialStage, ObservationSource, ProcedureOutcome
from .stats import CostModel, TargetSpec

_CHUNK = 4096
_POP_INDEX = {X: 0, Y: 1}


class BernoulliStreams:
    """Lazily extended iid Bernoulli sequences for both populations."""

    def __init__(self, p_x: float, p_y: float, seed: int | Sequence[int]):
        for p in (p_x, p_y):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"success probability {p} outside [0, 1]")
        entropy, *key = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
        self.p = {X: p_x, Y: p_y}
        self._gen = {
            pop: np.random.Generator(np.random.Philox(
                np.random.SeedSequence(entropy, spawn_key=(*key, idx))))
            for pop, idx in _POP_INDEX.items()
        }
        self._bits = {X: np.empty(0, dtype=np.int8), Y: np.empty(0, dtype=np.int8)}
        self._cum = {X: [0], Y: [0]}

    def _ensure(self, pop: str, end: int) -> None:
        have = len(self._bits[pop])
        if end <= have:
            return
        n = max(_CHUNK, end - have, have)
        new = (self._gen[pop].random(n) < self.p[pop]).astype(np.int8)
        self._bits[pop] = np.concatenate([self._bits[pop], new])
        cum = self._cum[pop]
        cum.extend((cum[-1] + np.cumsum(new, dtype=np.int64)).tolist())

    def bits(self, pop: str, start: int, n: int) -> np.ndarray:
        self._ensure(pop, start + n)
        return self._bits[pop][start:start + n]

    def count(self, pop: str, start: int, n: int) -> int:
        self._ensure(pop, start + n)
        cum = self._cum[pop]
        return cum[start + n] - cum[start]

    def source(self, start_x: int = 0, start_y: int = 0) -> "BernoulliSource":
        return BernoulliSource(self, start_x, start_y)


class BernoulliSource(ObservationSource):
    """Cursor over a pair of ``BernoulliStreams``."""

    def __init__(self, streams: BernoulliStreams, start_x: int = 0, start_y: int = 0):
        self.streams = streams
        self.pos = {X: start_x, Y: start_y}

    def draw(self, population, n):
        out = self.streams.bits(population, self.pos[population], n)
        self.pos[population] += n
        return out

    def successes(self, population, n):
        k = self.streams.count(population, self.pos[population], n)
        self.pos[population] += n
        return k


def make_bernoulli_source(p_x: float, p_y: float | None = None,
                          seed: int | Sequence[int] = 0) -> BernoulliSource:
    """Deterministic source; ``p_y`` defaults to ``p_x``."""
    return BernoulliStreams(p_x, p_x if p_y is None else p_y, seed).source()


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    c_x: float
    c_y: float
    p_x: float
    p_y: float
    epsilon: float = 0.05
    alpha: float = 0.05
    m_init: int = 50
    batch: int = 10
    reps: int = 1000

    def __post_init__(self):
        if not (0.0 <= self.p_x <= 1.0 and 0.0 <= self.p_y <= 1.0):
            raise ValueError("p_x and p_y must lie in [0, 1]")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.m_init < 0:
            raise ValueError("m_init must be non-negative")
        # validates alpha, epsilon, batch, costs
        self.target
        self.costs

    @property
    def target(self) -> TargetSpec:
        return TargetSpec(self.alpha, self.epsilon, self.batch)

    @property
    def costs(self) -> CostModel:
        return CostModel(self.c_x, self.c_y)

    @property
    def true_diff(self) -> float:
        return self.p_x - self.p_y

    @property
    def cost_ratio(self) -> float:
        return self.c_x / self.c_y

    def replace(self, **changes) -> "ScenarioSpec":
        return ScenarioSpec(**{**asdict(self), **changes})

    @classmethod
    def from_mapping(cls, data: dict) -> "ScenarioSpec":
        data = dict(data)
        if "cost_ratio" in data:
            ratio = float(data.pop("cost_ratio"))
            data.setdefault("c_x", ratio if ratio >= 1 else 1.0)
            data.setdefault("c_y", 1.0 if ratio >= 1 else 1.0 / ratio)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario field(s): {', '.join(sorted(unknown))}")
        missing = {"id", "c_x", "c_y", "p_x", "p_y"} - set(data)
        if missing:
            raise ValueError(f"missing scenario field(s): {', '.join(sorted(missing))}")
        return cls(**data)


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Read a YAML (or JSON) key-value scenario document."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a key-value document")
    return ScenarioSpec.from_mapping(data)


def _scenario(sid, ratio, p_x, p_y):
    c_x, c_y = (ratio, 1.0) if ratio >= 1 else (1.0, 1.0 / ratio)
    return ScenarioSpec(sid, c_x, c_y, p_x, p_y)


# cost ratio c_x / c_y, p_x, p_y
SCENARIOS = {s.id: s for s in (
    _scenario("s1", 1, 0.3, 0.2),
    _scenario("s2", 1, 0.5, 0.2),
    _scenario("s3", 1, 0.5, 0.5),
    _scenario("s4", 1 / 3, 0.3, 0.2),
    _scenario("s5", 1 / 3, 0.5, 0.2),
    _scenario("s6", 1 / 3, 0.5, 0.5),
    _scenario("s7", 5, 0.3, 0.2),
    _scenario("s8", 5, 0.5, 0.2),
    _scenario("s9", 5, 0.5, 0.5),
)}


@dataclass(frozen=True)
class RngPolicy:
    """Stream derivation: (seed, group, replication, population)."""

    seed: int
    group: int = 0

    def material(self, replication: int) -> tuple[int, int, int]:
        return (self.seed, self.group, replication)


@dataclass(frozen=True)
class ProcedureSpec:
    """One column of a comparison: a procedure plus per-column overrides."""

    name: str
    label: str | None = None
    batch: int | None = None
    plan_costs: tuple[float, float] | None = None

    def __post_init__(self):
        if self.name not in PROCEDURES:
            raise ValueError(f"unknown procedure {self.name!r}; choose from {sorted(PROCEDURES)}")
        if self.plan_costs is not None and self.name != "seq-batch-min-cost":
            raise ValueError("plan_costs only applies to seq-batch-min-cost")

    @property
    def key(self) -> str:
        return self.label or self.name

    def run(self, source: ObservationSource, scenario: ScenarioSpec,
            initial: InitialStage) -> ProcedureOutcome:
        target = scenario.target if self.batch is None else scenario.target.with_batch(self.batch)
        kwargs = {}
        if self.plan_costs is not None:
            kwargs["plan_costs"] = CostModel(*self.plan_costs)
        return PROCEDURES[self.name](source, target, scenario.costs, initial, **kwargs)


@dataclass
class ReplicationRecord:
    index: int
    seed: tuple[int, ...]
    initial: InitialStage
    outcomes: dict[str, ProcedureOutcome] = field(default_factory=dict)
    covered: dict[str, bool] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)


class ReplicationError(RuntimeError):
    pass


def _initial_stage(streams: BernoulliStreams, m_init: int,
                   prior: tuple[float, float] | None) -> InitialStage:
    if m_init == 0:
        if prior is None:
            raise ValueError("m_init = 0 requires prior estimates")
        return InitialStage(p_x=prior[0], p_y=prior[1])
    return InitialStage(streams.count(X, 0, m_init), m_init, streams.count(Y, 0, m_init), m_init)


def run_replication(scenario: ScenarioSpec, procedures: Sequence[ProcedureSpec],
                    rng: RngPolicy, index: int,
                    prior: tuple[float, float] | None = None) -> ReplicationRecord:
    seed = rng.material(index)
    streams = BernoulliStreams(scenario.p_x, scenario.p_y, seed)
    initial = _initial_stage(streams, scenario.m_init, prior)
    record = ReplicationRecord(index, seed, initial)
    truth = scenario.true_diff
    for spec in procedures:
        source = streams.source(scenario.m_init, scenario.m_init)
        start = time.perf_counter()
        try:
            outcome = spec.run(source, scenario, initial)
        except Exception as exc:
            raise ReplicationError(
                f"replication {index} (seed {seed}), procedure {spec.key}: {exc}") from exc
        record.seconds[spec.key] = time.perf_counter() - start
        record.outcomes[spec.key] = outcome
        record.covered[spec.key] = outcome.ci.covers(truth)
    return record


def _run_chunk(scenario, procedures, rng, indices, prior):
    return [run_replication(scenario, procedures, rng, i, prior) for i in indices]


def run_experiment(scenario: ScenarioSpec, procedures: Iterable[ProcedureSpec | str],
                   rng: RngPolicy, workers: int = 1,
                   prior: tuple[float, float] | None = None) -> list[ReplicationRecord]:
    """Run ``scenario.reps`` CRN-paired replications of every procedure.

    Records come back sorted by replication index whatever ``workers`` is.
    """
    procs = [p if isinstance(p, ProcedureSpec) else ProcedureSpec(p) for p in procedures]
    keys = [p.key for p in procs]
    if len(set(keys)) != len(keys):
        raise ValueError(f"duplicate procedure labels: {keys}")
    indices = range(scenario.reps)
    if workers <= 1:
        return _run_chunk(scenario, procs, rng, indices, prior)
    size = math.ceil(scenario.reps / (4 * workers))
    chunks = [indices[i:i + size] for i in range(0, scenario.reps, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, *zip(*[(scenario, procs, rng, c, prior) for c in chunks]))
        records = [r for part in parts for r in part]
    return sorted(records, key=lambda r: r.index)


RECORD_COLUMNS = ("replication", "procedure", "m_x", "m_y", "observations", "stages",
                  "total_cost", "center", "half_width", "covered", "achieved")


def records_csv(records: Sequence[ReplicationRecord]) -> str:
    """One row per (replication, procedure), columns as in ``RECORD_COLUMNS``."""
    lines = [",".join(RECORD_COLUMNS)]
    for rec in sorted(records, key=lambda r: r.index):
        for key, out in rec.outcomes.items():
            row = (rec.index, key, out.m_x, out.m_y, out.observations, out.stage_count,
                   repr(float(out.total_cost)), repr(out.ci.center), repr(out.ci.half_width),
                   int(rec.covered[key]), int(out.achieved))
            lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"
