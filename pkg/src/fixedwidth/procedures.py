"""The eight sampling procedures.

Every procedure consumes an ``ObservationSource`` positioned just after the
initial stage and returns a ``ProcedureOutcome``.  Sequential procedures check
the stopping rule H <= eps on the data in hand before each stage, so a state
that already meets the width is never sampled further.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .allocation import min_obs_two_stage_plan, round_half_away, two_stage_plan, variance_bound
from .lookahead import DEFAULT_BUDGET, _argmin, _check_budget, _Evaluator
from .stats import (ConfidenceInterval, CostModel, SampleState, TargetSpec, half_width,
                    planning_estimate, tau)

X, Y = "x", "y"

# per-population safety cap for the sequential loops
MAX_OBSERVATIONS = 10 ** 7


class SamplingCapError(RuntimeError):
    pass


class ObservationSource(ABC):
    """Supplier of 0/1 outcomes for populations ``"x"`` and ``"y"``."""

    @abstractmethod
    def draw(self, population: str, n: int) -> np.ndarray:
        """Return the next ``n`` outcomes of ``population``."""

    def successes(self, population: str, n: int) -> int:
        return int(np.sum(self.draw(population, n)))


class RecordedSource(ObservationSource):
    """Relays pre-recorded outcome sequences in order."""

    def __init__(self, x: Sequence[int], y: Sequence[int]):
        self._data = {X: np.asarray(x, dtype=np.int8), Y: np.asarray(y, dtype=np.int8)}
        self._pos = {X: 0, Y: 0}

    def draw(self, population, n):
        start = self._pos[population]
        out = self._data[population][start:start + n]
        if len(out) != n:
            raise IndexError(f"recorded stream {population!r} exhausted at {start}")
        self._pos[population] = start + n
        return out


@dataclass(frozen=True)
class InitialStage:
    """First-stage data, or expert-opinion estimates when the counts are zero."""

    w_x1: int = 0
    m_x1: int = 0
    w_y1: int = 0
    m_y1: int = 0
    p_x: float | None = None
    p_y: float | None = None

    def __post_init__(self):
        SampleState(self.w_x1, self.m_x1, self.w_y1, self.m_y1)
        for m, p, name in ((self.m_x1, self.p_x, "p_x"), (self.m_y1, self.p_y, "p_y")):
            if p is not None and not 0.0 < p < 1.0:
                raise ValueError(f"expert estimate {name}={p} must lie in (0, 1)")
            if m == 0 and p is None:
                raise ValueError(f"{name} is required when the initial count is zero")

    @property
    def state(self) -> SampleState:
        return SampleState(self.w_x1, self.m_x1, self.w_y1, self.m_y1)

    @property
    def prior(self) -> tuple[float | None, float | None]:
        return self.p_x, self.p_y

    def estimates(self) -> tuple[float, float]:
        return (planning_estimate(self.w_x1, self.m_x1, self.p_x),
                planning_estimate(self.w_y1, self.m_y1, self.p_y))


@dataclass(frozen=True)
class StageRecord:
    stage: int
    b_x: int
    b_y: int
    w_x: int
    m_x: int
    w_y: int
    m_y: int
    half_width: float


@dataclass
class ProcedureOutcome:
    ci: ConfidenceInterval
    m_x: int
    m_y: int
    m_x1: int
    m_y1: int
    stage_count: int
    total_cost: float
    achieved: bool
    trace: list[StageRecord] | None = field(default=None, repr=False)

    @property
    def observations(self) -> int:
        """Observations taken outside the initial stage."""
        return (self.m_x - self.m_x1) + (self.m_y - self.m_y1)


def _outcome(w_x, m_x, w_y, m_y, initial, costs, target, stages, log) -> ProcedureOutcome:
    z = target.z
    if m_x == 0 or m_y == 0:
        ci = ConfidenceInterval(math.nan, math.inf, m_x, m_y)
    else:
        ci = ConfidenceInterval(w_x / m_x - w_y / m_y, half_width(w_x, m_x, w_y, m_y, z), m_x, m_y)
    cost = (m_x - initial.m_x1) * costs.c_x + (m_y - initial.m_y1) * costs.c_y
    return ProcedureOutcome(ci, m_x, m_y, initial.m_x1, initial.m_y1, stages, cost,
                            ci.half_width <= target.epsilon, log)


def _current_h(wx, mx, wy, my, z) -> float:
    if mx == 0 or my == 0:
        return math.inf
    return half_width(wx, mx, wy, my, z)


Policy = Callable[[int, int, int, int, int], tuple[int, int]]


def _run_sequential(source: ObservationSource, target: TargetSpec, costs: CostModel,
                    initial: InitialStage, policy: Policy, trace: bool) -> ProcedureOutcome:
    z, eps = target.z, target.epsilon
    wx, mx, wy, my = initial.w_x1, initial.m_x1, initial.w_y1, initial.m_y1
    stage = 0
    log = [] if trace else None
    while _current_h(wx, mx, wy, my, z) > eps:
        stage += 1
        bx, by = policy(wx, mx, wy, my, stage)
        if bx + by == 0:
            raise RuntimeError(f"policy requested an empty stage at {(wx, mx, wy, my)}")
        if mx + bx > MAX_OBSERVATIONS or my + by > MAX_OBSERVATIONS:
            raise SamplingCapError(
                f"more than {MAX_OBSERVATIONS} observations per population at stage {stage} "
                f"(state {(wx, mx, wy, my)})")
        if bx:
            wx += source.successes(X, bx)
            mx += bx
        if by:
            wy += source.successes(Y, by)
            my += by
        if log is not None:
            log.append(StageRecord(stage, bx, by, wx, mx, wy, my, _current_h(wx, mx, wy, my, z)))
    return _outcome(wx, mx, wy, my, initial, costs, target, stage, log)


# -- stage policies -----------------------------------------------------------
# Each returns (b_x, b_y) for the next stage given the running counts; the
# advisor reuses them so live recommendations match simulated runs.

def naive_policy(target: TargetSpec, **_) -> Policy:
    batch = target.batch
    half, odd = divmod(batch, 2)

    def policy(wx, mx, wy, my, stage):
        if odd and stage % 2 == 1:
            return half + 1, half
        return half, batch - half
    return policy


def cost_batch_policy(target: TargetSpec, costs: CostModel,
                      prior=(None, None), **_) -> Policy:
    batch, bound = target.batch, variance_bound(target)
    c_x, c_y = costs.c_x, costs.c_y
    prior_x, prior_y = prior

    def policy(wx, mx, wy, my, stage):
        tx = tau(planning_estimate(wx, mx, prior_x))
        ty = tau(planning_estimate(wy, my, prior_y))
        root = (math.sqrt(tx * c_x) + math.sqrt(ty * c_y)) / bound
        need_x = max(math.ceil(root * math.sqrt(tx / c_x)), mx) - mx
        need_y = max(math.ceil(root * math.sqrt(ty / c_y)), my) - my
        if need_x + need_y == 0:
            # only reachable through rounding exactly at the width boundary
            gamma = 0.5
        else:
            gamma = need_x / (need_x + need_y)
        bx = round_half_away(gamma * batch)
        return bx, batch - bx
    return policy


def min_obs_batch_policy(target: TargetSpec, prior=(None, None), **_) -> Policy:
    batch = target.batch
    prior_x, prior_y = prior

    def policy(wx, mx, wy, my, stage):
        sx = math.sqrt(tau(planning_estimate(wx, mx, prior_x)))
        sy = math.sqrt(tau(planning_estimate(wy, my, prior_y)))
        gamma = (sx * (my + batch) - sy * mx) / (batch * (sx + sy))
        gamma = min(max(gamma, 0.0), 1.0)
        bx = round_half_away(gamma * batch)
        return bx, batch - bx
    return policy


def min_obs_single_policy(target: TargetSpec, prior=(None, None), **_) -> Policy:
    prior_x, prior_y = prior

    def policy(wx, mx, wy, my, stage):
        if mx == 0:
            return 1, 0
        if my == 0:
            return 0, 1
        gain_x = tau(planning_estimate(wx, mx, prior_x)) * (1.0 / mx - 1.0 / (mx + 1))
        gain_y = tau(planning_estimate(wy, my, prior_y)) * (1.0 / my - 1.0 / (my + 1))
        return (1, 0) if gain_x >= gain_y else (0, 1)
    return policy


def lookahead_policy(target: TargetSpec, costs: CostModel, prior=(None, None),
                     depth: int = 1, budget: int = DEFAULT_BUDGET, **_) -> Policy:
    _check_budget(target.batch, depth, budget)
    ev = _Evaluator(costs, target, prior)
    batch = target.batch

    def policy(wx, mx, wy, my, stage):
        return _argmin(ev, wx, mx, wy, my, batch, depth)
    return policy


# -- procedures ---------------------------------------------------------------

def run_conservative(source: ObservationSource, target: TargetSpec, costs: CostModel,
                     initial: InitialStage, *, pool_initial: bool = False,
                     trace: bool = False) -> ProcedureOutcome:
    """Worst-case sizing m = ceil(z^2 / (2 eps^2)) per population.

    By default the interval uses m fresh observations and ignores the initial
    stage; cost is charged as (m - m_1) per population either way.
    """
    m = conservative_size(target)
    if pool_initial:
        bx, by = max(m - initial.m_x1, 0), max(m - initial.m_y1, 0)
        wx = initial.w_x1 + (source.successes(X, bx) if bx else 0)
        wy = initial.w_y1 + (source.successes(Y, by) if by else 0)
        mx, my = initial.m_x1 + bx, initial.m_y1 + by
    else:
        bx = by = m
        wx, wy = source.successes(X, m), source.successes(Y, m)
        mx = my = m
    log = [StageRecord(1, bx, by, wx, mx, wy, my, _current_h(wx, mx, wy, my, target.z))] \
        if trace else None
    return _outcome(wx, mx, wy, my, initial, costs, target, 1, log)


def conservative_size(target: TargetSpec) -> int:
    return math.ceil(target.z ** 2 / (2.0 * target.epsilon ** 2))


def _run_two_stage(source, target, costs, initial, add_x, add_y, trace):
    wx, mx, wy, my = initial.w_x1, initial.m_x1, initial.w_y1, initial.m_y1
    if add_x:
        wx += source.successes(X, add_x)
        mx += add_x
    if add_y:
        wy += source.successes(Y, add_y)
        my += add_y
    stages = 1 if add_x or add_y else 0
    log = None
    if trace:
        log = [StageRecord(1, add_x, add_y, wx, mx, wy, my, _current_h(wx, mx, wy, my, target.z))] \
            if stages else []
    return _outcome(wx, mx, wy, my, initial, costs, target, stages, log)


def run_two_stage_min_cost(source: ObservationSource, target: TargetSpec, costs: CostModel,
                           initial: InitialStage, *, trace: bool = False) -> ProcedureOutcome:
    px, py = initial.estimates()
    plan = two_stage_plan(initial.m_x1, initial.m_y1, px, py, costs, target)
    return _run_two_stage(source, target, costs, initial, plan.add_x, plan.add_y, trace)


def run_two_stage_min_obs(source: ObservationSource, target: TargetSpec, costs: CostModel,
                          initial: InitialStage, *, trace: bool = False) -> ProcedureOutcome:
    px, py = initial.estimates()
    plan = min_obs_two_stage_plan(px, py, initial.m_x1, initial.m_y1, target, costs)
    return _run_two_stage(source, target, costs, initial, plan.add_x, plan.add_y, trace)


def run_naive_sequential(source: ObservationSource, target: TargetSpec, costs: CostModel,
                         initial: InitialStage, *, trace: bool = False) -> ProcedureOutcome:
    return _run_sequential(source, target, costs, initial, naive_policy(target), trace)


def run_seq_batch_min_cost(source: ObservationSource, target: TargetSpec, costs: CostModel,
                           initial: InitialStage, *, plan_costs: CostModel | None = None,
                           trace: bool = False) -> ProcedureOutcome:
    """Batched sequential cost minimization.

    ``plan_costs`` overrides the costs used to split each batch (unit costs
    turn it into an observation minimizer); ``costs`` still prices the run.
    """
    policy = cost_batch_policy(target, plan_costs or costs, initial.prior)
    return _run_sequential(source, target, costs, initial, policy, trace)


def run_one_step_lookahead(source: ObservationSource, target: TargetSpec, costs: CostModel,
                           initial: InitialStage, *, depth: int = 1,
                           budget: int = DEFAULT_BUDGET,
                           trace: bool = False) -> ProcedureOutcome:
    policy = lookahead_policy(target, costs, initial.prior, depth=depth, budget=budget)
    return _run_sequential(source, target, costs, initial, policy, trace)


def run_fully_seq_min_obs(source: ObservationSource, target: TargetSpec, costs: CostModel,
                          initial: InitialStage, *, trace: bool = False) -> ProcedureOutcome:
    policy = min_obs_single_policy(target, initial.prior)
    return _run_sequential(source, target, costs, initial, policy, trace)


def run_batch_seq_min_obs(source: ObservationSource, target: TargetSpec, costs: CostModel,
                          initial: InitialStage, *, trace: bool = False) -> ProcedureOutcome:
    policy = min_obs_batch_policy(target, initial.prior)
    return _run_sequential(source, target, costs, initial, policy, trace)


PROCEDURES: dict[str, Callable[..., ProcedureOutcome]] = {
    "conservative": run_conservative,
    "two-stage-min-cost": run_two_stage_min_cost,
    "naive-seq": run_naive_sequential,
    "seq-batch-min-cost": run_seq_batch_min_cost,
    "one-step-lookahead": run_one_step_lookahead,
    "two-stage-min-obs": run_two_stage_min_obs,
    "fully-seq-min-obs": run_fully_seq_min_obs,
    "batch-seq-min-obs": run_batch_seq_min_obs,
}

# procedures whose final interval always meets the width requirement
GUARANTEED_WIDTH = frozenset({"conservative", "naive-seq", "seq-batch-min-cost",
                              "one-step-lookahead", "fully-seq-min-obs", "batch-seq-min-obs"})

POLICIES = {
    "naive-seq": naive_policy,
    "seq-batch-min-cost": cost_batch_policy,
    "one-step-lookahead": lookahead_policy,
    "batch-seq-min-obs": min_obs_batch_policy,
    "fully-seq-min-obs": min_obs_single_policy,
}
