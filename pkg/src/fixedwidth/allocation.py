"""Sample-size allocation between the two populations.

The cost-minimizing plan relaxes the integer program

    min  m_x c_x + m_y c_y   s.t.  tau_x / m_x + tau_y / m_y <= eps^2 / z^2

to reals, solves it in closed form through the KKT conditions, and rounds up.
When one population already holds more observations than the relaxed optimum
asks for, its count is frozen and the other is re-solved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .stats import CostModel, SampleState, TargetSpec, planning_estimate, tau


@dataclass(frozen=True)
class AllocationPlan:
    target_m_x: int
    target_m_y: int
    add_x: int
    add_y: int
    planned_cost: float

    @property
    def is_zero(self) -> bool:
        return self.add_x == 0 and self.add_y == 0


def round_half_away(x: float) -> int:
    """Round to nearest integer, halves away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def variance_bound(target: TargetSpec) -> float:
    """Right-hand side eps^2 / z^2 of the width constraint."""
    return target.epsilon ** 2 / target.z ** 2


def kkt_real_allocation(tau_x: float, tau_y: float, costs: CostModel,
                        epsilon: float, z: float) -> tuple[float, float]:
    """Real-valued cost-minimizing sample sizes (1/zeta_x, 1/zeta_y)."""
    if not (tau_x > 0.0 and tau_y > 0.0):
        raise ValueError("variance proxies must be positive; substitute minimax estimates first")
    if not (epsilon > 0.0 and z > 0.0):
        raise ValueError("epsilon and z must be positive")
    bound = epsilon ** 2 / z ** 2
    lam = ((math.sqrt(tau_x * costs.c_x) + math.sqrt(tau_y * costs.c_y)) / bound) ** 2
    zeta_x = math.sqrt(costs.c_x / (lam * tau_x))
    zeta_y = math.sqrt(costs.c_y / (lam * tau_y))
    return 1.0 / zeta_x, 1.0 / zeta_y


def _two_stage_targets(m_x1: int, m_y1: int, tau_x: float, tau_y: float,
                       c_x: float, c_y: float, bound: float) -> tuple[int, int]:
    # scalar core shared by the planner, the batched procedure and the look-ahead CTG
    if m_x1 > 0 and m_y1 > 0 and tau_x / m_x1 + tau_y / m_y1 <= bound:
        return m_x1, m_y1
    root = (math.sqrt(tau_x * c_x) + math.sqrt(tau_y * c_y)) / bound
    t_x = max(math.ceil(root * math.sqrt(tau_x / c_x)), m_x1)
    t_y = max(math.ceil(root * math.sqrt(tau_y / c_y)), m_y1)
    if t_x == m_x1 and t_y > m_y1:
        t_y = max(math.ceil(tau_y / (bound - tau_x / m_x1)), m_y1)
    elif t_y == m_y1 and t_x > m_x1:
        t_x = max(math.ceil(tau_x / (bound - tau_y / m_y1)), m_x1)
    return t_x, t_y


def _check_estimate(p: float, name: str) -> None:
    if not math.isfinite(p) or not 0.0 < p < 1.0:
        raise ValueError(f"{name} must be a finite estimate in (0, 1), got {p}")


def two_stage_plan(m_x1: int, m_y1: int, p_x: float, p_y: float,
                   costs: CostModel, target: TargetSpec) -> AllocationPlan:
    """Second-stage sizes minimizing total cost from first-stage estimates."""
    _check_estimate(p_x, "p_x")
    _check_estimate(p_y, "p_y")
    if m_x1 < 0 or m_y1 < 0:
        raise ValueError("first-stage counts must be non-negative")
    t_x, t_y = _two_stage_targets(m_x1, m_y1, tau(p_x), tau(p_y),
                                  costs.c_x, costs.c_y, variance_bound(target))
    add_x, add_y = t_x - m_x1, t_y - m_y1
    return AllocationPlan(t_x, t_y, add_x, add_y, costs.cost(add_x, add_y))


def plan_for_state(state: SampleState, costs: CostModel, target: TargetSpec,
                   prior: tuple[float, float] | None = None) -> AllocationPlan:
    """``two_stage_plan`` driven by the running means of ``state``."""
    px = planning_estimate(state.w_x, state.m_x, prior[0] if prior else None)
    py = planning_estimate(state.w_y, state.m_y, prior[1] if prior else None)
    return two_stage_plan(state.m_x, state.m_y, px, py, costs, target)


def min_obs_two_stage_plan(p_x: float, p_y: float, m_x1: int, m_y1: int,
                           target: TargetSpec,
                           costs: CostModel | None = None) -> AllocationPlan:
    """Second-stage sizes minimizing the total number of observations.

    ``costs`` only prices the plan; the allocation itself is cost-blind.
    """
    _check_estimate(p_x, "p_x")
    _check_estimate(p_y, "p_y")
    costs = costs or CostModel()
    tau_x, tau_y = tau(p_x), tau(p_y)
    beta = 1.0 / (1.0 + math.sqrt(tau_y / tau_x))
    total = target.z ** 2 * (math.sqrt(tau_x) + math.sqrt(tau_y)) ** 2 / target.epsilon ** 2
    t_x = max(round_half_away(beta * total), m_x1)
    t_y = max(round_half_away((1.0 - beta) * total), m_y1)
    add_x, add_y = t_x - m_x1, t_y - m_y1
    return AllocationPlan(t_x, t_y, add_x, add_y, costs.cost(add_x, add_y))
