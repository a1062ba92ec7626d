"""Expected-cost evaluation of candidate batch allocations.

A candidate (b_x, b_y) is priced by enumerating every success pair
(k_x, k_y) it could produce, weighting each child state by its product-binomial
probability, and charging the child the cost-to-go (CTG) of finishing it with
the two-stage cost-minimizing plan.  Children whose interval is already narrow
enough cost nothing further.  With depth > 1 the child instead picks its own
best allocation recursively before the CTG is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .allocation import _two_stage_targets, variance_bound
from .stats import CostModel, SampleState, TargetSpec, half_width, planning_estimate, tau

DEFAULT_BUDGET = 10 ** 6

# relative slack under which two candidate values count as tied
_TIE_RTOL = 1e-9


class EnumerationBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Allocation:
    b_x: int
    b_y: int

    def __post_init__(self):
        if self.b_x < 0 or self.b_y < 0:
            raise ValueError(f"negative allocation {self}")

    @property
    def batch(self) -> int:
        return self.b_x + self.b_y


def binomial_pmf(n: int, p: float) -> list[float]:
    q = 1.0 - p
    return [math.comb(n, k) * p ** k * q ** (n - k) for k in range(n + 1)]


def transition_probs(state: SampleState, allocation: Allocation,
                     p_x: float, p_y: float) -> dict[tuple[int, int], float]:
    """Probability of each (k_x, k_y) success pair after sampling ``allocation``.

    ``state`` fixes the origin; the kernel itself depends only on the
    allocation and the success probabilities.
    """
    fx = binomial_pmf(allocation.b_x, p_x)
    fy = binomial_pmf(allocation.b_y, p_y)
    return {(kx, ky): qx * qy for kx, qx in enumerate(fx) for ky, qy in enumerate(fy)}


class _Evaluator:
    """Holds the constants of one look-ahead query so the recursion stays flat."""

    def __init__(self, costs: CostModel, target: TargetSpec,
                 prior: tuple[float, float] | None):
        self.c_x = costs.c_x
        self.c_y = costs.c_y
        self.z = target.z
        self.eps = target.epsilon
        self.bound = variance_bound(target)
        self.prior_x, self.prior_y = prior if prior else (None, None)

    def done(self, wx, mx, wy, my) -> bool:
        return mx > 0 and my > 0 and half_width(wx, mx, wy, my, self.z) <= self.eps

    def estimates(self, wx, mx, wy, my) -> tuple[float, float]:
        return (planning_estimate(wx, mx, self.prior_x),
                planning_estimate(wy, my, self.prior_y))

    def ctg(self, wx, mx, wy, my) -> float:
        if self.done(wx, mx, wy, my):
            return 0.0
        px, py = self.estimates(wx, mx, wy, my)
        t_x, t_y = _two_stage_targets(mx, my, px * (1.0 - px), py * (1.0 - py),
                                      self.c_x, self.c_y, self.bound)
        return (t_x - mx) * self.c_x + (t_y - my) * self.c_y

    def _side(self, w, m, b, p, prior, c):
        # per-outcome terms of one population, hoisted out of the pair loop:
        # raw variance term, planning tau, tau/n, sqrt(tau c), sqrt(tau / c)
        n = m + b
        out = []
        for k in range(b + 1):
            t = tau(planning_estimate(w + k, n, prior))
            if n:
                q = (w + k) / n
                out.append((q * (1.0 - q) / n, t, t / n, math.sqrt(t * c), math.sqrt(t / c)))
            else:
                out.append((math.inf, t, math.inf, math.sqrt(t * c), math.sqrt(t / c)))
        return n, binomial_pmf(b, p), out

    def expected_one(self, wx, mx, wy, my, bx, by, px, py) -> float:
        """Depth-1 value.

        Inlines ``ctg`` over all child states; the arithmetic is kept
        operation-for-operation identical to ``_two_stage_targets``.
        """
        c_x, c_y = self.c_x, self.c_y
        nx, fx, side_x = self._side(wx, mx, bx, px, self.prior_x, c_x)
        ny, fy, side_y = self._side(wy, my, by, py, self.prior_y, c_y)
        z, eps, bound = self.z, self.eps, self.bound
        both = nx > 0 and ny > 0
        ceil, sqrt = math.ceil, math.sqrt
        total = 0.0
        for qx, (vx, tx, ux, sx, rx) in zip(fx, side_x):
            for qy, (vy, ty, uy, sy, ry) in zip(fy, side_y):
                if both and (z * sqrt(vx + vy) <= eps or ux + uy <= bound):
                    continue
                root = (sx + sy) / bound
                t_x = max(ceil(root * rx), nx)
                t_y = max(ceil(root * ry), ny)
                if t_x == nx and t_y > ny:
                    t_y = max(ceil(ty / (bound - ux)), ny)
                elif t_y == ny and t_x > nx:
                    t_x = max(ceil(tx / (bound - uy)), nx)
                total += qx * qy * ((t_x - nx) * c_x + (t_y - ny) * c_y)
        return bx * c_x + by * c_y + total

    def expected(self, wx, mx, wy, my, bx, by, depth) -> float:
        px, py = self.estimates(wx, mx, wy, my)
        if depth == 1:
            return self.expected_one(wx, mx, wy, my, bx, by, px, py)
        fx = binomial_pmf(bx, px)
        fy = binomial_pmf(by, py)
        nx, ny = mx + bx, my + by
        total = 0.0
        for kx, qx in enumerate(fx):
            for ky, qy in enumerate(fy):
                total += qx * qy * self.value(wx + kx, nx, wy + ky, ny, bx + by, depth - 1)
        return bx * self.c_x + by * self.c_y + total

    def value(self, wx, mx, wy, my, batch, depth) -> float:
        if depth == 0:
            return self.ctg(wx, mx, wy, my)
        if self.done(wx, mx, wy, my):
            return 0.0
        return min(self.expected(wx, mx, wy, my, b, batch - b, depth)
                   for b in range(batch + 1))


def _check_budget(batch: int, depth: int, budget: int) -> None:
    if depth < 1:
        raise ValueError("look-ahead depth must be >= 1")
    size = (batch + 1) ** (2 * depth)
    if size > budget:
        raise EnumerationBudgetError(
            f"enumeration size (B+1)^(2l) = {size} exceeds budget {budget} "
            f"(B={batch}, l={depth})")


def cost_to_go(state: SampleState, costs: CostModel, target: TargetSpec,
               prior: tuple[float, float] | None = None) -> float:
    """Planned second-stage cost from ``state``, zero once the width is met."""
    return _Evaluator(costs, target, prior).ctg(state.w_x, state.m_x, state.w_y, state.m_y)


def expected_cost(state: SampleState, allocation: Allocation, costs: CostModel,
                  target: TargetSpec, depth: int = 1,
                  prior: tuple[float, float] | None = None,
                  budget: int = DEFAULT_BUDGET) -> float:
    """Stage cost of ``allocation`` plus the expected cost of what follows it."""
    _check_budget(allocation.batch, depth, budget)
    ev = _Evaluator(costs, target, prior)
    return ev.expected(state.w_x, state.m_x, state.w_y, state.m_y,
                       allocation.b_x, allocation.b_y, depth)


def best_allocation(state: SampleState, batch: int, costs: CostModel,
                    target: TargetSpec, depth: int = 1,
                    prior: tuple[float, float] | None = None,
                    budget: int = DEFAULT_BUDGET) -> Allocation:
    """Allocation of ``batch`` observations with the least expected cost.

    Candidates are scanned in order of increasing b_x; near-ties keep the
    earlier (smaller b_x) candidate.
    """
    _check_budget(batch, depth, budget)
    ev = _Evaluator(costs, target, prior)
    return Allocation(*_argmin(ev, state.w_x, state.m_x, state.w_y, state.m_y, batch, depth))


def _argmin(ev: _Evaluator, wx, mx, wy, my, batch, depth) -> tuple[int, int]:
    best_b, best_v = 0, ev.expected(wx, mx, wy, my, 0, batch, depth)
    for b in range(1, batch + 1):
        v = ev.expected(wx, mx, wy, my, b, batch - b, depth)
        if v < best_v - _TIE_RTOL * max(1.0, abs(best_v)):
            best_b, best_v = b, v
    return best_b, batch - best_b
