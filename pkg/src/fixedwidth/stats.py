"""Wald interval for p_x - p_y and the small quantities everything else is built on."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class SampleState:
    """Cumulative successes and observation counts for both populations."""

    w_x: int
    m_x: int
    w_y: int
    m_y: int

    def __post_init__(self):
        if not (0 <= self.w_x <= self.m_x and 0 <= self.w_y <= self.m_y):
            raise ValueError(f"inconsistent counts: {self}")

    @property
    def mean_x(self) -> float:
        return self.w_x / self.m_x

    @property
    def mean_y(self) -> float:
        return self.w_y / self.m_y

    @property
    def tau_x(self) -> float:
        return tau(self.mean_x)

    @property
    def tau_y(self) -> float:
        return tau(self.mean_y)

    def advance(self, k_x: int, b_x: int, k_y: int, b_y: int) -> "SampleState":
        """State after observing ``k_x`` of ``b_x`` and ``k_y`` of ``b_y`` successes."""
        return SampleState(self.w_x + k_x, self.m_x + b_x, self.w_y + k_y, self.m_y + b_y)

    def swapped(self) -> "SampleState":
        return SampleState(self.w_y, self.m_y, self.w_x, self.m_x)


@dataclass(frozen=True)
class TargetSpec:
    alpha: float = 0.05
    epsilon: float = 0.05
    batch: int = 10

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.batch) != self.batch or self.batch < 1:
            raise ValueError(f"batch must be an integer >= 1, got {self.batch}")

    @property
    def z(self) -> float:
        return z_quantile(self.alpha)

    def with_batch(self, batch: int) -> "TargetSpec":
        return TargetSpec(self.alpha, self.epsilon, batch)


@dataclass(frozen=True)
class CostModel:
    c_x: float = 1.0
    c_y: float = 1.0

    def __post_init__(self):
        if not (self.c_x > 0.0 and self.c_y > 0.0):
            raise ValueError(f"costs must be positive, got ({self.c_x}, {self.c_y})")

    def cost(self, n_x: int, n_y: int) -> float:
        return n_x * self.c_x + n_y * self.c_y


@dataclass(frozen=True)
class ConfidenceInterval:
    center: float
    half_width: float
    m_x: int
    m_y: int

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def covers(self, value: float) -> bool:
        return abs(self.center - value) <= self.half_width


def z_quantile(alpha: float) -> float:
    """Upper alpha/2 quantile of the standard normal.

    Uses the stdlib inverse CDF (Wichura's AS241 rational approximation),
    accurate to roughly machine precision.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return _STD_NORMAL.inv_cdf(1.0 - alpha / 2.0)


def tau(p_hat: float) -> float:
    """Bernoulli variance proxy p(1 - p)."""
    return p_hat * (1.0 - p_hat)


def half_width(w_x: int, m_x: int, w_y: int, m_y: int, z: float) -> float:
    # hot-path form used inside the sequential loops; no validation
    px = w_x / m_x
    py = w_y / m_y
    return z * math.sqrt(px * (1.0 - px) / m_x + py * (1.0 - py) / m_y)


def wald_half_width(state: SampleState, alpha: float) -> float:
    if state.m_x < 1 or state.m_y < 1:
        raise ValueError("half-width needs at least one observation per population")
    return half_width(state.w_x, state.m_x, state.w_y, state.m_y, z_quantile(alpha))


def wald_ci(state: SampleState, alpha: float) -> ConfidenceInterval:
    h = wald_half_width(state, alpha)
    return ConfidenceInterval(state.mean_x - state.mean_y, h, state.m_x, state.m_y)


def minimax_estimate(w: int, m: int) -> float:
    """Squared-error minimax estimator of a Bernoulli mean, always in (0, 1)."""
    if m < 1:
        raise ValueError("minimax estimate needs m >= 1")
    if not 0 <= w <= m:
        raise ValueError(f"successes {w} outside [0, {m}]")
    r = math.sqrt(m)
    return (w + r / 2.0) / (m + r)


def planning_estimate(w: int, m: int, prior: float | None = None) -> float:
    """Estimate fed to the allocation formulas.

    The raw sample mean, replaced by the minimax estimate when it is 0 or 1.
    With no observations yet, ``prior`` (an expert estimate) is used.
    """
    if m == 0:
        if prior is None or not 0.0 < prior < 1.0:
            raise ValueError("no observations and no prior estimate in (0, 1)")
        return prior
    if w == 0 or w == m:
        return minimax_estimate(w, m)
    return w / m
