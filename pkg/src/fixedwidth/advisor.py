"""Turn-based advisor for live data collection.

A session is a line-delimited JSON transcript: one header record describing
the target, costs and procedure, then one record per entered batch.  The
state is rebuilt by replaying the transcript, so a session can be resumed
at any point.  Recommendations come from the same stage policies the
simulated procedures use.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

from .lookahead import DEFAULT_BUDGET
from .procedures import POLICIES
from .stats import ConfidenceInterval, CostModel, TargetSpec, half_width

ADVISOR_PROCEDURES = ("seq-batch-min-cost", "one-step-lookahead", "batch-seq-min-obs")
DEFAULT_PROCEDURE = "seq-batch-min-cost"


class SessionError(ValueError):
    pass


@dataclass(frozen=True)
class SessionHeader:
    alpha: float
    epsilon: float
    batch: int
    c_x: float = 1.0
    c_y: float = 1.0
    procedure: str = DEFAULT_PROCEDURE
    prior_x: float | None = None
    prior_y: float | None = None
    depth: int = 1
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.procedure not in ADVISOR_PROCEDURES:
            raise SessionError(f"procedure must be one of {', '.join(ADVISOR_PROCEDURES)}")
        for p in (self.prior_x, self.prior_y):
            if p is not None and not 0.0 < p < 1.0:
                raise SessionError(f"prior estimate {p} must lie in (0, 1)")
        self.target
        self.costs

    @property
    def target(self) -> TargetSpec:
        return TargetSpec(self.alpha, self.epsilon, self.batch)

    @property
    def costs(self) -> CostModel:
        return CostModel(self.c_x, self.c_y)


@dataclass(frozen=True)
class Turn:
    turn: int
    entered: tuple[int, int, int, int]
    state: tuple[int, int, int, int]
    half_width: float | None
    verdict: str
    recommendation: tuple[int, int] | None
    stage: int | None


class AdvisorSession:
    def __init__(self, path: str | Path, header: SessionHeader):
        self.path = Path(path)
        self.header = header
        self.state = (0, 0, 0, 0)
        self.turns: list[Turn] = []
        self._stage = 0
        kwargs = dict(costs=header.costs, prior=(header.prior_x, header.prior_y))
        if header.procedure == "one-step-lookahead":
            kwargs.update(depth=header.depth, budget=header.budget)
        self._policy = POLICIES[header.procedure](header.target, **kwargs)
        self.initial = self._advise_empty()
        if self.initial[0] == "CONTINUE":
            self._stage = 1

    # -- persistence ----------------------------------------------------------

    @classmethod
    def create(cls, path: str | Path, header: SessionHeader) -> "AdvisorSession":
        path = Path(path)
        if path.exists():
            raise SessionError(f"session file {path} already exists")
        session = cls(path, header)
        session._append({"type": "session", **asdict(header)})
        return session

    @classmethod
    def load(cls, path: str | Path) -> "AdvisorSession":
        path = Path(path)
        try:
            lines = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
        except FileNotFoundError:
            raise SessionError(f"no session file at {path}") from None
        except json.JSONDecodeError as exc:
            raise SessionError(f"{path}: corrupt transcript ({exc})") from None
        if not lines or lines[0].get("type") != "session":
            raise SessionError(f"{path}: missing session header")
        head = {k: v for k, v in lines[0].items() if k != "type"}
        session = cls(path, SessionHeader(**head))
        for rec in lines[1:]:
            turn = session._apply(*rec["entered"])
            if turn.recommendation != (tuple(rec["recommendation"]) if rec["recommendation"] else None):
                raise SessionError(f"{path}: turn {rec['turn']} does not replay consistently")
        return session

    def _append(self, record: dict) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- turns ----------------------------------------------------------------

    def enter(self, w_x: int, n_x: int, w_y: int, n_y: int) -> Turn:
        """Record one observed batch and persist the resulting turn."""
        turn = self._apply(w_x, n_x, w_y, n_y)
        self._append({"type": "turn", **asdict(turn)})
        return turn

    def _apply(self, w_x, n_x, w_y, n_y) -> Turn:
        for v in (w_x, n_x, w_y, n_y):
            if int(v) != v or v < 0:
                raise SessionError(f"counts must be non-negative integers, got {v}")
        if w_x > n_x or w_y > n_y:
            raise SessionError(f"successes exceed observations tried ({w_x}/{n_x}, {w_y}/{n_y})")
        if self.done:
            raise SessionError("session already stopped; the interval is final")
        wx, mx, wy, my = self.state
        self.state = (wx + w_x, mx + n_x, wy + w_y, my + n_y)
        h, verdict, rec, stage = self._decide()
        turn = Turn(len(self.turns) + 1, (w_x, n_x, w_y, n_y), self.state, h, verdict, rec, stage)
        self.turns.append(turn)
        return turn

    def _decide(self):
        wx, mx, wy, my = self.state
        h = half_width(wx, mx, wy, my, self.header.target.z) if mx and my else None
        if h is not None and h <= self.header.epsilon:
            return h, "STOP", None, None
        try:
            rec = self._policy(wx, mx, wy, my, self._stage + 1)
        except ValueError:
            # no data and no prior for a population yet
            return h, "NEED-DATA", None, None
        self._stage += 1
        return h, "CONTINUE", (int(rec[0]), int(rec[1])), self._stage

    def _advise_empty(self) -> tuple[str, tuple[int, int] | None]:
        # before any data a recommendation is possible only from priors
        try:
            bx, by = self._policy(0, 0, 0, 0, 1)
        except ValueError:
            return "NEED-DATA", None
        return "CONTINUE", (int(bx), int(by))

    def advice(self) -> tuple[str, tuple[int, int] | None]:
        """Current verdict and recommended (b_x, b_y)."""
        if self.turns:
            return self.turns[-1].verdict, self.turns[-1].recommendation
        return self.initial

    @property
    def done(self) -> bool:
        return bool(self.turns) and self.turns[-1].verdict == "STOP"

    def ci(self) -> ConfidenceInterval | None:
        wx, mx, wy, my = self.state
        if not (mx and my):
            return None
        return ConfidenceInterval(wx / mx - wy / my,
                                  half_width(wx, mx, wy, my, self.header.target.z), mx, my)

    @property
    def current_half_width(self) -> float:
        wx, mx, wy, my = self.state
        return half_width(wx, mx, wy, my, self.header.target.z) if mx and my else math.inf
