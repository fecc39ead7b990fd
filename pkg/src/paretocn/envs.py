"""Benchmark environments with known Pareto fronts.

Both environments are deterministic episodic gridworlds that report a
vector reward per step and carry a descriptor with their exact front, so
learned coverage sets can be scored without any reference data from
outside the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .pareto import non_dominated
from .validation import check_positive_int

WALKROOM_MAX_DIMS = 9
_GENERATION_ATTEMPTS = 32


@dataclass(frozen=True)
class StepOutcome:
    next_state: np.ndarray
    reward: np.ndarray
    terminal: bool


@dataclass(frozen=True)
class EnvDescriptor:
    """Static facts about an environment that the agent and metrics need."""

    state_dim: int
    n_objectives: int
    n_actions: int
    return_bounds: tuple
    max_horizon: int
    true_front: np.ndarray | None = None
    # Default reference point for hypervolume reporting: a vector strictly
    # below every achievable trade-off of interest.
    hv_reference: np.ndarray | None = None

    def __post_init__(self):
        lo, hi = self.return_bounds
        if not np.all(np.asarray(hi) >= np.asarray(lo)):
            raise ValueError("return_bounds upper bound is below the lower bound")
        if self.true_front is not None:
            mask = non_dominated(self.true_front)
            if not mask.all():
                raise ValueError("true_front contains dominated points")

    def command_scale(self) -> np.ndarray:
        """Reciprocal of the largest absolute achievable value per command
        input: each objective, then the horizon."""
        lo, hi = self.return_bounds
        max_abs = np.maximum(np.abs(np.asarray(lo)), np.abs(np.asarray(hi)))
        return np.append(1.0 / max_abs, 1.0 / self.max_horizon)


class DeepSeaTreasure:
    """Submarine gridworld: one treasure per column, deeper is worth more.

    The agent starts at the top-left surface cell. Every step costs one
    time unit; entering a treasure cell additionally pays that treasure's
    value and ends the episode. Moves into walls, the sea floor or off the
    grid leave the position unchanged but still cost the step.
    """

    N_ACTIONS = 4
    # up, down, left, right as (row, col) deltas
    _DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))

    def __init__(self, max_horizon: int = 200):
        self.max_horizon = check_positive_int(max_horizon, "max_horizon")
        rows, start, treasures, blocked = _load_grid()
        self.n_rows, self.n_cols = rows
        self._start = start
        self._treasures = treasures
        self._blocked = blocked
        front = sorted(
            (value, -(r + c)) for (r, c), value in treasures.items()
        )
        self.descriptor = EnvDescriptor(
            state_dim=self.n_rows * self.n_cols,
            n_objectives=2,
            n_actions=self.N_ACTIONS,
            return_bounds=(
                np.array([0.0, -float(max_horizon)]),
                np.array([max(v for v in treasures.values()), -1.0]),
            ),
            max_horizon=max_horizon,
            true_front=np.array(front, dtype=np.float64),
            hv_reference=np.array([0.0, -25.0]),
        )
        self._pos = None
        self._steps = 0
        self._terminal = True

    def reset(self) -> np.ndarray:
        self._pos = self._start
        self._steps = 0
        self._terminal = False
        return self._one_hot(self._pos)

    def step(self, action: int) -> StepOutcome:
        if self._terminal:
            raise ValueError("episode is over; call reset() first")
        action = int(action)
        if not 0 <= action < self.N_ACTIONS:
            raise ValueError(f"action must be in [0, {self.N_ACTIONS}), got {action}")
        dr, dc = self._DELTAS[action]
        row, col = self._pos
        new = (row + dr, col + dc)
        if (
            not (0 <= new[0] < self.n_rows and 0 <= new[1] < self.n_cols)
            or new in self._blocked
        ):
            new = self._pos
        self._pos = new
        self._steps += 1
        if new in self._treasures:
            reward = np.array([float(self._treasures[new]), -1.0])
            self._terminal = True
        else:
            reward = np.array([0.0, -1.0])
            if self._steps >= self.max_horizon:
                self._terminal = True
        return StepOutcome(self._one_hot(new), reward, self._terminal)

    def _one_hot(self, pos) -> np.ndarray:
        state = np.zeros(self.n_rows * self.n_cols)
        state[pos[0] * self.n_cols + pos[1]] = 1.0
        return state


def _load_grid():
    text = resources.files("paretocn").joinpath("data/dst_grid.txt").read_text()
    lines = [line.split() for line in text.splitlines() if line.strip()]
    n_rows = len(lines)
    n_cols = len(lines[0])
    if any(len(line) != n_cols for line in lines):
        raise ValueError("grid rows have inconsistent width")
    start = None
    treasures = {}
    blocked = set()
    for r, line in enumerate(lines):
        for c, token in enumerate(line):
            if token == "S":
                start = (r, c)
            elif token == "#":
                blocked.add((r, c))
            elif token != ".":
                treasures[(r, c)] = int(token)
    if start is None:
        raise ValueError("grid has no start cell")
    return (n_rows, n_cols), start, treasures, blocked


def dst_env(max_horizon: int = 200) -> DeepSeaTreasure:
    return DeepSeaTreasure(max_horizon=max_horizon)


@dataclass(frozen=True)
class WalkroomSpec:
    """Reproducible description of one generated walkroom instance."""

    n: int
    side: int
    seed: int
    goals: tuple

    def true_front(self) -> np.ndarray:
        return -np.array(self.goals, dtype=np.float64)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "side": self.side,
            "seed": self.seed,
            "goals": [list(g) for g in self.goals],
            "front": [[-float(v) for v in g] for g in self.goals],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "WalkroomSpec":
        payload = json.loads(text)
        return cls(
            n=payload["n"],
            side=payload["side"],
            seed=payload["seed"],
            goals=tuple(tuple(int(v) for v in g) for g in payload["goals"]),
        )


def generate_walkroom_spec(n: int, side: int = 16, seed: int = 0) -> WalkroomSpec:
    """Sample a goal antichain along the far border of an n-dimensional room.

    Candidate cells are drawn uniformly from the upper half of the grid and
    reduced to their minimal elements under componentwise <=, so that no
    goal is strictly closer to the origin than another in every dimension.
    A draw that collapses to a single goal is discarded and redrawn from an
    incremented sub-seed, a bounded number of times.
    """
    n = check_positive_int(n, "n")
    if not 2 <= n <= WALKROOM_MAX_DIMS:
        raise ValueError(f"n must be in [2, {WALKROOM_MAX_DIMS}], got {n}")
    side = check_positive_int(side, "side")
    if side < 4:
        raise ValueError(f"side must be >= 4, got {side}")
    lo = math.ceil(side / 2)
    for attempt in range(_GENERATION_ATTEMPTS):
        rng = np.random.default_rng(np.random.SeedSequence((seed, attempt)))
        candidates = rng.integers(lo, side, size=(3 * side, n))
        unique = np.unique(candidates, axis=0)
        minimal = unique[non_dominated(-unique.astype(np.float64))]
        if minimal.shape[0] > 1:
            goals = tuple(tuple(int(v) for v in g) for g in minimal)
            return WalkroomSpec(n=n, side=side, seed=seed, goals=goals)
    raise RuntimeError(
        f"walkroom generation collapsed to a single goal "
        f"{_GENERATION_ATTEMPTS} times (n={n}, side={side}, seed={seed})"
    )


class Walkroom:
    """n-dimensional room with goal cells along an uneven far border.

    Each of the 2n actions moves one step along one dimension (positive or
    negative), clamped to the grid; the step costs one unit in the moving
    dimension's objective regardless of whether the position changed. The
    episode ends once every coordinate of some goal is reached, so each
    goal corresponds to one efficient trade-off between the objectives.
    """

    def __init__(self, spec: WalkroomSpec, max_horizon: int | None = None):
        self.spec = spec
        n, side = spec.n, spec.side
        self._goals = np.array(spec.goals, dtype=np.int64)
        if max_horizon is None:
            max_horizon = n * side * 4
        self.max_horizon = check_positive_int(max_horizon, "max_horizon")
        self.descriptor = EnvDescriptor(
            state_dim=n * side,
            n_objectives=n,
            n_actions=2 * n,
            return_bounds=(
                np.full(n, -float(self.max_horizon)),
                np.zeros(n),
            ),
            max_horizon=self.max_horizon,
            true_front=spec.true_front(),
            hv_reference=np.full(n, -float(side)),
        )
        self._pos = None
        self._steps = 0
        self._terminal = True

    def reset(self) -> np.ndarray:
        self._pos = np.zeros(self.spec.n, dtype=np.int64)
        self._steps = 0
        self._terminal = False
        return self._encode(self._pos)

    def step(self, action: int) -> StepOutcome:
        if self._terminal:
            raise ValueError("episode is over; call reset() first")
        action = int(action)
        n, side = self.spec.n, self.spec.side
        if not 0 <= action < 2 * n:
            raise ValueError(f"action must be in [0, {2 * n}), got {action}")
        dim, sign = divmod(action, 2)
        delta = 1 if sign == 0 else -1
        self._pos[dim] = min(max(self._pos[dim] + delta, 0), side - 1)
        self._steps += 1
        reward = np.zeros(n)
        reward[dim] = -1.0
        at_goal = bool(np.any(np.all(self._pos >= self._goals, axis=1)))
        self._terminal = at_goal or self._steps >= self.max_horizon
        return StepOutcome(self._encode(self._pos), reward, self._terminal)

    def _encode(self, pos) -> np.ndarray:
        n, side = self.spec.n, self.spec.side
        state = np.zeros(n * side)
        state[np.arange(n) * side + pos] = 1.0
        return state


def walkroom_env(n: int, side: int = 16, seed: int = 0) -> Walkroom:
    return Walkroom(generate_walkroom_spec(n, side, seed))
