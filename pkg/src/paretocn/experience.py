"""Trajectory storage and the pruned experience buffer.

Episodes are decomposed into supervised datapoints: at step t the network
should output action a_t when asked for the return actually obtained from t
onward, within the number of steps actually taken. The buffer keeps at most
N trajectories, discarding the ones whose episode return carries the lowest
dominating score, so the stored returns spread out along the front instead
of piling up on the easiest outcome.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .metrics import dominating_score
from .network import TrainBatch
from .pareto import non_dominated, write_points_csv
from .validation import check_positive_int, check_rng

_BUF_MAGIC = b"PCNTRAJL"
_BUF_VERSION = 1


def _check_gamma(gamma) -> float:
    gamma = float(gamma)
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    return gamma


@dataclass
class Trajectory:
    """One episode: aligned arrays of states, actions and reward vectors."""

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=np.float64))
        self.actions = np.asarray(self.actions, dtype=np.int64).ravel()
        self.rewards = np.atleast_2d(np.asarray(self.rewards, dtype=np.float64))
        t = self.states.shape[0]
        if t == 0:
            raise ValueError("trajectory must contain at least one step")
        if not (self.actions.shape[0] == self.rewards.shape[0] == t):
            raise ValueError("states, actions and rewards are not aligned")

    def __len__(self):
        return self.states.shape[0]

    def suffix_returns(self, gamma: float) -> np.ndarray:
        return suffix_returns(self.rewards, gamma)

    def horizons(self) -> np.ndarray:
        t = len(self)
        return np.arange(t, 0, -1, dtype=np.float64)


@dataclass(frozen=True)
class DataPoint:
    """One supervised example: reach ``desired_return`` within ``horizon``
    steps from ``state`` by taking ``action``."""

    state: np.ndarray
    horizon: float
    desired_return: np.ndarray
    action: int


def suffix_returns(rewards, gamma) -> np.ndarray:
    """Discounted sums from each step to the end of the episode.

    The recursion runs backward, R_t = r_t + gamma * R_{t+1}, so the
    discount restarts at every suffix: the return labeled at step t weights
    r_t fully regardless of where t falls in the episode.
    """
    gamma = _check_gamma(gamma)
    rewards = np.atleast_2d(np.asarray(rewards, dtype=np.float64))
    out = np.empty_like(rewards)
    acc = np.zeros(rewards.shape[1])
    for t in range(rewards.shape[0] - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def to_datapoints(traj: Trajectory, gamma: float) -> list[DataPoint]:
    """One datapoint per step, pairing each action with the return and
    horizon realized after it was taken."""
    returns = traj.suffix_returns(gamma)
    horizons = traj.horizons()
    return [
        DataPoint(
            state=traj.states[t],
            horizon=float(horizons[t]),
            desired_return=returns[t],
            action=int(traj.actions[t]),
        )
        for t in range(len(traj))
    ]


class ExperienceBuffer:
    """Bounded multiset of trajectories ranked by dominating score.

    Insertion past the capacity evicts the trajectory whose episode return
    scores lowest, ties going to the oldest. The flat datapoint arrays used
    for sampling are rebuilt lazily, so a burst of inserts followed by many
    sample calls pays the rebuild cost once.
    """

    def __init__(
        self,
        capacity: int,
        n_objectives: int,
        gamma: float = 1.0,
        score_penalty: float = 0.01,
    ):
        self.capacity = check_positive_int(capacity, "capacity")
        self.n_objectives = check_positive_int(n_objectives, "n_objectives")
        self.gamma = _check_gamma(gamma)
        if score_penalty <= 0:
            raise ValueError(f"score_penalty must be > 0, got {score_penalty}")
        self.score_penalty = float(score_penalty)
        self._trajectories: list[Trajectory] = []
        self._returns: list[np.ndarray] = []
        self._flat: TrainBatch | None = None
        self._nd_mask: np.ndarray | None = None

    def __len__(self):
        return len(self._trajectories)

    @property
    def episode_returns(self) -> np.ndarray:
        if not self._returns:
            return np.empty((0, self.n_objectives))
        return np.stack(self._returns)

    def insert(self, traj: Trajectory) -> None:
        if traj.rewards.shape[1] != self.n_objectives:
            raise ValueError(
                f"trajectory has {traj.rewards.shape[1]} objectives, "
                f"buffer expects {self.n_objectives}"
            )
        self._trajectories.append(traj)
        self._returns.append(traj.suffix_returns(self.gamma)[0])
        self._invalidate()
        if len(self._trajectories) > self.capacity:
            self.prune()

    def prune(self) -> list[Trajectory]:
        """Drop lowest-scoring trajectories until the capacity bound holds."""
        removed = []
        while len(self._trajectories) > self.capacity:
            returns = self.episode_returns
            scores = dominating_score(
                returns, self.non_dominated_mask(), c=self.score_penalty
            )
            worst = int(np.argmin(scores))
            removed.append(self._trajectories.pop(worst))
            self._returns.pop(worst)
            self._invalidate()
        return removed

    def non_dominated_mask(self) -> np.ndarray:
        if self._nd_mask is None:
            self._nd_mask = non_dominated(self.episode_returns)
        return self._nd_mask

    def coverage_targets(self):
        """Non-dominated episode returns with their episode lengths."""
        if not self._trajectories:
            raise ValueError("buffer is empty")
        mask = self.non_dominated_mask()
        returns = self.episode_returns[mask]
        lengths = np.array(
            [len(t) for t, keep in zip(self._trajectories, mask) if keep],
            dtype=np.float64,
        )
        return returns, lengths

    def sample_batch(self, batch_size: int, rng) -> TrainBatch:
        """Uniform draw (with replacement) over every stored datapoint, so a
        trajectory's weight is proportional to its length."""
        batch_size = check_positive_int(batch_size, "batch_size")
        rng = check_rng(rng)
        flat = self._flat_datapoints()
        idx = rng.integers(0, len(flat), size=batch_size)
        return TrainBatch(
            states=flat.states[idx],
            horizons=flat.horizons[idx],
            returns=flat.returns[idx],
            actions=flat.actions[idx],
        )

    def select_target(self, rng):
        """Exploration command: a non-dominated return stretched along one
        objective, with that trajectory's length as the horizon.

        The stretch is uniform in [0, sigma_o), where sigma_o is the
        population spread of the chosen objective over the non-dominated
        returns; a singleton front has zero spread and is returned as is.
        """
        if not self._trajectories:
            raise ValueError("buffer is empty")
        rng = check_rng(rng)
        returns, lengths = self.coverage_targets()
        pick = int(rng.integers(0, returns.shape[0]))
        objective = int(rng.integers(0, self.n_objectives))
        sigma = float(returns[:, objective].std())
        target = returns[pick].copy()
        target[objective] += rng.uniform(0.0, sigma)
        return target, float(lengths[pick])

    def _invalidate(self):
        self._flat = None
        self._nd_mask = None

    def _flat_datapoints(self) -> TrainBatch:
        if not self._trajectories:
            raise ValueError("buffer is empty")
        if self._flat is None:
            self._flat = TrainBatch(
                states=np.concatenate([t.states for t in self._trajectories]),
                horizons=np.concatenate(
                    [t.horizons() for t in self._trajectories]
                ),
                returns=np.concatenate(
                    [t.suffix_returns(self.gamma) for t in self._trajectories]
                ),
                actions=np.concatenate([t.actions for t in self._trajectories]),
            )
        return self._flat

    def save_returns_csv(self, path) -> None:
        write_points_csv(path, self.episode_returns)

    def save(self, path) -> None:
        """Binary trajectory log: versioned, little-endian, resumable."""
        with open(str(path), "wb") as fh:
            fh.write(_BUF_MAGIC)
            state_dim = (
                self._trajectories[0].states.shape[1] if self._trajectories else 0
            )
            fh.write(
                struct.pack(
                    "<IIIId",
                    _BUF_VERSION,
                    self.capacity,
                    self.n_objectives,
                    state_dim,
                    self.gamma,
                )
            )
            fh.write(struct.pack("<I", len(self._trajectories)))
            for traj in self._trajectories:
                fh.write(struct.pack("<I", len(traj)))
                fh.write(np.ascontiguousarray(traj.states, dtype="<f8").tobytes())
                fh.write(np.ascontiguousarray(traj.actions, dtype="<i8").tobytes())
                fh.write(np.ascontiguousarray(traj.rewards, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "ExperienceBuffer":
        with open(str(path), "rb") as fh:
            if fh.read(len(_BUF_MAGIC)) != _BUF_MAGIC:
                raise ValueError(f"{path} is not a trajectory log")
            version, capacity, n_objectives, state_dim, gamma = struct.unpack(
                "<IIIId", fh.read(24)
            )
            if version != _BUF_VERSION:
                raise ValueError(f"unsupported trajectory log version {version}")
            buffer = cls(capacity, n_objectives, gamma)
            (count,) = struct.unpack("<I", fh.read(4))
            for _ in range(count):
                (t,) = struct.unpack("<I", fh.read(4))
                states = np.frombuffer(fh.read(8 * t * state_dim), dtype="<f8")
                actions = np.frombuffer(fh.read(8 * t), dtype="<i8")
                rewards = np.frombuffer(fh.read(8 * t * n_objectives), dtype="<f8")
                buffer.insert(
                    Trajectory(
                        states=states.reshape(t, state_dim).copy(),
                        actions=actions.copy(),
                        rewards=rewards.reshape(t, n_objectives).copy(),
                    )
                )
        return buffer
