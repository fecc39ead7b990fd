"""Training loop and estimator for the conditioned policy.

The loop alternates three phases. Exploration runs episodes whose command
is a stored non-dominated return stretched along one objective, so the
policy is always asked for slightly more than it has already achieved.
Retraining fits the network by supervised learning on the buffer's
(state, horizon, return) -> action datapoints. Evaluation replays the
greedy policy once per non-dominated stored return and reports the
achieved coverage set against the environment's true front.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .envs import EnvDescriptor
from .experience import ExperienceBuffer, Trajectory
from .metrics import front_normalized_epsilon, hypervolume
from .network import (
    AdamOptimizer,
    PcnModel,
    action_distribution,
    init_model,
    train_batch,
)
from .pareto import non_dominated
from .validation import check_positive_int, check_return_vector, check_rng


@dataclass
class AgentConfig:
    """Schedule and capacity constants for one training run.

    ``max_episode_len`` of None means the environment's own horizon cap.
    ``reference_point`` of None means the environment's default hypervolume
    reference. With ``discount_consistent_commands`` the per-step desired
    return update divides by gamma, keeping the command on the scale of
    suffix returns when gamma < 1; the plain rule subtracts the reward only.
    ``metrics_every`` spaces out the greedy coverage evaluation: every
    round logs its loss, but hypervolume and epsilon are computed only on
    the first round, every k-th after, and the last. Exact hypervolume
    gets expensive past six or so objectives, where evaluating every
    round would dwarf the training itself.

    The buffer is small on purpose. Pruning trims the most crowded
    returns first, so a tight capacity discards duplicated episodes
    almost immediately and the training set stays spread across the
    front; a large buffer lets one over-visited return dominate both the
    fitting targets and the command distribution drawn from them.
    """

    total_steps: int = 150_000
    warmup_episodes: int = 20
    episodes_per_update: int = 20
    updates_per_round: int = 50
    batch_size: int = 64
    gamma: float = 1.0
    buffer_capacity: int = 50
    learning_rate: float = 3e-4
    seed: int = 0
    max_episode_len: int | None = None
    widths: tuple = (64, 64)
    score_penalty: float = 0.01
    discount_consistent_commands: bool = False
    reference_point: object = None
    metrics_every: int = 1

    def __post_init__(self):
        check_positive_int(self.total_steps, "total_steps")
        check_positive_int(self.warmup_episodes, "warmup_episodes")
        check_positive_int(self.episodes_per_update, "episodes_per_update")
        check_positive_int(self.updates_per_round, "updates_per_round")
        check_positive_int(self.batch_size, "batch_size")
        check_positive_int(self.buffer_capacity, "buffer_capacity")
        check_positive_int(self.metrics_every, "metrics_every")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_episode_len is not None:
            check_positive_int(self.max_episode_len, "max_episode_len")


@dataclass(frozen=True)
class EvalResult:
    """Greedy-replay outcome: what was asked for, what came back, and the
    non-dominated subset of the latter."""

    targets: np.ndarray
    achieved: np.ndarray
    coverage: np.ndarray


def _episode_cap(env, max_episode_len):
    if max_episode_len is None:
        return env.descriptor.max_horizon
    return check_positive_int(max_episode_len, "max_episode_len")


def _next_command(desired_return, reward, discount_consistent, gamma):
    updated = desired_return - reward
    if discount_consistent and gamma < 1.0:
        updated = updated / gamma
    return updated


def run_episode(
    env,
    model: PcnModel,
    desired_return,
    desired_horizon,
    mode: str = "sample",
    rng=None,
    max_episode_len: int | None = None,
    discount_consistent: bool = False,
    gamma: float = 1.0,
) -> Trajectory:
    """One conditioned episode.

    The command starts at (desired_return, desired_horizon) and is updated
    every step: the observed reward is subtracted from the desired return
    and the desired horizon drops by one, never below 1. Actions are drawn
    from the softmax in ``sample`` mode; ``greedy`` takes the argmax, with
    ties resolved to the lowest action index.
    """
    if mode not in ("sample", "greedy"):
        raise ValueError(f"mode must be 'sample' or 'greedy', got {mode!r}")
    desired = check_return_vector(
        desired_return, "desired_return", dim=env.descriptor.n_objectives
    ).copy()
    horizon = float(desired_horizon)
    if horizon < 1:
        raise ValueError(f"desired_horizon must be >= 1, got {horizon}")
    rng = check_rng(rng)
    cap = _episode_cap(env, max_episode_len)
    state = env.reset()
    states, actions, rewards = [], [], []
    for _ in range(cap):
        logits = model.forward_batch(
            state[None, :], np.array([horizon]), desired[None, :]
        )[0]
        if mode == "sample":
            probs = action_distribution(logits)
            action = int(rng.choice(probs.shape[0], p=probs))
        else:
            action = int(np.argmax(logits))
        outcome = env.step(action)
        states.append(state)
        actions.append(action)
        rewards.append(outcome.reward)
        state = outcome.next_state
        desired = _next_command(desired, outcome.reward, discount_consistent, gamma)
        horizon = max(horizon - 1.0, 1.0)
        if outcome.terminal:
            break
    return Trajectory(
        states=np.stack(states),
        actions=np.array(actions),
        rewards=np.stack(rewards),
    )


def warmup(env, buffer: ExperienceBuffer, episodes: int, rng, max_episode_len=None) -> int:
    """Fill the buffer with uniformly random episodes; returns steps used."""
    check_positive_int(episodes, "episodes")
    rng = check_rng(rng)
    cap = _episode_cap(env, max_episode_len)
    n_actions = env.descriptor.n_actions
    total = 0
    for _ in range(episodes):
        state = env.reset()
        states, actions, rewards = [], [], []
        for _ in range(cap):
            action = int(rng.integers(0, n_actions))
            outcome = env.step(action)
            states.append(state)
            actions.append(action)
            rewards.append(outcome.reward)
            state = outcome.next_state
            if outcome.terminal:
                break
        buffer.insert(
            Trajectory(
                states=np.stack(states),
                actions=np.array(actions),
                rewards=np.stack(rewards),
            )
        )
        total += len(states)
    return total


def _greedy_batch_returns(
    env, model, targets, horizons, cap, discount_consistent, gamma
):
    """Realized returns of one greedy episode per target.

    Greedy replay is deterministic, so identical (target, horizon) pairs
    are simulated once and their result is fanned back out. All distinct
    episodes advance in lockstep so each step needs a single batched
    forward pass; the environment copies themselves are stepped one by one.
    """
    stacked = np.column_stack([targets, horizons])
    unique, inverse = np.unique(stacked, axis=0, return_inverse=True)
    if unique.shape[0] < stacked.shape[0]:
        distinct = _greedy_batch_returns(
            env, model, unique[:, :-1], unique[:, -1], cap, discount_consistent, gamma
        )
        return distinct[inverse]
    k = targets.shape[0]
    envs = []
    reset_states = []
    for _ in range(k):
        # The environments share only immutable layout data, so a shallow
        # copy plus reset gives an independent episode.
        clone = copy.copy(env)
        reset_states.append(clone.reset())
        envs.append(clone)
    states = np.stack(reset_states)
    desired = targets.astype(np.float64).copy()
    horizon = np.maximum(horizons.astype(np.float64).copy(), 1.0)
    totals = np.zeros_like(desired)
    active = np.ones(k, dtype=bool)
    for _ in range(cap):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        logits = model.forward_batch(states[idx], horizon[idx], desired[idx])
        choices = np.argmax(logits, axis=1)
        for j, i in enumerate(idx):
            outcome = envs[i].step(int(choices[j]))
            states[i] = outcome.next_state
            totals[i] += outcome.reward
            desired[i] = _next_command(
                desired[i], outcome.reward, discount_consistent, gamma
            )
            if outcome.terminal:
                active[i] = False
        horizon[idx] = np.maximum(horizon[idx] - 1.0, 1.0)
    return totals


def evaluate(
    env,
    model: PcnModel,
    buffer: ExperienceBuffer,
    max_episode_len: int | None = None,
    discount_consistent: bool = False,
    gamma: float = 1.0,
) -> EvalResult:
    """Greedy coverage-set evaluation.

    Each non-dominated episode return stored in the buffer becomes one
    command (the return with its episode's length as horizon) and is
    replayed deterministically; the coverage set is the non-dominated
    subset of what those replays achieved.
    """
    targets, horizons = buffer.coverage_targets()
    cap = _episode_cap(env, max_episode_len)
    achieved = _greedy_batch_returns(
        env, model, targets, horizons, cap, discount_consistent, gamma
    )
    coverage = achieved[non_dominated(achieved)]
    return EvalResult(targets=targets, achieved=achieved, coverage=coverage)


def train(env, config: AgentConfig, log_stream=None):
    """Full training run; returns (model, buffer, per-round history).

    Each round collects ``episodes_per_update`` exploration episodes (or
    fewer once the step budget runs out), performs ``updates_per_round``
    supervised steps on the buffer, then evaluates greedily on the rounds
    ``metrics_every`` selects. When the environment knows its true front,
    those entries carry the round's hypervolume and front-normalized
    epsilon values; ``loss`` is always the round's mean training loss.
    Entries are mirrored to ``log_stream`` as one JSON object per line
    when a stream is given.
    """
    desc: EnvDescriptor = env.descriptor
    model = init_model(
        desc.state_dim,
        desc.n_objectives,
        desc.n_actions,
        widths=config.widths,
        command_scale=desc.command_scale(),
        seed=config.seed,
    )
    opt = AdamOptimizer(learning_rate=config.learning_rate)
    buffer = ExperienceBuffer(
        config.buffer_capacity,
        desc.n_objectives,
        gamma=config.gamma,
        score_penalty=config.score_penalty,
    )
    rng = np.random.default_rng([config.seed, 1])
    cap = _episode_cap(env, config.max_episode_len)
    reference = config.reference_point
    if reference is None:
        reference = desc.hv_reference

    steps = 0
    for episode in range(config.warmup_episodes):
        if episode > 0 and steps >= config.total_steps:
            break
        steps += warmup(env, buffer, 1, rng, cap)

    history = []
    round_no = 0
    while steps < config.total_steps:
        for _ in range(config.episodes_per_update):
            if steps >= config.total_steps:
                break
            target, horizon = buffer.select_target(rng)
            traj = run_episode(
                env,
                model,
                target,
                horizon,
                mode="sample",
                rng=rng,
                max_episode_len=cap,
                discount_consistent=config.discount_consistent_commands,
                gamma=config.gamma,
            )
            buffer.insert(traj)
            steps += len(traj)
        losses = [
            train_batch(model, opt, buffer.sample_batch(config.batch_size, rng))
            for _ in range(config.updates_per_round)
        ]
        round_no += 1
        entry = {
            "round": round_no,
            "env_steps": steps,
            "loss": float(np.mean(losses)),
        }
        last_round = steps >= config.total_steps
        metric_round = (
            round_no == 1 or last_round or round_no % config.metrics_every == 0
        )
        if desc.true_front is not None and metric_round:
            result = evaluate(
                env,
                model,
                buffer,
                cap,
                config.discount_consistent_commands,
                config.gamma,
            )
            if reference is not None:
                entry["hypervolume"] = hypervolume(result.coverage, reference)
            eps_max, eps_mean, _ = front_normalized_epsilon(
                desc.true_front, result.coverage
            )
            entry["eps_max"] = eps_max
            entry["eps_mean"] = eps_mean
        history.append(entry)
        if log_stream is not None:
            log_stream.write(json.dumps(entry, sort_keys=True) + "\n")
    return model, buffer, history


class ParetoConditionedNetwork(BaseEstimator):
    """Estimator facade over the training loop.

    ``fit`` consumes an environment instead of an (X, y) pair: the
    supervised dataset is generated by the policy's own episodes. After
    fitting, ``predict`` maps (state, horizon, desired return) triples to
    greedy actions, and ``evaluate`` replays the stored non-dominated
    returns to produce a coverage set.
    """

    def __init__(
        self,
        total_steps: int = 150_000,
        warmup_episodes: int = 20,
        episodes_per_update: int = 20,
        updates_per_round: int = 50,
        batch_size: int = 64,
        gamma: float = 1.0,
        buffer_capacity: int = 50,
        learning_rate: float = 3e-4,
        max_episode_len: int | None = None,
        widths: tuple = (64, 64),
        score_penalty: float = 0.01,
        discount_consistent_commands: bool = False,
        reference_point=None,
        metrics_every: int = 1,
        random_state: int = 0,
    ):
        self.total_steps = total_steps
        self.warmup_episodes = warmup_episodes
        self.episodes_per_update = episodes_per_update
        self.updates_per_round = updates_per_round
        self.batch_size = batch_size
        self.gamma = gamma
        self.buffer_capacity = buffer_capacity
        self.learning_rate = learning_rate
        self.max_episode_len = max_episode_len
        self.widths = widths
        self.score_penalty = score_penalty
        self.discount_consistent_commands = discount_consistent_commands
        self.reference_point = reference_point
        self.metrics_every = metrics_every
        self.random_state = random_state

    def _config(self) -> AgentConfig:
        return AgentConfig(
            total_steps=self.total_steps,
            warmup_episodes=self.warmup_episodes,
            episodes_per_update=self.episodes_per_update,
            updates_per_round=self.updates_per_round,
            batch_size=self.batch_size,
            gamma=self.gamma,
            buffer_capacity=self.buffer_capacity,
            learning_rate=self.learning_rate,
            seed=self.random_state,
            max_episode_len=self.max_episode_len,
            widths=tuple(self.widths),
            score_penalty=self.score_penalty,
            discount_consistent_commands=self.discount_consistent_commands,
            reference_point=self.reference_point,
            metrics_every=self.metrics_every,
        )

    def fit(self, env, log_stream=None) -> "ParetoConditionedNetwork":
        self.model_, self.buffer_, self.history_ = train(
            env, self._config(), log_stream=log_stream
        )
        self.descriptor_ = env.descriptor
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise ValueError("estimator is not fitted; call fit(env) first")

    def predict(self, states, horizons, desired_returns) -> np.ndarray:
        """Greedy action per (state, horizon, desired return) row."""
        self._check_fitted()
        logits = self.model_.forward_batch(states, horizons, desired_returns)
        return np.argmax(logits, axis=1)

    def predict_proba(self, states, horizons, desired_returns) -> np.ndarray:
        self._check_fitted()
        logits = self.model_.forward_batch(states, horizons, desired_returns)
        return action_distribution(logits)

    def evaluate(self, env) -> EvalResult:
        self._check_fitted()
        return evaluate(
            env,
            self.model_,
            self.buffer_,
            self.max_episode_len,
            self.discount_consistent_commands,
            self.gamma,
        )
