"""Scratch calibration, not part of the package: walkroom wall time and
convergence for the low- and high-dimension acceptance settings."""

import json
import sys
import time

import numpy as np

sys.path.insert(0, "src")

from paretocn.agent import AgentConfig, evaluate, train
from paretocn.envs import walkroom_env
from paretocn.metrics import front_normalized_epsilon, hypervolume
from paretocn.pareto import non_dominated

SCHEDULE = dict(episodes_per_update=10, updates_per_round=250, batch_size=256,
                learning_rate=1e-3, buffer_capacity=200, warmup_episodes=100)


def random_coverage(env, total_steps, rng):
    returns = []
    steps = 0
    n_actions = env.descriptor.n_actions
    cap = env.descriptor.max_horizon
    while steps < total_steps:
        env.reset()
        total = np.zeros(env.descriptor.n_objectives)
        for _ in range(cap):
            outcome = env.step(int(rng.integers(0, n_actions)))
            total += outcome.reward
            steps += 1
            if outcome.terminal:
                break
        returns.append(total)
    returns = np.stack(returns)
    return returns[non_dominated(returns)]


def low(n, seed, total):
    env = walkroom_env(n, 16, seed=n)
    front = env.descriptor.true_front
    t0 = time.time()
    model, buffer, history = train(
        env, AgentConfig(seed=seed, total_steps=total, **SCHEDULE)
    )
    train_s = time.time() - t0
    result = evaluate(walkroom_env(n, 16, seed=n), model, buffer)
    eps_max, eps_mean, _ = front_normalized_epsilon(front, result.coverage)
    t0 = time.time()
    base = random_coverage(
        walkroom_env(n, 16, seed=n), total, np.random.default_rng([seed, 77])
    )
    base_s = time.time() - t0
    _, base_eps_mean, _ = front_normalized_epsilon(front, base)
    print(json.dumps({
        "kind": "low", "n": n, "seed": seed, "total": total,
        "train_s": round(train_s, 1), "baseline_s": round(base_s, 1),
        "eps_mean": round(eps_mean, 4), "eps_max": round(eps_max, 4),
        "baseline_eps_mean": round(base_eps_mean, 4),
        "front_size": int(front.shape[0]),
        "rounds": len(history),
    }), flush=True)


def high(n, total, metrics_every):
    env = walkroom_env(n, 16, seed=n)
    t0 = time.time()
    model, buffer, history = train(
        env,
        AgentConfig(seed=0, total_steps=total, metrics_every=metrics_every,
                    **SCHEDULE),
    )
    elapsed = time.time() - t0
    rows = [h for h in history if "hypervolume" in h]
    print(json.dumps({
        "kind": "high", "n": n, "total": total, "elapsed_s": round(elapsed, 1),
        "rounds": len(history), "metric_rounds": len(rows),
        "first_hv": rows[0]["hypervolume"], "final_hv": rows[-1]["hypervolume"],
        "final_eps_mean": round(rows[-1]["eps_mean"], 4),
        "front_size": int(env.descriptor.true_front.shape[0]),
    }), flush=True)


if __name__ == "__main__":
    mode = sys.argv[1]
    if len(sys.argv) > 5:
        SCHEDULE.update(json.loads(sys.argv[5]))
    if mode == "low":
        n, seed, total = int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4])
        low(n, seed, total)
    else:
        n, total, every = int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4])
        high(n, total, every)
