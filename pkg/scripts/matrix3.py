"""Scratch calibration, not part of the package: third schedule matrix.

Focus: which knob keeps enough softmax entropy alive for the deep-middle
treasures (24, 74) without giving up consolidation. 50k-step budget,
two seeds per cell.
"""

import json
import sys
import time

import numpy as np

sys.path.insert(0, "src")

from paretocn.agent import AgentConfig, evaluate, train
from paretocn.envs import dst_env
from paretocn.metrics import front_normalized_epsilon, hypervolume
from paretocn.pareto import non_dominated

BUDGET = 50_000
BASE = dict(updates_per_round=50, batch_size=64, episodes_per_update=20)

VARIANTS = {
    "J_lr3e-4": dict(BASE, learning_rate=3e-4),
    "K_upd25": dict(BASE, updates_per_round=25),
    "L_ep50": dict(BASE, episodes_per_update=50),
    "M_warm50": dict(BASE, warmup_episodes=50),
    "H_ep10_upd25": dict(updates_per_round=25, batch_size=64),
    "I_base": dict(BASE),
}


def run(name, overrides, seed):
    env = dst_env()
    front = env.descriptor.true_front
    reference = env.descriptor.hv_reference
    front_hv = hypervolume(front, reference)
    front_set = {tuple(p) for p in front}
    t0 = time.time()
    model, buffer, history = train(
        env, AgentConfig(seed=seed, total_steps=BUDGET, **overrides)
    )
    result = evaluate(dst_env(), model, buffer)
    eps_max, eps_mean, _ = front_normalized_epsilon(front, result.coverage)
    hv = hypervolume(result.coverage, reference)
    milestones = {}
    for entry in history:
        if "eps_max" not in entry:
            continue
        for key, hit in (
            ("eps_max<=0.05", entry["eps_max"] <= 0.05),
            ("eps_mean<=0.05", entry["eps_mean"] <= 0.05),
            ("hv>=98%", entry["hypervolume"] >= 0.98 * front_hv),
        ):
            if key not in milestones and hit:
                milestones[key] = entry["env_steps"]
    returns = buffer.episode_returns
    print(
        json.dumps(
            {
                "variant": name,
                "seed": seed,
                "elapsed_s": round(time.time() - t0, 1),
                "eps_max": round(eps_max, 4),
                "eps_mean": round(eps_mean, 4),
                "hv": hv,
                "hv_frac": round(hv / front_hv, 4),
                "front_hits": len(front_set & {tuple(p) for p in result.coverage}),
                "final_loss": history[-1]["loss"],
                "milestones": milestones,
                "nd": sorted(
                    {tuple(r) for r in returns[non_dominated(returns)]}
                ),
            }
        ),
        flush=True,
    )


def main():
    names = sys.argv[1:] or list(VARIANTS)
    for name in names:
        for seed in (0, 1):
            run(name, VARIANTS[name], seed)


if __name__ == "__main__":
    main()
