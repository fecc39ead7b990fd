"""Scratch calibration, not part of the package: small-capacity buffers.

A lean buffer prunes duplicate returns immediately, which both keeps the
training set diverse (harder to collapse onto) and stops over-achieved
returns from monopolizing exploration stretch sources.
"""

import json
import sys
import time

import numpy as np

sys.path.insert(0, "src")

from paretocn.agent import AgentConfig, evaluate, train
from paretocn.envs import dst_env
from paretocn.metrics import front_normalized_epsilon, hypervolume

BASE = dict(
    total_steps=150_000,
    episodes_per_update=20,
    updates_per_round=50,
    batch_size=64,
    learning_rate=3e-4,
    metrics_every=25,
)

VARIANTS = {
    "C50": dict(BASE, buffer_capacity=50),
    "C30": dict(BASE, buffer_capacity=30),
    "C50lr1e3": dict(BASE, buffer_capacity=50, learning_rate=1e-3),
}

CELLS = [
    ("C50", 0), ("C50", 1), ("C50", 2),
    ("C30", 0), ("C30", 1), ("C30", 2),
    ("C50lr1e3", 0), ("C50lr1e3", 1), ("C50lr1e3", 2),
]


def main():
    env0 = dst_env()
    front = env0.descriptor.true_front
    reference = env0.descriptor.hv_reference
    front_hv = hypervolume(front, reference)
    front_set = {tuple(p) for p in front}
    for name, seed in CELLS:
        t0 = time.time()
        model, buffer, history = train(
            dst_env(), AgentConfig(seed=seed, **VARIANTS[name])
        )
        result = evaluate(dst_env(), model, buffer)
        eps_max, eps_mean, _ = front_normalized_epsilon(front, result.coverage)
        hv = hypervolume(result.coverage, reference)
        print(json.dumps({
            "variant": name,
            "seed": seed,
            "elapsed_s": round(time.time() - t0, 1),
            "hv_frac": round(hv / front_hv, 4),
            "eps_max": round(eps_max, 4),
            "eps_mean": round(eps_mean, 4),
            "front_hits": len(front_set & {tuple(p) for p in result.coverage}),
            "final_loss": history[-1]["loss"],
        }), flush=True)


if __name__ == "__main__":
    main()
