"""Scratch calibration, not part of the package: full-budget DST runs for
the entropy-preserving candidates."""

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
    metrics_every=25,
)

VARIANTS = {
    "J150": dict(BASE, learning_rate=3e-4),
    "W32": dict(BASE, widths=(32, 32)),
    "JW32": dict(BASE, learning_rate=3e-4, widths=(32, 32)),
}

CELLS = [
    ("J150", 0), ("J150", 2),
    ("W32", 0), ("W32", 1),
    ("JW32", 0), ("JW32", 1),
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
