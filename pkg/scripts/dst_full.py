"""Scratch calibration run, not part of the package: the chosen DST
schedule at the full step budget across the five acceptance seeds."""

import json
import sys
import time

import numpy as np

sys.path.insert(0, "src")

from paretocn.agent import AgentConfig, evaluate, train
from paretocn.envs import dst_env
from paretocn.metrics import front_normalized_epsilon, hypervolume

SCHEDULE = dict(
    total_steps=150_000,
    episodes_per_update=20,
    updates_per_round=50,
    batch_size=64,
)


def main():
    seeds = [int(s) for s in sys.argv[1:]] or [0, 1, 2, 3, 4]
    env = dst_env()
    front = env.descriptor.true_front
    reference = env.descriptor.hv_reference
    front_hv = hypervolume(front, reference)
    front_set = {tuple(p) for p in front}
    for seed in seeds:
        t0 = time.time()
        with open(f"/tmp/dst_full_seed{seed}.jsonl", "w") as stream:
            model, buffer, history = train(
                dst_env(), AgentConfig(seed=seed, **SCHEDULE), log_stream=stream
            )
        result = evaluate(dst_env(), model, buffer)
        eps_max, eps_mean, _ = front_normalized_epsilon(front, result.coverage)
        hv = hypervolume(result.coverage, reference)
        milestones = {}
        for entry in history:
            if "eps_max" not in entry:
                continue
            if "eps_max<=0.05" not in milestones and entry["eps_max"] <= 0.05:
                milestones["eps_max<=0.05"] = entry["env_steps"]
            if "eps_mean<=0.05" not in milestones and entry["eps_mean"] <= 0.05:
                milestones["eps_mean<=0.05"] = entry["env_steps"]
            if "hv>=98%" not in milestones and entry["hypervolume"] >= 0.98 * front_hv:
                milestones["hv>=98%"] = entry["env_steps"]
        hits = len(front_set & {tuple(p) for p in result.coverage})
        print(json.dumps({
            "seed": seed,
            "elapsed_s": round(time.time() - t0, 1),
            "eps_max": eps_max,
            "eps_mean": eps_mean,
            "hv": hv,
            "hv_frac": hv / front_hv,
            "front_hits": hits,
            "milestones": milestones,
            "coverage": np.asarray(result.coverage).tolist(),
        }), flush=True)


if __name__ == "__main__":
    main()
