"""Measure wall time and convergence of a full DST training run.

Scratch script used to pick the step budget for the shipped configs;
not part of the package.
"""
import json
import sys
import time

from paretocn.agent import AgentConfig, train
from paretocn.envs import dst_env

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
total = int(sys.argv[2]) if len(sys.argv) > 2 else 150_000

env = dst_env()
cfg = AgentConfig(total_steps=total, seed=seed)
t0 = time.time()
with open(f"/tmp/dst_seed{seed}.jsonl", "w") as fh:
    model, buffer, history = train(env, cfg, log_stream=fh)
elapsed = time.time() - t0

final = history[-1]
print(json.dumps({"seed": seed, "elapsed_s": round(elapsed, 1),
                  "rounds": len(history), "final": final}))
# first round hitting the headline thresholds, if any
for entry in history:
    if entry.get("eps_max", 1.0) <= 0.05:
        print(json.dumps({"first_eps_max_ok": entry}))
        break
for entry in history:
    if entry.get("eps_mean", 1.0) <= 0.05:
        print(json.dumps({"first_eps_mean_ok": entry}))
        break
