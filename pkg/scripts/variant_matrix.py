"""Compare schedule variants on DST at a fixed step budget.

Scratch experiment for picking harness config values; not part of the
package. Each variant trains to the same step budget and reports the
hypervolume / epsilon trajectory plus end-state diagnostics: distinct
episode returns in the buffer, the non-dominated set, and the softmax
entropy at the start state for a front-edge command.
"""
import json
import sys
import time

import numpy as np

from paretocn.agent import AgentConfig, train
from paretocn.envs import dst_env
from paretocn.network import action_distribution
from paretocn.pareto import non_dominated

BUDGET = 25_000

VARIANTS = {
    "D_warm200_upd50": dict(warmup_episodes=200, updates_per_round=50),
    "C_upd50": dict(updates_per_round=50),
    "F_warm200_upd50_g095": dict(
        warmup_episodes=200, updates_per_round=50, gamma=0.95
    ),
    "B_warm200": dict(warmup_episodes=200),
    "A_defaults": dict(),
    "G_upd50_b64": dict(updates_per_round=50, batch_size=64),
    "H_upd25_b64": dict(updates_per_round=25, batch_size=64),
    "I_ep20_upd50_b64": dict(
        episodes_per_update=20, updates_per_round=50, batch_size=64
    ),
}

name = sys.argv[1]
overrides = VARIANTS[name]
env = dst_env()
cfg = AgentConfig(total_steps=BUDGET, seed=0, **overrides)
t0 = time.time()
with open(f"/tmp/variants/{name}.jsonl", "w") as fh:
    model, buffer, history = train(env, cfg, log_stream=fh)
elapsed = time.time() - t0

returns = buffer.episode_returns
distinct = np.unique(returns, axis=0)
nd = distinct[non_dominated(distinct)]

# policy entropy at the start state, asked for the best stored treasure
state = env.reset()
best = nd[np.argmax(nd[:, 0])]
logits = model.forward_batch(state[None, :], np.array([19.0]), best[None, :])
probs = action_distribution(logits)[0]
entropy = float(-(probs * np.log(np.maximum(probs, 1e-12))).sum())

milestones = {}
for entry in history:
    for field in ("eps_max", "eps_mean"):
        key = f"{field}<=0.05"
        if key not in milestones and entry[field] <= 0.05:
            milestones[key] = entry["env_steps"]

print(json.dumps({
    "variant": name,
    "elapsed_s": round(elapsed, 1),
    "rounds": len(history),
    "final": history[-1],
    "distinct_returns": int(distinct.shape[0]),
    "nd_returns": sorted(map(tuple, nd.tolist())),
    "entropy_at_start": round(entropy, 4),
    "milestones": milestones,
}))
