"""Scratch diagnostics, not part of the package: why walkroom misses
front points. Tracks discovery timing, loss, and branch-cell entropy."""

import json
import sys
import time

import numpy as np

sys.path.insert(0, "src")

from paretocn.agent import AgentConfig, evaluate, train
from paretocn.envs import walkroom_env
from paretocn.metrics import front_normalized_epsilon


class Recorder:
    """Env proxy counting episodes whose return beats a threshold."""

    def __init__(self, env, watch_obj, watch_level):
        self.env = env
        self.descriptor = env.descriptor
        self.watch_obj = watch_obj
        self.watch_level = watch_level
        self.hits = []
        self.episodes = 0
        self._total = None

    def reset(self):
        if self._total is not None:
            self.episodes += 1
            if self._total[self.watch_obj] >= self.watch_level:
                self.hits.append((self.episodes, tuple(self._total)))
        self._total = np.zeros(self.descriptor.n_objectives)
        return self.env.reset()

    def step(self, action):
        out = self.env.step(action)
        self._total = self._total + out.reward
        return out

    def __copy__(self):
        import copy as _c

        return _c.copy(self.env)


def main():
    n = int(sys.argv[1])
    room = int(sys.argv[2])
    seed = int(sys.argv[3])
    overrides = json.loads(sys.argv[4]) if len(sys.argv) > 4 else {}

    env = walkroom_env(n, 16, seed=room)
    front = env.descriptor.true_front
    # watch the objective whose front range pins the shadowed point
    spans = front.max(axis=0) - front.min(axis=0)
    watch = int(np.argmin(spans + (spans == 0) * 1e9))
    level = float(front[:, watch].max())

    rec = Recorder(env, watch, level)
    cfg = AgentConfig(seed=seed, total_steps=200_000, metrics_every=50,
                      **overrides)
    t0 = time.time()
    model, buffer, history = train(rec, cfg)
    result = evaluate(walkroom_env(n, 16, seed=room), model, buffer)
    _, eps_mean, _ = front_normalized_epsilon(front, result.coverage)

    losses = [h["loss"] for h in history]
    qs = [losses[int(q * (len(losses) - 1))] for q in (0.25, 0.5, 0.75, 1.0)]
    print(json.dumps({
        "n": n, "room": room, "seed": seed, "overrides": overrides,
        "eps_mean": round(eps_mean, 4),
        "coverage": sorted(map(list, result.coverage.tolist())),
        "episodes": rec.episodes,
        "watch_obj": watch, "watch_level": level,
        "first_hits": [[e, list(map(int, r))] for e, r in rec.hits[:5]],
        "n_hits": len(rec.hits),
        "loss_q": [round(x, 4) for x in qs],
        "rounds": len(history),
        "wall_s": round(time.time() - t0, 1),
    }), flush=True)


if __name__ == "__main__":
    main()
