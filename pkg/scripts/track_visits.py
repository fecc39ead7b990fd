"""Scratch diagnostics, not part of the package: record every exploration
episode's terminal return during a DST run to see which treasures are
visited, when, and with what times."""

import json
import sys
from collections import defaultdict

import numpy as np

sys.path.insert(0, "src")

from paretocn.agent import AgentConfig, train
from paretocn.envs import dst_env


class Recorder:
    """Env proxy that logs the return of every finished episode."""

    def __init__(self, env):
        self._env = env
        self.descriptor = env.descriptor
        self.episodes = []  # (end_step, treasure, time)
        self._total = None
        self._steps = 0

    def reset(self):
        self._total = np.zeros(2)
        return self._env.reset()

    def step(self, action):
        out = self._env.step(action)
        self._total += out.reward
        self._steps += 1
        if out.terminal:
            self.episodes.append(
                (self._steps, float(self._total[0]), float(self._total[1]))
            )
        return out

    def __copy__(self):
        # greedy evaluation clones the env; give it an untracked copy
        import copy

        return copy.copy(self._env)


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    total = int(sys.argv[2]) if len(sys.argv) > 2 else 150_000
    rec = Recorder(dst_env())
    config = AgentConfig(
        seed=seed,
        total_steps=total,
        episodes_per_update=20,
        updates_per_round=50,
        batch_size=64,
        learning_rate=3e-4,
        metrics_every=25,
    )
    model, buffer, history = train(rec, config)
    stats = defaultdict(lambda: {"n": 0, "best_time": -1e9, "first_step": None})
    for end_step, treasure, t in rec.episodes:
        s = stats[treasure]
        s["n"] += 1
        if t > s["best_time"]:
            s["best_time"] = t
        if s["first_step"] is None:
            s["first_step"] = end_step
    print(json.dumps({
        "seed": seed,
        "total": total,
        "episodes": len(rec.episodes),
        "by_treasure": {
            str(k): stats[k] for k in sorted(stats)
        },
        "final": history[-1],
    }, indent=2))


if __name__ == "__main__":
    main()
