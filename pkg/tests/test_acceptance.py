"""Acceptance gate: the seven shipping criteria, one test each.

Every test prints a single CRITERION line naming its verdict so a log
scan shows the full scorecard. The two long-horizon training criteria
share one 5-seed run through a module-scoped fixture. These tests are
slow by nature; run them with ``pytest -m acceptance`` to get only the
gate, or deselect the marker while iterating.
"""

import itertools
import json
import time

import numpy as np
import pytest

from paretocn.agent import AgentConfig, evaluate, train
from paretocn.envs import dst_env, walkroom_env
from paretocn.experience import ExperienceBuffer, Trajectory, to_datapoints
from paretocn.metrics import (
    epsilon_metrics,
    front_normalized_epsilon,
    hypervolume,
)
from paretocn.network import TrainBatch, init_model, loss_and_gradients
from paretocn.pareto import non_dominated, read_points_csv

pytestmark = pytest.mark.acceptance

SEEDS = [0, 1, 2, 3, 4]

# The DST runs use the constructor defaults verbatim. Walkroom keeps the
# same schedule but needs the longer step budget.
WALKROOM_SCHEDULE = dict(total_steps=200_000)
WALKROOM_HIGH_DIM_STEPS = 200_000
WALKROOM_SIDE = 16

DST_FRONT_HV = None  # filled lazily; true front hv at (0, -25)


def _report(criterion, passed, detail):
    verdict = "PASS" if passed else "FAIL"
    print(f"CRITERION {criterion}: {verdict} — {detail}")
    return passed


# --- shared training runs ---------------------------------------------------


@pytest.fixture(scope="module")
def dst_runs():
    """Five full DST training runs; shared by criteria 1 and 2."""
    runs = []
    for seed in SEEDS:
        env = dst_env()
        config = AgentConfig(seed=seed)
        t0 = time.time()
        model, buffer, history = train(env, config)
        result = evaluate(env, model, buffer)
        runs.append(
            {
                "seed": seed,
                "coverage": result.coverage,
                "history": history,
                "elapsed": time.time() - t0,
            }
        )
    return runs


def test_criterion_1_dst_metrics(dst_runs):
    """5-seed DST at <=150k env steps: front-normalized eps_max <= 0.05 on
    at least 3 seeds, eps_mean <= 0.05 on all 5, and hypervolume at
    (0, -25) at least 98% of the true front's on all 5."""
    env = dst_env()
    front = env.descriptor.true_front
    reference = env.descriptor.hv_reference
    front_hv = hypervolume(front, reference)

    eps_max_ok = 0
    eps_mean_ok = 0
    hv_ok = 0
    time_ok = 0
    details = []
    for run in dst_runs:
        eps_max, eps_mean, _ = front_normalized_epsilon(front, run["coverage"])
        hv = hypervolume(run["coverage"], reference)
        eps_max_ok += eps_max <= 0.05
        eps_mean_ok += eps_mean <= 0.05
        hv_ok += hv >= 0.98 * front_hv
        time_ok += run["elapsed"] < 600
        details.append(
            f"seed {run['seed']}: eps_max={eps_max:.4f} eps_mean={eps_mean:.4f} "
            f"hv={hv:.0f}/{front_hv:.0f} ({run['elapsed']:.0f}s)"
        )
    passed = eps_max_ok >= 3 and eps_mean_ok == 5 and hv_ok == 5 and time_ok == 5
    ok = _report(
        1,
        passed,
        f"eps_max<=0.05 on {eps_max_ok}/5 (need 3), eps_mean on {eps_mean_ok}/5, "
        f"hv>=98% on {hv_ok}/5, under 10 min on {time_ok}/5; " + "; ".join(details),
    )
    assert ok


def test_criterion_2_dst_exact_front(dst_runs):
    """The best seed recovers all ten DST front points exactly."""
    front = dst_env().descriptor.true_front
    front_set = {tuple(p) for p in front}
    best_hits = -1
    best_seed = None
    for run in dst_runs:
        hits = len(front_set & {tuple(p) for p in run["coverage"]})
        if hits > best_hits:
            best_hits, best_seed = hits, run["seed"]
    ok = _report(
        2,
        best_hits == len(front_set),
        f"best seed {best_seed} matches {best_hits}/{len(front_set)} "
        "front points exactly",
    )
    assert ok


# --- criterion 3: walkroom --------------------------------------------------


def _random_coverage(env, total_steps, rng):
    """Coverage of a uniform-random policy with the same step budget."""
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


def test_criterion_3_walkroom_scaling():
    """n in {2,3,4}: trained eps_mean <= 0.1 and below a random-policy
    baseline for every seed; n in {5..9}: each run finishes inside 30
    minutes with final-round normalized hypervolume >= first round's."""
    low_ok = True
    details = []
    for n in (2, 3, 4):
        for seed in SEEDS:
            env = walkroom_env(n, WALKROOM_SIDE, seed=n)
            front = env.descriptor.true_front
            config = AgentConfig(seed=seed, **WALKROOM_SCHEDULE)
            model, buffer, history = train(env, config)
            result = evaluate(env, model, buffer)
            _, eps_mean, _ = front_normalized_epsilon(front, result.coverage)

            baseline_env = walkroom_env(n, WALKROOM_SIDE, seed=n)
            baseline = _random_coverage(
                baseline_env,
                WALKROOM_SCHEDULE["total_steps"],
                np.random.default_rng([seed, 77]),
            )
            _, base_eps_mean, _ = front_normalized_epsilon(front, baseline)
            seed_ok = eps_mean <= 0.1 and eps_mean < base_eps_mean
            low_ok &= seed_ok
            details.append(
                f"n={n} seed={seed}: eps_mean={eps_mean:.4f} "
                f"(random {base_eps_mean:.4f}){'' if seed_ok else ' <-- FAIL'}"
            )

    high_ok = True
    for n in (5, 6, 7, 8, 9):
        env = walkroom_env(n, WALKROOM_SIDE, seed=n)
        # exact hypervolume in 7+ objectives is expensive, so coverage
        # metrics are sampled sparsely; first and last rounds always get one
        config = AgentConfig(
            seed=0,
            metrics_every=200,
            **{**WALKROOM_SCHEDULE, "total_steps": WALKROOM_HIGH_DIM_STEPS},
        )
        t0 = time.time()
        model, buffer, history = train(env, config)
        elapsed = time.time() - t0
        metric_rows = [h for h in history if "hypervolume" in h]
        first_hv = metric_rows[0]["hypervolume"]
        final_hv = metric_rows[-1]["hypervolume"]
        run_ok = elapsed <= 1800 and final_hv >= first_hv
        high_ok &= run_ok
        details.append(
            f"n={n}: {elapsed:.0f}s hv {first_hv:.3g}->{final_hv:.3g}"
            f"{'' if run_ok else ' <-- FAIL'}"
        )
    ok = _report(3, low_ok and high_ok, "; ".join(details))
    assert ok


# --- criterion 4: metric oracles --------------------------------------------


def _mc_hypervolume(points, reference, n_samples, rng):
    reference = np.asarray(reference, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    keep = points[np.all(points > reference, axis=1)]
    if keep.shape[0] == 0:
        return 0.0
    hi = keep.max(axis=0)
    box = np.prod(hi - reference)
    hits = 0
    total = 0
    chunk = 100_000
    while total < n_samples:
        m = min(chunk, n_samples - total)
        sample = rng.uniform(reference, hi, size=(m, reference.shape[0]))
        covered = np.zeros(m, dtype=bool)
        for p in keep:
            covered |= np.all(sample <= p, axis=1)
        hits += int(covered.sum())
        total += m
    return box * hits / n_samples


def _brute_force_nd(points):
    m = points.shape[0]
    mask = np.ones(m, dtype=bool)
    for i in range(m):
        for j in range(m):
            if i != j and np.all(points[j] >= points[i]) and np.any(
                points[j] > points[i]
            ):
                mask[i] = False
                break
    return mask


def test_criterion_4_metric_oracles():
    """Exact hypervolume within 1% of Monte-Carlo on 30 random sets;
    non_dominated equals brute force on 100 random sets; the worked
    example reproduces eps_max=1.0, eps_mean=0.9, hv=10.0 exactly."""
    rng = np.random.default_rng(2024)
    hv_worst = 0.0
    for i in range(30):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 31))
        points = rng.uniform(0.5, 10.0, size=(m, n))
        reference = np.zeros(n)
        exact = hypervolume(points, reference)
        estimate = _mc_hypervolume(points, reference, 1_000_000, rng)
        rel = abs(exact - estimate) / exact
        hv_worst = max(hv_worst, rel)
    hv_ok = hv_worst <= 0.01

    nd_ok = True
    for i in range(100):
        n = int(rng.integers(2, 10))
        m = int(rng.integers(1, 201))
        # integer grid forces plenty of ties and duplicates
        points = rng.integers(0, 6, size=(m, n)).astype(np.float64)
        if not np.array_equal(non_dominated(points), _brute_force_nd(points)):
            nd_ok = False
            break

    front = np.array([[1.0, 4.0], [2.0, 2.0], [4.0, 1.0]])
    coverage = np.array([[0.5, 3.0], [0.75, 2.3], [2.3, 1.0], [3.3, 0.7]])
    eps_max, eps_mean, _ = epsilon_metrics(front, coverage)
    example_ok = (
        eps_max == 1.0
        and abs(eps_mean - 0.9) < 1e-12
        and hypervolume(front, np.array([-0.5, 0.0])) == 10.0
    )
    ok = _report(
        4,
        hv_ok and nd_ok and example_ok,
        f"hv vs MC worst rel err {hv_worst:.2%} (30 sets), "
        f"nd brute force {'agrees' if nd_ok else 'DISAGREES'} (100 sets), "
        f"worked example {'exact' if example_ok else 'WRONG'}",
    )
    assert ok


# --- criterion 5: gradient check --------------------------------------------


def _finite_difference(model, batch, epsilon=1e-5):
    grads = {}
    for name, param in model.params.items():
        grad = np.zeros_like(param)
        flat = param.ravel()
        gflat = grad.ravel()
        for i in range(flat.shape[0]):
            orig = flat[i]
            flat[i] = orig + epsilon
            up, _ = loss_and_gradients(model, batch)
            flat[i] = orig - epsilon
            down, _ = loss_and_gradients(model, batch)
            flat[i] = orig
            gflat[i] = (up - down) / (2 * epsilon)
        grads[name] = grad
    return grads


def test_criterion_5_gradients():
    """Analytic gradients match central finite differences within 1e-4
    max relative error on 20 random (model, batch) pairs."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for trial in range(20):
        state_dim = int(rng.integers(3, 8))
        n_obj = int(rng.integers(2, 4))
        n_actions = int(rng.integers(2, 5))
        widths = (int(rng.integers(3, 7)), int(rng.integers(3, 7)))
        model = init_model(
            state_dim, n_obj, n_actions, widths=widths,
            seed=int(rng.integers(0, 10_000)),
        )
        batch_size = int(rng.integers(1, 6))
        batch = TrainBatch(
            states=rng.normal(size=(batch_size, state_dim)),
            horizons=rng.uniform(1, 30, size=batch_size),
            returns=rng.normal(scale=5.0, size=(batch_size, n_obj)),
            actions=rng.integers(0, n_actions, size=batch_size),
        )
        _, analytic = loss_and_gradients(model, batch)
        numeric = _finite_difference(model, batch)
        for name in analytic:
            a, n_ = analytic[name], numeric[name]
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n_)), 1e-6)
            worst = max(worst, float(np.max(np.abs(a - n_) / denom)))
    ok = _report(5, worst <= 1e-4, f"worst relative error {worst:.3e} over 20 pairs")
    assert ok


# --- criterion 6: experience pipeline ---------------------------------------


def test_criterion_6_experience_invariants():
    """Datapoint counts, horizons and suffix returns on 1000 random
    trajectories; capacity never exceeded; duplicate non-dominated
    returns pruned before distinct ones."""
    rng = np.random.default_rng(13)
    pipeline_ok = True
    for _ in range(1000):
        T = int(rng.integers(1, 12))
        n_obj = int(rng.integers(2, 4))
        gamma = float(rng.choice([1.0, 0.99, 0.9, 0.5]))
        traj = Trajectory(
            states=rng.normal(size=(T, 4)),
            actions=rng.integers(0, 3, size=T),
            rewards=rng.normal(size=(T, n_obj)),
        )
        points = to_datapoints(traj, gamma)
        if len(points) != T:
            pipeline_ok = False
            break
        horizons = [p.horizon for p in points]
        if horizons != list(range(T, 0, -1)):
            pipeline_ok = False
            break
        direct = np.zeros(n_obj)
        ok = True
        for t in reversed(range(T)):
            direct = traj.rewards[t] + gamma * direct
            if not np.allclose(points[t].desired_return, direct, atol=1e-9):
                ok = False
        if not ok:
            pipeline_ok = False
            break

    capacity_ok = True
    buffer = ExperienceBuffer(capacity=16, n_objectives=2)
    for _ in range(200):
        T = int(rng.integers(1, 6))
        buffer.insert(
            Trajectory(
                states=rng.normal(size=(T, 3)),
                actions=rng.integers(0, 2, size=T),
                rewards=rng.normal(size=(T, 2)),
            )
        )
        if len(buffer) > 16:
            capacity_ok = False
            break

    def traj_with_return(vec):
        return Trajectory(
            states=np.zeros((1, 3)),
            actions=np.zeros(1, dtype=np.int64),
            rewards=np.asarray(vec, dtype=np.float64)[None, :],
        )

    dup = ExperienceBuffer(capacity=2, n_objectives=2)
    dup.insert(traj_with_return([1.0, 2.0]))
    dup.insert(traj_with_return([1.0, 2.0]))
    dup.insert(traj_with_return([2.0, 1.0]))  # forces one prune
    returns = {tuple(r) for r in dup.episode_returns}
    dup_ok = returns == {(1.0, 2.0), (2.0, 1.0)}

    ok = _report(
        6,
        pipeline_ok and capacity_ok and dup_ok,
        f"datapoints {'ok' if pipeline_ok else 'BAD'} (1000 trajectories), "
        f"capacity {'ok' if capacity_ok else 'EXCEEDED'}, "
        f"duplicate-first pruning {'ok' if dup_ok else 'BAD'}",
    )
    assert ok


# --- criterion 7: reproducibility -------------------------------------------


def test_criterion_7_byte_reproducibility(tmp_path):
    """Identical config + seed produce byte-identical coverage CSVs and
    summary JSON through the CLI."""
    from paretocn.cli import main

    outputs = []
    for attempt in ("one", "two"):
        outdir = tmp_path / attempt
        config = tmp_path / f"{attempt}.yaml"
        config.write_text(
            "env:\n  name: dst\n"
            "agent:\n  total_steps: 4000\n  warmup_episodes: 20\n"
            "  episodes_per_update: 10\n  updates_per_round: 50\n"
            "  batch_size: 64\n"
            f"run:\n  output_dir: {outdir}\n  seeds: [0, 1]\n"
        )
        assert main(["train", str(config)]) == 0
        outputs.append(
            {
                "cov0": (outdir / "coverage_seed0.csv").read_bytes(),
                "cov1": (outdir / "coverage_seed1.csv").read_bytes(),
                "summary": (outdir / "summary.json").read_bytes(),
            }
        )
    same = outputs[0] == outputs[1]
    nonempty = read_points_csv(tmp_path / "one" / "coverage_seed0.csv").shape[0] > 0
    ok = _report(
        7,
        same and nonempty,
        "coverage CSVs and summary JSON byte-identical across reruns"
        if same
        else "outputs differ between identical reruns",
    )
    assert ok
