"""Command-line front end for experiments and metric reporting.

Subcommands: ``train`` (multi-seed experiment driven by a YAML config),
``eval`` (re-score a saved model/buffer pair), ``pareto`` (metrics for a
front/coverage CSV pair), ``gen-walkroom`` (reproducible environment
specs) and ``plot`` (SVG scatter comparisons). Exit codes: 0 on success,
2 on a usage or configuration error, 1 on a fault while running.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from .agent import AgentConfig, evaluate, train
from .envs import (
    WALKROOM_MAX_DIMS,
    WalkroomSpec,
    Walkroom,
    dst_env,
    generate_walkroom_spec,
    walkroom_env,
)
from .experience import ExperienceBuffer
from .metrics import (
    MetricReport,
    epsilon_metrics,
    front_normalized_epsilon,
    hypervolume,
)
from .network import load_model, save_model
from .pareto import read_points_csv, safe_spans, write_points_csv


class UsageError(Exception):
    """Bad arguments or configuration; maps to exit code 2."""


# --- config handling --------------------------------------------------------

_AGENT_KEYS = {
    "total_steps",
    "warmup_episodes",
    "episodes_per_update",
    "updates_per_round",
    "batch_size",
    "gamma",
    "buffer_capacity",
    "learning_rate",
    "max_episode_len",
    "widths",
    "score_penalty",
    "discount_consistent_commands",
    "metrics_every",
}


def _require_section(config, name):
    section = config.get(name)
    if not isinstance(section, dict):
        raise UsageError(f"config section '{name}' is missing or not a mapping")
    return section


def _reject_unknown(section, name, allowed):
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise UsageError(f"unknown keys in '{name}' section: {', '.join(unknown)}")


def load_run_config(path):
    """Parse and validate a train config; returns (env section, agent kwargs,
    run section) with every field checked before any work starts."""
    try:
        with open(path) as fh:
            config = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}")
    except yaml.YAMLError as exc:
        raise UsageError(f"config is not valid YAML: {exc}")
    if not isinstance(config, dict):
        raise UsageError("config root must be a mapping")
    _reject_unknown(config, "top-level", {"env", "agent", "run"})

    env_section = _require_section(config, "env")
    _reject_unknown(
        env_section, "env", {"name", "n", "side", "seed", "spec", "max_horizon"}
    )
    name = env_section.get("name")
    if name not in ("dst", "walkroom"):
        raise UsageError(f"env.name must be 'dst' or 'walkroom', got {name!r}")
    if name == "dst":
        extras = sorted(set(env_section) & {"n", "side", "seed", "spec"})
        if extras:
            raise UsageError(f"env.{extras[0]} does not apply to dst")
    else:
        if "spec" in env_section:
            extras = sorted(set(env_section) & {"n", "side", "seed"})
            if extras:
                raise UsageError(
                    f"env.spec and env.{extras[0]} are mutually exclusive"
                )
        elif not isinstance(env_section.get("n"), int):
            raise UsageError("env.n (objective count) is required for walkroom")

    agent_section = config.get("agent") or {}
    if not isinstance(agent_section, dict):
        raise UsageError("config section 'agent' must be a mapping")
    _reject_unknown(agent_section, "agent", _AGENT_KEYS)
    agent_kwargs = dict(agent_section)
    if "widths" in agent_kwargs:
        agent_kwargs["widths"] = tuple(agent_kwargs["widths"])

    run_section = _require_section(config, "run")
    _reject_unknown(run_section, "run", {"output_dir", "seeds", "reference_point"})
    if not isinstance(run_section.get("output_dir"), str):
        raise UsageError("run.output_dir must be a path string")
    seeds = run_section.get("seeds")
    if (
        not isinstance(seeds, list)
        or not seeds
        or not all(isinstance(s, int) for s in seeds)
    ):
        raise UsageError("run.seeds must be a non-empty list of integers")
    if len(set(seeds)) != len(seeds):
        raise UsageError("run.seeds must not repeat")
    reference = run_section.get("reference_point")
    if reference is not None:
        if not isinstance(reference, list) or not all(
            isinstance(v, (int, float)) for v in reference
        ):
            raise UsageError("run.reference_point must be a list of numbers")

    # fail now, not after hours of training, if agent values are bad
    try:
        AgentConfig(seed=seeds[0], reference_point=reference, **agent_kwargs)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid agent config: {exc}")
    return env_section, agent_kwargs, run_section


def build_env(env_section):
    name = env_section["name"]
    if name == "dst":
        return dst_env(env_section.get("max_horizon", 200))
    if "spec" in env_section:
        try:
            spec = WalkroomSpec.from_json(Path(env_section["spec"]).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read walkroom spec: {exc}")
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad walkroom spec file: {exc}")
        return Walkroom(spec, env_section.get("max_horizon"))
    try:
        env = walkroom_env(
            env_section["n"],
            env_section.get("side", 16),
            env_section.get("seed", 0),
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    if env_section.get("max_horizon") is not None:
        return Walkroom(env.spec, env_section["max_horizon"])
    return env


# --- metric helpers ---------------------------------------------------------


def _seed_report(env, coverage, reference):
    """Raw hypervolume at the reference plus front-normalized epsilon."""
    desc = env.descriptor
    hv = hypervolume(coverage, reference)
    eps_max, eps_mean, _ = front_normalized_epsilon(desc.true_front, coverage)
    return MetricReport(hypervolume=hv, eps_max=eps_max, eps_mean=eps_mean)


def _aggregate(reports):
    stats = {}
    for field in ("hypervolume", "eps_max", "eps_mean"):
        values = np.array([getattr(r, field) for r in reports])
        stats[field] = {
            "mean": float(values.mean()),
            "std": float(values.std()),  # population std, ddof=0
        }
    return stats


# --- subcommands ------------------------------------------------------------


def cmd_train(args):
    env_section, agent_kwargs, run_section = load_run_config(args.config)
    outdir = Path(run_section["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = run_section["seeds"]
    reference = run_section.get("reference_point")

    per_seed = []
    failure = None
    for seed in seeds:
        env = build_env(env_section)
        config = AgentConfig(seed=seed, reference_point=reference, **agent_kwargs)
        ref = reference if reference is not None else env.descriptor.hv_reference
        log_path = outdir / f"log_seed{seed}.jsonl"
        try:
            with open(log_path, "w") as log:
                model, buffer, history = train(env, config, log_stream=log)
            result = evaluate(
                env,
                model,
                buffer,
                config.max_episode_len,
                config.discount_consistent_commands,
                config.gamma,
            )
            report = _seed_report(env, result.coverage, ref)
            save_model(model, outdir / f"model_seed{seed}.bin")
            buffer.save(outdir / f"buffer_seed{seed}.bin")
            write_points_csv(outdir / f"coverage_seed{seed}.csv", result.coverage)
        except Exception as exc:  # keep earlier seeds' results
            failure = f"seed {seed}: {exc}"
            print(f"seed {seed} failed: {exc}", file=sys.stderr)
            break
        per_seed.append(
            {
                "seed": seed,
                "report": report.as_dict(),
                "env_steps": history[-1]["env_steps"] if history else 0,
                "rounds": len(history),
                "coverage_csv": f"coverage_seed{seed}.csv",
                "model": f"model_seed{seed}.bin",
                "buffer": f"buffer_seed{seed}.bin",
                "log": f"log_seed{seed}.jsonl",
            }
        )
        print(
            f"seed {seed}: rounds={len(history)} "
            f"hv={report.hypervolume:.6g} eps_max={report.eps_max:.4f} "
            f"eps_mean={report.eps_mean:.4f}",
            file=sys.stderr,
        )

    summary = {
        "complete": failure is None,
        "env": env_section,
        "agent": agent_kwargs,
        "reference_point": reference,
        "seeds": seeds,
        "per_seed": per_seed,
    }
    if failure is not None:
        summary["error"] = failure
    if per_seed:
        summary["aggregate"] = _aggregate(
            [MetricReport(**entry["report"]) for entry in per_seed]
        )
    summary_path = outdir / "summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(summary_path)
    return 0 if failure is None else 1


def _eval_env(args):
    if (args.env is None) == (args.walkroom_spec is None):
        raise UsageError("exactly one of --env dst or --walkroom-spec is required")
    if args.env is not None:
        if args.env != "dst":
            raise UsageError(f"unknown --env {args.env!r}; use dst or --walkroom-spec")
        return dst_env()
    try:
        spec = WalkroomSpec.from_json(Path(args.walkroom_spec).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read walkroom spec: {exc}")
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad walkroom spec file: {exc}")
    return Walkroom(spec)


def cmd_eval(args):
    env = _eval_env(args)
    try:
        model = load_model(args.model)
        buffer = ExperienceBuffer.load(args.buffer)
    except OSError as exc:
        raise UsageError(str(exc))
    reference = args.reference
    if reference is None:
        reference = env.descriptor.hv_reference
    result = evaluate(env, model, buffer)
    report = _seed_report(env, result.coverage, reference)
    if args.coverage_out:
        write_points_csv(args.coverage_out, result.coverage)
    print(json.dumps(report.as_dict(), sort_keys=True))
    return 0


def _normalize_by_front(front, coverage, reference):
    lo = front.min(axis=0)
    spans = safe_spans(front)
    return (
        (front - lo) / spans,
        (coverage - lo) / spans,
        (np.asarray(reference, dtype=np.float64) - lo) / spans,
    )


def cmd_pareto(args):
    try:
        front = read_points_csv(args.front)
        coverage = read_points_csv(args.coverage)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc))
    if front.shape[0] == 0:
        raise UsageError(f"{args.front}: front file has no points")
    if coverage.shape[0] == 0:
        raise UsageError(f"{args.coverage}: coverage file has no points")
    if front.shape[1] != coverage.shape[1]:
        raise UsageError(
            f"dimension mismatch: front has {front.shape[1]} objectives, "
            f"coverage has {coverage.shape[1]}"
        )
    reference = np.asarray(args.reference, dtype=np.float64)
    if reference.shape[0] != front.shape[1]:
        raise UsageError(
            f"--reference has {reference.shape[0]} values, "
            f"expected {front.shape[1]}"
        )
    if args.normalize:
        front, coverage, reference = _normalize_by_front(front, coverage, reference)
    eps_max, eps_mean, _ = epsilon_metrics(front, coverage)
    report = MetricReport(
        hypervolume=hypervolume(coverage, reference),
        eps_max=eps_max,
        eps_mean=eps_mean,
    )
    print(json.dumps(report.as_dict(), sort_keys=True))
    return 0


def cmd_gen_walkroom(args):
    if not 2 <= args.n <= WALKROOM_MAX_DIMS:
        raise UsageError(f"n must be in [2, {WALKROOM_MAX_DIMS}], got {args.n}")
    if args.side < 4:
        raise UsageError(f"--side must be at least 4, got {args.side}")
    try:
        spec = generate_walkroom_spec(args.n, args.side, args.seed)
    except (ValueError, RuntimeError) as exc:
        raise UsageError(str(exc))
    Path(args.out).write_text(spec.to_json())
    print(args.out)
    return 0


def cmd_plot(args):
    from .plotting import scatter_plot  # matplotlib import deferred

    try:
        coverages = {Path(p).stem: read_points_csv(p) for p in args.coverage}
        front = read_points_csv(args.front) if args.front else None
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc))
    try:
        scatter_plot(args.out, coverages, front)
    except ValueError as exc:
        raise UsageError(str(exc))
    print(args.out)
    return 0


# --- argument parsing -------------------------------------------------------


def _reference_list(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="paretocn",
        description="Train, evaluate and report on conditioned-policy coverage sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run a multi-seed experiment from a YAML config")
    p.add_argument("config", help="YAML file with env/agent/run sections")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="re-score a saved model and buffer")
    p.add_argument("--model", required=True, help="model checkpoint path")
    p.add_argument("--buffer", required=True, help="trajectory buffer path")
    p.add_argument("--env", help="built-in environment name (dst)")
    p.add_argument("--walkroom-spec", help="walkroom spec JSON path")
    p.add_argument(
        "--reference", type=_reference_list,
        help="hypervolume reference, comma-separated (default: environment's)",
    )
    p.add_argument("--coverage-out", help="also write the coverage set as CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pareto", help="metrics for a front/coverage CSV pair")
    p.add_argument("front", help="true front CSV")
    p.add_argument("coverage", help="coverage set CSV")
    p.add_argument("--reference", type=_reference_list, required=True)
    p.add_argument(
        "--normalize", action="store_true",
        help="map all objectives by the front's per-objective min/max first",
    )
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("gen-walkroom", help="write a reproducible walkroom spec")
    p.add_argument("n", type=int, help="number of objectives (2-9)")
    p.add_argument("--side", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_walkroom)

    p = sub.add_parser("plot", help="SVG scatter of coverage sets vs a front")
    p.add_argument("coverage", nargs="+", help="coverage CSVs, one series each")
    p.add_argument("--front", help="true front CSV")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime fault
        print(f"fault: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
