"""Command-line front end.

One process runs one configured job and writes its outputs plus a
manifest.json echoing the fully resolved configuration, so any run can
be reproduced from its output directory alone.  Exit codes: 0 success,
1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    ConfigValidationError,
    DominanceExperimentConfig,
    MonteCarloExperimentConfig,
    RunConfig,
    ScalingExperimentConfig,
    SvdExperimentConfig,
    parse_config,
)
from .engine import EngineConfig, run, trace_summary, trace_to_csv
from .experiments import (
    Distribution,
    chunks_from_svd,
    dominance_condition,
    generate_chunks,
    monte_carlo,
    run_svd_experiment,
    scaling_study,
    svd_instance_from_matrix,
    svd_instance_from_sigmas,
)
from .hybrid import hybrid_schedule, reactive_step, resolve_action, update_model, EMPTY_MODEL
from .model import ChunkSpec
from .pgm import read_pgm
from .policies import POLICY_NAMES, Policy
from .rng import SplitMix64, derive_seed

SUBCOMMANDS = ("simulate", "svd-demo", "monte-carlo", "scaling", "dominance", "hybrid-demo", "validate")


def _spec_dict(spec: ChunkSpec) -> dict:
    return {
        "id": spec.id,
        "r_on": spec.r_on,
        "r_off": spec.r_off,
        "beta": spec.beta,
        "importance": spec.importance,
        "window": spec.window,
    }


def _engine_dict(cfg: EngineConfig) -> dict:
    out = {
        "v_total": cfg.v_total,
        "dt": cfg.dt,
        "max_steps": cfg.max_steps,
        "freshness_enabled": cfg.freshness_enabled,
        "record_steps": cfg.record_steps,
    }
    if cfg.schedules is not None:
        out["schedules"] = {
            "v_total": [list(e) for e in cfg.schedules.v_total],
            "beta": {str(cid): [list(e) for e in s] for cid, s in cfg.schedules.beta.items()},
            "r_on": {str(cid): [list(e) for e in s] for cid, s in cfg.schedules.r_on.items()},
        }
    return out


def _resolved_config(cfg: RunConfig, chunks: list[ChunkSpec] | None) -> dict:
    resolved: dict = {
        "seed": cfg.seed,
        "policy": {
            "name": cfg.policy.kind,
            "threshold": cfg.policy.threshold,
            "weighting": cfg.policy.weighting,
        },
        "engine": _engine_dict(cfg.engine),
        "output": {"dir": cfg.out_dir},
    }
    if chunks is not None:
        resolved["chunks"] = [_spec_dict(s) for s in chunks]
        if cfg.chunk_values:
            for entry in resolved["chunks"]:
                if entry["id"] in cfg.chunk_values:
                    entry["value"] = cfg.chunk_values[entry["id"]]
    if cfg.hybrid is not None:
        h = cfg.hybrid
        resolved["hybrid"] = {
            "eta": h.eta,
            "importance_threshold": h.importance_threshold,
            "change_boost": h.change_boost,
            "lookup_table": [dataclasses.asdict(r) for r in h.lookup_table],
            "override_rules": [dataclasses.asdict(r) for r in h.override_rules],
        }
    if cfg.experiment_kind is not None:
        exp: dict = {"kind": cfg.experiment_kind}
        payload = cfg.experiment
        if isinstance(payload, SvdExperimentConfig):
            exp.update(
                image=payload.image,
                sigmas_csv=payload.sigmas_csv,
                map=dataclasses.asdict(payload.chunk_map),
                policies=list(payload.policies),
            )
        elif isinstance(payload, MonteCarloExperimentConfig):
            spec = payload.spec
            exp.update(
                distribution=dataclasses.asdict(spec.distribution),
                n_range=list(spec.n_range),
                trials=spec.trials,
                r_off=spec.r_off,
                beta=spec.beta,
                window=spec.window,
                policies=list(payload.policies),
            )
        elif isinstance(payload, ScalingExperimentConfig):
            sc = payload.cfg
            exp.update(
                n_values=list(sc.n_values),
                low=sc.distribution.low,
                high=sc.distribution.high,
                window=sc.window,
                v_continuum=sc.continuum_engine.v_total,
                v_freshness=sc.freshness_engine.v_total,
                max_steps=sc.continuum_engine.max_steps,
            )
        elif isinstance(payload, DominanceExperimentConfig):
            exp.update(dataclasses.asdict(payload))
        resolved["experiment"] = exp
    return resolved


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_manifest(out_dir: Path, subcommand: str, resolved: dict, outputs: list[str]) -> None:
    _write_json(
        out_dir / "manifest.json",
        {"subcommand": subcommand, "config": resolved, "outputs": sorted(outputs)},
    )


def _materialize_chunks(cfg: RunConfig) -> list[ChunkSpec]:
    if cfg.chunks is not None:
        return cfg.chunks
    if cfg.generator is not None:
        g = cfg.generator
        return generate_chunks(
            g["distribution"], g["n"], derive_seed(cfg.seed, 0xC0FFEE), g["r_off"], g["beta"], g["window"]
        )
    raise ConfigValidationError(["chunks: required for this subcommand (list or generator)"])


def _policies_by_name(names, base: Policy) -> tuple[Policy, ...]:
    out = []
    for name in names:
        out.append(Policy(kind=name, threshold=base.threshold, weighting=base.weighting))
    return tuple(out)


def _hybrid_rows(cfg: RunConfig, trace, chunks) -> tuple[list[tuple[int, str, str]], dict]:
    """Action decisions at each action point plus the final model state."""
    h = cfg.hybrid
    critical = {s.id for s in chunks if s.importance >= h.importance_threshold}
    values = {s.id: cfg.chunk_values.get(s.id, 0.0) for s in chunks}
    ordered = sorted(trace.completions.items(), key=lambda kv: (kv[1], kv[0]))
    rows = []
    model = EMPTY_MODEL
    ptr = 0
    for step, basis in hybrid_schedule(trace, h):
        while ptr < len(ordered) and ordered[ptr][1] <= step:
            cid, at = ordered[ptr]
            model = update_model(model, (cid, values[cid], at))
            ptr += 1
        known = {cid: values[cid] for cid in basis if cid in critical}
        reactive = reactive_step(known, h.lookup_table)
        resolved = resolve_action(reactive, model, h.override_rules)
        rows.append((step, reactive or "", resolved or ""))
    model_dict = {
        str(cid): dataclasses.asdict(stats) for cid, stats in sorted(model.per_chunk.items())
    }
    return rows, model_dict


def _cmd_simulate(cfg: RunConfig, out_dir: Path, quiet: bool, subcommand: str) -> int:
    chunks = _materialize_chunks(cfg)
    if subcommand == "hybrid-demo" and cfg.hybrid is None:
        raise ConfigValidationError(["hybrid: required for hybrid-demo"])
    trace = run(chunks, cfg.policy, cfg.engine)
    outputs = ["manifest.json", "summary.json"]
    _write_json(out_dir / "summary.json", trace_summary(trace))
    if cfg.engine.record_steps:
        with open(out_dir / "trace.csv", "w", newline="") as fh:
            trace_to_csv(trace, fh)
        outputs.append("trace.csv")
    if cfg.hybrid is not None:
        rows, model_dict = _hybrid_rows(cfg, trace, chunks)
        with open(out_dir / "actions.csv", "w", newline="") as fh:
            fh.write("step,reactive,resolved\n")
            for step, reactive, resolved in rows:
                fh.write(f"{step},{reactive},{resolved}\n")
        _write_json(out_dir / "model.json", model_dict)
        outputs += ["actions.csv", "model.json"]
    _write_manifest(out_dir, subcommand, _resolved_config(cfg, chunks), outputs)
    if not quiet:
        state = "truncated" if trace.truncated else f"makespan {trace.makespan}"
        print(f"{subcommand}: {len(chunks)} chunks, {state}, resets {trace.resets}")
    return 0


def _cmd_svd_demo(cfg: RunConfig, out_dir: Path, quiet: bool) -> int:
    payload = cfg.experiment
    if not isinstance(payload, SvdExperimentConfig):
        raise ConfigValidationError(["experiment: svd-demo needs experiment.kind == 'svd'"])
    if payload.image is not None:
        matrix = read_pgm(payload.image).astype(float)
        instance = svd_instance_from_matrix(matrix, payload.chunk_map)
    else:
        sigmas = np.loadtxt(payload.sigmas_csv, delimiter=",", ndmin=1)
        instance = svd_instance_from_sigmas(sigmas, payload.chunk_map)
    policies = _policies_by_name(payload.policies, cfg.policy)
    result = run_svd_experiment(instance, policies, cfg.engine)
    with open(out_dir / "curves.csv", "w", newline="") as fh:
        fh.write("step,policy,error\n")
        for kind in sorted(result.curves):
            curve = result.curves[kind]
            for i, err in enumerate(curve.errors):
                fh.write(f"{i + 1},{kind},{err!r}\n")
    _write_json(
        out_dir / "summary.json",
        {
            "horizon": result.horizon,
            "makespans": {kind: c.makespan for kind, c in sorted(result.curves.items())},
            "chunks": len(instance.sigmas),
        },
    )
    _write_manifest(out_dir, "svd-demo", _resolved_config(cfg, None), ["manifest.json", "summary.json", "curves.csv"])
    if not quiet:
        spans = ", ".join(f"{k}={c.makespan}" for k, c in sorted(result.curves.items()))
        print(f"svd-demo: {len(instance.sigmas)} triplets, makespans {spans}")
    return 0


def _cmd_monte_carlo(cfg: RunConfig, out_dir: Path, quiet: bool) -> int:
    payload = cfg.experiment
    if not isinstance(payload, MonteCarloExperimentConfig):
        raise ConfigValidationError(["experiment: monte-carlo needs experiment.kind == 'monte-carlo'"])
    spec = dataclasses.replace(payload.spec, seed=cfg.seed)
    result = monte_carlo(spec, cfg.engine, _policies_by_name(payload.policies, cfg.policy))
    with open(out_dir / "trials.csv", "w", newline="") as fh:
        fh.write("distribution,n,trial,policy,makespan,win\n")
        for row in result.rows:
            fh.write(f"{result.distribution},{row.n},{row.trial},{row.policy},{row.makespan},{int(row.win)}\n")
    with open(out_dir / "winrates.csv", "w", newline="") as fh:
        fh.write("distribution,n,policy,win_rate,mean_makespan\n")
        for (n, policy), rate in sorted(result.win_rates.items()):
            mean = result.mean_makespans[(n, policy)]
            fh.write(f"{result.distribution},{n},{policy},{rate!r},{mean!r}\n")
    _write_manifest(out_dir, "monte-carlo", _resolved_config(cfg, None), ["manifest.json", "trials.csv", "winrates.csv"])
    if not quiet:
        print(f"monte-carlo: {result.distribution}, {len(result.rows)} rows")
    return 0


def _cmd_scaling(cfg: RunConfig, out_dir: Path, quiet: bool) -> int:
    payload = cfg.experiment
    if not isinstance(payload, ScalingExperimentConfig):
        raise ConfigValidationError(["experiment: scaling needs experiment.kind == 'scaling'"])
    sc = dataclasses.replace(payload.cfg, seed=cfg.seed)
    result = scaling_study(sc)
    with open(out_dir / "scaling.csv", "w", newline="") as fh:
        fh.write("mode,n,policy,makespan,oracle\n")
        for row in result.rows:
            fh.write(f"{row.mode},{row.n},{row.policy},{row.makespan},{row.oracle!r}\n")
    _write_json(
        out_dir / "fit.json",
        {
            mode: {"slope": fit[0], "intercept": fit[1], "r2": fit[2]}
            for mode, fit in result.sequential_fit.items()
        },
    )
    _write_manifest(out_dir, "scaling", _resolved_config(cfg, None), ["manifest.json", "scaling.csv", "fit.json"])
    if not quiet:
        print(f"scaling: {len(result.rows)} rows")
    return 0


def _cmd_dominance(cfg: RunConfig, out_dir: Path, quiet: bool) -> int:
    payload = cfg.experiment
    if not isinstance(payload, DominanceExperimentConfig):
        raise ConfigValidationError(["experiment: dominance needs experiment.kind == 'dominance'"])
    rows = []
    holds_and_lc = 0
    holds_count = 0
    for i in range(payload.count):
        rng = SplitMix64(derive_seed(cfg.seed, i))
        n = rng.randint(payload.n_min, payload.n_max)
        dist = Distribution("uniform", low=payload.low, high=payload.high)
        specs = [
            ChunkSpec(id=j, r_on=r, r_off=payload.r_off, beta=payload.beta, window=payload.window)
            for j, r in enumerate(dist.sample(n, rng))
        ]
        verdict = dominance_condition(specs, cfg.engine)
        lc = run(specs, Policy("leaf-cutter"), dataclasses.replace(cfg.engine, record_steps=False))
        as_ = run(specs, Policy("all-sites"), dataclasses.replace(cfg.engine, record_steps=False))
        rows.append((i, n, verdict.lhs, verdict.rhs, verdict.holds, lc.makespan, as_.makespan))
        if verdict.holds:
            holds_count += 1
            if lc.makespan <= as_.makespan:
                holds_and_lc += 1
    with open(out_dir / "dominance.csv", "w", newline="") as fh:
        fh.write("instance,n,lhs,rhs,holds,makespan_leaf_cutter,makespan_all_sites\n")
        for i, n, lhs, rhs, holds, lc_m, as_m in rows:
            fh.write(f"{i},{n},{lhs!r},{rhs!r},{int(holds)},{lc_m},{as_m}\n")
    _write_json(
        out_dir / "summary.json",
        {
            "instances": payload.count,
            "holds_true": holds_count,
            "holds_true_and_leaf_cutter_not_slower": holds_and_lc,
        },
    )
    _write_manifest(out_dir, "dominance", _resolved_config(cfg, None), ["manifest.json", "dominance.csv", "summary.json"])
    if not quiet:
        print(f"dominance: {holds_count}/{payload.count} instances satisfy the condition")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="memsched",
        description="Deterministic bandwidth-allocation simulator and experiment runner.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("-c", "--config", required=True, help="path to the JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out-dir", default=None, help="output directory root")
        p.add_argument("--policy", default=None, choices=POLICY_NAMES, help="override the policy")
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigValidationError(["--seed: must be >= 0"])
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.policy is not None:
            cfg = dataclasses.replace(
                cfg,
                policy=Policy(
                    kind=args.policy,
                    threshold=cfg.policy.threshold,
                    weighting=cfg.policy.weighting,
                ),
            )
        if args.out_dir is not None:
            cfg = dataclasses.replace(cfg, out_dir=args.out_dir)

        if args.subcommand == "validate":
            if not args.quiet:
                print(f"{args.config}: ok")
            return 0

        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.subcommand in ("simulate", "hybrid-demo"):
            return _cmd_simulate(cfg, out_dir, args.quiet, args.subcommand)
        if args.subcommand == "svd-demo":
            return _cmd_svd_demo(cfg, out_dir, args.quiet)
        if args.subcommand == "monte-carlo":
            return _cmd_monte_carlo(cfg, out_dir, args.quiet)
        if args.subcommand == "scaling":
            return _cmd_scaling(cfg, out_dir, args.quiet)
        return _cmd_dominance(cfg, out_dir, args.quiet)
    except ConfigValidationError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
