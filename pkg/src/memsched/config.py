"""JSON run configuration: schema validation and loading.

Validation is strict: unknown keys are rejected and every violation is
reported with its JSON path, so a bad config fails before any output is
written.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .engine import EngineConfig, Schedule
from .experiments import (
    DISTRIBUTION_KINDS,
    ChunkMap,
    Distribution,
    MonteCarloSpec,
    ScalingConfig,
    default_n_range,
)
from .hybrid import MODEL_STATS, OPS, HybridConfig, LookupRule, OverrideRule
from .model import ChunkSpec
from .policies import POLICY_NAMES, WEIGHTINGS, Policy

EXPERIMENT_KINDS = ("svd", "monte-carlo", "scaling", "dominance")


class ConfigValidationError(ValueError):
    """Carries the full list of schema violations with JSON paths."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass
class DominanceExperimentConfig:
    count: int = 200
    n_min: int = 3
    n_max: int = 10
    low: float = 85.0
    high: float = 100.0
    window: int | None = 8
    r_off: float = 200.0
    beta: float = 1.0


@dataclass
class SvdExperimentConfig:
    image: str | None = None
    sigmas_csv: str | None = None
    chunk_map: ChunkMap = ChunkMap()
    policies: tuple[str, ...] = ("sequential", "all-sites", "leaf-cutter")


@dataclass
class MonteCarloExperimentConfig:
    spec: MonteCarloSpec | None = None
    policies: tuple[str, ...] = ("sequential", "all-sites", "leaf-cutter")


@dataclass
class ScalingExperimentConfig:
    cfg: ScalingConfig | None = None


@dataclass
class RunConfig:
    """Fully resolved run configuration."""

    seed: int
    chunks: list[ChunkSpec] | None
    chunk_values: dict[int, float]
    generator: dict | None
    policy: Policy
    engine: EngineConfig
    hybrid: HybridConfig | None
    experiment_kind: str | None
    experiment: object | None
    out_dir: str


class _Check:
    """Collects violations while walking the raw JSON document."""

    def __init__(self):
        self.violations: list[str] = []

    def error(self, path: str, message: str) -> None:
        self.violations.append(f"{path}: {message}")

    def obj(self, value, path: str, allowed: set[str]) -> dict | None:
        if not isinstance(value, dict):
            self.error(path, f"expected an object, got {type(value).__name__}")
            return None
        for key in value:
            if key not in allowed:
                self.error(f"{path}.{key}" if path else key, "unknown key")
        return value

    def num(self, value, path: str, lo=None, hi=None, lo_open=False, hi_open=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.error(path, f"expected a number, got {type(value).__name__}")
            return None
        bound = ("(" if lo_open else "[") + (f"{lo}" if lo is not None else "-inf") + ", "
        bound += (f"{hi}" if hi is not None else "inf") + (")" if hi_open else "]")
        if lo is not None and (value < lo or (lo_open and value == lo)):
            self.error(path, f"must be in {bound}, got {value}")
            return None
        if hi is not None and (value > hi or (hi_open and value == hi)):
            self.error(path, f"must be in {bound}, got {value}")
            return None
        return float(value)

    def integer(self, value, path: str, lo=None, hi=None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(path, f"expected an integer, got {type(value).__name__}")
            return None
        if lo is not None and value < lo:
            self.error(path, f"must be >= {lo}, got {value}")
            return None
        if hi is not None and value > hi:
            self.error(path, f"must be <= {hi}, got {value}")
            return None
        return value

    def boolean(self, value, path: str):
        if not isinstance(value, bool):
            self.error(path, f"expected a boolean, got {type(value).__name__}")
            return None
        return value

    def string(self, value, path: str, choices=None):
        if not isinstance(value, str):
            self.error(path, f"expected a string, got {type(value).__name__}")
            return None
        if choices is not None and value not in choices:
            self.error(path, f"must be one of {sorted(choices)}, got {value!r}")
            return None
        return value


def _parse_chunk(entry, path: str, check: _Check) -> tuple[ChunkSpec | None, float | None]:
    obj = check.obj(entry, path, {"id", "r_on", "r_off", "beta", "importance", "window", "value"})
    if obj is None:
        return None, None
    cid = check.integer(obj.get("id"), f"{path}.id", lo=0) if "id" in obj else check.error(path, "missing key 'id'")
    if "r_on" not in obj:
        check.error(path, "missing key 'r_on'")
        r_on = None
    else:
        r_on = check.num(obj["r_on"], f"{path}.r_on", lo=0, hi=100, lo_open=True)
    r_off = check.num(obj["r_off"], f"{path}.r_off", lo=0, lo_open=True) if "r_off" in obj else 200.0
    beta = check.num(obj["beta"], f"{path}.beta", lo=0, lo_open=True) if "beta" in obj else 1.0
    importance = check.num(obj["importance"], f"{path}.importance", lo=0) if "importance" in obj else 0.0
    window = check.integer(obj["window"], f"{path}.window", lo=1) if "window" in obj else None
    value = check.num(obj["value"], f"{path}.value") if "value" in obj else None
    if None in (cid, r_on) or (("r_off" in obj) and r_off is None) or beta is None or importance is None:
        return None, None
    if r_off is not None and r_on is not None and r_off <= r_on:
        check.error(f"{path}.r_off", f"must exceed r_on ({r_on}), got {r_off}")
        return None, None
    if "window" in obj and window is None:
        return None, None
    return (
        ChunkSpec(id=cid, r_on=r_on, r_off=r_off, beta=beta, importance=importance, window=window),
        value,
    )


def _parse_distribution(raw, path: str, check: _Check) -> Distribution | None:
    obj = check.obj(raw, path, {"kind", "c", "low", "high", "r_best"})
    if obj is None:
        return None
    kind = check.string(obj.get("kind"), f"{path}.kind", choices=set(DISTRIBUTION_KINDS))
    if kind is None:
        return None
    kwargs = {}
    for name in ("c", "low", "high", "r_best"):
        if name in obj:
            val = check.num(obj[name], f"{path}.{name}", lo=0, hi=100, lo_open=True)
            if val is None:
                return None
            kwargs[name] = val
    if kwargs.get("low", 1.0) > kwargs.get("high", 100.0):
        check.error(path, f"low must not exceed high")
        return None
    return Distribution(kind, **kwargs)


def _parse_series(raw, path: str, check: _Check) -> tuple | None:
    if not isinstance(raw, list):
        check.error(path, f"expected a list of [step, value] pairs")
        return None
    series = []
    prev = 0
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) != 2:
            check.error(f"{path}[{i}]", "expected a [step, value] pair")
            return None
        step_idx = check.integer(entry[0], f"{path}[{i}][0]", lo=1)
        value = check.num(entry[1], f"{path}[{i}][1]", lo=0, lo_open=True)
        if step_idx is None or value is None:
            return None
        if step_idx <= prev:
            check.error(f"{path}[{i}][0]", "schedule steps must be strictly increasing")
            return None
        prev = step_idx
        series.append((step_idx, value))
    return tuple(series)


def _parse_keyed_series(raw, path: str, check: _Check) -> dict | None:
    if not isinstance(raw, dict):
        check.error(path, "expected an object keyed by chunk id")
        return None
    out = {}
    for key, series in raw.items():
        try:
            cid = int(key)
        except ValueError:
            check.error(f"{path}.{key}", "keys must be chunk ids")
            return None
        parsed = _parse_series(series, f"{path}.{key}", check)
        if parsed is None:
            return None
        out[cid] = parsed
    return out


def _parse_engine(raw, path: str, check: _Check) -> EngineConfig | None:
    obj = check.obj(
        raw,
        path,
        {"v_total", "dt", "max_steps", "freshness_enabled", "record_steps", "schedules"},
    )
    if obj is None:
        return None
    v_total = check.num(obj["v_total"], f"{path}.v_total", lo=0, lo_open=True) if "v_total" in obj else 1.0
    dt = check.num(obj["dt"], f"{path}.dt", lo=0, lo_open=True) if "dt" in obj else 1.0
    max_steps = check.integer(obj["max_steps"], f"{path}.max_steps", lo=1) if "max_steps" in obj else 1_000_000
    freshness = check.boolean(obj["freshness_enabled"], f"{path}.freshness_enabled") if "freshness_enabled" in obj else False
    record = check.boolean(obj["record_steps"], f"{path}.record_steps") if "record_steps" in obj else True
    schedules = None
    if "schedules" in obj:
        sched_obj = check.obj(obj["schedules"], f"{path}.schedules", {"v_total", "beta", "r_on"})
        if sched_obj is not None:
            v_series = _parse_series(sched_obj["v_total"], f"{path}.schedules.v_total", check) if "v_total" in sched_obj else ()
            beta_series = _parse_keyed_series(sched_obj["beta"], f"{path}.schedules.beta", check) if "beta" in sched_obj else {}
            r_on_series = _parse_keyed_series(sched_obj["r_on"], f"{path}.schedules.r_on", check) if "r_on" in sched_obj else {}
            if v_series is not None and beta_series is not None and r_on_series is not None:
                schedules = Schedule(v_total=v_series, beta=beta_series, r_on=r_on_series)
    if None in (v_total, dt, max_steps, freshness, record):
        return None
    return EngineConfig(
        v_total=v_total,
        dt=dt,
        max_steps=max_steps,
        freshness_enabled=freshness,
        schedules=schedules,
        record_steps=record,
    )


def _parse_rule(raw, path: str, check: _Check, with_stat: bool):
    keys = {"chunk", "op", "value", "action"} | ({"stat"} if with_stat else set())
    obj = check.obj(raw, path, keys)
    if obj is None:
        return None
    missing = [k for k in keys if k not in obj]
    for k in missing:
        check.error(path, f"missing key '{k}'")
    if missing:
        return None
    chunk = check.integer(obj["chunk"], f"{path}.chunk", lo=0)
    op = check.string(obj["op"], f"{path}.op", choices=set(OPS))
    value = check.num(obj["value"], f"{path}.value")
    action = check.string(obj["action"], f"{path}.action")
    stat = check.string(obj["stat"], f"{path}.stat", choices=set(MODEL_STATS)) if with_stat else None
    if None in (chunk, op, value, action) or (with_stat and stat is None):
        return None
    if with_stat:
        return OverrideRule(stat=stat, chunk=chunk, op=op, value=value, action=action)
    return LookupRule(chunk=chunk, op=op, value=value, action=action)


def _parse_hybrid(raw, path: str, check: _Check) -> HybridConfig | None:
    obj = check.obj(
        raw,
        path,
        {"eta", "importance_threshold", "change_boost", "lookup_table", "override_rules"},
    )
    if obj is None:
        return None
    if "eta" not in obj:
        check.error(path, "missing key 'eta'")
        return None
    eta = check.integer(obj["eta"], f"{path}.eta", lo=1)
    threshold = check.num(obj["importance_threshold"], f"{path}.importance_threshold", lo=0) if "importance_threshold" in obj else 0.0
    boost = check.num(obj["change_boost"], f"{path}.change_boost", lo=0) if "change_boost" in obj else 0.0
    lookup: list[LookupRule] = []
    overrides: list[OverrideRule] = []
    for name, target, with_stat in (("lookup_table", lookup, False), ("override_rules", overrides, True)):
        if name not in obj:
            continue
        if not isinstance(obj[name], list):
            check.error(f"{path}.{name}", "expected a list of rules")
            return None
        for i, rule in enumerate(obj[name]):
            parsed = _parse_rule(rule, f"{path}.{name}[{i}]", check, with_stat)
            if parsed is not None:
                target.append(parsed)
    if None in (eta, threshold, boost) or check.violations:
        return None
    return HybridConfig(
        eta=eta,
        importance_threshold=threshold,
        lookup_table=tuple(lookup),
        override_rules=tuple(overrides),
        change_boost=boost,
    )


def _parse_chunk_map(raw, path: str, check: _Check) -> ChunkMap | None:
    obj = check.obj(raw, path, {"r_min", "r_max", "r_off", "beta", "window"})
    if obj is None:
        return None
    r_min = check.num(obj["r_min"], f"{path}.r_min", lo=0, hi=100, lo_open=True) if "r_min" in obj else 1.0
    r_max = check.num(obj["r_max"], f"{path}.r_max", lo=0, hi=100, lo_open=True) if "r_max" in obj else 100.0
    r_off = check.num(obj["r_off"], f"{path}.r_off", lo=0, lo_open=True) if "r_off" in obj else 200.0
    beta = check.num(obj["beta"], f"{path}.beta", lo=0, lo_open=True) if "beta" in obj else 1.0
    window = check.integer(obj["window"], f"{path}.window", lo=1) if "window" in obj else None
    if None in (r_min, r_max, r_off, beta) or ("window" in obj and window is None):
        return None
    if r_min > r_max:
        check.error(f"{path}.r_min", f"must not exceed r_max ({r_max})")
        return None
    if r_off <= r_max:
        check.error(f"{path}.r_off", f"must exceed r_max ({r_max}), got {r_off}")
        return None
    return ChunkMap(r_min=r_min, r_max=r_max, r_off=r_off, beta=beta, window=window)


def _parse_policy_names(raw, path: str, check: _Check):
    if not isinstance(raw, list) or not raw:
        check.error(path, "expected a nonempty list of policy names")
        return None
    names = []
    for i, name in enumerate(raw):
        s = check.string(name, f"{path}[{i}]", choices=set(POLICY_NAMES))
        if s is None:
            return None
        names.append(s)
    return tuple(names)


def _parse_experiment(raw, path: str, check: _Check):
    if not isinstance(raw, dict):
        check.error(path, f"expected an object, got {type(raw).__name__}")
        return None, None
    kind = check.string(raw.get("kind"), f"{path}.kind", choices=set(EXPERIMENT_KINDS))
    if kind is None:
        return None, None
    if kind == "svd":
        obj = check.obj(raw, path, {"kind", "image", "sigmas_csv", "map", "policies"})
        if obj is None:
            return None, None
        image = check.string(obj["image"], f"{path}.image") if "image" in obj else None
        sigmas = check.string(obj["sigmas_csv"], f"{path}.sigmas_csv") if "sigmas_csv" in obj else None
        if (image is None) == (sigmas is None):
            check.error(path, "exactly one of 'image' or 'sigmas_csv' is required")
            return None, None
        chunk_map = _parse_chunk_map(obj["map"], f"{path}.map", check) if "map" in obj else ChunkMap()
        policies = _parse_policy_names(obj["policies"], f"{path}.policies", check) if "policies" in obj else ("sequential", "all-sites", "leaf-cutter")
        if chunk_map is None or policies is None:
            return None, None
        return kind, SvdExperimentConfig(image=image, sigmas_csv=sigmas, chunk_map=chunk_map, policies=policies)
    if kind == "monte-carlo":
        obj = check.obj(raw, path, {"kind", "distribution", "n_range", "trials", "r_off", "beta", "window", "policies"})
        if obj is None:
            return None, None
        if "distribution" not in obj:
            check.error(path, "missing key 'distribution'")
            return None, None
        dist = _parse_distribution(obj["distribution"], f"{path}.distribution", check)
        n_range = None
        if "n_range" in obj:
            if not isinstance(obj["n_range"], list) or not obj["n_range"]:
                check.error(f"{path}.n_range", "expected a nonempty list of integers")
            else:
                n_range = tuple(
                    v for v in (check.integer(n, f"{path}.n_range[{i}]", lo=1) for i, n in enumerate(obj["n_range"])) if v is not None
                )
        else:
            n_range = default_n_range()
        trials = check.integer(obj["trials"], f"{path}.trials", lo=1) if "trials" in obj else 10
        r_off = check.num(obj["r_off"], f"{path}.r_off", lo=100, lo_open=True) if "r_off" in obj else 200.0
        beta = check.num(obj["beta"], f"{path}.beta", lo=0, lo_open=True) if "beta" in obj else 1.0
        window = check.integer(obj["window"], f"{path}.window", lo=1) if "window" in obj else 8
        policies = _parse_policy_names(obj["policies"], f"{path}.policies", check) if "policies" in obj else ("sequential", "all-sites", "leaf-cutter")
        if None in (dist, n_range, trials, r_off, beta, policies) or ("window" in obj and window is None):
            return None, None
        mc = MonteCarloSpec(distribution=dist, n_range=n_range, trials=trials, seed=0, r_off=r_off, beta=beta, window=window)
        return kind, MonteCarloExperimentConfig(spec=mc, policies=policies)
    if kind == "scaling":
        obj = check.obj(raw, path, {"kind", "n_values", "low", "high", "window", "v_continuum", "v_freshness", "max_steps"})
        if obj is None:
            return None, None
        n_values = (10, 100, 1000)
        if "n_values" in obj:
            if not isinstance(obj["n_values"], list) or not obj["n_values"]:
                check.error(f"{path}.n_values", "expected a nonempty list of integers")
                return None, None
            n_values = tuple(
                v for v in (check.integer(n, f"{path}.n_values[{i}]", lo=2) for i, n in enumerate(obj["n_values"])) if v is not None
            )
        low = check.num(obj["low"], f"{path}.low", lo=0, hi=100, lo_open=True) if "low" in obj else 1.0
        high = check.num(obj["high"], f"{path}.high", lo=0, hi=100, lo_open=True) if "high" in obj else 100.0
        window = check.integer(obj["window"], f"{path}.window", lo=1) if "window" in obj else 50
        v_cont = check.num(obj["v_continuum"], f"{path}.v_continuum", lo=0, lo_open=True) if "v_continuum" in obj else 0.5
        v_fresh = check.num(obj["v_freshness"], f"{path}.v_freshness", lo=0, lo_open=True) if "v_freshness" in obj else 1250.0
        max_steps = check.integer(obj["max_steps"], f"{path}.max_steps", lo=1) if "max_steps" in obj else 2_000_000
        if None in (low, high, window, v_cont, v_fresh, max_steps) or not n_values:
            return None, None
        cfg = ScalingConfig(
            n_values=n_values,
            distribution=Distribution("uniform", low=low, high=high),
            seed=0,
            window=window,
            continuum_engine=EngineConfig(v_total=v_cont, dt=1.0, max_steps=max_steps, freshness_enabled=False, record_steps=False),
            freshness_engine=EngineConfig(v_total=v_fresh, dt=1.0, max_steps=max_steps, freshness_enabled=True, record_steps=False),
        )
        return kind, ScalingExperimentConfig(cfg=cfg)
    obj = check.obj(raw, path, {"kind", "count", "n_min", "n_max", "low", "high", "window", "r_off", "beta"})
    if obj is None:
        return None, None
    count = check.integer(obj["count"], f"{path}.count", lo=1) if "count" in obj else 200
    n_min = check.integer(obj["n_min"], f"{path}.n_min", lo=2) if "n_min" in obj else 3
    n_max = check.integer(obj["n_max"], f"{path}.n_max", lo=2) if "n_max" in obj else 10
    low = check.num(obj["low"], f"{path}.low", lo=0, hi=100, lo_open=True) if "low" in obj else 85.0
    high = check.num(obj["high"], f"{path}.high", lo=0, hi=100, lo_open=True) if "high" in obj else 100.0
    window = check.integer(obj["window"], f"{path}.window", lo=1) if "window" in obj else 8
    r_off = check.num(obj["r_off"], f"{path}.r_off", lo=100, lo_open=True) if "r_off" in obj else 200.0
    beta = check.num(obj["beta"], f"{path}.beta", lo=0, lo_open=True) if "beta" in obj else 1.0
    if None in (count, n_min, n_max, low, high, window, r_off, beta):
        return None, None
    if n_min > n_max:
        check.error(f"{path}.n_min", f"must not exceed n_max ({n_max})")
        return None, None
    return kind, DominanceExperimentConfig(
        count=count, n_min=n_min, n_max=n_max, low=low, high=high, window=window, r_off=r_off, beta=beta
    )


def validate_document(doc) -> tuple[RunConfig | None, list[str]]:
    """Walk a parsed JSON document; return (config, violations)."""
    check = _Check()
    top = check.obj(doc, "", {"seed", "chunks", "policy", "engine", "hybrid", "experiment", "output"})
    if top is None:
        return None, check.violations

    seed = check.integer(top["seed"], "seed", lo=0) if "seed" in top else 0

    chunks: list[ChunkSpec] | None = None
    chunk_values: dict[int, float] = {}
    generator = None
    if "chunks" in top:
        raw_chunks = top["chunks"]
        if isinstance(raw_chunks, list):
            chunks = []
            seen: set[int] = set()
            for i, entry in enumerate(raw_chunks):
                spec, value = _parse_chunk(entry, f"chunks[{i}]", check)
                if spec is not None:
                    if spec.id in seen:
                        check.error(f"chunks[{i}].id", f"duplicate chunk id {spec.id}")
                    seen.add(spec.id)
                    chunks.append(spec)
                    if value is not None:
                        chunk_values[spec.id] = value
            if not raw_chunks:
                check.error("chunks", "chunk list must be nonempty")
        elif isinstance(raw_chunks, dict):
            gen_obj = check.obj(raw_chunks, "chunks", {"generator"})
            if gen_obj is not None and "generator" in gen_obj:
                g = check.obj(
                    gen_obj["generator"],
                    "chunks.generator",
                    {"kind", "c", "low", "high", "r_best", "n", "r_off", "beta", "window"},
                )
                if g is not None:
                    n = check.integer(g.get("n"), "chunks.generator.n", lo=1) if "n" in g else check.error("chunks.generator", "missing key 'n'")
                    dist_raw = {k: v for k, v in g.items() if k in ("kind", "c", "low", "high", "r_best")}
                    dist = _parse_distribution(dist_raw, "chunks.generator", check)
                    r_off = check.num(g["r_off"], "chunks.generator.r_off", lo=100, lo_open=True) if "r_off" in g else 200.0
                    beta = check.num(g["beta"], "chunks.generator.beta", lo=0, lo_open=True) if "beta" in g else 1.0
                    window = check.integer(g["window"], "chunks.generator.window", lo=1) if "window" in g else None
                    if dist is not None and n is not None and None not in (r_off, beta):
                        generator = {
                            "distribution": dist,
                            "n": n,
                            "r_off": r_off,
                            "beta": beta,
                            "window": window,
                        }
            else:
                check.error("chunks", "expected a list of chunks or {'generator': {...}}")
        else:
            check.error("chunks", "expected a list of chunks or {'generator': {...}}")

    policy = Policy("sequential")
    if "policy" in top:
        pol_obj = check.obj(top["policy"], "policy", {"name", "threshold", "weighting"})
        if pol_obj is not None:
            name = check.string(pol_obj.get("name"), "policy.name", choices=set(POLICY_NAMES)) if "name" in pol_obj else check.error("policy", "missing key 'name'")
            threshold = check.num(pol_obj["threshold"], "policy.threshold", lo=0) if "threshold" in pol_obj else 0.0
            weighting = check.string(pol_obj["weighting"], "policy.weighting", choices=set(WEIGHTINGS)) if "weighting" in pol_obj else "series"
            if name is not None and threshold is not None and weighting is not None:
                policy = Policy(kind=name, threshold=threshold, weighting=weighting)

    engine = _parse_engine(top["engine"], "engine", check) if "engine" in top else EngineConfig()
    hybrid = _parse_hybrid(top["hybrid"], "hybrid", check) if "hybrid" in top else None
    experiment_kind, experiment = (None, None)
    if "experiment" in top:
        experiment_kind, experiment = _parse_experiment(top["experiment"], "experiment", check)

    out_dir = "out"
    if "output" in top:
        out_obj = check.obj(top["output"], "output", {"dir"})
        if out_obj is not None and "dir" in out_obj:
            parsed = check.string(out_obj["dir"], "output.dir")
            if parsed is not None:
                out_dir = parsed

    if engine is not None and engine.schedules is not None and chunks is not None:
        known = {c.id for c in chunks}
        for cid in list(engine.schedules.beta) + list(engine.schedules.r_on):
            if cid not in known:
                check.error("engine.schedules", f"references unknown chunk id {cid}")

    if check.violations or seed is None or engine is None:
        return None, check.violations
    return (
        RunConfig(
            seed=seed,
            chunks=chunks,
            chunk_values=chunk_values,
            generator=generator,
            policy=policy,
            engine=engine,
            hybrid=hybrid,
            experiment_kind=experiment_kind,
            experiment=experiment,
            out_dir=out_dir,
        ),
        [],
    )


def parse_config(path) -> RunConfig:
    """Load and validate a config file; raises ConfigValidationError."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigValidationError([f"{path}: {exc}"]) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError(
            [f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]
        ) from exc
    cfg, violations = validate_document(doc)
    if cfg is None:
        raise ConfigValidationError(violations)
    return cfg
