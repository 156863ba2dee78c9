"""Deterministic simulation loop.

One step = one allocation plus one explicit-Euler update of duration
dt.  Per step the engine resolves any parameter schedules, asks the
policy for a bandwidth division, advances every chunk, fires freshness
resets when enabled, and records.  The loop ends when every chunk has
completed or the max_steps safety cap is hit, in which case the partial
trace is returned with a truncation flag instead of a makespan.

Step indices are 1-based throughout, so a trace's makespan equals the
number of steps executed and the paper-style "steps to send everything"
reading of a run.
"""

from __future__ import annotations

import bisect
import json
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import TextIO

import numpy as np

from .model import ChunkSpec, ChunkState, volt_time_need
from .policies import Allocation, Policy


class ConfigError(ValueError):
    """Invalid engine configuration or chunk set."""


StepSeries = tuple[tuple[int, float], ...]


def _check_series(series, name: str, lo: float | None = None) -> StepSeries:
    out = []
    prev = 0
    for entry in series:
        step_idx, value = entry
        if int(step_idx) != step_idx or step_idx < 1:
            raise ConfigError(f"{name}: schedule steps must be integers >= 1, got {step_idx}")
        if step_idx <= prev:
            raise ConfigError(f"{name}: schedule steps must be strictly increasing")
        if lo is not None and not value > lo:
            raise ConfigError(f"{name}: schedule value must be > {lo}, got {value}")
        out.append((int(step_idx), float(value)))
        prev = step_idx
    return tuple(out)


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant parameter overrides keyed by 1-based step index.

    An entry (k, value) takes effect from step k onward, until a later
    entry replaces it.  Steps before the first entry use the static
    configuration.
    """

    v_total: StepSeries = ()
    beta: dict[int, StepSeries] = field(default_factory=dict)
    r_on: dict[int, StepSeries] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "v_total", _check_series(self.v_total, "v_total", lo=0.0))
        object.__setattr__(
            self,
            "beta",
            {cid: _check_series(s, f"beta[{cid}]", lo=0.0) for cid, s in self.beta.items()},
        )
        object.__setattr__(
            self,
            "r_on",
            {cid: _check_series(s, f"r_on[{cid}]", lo=0.0) for cid, s in self.r_on.items()},
        )

    def change_steps(self) -> set[int]:
        steps = {k for k, _ in self.v_total}
        for series in list(self.beta.values()) + list(self.r_on.values()):
            steps.update(k for k, _ in series)
        return steps


def _series_value(series: StepSeries, t: int, default: float) -> float:
    """Value in effect at step t (last entry with step <= t)."""
    idx = bisect.bisect_right([k for k, _ in series], t) - 1
    return series[idx][1] if idx >= 0 else default


ResetHook = Callable[[ChunkSpec, ChunkState], "ChunkSpec | None"]


@dataclass(frozen=True)
class EngineConfig:
    """Simulation parameters.

    record_steps controls whether full per-step records are kept; large
    experiment sweeps turn it off and use only completions, makespan
    and reset counts.  on_reset, when set, is called after a freshness
    reset fires and may return a replacement spec for that chunk (for
    example to redraw its richness); by default a reset only clears
    progress.
    """

    v_total: float = 1.0
    dt: float = 1.0
    max_steps: int = 1_000_000
    freshness_enabled: bool = False
    schedules: Schedule | None = None
    record_steps: bool = True
    on_reset: ResetHook | None = None

    def __post_init__(self):
        if not self.v_total > 0.0:
            raise ConfigError(f"v_total must be positive, got {self.v_total}")
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ConfigError(f"max_steps must be a positive integer, got {self.max_steps}")


@dataclass(frozen=True)
class StepRecord:
    """Snapshot after one step: allocation, post-step states, total current."""

    step: int
    allocation: Allocation
    states: tuple[ChunkState, ...]
    influx: float


@dataclass
class Trace:
    """Full record of one simulation run."""

    chunk_ids: tuple[int, ...]
    dt: float
    steps: list[StepRecord]
    completions: dict[int, int]
    makespan: int | None
    resets: int
    truncated: bool
    steps_executed: int


def _fill_policy_shares(
    shares: np.ndarray,
    policy: Policy,
    order: np.ndarray,
    r_on: np.ndarray,
    r_off: np.ndarray,
    importance: np.ndarray,
    x: np.ndarray,
    completed: np.ndarray,
    v_total: float,
) -> None:
    """Vectorized mirror of the policy functions in .policies.

    `order` is the chunk index permutation sorted by (r_on, id); the
    caller keeps it in sync with the effective r_on values.  At least
    one chunk must be incomplete.
    """
    shares.fill(0.0)
    if policy.kind == "sequential":
        live_in_order = ~completed[order]
        shares[order[int(np.argmax(live_in_order))]] = v_total
        return
    if policy.kind == "leaf-cutter":
        best = int(order[0])
        if not completed[best]:
            shares[best] = v_total
            return
        pool = ~completed
    elif policy.kind == "importance-leaf-cutter":
        live = ~completed
        pool = live & (importance >= policy.threshold)
        if not pool.any():
            pool = live
    else:
        pool = ~completed
    if policy.weighting == "series":
        weights = r_on[pool] + (r_off[pool] - r_on[pool]) * x[pool]
    else:
        weights = r_on[pool]
    shares[pool] = v_total * weights / weights.sum()


def run(specs: list[ChunkSpec], policy: Policy, config: EngineConfig) -> Trace:
    """Simulate the full transfer of `specs` under `policy`.

    Per-step order: apply schedules, allocate, advance every chunk one
    Euler step, fire freshness resets (when enabled), record.
    """
    if not specs:
        raise ConfigError("specs must be nonempty")
    ids_list = [s.id for s in specs]
    if len(set(ids_list)) != len(ids_list):
        raise ConfigError(f"duplicate chunk ids in {sorted(ids_list)}")
    sched = config.schedules
    if sched is not None:
        known = set(ids_list)
        for cid in list(sched.beta) + list(sched.r_on):
            if cid not in known:
                raise ConfigError(f"schedule refers to unknown chunk id {cid}")

    base = list(specs)
    n = len(base)
    ids = np.array(ids_list, dtype=np.int64)
    r_off = np.array([s.r_off for s in base])
    importance = np.array([s.importance for s in base])
    window = np.array([s.window if s.window is not None else 0 for s in base], dtype=np.int64)

    x = np.zeros(n)
    age = np.zeros(n, dtype=np.int64)
    completed = np.zeros(n, dtype=bool)
    reset_count = np.zeros(n, dtype=np.int64)

    completions: dict[int, int] = {}
    records: list[StepRecord] = []
    resets_total = 0
    makespan: int | None = None
    executed = 0

    def effective(t: int) -> tuple[float, np.ndarray, np.ndarray]:
        v = config.v_total
        eff_beta = np.array([s.beta for s in base])
        eff_r_on = np.array([s.r_on for s in base])
        if sched is not None:
            v = _series_value(sched.v_total, t, v)
            for cid, series in sched.beta.items():
                i = ids_list.index(cid)
                eff_beta[i] = _series_value(series, t, base[i].beta)
            for cid, series in sched.r_on.items():
                i = ids_list.index(cid)
                value = _series_value(series, t, base[i].r_on)
                if not value < r_off[i]:
                    raise ConfigError(f"scheduled r_on for chunk {cid} must stay below r_off")
                eff_r_on[i] = value
        return v, eff_beta, eff_r_on

    change_steps = sched.change_steps() if sched is not None else set()
    eff_v, eff_beta, eff_r_on = effective(1)
    order = np.lexsort((ids, eff_r_on))
    shares = np.zeros(n)

    for t in range(1, config.max_steps + 1):
        if t > 1 and t in change_steps:
            eff_v, eff_beta, eff_r_on = effective(t)
            order = np.lexsort((ids, eff_r_on))

        _fill_policy_shares(
            shares, policy, order, eff_r_on, r_off, importance, x, completed, eff_v
        )
        served = shares > 0.0

        m = eff_r_on + (r_off - eff_r_on) * x
        influx = float(np.sum(shares[served] / m[served])) if config.record_steps else 0.0

        was_live = ~completed
        # completed chunks hold shares == 0, so their x is already pinned at 1
        x = np.minimum(x + eff_beta * shares * (config.dt / m), 1.0)
        newly = was_live & (x >= 1.0)
        completed = completed | newly
        for i in np.nonzero(newly)[0]:
            completions[int(ids[i])] = t

        age[was_live & served] = 0
        age[was_live & ~served] += 1

        if config.freshness_enabled:
            fire = ~completed & (window > 0) & (age >= window)
            if fire.any():
                x[fire] = 0.0
                age[fire] = 0
                reset_count[fire] += 1
                resets_total += int(fire.sum())
                if config.on_reset is not None:
                    for i in np.nonzero(fire)[0]:
                        state = ChunkState(
                            x=0.0, age=0, completed=False, reset_count=int(reset_count[i])
                        )
                        replacement = config.on_reset(base[i], state)
                        if replacement is not None:
                            if replacement.id != base[i].id:
                                raise ConfigError("on_reset must not change the chunk id")
                            base[i] = replacement
                            r_off[i] = replacement.r_off
                            importance[i] = replacement.importance
                            window[i] = replacement.window or 0
                    eff_v, eff_beta, eff_r_on = effective(t)
                    order = np.lexsort((ids, eff_r_on))

        if config.record_steps:
            alloc = Allocation(
                {int(ids[i]): float(shares[i]) for i in np.nonzero(served)[0]}, eff_v
            )
            states = tuple(
                ChunkState(
                    x=float(x[i]),
                    age=int(age[i]),
                    completed=bool(completed[i]),
                    reset_count=int(reset_count[i]),
                )
                for i in range(n)
            )
            records.append(StepRecord(step=t, allocation=alloc, states=states, influx=influx))

        executed = t
        if completed.all():
            makespan = t
            break

    return Trace(
        chunk_ids=tuple(ids_list),
        dt=config.dt,
        steps=records,
        completions=completions,
        makespan=makespan,
        resets=resets_total,
        truncated=makespan is None,
        steps_executed=executed,
    )


def makespan_oracle(specs: list[ChunkSpec], v_total: float) -> float:
    """Policy-independent continuum completion time with no resets.

    Bandwidth-time conservation: the budget integrates to v_total * T
    and every chunk consumes exactly its own volt-time need, so any
    policy that never idles the budget finishes in the same total time.
    """
    if v_total <= 0.0:
        raise ValueError(f"v_total must be positive, got {v_total}")
    return sum(volt_time_need(s) for s in specs) / v_total


def completion_curve(trace: Trace) -> list[tuple[int, float]]:
    """Fraction of chunks complete after each executed step."""
    n = len(trace.chunk_ids)
    by_step = sorted(trace.completions.values())
    out = []
    done = 0
    ptr = 0
    for s in range(1, trace.steps_executed + 1):
        while ptr < len(by_step) and by_step[ptr] <= s:
            done += 1
            ptr += 1
        out.append((s, done / n))
    return out


def trace_to_csv(trace: Trace, out: TextIO) -> None:
    """One row per step per chunk: step, chunk_id, share, x, age, completed."""
    if not trace.steps and trace.steps_executed:
        raise ValueError("trace was run with record_steps=False; no per-step rows to write")
    out.write("step,chunk_id,share,x,age,completed\n")
    for rec in trace.steps:
        for cid, st in zip(trace.chunk_ids, rec.states):
            share = rec.allocation.shares.get(cid, 0.0)
            out.write(
                f"{rec.step},{cid},{share!r},{st.x!r},{st.age},{int(st.completed)}\n"
            )


def trace_summary(trace: Trace) -> dict:
    """Compact JSON-ready summary: completions, makespan, resets."""
    return {
        "chunk_ids": list(trace.chunk_ids),
        "completions": {str(cid): step for cid, step in sorted(trace.completions.items())},
        "dt": trace.dt,
        "makespan": trace.makespan,
        "resets": trace.resets,
        "steps_executed": trace.steps_executed,
        "truncated": trace.truncated,
    }


def trace_summary_json(trace: Trace) -> str:
    return json.dumps(trace_summary(trace), sort_keys=True, indent=2) + "\n"
