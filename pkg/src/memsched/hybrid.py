"""Reactive / deliberative control layering on top of a transfer trace.

The controller splits chunks into critical and routine by importance,
answers critical data immediately through a small look-up table, and
acts every eta steps on whatever has fully arrived by then.  eta = 1 is
fully reactive (an action every step), eta = N (the steps needed to
gather everything) is fully deliberative (a single action on complete
information).  Completed values also feed a long-term model whose
aggregates can override the reactive response.
"""

from __future__ import annotations

import logging
import operator
from dataclasses import dataclass

from .engine import Trace
from .model import ChunkSpec

log = logging.getLogger(__name__)

OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}

MODEL_STATS = ("count", "mean", "last", "last_change", "rel_change")


@dataclass(frozen=True)
class LookupRule:
    """First-match rule over a delivered scalar value."""

    chunk: int
    op: str
    value: float
    action: str

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class OverrideRule:
    """First-match rule over a long-term model aggregate."""

    stat: str
    chunk: int
    op: str
    value: float
    action: str

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison {self.op!r}")
        if self.stat not in MODEL_STATS:
            raise ValueError(f"unknown model stat {self.stat!r}, expected one of {MODEL_STATS}")


@dataclass(frozen=True)
class HybridConfig:
    eta: int
    importance_threshold: float = 0.0
    lookup_table: tuple[LookupRule, ...] = ()
    override_rules: tuple[OverrideRule, ...] = ()
    change_boost: float = 0.0

    def __post_init__(self):
        if int(self.eta) != self.eta or self.eta < 1:
            raise ValueError(f"eta must be an integer >= 1, got {self.eta}")
        if not self.importance_threshold >= 0.0:
            raise ValueError(f"importance_threshold must be >= 0, got {self.importance_threshold}")
        if not self.change_boost >= 0.0:
            raise ValueError(f"change_boost must be >= 0, got {self.change_boost}")


@dataclass(frozen=True)
class ChunkStats:
    """Running aggregates over one chunk's delivered values."""

    count: int = 0
    mean: float = 0.0
    last: float = 0.0
    last_change: float = 0.0
    rel_change: float = 0.0


@dataclass(frozen=True)
class LongTermModel:
    """Per-chunk aggregates over all deliveries, plus a step counter.

    Treated as immutable: update_model returns a new model.
    """

    per_chunk: dict[int, ChunkStats]
    steps_seen: int = 0


EMPTY_MODEL = LongTermModel(per_chunk={})


def classify(specs: list[ChunkSpec], threshold: float) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition chunk ids into (critical, routine) by importance >= threshold."""
    if threshold < 0.0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    critical = tuple(s.id for s in specs if s.importance >= threshold)
    routine = tuple(s.id for s in specs if s.importance < threshold)
    return critical, routine


def reactive_step(values: dict[int, float], table: tuple[LookupRule, ...]) -> str | None:
    """First rule whose predicate matches a supplied value wins.

    Rules referencing a chunk with no delivered value are skipped.
    """
    for rule in table:
        if rule.chunk not in values:
            log.debug("lookup rule for chunk %d skipped: no value delivered", rule.chunk)
            continue
        if OPS[rule.op](values[rule.chunk], rule.value):
            return rule.action
    return None


def hybrid_schedule(trace: Trace, config: HybridConfig) -> list[tuple[int, frozenset[int]]]:
    """Action points at steps eta, 2*eta, ... plus a final one at N.

    N is the trace's full-gather step count; each action basis is the
    set of chunks completed by that step.  eta >= N collapses to the
    single deliberative action at N.
    """
    if trace.makespan is not None:
        n_steps = trace.makespan
    else:
        n_steps = trace.steps_executed
        log.warning("trace truncated before full gather; using %d steps as horizon", n_steps)
    if n_steps == 0:
        return []
    if config.eta > n_steps:
        log.warning("eta=%d exceeds full-gather step count %d; clamped", config.eta, n_steps)
    points: list[tuple[int, frozenset[int]]] = []
    k = config.eta
    while True:
        s = min(k, n_steps)
        basis = frozenset(cid for cid, done in trace.completions.items() if done <= s)
        points.append((s, basis))
        if s >= n_steps:
            break
        k += config.eta
    return points


def update_model(model: LongTermModel, completion: tuple[int, float, int]) -> LongTermModel:
    """Fold one completion event (chunk id, value, step) into the model."""
    cid, value, step = completion
    prev = model.per_chunk.get(cid, ChunkStats())
    if prev.count == 0:
        stats = ChunkStats(count=1, mean=value, last=value, last_change=0.0, rel_change=0.0)
    else:
        change = abs(value - prev.last)
        if prev.last == 0.0:
            # relative change against a zero baseline: 0 if still zero, else full
            rel = 0.0 if value == 0.0 else 1.0
        else:
            rel = change / abs(prev.last)
        stats = ChunkStats(
            count=prev.count + 1,
            mean=prev.mean + (value - prev.mean) / (prev.count + 1),
            last=value,
            last_change=change,
            rel_change=rel,
        )
    per_chunk = dict(model.per_chunk)
    per_chunk[cid] = stats
    return LongTermModel(per_chunk=per_chunk, steps_seen=max(model.steps_seen, step))


def resolve_action(
    reactive: str | None, model: LongTermModel, rules: tuple[OverrideRule, ...]
) -> str | None:
    """Let the first matching long-term override replace the reactive action."""
    for rule in rules:
        stats = model.per_chunk.get(rule.chunk)
        if stats is None:
            continue
        if OPS[rule.op](getattr(stats, rule.stat), rule.value):
            return rule.action
    return reactive


def effective_importance(spec: ChunkSpec, model: LongTermModel, change_boost: float) -> float:
    """Importance boosted by the chunk's most recent relative change."""
    if change_boost < 0.0:
        raise ValueError(f"change_boost must be >= 0, got {change_boost}")
    stats = model.per_chunk.get(spec.id)
    if stats is None or stats.count == 0:
        return spec.importance
    return spec.importance * (1.0 + change_boost * stats.rel_change)
