"""Per-step bandwidth allocation policies.

Each policy maps the current set of chunks to a division of the total
bandwidth budget across the incomplete ones:

* sequential: everything to the single richest (lowest r_on) chunk.
* all-sites: series-circuit division over all incomplete chunks, so
  poorer (higher resistance) chunks receive proportionally more.
* leaf-cutter: full bandwidth to the globally richest chunk while it is
  incomplete, then all-sites over the rest.
* importance-leaf-cutter: all-sites division restricted to the chunks
  at or above an importance threshold, falling back to plain all-sites
  once no critical chunk remains.

Ties are always broken by lowest chunk id so traces are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ChunkSpec, ChunkState, memristance

POLICY_NAMES = ("sequential", "all-sites", "leaf-cutter", "importance-leaf-cutter")
WEIGHTINGS = ("series", "static-r-on")

Chunks = list[tuple[ChunkSpec, ChunkState]]


@dataclass(frozen=True)
class Allocation:
    """One step's bandwidth division: chunk id -> share, plus the budget."""

    shares: dict[int, float]
    v_total: float

    def total(self) -> float:
        return sum(self.shares.values())


def _check_budget(v_total: float) -> None:
    if v_total <= 0.0:
        raise ValueError(f"v_total must be positive, got {v_total}")


def _incomplete(chunks: Chunks) -> Chunks:
    return [(spec, st) for spec, st in chunks if not st.completed]


def _weights(live: Chunks, weighting: str) -> list[float]:
    if weighting == "series":
        return [memristance(spec, st.x) for spec, st in live]
    if weighting == "static-r-on":
        return [spec.r_on for spec, _ in live]
    raise ValueError(f"unknown weighting {weighting!r}")


def allocate_sequential(chunks: Chunks, v_total: float) -> Allocation:
    """All bandwidth to the incomplete chunk with minimal r_on."""
    _check_budget(v_total)
    live = _incomplete(chunks)
    if not live:
        return Allocation({}, v_total)
    best, _ = min(live, key=lambda pair: (pair[0].r_on, pair[0].id))
    return Allocation({best.id: v_total}, v_total)


def allocate_all_sites(chunks: Chunks, v_total: float, weighting: str = "series") -> Allocation:
    """Series-circuit voltage division over the incomplete chunks.

    Shares are proportional to each chunk's instantaneous resistance
    M(x) ("series", the default) or to its static r_on ("static-r-on").
    """
    _check_budget(v_total)
    live = _incomplete(chunks)
    if not live:
        return Allocation({}, v_total)
    weights = _weights(live, weighting)
    total = sum(weights)
    shares = {spec.id: v_total * w / total for (spec, _), w in zip(live, weights)}
    return Allocation(shares, v_total)


def allocate_leaf_cutter(chunks: Chunks, v_total: float, weighting: str = "series") -> Allocation:
    """Full bandwidth to the globally richest chunk, then all-sites."""
    _check_budget(v_total)
    if not chunks:
        return Allocation({}, v_total)
    best, best_state = min(chunks, key=lambda pair: (pair[0].r_on, pair[0].id))
    if not best_state.completed:
        return Allocation({best.id: v_total}, v_total)
    return allocate_all_sites(chunks, v_total, weighting)


def allocate_importance_leaf_cutter(
    chunks: Chunks, v_total: float, threshold: float, weighting: str = "series"
) -> Allocation:
    """All-sites division within the critical (importance >= threshold) set.

    Falls back to all-sites over every incomplete chunk once the
    critical set is exhausted.
    """
    _check_budget(v_total)
    if threshold < 0.0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    live = _incomplete(chunks)
    critical = [(spec, st) for spec, st in live if spec.importance >= threshold]
    pool = critical if critical else live
    return allocate_all_sites(pool, v_total, weighting)


@dataclass(frozen=True)
class Policy:
    """Named policy with its parameters, selectable from config."""

    kind: str
    threshold: float = 0.0
    weighting: str = "series"

    def __post_init__(self):
        if self.kind not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.kind!r}, expected one of {POLICY_NAMES}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"unknown weighting {self.weighting!r}, expected one of {WEIGHTINGS}")
        if not self.threshold >= 0.0:
            raise ValueError(f"threshold must be finite and >= 0, got {self.threshold}")

    def allocate(self, chunks: Chunks, v_total: float) -> Allocation:
        if self.kind == "sequential":
            return allocate_sequential(chunks, v_total)
        if self.kind == "all-sites":
            return allocate_all_sites(chunks, v_total, self.weighting)
        if self.kind == "leaf-cutter":
            return allocate_leaf_cutter(chunks, v_total, self.weighting)
        return allocate_importance_leaf_cutter(chunks, v_total, self.threshold, self.weighting)
