"""Transfer dynamics of a single data chunk.

A partially transferred chunk behaves like a linear-drift memristor:
its resistance ramps from r_on (fresh; low resistance means a rich,
cheap-to-transfer chunk) up to r_off (fully transferred) as the
normalized progress x moves from 0 to 1.  The applied bandwidth share
plays the role of a voltage drop, so the transfer rate is

    dx/dt = beta * v / M(x),   M(x) = r_on + (r_off - r_on) * x

which gives diminishing returns as the chunk fills up.  Integration is
explicit Euler with clamping at x = 1; bandwidth pushing past the clamp
in the final step is wasted, never redistributed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ChunkSpec:
    """Static description of one data chunk.

    r_on is the inverse-richness value in (0, 100].  r_off is the
    resistance at complete transfer and must exceed r_on.  window, when
    set, is the number of consecutive unserved steps after which the
    chunk's partial progress goes stale and resets.
    """

    id: int
    r_on: float
    r_off: float = 200.0
    beta: float = 1.0
    importance: float = 0.0
    window: int | None = None

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"chunk id must be non-negative, got {self.id}")
        if not 0.0 < self.r_on <= 100.0:
            raise ValueError(f"chunk {self.id}: r_on must be in (0, 100], got {self.r_on}")
        if not self.r_off > self.r_on:
            raise ValueError(f"chunk {self.id}: r_off must exceed r_on, got {self.r_off}")
        if not self.beta > 0.0:
            raise ValueError(f"chunk {self.id}: beta must be positive, got {self.beta}")
        if self.importance < 0.0:
            raise ValueError(f"chunk {self.id}: importance must be >= 0, got {self.importance}")
        if self.window is not None and (int(self.window) != self.window or self.window < 1):
            raise ValueError(f"chunk {self.id}: window must be a positive integer, got {self.window}")


@dataclass(frozen=True)
class ChunkState:
    """Evolving transfer state of one chunk.

    x is the normalized progress in [0, 1], age counts consecutive
    steps with zero allocated bandwidth since the last service.
    """

    x: float = 0.0
    age: int = 0
    completed: bool = False
    reset_count: int = 0

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"x must be in [0, 1], got {self.x}")
        if self.completed != (self.x == 1.0):
            raise ValueError("completed must hold exactly when x == 1")
        if self.age < 0 or self.reset_count < 0:
            raise ValueError("age and reset_count must be non-negative")


FRESH = ChunkState()


def memristance(spec: ChunkSpec, x: float) -> float:
    """Instantaneous resistance M(x), linear between r_on and r_off."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    return spec.r_on + (spec.r_off - spec.r_on) * x


def transfer_rate(spec: ChunkSpec, x: float, v: float) -> float:
    """Information influx dx/dt for bandwidth share v: beta * v / M(x)."""
    if v < 0.0:
        raise ValueError(f"bandwidth share must be >= 0, got {v}")
    return spec.beta * v / memristance(spec, x)


def step(state: ChunkState, spec: ChunkSpec, v: float, dt: float) -> ChunkState:
    """One explicit-Euler step of duration dt under bandwidth share v.

    Completed chunks are inert.  Progress past x = 1 is clamped; the
    excess bandwidth is wasted.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if state.completed:
        return state
    x = state.x + transfer_rate(spec, state.x, v) * dt
    age = 0 if v > 0.0 else state.age + 1
    if x >= 1.0:
        return replace(state, x=1.0, age=age, completed=True)
    return replace(state, x=x, age=age)


def apply_freshness_reset(state: ChunkState, spec: ChunkSpec) -> ChunkState:
    """Discard stale partial progress once age reaches the chunk's window.

    No-op when the chunk has no window configured or is already
    complete; completion is final.
    """
    if spec.window is None or state.completed:
        return state
    if state.age >= spec.window:
        return replace(state, x=0.0, age=0, reset_count=state.reset_count + 1)
    return state


def volt_time_need(spec: ChunkSpec) -> float:
    """Integral of M(x) dx over [0, 1] divided by beta.

    The exact bandwidth-time a chunk consumes going 0 -> 1 in the
    continuum, regardless of how the bandwidth is spread over time.
    """
    return (spec.r_on + (spec.r_off - spec.r_on) / 2.0) / spec.beta


def analytic_completion_time(spec: ChunkSpec, v_total: float) -> float:
    """Closed-form continuum completion time under constant bandwidth."""
    if v_total <= 0.0:
        raise ValueError(f"v_total must be positive, got {v_total}")
    return volt_time_need(spec) / v_total
